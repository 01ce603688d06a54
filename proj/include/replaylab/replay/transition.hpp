#pragma once

#include <cstdint>

namespace replaylab::replay {

/// One (s, a, r, s') sample. `episode` is 1-based, `step` is the 0-based
/// position inside its trajectory and `global_time` the 1-based insertion
/// order across the whole run.
struct Transition {
    std::int32_t state{0};
    std::int32_t action{0};
    double reward{0.0};
    std::int32_t next_state{0};
    std::int64_t episode{1};
    std::int64_t step{0};
    std::int64_t global_time{1};

    friend bool operator==(const Transition&, const Transition&) = default;
};

}  // namespace replaylab::replay
