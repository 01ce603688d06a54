#pragma once

#include "replaylab/mdp/tabular_mdp.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace replaylab::mdp {

/// Eight states in a row, start at 0. Actions move by -1, 0, +1, +2 (coords
/// 0, 1/3, 2/3, 1); with probability `slip` the agent slides back one state
/// instead. Reward 1 for any action in state 7, plus a small 0.05 reward for
/// stepping left at state 0.
TabularMDP chain_environment(double slip = 0.1, double gamma = 0.9);

/// 5 x 5 grid, start in the corner (0, 0), absorbing goal at (4, 4) paying 1
/// per step. Actions up, down, left, right (coords 0, 1/3, 2/3, 1); with
/// probability `slip` the agent stays put.
TabularMDP gridworld_environment(double slip = 0.1, double gamma = 0.9);

/// Dense random MDP with rewards in [0, 1] for property tests.
TabularMDP random_mdp(int n_states, int n_actions, double gamma, std::uint64_t seed);

/**
 * Plain-text format. Blank lines and text after '#' are ignored; numbers are
 * whitespace separated.
 *
 *   n_states n_actions gamma
 *   n_states * n_actions rows of n_states transition probabilities,
 *     ordered (s=0,a=0), (s=0,a=1), ...
 *   n_states rows of n_actions rewards
 *   one row of n_states initial probabilities
 *   one row of n_actions action coordinates
 *
 * r_max is taken as max(1, largest reward).
 */
TabularMDP parse_environment(std::istream& in);
TabularMDP load_environment(const std::filesystem::path& path);
void write_environment(std::ostream& out, const TabularMDP& mdp);
void save_environment(const TabularMDP& mdp, const std::filesystem::path& path);

/// "chain", "grid", or a path to a file in the format above.
TabularMDP environment_by_name(const std::string& name);

}  // namespace replaylab::mdp
