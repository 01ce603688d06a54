#include "replaylab/mdp/environments.hpp"

#include "replaylab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <vector>

namespace replaylab::mdp {

namespace {

const std::vector<double> kFourCoords{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};

TabularMDP blank(int n_states, int n_actions, double gamma) {
    TabularMDP m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.gamma = gamma;
    m.transition = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_states) * n_actions, n_states);
    m.reward = Eigen::MatrixXd::Zero(n_states, n_actions);
    m.rho0 = Eigen::VectorXd::Zero(n_states);
    m.r_max = 1.0;
    return m;
}

}  // namespace

TabularMDP chain_environment(double slip, double gamma) {
    constexpr int n = 8;
    const int moves[4] = {-1, 0, 1, 2};
    TabularMDP m = blank(n, 4, gamma);
    m.action_coords = kFourCoords;
    auto clamp = [](int s) { return std::clamp(s, 0, n - 1); };
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < 4; ++a) {
            m.transition(m.row(s, a), clamp(s + moves[a])) += 1.0 - slip;
            m.transition(m.row(s, a), clamp(s - 1)) += slip;
        }
    m.reward.row(n - 1).setConstant(1.0);
    m.reward(0, 0) = 0.05;
    m.rho0[0] = 1.0;
    m.validate();
    return m;
}

TabularMDP gridworld_environment(double slip, double gamma) {
    constexpr int side = 5;
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    TabularMDP m = blank(side * side, 4, gamma);
    m.action_coords = kFourCoords;
    const int goal = side * side - 1;
    for (int s = 0; s < side * side; ++s)
        for (int a = 0; a < 4; ++a) {
            if (s == goal) {
                m.transition(m.row(s, a), goal) = 1.0;
                continue;
            }
            const int r = std::clamp(s / side + dr[a], 0, side - 1);
            const int c = std::clamp(s % side + dc[a], 0, side - 1);
            m.transition(m.row(s, a), r * side + c) += 1.0 - slip;
            m.transition(m.row(s, a), s) += slip;
        }
    m.reward.row(goal).setConstant(1.0);
    m.rho0[0] = 1.0;
    m.validate();
    return m;
}

TabularMDP random_mdp(int n_states, int n_actions, double gamma, std::uint64_t seed) {
    if (n_states < 1 || n_actions < 1) throw ParameterError("random MDP needs states and actions");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    TabularMDP m = blank(n_states, n_actions, gamma);
    for (Eigen::Index r = 0; r < m.transition.rows(); ++r) {
        // Sparse-ish rows make some states hard to reach, which exercises
        // the zero-mass branch of the behaviour mixture.
        for (int s = 0; s < n_states; ++s) m.transition(r, s) = unit(rng) < 0.5 ? unit(rng) : 0.0;
        if (m.transition.row(r).sum() == 0.0) m.transition(r, static_cast<int>(rng() % n_states)) = 1.0;
        m.transition.row(r) /= m.transition.row(r).sum();
    }
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) m.reward(s, a) = unit(rng);
    for (int s = 0; s < n_states; ++s) m.rho0[s] = unit(rng);
    m.rho0 /= m.rho0.sum();
    m.action_coords.resize(n_actions);
    for (auto& x : m.action_coords) x = unit(rng);
    m.validate();
    return m;
}

TabularMDP parse_environment(std::istream& in) {
    std::string body;
    for (std::string line; std::getline(in, line);) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        body += line;
        body += '\n';
    }
    std::istringstream tokens(body);
    auto next = [&](const char* what) {
        double x;
        if (!(tokens >> x)) throw ParameterError(fmt::format("environment file: expected {}", what));
        return x;
    };
    const double ns = next("n_states");
    const double na = next("n_actions");
    const double gamma = next("gamma");
    if (ns < 1 || na < 1 || ns != static_cast<int>(ns) || na != static_cast<int>(na))
        throw ParameterError("environment file: n_states and n_actions must be positive integers");
    TabularMDP m = blank(static_cast<int>(ns), static_cast<int>(na), gamma);
    for (Eigen::Index r = 0; r < m.transition.rows(); ++r)
        for (int s = 0; s < m.n_states; ++s) m.transition(r, s) = next("transition probability");
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a) m.reward(s, a) = next("reward");
    for (int s = 0; s < m.n_states; ++s) m.rho0[s] = next("initial probability");
    m.action_coords.resize(m.n_actions);
    for (auto& x : m.action_coords) x = next("action coordinate");
    if (double extra; tokens >> extra) throw ParameterError("environment file: trailing values");
    m.r_max = std::max(1.0, m.reward.maxCoeff());
    m.validate();
    return m;
}

TabularMDP load_environment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError(fmt::format("cannot open environment file {}", path.string()));
    return parse_environment(in);
}

void write_environment(std::ostream& out, const TabularMDP& mdp) {
    out << std::setprecision(17);
    out << "# n_states n_actions gamma\n" << mdp.n_states << ' ' << mdp.n_actions << ' ' << mdp.gamma << '\n';
    out << "# transitions, one row per (state, action)\n";
    for (Eigen::Index r = 0; r < mdp.transition.rows(); ++r) {
        for (int s = 0; s < mdp.n_states; ++s) out << (s ? " " : "") << mdp.transition(r, s);
        out << '\n';
    }
    out << "# rewards, one row per state\n";
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) out << (a ? " " : "") << mdp.reward(s, a);
        out << '\n';
    }
    out << "# initial distribution\n";
    for (int s = 0; s < mdp.n_states; ++s) out << (s ? " " : "") << mdp.rho0[s];
    out << "\n# action coordinates\n";
    for (int a = 0; a < mdp.n_actions; ++a) out << (a ? " " : "") << mdp.action_coords[a];
    out << '\n';
}

void save_environment(const TabularMDP& mdp, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParameterError(fmt::format("cannot write environment file {}", path.string()));
    write_environment(out, mdp);
}

TabularMDP environment_by_name(const std::string& name) {
    if (name == "chain") return chain_environment();
    if (name == "grid" || name == "gridworld") return gridworld_environment();
    return load_environment(name);
}

}  // namespace replaylab::mdp
