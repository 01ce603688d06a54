#include "replaylab/mdp/wasserstein.hpp"

#include "replaylab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace replaylab::mdp {

namespace {

void check_inputs(std::span<const double> p, std::span<const double> q, std::span<const double> coords) {
    if (p.size() != q.size() || p.size() != coords.size())
        throw ParameterError("W1 needs both distributions on the same support");
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0) || !(q[i] >= 0.0)) throw ParameterError("W1 masses must be non-negative");
        sp += p[i];
        sq += q[i];
    }
    if (std::abs(sp - sq) > 1e-9 * std::max(1.0, sp)) throw ParameterError("W1 needs equal total mass");
}

}  // namespace

double w1_distance(std::span<const double> p, std::span<const double> q,
                   std::span<const double> coords) {
    check_inputs(p, q, coords);
    std::vector<std::size_t> order(coords.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return coords[a] < coords[b]; });
    double cdf_gap = 0.0;
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        cdf_gap += p[order[k]] - q[order[k]];
        area += std::abs(cdf_gap) * (coords[order[k + 1]] - coords[order[k]]);
    }
    return area;
}

Eigen::VectorXd policy_w1(const TabularMDP& mdp, const Policy& pi1, const Policy& pi2) {
    Eigen::VectorXd out(mdp.n_states);
    std::vector<double> a(mdp.n_actions), b(mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int k = 0; k < mdp.n_actions; ++k) {
            a[k] = pi1(s, k);
            b[k] = pi2(s, k);
        }
        out[s] = w1_distance(a, b, mdp.action_coords);
    }
    return out;
}

}  // namespace replaylab::mdp
