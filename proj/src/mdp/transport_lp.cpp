#include "replaylab/errors.hpp"
#include "replaylab/mdp/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace replaylab::mdp {

// Successive shortest paths on the bipartite transportation graph. Supplies
// p_i sit on the left, demands q_j on the right, every left-right arc has
// unbounded capacity and cost |x_i - x_j|. Bellman-Ford handles the negative
// reverse arcs of the residual graph.
double transport_lp_w1(std::span<const double> p, std::span<const double> q,
                       std::span<const double> coords) {
    const std::size_t n = p.size();
    if (q.size() != n || coords.size() != n)
        throw ParameterError("transport problem needs both distributions on the same support");
    constexpr double eps = 1e-15;
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::vector<double> supply(p.begin(), p.end()), demand(q.begin(), q.end());
    std::vector<double> flow(n * n, 0.0);
    auto cost = [&](std::size_t i, std::size_t j) { return std::abs(coords[i] - coords[j]); };

    // Nodes 0..n-1 are sources, n..2n-1 sinks.
    std::vector<double> dist(2 * n);
    std::vector<std::ptrdiff_t> pred(2 * n);
    const std::size_t max_rounds = 4 * n * n + 16;
    for (std::size_t round = 0; round < max_rounds; ++round) {
        double remaining = 0.0;
        for (double s : supply) remaining += s;
        if (remaining <= 1e-13) break;
        if (round + 1 == max_rounds) throw NumericalError("transport solver did not terminate");

        std::fill(dist.begin(), dist.end(), inf);
        std::fill(pred.begin(), pred.end(), -1);
        for (std::size_t i = 0; i < n; ++i)
            if (supply[i] > eps) dist[i] = 0.0;
        for (std::size_t pass = 0; pass < 2 * n; ++pass) {
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (dist[i] == inf) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    const double d = dist[i] + cost(i, j);
                    if (d < dist[n + j] - 1e-15) {
                        dist[n + j] = d;
                        pred[n + j] = static_cast<std::ptrdiff_t>(i);
                        changed = true;
                    }
                }
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (dist[n + j] == inf) continue;
                for (std::size_t i = 0; i < n; ++i) {
                    if (flow[i * n + j] <= eps) continue;
                    const double d = dist[n + j] - cost(i, j);
                    if (d < dist[i] - 1e-15) {
                        dist[i] = d;
                        pred[i] = static_cast<std::ptrdiff_t>(n + j);
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }

        std::size_t sink = n;
        double best = inf;
        for (std::size_t j = 0; j < n; ++j)
            if (demand[j] > eps && dist[n + j] < best) {
                best = dist[n + j];
                sink = n + j;
            }
        if (best == inf) break;  // demand exhausted; leftover supply is round-off

        // Walk back to the origin source, collecting the bottleneck.
        double amount = demand[sink - n];
        std::size_t v = sink;
        while (pred[v] != -1) {
            const auto u = static_cast<std::size_t>(pred[v]);
            if (v < n) amount = std::min(amount, flow[v * n + (u - n)]);  // reverse arc sink u -> source v
            v = u;
        }
        amount = std::min(amount, supply[v]);

        v = sink;
        while (pred[v] != -1) {
            const auto u = static_cast<std::size_t>(pred[v]);
            if (v >= n)
                flow[u * n + (v - n)] += amount;
            else
                flow[v * n + (u - n)] -= amount;
            v = u;
        }
        supply[v] -= amount;
        demand[sink - n] -= amount;
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) total += flow[i * n + j] * cost(i, j);
    return total;
}

}  // namespace replaylab::mdp
