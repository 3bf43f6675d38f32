#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "sdu/greedy.hpp"
#include "sdu/instance.hpp"
#include "sdu/objective.hpp"
#include "sdu/random.hpp"

namespace sdu {

namespace detail {

inline void check_k(const Instance& inst, int k) {
    if (k < 1) throw ValidationError("k must be >= 1, got " + std::to_string(k));
    if (k > inst.m())
        throw ValidationError("k = " + std::to_string(k) + " exceeds candidate count " +
                              std::to_string(inst.m()));
}

// Every cell to its best-scoring selected server; ties to the earlier server.
inline Assignment nearest_assignment(const Instance& inst, const std::vector<int>& servers) {
    Assignment a;
    a.server_of.resize(static_cast<std::size_t>(inst.n()));
    for (int i = 0; i < inst.n(); ++i) {
        int best = servers.front();
        double best_c = inst.c(i, best);
        for (int s : servers) {
            const double c = inst.c(i, s);
            if (c > best_c) {
                best_c = c;
                best = s;
            }
        }
        a.server_of[i] = best;
    }
    return a;
}

}  // namespace detail

// Uniform random k-subset of the candidates, each cell assigned uniformly at
// random over the chosen set. Deterministic in seed.
inline Deployment solve_rand(const Instance& inst, int k, std::uint64_t seed) {
    detail::check_k(inst, k);
    std::mt19937_64 rng = make_rng(seed, /*stream=*/0x72616e64ULL);
    std::vector<int> pool(static_cast<std::size_t>(inst.m()));
    std::iota(pool.begin(), pool.end(), 0);
    for (int j = 0; j < k; ++j) {
        const auto r = j + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(
                                                                   inst.m() - j)));
        std::swap(pool[j], pool[r]);
    }
    std::vector<int> servers(pool.begin(), pool.begin() + k);
    std::sort(servers.begin(), servers.end());
    Assignment a;
    a.server_of.resize(static_cast<std::size_t>(inst.n()));
    for (int i = 0; i < inst.n(); ++i)
        a.server_of[i] = servers[uniform_below(rng, static_cast<std::uint64_t>(k))];
    return Deployment{std::move(servers), std::move(a)};
}

// Greedy facility location: maximize the coverage score g_u, then assign each
// cell to its best server, so g_val equals g_u(S) by construction.
inline Deployment solve_facility(const Instance& inst, int k) {
    detail::check_k(inst, k);
    GreedyResult greedy = greedy_max(FacilityEvaluator(inst), k);
    std::vector<int> servers = std::move(greedy.picks);
    Assignment a = detail::nearest_assignment(inst, servers);
    return Deployment{std::move(servers), std::move(a)};
}

// Top-k candidates by mean capacity; cells packed largest-first onto the
// server with the best marginal processed workload. Every cell is assigned
// even when all servers are saturated (ties: earlier server in capacity
// order).
inline Deployment solve_knapsack(const Instance& inst, int k) {
    detail::check_k(inst, k);
    std::vector<int> order(static_cast<std::size_t>(inst.m()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (inst.candidates[a].kappa != inst.candidates[b].kappa)
            return inst.candidates[a].kappa > inst.candidates[b].kappa;
        return a < b;
    });
    std::vector<int> servers(order.begin(), order.begin() + k);
    std::sort(servers.begin(), servers.end());

    std::vector<int> cells(static_cast<std::size_t>(inst.n()));
    std::iota(cells.begin(), cells.end(), 0);
    std::stable_sort(cells.begin(), cells.end(), [&](int a, int b) {
        if (inst.cells[a].mu != inst.cells[b].mu) return inst.cells[a].mu > inst.cells[b].mu;
        return a < b;
    });

    Assignment a;
    a.server_of.resize(static_cast<std::size_t>(inst.n()));
    std::vector<double> load(static_cast<std::size_t>(inst.m()), 0.0);
    for (int i : cells) {
        const double mu_i = inst.cells[i].mu;
        int best = servers.front();
        double best_gain = -1.0;
        for (int s : servers) {
            const double kappa = inst.candidates[s].kappa;
            const double gain = std::fmin(kappa, load[s] + mu_i) - std::fmin(kappa, load[s]);
            if (gain > best_gain) {
                best_gain = gain;
                best = s;
            }
        }
        a.server_of[i] = best;
        load[best] += mu_i;
    }
    return Deployment{std::move(servers), std::move(a)};
}

}  // namespace sdu
