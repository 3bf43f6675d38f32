#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sdu/instance.hpp"
#include "sdu/stochastic.hpp"

namespace sdu {

// Priority pair (lambda1, lambda2 = 1 - lambda1).
struct Weights {
    double lambda1 = 0.5;
    double lambda2 = 0.5;

    static Weights from_lambda1(double l1) {
        if (!(l1 >= 0.0 && l1 <= 1.0))
            throw ValidationError("lambda1 must lie in [0,1], got " + std::to_string(l1));
        return Weights{l1, 1.0 - l1};
    }
    // For unit-normalized pipelines: arbitrary nonnegative weights rescaled to
    // sum to 1 (positive rescaling does not change any argmax).
    static Weights from_pair(double w1, double w2) {
        if (!(w1 >= 0.0) || !(w2 >= 0.0) || !(w1 + w2 > 0.0))
            throw ValidationError("weights must be nonnegative and not both zero");
        return Weights{w1 / (w1 + w2), w2 / (w1 + w2)};
    }

    bool operator==(const Weights&) const = default;
};

// Full assignment: server_of[i] is the candidate id serving cell i.
struct Assignment {
    std::vector<int> server_of;

    bool operator==(const Assignment&) const = default;
};

// A selected server set plus a full assignment of every cell to a member of
// that set.
struct Deployment {
    std::vector<int> servers;
    Assignment assignment;

    bool operator==(const Deployment&) const = default;
};

inline void validate_deployment(const Instance& inst, const Deployment& dep) {
    if (dep.servers.empty()) throw ValidationError("deployment.servers: must not be empty");
    std::vector<char> in_set(static_cast<std::size_t>(inst.m()), 0);
    for (std::size_t j = 0; j < dep.servers.size(); ++j) {
        const int s = dep.servers[j];
        if (s < 0 || s >= inst.m())
            throw ValidationError("deployment.servers[" + std::to_string(j) + "]: id " +
                                  std::to_string(s) + " outside [0," +
                                  std::to_string(inst.m()) + ")");
        if (in_set[s])
            throw ValidationError("deployment.servers[" + std::to_string(j) +
                                  "]: duplicate id " + std::to_string(s));
        in_set[s] = 1;
    }
    if (static_cast<int>(dep.assignment.server_of.size()) != inst.n())
        throw ValidationError("deployment.assignment: length " +
                              std::to_string(dep.assignment.server_of.size()) +
                              " does not match cell count " + std::to_string(inst.n()));
    for (int i = 0; i < inst.n(); ++i) {
        const int s = dep.assignment.server_of[i];
        if (s < 0 || s >= inst.m() || !in_set[s])
            throw ValidationError("deployment.assignment[" + std::to_string(i) + "]: server " +
                                  std::to_string(s) + " is not in the selected set");
    }
}

// Mean per-server loads, indexed by candidate id (zero for unselected).
inline std::vector<double> server_loads(const Instance& inst, const Deployment& dep) {
    std::vector<double> load(static_cast<std::size_t>(inst.m()), 0.0);
    for (int i = 0; i < inst.n(); ++i) load[dep.assignment.server_of[i]] += inst.cells[i].mu;
    return load;
}

// Mean-approximated computing efficiency: sum over selected servers of
// min(kappa_s, mean load on s).
inline double f_hat(const Instance& inst, const Deployment& dep) {
    const std::vector<double> load = server_loads(inst, dep);
    double total = 0.0;
    for (int s : dep.servers) total += std::fmin(inst.candidates[s].kappa, load[s]);
    return total;
}

// Communication efficiency: sum of scores of assigned pairs.
inline double g_val(const Instance& inst, const Deployment& dep) {
    double total = 0.0;
    for (int i = 0; i < inst.n(); ++i) total += inst.c(i, dep.assignment.server_of[i]);
    return total;
}

inline double omega_hat(const Instance& inst, const Deployment& dep, const Weights& w) {
    return w.lambda1 * f_hat(inst, dep) + w.lambda2 * g_val(inst, dep);
}

// Lower bound on E[f] for a fixed deployment: f_hat minus the per-server
// slack-deviation penalty. May be negative; not clamped.
inline double f_l1(const Instance& inst, const Deployment& dep) {
    std::vector<std::vector<int>> assigned(static_cast<std::size_t>(inst.m()));
    for (int i = 0; i < inst.n(); ++i) assigned[dep.assignment.server_of[i]].push_back(i);
    double value = f_hat(inst, dep);
    for (int s : dep.servers)
        value -= slack_stddev(inst, s, assigned[s]) / std::numbers::sqrt2;
    return value;
}

// Assignment-free upper bound on f: min(total demand, total selected capacity).
inline double f_u(const Instance& inst, std::span<const int> servers) {
    double cap = 0.0;
    for (int s : servers) cap += inst.candidates[s].kappa;
    return std::fmin(inst.total_mu, cap);
}

// Assignment-free upper bound on g: every cell served by its best score in S
// (the facility-location objective). Empty set scores 0.
inline double g_u(const Instance& inst, std::span<const int> servers) {
    if (servers.empty()) return 0.0;
    double total = 0.0;
    for (int i = 0; i < inst.n(); ++i) {
        double best = 0.0;
        bool first = true;
        for (int s : servers) {
            const double c = inst.c(i, s);
            if (first || c > best) { best = c; first = false; }
        }
        total += best;
    }
    return total;
}

inline double pi_u(const Instance& inst, std::span<const int> servers, const Weights& w) {
    return w.lambda1 * f_u(inst, servers) + w.lambda2 * g_u(inst, servers);
}

// Per-candidate score of the all-cells-to-one-server deployment lower bound:
// h(s) = lambda1 * (min(kappa_s, total_mu) - nu_s / sqrt(2)) + lambda2 * sum_i c_is.
// nu may be precomputed (see nu_all) and passed in to avoid rescans.
inline double h_score(const Instance& inst, int s, const Weights& w, double nu_s) {
    double comm = 0.0;
    for (int i = 0; i < inst.n(); ++i) comm += inst.c(i, s);
    return w.lambda1 * (std::fmin(inst.candidates[s].kappa, inst.total_mu) -
                        nu_s / std::numbers::sqrt2) +
           w.lambda2 * comm;
}

inline std::vector<double> h_scores(const Instance& inst, const Weights& w) {
    const std::vector<double> nus = nu_all(inst);
    std::vector<double> out(static_cast<std::size_t>(inst.m()));
    for (int s = 0; s < inst.m(); ++s) out[s] = h_score(inst, s, w, nus[s]);
    return out;
}

// Assignment-free lower bound on the bilevel objective: the best single
// server in S, all cells assigned to it. Empty set scores 0. Values may be
// negative when a server's slack deviation dominates; no clamp is applied.
inline double pi_l(const Instance& inst, std::span<const int> servers, const Weights& w) {
    if (servers.empty()) return 0.0;
    const std::vector<double> h = h_scores(inst, w);
    double best = h[servers.front()];
    for (int s : servers) best = std::fmax(best, h[s]);
    return best;
}

// Objective on one concrete realization: capacities and workloads replaced by
// their realized values; the communication term is unchanged.
inline double realized_omega(const Instance& inst, const Deployment& dep,
                             const PeriodRealization& r, const Weights& w) {
    std::vector<double> load(static_cast<std::size_t>(inst.m()), 0.0);
    for (int i = 0; i < inst.n(); ++i) load[dep.assignment.server_of[i]] += r.w[i];
    double f = 0.0;
    for (int s : dep.servers) f += std::fmin(r.kcap[s], load[s]);
    return w.lambda1 * f + w.lambda2 * g_val(inst, dep);
}

// Realized computing efficiency alone (the f part of realized_omega).
inline double realized_f(const Instance& inst, const Deployment& dep,
                         const PeriodRealization& r) {
    std::vector<double> load(static_cast<std::size_t>(inst.m()), 0.0);
    for (int i = 0; i < inst.n(); ++i) load[dep.assignment.server_of[i]] += r.w[i];
    double f = 0.0;
    for (int s : dep.servers) f += std::fmin(r.kcap[s], load[s]);
    return f;
}

// --- Set-function adapters for the greedy engine ---------------------------

// pi_u as a set function over candidate ids.
struct PiUpperEvaluator {
    const Instance* inst;
    Weights weights;

    PiUpperEvaluator(const Instance& instance, const Weights& w)
        : inst(&instance), weights(w) {}

    int ground_size() const { return inst->m(); }
    double value(std::span<const int> servers) const { return pi_u(*inst, servers, weights); }
};

// pi_l as a set function. Per-candidate scores are fixed, so values are maxima
// over precomputed entries; the score doubles as a tie-break key, making
// greedy equivalent to taking the k candidates with the largest scores.
struct PiLowerEvaluator {
    std::vector<double> h;

    PiLowerEvaluator(const Instance& instance, const Weights& w) : h(h_scores(instance, w)) {}
    explicit PiLowerEvaluator(std::vector<double> scores) : h(std::move(scores)) {}

    int ground_size() const { return static_cast<int>(h.size()); }
    double value(std::span<const int> servers) const {
        if (servers.empty()) return 0.0;
        double best = h[servers.front()];
        for (int s : servers) best = std::fmax(best, h[s]);
        return best;
    }
    double tie_key(int v) const { return h[v]; }
};

// Facility-location objective g_u as a set function.
struct FacilityEvaluator {
    const Instance* inst;

    explicit FacilityEvaluator(const Instance& instance) : inst(&instance) {}

    int ground_size() const { return inst->m(); }
    double value(std::span<const int> servers) const { return g_u(*inst, servers); }
};

}  // namespace sdu
