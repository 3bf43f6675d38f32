#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sdu/greedy.hpp"
#include "sdu/instance.hpp"
#include "sdu/objective.hpp"
#include "sdu/random.hpp"

namespace sdu {

namespace detail {

// Error-free transform: hi + lo == a + b exactly (Knuth two-sum).
struct TwoSum {
    double hi;
    double lo;
};

inline TwoSum two_sum(double a, double b) {
    const double s = a + b;
    const double ap = s - b;
    const double bp = s - ap;
    return {s, (a - ap) + (b - bp)};
}

}  // namespace detail

// Exact three-way comparison of a+b against c+d. The rounded sums order the
// true values whenever they differ; on a rounded tie the error terms are the
// exact residuals, so comparing them decides correctly. Lets property checks
// test inequalities between marginals without introducing any tolerance.
inline int compare_sums(double a, double b, double c, double d) {
    const detail::TwoSum x = detail::two_sum(a, b);
    const detail::TwoSum y = detail::two_sum(c, d);
    if (x.hi != y.hi) return x.hi < y.hi ? -1 : 1;
    if (x.lo != y.lo) return x.lo < y.lo ? -1 : 1;
    return 0;
}

struct PropertyWitness {
    std::vector<int> base;  // the set S of the failing trial
    int v1 = -1;            // -1 in monotonicity reports
    int v2 = -1;
    double gap = 0.0;       // how far the inequality failed (double approximation)
};

struct PropertyReport {
    int trials = 0;
    int violations = 0;
    double worst_gap = 0.0;
    std::vector<PropertyWitness> witnesses;  // first few violations
};

namespace detail {

constexpr int kMaxWitnesses = 10;

// Random subset leaving at least `spare` elements out; appended candidates
// keep the evaluated prefix stable across the four subset evaluations.
inline std::vector<int> random_subset(std::mt19937_64& rng, int m, int spare) {
    while (true) {
        std::vector<int> s;
        std::vector<int> out;
        for (int v = 0; v < m; ++v) {
            if (uniform_below(rng, 2) == 1) s.push_back(v);
            else out.push_back(v);
        }
        if (static_cast<int>(out.size()) >= spare) return s;
    }
}

inline std::vector<int> outside(const std::vector<int>& s, int m) {
    std::vector<char> in(static_cast<std::size_t>(m), 0);
    for (int v : s) in[v] = 1;
    std::vector<int> out;
    for (int v = 0; v < m; ++v)
        if (!in[v]) out.push_back(v);
    return out;
}

}  // namespace detail

// Diminishing-returns check: for random S and v1, v2 outside S, the marginal
// of v2 on S must be at least its marginal on S + v1. The comparison is exact
// (no tolerance): value(S+v2) + value(S+v1) >= value(S+v1+v2) + value(S).
template <set_function F>
PropertyReport check_submodular(const F& f, int trials, std::uint64_t seed) {
    const int m = f.ground_size();
    if (m < 2) throw ValidationError("check_submodular: ground set must have >= 2 elements");
    std::mt19937_64 rng = make_rng(seed, /*stream=*/0x736d6f64ULL);
    PropertyReport report;
    report.trials = trials;
    std::vector<int> set;
    for (int t = 0; t < trials; ++t) {
        std::vector<int> base = detail::random_subset(rng, m, 2);
        std::vector<int> out = detail::outside(base, m);
        const int i1 = static_cast<int>(uniform_below(rng, out.size()));
        int i2 = static_cast<int>(uniform_below(rng, out.size() - 1));
        if (i2 >= i1) ++i2;
        const int v1 = out[i1];
        const int v2 = out[i2];

        set = base;
        const double a0 = f.value(set);
        set.push_back(v1);
        const double a1 = f.value(set);
        set.push_back(v2);
        const double a3 = f.value(set);
        set.pop_back();
        set.back() = v2;
        const double a2 = f.value(set);

        if (compare_sums(a2, a1, a3, a0) < 0) {
            ++report.violations;
            const double gap = (a3 - a2) + (a0 - a1);
            report.worst_gap = std::max(report.worst_gap, gap);
            if (static_cast<int>(report.witnesses.size()) < detail::kMaxWitnesses)
                report.witnesses.push_back(PropertyWitness{base, v1, v2, gap});
        }
    }
    return report;
}

// Monotonicity check: value(S + v) >= value(S) for random S and v outside S.
template <set_function F>
PropertyReport check_monotone(const F& f, int trials, std::uint64_t seed) {
    const int m = f.ground_size();
    if (m < 1) throw ValidationError("check_monotone: ground set must have >= 1 element");
    std::mt19937_64 rng = make_rng(seed, /*stream=*/0x6d6f6e6fULL);
    PropertyReport report;
    report.trials = trials;
    std::vector<int> set;
    for (int t = 0; t < trials; ++t) {
        std::vector<int> base = detail::random_subset(rng, m, 1);
        std::vector<int> out = detail::outside(base, m);
        const int v = out[uniform_below(rng, out.size())];

        set = base;
        const double before = f.value(set);
        set.push_back(v);
        const double after = f.value(set);
        if (after < before) {
            ++report.violations;
            const double gap = before - after;
            report.worst_gap = std::max(report.worst_gap, gap);
            if (static_cast<int>(report.witnesses.size()) < detail::kMaxWitnesses)
                report.witnesses.push_back(PropertyWitness{base, v, -1, gap});
        }
    }
    return report;
}

struct OracleResult {
    Deployment best_deployment;
    double best_value = 0.0;
    long long enumerated_count = 0;
};

namespace detail {

inline double pow_guard(double base, int exp, double cap) {
    double v = 1.0;
    for (int i = 0; i < exp; ++i) {
        v *= base;
        if (v > cap) return v;
    }
    return v;
}

inline double binomial(int m, int k) {
    double v = 1.0;
    for (int j = 1; j <= k; ++j) v = v * (m - k + j) / j;
    return v;
}

// Odometer over assignments with the last cell's digit moving fastest, i.e.
// lexicographic order over (digit of cell 0, digit of cell 1, ...). Keeping
// the first maximizer therefore yields the lexicographically smallest one.
inline std::pair<Assignment, double> enumerate_assignments(const Instance& inst,
                                                           const std::vector<int>& servers,
                                                           const Weights& w) {
    const int n = inst.n();
    const int b = static_cast<int>(servers.size());
    std::vector<int> digit(static_cast<std::size_t>(n), 0);
    Assignment current;
    current.server_of.assign(static_cast<std::size_t>(n), servers[0]);
    Deployment dep{servers, current};

    Assignment best = dep.assignment;
    double best_value = -std::numeric_limits<double>::infinity();
    while (true) {
        const double value = omega_hat(inst, dep, w);
        if (value > best_value) {
            best_value = value;
            best = dep.assignment;
        }
        int pos = n - 1;
        while (pos >= 0 && digit[pos] == b - 1) {
            digit[pos] = 0;
            dep.assignment.server_of[pos] = servers[0];
            --pos;
        }
        if (pos < 0) break;
        ++digit[pos];
        dep.assignment.server_of[pos] = servers[digit[pos]];
    }
    return {std::move(best), best_value};
}

}  // namespace detail

// Exhaustive inner problem: the best assignment of all cells to servers of S
// under the mean-approximated objective. Ties resolve to the
// lexicographically smallest assignment (by cell-0 digit first, over S in
// ascending id order).
inline std::pair<Assignment, double> brute_force_assignment(const Instance& inst,
                                                            std::vector<int> servers,
                                                            const Weights& w) {
    if (servers.empty())
        throw ValidationError("brute_force_assignment: server set must not be empty");
    std::sort(servers.begin(), servers.end());
    const double count =
        detail::pow_guard(static_cast<double>(servers.size()), inst.n(), 1e7);
    if (count > 1e7)
        throw ValidationError("brute_force_assignment: |S|^N = " + std::to_string(count) +
                              " exceeds the 1e7 enumeration guard");
    return detail::enumerate_assignments(inst, servers, w);
}

// Exhaustive bilevel optimum: every k-subset of candidates, each with its
// exhaustive inner assignment. Ties resolve to the lexicographically smallest
// subset, then assignment.
inline OracleResult brute_force_deployment(const Instance& inst, int k, const Weights& w) {
    if (k < 1 || k > inst.m())
        throw ValidationError("brute_force_deployment: k = " + std::to_string(k) +
                              " outside [1," + std::to_string(inst.m()) + "]");
    const double subsets = detail::binomial(inst.m(), k);
    const double inner = detail::pow_guard(static_cast<double>(k), inst.n(), 1e7);
    if (subsets * inner > 1e7)
        throw ValidationError("brute_force_deployment: C(M,k)*k^N = " +
                              std::to_string(subsets * inner) +
                              " exceeds the 1e7 enumeration guard");

    OracleResult result;
    result.best_value = -std::numeric_limits<double>::infinity();
    result.enumerated_count = static_cast<long long>(subsets * inner);

    std::vector<int> subset(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) subset[j] = j;
    while (true) {
        auto [assignment, value] = detail::enumerate_assignments(inst, subset, w);
        if (value > result.best_value) {
            result.best_value = value;
            result.best_deployment = Deployment{subset, std::move(assignment)};
        }
        int pos = k - 1;
        while (pos >= 0 && subset[pos] == inst.m() - k + pos) --pos;
        if (pos < 0) break;
        ++subset[pos];
        for (int j = pos + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
    return result;
}

}  // namespace sdu
