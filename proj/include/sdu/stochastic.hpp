#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "sdu/instance.hpp"
#include "sdu/random.hpp"
#include "sdu/stats.hpp"

namespace sdu {

// One period's concrete workload/capacity draw. period_index is the stored
// column for historical periods and -1 for fresh synthetic draws.
struct PeriodRealization {
    std::vector<double> w;     // realized workload per cell
    std::vector<double> kcap;  // realized capacity per candidate
    int period_index = -1;
};

struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;
};

// Number of stored periods shared by every cell and every candidate, or 0 if
// any entity lacks samples or lengths disagree.
inline int common_periods(const Instance& inst) {
    std::size_t t = 0;
    bool first = true;
    for (const Cell& cell : inst.cells) {
        if (cell.samples.empty()) return 0;
        if (first) { t = cell.samples.size(); first = false; }
        if (cell.samples.size() != t) return 0;
    }
    for (const Candidate& cand : inst.candidates) {
        if (cand.samples.empty()) return 0;
        if (cand.samples.size() != t) return 0;
    }
    return static_cast<int>(t);
}

namespace detail {

// True when candidate s and every listed cell carry samples of one common
// length; that length is written to t_out.
inline bool paired_periods(const Instance& inst, int s, std::span<const int> cell_ids,
                           std::size_t& t_out) {
    const std::vector<double>& ks = inst.candidates[s].samples;
    if (ks.empty()) return false;
    for (int i : cell_ids) {
        const std::vector<double>& ws = inst.cells[i].samples;
        if (ws.size() != ks.size()) return false;
    }
    t_out = ks.size();
    return true;
}

}  // namespace detail

// Std dev of the slack K_s - sum of the listed cells' workloads. Prefers the
// paired empirical path (captures any workload/capacity correlation present
// in the data); falls back to the independence decomposition
// sqrt(gamma_s^2 + sum sigma_i^2).
inline double slack_stddev(const Instance& inst, int s, std::span<const int> cell_ids) {
    std::size_t t = 0;
    if (detail::paired_periods(inst, s, cell_ids, t)) {
        std::vector<double> slack(t);
        for (std::size_t p = 0; p < t; ++p) {
            double load = 0.0;
            for (int i : cell_ids) load += inst.cells[i].samples[p];
            slack[p] = inst.candidates[s].samples[p] - load;
        }
        return population_stddev(slack);
    }
    double var = inst.candidates[s].gamma * inst.candidates[s].gamma;
    for (int i : cell_ids) var += inst.cells[i].sigma * inst.cells[i].sigma;
    return std::sqrt(var);
}

// nu_s: std dev of (K_s - total workload over all cells).
inline double nu(const Instance& inst, int s) {
    std::vector<int> all(inst.cells.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return slack_stddev(inst, s, all);
}

// nu for every candidate; computes the per-period total workload once.
inline std::vector<double> nu_all(const Instance& inst) {
    const int m = inst.m();
    std::vector<double> out(m);
    const int t = common_periods(inst);
    if (t > 0) {
        std::vector<double> total_w(t, 0.0);
        for (const Cell& cell : inst.cells)
            for (int p = 0; p < t; ++p) total_w[p] += cell.samples[p];
        std::vector<double> slack(t);
        for (int s = 0; s < m; ++s) {
            for (int p = 0; p < t; ++p) slack[p] = inst.candidates[s].samples[p] - total_w[p];
            out[s] = population_stddev(slack);
        }
        return out;
    }
    double cell_var = 0.0;
    for (const Cell& cell : inst.cells) cell_var += cell.sigma * cell.sigma;
    for (int s = 0; s < m; ++s)
        out[s] = std::sqrt(inst.candidates[s].gamma * inst.candidates[s].gamma + cell_var);
    return out;
}

// Sample mean/variance of elementwise min(X, Y) from paired samples. Used to
// validate the E[min] sandwich: min(EX,EY) - sqrt(V[X-Y]/2) <= E[min(X,Y)]
// <= min(EX,EY).
inline MomentSummary mc_expected_min(std::span<const double> x_samples,
                                     std::span<const double> y_samples) {
    if (x_samples.empty() || x_samples.size() != y_samples.size())
        throw ValidationError("mc_expected_min: needs equal-length nonempty sample lists");
    std::vector<double> mins(x_samples.size());
    for (std::size_t i = 0; i < mins.size(); ++i)
        mins[i] = std::fmin(x_samples[i], y_samples[i]);
    return MomentSummary{mean_of(mins), population_variance(mins)};
}

// Stored period t as a realization.
inline PeriodRealization sample_period(const Instance& inst, int t) {
    const int periods = common_periods(inst);
    if (periods == 0)
        throw ValidationError("sample_period: instance has no complete stored samples");
    if (t < 0 || t >= periods)
        throw ValidationError("sample_period: period " + std::to_string(t) +
                              " out of range [0," + std::to_string(periods) + ")");
    PeriodRealization r;
    r.period_index = t;
    r.w.resize(inst.cells.size());
    r.kcap.resize(inst.candidates.size());
    for (std::size_t i = 0; i < r.w.size(); ++i) r.w[i] = inst.cells[i].samples[t];
    for (std::size_t s = 0; s < r.kcap.size(); ++s) r.kcap[s] = inst.candidates[s].samples[t];
    return r;
}

// Fresh draw from the marginal moments: Gamma matched to (mean, std) for both
// workloads and capacities, so realizations are nonnegative and the drawn
// distribution has exactly the instance's first two moments.
inline PeriodRealization draw_period(const Instance& inst, std::mt19937_64& rng) {
    PeriodRealization r;
    r.w.resize(inst.cells.size());
    r.kcap.resize(inst.candidates.size());
    for (std::size_t i = 0; i < r.w.size(); ++i)
        r.w[i] = detail::gamma_by_moments(rng, inst.cells[i].mu, inst.cells[i].sigma);
    for (std::size_t s = 0; s < r.kcap.size(); ++s)
        r.kcap[s] = detail::gamma_by_moments(rng, inst.candidates[s].kappa,
                                             inst.candidates[s].gamma);
    return r;
}

inline PeriodRealization draw_period(const Instance& inst, std::uint64_t seed) {
    std::mt19937_64 rng = make_rng(seed, /*stream=*/0x647261ULL);
    return draw_period(inst, rng);
}

// count independent fresh realizations, deterministic in seed.
inline std::vector<PeriodRealization> draw_periods(const Instance& inst, int count,
                                                   std::uint64_t seed) {
    std::mt19937_64 rng = make_rng(seed, /*stream=*/0x647261ULL);
    std::vector<PeriodRealization> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(draw_period(inst, rng));
    return out;
}

}  // namespace sdu
