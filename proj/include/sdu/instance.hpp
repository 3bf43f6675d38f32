#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sdu/random.hpp"
#include "sdu/stats.hpp"

namespace sdu {

// Raised for malformed input: bad files, out-of-range parameters, broken
// invariants. The CLI maps it to exit code 2.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A demand point with a stochastic per-period workload. If samples are
// present, mu/sigma are the population moments of those samples (derived,
// not independent inputs).
struct Cell {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double mu = 0.0;     // mean workload per period
    double sigma = 0.0;  // workload standard deviation
    std::vector<double> samples;  // optional historical observations

    bool operator==(const Cell&) const = default;
};

// A candidate server site with a stochastic effective capacity.
struct Candidate {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double kappa = 0.0;  // mean capacity per period
    double gamma = 0.0;  // capacity standard deviation
    std::vector<double> samples;

    bool operator==(const Candidate&) const = default;
};

// Pairwise communication costs d in [0,1], row-major N x M. Scores are the
// complement c = 1 - d and are computed on access.
struct CostMatrix {
    int n = 0;
    int m = 0;
    std::vector<double> d;

    double at(int i, int s) const { return d[static_cast<std::size_t>(i) * m + s]; }
    double& at(int i, int s) { return d[static_cast<std::size_t>(i) * m + s]; }

    bool operator==(const CostMatrix&) const = default;
};

namespace detail {

inline void check_entity_common(const char* kind, int index, int id, double mean_field,
                                double std_field, const std::vector<double>& samples,
                                const char* mean_name, const char* std_name) {
    const std::string where = std::string(kind) + "[" + std::to_string(index) + "]";
    if (id != index)
        throw ValidationError(where + ".id: expected " + std::to_string(index) + ", got " +
                              std::to_string(id));
    if (!(mean_field >= 0.0) || !std::isfinite(mean_field))
        throw ValidationError(where + "." + mean_name + ": must be finite and >= 0");
    if (!(std_field >= 0.0) || !std::isfinite(std_field))
        throw ValidationError(where + "." + std_name + ": must be finite and >= 0");
    if (!samples.empty()) {
        for (std::size_t t = 0; t < samples.size(); ++t) {
            if (!(samples[t] >= 0.0) || !std::isfinite(samples[t]))
                throw ValidationError(where + ".samples[" + std::to_string(t) +
                                      "]: must be finite and >= 0");
        }
        const double m = mean_of(samples);
        const double s = population_stddev(samples);
        if (!approx_equal_rel(m, mean_field, 1e-9))
            throw ValidationError(where + "." + mean_name +
                                  ": does not match sample mean (" + std::to_string(m) + ")");
        if (!approx_equal_rel(s, std_field, 1e-9))
            throw ValidationError(where + "." + std_name +
                                  ": does not match sample stddev (" + std::to_string(s) + ")");
    }
}

}  // namespace detail

// d_is = euclidean(i, s) / max pairwise distance, so d lands in [0,1] with at
// least one entry exactly 1.
inline CostMatrix compute_costs(const std::vector<Cell>& cells,
                                const std::vector<Candidate>& candidates) {
    if (cells.empty() || candidates.empty())
        throw ValidationError("compute_costs: need at least one cell and one candidate");
    const int n = static_cast<int>(cells.size());
    const int m = static_cast<int>(candidates.size());
    CostMatrix costs;
    costs.n = n;
    costs.m = m;
    costs.d.resize(static_cast<std::size_t>(n) * m);
    double max_dist = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int s = 0; s < m; ++s) {
            const double dx = cells[i].x - candidates[s].x;
            const double dy = cells[i].y - candidates[s].y;
            const double dist = std::hypot(dx, dy);
            costs.at(i, s) = dist;
            max_dist = std::max(max_dist, dist);
        }
    }
    if (max_dist == 0.0)
        throw ValidationError(
            "compute_costs: all cell-candidate distances are zero; "
            "provide an explicit cost matrix instead");
    for (double& v : costs.d) v /= max_dist;
    return costs;
}

// Immutable problem data. Construct via Instance::create, which validates
// all invariants and fills in derived fields.
struct Instance {
    std::vector<Cell> cells;
    std::vector<Candidate> candidates;
    CostMatrix costs;
    double total_mu = 0.0;

    int n() const { return static_cast<int>(cells.size()); }
    int m() const { return static_cast<int>(candidates.size()); }
    double d(int i, int s) const { return costs.at(i, s); }
    double c(int i, int s) const { return 1.0 - costs.at(i, s); }

    bool operator==(const Instance&) const = default;

    static Instance create(std::vector<Cell> cells, std::vector<Candidate> candidates) {
        CostMatrix costs = compute_costs(cells, candidates);
        return create(std::move(cells), std::move(candidates), std::move(costs));
    }

    static Instance create(std::vector<Cell> cells, std::vector<Candidate> candidates,
                           CostMatrix costs) {
        if (cells.empty()) throw ValidationError("cells: must not be empty");
        if (candidates.empty()) throw ValidationError("candidates: must not be empty");
        for (std::size_t i = 0; i < cells.size(); ++i)
            detail::check_entity_common("cells", static_cast<int>(i), cells[i].id, cells[i].mu,
                                        cells[i].sigma, cells[i].samples, "mu", "sigma");
        for (std::size_t s = 0; s < candidates.size(); ++s)
            detail::check_entity_common("candidates", static_cast<int>(s), candidates[s].id,
                                        candidates[s].kappa, candidates[s].gamma,
                                        candidates[s].samples, "kappa", "gamma");
        if (costs.n != static_cast<int>(cells.size()) ||
            costs.m != static_cast<int>(candidates.size()) ||
            costs.d.size() != cells.size() * candidates.size())
            throw ValidationError("costs.d: dimensions " + std::to_string(costs.n) + "x" +
                                  std::to_string(costs.m) + " (" +
                                  std::to_string(costs.d.size()) + " entries) do not match " +
                                  std::to_string(cells.size()) + "x" +
                                  std::to_string(candidates.size()));
        for (int i = 0; i < costs.n; ++i)
            for (int s = 0; s < costs.m; ++s) {
                const double v = costs.at(i, s);
                if (!(v >= 0.0 && v <= 1.0))
                    throw ValidationError("costs.d[" + std::to_string(i) + "][" +
                                          std::to_string(s) + "]: " + std::to_string(v) +
                                          " outside [0,1]");
            }
        Instance inst;
        inst.cells = std::move(cells);
        inst.candidates = std::move(candidates);
        inst.costs = std::move(costs);
        double total = 0.0;
        for (const Cell& cell : inst.cells) total += cell.mu;
        inst.total_mu = total;
        return inst;
    }
};

// Parameters for the synthetic instance generator. Defaults mirror the
// experimental setup the library targets: heavy-tailed cell workloads, a
// grid of candidate sites, per-period capacity draws.
struct GenConfig {
    int n_cells = 500;
    int grid_side = 7;            // candidate regions per axis
    double kappa_factor = 1.0;    // capacity scale relative to per-server demand
    double gamma_factor = 0.5;    // capacity coefficient of variation
    int k_planned = 10;           // k used in the capacity formula
    int n_periods = 192;          // stored samples per cell/server
    double area_side = 100.0;     // side length of the square service area
    double workload_median = 100.0;   // median of the cell mean-workload distribution
    double workload_log_sigma = 1.5;  // log-space std of cell mean workloads
    double cv_lightest = 10.0;    // workload cv at the smallest mean
    double cv_busiest = 0.8;      // workload cv at the largest mean

    void validate() const {
        if (n_cells < 1) throw ValidationError("GenConfig.n_cells: must be >= 1");
        if (grid_side < 1) throw ValidationError("GenConfig.grid_side: must be >= 1");
        if (!(kappa_factor > 0.0)) throw ValidationError("GenConfig.kappa_factor: must be > 0");
        if (!(gamma_factor > 0.0)) throw ValidationError("GenConfig.gamma_factor: must be > 0");
        if (k_planned < 1) throw ValidationError("GenConfig.k_planned: must be >= 1");
        if (n_periods < 1) throw ValidationError("GenConfig.n_periods: must be >= 1");
        if (!(area_side > 0.0)) throw ValidationError("GenConfig.area_side: must be > 0");
        if (!(workload_median > 0.0))
            throw ValidationError("GenConfig.workload_median: must be > 0");
        if (!(workload_log_sigma > 0.0))
            throw ValidationError("GenConfig.workload_log_sigma: must be > 0");
        if (!(cv_lightest > 0.0)) throw ValidationError("GenConfig.cv_lightest: must be > 0");
        if (!(cv_busiest > 0.0)) throw ValidationError("GenConfig.cv_busiest: must be > 0");
    }
};

namespace detail {

// Gamma draw matched to (mean, std); degenerate cases collapse to the mean.
inline double gamma_by_moments(std::mt19937_64& rng, double mean, double stddev) {
    if (mean <= 0.0) return 0.0;
    if (stddev <= 0.0) return mean;
    const double shape = (mean / stddev) * (mean / stddev);
    const double scale = stddev * stddev / mean;
    std::gamma_distribution<double> dist(shape, scale);
    return dist(rng);
}

}  // namespace detail

// Deterministic in (config, seed). Cells are placed uniformly in a square;
// candidates sit at the centers of the non-empty grid regions. Cell mean
// workloads are log-normal; the per-cell cv interpolates log-log from
// cv_lightest at the smallest mean to cv_busiest at the largest. Stored
// moments are the population moments of the drawn samples.
inline Instance generate_synthetic(const GenConfig& config, std::uint64_t seed) {
    config.validate();
    std::mt19937_64 rng = make_rng(seed, /*stream=*/0x67656eULL);

    const int n = config.n_cells;
    const int g = config.grid_side;
    std::vector<Cell> cells(n);
    for (int i = 0; i < n; ++i) {
        cells[i].id = i;
        cells[i].x = uniform01(rng) * config.area_side;
        cells[i].y = uniform01(rng) * config.area_side;
    }

    // Target means, then per-cell cv interpolated in log-log space.
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    std::vector<double> target_mu(n);
    for (int i = 0; i < n; ++i)
        target_mu[i] = config.workload_median *
                       std::exp(config.workload_log_sigma * unit_normal(rng));
    const auto [mn_it, mx_it] = std::minmax_element(target_mu.begin(), target_mu.end());
    const double log_min = std::log(*mn_it);
    const double log_max = std::log(*mx_it);
    const double log_cv_lo = std::log(config.cv_lightest);
    const double log_cv_hi = std::log(config.cv_busiest);
    for (int i = 0; i < n; ++i) {
        double t = 0.5;
        if (log_max > log_min) t = (std::log(target_mu[i]) - log_min) / (log_max - log_min);
        const double cv = std::exp(log_cv_lo + t * (log_cv_hi - log_cv_lo));
        cells[i].samples.resize(config.n_periods);
        for (int p = 0; p < config.n_periods; ++p)
            cells[i].samples[p] = detail::gamma_by_moments(rng, target_mu[i], cv * target_mu[i]);
        cells[i].mu = mean_of(cells[i].samples);
        cells[i].sigma = population_stddev(cells[i].samples);
    }

    double total_mu = 0.0;
    for (const Cell& cell : cells) total_mu += cell.mu;

    // Candidates: centers of non-empty regions, in row-major region order.
    const double region_side = config.area_side / g;
    std::vector<char> non_empty(static_cast<std::size_t>(g) * g, 0);
    for (const Cell& cell : cells) {
        const int gx = std::min(g - 1, static_cast<int>(cell.x / region_side));
        const int gy = std::min(g - 1, static_cast<int>(cell.y / region_side));
        non_empty[static_cast<std::size_t>(gy) * g + gx] = 1;
    }
    std::vector<Candidate> candidates;
    for (int gy = 0; gy < g; ++gy)
        for (int gx = 0; gx < g; ++gx) {
            if (!non_empty[static_cast<std::size_t>(gy) * g + gx]) continue;
            Candidate cand;
            cand.id = static_cast<int>(candidates.size());
            cand.x = (gx + 0.5) * region_side;
            cand.y = (gy + 0.5) * region_side;
            candidates.push_back(cand);
        }

    const double lo = std::min(1.0, config.kappa_factor);
    const double hi = std::max(1.0, config.kappa_factor);
    const double per_server_demand = total_mu / config.k_planned;
    std::normal_distribution<double> unit_normal2(0.0, 1.0);
    for (Candidate& cand : candidates) {
        const double u = lo + (hi - lo) * uniform01(rng);
        const double target_kappa = u * per_server_demand;
        const double target_gamma = config.gamma_factor * target_kappa;
        cand.samples.resize(config.n_periods);
        for (int p = 0; p < config.n_periods; ++p)
            cand.samples[p] = std::max(0.0, target_kappa + target_gamma * unit_normal2(rng));
        cand.kappa = mean_of(cand.samples);
        cand.gamma = population_stddev(cand.samples);
    }

    return Instance::create(std::move(cells), std::move(candidates));
}

}  // namespace sdu
