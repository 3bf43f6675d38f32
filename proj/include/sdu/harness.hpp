#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <system_error>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sdu/baselines.hpp"
#include "sdu/instance.hpp"
#include "sdu/objective.hpp"
#include "sdu/solver.hpp"
#include "sdu/stochastic.hpp"

namespace sdu {

// Unit-normalization constants: mean realized computing efficiency (a) and
// mean communication efficiency (b) of uniform-random deployments.
struct NormConstants {
    double a = 1.0;
    double b = 1.0;
    int n_random = 0;

    bool operator==(const NormConstants&) const = default;
};

struct BacktestRow {
    std::string algo;
    double adjusted_pi = 0.0;
    double mean_f = 0.0;
    double mean_g = 0.0;
    std::vector<double> period_f;  // realized f per period

    bool operator==(const BacktestRow&) const = default;
};

struct BacktestReport {
    double lambda = 0.5;
    NormConstants norm;
    std::vector<BacktestRow> rows;

    bool operator==(const BacktestReport&) const = default;
};

namespace detail {

// The evaluation periods of an instance: its stored samples, or a single
// all-means pseudo-period when full samples are absent.
inline std::vector<PeriodRealization> evaluation_periods(const Instance& inst) {
    const int t = common_periods(inst);
    std::vector<PeriodRealization> periods;
    if (t > 0) {
        periods.reserve(static_cast<std::size_t>(t));
        for (int p = 0; p < t; ++p) periods.push_back(sample_period(inst, p));
        return periods;
    }
    PeriodRealization mean_period;
    mean_period.w.resize(inst.cells.size());
    mean_period.kcap.resize(inst.candidates.size());
    for (std::size_t i = 0; i < mean_period.w.size(); ++i) mean_period.w[i] = inst.cells[i].mu;
    for (std::size_t s = 0; s < mean_period.kcap.size(); ++s)
        mean_period.kcap[s] = inst.candidates[s].kappa;
    periods.push_back(std::move(mean_period));
    return periods;
}

}  // namespace detail

// Grand means of realized f and of g over n_random uniform-random
// deployments, evaluated across all stored periods. Deterministic in seed.
inline NormConstants normalize_constants(const Instance& inst, int k, int n_random,
                                         std::uint64_t seed) {
    if (n_random < 1) throw ValidationError("normalize_constants: n_random must be >= 1");
    const std::vector<PeriodRealization> periods = detail::evaluation_periods(inst);
    double sum_f = 0.0, sum_g = 0.0;
    for (int r = 0; r < n_random; ++r) {
        const Deployment dep = solve_rand(inst, k, derive_seed(seed, 0x6e6f726dULL + r));
        double dep_f = 0.0;
        for (const PeriodRealization& p : periods) dep_f += realized_f(inst, dep, p);
        sum_f += dep_f / static_cast<double>(periods.size());
        sum_g += g_val(inst, dep);
    }
    NormConstants norm;
    norm.a = sum_f / n_random;
    norm.b = sum_g / n_random;
    norm.n_random = n_random;
    if (!(norm.a > 0.0) || !(norm.b > 0.0))
        throw ValidationError("normalize_constants: degenerate instance (a = " +
                              std::to_string(norm.a) + ", b = " + std::to_string(norm.b) +
                              "); normalization requires positive baselines");
    return norm;
}

// Weights that make the raw objective equal to the unit-normalized one up to
// a positive factor: maximizing lambda1'*f + lambda2'*g with these weights is
// the same as maximizing (lambda/a)*f + ((1-lambda)/b)*g.
inline Weights effective_weights(double lambda, const NormConstants& norm) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw ValidationError("lambda must lie in [0,1], got " + std::to_string(lambda));
    return Weights::from_pair(lambda / norm.a, (1.0 - lambda) / norm.b);
}

// Evaluates a fixed deployment against every stored period and reports the
// unit-normalized objective (lambda/a)*mean_f + ((1-lambda)/b)*g.
inline BacktestRow backtest(const Instance& inst, const Deployment& dep, double lambda,
                            const NormConstants& norm) {
    validate_deployment(inst, dep);
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw ValidationError("lambda must lie in [0,1], got " + std::to_string(lambda));
    const std::vector<PeriodRealization> periods = detail::evaluation_periods(inst);
    BacktestRow row;
    row.period_f.reserve(periods.size());
    double sum_f = 0.0;
    for (const PeriodRealization& p : periods) {
        const double f = realized_f(inst, dep, p);
        row.period_f.push_back(f);
        sum_f += f;
    }
    row.mean_f = sum_f / static_cast<double>(periods.size());
    row.mean_g = g_val(inst, dep);
    row.adjusted_pi =
        (lambda / norm.a) * row.mean_f + ((1.0 - lambda) / norm.b) * row.mean_g;
    return row;
}

// --- Scenario sweep ---------------------------------------------------------

struct SweepConfig {
    int n_cells = 500;
    int grid_side = 7;
    int t_periods = 192;
    std::vector<int> k_list = {5, 10};
    std::vector<double> lambda_list = {0.2, 0.5, 0.8};
    std::vector<double> kappa_list = {0.7, 1.3};
    std::vector<double> gamma_list = {0.1, 0.9};
    std::vector<std::uint64_t> seed_list = {1, 2, 3};
    int norm_samples = 100;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const {
        if (n_cells < 1) throw ValidationError("sweep.n_cells: must be >= 1");
        if (grid_side < 1) throw ValidationError("sweep.grid_side: must be >= 1");
        if (t_periods < 1) throw ValidationError("sweep.t_periods: must be >= 1");
        if (norm_samples < 1) throw ValidationError("sweep.norm_samples: must be >= 1");
        if (threads < 0) throw ValidationError("sweep.threads: must be >= 0");
        if (k_list.empty() || lambda_list.empty() || kappa_list.empty() ||
            gamma_list.empty() || seed_list.empty())
            throw ValidationError("sweep: every parameter list must be nonempty");
        for (double l : lambda_list)
            if (!(l >= 0.0 && l <= 1.0))
                throw ValidationError("sweep.lambda: " + std::to_string(l) + " outside [0,1]");
    }
};

inline constexpr const char* kSweepSchema = "sdu.sweep.v1";

// One CSV record. Numeric fields that do not apply (improvement and error
// rows) hold NaN and serialize as empty cells.
struct SweepRow {
    int scenario = 0;
    int n_cells = 0;
    int grid_side = 0;
    int m = 0;
    int t_periods = 0;
    int k = 0;
    double lambda = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
    std::uint64_t seed = 0;
    std::string algo;
    double value = std::numeric_limits<double>::quiet_NaN();
    double mean_f = std::numeric_limits<double>::quiet_NaN();
    double mean_g = std::numeric_limits<double>::quiet_NaN();
    double norm_a = std::numeric_limits<double>::quiet_NaN();
    double norm_b = std::numeric_limits<double>::quiet_NaN();
    std::string note;
};

namespace detail {

inline std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    const std::to_chars_result r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string sweep_row_csv(const SweepRow& r) {
    std::string line;
    line += kSweepSchema;
    line += ',' + std::to_string(r.scenario);
    line += ',' + std::to_string(r.n_cells);
    line += ',' + std::to_string(r.grid_side);
    line += ',' + std::to_string(r.m);
    line += ',' + std::to_string(r.t_periods);
    line += ',' + std::to_string(r.k);
    line += ',' + format_double(r.lambda);
    line += ',' + format_double(r.kappa);
    line += ',' + format_double(r.gamma);
    line += ',' + std::to_string(r.seed);
    line += ',' + csv_escape(r.algo);
    line += ',' + format_double(r.value);
    line += ',' + format_double(r.mean_f);
    line += ',' + format_double(r.mean_g);
    line += ',' + format_double(r.norm_a);
    line += ',' + format_double(r.norm_b);
    line += ',' + csv_escape(r.note);
    return line;
}

inline constexpr const char* kSweepHeader =
    "schema,scenario,n_cells,grid_side,m,t_periods,k,lambda,kappa,gamma,seed,algo,value,"
    "mean_f,mean_g,norm_a,norm_b,note";

// Work shared by every lambda of one (k, kappa, gamma, seed) combination:
// the instance, the normalization constants, and the three lambda-independent
// baseline deployments.
struct SweepBase {
    int k = 0;
    double kappa = 0.0;
    double gamma = 0.0;
    std::uint64_t seed = 0;

    Instance instance;
    NormConstants norm;
    Deployment rand_dep, facility_dep, knapsack_dep;
    bool failed = false;
    std::string error;
    double seconds = 0.0;
};

inline SweepBase build_base(const SweepConfig& config, int k, double kappa, double gamma,
                            std::uint64_t seed) {
    SweepBase base;
    base.k = k;
    base.kappa = kappa;
    base.gamma = gamma;
    base.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        GenConfig gen;
        gen.n_cells = config.n_cells;
        gen.grid_side = config.grid_side;
        gen.kappa_factor = kappa;
        gen.gamma_factor = gamma;
        gen.k_planned = k;
        gen.n_periods = config.t_periods;
        base.instance = generate_synthetic(gen, seed);
        base.norm =
            normalize_constants(base.instance, k, config.norm_samples, derive_seed(seed, 1));
        base.rand_dep = solve_rand(base.instance, k, derive_seed(seed, 2));
        base.facility_dep = solve_facility(base.instance, k);
        base.knapsack_dep = solve_knapsack(base.instance, k);
    } catch (const std::exception& e) {
        base.failed = true;
        base.error = e.what();
    }
    base.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return base;
}

}  // namespace detail

struct SweepResult {
    std::vector<SweepRow> rows;
    std::string csv;                   // full file contents, header included
    std::vector<double> base_seconds;  // per-base wall time (not in the CSV)
};

// Runs the full scenario grid. Scenario order is the nested loop
// (k, kappa, gamma, seed, lambda); bases are processed concurrently but rows
// are emitted in scenario order, so the CSV is byte-identical across runs.
// A failing scenario contributes an error row and the sweep continues.
inline SweepResult run_sweep(const SweepConfig& config) {
    config.validate();

    struct BaseKey {
        int k;
        double kappa, gamma;
        std::uint64_t seed;
    };
    std::vector<BaseKey> keys;
    for (int k : config.k_list)
        for (double kappa : config.kappa_list)
            for (double gamma : config.gamma_list)
                for (std::uint64_t seed : config.seed_list)
                    keys.push_back(BaseKey{k, kappa, gamma, seed});

    std::vector<detail::SweepBase> bases(keys.size());
    unsigned n_threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                            : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(keys.size()));
    {
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        for (unsigned w = 0; w < n_threads; ++w)
            workers.emplace_back([&, w] {
                for (std::size_t b = w; b < keys.size(); b += n_threads)
                    bases[b] = detail::build_base(config, keys[b].k, keys[b].kappa,
                                                  keys[b].gamma, keys[b].seed);
            });
        for (std::thread& t : workers) t.join();
    }

    SweepResult result;
    int scenario = 0;
    for (const detail::SweepBase& base : bases) {
        result.base_seconds.push_back(base.seconds);
        for (double lambda : config.lambda_list) {
            ++scenario;
            SweepRow proto;
            proto.scenario = scenario;
            proto.n_cells = config.n_cells;
            proto.grid_side = config.grid_side;
            proto.m = base.failed ? 0 : base.instance.m();
            proto.t_periods = config.t_periods;
            proto.k = base.k;
            proto.lambda = lambda;
            proto.kappa = base.kappa;
            proto.gamma = base.gamma;
            proto.seed = base.seed;

            if (base.failed) {
                SweepRow row = proto;
                row.algo = "error";
                row.note = base.error;
                result.rows.push_back(std::move(row));
                continue;
            }
            try {
                const Weights w = effective_weights(lambda, base.norm);
                const SolveResult solved = solve(base.instance, base.k, w);

                struct Entry {
                    const char* algo;
                    const Deployment* dep;
                    std::string note;
                };
                const Entry entries[4] = {
                    {"sdu", &solved.deployment,
                     solved.branch == Branch::upper ? "branch=upper" : "branch=lower"},
                    {"rand", &base.rand_dep, ""},
                    {"facility", &base.facility_dep, ""},
                    {"knapsack", &base.knapsack_dep, ""},
                };
                double sdu_value = 0.0, best_baseline = 0.0;
                bool first_baseline = true;
                for (const Entry& entry : entries) {
                    const BacktestRow bt = backtest(base.instance, *entry.dep, lambda, base.norm);
                    SweepRow row = proto;
                    row.algo = entry.algo;
                    row.value = bt.adjusted_pi;
                    row.mean_f = bt.mean_f;
                    row.mean_g = bt.mean_g;
                    row.norm_a = base.norm.a;
                    row.norm_b = base.norm.b;
                    row.note = entry.note;
                    result.rows.push_back(std::move(row));
                    if (entry.dep == &solved.deployment) {
                        sdu_value = bt.adjusted_pi;
                    } else if (first_baseline || bt.adjusted_pi > best_baseline) {
                        best_baseline = bt.adjusted_pi;
                        first_baseline = false;
                    }
                }
                SweepRow imp = proto;
                imp.algo = "improvement";
                imp.value = (sdu_value - best_baseline) / best_baseline * 100.0;
                imp.note = "vs best baseline";
                result.rows.push_back(std::move(imp));
            } catch (const std::exception& e) {
                SweepRow row = proto;
                row.algo = "error";
                row.note = e.what();
                result.rows.push_back(std::move(row));
            }
        }
    }

    result.csv = detail::kSweepHeader;
    result.csv += '\n';
    for (const SweepRow& row : result.rows) {
        result.csv += detail::sweep_row_csv(row);
        result.csv += '\n';
    }
    return result;
}

// Runs the sweep and writes sweep.csv plus a sweep_meta.json sidecar (config,
// library version, per-base timings — timings vary run to run, the CSV does
// not) into out_dir.
inline SweepResult run_sweep(const SweepConfig& config, const std::filesystem::path& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    SweepResult result = run_sweep(config);
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw ValidationError("cannot create output directory " + out_dir.string() + ": " +
                              ec.message());
    {
        std::ofstream csv(out_dir / "sweep.csv", std::ios::binary);
        if (!csv) throw std::runtime_error("cannot open " + (out_dir / "sweep.csv").string());
        csv << result.csv;
    }
    {
        nlohmann::json meta;
        meta["schema"] = kSweepSchema;
        meta["config"] = {
            {"n_cells", config.n_cells},   {"grid_side", config.grid_side},
            {"t_periods", config.t_periods}, {"k", config.k_list},
            {"lambda", config.lambda_list},  {"kappa", config.kappa_list},
            {"gamma", config.gamma_list},    {"seeds", config.seed_list},
            {"norm_samples", config.norm_samples}, {"threads", config.threads},
        };
        meta["timings"] = {{"total_seconds", total}, {"base_seconds", result.base_seconds}};
        std::ofstream js(out_dir / "sweep_meta.json", std::ios::binary);
        if (!js)
            throw std::runtime_error("cannot open " + (out_dir / "sweep_meta.json").string());
        js << meta.dump(2) << '\n';
    }
    return result;
}

}  // namespace sdu
