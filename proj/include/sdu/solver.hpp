#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdu/greedy.hpp"
#include "sdu/instance.hpp"
#include "sdu/objective.hpp"

namespace sdu {

// Marginal-gain formula for moving a cell to a newly opened server. The
// exact_difference mode scores a move as the true change of the
// mean-approximated objective, including the new server's before-term
// -min(kappa_v, W_v); the legacy mode drops that term, which only matters
// once the new server already carries load (it shifts every gain by the same
// constant, changing where the stop-at-nonpositive rule cuts off).
enum class GainMode { exact_difference, legacy };

enum class Branch { lower, upper };

struct SolverOptions {
    GainMode gain_mode = GainMode::exact_difference;
    bool lazy_greedy = false;
};

// Mutable working state: selected servers, current assignment, and the mean
// load on each server (indexed by candidate id), maintained incrementally.
struct SolverState {
    std::vector<int> servers;
    std::vector<int> server_of;   // -1 before the first server is opened
    std::vector<double> load;

    static SolverState empty(const Instance& inst) {
        SolverState st;
        st.server_of.assign(static_cast<std::size_t>(inst.n()), -1);
        st.load.assign(static_cast<std::size_t>(inst.m()), 0.0);
        return st;
    }

    Deployment deployment() const { return Deployment{servers, Assignment{server_of}}; }
};

// Change of omega_hat if cell i moves from its current server to v:
// lambda1 * [ (min(k_v, W_v + mu_i) - min(k_v, W_v)) + (min(k_u, W_u - mu_i) - min(k_u, W_u)) ]
//   + lambda2 * (c_iv - c_iu).
inline double delta_gain(const Instance& inst, const SolverState& state, int i, int v,
                         const Weights& w, GainMode mode = GainMode::exact_difference) {
    const int u = state.server_of[i];
    const double mu_i = inst.cells[i].mu;
    const double kv = inst.candidates[v].kappa;
    const double ku = inst.candidates[u].kappa;
    const double wv = state.load[v];
    const double wu = state.load[u];
    double df = std::fmin(kv, wv + mu_i) + std::fmin(ku, wu - mu_i) - std::fmin(ku, wu);
    if (mode == GainMode::exact_difference) df -= std::fmin(kv, wv);
    const double dg = inst.c(i, v) - inst.c(i, u);
    return w.lambda1 * df + w.lambda2 * dg;
}

namespace detail {

inline void move_cell(const Instance& inst, SolverState& state, int i, int v) {
    const int u = state.server_of[i];
    state.load[u] -= inst.cells[i].mu;
    state.load[v] += inst.cells[i].mu;
    state.server_of[i] = v;
}

}  // namespace detail

// Opens server v in-place and migrates cells toward it: repeatedly move the
// cell with the largest gain, stopping once the best gain is nonpositive.
// Each cell moves at most once per call; loads are refreshed after every
// accepted move, so remaining gains are recomputed against current loads.
// For the first server all cells are assigned to it outright (the only
// feasible assignment). Returns the number of cells moved.
inline int augment_in_place(const Instance& inst, SolverState& state, int v, const Weights& w,
                            GainMode mode = GainMode::exact_difference) {
    state.servers.push_back(v);
    if (state.servers.size() == 1) {
        double total = 0.0;
        for (int i = 0; i < inst.n(); ++i) {
            state.server_of[i] = v;
            total += inst.cells[i].mu;
        }
        state.load[v] = total;
        return inst.n();
    }
    std::vector<char> moved(static_cast<std::size_t>(inst.n()), 0);
    int n_moves = 0;
    while (n_moves < inst.n()) {
        int best = -1;
        double best_gain = 0.0;
        for (int i = 0; i < inst.n(); ++i) {
            if (moved[i]) continue;
            const double gain = delta_gain(inst, state, i, v, w, mode);
            if (best < 0 || gain > best_gain) {
                best = i;
                best_gain = gain;
            }
        }
        if (best < 0 || !(best_gain > 0.0)) break;
        detail::move_cell(inst, state, best, v);
        moved[best] = 1;
        ++n_moves;
    }
    return n_moves;
}

// Functional wrapper: the assignment that augmenting state.S with v yields.
inline Assignment assign_augment(const Instance& inst, const SolverState& state, int v,
                                 const Weights& w, GainMode mode = GainMode::exact_difference) {
    SolverState scratch = state;
    augment_in_place(inst, scratch, v, w, mode);
    return Assignment{std::move(scratch.server_of)};
}

// Best all-cells-to-one-server deployment over S. Ties go to the earlier
// entry of S.
inline std::pair<int, Assignment> best_single_server(const Instance& inst,
                                                     std::span<const int> servers,
                                                     const Weights& w) {
    if (servers.empty())
        throw ValidationError("best_single_server: server set must not be empty");
    int best = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int s : servers) {
        double comm = 0.0;
        for (int i = 0; i < inst.n(); ++i) comm += inst.c(i, s);
        const double value =
            w.lambda1 * std::fmin(inst.candidates[s].kappa, inst.total_mu) + w.lambda2 * comm;
        if (value > best_value) {
            best_value = value;
            best = s;
        }
    }
    return {best, Assignment{std::vector<int>(static_cast<std::size_t>(inst.n()), best)}};
}

struct BranchTrace {
    std::vector<int> picks;
    std::vector<double> gains;      // greedy bound gains per pick
    std::vector<int> reassigned;    // cells moved by each augment call
    double objective = 0.0;
    bool used_single_server = false;
};

struct SolveResult {
    Deployment deployment;
    double objective = 0.0;
    Branch branch = Branch::upper;
    BranchTrace lower;
    BranchTrace upper;
};

namespace detail {

template <set_function F>
std::pair<BranchTrace, Deployment> run_branch(const Instance& inst, const F& bound, int k,
                                              const Weights& w, const SolverOptions& opts) {
    const GreedyResult greedy = greedy_max(bound, k, GreedyOptions{opts.lazy_greedy});
    SolverState state = SolverState::empty(inst);
    BranchTrace trace;
    trace.picks = greedy.picks;
    trace.gains = greedy.gains;
    for (int v : greedy.picks)
        trace.reassigned.push_back(augment_in_place(inst, state, v, w, opts.gain_mode));
    Deployment dep = state.deployment();
    trace.objective = omega_hat(inst, dep, w);

    // Safeguard: the migration heuristic can in principle land below the
    // single-server lower bound its set was chosen by; keep whichever
    // assignment scores higher.
    const auto [s, single] = best_single_server(inst, state.servers, w);
    Deployment single_dep{state.servers, single};
    const double single_value = omega_hat(inst, single_dep, w);
    if (single_value > trace.objective) {
        trace.objective = single_value;
        trace.used_single_server = true;
        dep = std::move(single_dep);
    }
    return {std::move(trace), std::move(dep)};
}

}  // namespace detail

// Sandwich-driven solve: greedily maximize the lower and the upper bound of
// the bilevel objective, thread the migration pass after each pick on both
// branches, and return the branch whose resulting deployment scores higher
// under the mean-approximated objective.
inline SolveResult solve(const Instance& inst, int k, const Weights& w,
                         const SolverOptions& opts = {}) {
    if (k < 1) throw ValidationError("solve: k must be >= 1, got " + std::to_string(k));
    if (k > inst.m())
        throw ValidationError("solve: k = " + std::to_string(k) + " exceeds candidate count " +
                              std::to_string(inst.m()));
    SolveResult result;
    auto [lower_trace, lower_dep] = detail::run_branch(inst, PiLowerEvaluator(inst, w), k, w, opts);
    auto [upper_trace, upper_dep] = detail::run_branch(inst, PiUpperEvaluator(inst, w), k, w, opts);
    result.lower = std::move(lower_trace);
    result.upper = std::move(upper_trace);
    result.branch = result.upper.objective > result.lower.objective ? Branch::upper
                                                                    : Branch::lower;
    result.objective =
        result.branch == Branch::upper ? result.upper.objective : result.lower.objective;
    result.deployment = result.branch == Branch::upper ? std::move(upper_dep)
                                                       : std::move(lower_dep);
    return result;
}

}  // namespace sdu
