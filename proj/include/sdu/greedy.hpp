#pragma once

#include <concepts>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "sdu/instance.hpp"

namespace sdu {

// A pure set function over ground set {0, ..., ground_size()-1}. value must
// accept any duplicate-free subset in any order; greedy only ever extends a
// previously evaluated prefix, so incremental evaluators may exploit that.
template <typename F>
concept set_function = requires(const F& f, std::span<const int> s) {
    { f.ground_size() } -> std::convertible_to<int>;
    { f.value(s) } -> std::convertible_to<double>;
};

// Optional secondary tie-break key (see GreedyOptions below).
template <typename F>
concept has_tie_key = requires(const F& f, int v) {
    { f.tie_key(v) } -> std::convertible_to<double>;
};

struct GreedyResult {
    std::vector<int> picks;    // in selection order
    std::vector<double> gains; // marginal gain of each pick
    double value = 0.0;        // value of the full pick set
};

struct GreedyOptions {
    bool lazy = false;  // priority-queue variant; must be bit-identical
};

namespace detail {

template <typename F>
double greedy_tie_key(const F& f, int v) {
    if constexpr (has_tie_key<F>) return f.tie_key(v);
    else { (void)f; (void)v; return 0.0; }
}

// Candidate order: larger gain first, then larger tie key, then smaller index.
inline bool greedy_better(double gain_a, double key_a, int a, double gain_b, double key_b,
                          int b) {
    if (gain_a != gain_b) return gain_a > gain_b;
    if (key_a != key_b) return key_a > key_b;
    return a < b;
}

template <set_function F>
GreedyResult greedy_standard(const F& f, int k) {
    const int m = f.ground_size();
    GreedyResult result;
    std::vector<int> scratch;
    scratch.reserve(static_cast<std::size_t>(k));
    std::vector<char> picked(static_cast<std::size_t>(m), 0);
    double base = f.value(scratch);
    for (int step = 0; step < k; ++step) {
        int best = -1;
        double best_gain = 0.0, best_key = 0.0;
        for (int v = 0; v < m; ++v) {
            if (picked[v]) continue;
            scratch.push_back(v);
            const double gain = f.value(scratch) - base;
            scratch.pop_back();
            const double key = greedy_tie_key(f, v);
            if (best < 0 || greedy_better(gain, key, v, best_gain, best_key, best)) {
                best = v;
                best_gain = gain;
                best_key = key;
            }
        }
        picked[best] = 1;
        scratch.push_back(best);
        base = f.value(scratch);
        result.picks.push_back(best);
        result.gains.push_back(best_gain);
    }
    result.value = base;
    return result;
}

// Lazy variant: cached gains are upper bounds once the function is
// submodular; a stale top entry is re-evaluated and pushed back. Selection and
// tie-breaking reproduce greedy_standard exactly because an entry is accepted
// only when its gain is current, and the heap order equals greedy_better.
template <set_function F>
GreedyResult greedy_lazy(const F& f, int k) {
    const int m = f.ground_size();
    struct Entry {
        double gain;
        double key;
        int v;
        int stamp;  // step at which gain was computed
    };
    auto worse = [](const Entry& a, const Entry& b) {
        return !greedy_better(a.gain, a.key, a.v, b.gain, b.key, b.v);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);

    GreedyResult result;
    std::vector<int> scratch;
    scratch.reserve(static_cast<std::size_t>(k));
    double base = f.value(scratch);
    for (int v = 0; v < m; ++v) {
        scratch.push_back(v);
        const double gain = f.value(scratch) - base;
        scratch.pop_back();
        heap.push(Entry{gain, greedy_tie_key(f, v), v, 0});
    }
    for (int step = 0; step < k; ++step) {
        while (true) {
            Entry top = heap.top();
            if (top.stamp == step) {
                heap.pop();
                scratch.push_back(top.v);
                base = f.value(scratch);
                result.picks.push_back(top.v);
                result.gains.push_back(top.gain);
                break;
            }
            heap.pop();
            scratch.push_back(top.v);
            top.gain = f.value(scratch) - base;
            scratch.pop_back();
            top.stamp = step;
            heap.push(top);
        }
    }
    result.value = base;
    return result;
}

}  // namespace detail

// Greedy maximization of f under |S| <= k: repeatedly add the candidate with
// the largest marginal gain. Always returns exactly k picks, in order, with
// the per-step gain trace.
template <set_function F>
GreedyResult greedy_max(const F& f, int k, const GreedyOptions& opts = {}) {
    const int m = f.ground_size();
    if (k < 1) throw ValidationError("greedy_max: k must be >= 1, got " + std::to_string(k));
    if (k > m)
        throw ValidationError("greedy_max: k = " + std::to_string(k) +
                              " exceeds ground set size " + std::to_string(m));
    return opts.lazy ? detail::greedy_lazy(f, k) : detail::greedy_standard(f, k);
}

}  // namespace sdu
