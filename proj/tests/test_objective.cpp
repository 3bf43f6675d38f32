#include <cmath>
#include <numbers>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "sdu/sdu.hpp"
#include "support/test_util.hpp"

using namespace sdu;
using test_util::CandSpec;
using test_util::CellSpec;
using test_util::make_instance;

namespace {

// mu = (3, 4, 6), kappa = (5, 10), scores chosen so the assignment
// (0 -> s0, 1 -> s0, 2 -> s1) has communication value 0.9 + 0.3 + 0.5 = 1.7.
Instance combined_instance() {
    return make_instance(
        {CellSpec{0, 0, 3, 0, {}}, CellSpec{0, 0, 4, 0, {}}, CellSpec{0, 0, 6, 0, {}}},
        {CandSpec{0, 0, 5, 0, {}}, CandSpec{0, 0, 10, 0, {}}},
        {{0.1, 0.5}, {0.7, 0.5}, {0.5, 0.5}});
}

const Deployment kCombinedDep{{0, 1}, Assignment{{0, 0, 1}}};

// The 2x2 score matrix c = [[0.9, 0.2], [0.3, 0.8]] as costs d = 1 - c.
Instance two_by_two(double mu0 = 1, double mu1 = 1, double k0 = 100, double k1 = 100) {
    return make_instance({CellSpec{0, 0, mu0, 0, {}}, CellSpec{0, 0, mu1, 0, {}}},
                         {CandSpec{0, 0, k0, 0, {}}, CandSpec{0, 0, k1, 0, {}}},
                         {{1 - 0.9, 1 - 0.2}, {1 - 0.3, 1 - 0.8}});
}

}  // namespace

TEST_CASE("mean-approximated computing efficiency caps each server at capacity") {
    const Instance inst = combined_instance();
    CHECK(f_hat(inst, kCombinedDep) == 11.0);  // min(5, 3+4) + min(10, 6)
}

TEST_CASE("zero capacity processes nothing; slack capacity processes everything") {
    const Instance zero = make_instance(
        {CellSpec{0, 0, 3, 0, {}}, CellSpec{0, 0, 4, 0, {}}},
        {CandSpec{0, 0, 0, 0, {}}, CandSpec{0, 1, 0, 0, {}}});
    const Deployment dep{{0, 1}, Assignment{{0, 1}}};
    CHECK(f_hat(zero, dep) == 0.0);

    const Instance slack = make_instance(
        {CellSpec{0, 0, 3, 0, {}}, CellSpec{0, 0, 4, 0, {}}},
        {CandSpec{0, 0, 50, 0, {}}, CandSpec{0, 1, 50, 0, {}}});
    CHECK(f_hat(slack, dep) == slack.total_mu);
}

TEST_CASE("communication value sums the scores of assigned pairs") {
    const Instance inst = two_by_two();
    CHECK(g_val(inst, Deployment{{0, 1}, Assignment{{0, 1}}}) == Catch::Approx(1.7).epsilon(1e-12));

    const Instance all_zero_cost = make_instance(
        {CellSpec{0, 0, 1, 0, {}}, CellSpec{0, 0, 1, 0, {}}, CellSpec{0, 0, 1, 0, {}}},
        {CandSpec{0, 0, 1, 0, {}}}, {{0.0}, {0.0}, {0.0}});
    CHECK(g_val(all_zero_cost, Deployment{{0}, Assignment{{0, 0, 0}}}) == 3.0);

    const Instance all_max_cost = make_instance(
        {CellSpec{0, 0, 1, 0, {}}, CellSpec{0, 0, 1, 0, {}}, CellSpec{0, 0, 1, 0, {}}},
        {CandSpec{0, 0, 1, 0, {}}}, {{1.0}, {1.0}, {1.0}});
    CHECK(g_val(all_max_cost, Deployment{{0}, Assignment{{0, 0, 0}}}) == 0.0);
}

TEST_CASE("the combined objective interpolates linearly between f and g") {
    const Instance inst = combined_instance();
    CHECK(omega_hat(inst, kCombinedDep, Weights::from_lambda1(1.0)) ==
          f_hat(inst, kCombinedDep));
    CHECK(omega_hat(inst, kCombinedDep, Weights::from_lambda1(0.0)) ==
          g_val(inst, kCombinedDep));
    CHECK(omega_hat(inst, kCombinedDep, Weights::from_lambda1(0.5)) ==
          Catch::Approx(6.35).epsilon(1e-12));  // 0.5*11 + 0.5*1.7
}

TEST_CASE("weights validate their range") {
    CHECK_THROWS_AS(Weights::from_lambda1(-0.1), ValidationError);
    CHECK_THROWS_AS(Weights::from_lambda1(1.1), ValidationError);
    CHECK(Weights::from_lambda1(0.2).lambda2 == 0.8);
    const Weights w = Weights::from_pair(2.0, 6.0);
    CHECK(w.lambda1 == 0.25);
    CHECK(w.lambda2 == 0.75);
    CHECK_THROWS_AS(Weights::from_pair(0.0, 0.0), ValidationError);
}

TEST_CASE("deployment validation pins down the offending entry") {
    const Instance inst = two_by_two();
    CHECK_THROWS_WITH(validate_deployment(inst, Deployment{{0, 0}, Assignment{{0, 0}}}),
                      Catch::Matchers::ContainsSubstring("duplicate"));
    CHECK_THROWS_WITH(validate_deployment(inst, Deployment{{0}, Assignment{{0, 1}}}),
                      Catch::Matchers::ContainsSubstring("assignment[1]"));
    CHECK_THROWS_WITH(validate_deployment(inst, Deployment{{0}, Assignment{{0}}}),
                      Catch::Matchers::ContainsSubstring("length"));
}

TEST_CASE("deterministic instances collapse the lower bound onto the mean value") {
    const Instance inst = combined_instance();  // all variances zero
    CHECK(f_l1(inst, kCombinedDep) == f_hat(inst, kCombinedDep));
}

TEST_CASE("single server with one uncertain cell pays the 3-4-5 slack penalty") {
    const Instance inst =
        make_instance({CellSpec{0, 0, 10, 4, {}}}, {CandSpec{0, 1, 5, 3, {}}});
    const Deployment dep{{0}, Assignment{{0}}};
    const double expected = f_hat(inst, dep) - 5.0 / std::numbers::sqrt2;
    CHECK(f_l1(inst, dep) == Catch::Approx(expected).epsilon(1e-15));
}

TEST_CASE("assignment-free computing bound is the capped capacity sum") {
    const Instance scarce = make_instance(
        {CellSpec{0, 0, 5, 0, {}}}, {CandSpec{0, 1, 3, 0, {}}, CandSpec{0, 2, 4, 0, {}}});
    const std::vector<int> both{0, 1};
    CHECK(f_u(scarce, both) == 5.0);  // demand binds

    const Instance rich = make_instance(
        {CellSpec{0, 0, 13, 0, {}}}, {CandSpec{0, 1, 3, 0, {}}, CandSpec{0, 2, 4, 0, {}}});
    CHECK(f_u(rich, both) == 7.0);  // capacity binds
    CHECK(f_u(rich, std::vector<int>{}) == 0.0);
}

TEST_CASE("assignment-free communication bound is the best-score cover") {
    const Instance inst = two_by_two();
    CHECK(g_u(inst, std::vector<int>{0, 1}) == Catch::Approx(1.7).epsilon(1e-12));
    CHECK(g_u(inst, std::vector<int>{1}) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(g_u(inst, std::vector<int>{}) == 0.0);
}

TEST_CASE("any feasible assignment stays below the communication bound") {
    const Instance inst = test_util::small_synthetic(25, 3, 1.0, 0.4, 3, 4, 13);
    std::mt19937_64 rng = make_rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 1 + static_cast<int>(uniform_below(rng, inst.m()));
        const Deployment dep = test_util::random_deployment(inst, k, rng);
        CHECK(g_val(inst, dep) <= g_u(inst, dep.servers));
    }
}

TEST_CASE("combined upper bound matches its parts and dominates all assignments") {
    const Instance inst = make_instance(
        {CellSpec{0, 0, 6.5, 0, {}}, CellSpec{0, 0, 6.5, 0, {}}},
        {CandSpec{0, 0, 7, 0, {}}, CandSpec{0, 0, 8, 0, {}}},
        {{1 - 0.9, 1 - 0.2}, {1 - 0.3, 1 - 0.8}});
    const std::vector<int> both{0, 1};
    // 0.5 * min(13, 15) + 0.5 * 1.7
    CHECK(pi_u(inst, both, Weights::from_lambda1(0.5)) == Catch::Approx(7.35).epsilon(1e-12));
    CHECK(pi_u(inst, std::vector<int>{}, Weights::from_lambda1(0.5)) == 0.0);

    const Instance synth = test_util::small_synthetic(20, 3, 0.8, 0.5, 3, 4, 31);
    std::mt19937_64 rng = make_rng(17);
    const Weights w = Weights::from_lambda1(0.6);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 1 + static_cast<int>(uniform_below(rng, synth.m()));
        const Deployment dep = test_util::random_deployment(synth, k, rng);
        const double omega = omega_hat(synth, dep, w);
        CHECK(omega <= pi_u(synth, dep.servers, w) * (1 + 1e-12));
        // The per-assignment bound also dominates, and sits below the set bound.
        CHECK(f_hat(synth, dep) <= f_u(synth, dep.servers) * (1 + 1e-12));
    }
}

TEST_CASE("single-server lower bound pays the total-workload slack penalty") {
    // kappa = 5, total demand 13, slack deviation nu = 2 (gamma = 2, sigmas 0).
    const Instance inst =
        make_instance({CellSpec{0, 0, 13, 0, {}}}, {CandSpec{0, 1, 5, 2, {}}});
    const std::vector<int> only{0};
    const double expected = 5.0 - 2.0 / std::numbers::sqrt2;  // 5 - sqrt(2)
    CHECK(pi_l(inst, only, Weights::from_lambda1(1.0)) == Catch::Approx(expected).epsilon(1e-15));
    CHECK(pi_l(inst, only, Weights::from_lambda1(1.0)) == Catch::Approx(3.5857864376269049).epsilon(1e-12));
    CHECK(pi_l(inst, std::vector<int>{}, Weights::from_lambda1(1.0)) == 0.0);
}

TEST_CASE("with zero computing weight the lower bound is the best score column") {
    const Instance inst = two_by_two();
    const Weights w = Weights::from_lambda1(0.0);
    // Column sums of c: 0.9 + 0.3 = 1.2 and 0.2 + 0.8 = 1.0.
    CHECK(pi_l(inst, std::vector<int>{0, 1}, w) == Catch::Approx(1.2).epsilon(1e-12));
    CHECK(pi_l(inst, std::vector<int>{1}, w) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lower bound never exceeds the best assignment's value") {
    std::mt19937_64 rng = make_rng(55);
    const Weights w = Weights::from_lambda1(0.5);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = test_util::small_synthetic(
            8, 2, 0.7 + 0.2 * uniform01(rng), 0.3 + 0.4 * uniform01(rng), 2, 16,
            1000 + trial);
        REQUIRE(inst.m() >= 2);
        const std::vector<int> servers{0, 1};
        const auto [best, best_value] = brute_force_assignment(inst, servers, w);
        CHECK(pi_l(inst, servers, w) <= best_value + 1e-9 * std::fmax(1.0, std::fabs(best_value)));
    }
}

TEST_CASE("bounds coincide with the sandwich ordering against Monte Carlo") {
    // Independence path: strip samples, draw fresh realizations matched to the
    // marginal moments, and verify f_l1 <= E[f] <= f_u1 with 3-SE slack.
    const Instance base = test_util::small_synthetic(15, 2, 0.8, 0.7, 3, 32, 77);
    const Instance inst = test_util::strip_samples(base);
    std::mt19937_64 rng = make_rng(3);
    const Deployment dep = test_util::random_deployment(inst, 3, rng);
    const int draws = 20000;
    const std::vector<PeriodRealization> rs = draw_periods(inst, draws, 8);
    double acc = 0.0, acc2 = 0.0;
    for (const PeriodRealization& r : rs) {
        const double f = realized_f(inst, dep, r);
        acc += f;
        acc2 += f * f;
    }
    const double mc_mean = acc / draws;
    const double mc_var = acc2 / draws - mc_mean * mc_mean;
    const double se = std::sqrt(mc_var / draws);
    CHECK(mc_mean <= f_hat(inst, dep) + 3 * se);
    CHECK(mc_mean >= f_l1(inst, dep) - 3 * se);
}

TEST_CASE("paired-sample bounds bracket the stored-period average exactly") {
    // With stored samples the bounds are computed from the same empirical
    // measure the average runs over, so the sandwich holds up to rounding.
    const Instance inst = test_util::small_synthetic(20, 2, 0.7, 0.8, 3, 96, 41);
    std::mt19937_64 rng = make_rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = 1 + static_cast<int>(uniform_below(rng, inst.m()));
        const Deployment dep = test_util::random_deployment(inst, k, rng);
        double acc = 0.0;
        const int t = common_periods(inst);
        for (int p = 0; p < t; ++p) acc += realized_f(inst, dep, sample_period(inst, p));
        const double emp_mean = acc / t;
        const double tol = 1e-9 * std::fmax(1.0, std::fabs(emp_mean));
        CHECK(emp_mean <= f_hat(inst, dep) + tol);
        CHECK(emp_mean >= f_l1(inst, dep) - tol);
    }
}

TEST_CASE("lower bound stays below upper bound across random sets") {
    const Instance inst = test_util::small_synthetic(20, 3, 0.8, 0.6, 3, 24, 61);
    std::mt19937_64 rng = make_rng(23);
    for (double l1 : {0.0, 0.3, 0.7, 1.0}) {
        const Weights w = Weights::from_lambda1(l1);
        for (int trial = 0; trial < 100; ++trial) {
            const int k = 1 + static_cast<int>(uniform_below(rng, inst.m()));
            const Deployment dep = test_util::random_deployment(inst, k, rng);
            CHECK(pi_l(inst, dep.servers, w) <=
                  pi_u(inst, dep.servers, w) + 1e-9 * std::fmax(1.0, pi_u(inst, dep.servers, w)));
        }
    }
}

TEST_CASE("realized value at the mean realization reproduces the mean objective") {
    const Instance inst = combined_instance();
    PeriodRealization mean_r;
    for (const Cell& cell : inst.cells) mean_r.w.push_back(cell.mu);
    for (const Candidate& cand : inst.candidates) mean_r.kcap.push_back(cand.kappa);
    const Weights w = Weights::from_lambda1(0.5);
    CHECK(realized_omega(inst, kCombinedDep, mean_r, w) == omega_hat(inst, kCombinedDep, w));

    PeriodRealization dead = mean_r;
    dead.kcap.assign(dead.kcap.size(), 0.0);
    CHECK(realized_omega(inst, kCombinedDep, dead, w) ==
          w.lambda2 * g_val(inst, kCombinedDep));
}
