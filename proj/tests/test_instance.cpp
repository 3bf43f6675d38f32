#include <algorithm>
#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "sdu/sdu.hpp"
#include "support/test_util.hpp"

using namespace sdu;
using test_util::CandSpec;
using test_util::CellSpec;
using test_util::make_instance;

TEST_CASE("cost matrix normalizes by the largest pairwise distance") {
    const Instance inst =
        make_instance({CellSpec{0, 0, 1, 0, {}}}, {CandSpec{0, 1, 1, 0, {}}, CandSpec{0, 2, 1, 0, {}}});
    CHECK(inst.d(0, 0) == 0.5);
    CHECK(inst.d(0, 1) == 1.0);
}

TEST_CASE("coincident cell and candidate get zero cost and full score") {
    const Instance inst = make_instance({CellSpec{1, 1, 1, 0, {}}, CellSpec{0, 0, 1, 0, {}}},
                                        {CandSpec{1, 1, 1, 0, {}}});
    CHECK(inst.d(0, 0) == 0.0);
    CHECK(inst.c(0, 0) == 1.0);
}

TEST_CASE("cost matrix on collinear integer points matches direct arithmetic") {
    // Cells at x = 0, 1, 2 and candidates at x = 4, 6 on a line. Largest
    // distance is |0 - 6| = 6; every entry must be |x_i - x_s| / 6.
    const Instance inst =
        make_instance({CellSpec{0, 0, 1, 0, {}}, CellSpec{1, 0, 1, 0, {}}, CellSpec{2, 0, 1, 0, {}}},
                      {CandSpec{4, 0, 1, 0, {}}, CandSpec{6, 0, 1, 0, {}}});
    const double xs_cell[3] = {0, 1, 2};
    const double xs_cand[2] = {4, 6};
    for (int i = 0; i < 3; ++i)
        for (int s = 0; s < 2; ++s) {
            const double expected = std::abs(xs_cell[i] - xs_cand[s]) / 6.0;
            CHECK(inst.d(i, s) == Catch::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("all-coincident geometry is rejected") {
    std::vector<Cell> cells{Cell{0, 5, 5, 1, 0, {}}};
    std::vector<Candidate> cands{Candidate{0, 5, 5, 1, 0, {}}};
    CHECK_THROWS_AS(compute_costs(cells, cands), ValidationError);
}

TEST_CASE("total demand is the sum of cell means") {
    const Instance inst = make_instance({CellSpec{0, 0, 3, 0, {}}, CellSpec{1, 0, 4, 0, {}}},
                                        {CandSpec{0, 1, 1, 0, {}}});
    CHECK(inst.total_mu == 7.0);
}

TEST_CASE("validation names the offending field and record") {
    SECTION("cost out of range") {
        std::vector<std::vector<double>> d = {{0.0, 1.5}};
        CHECK_THROWS_WITH(
            make_instance({CellSpec{0, 0, 1, 0, {}}},
                          {CandSpec{0, 1, 1, 0, {}}, CandSpec{0, 2, 1, 0, {}}}, d),
            Catch::Matchers::ContainsSubstring("d[0][1]"));
    }
    SECTION("negative mean workload") {
        CHECK_THROWS_WITH(make_instance({CellSpec{0, 0, -1, 0, {}}}, {CandSpec{0, 1, 1, 0, {}}}),
                          Catch::Matchers::ContainsSubstring("cells[0].mu"));
    }
    SECTION("sample moments must match the stored moments") {
        CHECK_THROWS_WITH(
            make_instance({CellSpec{0, 0, 5.0, 0.0, {1.0, 2.0, 3.0}}}, {CandSpec{0, 1, 1, 0, {}}}),
            Catch::Matchers::ContainsSubstring("cells[0].mu"));
    }
    SECTION("dimension mismatch") {
        std::vector<std::vector<double>> d = {{0.0}};
        CHECK_THROWS_WITH(make_instance({CellSpec{0, 0, 1, 0, {}}, CellSpec{0, 1, 1, 0, {}}},
                                        {CandSpec{0, 2, 1, 0, {}}}, d),
                          Catch::Matchers::ContainsSubstring("costs.d: dimensions"));
    }
}

TEST_CASE("sample-consistent moments are accepted") {
    const std::vector<double> samples{1.0, 2.0, 3.0};
    const double mu = 2.0;
    const double sigma = std::sqrt(2.0 / 3.0);  // population convention
    const Instance inst =
        make_instance({CellSpec{0, 0, mu, sigma, samples}}, {CandSpec{0, 1, 1, 0, {}}});
    CHECK(inst.cells[0].samples.size() == 3);
}

TEST_CASE("single-region generation places one candidate at the center") {
    GenConfig config;
    config.n_cells = 1;
    config.grid_side = 1;
    config.n_periods = 4;
    config.area_side = 100.0;
    const Instance inst = generate_synthetic(config, 7);
    REQUIRE(inst.m() == 1);
    CHECK(inst.candidates[0].x == 50.0);
    CHECK(inst.candidates[0].y == 50.0);
    CHECK(inst.n() == 1);
    CHECK(inst.cells[0].samples.size() == 4);
}

TEST_CASE("generation is a pure function of config and seed") {
    GenConfig config;
    config.n_cells = 40;
    config.grid_side = 3;
    config.n_periods = 16;
    const Instance a = generate_synthetic(config, 123);
    const Instance b = generate_synthetic(config, 123);
    CHECK(a == b);
    const Instance c = generate_synthetic(config, 124);
    CHECK_FALSE(a == c);
}

TEST_CASE("generated instances satisfy the model invariants") {
    GenConfig config;
    config.n_cells = 120;
    config.grid_side = 4;
    config.n_periods = 32;
    const Instance inst = generate_synthetic(config, 5);
    CHECK(inst.m() >= 1);
    CHECK(inst.m() <= 16);
    double max_d = 0.0;
    for (double v : inst.costs.d) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        max_d = std::max(max_d, v);
    }
    CHECK(max_d == 1.0);
    double total = 0.0;
    for (const Cell& cell : inst.cells) total += cell.mu;
    CHECK(approx_equal_rel(total, inst.total_mu, 1e-9));
    // Stored moments are the population moments of the stored samples.
    for (const Cell& cell : inst.cells) {
        CHECK(cell.mu == mean_of(cell.samples));
        CHECK(cell.sigma == population_stddev(cell.samples));
    }
    for (const Candidate& cand : inst.candidates) {
        CHECK(cand.kappa == mean_of(cand.samples));
        CHECK(cand.gamma == population_stddev(cand.samples));
    }
}

TEST_CASE("per-cell dispersion interpolates from ~10 at light cells to ~0.8 at heavy ones") {
    GenConfig config;
    config.n_cells = 500;
    config.grid_side = 4;
    // The lightest cells have dispersion ~10, so their sample std needs many
    // periods to concentrate; the interpolation endpoints are only reached at
    // the extreme ranks.
    config.n_periods = 30000;
    const Instance inst = generate_synthetic(config, 11);

    std::vector<int> order(static_cast<std::size_t>(inst.n()));
    for (int i = 0; i < inst.n(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return inst.cells[a].mu < inst.cells[b].mu; });

    auto empirical_cv = [&](int rank) {
        const Cell& cell = inst.cells[order[rank]];
        return population_stddev(cell.samples) / mean_of(cell.samples);
    };
    const double cv_lightest = empirical_cv(0);
    const double cv_heaviest = empirical_cv(inst.n() - 1);
    CHECK(cv_lightest > 10.0 * 0.7);
    CHECK(cv_lightest < 10.0 * 1.3);
    CHECK(cv_heaviest > 0.8 * 0.7);
    CHECK(cv_heaviest < 0.8 * 1.3);

    // And the overall trend is decreasing: the lightest quintile is far more
    // dispersed than the heaviest quintile.
    auto mean_cv = [&](int from, int count) {
        double acc = 0.0;
        for (int j = from; j < from + count; ++j) acc += empirical_cv(j);
        return acc / count;
    };
    CHECK(mean_cv(0, 100) > 3.0 * mean_cv(inst.n() - 100, 100));
}

TEST_CASE("capacity means scale with demand and the planned deployment size") {
    GenConfig config;
    config.n_cells = 200;
    config.grid_side = 3;
    config.n_periods = 64;
    config.k_planned = 4;
    config.kappa_factor = 0.7;
    config.gamma_factor = 0.1;
    const Instance inst = generate_synthetic(config, 3);
    const double per_server = inst.total_mu / 4.0;
    for (const Candidate& cand : inst.candidates) {
        // Target mean lies in [0.7, 1.0] x per-server demand; the empirical
        // mean of truncated-normal samples stays within a loose band.
        CHECK(cand.kappa > 0.5 * per_server);
        CHECK(cand.kappa < 1.2 * per_server);
    }
}
