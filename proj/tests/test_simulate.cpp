#include <doctest.h>

#include <sstream>

#include "cointkit/csv.hpp"
#include "cointkit/sim_json.hpp"
#include "cointkit/simulate.hpp"
#include "cointkit/unit_root.hpp"

using namespace cointkit;

TEST_CASE("random walk generation basics") {
    DgpSpec spec;
    spec.kind = DgpKind::random_walk;
    spec.dims = 2;
    spec.T = 50;
    spec.seed = 9;
    auto p1 = generate(spec);
    auto p2 = generate(spec);
    REQUIRE(p1.calendar.size() == 50);
    REQUIRE(p1.dims() == 2);
    for (int d = 0; d < 2; ++d)
        for (int t = 0; t < 50; ++t)
            CHECK(p1.series[d].values[t] == p2.series[d].values[t]);  // bit-identical

    SUBCASE("zero innovation covariance gives constant paths") {
        spec.innovation_cov = Eigen::MatrixXd::Zero(2, 2);
        auto flat = generate(spec);
        for (const auto& s : flat.series)
            for (double v : s.values) CHECK(v == 0.0);
    }
}

TEST_CASE("cointegrated system satisfies its own recursion exactly") {
    DgpSpec spec;
    spec.kind = DgpKind::cointegrated_system;
    spec.dims = 2;
    spec.T = 200;
    spec.seed = 31;
    spec.alpha = Eigen::MatrixXd(2, 1);
    spec.alpha << -0.1, 0.1;
    spec.beta = Eigen::MatrixXd(2, 1);
    spec.beta << 1.0, -1.0;
    spec.burn_in = 0;  // reconstruct innovations from t = 1 onward
    auto panel = generate(spec);

    // Reconstruct eps_t = Dx_t - alpha beta' x_{t-1} and compare with the
    // drawn innovations (identity covariance, burn-in zero).
    for (long t = 1; t < spec.T; ++t) {
        Eigen::Vector2d x_prev(panel.series[0].values[t - 1], panel.series[1].values[t - 1]);
        Eigen::Vector2d dx(panel.series[0].values[t] - panel.series[0].values[t - 1],
                           panel.series[1].values[t] - panel.series[1].values[t - 1]);
        Eigen::Vector2d eps = dx - spec.alpha * (spec.beta.transpose() * x_prev);
        CHECK(std::fabs(eps(0) - counter_gaussian(31, 0, t)) < 1e-10);
        CHECK(std::fabs(eps(1) - counter_gaussian(31, 1, t)) < 1e-10);
    }
}

TEST_CASE("combination beta'x of a generated cointegrated pair is stationary") {
    // beta = (1,-1), alpha = (-0.1, 0.1): x1 - x2 mean-reverts; the ADF test
    // should reject a unit root decisively at this sample size.
    DgpSpec spec;
    spec.kind = DgpKind::cointegrated_system;
    spec.dims = 2;
    spec.T = 2000;
    spec.alpha = Eigen::MatrixXd(2, 1);
    spec.alpha << -0.1, 0.1;
    spec.beta = Eigen::MatrixXd(2, 1);
    spec.beta << 1.0, -1.0;
    int rejections = 0;
    const int reps = 20;  // smoke version; acceptance runs the full 200
    for (int r = 0; r < reps; ++r) {
        spec.seed = 100 + r;
        auto panel = generate(spec);
        ObservationSeries combo;
        combo.name = "z";
        combo.dates = panel.calendar;
        combo.values.resize(panel.calendar.size());
        for (std::size_t t = 0; t < combo.values.size(); ++t)
            combo.values[t] = panel.series[0].values[t] - panel.series[1].values[t];
        auto adf = adf_test(combo, Deterministic::constant);
        if (adf.reject_at && *adf.reject_at <= 0.01) ++rejections;
    }
    CHECK(rejections == reps);
}

TEST_CASE("break_shift with zero shift is bit-identical to the no-break pair") {
    auto base = generate(cointegrated_pair_spec(300, 77));
    auto shifted = generate(break_pair_spec(300, 77, 0.0));
    for (int d = 0; d < 2; ++d)
        for (int t = 0; t < 300; ++t)
            CHECK(base.series[d].values[t] == shifted.series[d].values[t]);
}

TEST_CASE("static pair construction yields y = intercept + x + noise") {
    auto panel = generate(cointegrated_pair_spec(500, 3, 0.5, 1.0));
    // Deviation y - x - 1 should be iid-scale noise with sd near 0.5.
    double ss = 0.0;
    for (int t = 0; t < 500; ++t) {
        const double z = panel.series[1].values[t] - panel.series[0].values[t] - 1.0;
        ss += z * z;
    }
    const double sd = std::sqrt(ss / 500.0);
    CHECK(sd == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("monte carlo harness") {
    DgpSpec spec;
    spec.kind = DgpKind::random_walk;
    spec.dims = 1;
    spec.T = 60;
    spec.seed = 1000;

    SUBCASE("zero reps rejected") {
        CHECK_THROWS_AS(
            monte_carlo(spec, 0, [](const MarketPanel&, double) { return McOutcome{}; }, 0.05),
            configuration_error);
    }
    SUBCASE("always-rejecting test gives rate one") {
        auto res = monte_carlo(
            spec, 25, [](const MarketPanel&, double) { return McOutcome{1.0, true}; }, 0.05);
        CHECK(res.rejection_rate == 1.0);
        CHECK(res.failures == 0);
    }
    SUBCASE("failures are excluded and budgeted") {
        auto flaky = [](const MarketPanel& p, double) -> McOutcome {
            if (p.series[0].values[0] > 0) throw degenerate_error("boom");
            return McOutcome{0.0, false};
        };
        // Roughly half the panels start positive: far beyond the 5% budget.
        CHECK_THROWS_AS(monte_carlo(spec, 40, flaky, 0.05), harness_error);
    }
    SUBCASE("deterministic across thread counts") {
        auto stat_test = [](const MarketPanel& p, double) {
            double acc = 0.0;
            for (double v : p.series[0].values) acc += v;
            return McOutcome{acc, acc > 0.0};
        };
        default_threads() = 1;
        auto seq = monte_carlo(spec, 30, stat_test, 0.05);
        default_threads() = 4;
        auto par = monte_carlo(spec, 30, stat_test, 0.05);
        default_threads() = 1;
        CHECK(seq.rejection_rate == par.rejection_rate);
        for (const auto& [q, v] : seq.statistic_quantiles)
            CHECK(v == par.statistic_quantiles.at(q));
    }
    SUBCASE("quantile map is monotone") {
        auto res = monte_carlo(
            spec, 50,
            [](const MarketPanel& p, double) {
                return McOutcome{p.series[0].values.back(), false};
            },
            0.05);
        double prev = -1e300;
        for (const auto& [q, v] : res.statistic_quantiles) {
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("dgp spec json round trip and csv export round trip") {
    auto spec = break_pair_spec(120, 55, 2.5, 0.35, 0.5);
    auto j = dgp_spec_to_json(spec);
    auto back = dgp_spec_from_json(j);
    CHECK(back.kind == spec.kind);
    CHECK(back.T == spec.T);
    CHECK(back.seed == spec.seed);
    CHECK(back.break_tau == spec.break_tau);
    CHECK(back.shift_vector(0) == spec.shift_vector(0));
    CHECK(back.alpha == spec.alpha);
    CHECK(back.beta == spec.beta);
    CHECK(back.innovation_cov == spec.innovation_cov);

    // Identical panels from the round-tripped spec.
    auto p1 = generate(spec);
    auto p2 = generate(back);
    for (int d = 0; d < 2; ++d)
        for (int t = 0; t < 120; ++t)
            CHECK(p1.series[d].values[t] == p2.series[d].values[t]);

    // Generated panels survive a CSV write/read round trip exactly.
    std::ostringstream os;
    write_panel_csv(p1, os);
    std::istringstream is(os.str());
    auto p3 = read_panel_csv(is);
    for (int d = 0; d < 2; ++d)
        for (int t = 0; t < 120; ++t)
            CHECK(p1.series[d].values[t] == p3.series[d].values[t]);

    nlohmann::json bad = j;
    bad["typo_key"] = 1;
    CHECK_THROWS_AS(dgp_spec_from_json(bad), configuration_error);
}

TEST_CASE("dgp validation") {
    DgpSpec spec;
    spec.kind = DgpKind::cointegrated_system;
    spec.dims = 3;
    spec.T = 50;
    spec.alpha = Eigen::MatrixXd::Zero(2, 1);  // wrong rows
    spec.beta = Eigen::MatrixXd::Zero(3, 1);
    CHECK_THROWS_AS(generate(spec), configuration_error);
}
