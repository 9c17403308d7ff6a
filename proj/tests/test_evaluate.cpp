#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "midasvol/evaluate.hpp"

using namespace midasvol;

namespace {

ForecastSeries series_with(std::vector<double> forecast, std::vector<double> actual) {
    ForecastSeries f;
    f.model_id = "test";
    Date d{2020, 1, 1};
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        f.dates.push_back(d);
        d.day += 1;
        if (d.day > 28) {
            d.day = 1;
            d.month += 1;
        }
    }
    f.split = f.dates.front();
    f.forecast = std::move(forecast);
    f.actual = std::move(actual);
    return f;
}

}  // namespace

TEST_CASE("loss values on a two-point hand example") {
    LossSummary s = loss(series_with({1.0, 4.0}, {0.0, 0.0}));
    CHECK(s.n == 2);
    CHECK(s.rmse == doctest::Approx(std::sqrt(8.5)).epsilon(1e-15));
    CHECK(s.rmae == doctest::Approx(std::sqrt(2.5)).epsilon(1e-15));
    CHECK(s.rmsd == doctest::Approx(std::sqrt(2.5)).epsilon(1e-15));
    CHECK(s.rmad == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));
}

TEST_CASE("constant errors collapse the losses to powers of the error") {
    // forecast - actual = 0.25 throughout.
    LossSummary s = loss(series_with({1.25, 2.25, 3.25}, {1.0, 2.0, 3.0}));
    CHECK(s.rmse == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(s.rmae == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("perfect forecasts have zero loss everywhere") {
    LossSummary s = loss(series_with({0.5, 1.5, 0.25}, {0.5, 1.5, 0.25}));
    CHECK(s.rmse == 0.0);
    CHECK(s.rmae == 0.0);
    CHECK(s.rmsd == 0.0);
    CHECK(s.rmad == 0.0);
    CHECK_THROWS_AS(loss(ForecastSeries{}), DataError);
}

TEST_CASE("equal-accuracy tests are exactly antisymmetric") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> fa(200), fb(200), act(200);
    for (std::size_t i = 0; i < 200; ++i) {
        act[i] = 1.0 + 0.1 * nd(rng);
        fa[i] = act[i] + 0.3 * nd(rng);
        fb[i] = act[i] + 0.35 * nd(rng);
    }
    ForecastSeries a = series_with(fa, act);
    ForecastSeries b = series_with(fb, act);

    DmResult ab = dm_test(a, b);
    DmResult ba = dm_test(b, a);
    CHECK(ab.stat == -ba.stat);
    CHECK(ab.pvalue == ba.pvalue);
    CHECK(ab.n == 200);

    // Identical forecast series: degenerate, reported as a clean zero.
    DmResult self = dm_test(a, a);
    CHECK(self.stat == 0.0);
    CHECK(self.pvalue == 1.0);
}

TEST_CASE("a clearly worse model earns a positive statistic") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    std::vector<double> fa(400), fb(400), act(400);
    for (std::size_t i = 0; i < 400; ++i) {
        act[i] = 1.0;
        fb[i] = 1.0 + 0.05 * nd(rng);
        fa[i] = 1.0 + 0.50 * nd(rng);  // same target, five times the noise
    }
    ForecastSeries a = series_with(fa, act);
    ForecastSeries b = series_with(fb, act);
    DmResult r = dm_test(a, b);
    CHECK(r.stat > 2.0);
    CHECK(r.pvalue < 0.05);

    // The robust variant stays in the same direction on iid errors.
    DmResult nw = dm_test(a, b, 5);
    CHECK(nw.stat > 2.0);
}

TEST_CASE("mismatched forecast windows are rejected") {
    ForecastSeries a = series_with({1.0, 2.0}, {1.0, 2.0});
    ForecastSeries b = series_with({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
    CHECK_THROWS_AS(dm_test(a, b), DataError);
}

TEST_CASE("the pairwise matrix is labeled and starred") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    std::vector<double> fa(300), fb(300), act(300);
    for (std::size_t i = 0; i < 300; ++i) {
        act[i] = 1.0;
        fa[i] = 1.0 + 0.6 * nd(rng);
        fb[i] = 1.0 + 0.05 * nd(rng);
    }
    ForecastSeries a = series_with(fa, act);
    a.model_id = "loud";
    ForecastSeries b = series_with(fb, act);
    b.model_id = "quiet";
    std::string csv = dm_matrix_csv({a, b});
    CHECK(csv.find("loud") != std::string::npos);
    CHECK(csv.find("quiet") != std::string::npos);
    CHECK(csv.find('+') != std::string::npos);
    CHECK(csv.find('-') != std::string::npos);
}

TEST_CASE("forecast reports round-trip through json") {
    ForecastSeries f = series_with({1.0, 0.5, 0.125}, {0.75, 0.5, 0.25});
    f.model_id = "rv-rolling";
    f.refits = 3;
    f.converged = false;
    std::string text = forecast_to_json(f);
    ForecastSeries g = forecast_from_json(text, "mem");
    CHECK(g.model_id == f.model_id);
    CHECK(g.split == f.split);
    CHECK(g.refits == 3);
    CHECK(g.converged == false);
    CHECK(g.dates == f.dates);
    CHECK(g.forecast == f.forecast);
    CHECK(g.actual == f.actual);

    CHECK_THROWS_AS(forecast_from_json("{", "mem"), DataError);
    CHECK_THROWS_AS(forecast_from_json("{}", "mem"), DataError);
}

TEST_CASE("rolling evaluation forecasts without peeking ahead") {
    ParamSet truth;
    truth.alpha = 0.07;
    truth.beta = 0.88;
    truth.theta = {0.02};
    truth.m = 1e-4;
    ModelSpec spec;
    spec.K = 12;
    SimulationResult sim = simulate(truth, spec, 70, 22, 202);

    EvalOptions opts;
    opts.calib_years = 3;
    opts.refit_every = 200;
    opts.fit.restarts = 2;
    opts.fit.seed = 4;
    opts.fit.std_errors = false;

    ForecastSeries full = rolling_forecast(sim.panel, spec, opts);
    CHECK(full.model_id == "rv-rolling");
    CHECK(full.split == Date{2003, 1, 1});
    REQUIRE(full.dates.size() == 70 * 22 - 36 * 22);
    CHECK(full.refits == 4);  // ceil(748 / 200)
    CHECK(loss(full).rmse > 0.0);
    for (double v : full.forecast) CHECK(v > 0.0);

    // Truncating the sample ten days after the split must not change the
    // first ten forecasts: nothing after the forecast day may enter it.
    std::size_t split_day = 36 * 22;
    AlignedPanel trunc = sim.panel.slice(0, split_day + 10);
    ForecastSeries head = rolling_forecast(trunc, spec, opts);
    REQUIRE(head.dates.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(head.dates[i] == full.dates[i]);
        CHECK(head.forecast[i] == full.forecast[i]);
        CHECK(head.actual[i] == full.actual[i]);
    }
}

TEST_CASE("a non-positive refit interval keeps one calibration throughout") {
    ParamSet truth;
    truth.alpha = 0.07;
    truth.beta = 0.88;
    truth.theta = {0.02};
    truth.m = 1e-4;
    ModelSpec spec;
    spec.K = 12;
    SimulationResult sim = simulate(truth, spec, 60, 22, 203);

    EvalOptions opts;
    opts.calib_years = 3;
    opts.refit_every = 0;
    opts.fit.restarts = 1;
    opts.fit.std_errors = false;
    ForecastSeries f = rolling_forecast(sim.panel, spec, opts);
    CHECK(f.refits == 1);
    CHECK(f.dates.size() == 60 * 22 - 36 * 22);

    // An explicit split overrides the calibration-years default.
    EvalOptions at;
    at = opts;
    at.split = Date{2003, 7, 1};
    ForecastSeries g = rolling_forecast(sim.panel, spec, at);
    CHECK(g.split == Date{2003, 7, 1});
    CHECK(g.dates.size() == 60 * 22 - 42 * 22);

    EvalOptions bad = opts;
    bad.split = Date{2030, 1, 1};
    CHECK_THROWS_AS(rolling_forecast(sim.panel, spec, bad), DataError);
}
