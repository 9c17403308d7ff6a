#include <doctest.h>

#include <cmath>
#include <vector>

#include "midasvol/optimize.hpp"

using namespace midasvol;

TEST_CASE("a separable quadratic is minimized to high accuracy") {
    Objective f = [](const std::vector<double>& x) {
        return (x[0] - 3.0) * (x[0] - 3.0) + 2.0 * (x[1] + 1.0) * (x[1] + 1.0) + 7.0;
    };
    MinimizeResult r = minimize(f, {0.0, 0.0}, {0.5, 0.5});
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - 3.0) < 1e-5);
    CHECK(std::abs(r.x[1] + 1.0) < 1e-5);
    CHECK(r.f == doctest::Approx(7.0).epsilon(1e-9));
    CHECK(r.evals > 0);
}

TEST_CASE("the banana valley is followed to its floor") {
    Objective rosen = [](const std::vector<double>& x) {
        double a = 1.0 - x[0];
        double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    MinimizeResult r = minimize(rosen, {-1.2, 1.0}, {0.1, 0.1});
    CHECK(r.f < 1e-6);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-2);
    CHECK(std::abs(r.x[1] - 1.0) < 1e-2);
}

TEST_CASE("the trace of best objectives never increases") {
    Objective f = [](const std::vector<double>& x) {
        return std::cos(x[0]) + 0.01 * x[0] * x[0];
    };
    MinimizeResult r = minimize(f, {1.0}, {0.3});
    REQUIRE(!r.trace.empty());
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
    CHECK(r.trace.back() == doctest::Approx(r.f).epsilon(1e-12));
}

TEST_CASE("tight budgets stop the search without crashing") {
    Objective f = [](const std::vector<double>& x) {
        return x[0] * x[0] + x[1] * x[1];
    };
    MinimizeOptions opts;
    opts.max_simplex_iter = 3;
    opts.max_newton_iter = 1;
    MinimizeResult r = minimize(f, {5.0, -5.0}, {1.0, 1.0}, opts);
    CHECK(r.f <= f({5.0, -5.0}));
}

TEST_CASE("numeric hessian of a quadratic form is the form itself") {
    // f = 0.5 x'Ax with A = [[2, 0.5], [0.5, 3]].
    Objective f = [](const std::vector<double>& x) {
        return 0.5 * (2.0 * x[0] * x[0] + 3.0 * x[1] * x[1]) + 0.5 * x[0] * x[1];
    };
    std::vector<std::vector<double>> H =
        numeric_hessian(f, {0.3, -0.2}, {1e-4, 1e-4});
    CHECK(H[0][0] == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(H[1][1] == doctest::Approx(3.0).epsilon(1e-5));
    CHECK(H[0][1] == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(H[0][1] == doctest::Approx(H[1][0]).epsilon(1e-10));
}
