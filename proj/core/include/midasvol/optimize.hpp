#pragma once

#include <functional>
#include <vector>

namespace midasvol {

using Objective = std::function<double(const std::vector<double>&)>;

struct MinimizeOptions {
    double tol_obj = 1e-8;   // objective improvement below this counts as done
    double tol_step = 1e-6;  // together with a parameter step below this
    int max_simplex_iter = 4000;
    int max_newton_iter = 300;
};

struct MinimizeResult {
    std::vector<double> x;
    double f = 0.0;
    bool converged = false;
    int evals = 0;
    std::vector<double> trace;  // best objective after each accepted improvement
};

// Derivative-free simplex descent to locate a basin, then quasi-Newton
// refinement with central-difference gradients. `step` is the initial
// simplex spread per coordinate.
MinimizeResult minimize(const Objective& f, std::vector<double> x0,
                        const std::vector<double>& step,
                        const MinimizeOptions& opts = {});

// Central-difference Hessian with per-coordinate steps h.
std::vector<std::vector<double>> numeric_hessian(const Objective& f,
                                                 const std::vector<double>& x,
                                                 const std::vector<double>& h);

}  // namespace midasvol
