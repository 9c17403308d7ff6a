#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "midasvol/model.hpp"

namespace midasvol {

struct FitOptions {
    int restarts = 8;        // jittered restarts beyond the heuristic start
    std::uint64_t seed = 0;  // restart jitter seed
    int threads = 0;         // 0 = machine parallelism
    double tol_obj = 1e-8;
    double tol_step = 1e-6;
    bool estimate_omega1 = false;  // otherwise omega1 is pinned at 1
    bool std_errors = true;
    std::optional<ParamSet> warm_start;
};

struct ParamEstimate {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;  // NaN when the Hessian was not positive definite
    std::string stars;       // "***", "**", "*" at 1/5/10% two-sided normal
};

struct FitResult {
    ModelSpec spec;
    ParamSet params;
    std::vector<ParamEstimate> table;
    double llf = 0.0;
    double bic = 0.0;
    std::size_t n_obs = 0;
    bool converged = false;
    int starts_used = 0;
    bool se_available = false;
    std::vector<double> objective_trace;  // best-so-far NLL, non-increasing
};

// Gaussian quasi-maximum-likelihood over the panel's usable days. Multi-start
// search over unconstrained coordinates; restarts are independent and run in
// parallel up to the thread budget.
FitResult fit(const AlignedPanel& panel, const ModelSpec& spec, const FitOptions& opts = {});

// One objective evaluation; infeasible parameters earn a large finite
// penalty rather than an exception.
double negative_log_likelihood(const ParamSet& p, const AlignedPanel& panel,
                               const ModelSpec& spec);

// sqrt(diag(H^-1)) of the NLL Hessian at p, in the original parameter space,
// ordered as the fit table. ok=false when not positive definite.
std::vector<double> standard_errors(const ParamSet& p, const AlignedPanel& panel,
                                    const ModelSpec& spec, bool estimate_omega1 = false,
                                    bool* ok = nullptr);

// Bayesian information criterion, n_params*ln(n_obs) - 2*llf; lower is better.
double information_criteria(double llf, int n_params, std::size_t n_obs);

std::string significance_stars(double estimate, double std_error);

std::string fit_result_to_json(const FitResult& r);

}  // namespace midasvol
