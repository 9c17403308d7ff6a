#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "midasvol/panel.hpp"

namespace midasvol {

enum class Factor { rv, gepu, gepu_change };
enum class WindowMode { fixed_span, rolling };
enum class TauLink { linear, exponential };
enum class MacroTransform { automatic, identity, log_level, standardize };

const char* factor_name(Factor f);          // "rv", "gepu", "gepu_change"
Factor factor_from_name(std::string_view);  // throws on unknown name

struct ModelSpec {
    std::vector<Factor> factors{Factor::rv};
    WindowMode mode = WindowMode::rolling;
    int K = 36;       // number of MIDAS lags
    int stride = 22;  // lag spacing in days (rolling mode)
    int window = 22;  // rolling realized/macro window in days
    TauLink link = TauLink::linear;
    MacroTransform transform = MacroTransform::automatic;

    // One or two distinct factors; a two-factor model pairs realized
    // variance with one macro factor.
    void check() const;
    bool has_factor(Factor f) const;
    // `automatic` resolves to log for index levels, identity otherwise.
    MacroTransform transform_for(Factor f) const;
    std::string id() const;
};

struct ParamSet {
    double mu = 0.0;
    double alpha = 0.05;
    double beta = 0.90;
    std::vector<double> theta;  // aligned with ModelSpec::factors
    double omega1 = 1.0;
    double omega2 = 5.0;
    double m = 1e-4;

    // Structural validity: finite, alpha,beta > 0, alpha+beta < 1,
    // omegas >= 1, theta count matching. Long-run positivity is a property
    // of the data and is checked where tau is computed.
    bool valid(const ModelSpec& spec) const;
};

struct VolatilityPath {
    std::vector<Date> dates;
    std::vector<double> sigma2;
    std::vector<double> tau;
    std::vector<double> g;
};

// date,sigma2,tau,g rows; annualize appends ann_vol = sqrt(252*sigma2).
std::string path_to_csv(const VolatilityPath& path, bool annualize = false);

struct LongRun {
    // Fixed-span: one value per panel month from `offset` on.
    // Rolling: one value per panel day from `offset` on.
    std::vector<double> tau;
    std::size_t offset = 0;
    bool feasible = true;    // false when the linear link went non-positive
    double violation = 0.0;  // total positivity shortfall
};

LongRun long_run_fixed(const ParamSet& p, const ModelSpec& spec, const AlignedPanel& panel);
LongRun long_run_rolling(const ParamSet& p, const ModelSpec& spec, const AlignedPanel& panel);

// A macro factor's monthly series exactly as tau consumes it: the panel's
// stored series passed through the ModelSpec transform, with standardization
// moments taken from values up to the last panel month.
MonthlySeries transformed_factor(const AlignedPanel& panel, const ModelSpec& spec, Factor f);

// GARCH(1,1)-style short-run component over a contiguous day range with tau
// already expanded per day. Seeded at its unconditional mean 1; when the
// return of the day before the range is supplied, the seed absorbs one
// update from it. Requires alpha,beta >= 0, alpha+beta < 1, tau > 0.
std::vector<double> filter_short_run(const ParamSet& p, std::span<const double> returns,
                                     std::span<const double> tau,
                                     const double* prev_return = nullptr);

std::vector<double> total_variance(std::span<const double> tau, std::span<const double> g);

// Estimation-ready view of a panel under one spec: factor series prepared
// once, likelihood day range fixed, objective evaluated per parameter point.
class ModelEngine {
public:
    ModelEngine(const AlignedPanel& panel, const ModelSpec& spec);

    const ModelSpec& spec() const { return spec_; }
    const AlignedPanel& panel() const { return *panel_; }
    std::size_t first_day() const { return first_day_; }
    std::size_t n_obs() const { return panel_->days() - first_day_; }

    LongRun long_run(const ParamSet& p) const;
    // tau per likelihood day (fixed-span values expanded within months).
    LongRun tau_daily(const ParamSet& p) const;
    double nll(const ParamSet& p) const;  // large finite penalty when infeasible
    VolatilityPath filter(const ParamSet& p) const;

    static constexpr double kPenalty = 1e10;

private:
    const AlignedPanel* panel_;
    ModelSpec spec_;
    std::size_t first_day_ = 0;
    std::size_t first_month_ = 0;              // fixed-span only
    std::vector<std::vector<double>> lag_;     // fixed: per factor, row-major [month][K]
    std::vector<std::vector<double>> base_;    // rolling: per factor, daily values
};

struct SimulationResult {
    AlignedPanel panel;   // returns plus synthetic macro factor series
    VolatilityPath path;  // true latent components over the recursion days
};

// Draws a panel from the model on a synthetic calendar of `months` months
// with `days_per_month` trading days each. Days before the first point where
// the long-run recursion has full history use tau at its baseline level and
// a unit short-run component. Reproducible by seed.
SimulationResult simulate(const ParamSet& p, const ModelSpec& spec, int months,
                          int days_per_month, std::uint64_t seed);

}  // namespace midasvol
