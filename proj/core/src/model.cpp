#include "midasvol/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "midasvol/csv.hpp"
#include "midasvol/midas.hpp"

namespace midasvol {

namespace {

// The simulator and the engine must walk through identical arithmetic so a
// simulated path filters back bit-for-bit. Every tau/g evaluation funnels
// through these.
inline double dot_k(const double* w, const double* x, int K) {
    double d = 0.0;
    for (int k = 0; k < K; ++k) d += w[k] * x[k];
    return d;
}

inline double strided_dot(const std::vector<double>& base, const std::vector<double>& w,
                          std::size_t i, int stride) {
    double d = 0.0;
    for (std::size_t k = 1; k <= w.size(); ++k)
        d += w[k - 1] * base[i - k * static_cast<std::size_t>(stride)];
    return d;
}

inline double g_step(double alpha, double beta, double e2_over_tau, double g_prev) {
    return (1.0 - alpha - beta) + alpha * e2_over_tau + beta * g_prev;
}

inline double innov2(double r, double mu) {
    double e = r - mu;
    return e * e;
}

std::vector<double> apply_transform(const std::vector<double>& v, MacroTransform t,
                                    std::size_t stat_count) {
    std::vector<double> out(v);
    switch (t) {
        case MacroTransform::identity:
            break;
        case MacroTransform::log_level:
            for (std::size_t i = 0; i < out.size(); ++i) {
                if (!(out[i] > 0.0))
                    throw DataError("macro transform: log of a non-positive value");
                out[i] = std::log(out[i]);
            }
            break;
        case MacroTransform::standardize: {
            std::size_t n = std::min(stat_count, v.size());
            if (n < 2) throw DataError("macro transform: too few values to standardize");
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += v[i];
            mean /= static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) ss += (v[i] - mean) * (v[i] - mean);
            double sd = std::sqrt(ss / static_cast<double>(n - 1));
            if (!(sd > 0.0)) throw DataError("macro transform: zero dispersion");
            for (auto& x : out) x = (x - mean) / sd;
            break;
        }
        case MacroTransform::automatic:
            throw std::logic_error("transform not resolved");
    }
    return out;
}

}  // namespace

const char* factor_name(Factor f) {
    switch (f) {
        case Factor::rv: return "rv";
        case Factor::gepu: return "gepu";
        case Factor::gepu_change: return "gepu_change";
    }
    return "?";
}

Factor factor_from_name(std::string_view s) {
    if (s == "rv") return Factor::rv;
    if (s == "gepu") return Factor::gepu;
    if (s == "gepu-change" || s == "gepu_change") return Factor::gepu_change;
    throw std::invalid_argument("unknown factor '" + std::string(s) + "'");
}

void ModelSpec::check() const {
    if (factors.empty() || factors.size() > 2)
        throw std::invalid_argument("spec: one or two factors required");
    if (factors.size() == 2) {
        if (factors[0] == factors[1])
            throw std::invalid_argument("spec: duplicate factor");
        if (!has_factor(Factor::rv))
            throw std::invalid_argument("spec: a two-factor model must include rv");
    }
    if (K < 1) throw std::invalid_argument("spec: K must be >= 1");
    if (stride < 1) throw std::invalid_argument("spec: stride must be >= 1");
    if (window < 1) throw std::invalid_argument("spec: window must be >= 1");
}

bool ModelSpec::has_factor(Factor f) const {
    return std::find(factors.begin(), factors.end(), f) != factors.end();
}

MacroTransform ModelSpec::transform_for(Factor f) const {
    if (f == Factor::rv) return MacroTransform::identity;
    if (transform != MacroTransform::automatic) return transform;
    return f == Factor::gepu ? MacroTransform::log_level : MacroTransform::identity;
}

std::string ModelSpec::id() const {
    std::string s;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) s += '+';
        s += factor_name(factors[i]);
    }
    s += mode == WindowMode::rolling ? "-rolling" : "-fixed";
    return s;
}

bool ParamSet::valid(const ModelSpec& spec) const {
    if (theta.size() != spec.factors.size()) return false;
    auto fin = [](double x) { return std::isfinite(x); };
    if (!fin(mu) || !fin(alpha) || !fin(beta) || !fin(omega1) || !fin(omega2) || !fin(m))
        return false;
    for (double t : theta)
        if (!fin(t)) return false;
    return alpha > 0.0 && beta > 0.0 && alpha + beta < 1.0 && omega1 >= 1.0 && omega2 >= 1.0;
}

std::string path_to_csv(const VolatilityPath& path, bool annualize) {
    std::string out = annualize ? "date,sigma2,tau,g,ann_vol\n" : "date,sigma2,tau,g\n";
    for (std::size_t i = 0; i < path.dates.size(); ++i) {
        out += path.dates[i].str();
        out += ',';
        out += format_double(path.sigma2[i]);
        out += ',';
        out += format_double(path.tau[i]);
        out += ',';
        out += format_double(path.g[i]);
        if (annualize) {
            out += ',';
            out += format_double(std::sqrt(252.0 * path.sigma2[i]));
        }
        out += '\n';
    }
    return out;
}

std::vector<double> filter_short_run(const ParamSet& p, std::span<const double> returns,
                                     std::span<const double> tau, const double* prev_return) {
    if (returns.size() != tau.size())
        throw std::invalid_argument("filter: returns/tau length mismatch");
    if (!(p.alpha >= 0.0) || !(p.beta >= 0.0) || !(p.alpha + p.beta < 1.0))
        throw std::invalid_argument("filter: need alpha,beta >= 0 and alpha+beta < 1");
    for (double t : tau)
        if (!(t > 0.0) || !std::isfinite(t))
            throw std::invalid_argument("filter: tau must be positive and finite");
    std::vector<double> g(returns.size());
    if (g.empty()) return g;
    g[0] = prev_return ? g_step(p.alpha, p.beta, innov2(*prev_return, p.mu) / tau[0], 1.0)
                       : 1.0;
    for (std::size_t i = 1; i < g.size(); ++i)
        g[i] = g_step(p.alpha, p.beta, innov2(returns[i - 1], p.mu) / tau[i], g[i - 1]);
    return g;
}

std::vector<double> total_variance(std::span<const double> tau, std::span<const double> g) {
    if (tau.size() != g.size())
        throw std::invalid_argument("total_variance: length mismatch");
    std::vector<double> s2(tau.size());
    for (std::size_t i = 0; i < s2.size(); ++i) s2[i] = tau[i] * g[i];
    return s2;
}

MonthlySeries transformed_factor(const AlignedPanel& panel, const ModelSpec& spec, Factor f) {
    if (f == Factor::rv)
        throw std::invalid_argument("transformed_factor: rv is derived, not stored");
    auto it = panel.factors.find(factor_name(f));
    if (it == panel.factors.end())
        throw DataError(std::string("panel has no factor '") + factor_name(f) + "'");
    MonthlySeries ts = it->second;
    long last = ts.find(panel.months.back());
    ts.values = apply_transform(ts.values, spec.transform_for(f),
                                last < 0 ? ts.size() : static_cast<std::size_t>(last) + 1);
    return ts;
}

ModelEngine::ModelEngine(const AlignedPanel& panel, const ModelSpec& spec)
    : panel_(&panel), spec_(spec) {
    spec_.check();
    const std::size_t n = panel.days();
    const std::size_t T = panel.months.size();

    auto macro_series = [&](Factor f) { return transformed_factor(panel, spec_, f); };

    if (spec_.mode == WindowMode::fixed_span) {
        std::vector<double> rv;
        if (spec_.has_factor(Factor::rv)) rv = realized_vol_fixed_values(panel);
        std::vector<MonthlySeries> macro(spec_.factors.size());
        for (std::size_t f = 0; f < spec_.factors.size(); ++f)
            if (spec_.factors[f] != Factor::rv) macro[f] = macro_series(spec_.factors[f]);

        // Value of a factor at an absolute calendar month, if known.
        auto value_at = [&](std::size_t f, YearMonth c, double& out) {
            if (spec_.factors[f] == Factor::rv) {
                auto it = std::lower_bound(panel.months.begin(), panel.months.end(), c);
                if (it == panel.months.end() || !(*it == c)) return false;
                out = rv[static_cast<std::size_t>(it - panel.months.begin())];
                return true;
            }
            long pos = macro[f].find(c);
            if (pos < 0) return false;
            out = macro[f].values[static_cast<std::size_t>(pos)];
            return true;
        };

        // A month enters the likelihood only when every factor provides all
        // K lags; the usable range is the suffix after the last failure.
        std::size_t t0 = 0;
        for (std::size_t t = 0; t < T; ++t) {
            double tmp;
            for (std::size_t f = 0; f < spec_.factors.size() && t >= t0; ++f)
                for (int k = 1; k <= spec_.K; ++k)
                    if (!value_at(f, panel.months[t].minus(k), tmp)) {
                        t0 = t + 1;
                        break;
                    }
        }
        if (t0 >= T)
            throw DataError("not enough factor history: no month has all " +
                            std::to_string(spec_.K) + " lags");
        first_month_ = t0;
        first_day_ = static_cast<std::size_t>(panel.month_begin[t0]);

        lag_.resize(spec_.factors.size());
        for (std::size_t f = 0; f < spec_.factors.size(); ++f) {
            lag_[f].resize((T - t0) * static_cast<std::size_t>(spec_.K));
            for (std::size_t t = t0; t < T; ++t)
                for (int k = 1; k <= spec_.K; ++k) {
                    double v = 0.0;
                    value_at(f, panel.months[t].minus(k), v);
                    lag_[f][(t - t0) * spec_.K + static_cast<std::size_t>(k - 1)] = v;
                }
        }
    } else {
        // Each base series starts where its history allows (a late macro
        // factor starts later than the return-driven one); the recursion can
        // begin once the deepest lag of every factor is available.
        base_.resize(spec_.factors.size());
        std::size_t latest = 0;
        for (std::size_t f = 0; f < spec_.factors.size(); ++f) {
            DailySeries b = spec_.factors[f] == Factor::rv
                                ? realized_vol_rolling(panel.returns, spec_.window)
                                : macro_rolling(macro_series(spec_.factors[f]), panel,
                                                spec_.window);
            auto it = std::lower_bound(panel.returns.dates.begin(), panel.returns.dates.end(),
                                       b.dates.front());
            const std::size_t d0 =
                static_cast<std::size_t>(it - panel.returns.dates.begin());
            latest = std::max(latest, d0);
            base_[f].assign(n, 0.0);
            for (std::size_t j = 0; j < b.size(); ++j) base_[f][d0 + j] = b.values[j];
        }
        const std::size_t s0 =
            latest + static_cast<std::size_t>(spec_.K) * static_cast<std::size_t>(spec_.stride);
        if (s0 >= n)
            throw DataError("not enough days for lag history: need more than " +
                            std::to_string(s0));
        first_day_ = s0;
    }
}

LongRun ModelEngine::long_run(const ParamSet& p) const {
    const std::vector<double> w = beta_weights(p.omega1, p.omega2, spec_.K);
    LongRun lr;
    auto push = [&](double acc) {
        double tau = spec_.link == TauLink::exponential ? std::exp(acc) : acc;
        if (!std::isfinite(tau)) {
            lr.feasible = false;
            lr.violation += 1e6;
        } else if (!(tau > 0.0)) {
            lr.feasible = false;
            lr.violation += 1e-12 - tau;
        }
        lr.tau.push_back(tau);
    };
    if (spec_.mode == WindowMode::fixed_span) {
        lr.offset = first_month_;
        const std::size_t rows = panel_->months.size() - first_month_;
        for (std::size_t t = 0; t < rows; ++t) {
            double acc = p.m;
            for (std::size_t f = 0; f < spec_.factors.size(); ++f)
                acc += p.theta[f] * dot_k(w.data(), &lag_[f][t * spec_.K], spec_.K);
            push(acc);
        }
    } else {
        lr.offset = first_day_;
        for (std::size_t i = first_day_; i < panel_->days(); ++i) {
            double acc = p.m;
            for (std::size_t f = 0; f < spec_.factors.size(); ++f)
                acc += p.theta[f] * strided_dot(base_[f], w, i, spec_.stride);
            push(acc);
        }
    }
    return lr;
}

LongRun ModelEngine::tau_daily(const ParamSet& p) const {
    LongRun lr = long_run(p);
    if (spec_.mode == WindowMode::rolling) return lr;
    LongRun d;
    d.offset = first_day_;
    d.feasible = lr.feasible;
    d.violation = lr.violation;
    d.tau.resize(n_obs());
    for (std::size_t i = first_day_; i < panel_->days(); ++i)
        d.tau[i - first_day_] =
            lr.tau[static_cast<std::size_t>(panel_->month_of_day[i]) - first_month_];
    return d;
}

double ModelEngine::nll(const ParamSet& p) const {
    if (!p.valid(spec_)) {
        double gap = std::max(0.0, p.alpha + p.beta - 1.0) + std::max(0.0, -p.alpha) +
                     std::max(0.0, -p.beta) + std::max(0.0, 1.0 - p.omega2);
        return kPenalty * (1.0 + gap);
    }
    LongRun lr = tau_daily(p);
    if (!lr.feasible) return kPenalty + 1e8 * lr.violation;

    const auto& r = panel_->returns.values;
    const std::size_t s0 = first_day_;
    const double a = p.alpha, b = p.beta;
    const double ln2pi = std::log(2.0 * std::numbers::pi_v<double>);
    double g = s0 > 0 ? g_step(a, b, innov2(r[s0 - 1], p.mu) / lr.tau[0], 1.0) : 1.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < lr.tau.size(); ++i) {
        if (i > 0) g = g_step(a, b, innov2(r[s0 + i - 1], p.mu) / lr.tau[i], g);
        double s2 = lr.tau[i] * g;
        if (!(s2 > 1e-300) || !std::isfinite(s2)) return kPenalty;
        acc += ln2pi + std::log(s2) + innov2(r[s0 + i], p.mu) / s2;
    }
    double nll = 0.5 * acc;
    return std::isfinite(nll) ? nll : kPenalty;
}

VolatilityPath ModelEngine::filter(const ParamSet& p) const {
    if (!p.valid(spec_)) throw DataError("filter: invalid parameters");
    LongRun lr = tau_daily(p);
    if (!lr.feasible) throw DataError("filter: long-run variance non-positive");
    const auto& rv = panel_->returns.values;
    std::span<const double> rets(rv.data() + first_day_, n_obs());
    const double* prev = first_day_ > 0 ? &rv[first_day_ - 1] : nullptr;
    VolatilityPath path;
    path.dates.assign(panel_->returns.dates.begin() + static_cast<long>(first_day_),
                      panel_->returns.dates.end());
    path.g = filter_short_run(p, rets, lr.tau, prev);
    path.tau = std::move(lr.tau);
    path.sigma2 = total_variance(path.tau, path.g);
    return path;
}

LongRun long_run_fixed(const ParamSet& p, const ModelSpec& spec, const AlignedPanel& panel) {
    ModelSpec s = spec;
    s.mode = WindowMode::fixed_span;
    return ModelEngine(panel, s).long_run(p);
}

LongRun long_run_rolling(const ParamSet& p, const ModelSpec& spec, const AlignedPanel& panel) {
    ModelSpec s = spec;
    s.mode = WindowMode::rolling;
    return ModelEngine(panel, s).long_run(p);
}

SimulationResult simulate(const ParamSet& p, const ModelSpec& spec, int months,
                          int days_per_month, std::uint64_t seed) {
    spec.check();
    if (!p.valid(spec)) throw std::invalid_argument("simulate: invalid parameters");
    if (days_per_month < 15 || days_per_month > 28)
        throw std::invalid_argument("simulate: days_per_month must be in [15, 28]");
    const int dpm = days_per_month;
    const std::size_t n = static_cast<std::size_t>(months) * static_cast<std::size_t>(dpm);

    std::size_t s0;
    if (spec.mode == WindowMode::rolling) {
        s0 = static_cast<std::size_t>(spec.window) +
             static_cast<std::size_t>(spec.K) * static_cast<std::size_t>(spec.stride);
        if (s0 + 1 >= n)
            throw std::invalid_argument("simulate: too few months for the lag history");
    } else {
        if (months <= spec.K + 1)
            throw std::invalid_argument("simulate: need more than K+1 months");
        s0 = static_cast<std::size_t>(spec.K) * static_cast<std::size_t>(dpm);
    }

    const double tau0 = spec.link == TauLink::exponential ? std::exp(p.m) : p.m;
    if (!(tau0 > 0.0) || !std::isfinite(tau0))
        throw std::invalid_argument("simulate: baseline long-run variance must be positive");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;

    // Synthetic macro factor: a persistent AR(1) in the spirit of a monthly
    // uncertainty change series, plus a level series that exponentiates it.
    const double phi = 0.9, target_sd = 0.18;
    const double innov_sd = target_sd * std::sqrt(1.0 - phi * phi);
    std::vector<double> chg(static_cast<std::size_t>(months));
    chg[0] = target_sd * nd(rng);
    for (std::size_t t = 1; t < chg.size(); ++t) chg[t] = phi * chg[t - 1] + innov_sd * nd(rng);
    std::vector<double> lvl(chg.size());
    for (std::size_t t = 0; t < chg.size(); ++t) lvl[t] = 150.0 * std::exp(chg[t]);

    // Factor inputs to tau, in ModelSpec order, after its transform.
    std::vector<std::vector<double>> monthly(spec.factors.size());
    for (std::size_t f = 0; f < spec.factors.size(); ++f) {
        if (spec.factors[f] == Factor::gepu)
            monthly[f] = apply_transform(lvl, spec.transform_for(Factor::gepu), lvl.size());
        else if (spec.factors[f] == Factor::gepu_change)
            monthly[f] = apply_transform(chg, spec.transform_for(Factor::gepu_change), chg.size());
    }

    const std::vector<double> w = beta_weights(p.omega1, p.omega2, spec.K);
    std::vector<double> returns(n), tau(n), g(n), sigma2(n);
    std::vector<double> rv_month(static_cast<std::size_t>(months), 0.0);

    // Rolling-mode daily bases, maintained exactly like the engine's.
    std::vector<std::vector<double>> base(spec.factors.size());
    std::vector<double> macro_daily;
    if (spec.mode == WindowMode::rolling) {
        for (auto& b : base) b.assign(n, 0.0);
        for (std::size_t f = 0; f < spec.factors.size(); ++f) {
            if (spec.factors[f] == Factor::rv) continue;
            macro_daily.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                macro_daily[i] = monthly[f][i / static_cast<std::size_t>(dpm)];
            for (std::size_t i = static_cast<std::size_t>(spec.window); i < n; ++i)
                base[f][i] = window_sum_before(macro_daily, i, spec.window) / spec.window;
        }
    }

    std::vector<double> row(static_cast<std::size_t>(spec.K));
    double tau_m = tau0;  // current month's tau in fixed-span mode
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = i / static_cast<std::size_t>(dpm);
        if (spec.mode == WindowMode::rolling) {
            for (std::size_t f = 0; f < spec.factors.size(); ++f)
                if (spec.factors[f] == Factor::rv &&
                    i >= static_cast<std::size_t>(spec.window))
                    base[f][i] = window_sum_sq_before(returns, i, spec.window);
            if (i < s0) {
                tau[i] = tau0;
            } else {
                double acc = p.m;
                for (std::size_t f = 0; f < spec.factors.size(); ++f)
                    acc += p.theta[f] * strided_dot(base[f], w, i, spec.stride);
                tau[i] = spec.link == TauLink::exponential ? std::exp(acc) : acc;
            }
        } else {
            if (i % static_cast<std::size_t>(dpm) == 0) {
                if (t < static_cast<std::size_t>(spec.K)) {
                    tau_m = tau0;
                } else {
                    double acc = p.m;
                    for (std::size_t f = 0; f < spec.factors.size(); ++f) {
                        const auto& src =
                            spec.factors[f] == Factor::rv ? rv_month : monthly[f];
                        for (int k = 1; k <= spec.K; ++k)
                            row[static_cast<std::size_t>(k - 1)] =
                                src[t - static_cast<std::size_t>(k)];
                        acc += p.theta[f] * dot_k(w.data(), row.data(), spec.K);
                    }
                    tau_m = spec.link == TauLink::exponential ? std::exp(acc) : acc;
                }
            }
            tau[i] = tau_m;
        }
        if (!(tau[i] > 0.0) || !std::isfinite(tau[i]))
            throw DataError("simulate: long-run variance became non-positive at day " +
                            std::to_string(i) + "; these parameters have no feasible path");

        if (i < s0) g[i] = 1.0;
        else if (i == s0) g[i] = g_step(p.alpha, p.beta, innov2(returns[i - 1], p.mu) / tau[i], 1.0);
        else g[i] = g_step(p.alpha, p.beta, innov2(returns[i - 1], p.mu) / tau[i], g[i - 1]);

        sigma2[i] = tau[i] * g[i];
        returns[i] = p.mu + std::sqrt(sigma2[i]) * nd(rng);
        rv_month[t] += returns[i] * returns[i];
    }

    DailySeries rs;
    rs.dates.reserve(n);
    rs.values = returns;
    YearMonth ym{2000, 1};
    for (int t = 0; t < months; ++t, ym = ym.plus(1))
        for (int d = 1; d <= dpm; ++d) rs.dates.push_back({ym.year, ym.month, d});

    std::map<std::string, MonthlySeries> factors;
    MonthlySeries ms;
    ms.months.reserve(chg.size());
    ym = {2000, 1};
    for (int t = 0; t < months; ++t, ym = ym.plus(1)) ms.months.push_back(ym);
    ms.values = lvl;
    factors.emplace("gepu", ms);
    ms.values = chg;
    factors.emplace("gepu_change", ms);

    SimulationResult out;
    out.panel = align(rs, factors);
    out.path.dates.assign(rs.dates.begin() + static_cast<long>(s0), rs.dates.end());
    out.path.tau.assign(tau.begin() + static_cast<long>(s0), tau.end());
    out.path.g.assign(g.begin() + static_cast<long>(s0), g.end());
    out.path.sigma2.assign(sigma2.begin() + static_cast<long>(s0), sigma2.end());
    return out;
}

}  // namespace midasvol
