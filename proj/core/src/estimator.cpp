#include "midasvol/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include <json.hpp>

#include "midasvol/linalg.hpp"
#include "midasvol/log.hpp"
#include "midasvol/midas.hpp"
#include "midasvol/optimize.hpp"

namespace midasvol {

namespace {

constexpr double kPersCap = 1.0 - 1e-6;  // alpha+beta stays below this

double clamp01(double p) { return std::min(1.0 - 1e-12, std::max(1e-12, p)); }

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double softplus_inv(double y) {
    y = std::max(y, 1e-10);
    return y > 30.0 ? y : std::log(std::expm1(y));
}

// Maps between the constrained parameter space and the free coordinates the
// optimizer works in: persistence and its split through logistic maps, the
// weight shapes through 1 + softplus, mu/theta/m untouched.
struct Coder {
    const ModelSpec* spec;
    bool free_w1;

    std::size_t dim() const { return 5 + spec->factors.size() + (free_w1 ? 1 : 0); }

    std::vector<std::string> names() const {
        std::vector<std::string> n{"mu", "alpha", "beta"};
        for (Factor f : spec->factors) n.push_back(std::string("theta_") + factor_name(f));
        if (free_w1) n.push_back("omega1");
        n.push_back("omega2");
        n.push_back("m");
        return n;
    }

    std::vector<double> raw(const ParamSet& p) const {
        std::vector<double> x{p.mu, p.alpha, p.beta};
        for (double t : p.theta) x.push_back(t);
        if (free_w1) x.push_back(p.omega1);
        x.push_back(p.omega2);
        x.push_back(p.m);
        return x;
    }

    ParamSet from_raw(const std::vector<double>& x) const {
        ParamSet p;
        std::size_t i = 0;
        p.mu = x[i++];
        p.alpha = x[i++];
        p.beta = x[i++];
        p.theta.assign(x.begin() + static_cast<long>(i),
                       x.begin() + static_cast<long>(i + spec->factors.size()));
        i += spec->factors.size();
        p.omega1 = free_w1 ? x[i++] : 1.0;
        p.omega2 = x[i++];
        p.m = x[i++];
        return p;
    }

    std::vector<double> encode(const ParamSet& p) const {
        std::vector<double> x{p.mu, logit(clamp01((p.alpha + p.beta) / kPersCap)),
                              logit(clamp01(p.beta / (p.alpha + p.beta)))};
        for (double t : p.theta) x.push_back(t);
        if (free_w1) x.push_back(softplus_inv(p.omega1 - 1.0));
        x.push_back(softplus_inv(p.omega2 - 1.0));
        x.push_back(p.m);
        return x;
    }

    ParamSet decode(const std::vector<double>& x) const {
        ParamSet p;
        std::size_t i = 0;
        p.mu = x[i++];
        double pers = kPersCap * clamp01(sigmoid(x[i++]));
        double share = clamp01(sigmoid(x[i++]));
        p.alpha = pers * (1.0 - share);
        p.beta = pers * share;
        p.theta.assign(x.begin() + static_cast<long>(i),
                       x.begin() + static_cast<long>(i + spec->factors.size()));
        i += spec->factors.size();
        p.omega1 = free_w1 ? 1.0 + softplus(x[i++]) : 1.0;
        p.omega2 = 1.0 + softplus(x[i++]);
        p.m = x[i++];
        return p;
    }
};

// Regression-based starting loadings: monthly realized variance on each
// factor's trailing K-lag average, over the months where every factor has a
// full lag set. Falls back to zero loadings (tau = m) when the design is
// degenerate.
void theta_start(const ModelEngine& eng, ParamSet& p, std::vector<double>& theta_scale) {
    const AlignedPanel& panel = eng.panel();
    const ModelSpec& spec = eng.spec();
    const std::size_t T = panel.months.size();
    const std::size_t F = spec.factors.size();
    const int K = spec.K;
    p.theta.assign(F, 0.0);
    theta_scale.assign(F, 0.1);
    if (T <= static_cast<std::size_t>(K) + F + 2) return;

    std::vector<double> rv = realized_vol_fixed_values(panel);
    std::vector<MonthlySeries> macro(F);
    for (std::size_t f = 0; f < F; ++f)
        if (spec.factors[f] != Factor::rv)
            macro[f] = transformed_factor(panel, spec, spec.factors[f]);

    std::vector<std::vector<double>> X(1 + F);
    std::vector<double> y;
    for (std::size_t t = static_cast<std::size_t>(K); t < T; ++t) {
        // rv lags index the panel months directly, so the span must be gapless
        if (panel.months[t].index() - panel.months[t - static_cast<std::size_t>(K)].index() != K)
            continue;
        bool have = true;
        std::vector<double> row(F, 0.0);
        for (std::size_t f = 0; f < F && have; ++f) {
            double avg = 0.0;
            for (int k = 1; k <= K && have; ++k) {
                if (spec.factors[f] == Factor::rv) {
                    avg += rv[t - static_cast<std::size_t>(k)];
                } else {
                    long pos = macro[f].find(panel.months[t].minus(k));
                    if (pos < 0) have = false;
                    else avg += macro[f].values[static_cast<std::size_t>(pos)];
                }
            }
            row[f] = avg / K;
        }
        if (!have) continue;
        X[0].push_back(1.0);
        for (std::size_t f = 0; f < F; ++f) X[1 + f].push_back(row[f]);
        y.push_back(spec.link == TauLink::exponential ? std::log(rv[t] + 1e-12) : rv[t]);
    }
    if (y.size() < F + 3) return;
    OlsFit ls;
    if (!ols(X, y, ls)) return;
    for (std::size_t f = 0; f < F; ++f) {
        p.theta[f] = ls.coef[1 + f];
        double mean = 0.0, ss = 0.0;
        for (double v : X[1 + f]) mean += v;
        mean /= static_cast<double>(X[1 + f].size());
        for (double v : X[1 + f]) ss += (v - mean) * (v - mean);
        double sd = std::sqrt(ss / std::max<std::size_t>(1, X[1 + f].size() - 1));
        if (sd > 0.0 && std::isfinite(sd)) theta_scale[f] = 0.1 * std::abs(p.m) / sd + 1e-8;
    }
}

}  // namespace

double information_criteria(double llf, int n_params, std::size_t n_obs) {
    return n_params * std::log(static_cast<double>(n_obs)) - 2.0 * llf;
}

std::string significance_stars(double estimate, double std_error) {
    if (!(std_error > 0.0) || !std::isfinite(std_error)) return "";
    double z = std::abs(estimate / std_error);
    if (z >= 2.5758293035489004) return "***";
    if (z >= 1.959963984540054) return "**";
    if (z >= 1.6448536269514722) return "*";
    return "";
}

double negative_log_likelihood(const ParamSet& p, const AlignedPanel& panel,
                               const ModelSpec& spec) {
    return ModelEngine(panel, spec).nll(p);
}

std::vector<double> standard_errors(const ParamSet& p, const AlignedPanel& panel,
                                    const ModelSpec& spec, bool estimate_omega1, bool* ok) {
    ModelEngine eng(panel, spec);
    Coder coder{&spec, estimate_omega1};
    std::vector<double> x = coder.raw(p);
    Objective f = [&](const std::vector<double>& v) { return eng.nll(coder.from_raw(v)); };
    std::vector<double> h(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        h[i] = std::max(1e-5, 1e-4 * std::abs(x[i]));
    auto H = numeric_hessian(f, x, h);

    std::vector<double> se(x.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::vector<double>> inv;
    bool good = spd_invert(H, inv);
    if (good) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (inv[i][i] > 0.0 && std::isfinite(inv[i][i]))
                se[i] = std::sqrt(inv[i][i]);
            else
                good = false;
        }
    }
    if (ok) *ok = good;
    return se;
}

FitResult fit(const AlignedPanel& panel, const ModelSpec& spec, const FitOptions& opts) {
    ModelEngine eng(panel, spec);
    Coder coder{&eng.spec(), opts.estimate_omega1};

    const auto& r = panel.returns.values;
    const std::size_t s0 = eng.first_day();
    double mean = 0.0;
    for (std::size_t i = s0; i < r.size(); ++i) mean += r[i];
    mean /= static_cast<double>(eng.n_obs());
    double var = 0.0;
    for (std::size_t i = s0; i < r.size(); ++i) var += (r[i] - mean) * (r[i] - mean);
    var /= static_cast<double>(eng.n_obs());
    if (!(var > 0.0)) throw DataError("fit: return series has no variation");

    // Scale anchor for the intercept start. The sample variance is dominated
    // by the largest squared returns, so on heavy-tailed samples it can sit
    // orders of magnitude above the typical level and every start inherits
    // the distortion. The median of the squared demeaned returns divided by
    // the chi-square(1) median recovers sigma^2 at the typical day instead.
    double scale = var;
    {
        std::vector<double> e2(r.size() - s0);
        for (std::size_t i = s0; i < r.size(); ++i) {
            double e = r[i] - mean;
            e2[i - s0] = e * e;
        }
        auto mid = e2.begin() + static_cast<long>(e2.size() / 2);
        std::nth_element(e2.begin(), mid, e2.end());
        double med = *mid / 0.45493642311957283;
        if (med > 0.0 && std::isfinite(med)) scale = med;
    }

    ParamSet p0;
    p0.mu = mean;
    p0.alpha = 0.05;
    p0.beta = 0.90;
    p0.omega1 = opts.estimate_omega1 ? 1.5 : 1.0;
    p0.omega2 = 5.0;
    p0.m = spec.link == TauLink::exponential ? std::log(scale) : scale;
    std::vector<double> theta_scale;
    theta_start(eng, p0, theta_scale);

    // A start inside the penalty region stalls the simplex; shrink the
    // loadings until the path is feasible.
    for (int tries = 0; tries < 60 && eng.nll(p0) >= ModelEngine::kPenalty; ++tries)
        for (auto& t : p0.theta) t *= 0.5;

    Objective obj = [&](const std::vector<double>& x) { return eng.nll(coder.decode(x)); };

    std::vector<double> x0 = coder.encode(p0);
    std::vector<double> jitter(coder.dim());
    {
        std::size_t i = 0;
        jitter[i++] = 0.1 * std::sqrt(scale);
        jitter[i++] = 0.7;
        jitter[i++] = 0.7;
        for (std::size_t f = 0; f < spec.factors.size(); ++f)
            jitter[i++] = 0.5 * std::abs(p0.theta[f]) + theta_scale[f];
        if (opts.estimate_omega1) jitter[i++] = 1.0;
        jitter[i++] = 1.0;
        jitter[i++] = 0.3 * std::abs(p0.m) + 1e-12;
    }

    std::vector<std::vector<double>> starts{x0};
    if (opts.warm_start) starts.push_back(coder.encode(*opts.warm_start));
    // The profile in (theta, omega2) can be multimodal: a fast-decay weight
    // with inflated loadings shadows slow-decay modes, and jitters around one
    // anchor rarely cross the ridge between them. Seed a few deterministic
    // shape and scale variants so the search covers both regimes.
    auto add_variant = [&](double omega2, double theta_mul) {
        ParamSet p = p0;
        p.omega2 = omega2;
        for (auto& t : p.theta) t *= theta_mul;
        for (int tries = 0; tries < 60 && eng.nll(p) >= ModelEngine::kPenalty; ++tries)
            for (auto& t : p.theta) t *= 0.5;
        starts.push_back(coder.encode(p));
    };
    add_variant(2.0, 1.0);
    add_variant(15.0, 1.0);
    add_variant(p0.omega2, 0.25);
    add_variant(p0.omega2, 4.0);
    add_variant(p0.omega2, 0.0);  // nested constant-tau model
    for (int k = 1; k <= opts.restarts; ++k) {
        std::mt19937_64 rng(opts.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(k));
        std::normal_distribution<double> nd;
        std::vector<double> x = x0;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += jitter[i] * nd(rng);
        starts.push_back(std::move(x));
    }

    MinimizeOptions mo;
    mo.tol_obj = opts.tol_obj;
    mo.tol_step = opts.tol_step;
    std::vector<double> nm_step(jitter);
    for (auto& s : nm_step) s = std::max(0.5 * s, 1e-8);

    std::vector<MinimizeResult> runs(starts.size());
    int threads = opts.threads > 0 ? opts.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(starts.size())));
    if (threads == 1) {
        for (std::size_t i = 0; i < starts.size(); ++i)
            runs[i] = minimize(obj, starts[i], nm_step, mo);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < starts.size(); i = next.fetch_add(1))
                runs[i] = minimize(obj, starts[i], nm_step, mo);
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i)
        if (runs[i].f < runs[best].f) best = i;

    FitResult res;
    res.spec = eng.spec();
    res.params = coder.decode(runs[best].x);
    res.llf = -runs[best].f;
    res.n_obs = eng.n_obs();
    res.bic = information_criteria(res.llf, static_cast<int>(coder.dim()), res.n_obs);
    res.converged = runs[best].converged;
    res.starts_used = static_cast<int>(starts.size());
    res.objective_trace = runs[best].trace;
    if (runs[best].f >= ModelEngine::kPenalty)
        throw DataError("fit: no feasible parameters found");
    if (!res.converged)
        log_warn("fit: optimizer stopped before meeting tolerances (" + spec.id() + ")");

    std::vector<double> se(coder.dim(), std::numeric_limits<double>::quiet_NaN());
    if (opts.std_errors)
        se = standard_errors(res.params, panel, eng.spec(), opts.estimate_omega1,
                             &res.se_available);
    std::vector<double> est = coder.raw(res.params);
    std::vector<std::string> names = coder.names();
    for (std::size_t i = 0; i < coder.dim(); ++i)
        res.table.push_back({names[i], est[i], se[i], significance_stars(est[i], se[i])});
    return res;
}

std::string fit_result_to_json(const FitResult& r) {
    nlohmann::json j;
    j["llf"] = r.llf;
    j["bic"] = r.bic;
    j["n_obs"] = r.n_obs;
    j["converged"] = r.converged;
    j["starts_used"] = r.starts_used;
    j["se_available"] = r.se_available;
    j["model_id"] = r.spec.id();
    nlohmann::json params = nlohmann::json::array();
    for (const auto& e : r.table) {
        nlohmann::json row;
        row["name"] = e.name;
        row["estimate"] = e.estimate;
        if (std::isfinite(e.std_error)) row["se"] = e.std_error;
        else row["se"] = nullptr;
        row["stars"] = e.stars;
        params.push_back(row);
    }
    j["parameters"] = params;

    nlohmann::json spec;
    spec["K"] = r.spec.K;
    spec["stride"] = r.spec.stride;
    spec["window"] = r.spec.window;
    spec["mode"] = r.spec.mode == WindowMode::rolling ? "rolling" : "fixed";
    spec["link"] = r.spec.link == TauLink::exponential ? "exp" : "linear";
    nlohmann::json fl = nlohmann::json::array();
    for (Factor f : r.spec.factors) fl.push_back(factor_name(f));
    spec["factors"] = fl;
    switch (r.spec.transform) {
        case MacroTransform::automatic: spec["transform"] = "auto"; break;
        case MacroTransform::identity: spec["transform"] = "identity"; break;
        case MacroTransform::log_level: spec["transform"] = "log"; break;
        case MacroTransform::standardize: spec["transform"] = "standardize"; break;
    }
    j["spec"] = spec;
    j["trace"] = r.objective_trace;
    return j.dump(2) + "\n";
}

}  // namespace midasvol
