#include "midasvol/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace midasvol {

namespace {

struct Tracker {
    const Objective* f;
    int evals = 0;
    double best;
    std::vector<double>* trace;

    double operator()(const std::vector<double>& x) {
        ++evals;
        double v = (*f)(x);
        if (v < best) {
            best = v;
            trace->push_back(v);
        }
        return v;
    }
};

std::vector<double> gradient(Tracker& f, const std::vector<double>& x, double fx) {
    (void)fx;
    const std::size_t n = x.size();
    std::vector<double> g(n), xp(x);
    for (std::size_t i = 0; i < n; ++i) {
        double h = 1e-6 * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + h;
        double fp = f(xp);
        xp[i] = x[i] - h;
        double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

bool nelder_mead(Tracker& f, std::vector<double>& x, double& fx,
                 const std::vector<double>& step, const MinimizeOptions& opts) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> pts(n + 1, x);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        pts[i + 1][i] += (step[i] != 0.0 ? step[i] : 0.1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    bool tightened = false;
    std::vector<std::size_t> ord(n + 1);
    for (int iter = 0; iter < opts.max_simplex_iter; ++iter) {
        std::iota(ord.begin(), ord.end(), std::size_t{0});
        std::sort(ord.begin(), ord.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
        const std::size_t lo = ord[0], hi = ord[n], second = ord[n - 1];

        double spread = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            spread = std::max(spread, std::abs(pts[hi][i] - pts[lo][i]));
        if (fv[hi] - fv[lo] < opts.tol_obj && spread < opts.tol_step) {
            tightened = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == hi) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
        }
        for (auto& c : centroid) c /= static_cast<double>(n);

        auto at = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + coef * (pts[hi][j] - centroid[j]);
            return p;
        };

        std::vector<double> xr = at(-1.0);
        double fr = f(xr);
        if (fr < fv[lo]) {
            std::vector<double> xe = at(-2.0);
            double fe = f(xe);
            if (fe < fr) { pts[hi] = std::move(xe); fv[hi] = fe; }
            else { pts[hi] = std::move(xr); fv[hi] = fr; }
        } else if (fr < fv[second]) {
            pts[hi] = std::move(xr);
            fv[hi] = fr;
        } else {
            std::vector<double> xc = at(fr < fv[hi] ? -0.5 : 0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fv[hi])) {
                pts[hi] = std::move(xc);
                fv[hi] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == lo) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        pts[i][j] = pts[lo][j] + 0.5 * (pts[i][j] - pts[lo][j]);
                    fv[i] = f(pts[i]);
                }
            }
        }
    }
    std::size_t lo = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[lo]) lo = i;
    x = pts[lo];
    fx = fv[lo];
    return tightened;
}

bool quasi_newton(Tracker& f, std::vector<double>& x, double& fx, bool at_tol,
                  const MinimizeOptions& opts) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) H[i][i] = 1.0;
    std::vector<double> g = gradient(f, x, fx);

    for (int iter = 0; iter < opts.max_newton_iter; ++iter) {
        std::vector<double> d(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i] -= H[i][j] * g[j];
        double dg = std::inner_product(d.begin(), d.end(), g.begin(), 0.0);
        if (dg >= 0.0) {  // lost positive definiteness; restart from steepest descent
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) H[i][j] = (i == j) ? 1.0 : 0.0;
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            dg = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
            if (dg == 0.0) return true;
        }

        double t = 1.0;
        std::vector<double> xn(n);
        double fn = fx;
        double best_probe = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + t * d[i];
            fn = f(xn);
            if (std::isfinite(fn)) best_probe = std::min(best_probe, fn);
            if (std::isfinite(fn) && fn <= fx + 1e-4 * t * dg) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        // An exhausted line search that found nothing better than tol_obj
        // means the point is flat at working precision: call it converged if
        // the simplex had already tightened or no probe improved materially.
        if (!accepted) return at_tol || best_probe > fx - opts.tol_obj;

        std::vector<double> gn = gradient(f, xn, fn);
        std::vector<double> s(n), y(n);
        double step_inf = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = xn[i] - x[i];
            y[i] = gn[i] - g[i];
            step_inf = std::max(step_inf, std::abs(s[i]));
        }
        double improved = fx - fn;
        x = xn;
        fx = fn;
        g = std::move(gn);
        if (improved < opts.tol_obj && step_inf < opts.tol_step) return true;

        double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
        if (sy > 1e-12) {  // BFGS update on the inverse approximation
            std::vector<double> Hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i][j] * y[j];
            double yHy = std::inner_product(y.begin(), y.end(), Hy.begin(), 0.0);
            double c = (sy + yHy) / (sy * sy);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    H[i][j] += c * s[i] * s[j] - (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
        }
    }
    return false;
}

}  // namespace

MinimizeResult minimize(const Objective& fn, std::vector<double> x0,
                        const std::vector<double>& step, const MinimizeOptions& opts) {
    MinimizeResult res;
    res.trace.reserve(256);
    Tracker f{&fn, 0, std::numeric_limits<double>::infinity(), &res.trace};

    double fx = f(x0);
    bool at_tol = nelder_mead(f, x0, fx, step, opts);
    bool ok = quasi_newton(f, x0, fx, at_tol, opts);

    res.x = std::move(x0);
    res.f = fx;
    res.converged = ok;
    res.evals = f.evals;
    return res;
}

std::vector<std::vector<double>> numeric_hessian(const Objective& f,
                                                 const std::vector<double>& x,
                                                 const std::vector<double>& h) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    const double f0 = f(x);
    std::vector<double> xp(x);
    for (std::size_t i = 0; i < n; ++i) {
        xp[i] = x[i] + h[i];
        double fp = f(xp);
        xp[i] = x[i] - h[i];
        double fm = f(xp);
        xp[i] = x[i];
        H[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            xp[i] = x[i] + h[i]; xp[j] = x[j] + h[j];
            double fpp = f(xp);
            xp[j] = x[j] - h[j];
            double fpm = f(xp);
            xp[i] = x[i] - h[i]; xp[j] = x[j] + h[j];
            double fmp = f(xp);
            xp[j] = x[j] - h[j];
            double fmm = f(xp);
            xp[i] = x[i]; xp[j] = x[j];
            H[i][j] = H[j][i] = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
        }
    }
    return H;
}

}  // namespace midasvol
