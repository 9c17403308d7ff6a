#include "midasvol/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "midasvol/csv.hpp"
#include "midasvol/linalg.hpp"
#include "midasvol/series.hpp"

namespace midasvol {

SummaryStats summary(const std::vector<double>& x) {
    if (x.size() < 2) throw DataError("summary: need at least 2 observations");
    SummaryStats s;
    s.n = x.size();
    double n = static_cast<double>(x.size());
    for (double v : x) s.mean += v;
    s.mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    s.min = s.max = x[0];
    for (double v : x) {
        double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.std_dev = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
    } else {
        s.skewness = std::numeric_limits<double>::quiet_NaN();
        s.kurtosis = std::numeric_limits<double>::quiet_NaN();
    }
    return s;
}

namespace {

// MacKinnon (2010) response-surface coefficients, tau_c, one variable:
// cv = b_inf + b1/T + b2/T^2 + b3/T^3.
double mackinnon_cv(int level, std::size_t T) {
    static const double tab[3][4] = {
        {-3.43035, -6.5393, -16.786, -79.433},  // 1%
        {-2.86154, -2.8903, -4.234, -40.040},   // 5%
        {-2.56677, -1.5384, -2.809, 0.0},       // 10%
    };
    int row = level == 1 ? 0 : level == 5 ? 1 : 2;
    double t = static_cast<double>(T);
    return tab[row][0] + tab[row][1] / t + tab[row][2] / (t * t) +
           tab[row][3] / (t * t * t);
}

// Dickey-Fuller regression of d_t on [1, y_{t-1}, d_{t-1..t-p}] using rows
// start..n_d-1 of the differenced series. Returns false when singular.
bool df_regression(const std::vector<double>& y, const std::vector<double>& d, int p,
                   std::size_t start, OlsFit& fit) {
    std::size_t n_d = d.size();
    if (start < static_cast<std::size_t>(p) || start >= n_d) return false;
    std::vector<std::vector<double>> X(2 + static_cast<std::size_t>(p));
    std::vector<double> dep;
    for (std::size_t i = start; i < n_d; ++i) {
        dep.push_back(d[i]);
        X[0].push_back(1.0);
        X[1].push_back(y[i]);  // level lagged once: d[i] = y[i+1] - y[i]
        for (int j = 1; j <= p; ++j)
            X[1 + static_cast<std::size_t>(j)].push_back(d[i - static_cast<std::size_t>(j)]);
    }
    return ols(X, dep, fit);
}

}  // namespace

AdfResult adf_test(const std::vector<double>& y, int max_lags) {
    if (y.size() < 12) throw DataError("adf: need at least 12 observations");
    std::size_t n = y.size();
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = y[i + 1] - y[i];

    int pmax = max_lags;
    if (pmax < 0)
        pmax = static_cast<int>(
            std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    while (pmax > 0 && d.size() < static_cast<std::size_t>(pmax) * 2 + 8) --pmax;

    // Order selection on the sample every candidate can use.
    std::size_t start = static_cast<std::size_t>(pmax);
    int best_p = 0;
    double best_bic = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= pmax; ++p) {
        OlsFit f;
        if (!df_regression(y, d, p, start, f)) continue;
        double n_eff = static_cast<double>(f.n);
        double bic = n_eff * std::log(std::max(f.rss / n_eff, 1e-300)) +
                     static_cast<double>(p + 2) * std::log(n_eff);
        if (bic < best_bic) {
            best_bic = bic;
            best_p = p;
        }
    }

    OlsFit f;
    if (!df_regression(y, d, best_p, static_cast<std::size_t>(best_p), f))
        throw DataError("adf: degenerate regression");

    AdfResult r;
    r.lags = best_p;
    r.n_used = f.n;
    r.stat = f.se[1] > 0.0 ? f.coef[1] / f.se[1]
                           : std::numeric_limits<double>::quiet_NaN();
    r.cv1 = mackinnon_cv(1, r.n_used);
    r.cv5 = mackinnon_cv(5, r.n_used);
    r.cv10 = mackinnon_cv(10, r.n_used);
    if (r.stat < r.cv1)
        r.reject_level = 1;
    else if (r.stat < r.cv5)
        r.reject_level = 5;
    else if (r.stat < r.cv10)
        r.reject_level = 10;
    else
        r.reject_level = 0;
    return r;
}

std::string summary_table_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "series,n,mean,std_dev,skewness,kurtosis,min,max,adf,adf_lags,adf_stars\n";
    for (const auto& row : rows) {
        out << row.name << ',' << row.stats.n << ',' << format_double(row.stats.mean) << ','
            << format_double(row.stats.std_dev) << ',' << format_double(row.stats.skewness)
            << ',' << format_double(row.stats.kurtosis) << ',' << format_double(row.stats.min)
            << ',' << format_double(row.stats.max) << ',';
        if (row.has_adf)
            out << format_double(row.adf.stat) << ',' << row.adf.lags << ','
                << adf_stars(row.adf);
        else
            out << ",,";
        out << '\n';
    }
    return out.str();
}

}  // namespace midasvol
