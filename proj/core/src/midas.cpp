#include "midasvol/midas.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace midasvol {

std::vector<double> beta_weights(double omega1, double omega2, int K) {
    if (!(omega1 >= 1.0) || !(omega2 >= 1.0))
        throw std::invalid_argument("beta_weights: omega1 and omega2 must be >= 1");
    if (K < 1) throw std::invalid_argument("beta_weights: K must be >= 1");

    // Work with log numerators so large omega/K never overflow. Exponent
    // zero is handled explicitly: 0^0 counts as 1 here.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> logs(static_cast<std::size_t>(K));
    double top = -inf;
    for (int k = 1; k <= K; ++k) {
        double a = (omega1 == 1.0) ? 0.0 : (omega1 - 1.0) * std::log(static_cast<double>(k));
        double b;
        if (omega2 == 1.0) b = 0.0;
        else if (k == K) b = -inf;
        else b = (omega2 - 1.0) * std::log(static_cast<double>(K - k));
        logs[static_cast<std::size_t>(k - 1)] = a + b;
        top = std::max(top, a + b);
    }
    std::vector<double> w(logs.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] = std::exp(logs[k] - top);
        sum += w[k];
    }
    for (auto& x : w) x /= sum;
    return w;
}

std::vector<double> realized_vol_fixed_values(const AlignedPanel& panel) {
    std::vector<double> rv(panel.months.size(), 0.0);
    for (std::size_t t = 0; t < panel.months.size(); ++t)
        for (int i = panel.month_begin[t]; i < panel.month_begin[t + 1]; ++i)
            rv[t] += panel.returns.values[static_cast<std::size_t>(i)] *
                     panel.returns.values[static_cast<std::size_t>(i)];
    return rv;
}

MonthlySeries realized_vol_fixed(const AlignedPanel& panel) {
    MonthlySeries s;
    s.months = panel.months;
    s.values = realized_vol_fixed_values(panel);
    s.check("realized variance");
    return s;
}

double window_sum_before(std::span<const double> v, std::size_t i, int window) {
    double acc = 0.0;
    for (int j = 1; j <= window; ++j) acc += v[i - static_cast<std::size_t>(j)];
    return acc;
}

double window_sum_sq_before(std::span<const double> v, std::size_t i, int window) {
    double acc = 0.0;
    for (int j = 1; j <= window; ++j) {
        double x = v[i - static_cast<std::size_t>(j)];
        acc += x * x;
    }
    return acc;
}

DailySeries realized_vol_rolling(const DailySeries& returns, int window) {
    if (window < 1) throw std::invalid_argument("realized_vol_rolling: window must be >= 1");
    returns.check("returns");
    if (returns.size() <= static_cast<std::size_t>(window))
        throw DataError("realized_vol_rolling: series shorter than window");
    DailySeries out;
    for (std::size_t i = static_cast<std::size_t>(window); i < returns.size(); ++i) {
        out.dates.push_back(returns.dates[i]);
        out.values.push_back(window_sum_sq_before(returns.values, i, window));
    }
    return out;
}

DailySeries macro_rolling(const MonthlySeries& factor, const AlignedPanel& panel,
                          int window) {
    if (window < 1) throw std::invalid_argument("macro_rolling: window must be >= 1");
    factor.check("factor");
    if (factor.empty()) throw DataError("macro_rolling: empty factor");

    // The factor may start after the panel does; the expansion then starts at
    // its first covered month. It must reach the panel's end, though, or the
    // trailing days would have no value at all.
    std::size_t m0 = 0;
    while (m0 < panel.months.size() && factor.find(panel.months[m0]) < 0) ++m0;
    if (m0 == panel.months.size() || factor.find(panel.months.back()) < 0)
        throw DataError("macro_rolling: factor covers " + factor.months.front().str() + ".." +
                        factor.months.back().str() + " but the panel runs to " +
                        panel.months.back().str());

    const std::size_t d0 = static_cast<std::size_t>(panel.month_begin[m0]);
    std::vector<double> daily(panel.days() - d0);
    for (std::size_t i = d0; i < panel.days(); ++i) {
        long pos = factor.find(panel.months[static_cast<std::size_t>(panel.month_of_day[i])]);
        daily[i - d0] = factor.values[static_cast<std::size_t>(pos)];
    }
    if (daily.size() <= static_cast<std::size_t>(window))
        throw DataError("macro_rolling: fewer covered days than the window");
    DailySeries out;
    for (std::size_t i = static_cast<std::size_t>(window); i < daily.size(); ++i) {
        out.dates.push_back(panel.returns.dates[d0 + i]);
        out.values.push_back(window_sum_before(daily, i, window) / window);
    }
    return out;
}

}  // namespace midasvol
