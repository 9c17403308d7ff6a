#include "midasvol/panel.hpp"

#include <algorithm>
#include <sstream>

#include "midasvol/log.hpp"

namespace midasvol {

AlignedPanel align(const DailySeries& returns,
                   const std::map<std::string, MonthlySeries>& factors,
                   const AlignOptions& opts) {
    returns.check("returns");
    if (returns.empty()) throw DataError("align: empty return series");
    for (const auto& [name, f] : factors) f.check("factor '" + name + "'");

    // Group days by month, in order.
    std::vector<YearMonth> raw_months;
    std::vector<int> counts;
    for (const auto& d : returns.dates) {
        if (raw_months.empty() || !(raw_months.back() == d.ym())) {
            raw_months.push_back(d.ym());
            counts.push_back(0);
        }
        ++counts.back();
    }

    AlignedPanel p;
    std::vector<char> keep(raw_months.size(), 1);
    for (std::size_t t = 0; t < raw_months.size(); ++t) {
        if (counts[t] < opts.min_days_per_month) {
            keep[t] = 0;
            std::ostringstream os;
            os << "month " << raw_months[t].str() << " has only " << counts[t]
               << " trading days (minimum " << opts.min_days_per_month << "), dropped";
            p.warnings.push_back({raw_months[t], counts[t], os.str()});
            log_warn(os.str());
        }
    }

    std::size_t day = 0;
    for (std::size_t t = 0; t < raw_months.size(); ++t) {
        if (!keep[t]) {
            day += static_cast<std::size_t>(counts[t]);
            continue;
        }
        p.months.push_back(raw_months[t]);
        p.month_begin.push_back(static_cast<int>(p.returns.size()));
        p.trading_days.push_back(counts[t]);
        int pos = static_cast<int>(p.months.size()) - 1;
        for (int i = 0; i < counts[t]; ++i, ++day) {
            p.returns.dates.push_back(returns.dates[day]);
            p.returns.values.push_back(returns.values[day]);
            p.month_of_day.push_back(pos);
        }
    }
    p.month_begin.push_back(static_cast<int>(p.returns.size()));

    if (p.months.empty())
        throw DataError("align: no months meet the minimum-days threshold");

    // A factor may start before the panel (lag history) or after it (the
    // model's eligibility scan skips the uncovered head); it just has to
    // overlap. Anything stricter is for the consumer to decide.
    for (const auto& [name, f] : factors) {
        if (f.empty()) throw DataError("align: factor '" + name + "' is empty");
        if (f.months.back() < p.months.front() || p.months.back() < f.months.front())
            throw DataError("align: factor '" + name + "' (" + f.months.front().str() + ".." +
                            f.months.back().str() + ") does not overlap the panel (" +
                            p.months.front().str() + ".." + p.months.back().str() + ")");
        p.factors.emplace(name, f);
    }
    return p;
}

AlignedPanel AlignedPanel::slice(std::size_t lo, std::size_t hi) const {
    if (lo >= hi || hi > days()) throw DataError("slice: bad day range");
    AlignedPanel s;
    s.returns.dates.assign(returns.dates.begin() + lo, returns.dates.begin() + hi);
    s.returns.values.assign(returns.values.begin() + lo, returns.values.begin() + hi);
    int first_m = month_of_day[lo], last_m = month_of_day[hi - 1];
    s.months.assign(months.begin() + first_m, months.begin() + last_m + 1);
    for (std::size_t i = lo; i < hi; ++i)
        s.month_of_day.push_back(month_of_day[i] - first_m);
    for (int m = first_m; m <= last_m; ++m) {
        int b = std::max(month_begin[m], static_cast<int>(lo));
        int e = std::min(month_begin[m + 1], static_cast<int>(hi));
        s.month_begin.push_back(b - static_cast<int>(lo));
        s.trading_days.push_back(e - b);
    }
    s.month_begin.push_back(static_cast<int>(hi - lo));
    s.factors = factors;
    return s;
}

}  // namespace midasvol
