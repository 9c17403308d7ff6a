#pragma once

#include <map>
#include <string>
#include <vector>

#include "midasvol/series.hpp"

namespace midasvol {

struct AlignWarning {
    YearMonth month;
    int trading_days = 0;
    std::string reason;
};

struct AlignOptions {
    // Months with fewer trading days are dropped; their realized variance
    // would be computed from too few observations to be meaningful.
    int min_days_per_month = 15;
};

// Daily returns grouped into months, with monthly factor series alongside.
// Factor series only have to overlap the return months; extra history before
// the panel feeds the lag structure, and a late start shrinks the usable
// suffix instead of failing.
struct AlignedPanel {
    DailySeries returns;
    std::vector<YearMonth> months;       // retained months, ascending
    std::vector<int> month_of_day;       // day index -> position in months
    std::vector<int> month_begin;        // months.size()+1 day offsets (CSR)
    std::vector<int> trading_days;       // per retained month
    std::map<std::string, MonthlySeries> factors;
    std::vector<AlignWarning> warnings;

    std::size_t days() const { return returns.size(); }
    // Day range [lo, hi) as a panel of its own; factors carried over whole,
    // month structure clipped rather than re-screened.
    AlignedPanel slice(std::size_t lo, std::size_t hi) const;
};

AlignedPanel align(const DailySeries& returns,
                   const std::map<std::string, MonthlySeries>& factors,
                   const AlignOptions& opts = {});

}  // namespace midasvol
