#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace midasvol {

struct SummaryStats {
    std::size_t n = 0;
    double mean = 0.0;
    double std_dev = 0.0;   // n-1 denominator
    double skewness = 0.0;  // population-moment ratio m3 / m2^1.5
    double kurtosis = 0.0;  // raw m4 / m2^2, 3 under normality
    double min = 0.0;
    double max = 0.0;
};

SummaryStats summary(const std::vector<double>& x);

// Augmented Dickey-Fuller with intercept, no trend. Augmentation order is
// picked by BIC over 0..max_lags on a common sample, then the chosen order is
// refit on the longest sample it allows. max_lags < 0 applies the
// floor(12 * (n/100)^0.25) rule.
struct AdfResult {
    double stat = 0.0;
    int lags = 0;
    std::size_t n_used = 0;
    double cv1 = 0.0;
    double cv5 = 0.0;
    double cv10 = 0.0;
    int reject_level = 0;  // strongest of 1, 5, 10 at which the unit root is rejected; 0 = none
};

AdfResult adf_test(const std::vector<double>& y, int max_lags = -1);

inline const char* adf_stars(const AdfResult& r) {
    switch (r.reject_level) {
        case 1: return "***";
        case 5: return "**";
        case 10: return "*";
        default: return "";
    }
}

struct SummaryRow {
    std::string name;
    SummaryStats stats;
    bool has_adf = false;
    AdfResult adf;
};

std::string summary_table_csv(const std::vector<SummaryRow>& rows);

}  // namespace midasvol
