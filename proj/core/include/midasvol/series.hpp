#pragma once

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace midasvol {

// Malformed or inconsistent input data. The command line tool maps this to
// its data-error exit code.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct YearMonth {
    int year = 0;
    int month = 0;  // 1..12

    auto operator<=>(const YearMonth&) const = default;

    // Months since year 0, so contiguity checks reduce to arithmetic.
    int index() const { return year * 12 + (month - 1); }

    YearMonth plus(int k) const;
    YearMonth minus(int k) const { return plus(-k); }

    static YearMonth parse(std::string_view text);  // "YYYY-MM"
    std::string str() const;
};

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    YearMonth ym() const { return {year, month}; }

    static Date parse(std::string_view text);  // "YYYY-MM-DD"
    std::string str() const;
};

int days_in_month(int year, int month);
bool is_valid_date(const Date& d);

// Daily observations; dates strictly increasing, values finite.
struct DailySeries {
    std::vector<Date> dates;
    std::vector<double> values;

    std::size_t size() const { return dates.size(); }
    bool empty() const { return dates.empty(); }

    void check(std::string_view what) const;
};

// Monthly observations; months contiguous (a gap is a data error).
struct MonthlySeries {
    std::vector<YearMonth> months;
    std::vector<double> values;

    std::size_t size() const { return months.size(); }
    bool empty() const { return months.empty(); }

    // Position of a month, or -1 when outside the covered range.
    long find(YearMonth m) const;

    void check(std::string_view what) const;
};

// Log returns of a positive price series. Output is one shorter and dated at
// the later day of each pair.
DailySeries log_returns(const DailySeries& prices);

// Log changes of a positive monthly index, dated at the later month.
MonthlySeries log_changes(const MonthlySeries& index);

}  // namespace midasvol
