#include "midasvol/series.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace midasvol {

namespace {

bool parse_int(std::string_view text, int& out) {
    if (text.empty()) return false;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && p == text.data() + text.size();
}

}  // namespace

YearMonth YearMonth::plus(int k) const {
    int idx = index() + k;
    if (idx < 0) throw DataError("month arithmetic underflow");
    return {idx / 12, idx % 12 + 1};
}

YearMonth YearMonth::parse(std::string_view text) {
    YearMonth ym;
    if (text.size() != 7 || text[4] != '-' ||
        !parse_int(text.substr(0, 4), ym.year) ||
        !parse_int(text.substr(5, 2), ym.month) ||
        ym.month < 1 || ym.month > 12) {
        throw DataError("bad month '" + std::string(text) + "', expected YYYY-MM");
    }
    return ym;
}

std::string YearMonth::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

int days_in_month(int year, int month) {
    static const int base[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12) return 0;
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return (month == 2 && leap) ? 29 : base[month - 1];
}

bool is_valid_date(const Date& d) {
    return d.year >= 1 && d.year <= 9999 && d.month >= 1 && d.month <= 12 &&
           d.day >= 1 && d.day <= days_in_month(d.year, d.month);
}

Date Date::parse(std::string_view text) {
    Date d;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
        !parse_int(text.substr(0, 4), d.year) ||
        !parse_int(text.substr(5, 2), d.month) ||
        !parse_int(text.substr(8, 2), d.day) || !is_valid_date(d)) {
        throw DataError("bad date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
    return d;
}

std::string Date::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

void DailySeries::check(std::string_view what) const {
    std::string name(what);
    if (dates.size() != values.size())
        throw DataError(name + ": date/value length mismatch");
    for (std::size_t i = 0; i < size(); ++i) {
        if (!std::isfinite(values[i]))
            throw DataError(name + ": non-finite value at " + dates[i].str());
        if (i > 0 && !(dates[i - 1] < dates[i]))
            throw DataError(name + ": dates not strictly increasing at " + dates[i].str());
    }
}

long MonthlySeries::find(YearMonth m) const {
    if (empty()) return -1;
    long pos = m.index() - months.front().index();
    return (pos >= 0 && pos < static_cast<long>(size())) ? pos : -1;
}

void MonthlySeries::check(std::string_view what) const {
    std::string name(what);
    if (months.size() != values.size())
        throw DataError(name + ": month/value length mismatch");
    for (std::size_t i = 0; i < size(); ++i) {
        if (months[i].month < 1 || months[i].month > 12)
            throw DataError(name + ": bad month " + months[i].str());
        if (!std::isfinite(values[i]))
            throw DataError(name + ": non-finite value at " + months[i].str());
        if (i > 0 && months[i].index() != months[i - 1].index() + 1)
            throw DataError(name + ": gap between " + months[i - 1].str() +
                            " and " + months[i].str());
    }
}

DailySeries log_returns(const DailySeries& prices) {
    prices.check("prices");
    if (prices.size() < 2) throw DataError("prices: need at least two observations");
    DailySeries r;
    r.dates.reserve(prices.size() - 1);
    r.values.reserve(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        if (!(prices.values[i - 1] > 0.0) || !(prices.values[i] > 0.0))
            throw DataError("prices: non-positive price at " + prices.dates[i].str());
        r.dates.push_back(prices.dates[i]);
        r.values.push_back(std::log(prices.values[i] / prices.values[i - 1]));
    }
    return r;
}

MonthlySeries log_changes(const MonthlySeries& index) {
    index.check("index");
    if (index.size() < 2) throw DataError("index: need at least two observations");
    MonthlySeries c;
    c.months.assign(index.months.begin() + 1, index.months.end());
    c.values.reserve(index.size() - 1);
    for (std::size_t i = 1; i < index.size(); ++i) {
        if (!(index.values[i - 1] > 0.0) || !(index.values[i] > 0.0))
            throw DataError("index: non-positive value at " + index.months[i].str());
        c.values.push_back(std::log(index.values[i] / index.values[i - 1]));
    }
    return c;
}

}  // namespace midasvol
