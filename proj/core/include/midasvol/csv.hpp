#pragma once

#include <string>
#include <string_view>

#include "midasvol/series.hpp"

namespace midasvol {

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Shortest decimal form that round-trips the exact double.
std::string format_double(double x);

// Header "date,price": strictly increasing dates, positive prices.
DailySeries parse_daily_prices(std::string_view csv, std::string_view source = "csv");

// Header "date,return": strictly increasing dates, finite values. Accepted
// anywhere a price file is, for data that is already in return form.
DailySeries parse_daily_returns(std::string_view csv, std::string_view source = "csv");

// Header "month,value": contiguous months, finite values.
MonthlySeries parse_monthly_index(std::string_view csv, std::string_view source = "csv");

// Dispatch on the header line between the price and return layouts. Always
// yields a return series: price files go through log differences.
DailySeries parse_daily(std::string_view csv, std::string_view source = "csv");

}  // namespace midasvol
