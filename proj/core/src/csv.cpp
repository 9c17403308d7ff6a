#include "midasvol/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace midasvol {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

struct LineReader {
    std::string_view rest;
    int line_no = 0;

    bool next(std::string_view& out) {
        while (!rest.empty()) {
            auto nl = rest.find('\n');
            std::string_view raw = rest.substr(0, nl);
            rest = (nl == std::string_view::npos) ? std::string_view{} : rest.substr(nl + 1);
            ++line_no;
            out = trim(raw);
            if (!out.empty()) return true;
        }
        return false;
    }
};

[[noreturn]] void fail(std::string_view source, int line, const std::string& msg) {
    std::ostringstream os;
    os << source << ":" << line << ": " << msg;
    throw DataError(os.str());
}

double parse_value(std::string_view text, std::string_view source, int line) {
    text = trim(text);
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        fail(source, line, "unparseable number '" + std::string(text) + "'");
    if (!std::isfinite(v)) fail(source, line, "non-finite value");
    return v;
}

// Two-column layout shared by every input format.
template <typename Row>
void parse_rows(std::string_view csv, std::string_view source,
                std::string_view header, Row&& row) {
    LineReader lines{csv};
    std::string_view line;
    if (!lines.next(line)) throw DataError(std::string(source) + ": empty file");
    if (line != header)
        fail(source, lines.line_no,
             "bad header '" + std::string(line) + "', expected '" + std::string(header) + "'");
    while (lines.next(line)) {
        auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
            fail(source, lines.line_no, "expected exactly two fields");
        row(trim(line.substr(0, comma)), line.substr(comma + 1), lines.line_no);
    }
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("short write to " + path);
}

std::string format_double(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, p);
}

DailySeries parse_daily_prices(std::string_view csv, std::string_view source) {
    DailySeries s;
    parse_rows(csv, source, "date,price", [&](std::string_view a, std::string_view b, int ln) {
        Date d;
        try {
            d = Date::parse(a);
        } catch (const DataError& e) {
            fail(source, ln, e.what());
        }
        double v = parse_value(b, source, ln);
        if (!(v > 0.0)) fail(source, ln, "non-positive price");
        s.dates.push_back(d);
        s.values.push_back(v);
    });
    s.check(source);
    return s;
}

DailySeries parse_daily_returns(std::string_view csv, std::string_view source) {
    DailySeries s;
    parse_rows(csv, source, "date,return", [&](std::string_view a, std::string_view b, int ln) {
        Date d;
        try {
            d = Date::parse(a);
        } catch (const DataError& e) {
            fail(source, ln, e.what());
        }
        s.dates.push_back(d);
        s.values.push_back(parse_value(b, source, ln));
    });
    s.check(source);
    return s;
}

MonthlySeries parse_monthly_index(std::string_view csv, std::string_view source) {
    MonthlySeries s;
    parse_rows(csv, source, "month,value", [&](std::string_view a, std::string_view b, int ln) {
        YearMonth m;
        try {
            m = YearMonth::parse(a);
        } catch (const DataError& e) {
            fail(source, ln, e.what());
        }
        s.months.push_back(m);
        s.values.push_back(parse_value(b, source, ln));
    });
    s.check(source);
    return s;
}

DailySeries parse_daily(std::string_view csv, std::string_view source) {
    LineReader lines{csv};
    std::string_view first;
    if (!lines.next(first)) throw DataError(std::string(source) + ": empty file");
    if (first == "date,return") return parse_daily_returns(csv, source);
    return log_returns(parse_daily_prices(csv, source));
}

}  // namespace midasvol
