#include <doctest.h>

#include <cmath>
#include <map>

#include "midasvol/panel.hpp"

using namespace midasvol;

namespace {

// Deterministic daily returns: `dpm` trading days in each month from `start`.
DailySeries make_returns(YearMonth start, int months, int dpm, double scale = 0.01) {
    DailySeries r;
    YearMonth ym = start;
    int i = 0;
    for (int t = 0; t < months; ++t, ym = ym.plus(1))
        for (int d = 1; d <= dpm; ++d, ++i) {
            r.dates.push_back({ym.year, ym.month, d});
            r.values.push_back(scale * std::sin(0.7 * i + 0.3));
        }
    return r;
}

MonthlySeries make_factor(YearMonth start, int months, double base = 100.0) {
    MonthlySeries f;
    YearMonth ym = start;
    for (int t = 0; t < months; ++t, ym = ym.plus(1)) {
        f.months.push_back(ym);
        f.values.push_back(base + t);
    }
    return f;
}

}  // namespace

TEST_CASE("align groups days into months with CSR offsets") {
    DailySeries r = make_returns({2020, 1}, 3, 20);
    AlignedPanel p = align(r, {});
    REQUIRE(p.months.size() == 3);
    CHECK(p.days() == 60);
    CHECK(p.month_begin == std::vector<int>{0, 20, 40, 60});
    CHECK(p.trading_days == std::vector<int>{20, 20, 20});
    CHECK(p.month_of_day[0] == 0);
    CHECK(p.month_of_day[19] == 0);
    CHECK(p.month_of_day[20] == 1);
    CHECK(p.month_of_day[59] == 2);
    CHECK(p.warnings.empty());
}

TEST_CASE("short months are dropped with a warning") {
    DailySeries r = make_returns({2020, 1}, 1, 20);
    // A stub second month with 3 days, then a full third month.
    for (int d = 1; d <= 3; ++d) {
        r.dates.push_back({2020, 2, d});
        r.values.push_back(0.001);
    }
    for (int d = 1; d <= 20; ++d) {
        r.dates.push_back({2020, 3, d});
        r.values.push_back(0.002);
    }
    AlignedPanel p = align(r, {});
    REQUIRE(p.months.size() == 2);
    CHECK(p.months[0] == YearMonth{2020, 1});
    CHECK(p.months[1] == YearMonth{2020, 3});
    CHECK(p.days() == 40);
    REQUIRE(p.warnings.size() == 1);
    CHECK(p.warnings[0].month == YearMonth{2020, 2});
    CHECK(p.warnings[0].trading_days == 3);

    // Lowering the threshold keeps the stub month.
    AlignOptions keep;
    keep.min_days_per_month = 3;
    AlignedPanel q = align(r, {}, keep);
    CHECK(q.months.size() == 3);
    CHECK(q.days() == 43);
}

TEST_CASE("factors may start late or early but must overlap") {
    DailySeries r = make_returns({2020, 1}, 6, 20);

    std::map<std::string, MonthlySeries> early{{"f", make_factor({2019, 6}, 10)}};
    CHECK_NOTHROW(align(r, early));

    std::map<std::string, MonthlySeries> late{{"f", make_factor({2020, 4}, 5)}};
    CHECK_NOTHROW(align(r, late));

    std::map<std::string, MonthlySeries> outside{{"f", make_factor({2021, 1}, 5)}};
    CHECK_THROWS_AS(align(r, outside), DataError);

    std::map<std::string, MonthlySeries> empty{{"f", MonthlySeries{}}};
    CHECK_THROWS_AS(align(r, empty), DataError);
}

TEST_CASE("align rejects an empty or inconsistent return series") {
    CHECK_THROWS_AS(align(DailySeries{}, {}), DataError);
    DailySeries bad = make_returns({2020, 1}, 1, 16);
    bad.values[3] = std::nan("");
    CHECK_THROWS_AS(align(bad, {}), DataError);
}

TEST_CASE("slice clips the month structure and keeps factors whole") {
    DailySeries r = make_returns({2020, 1}, 4, 20);
    std::map<std::string, MonthlySeries> f{{"f", make_factor({2019, 1}, 30)}};
    AlignedPanel p = align(r, f);

    AlignedPanel s = p.slice(5, 65);
    CHECK(s.days() == 60);
    CHECK(s.returns.dates.front() == p.returns.dates[5]);
    CHECK(s.returns.dates.back() == p.returns.dates[64]);
    CHECK(s.factors.at("f").size() == 30);
    // Day 5 still belongs to the first retained month.
    CHECK(s.month_of_day.front() == 0);
    CHECK(s.month_begin.front() == 0);
    CHECK(s.month_begin.back() == 60);
    // Month boundaries stay consistent: each day's month contains its date.
    for (std::size_t i = 0; i < s.days(); ++i) {
        int t = s.month_of_day[i];
        CHECK(s.returns.dates[i].ym() == s.months[static_cast<std::size_t>(t)]);
    }

    CHECK_THROWS_AS(p.slice(10, 10), DataError);
    CHECK_THROWS_AS(p.slice(0, p.days() + 1), DataError);
}
