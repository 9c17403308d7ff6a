#include "midasvol/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "midasvol/csv.hpp"
#include "midasvol/log.hpp"

namespace midasvol {

namespace {

Date add_years(Date d, int years) {
    Date out{d.year + years, d.month, d.day};
    out.day = std::min(out.day, days_in_month(out.year, out.month));
    return out;
}

struct Block {
    std::size_t lo = 0;     // slice start, includes burn history
    std::size_t begin = 0;  // first forecast day
    std::size_t end = 0;    // one past the last forecast day
    ParamSet params;
    bool converged = true;
};

// Slice start so the likelihood sample is the calib window and the burn
// history sits in front of it.
std::size_t slice_start(const AlignedPanel& panel, const ModelSpec& spec,
                        std::size_t refit_day, int calib_years) {
    const auto& dates = panel.returns.dates;
    Date first = add_years(dates[refit_day], -calib_years);
    auto it = std::lower_bound(dates.begin(), dates.end(), first);
    std::size_t lo = static_cast<std::size_t>(it - dates.begin());
    if (spec.mode == WindowMode::rolling) {
        std::size_t burn =
            static_cast<std::size_t>(spec.window) + static_cast<std::size_t>(spec.K) * spec.stride;
        return lo > burn ? lo - burn : 0;
    }
    int ml = panel.month_of_day[lo] - spec.K;
    return panel.month_begin[static_cast<std::size_t>(std::max(ml, 0))];
}

void run_block(const AlignedPanel& panel, const ModelSpec& spec, Block& blk,
               const FitOptions& fo, ForecastSeries& out) {
    AlignedPanel calib = panel.slice(blk.lo, blk.begin);
    FitResult fr = fit(calib, spec, fo);
    blk.params = fr.params;
    blk.converged = fr.converged;

    AlignedPanel span = panel.slice(blk.lo, blk.end);
    ModelEngine eng(span, spec);
    std::size_t origin = blk.lo + eng.first_day();
    if (origin > blk.begin)
        throw DataError("eval: burn-in reaches past the forecast split");
    VolatilityPath path = eng.filter(fr.params);
    for (std::size_t j = blk.begin; j < blk.end; ++j) {
        double r = panel.returns.values[j];
        std::size_t pos = j - origin;
        out.forecast[j] = path.sigma2[pos];
        out.actual[j] = (r - fr.params.mu) * (r - fr.params.mu);
    }
}

const char* pvalue_stars(double p) {
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.10) return "*";
    return "";
}

}  // namespace

ForecastSeries rolling_forecast(const AlignedPanel& panel, const ModelSpec& spec,
                                const EvalOptions& opts) {
    spec.check();
    const auto& dates = panel.returns.dates;
    const std::size_t T = dates.size();

    Date split = opts.split ? *opts.split : add_years(dates.front(), opts.calib_years);
    auto it = std::lower_bound(dates.begin(), dates.end(), split);
    std::size_t s = static_cast<std::size_t>(it - dates.begin());
    if (s >= T) throw DataError("eval: split leaves no forecast days");
    if (s == 0) throw DataError("eval: split leaves no calibration data");

    std::vector<Block> blocks;
    std::size_t step = opts.refit_every > 0 ? static_cast<std::size_t>(opts.refit_every) : T - s;
    for (std::size_t b = s; b < T; b += step) {
        Block blk;
        blk.begin = b;
        blk.end = std::min(b + step, T);
        blk.lo = slice_start(panel, spec, b, opts.calib_years);
        blocks.push_back(blk);
    }

    ForecastSeries out;
    out.model_id = spec.id();
    out.split = dates[s];
    out.refits = static_cast<int>(blocks.size());
    out.dates.assign(dates.begin() + static_cast<long>(s), dates.end());
    out.forecast.assign(T, 0.0);
    out.actual.assign(T, 0.0);

    run_block(panel, spec, blocks[0], opts.fit, out);

    if (blocks.size() > 1) {
        FitOptions warm = opts.fit;
        warm.warm_start = blocks[0].params;
        warm.restarts = std::min(opts.fit.restarts, 2);
        warm.std_errors = false;
        warm.threads = 1;

        int pool_size = opts.fit.threads > 0
                            ? opts.fit.threads
                            : static_cast<int>(std::thread::hardware_concurrency());
        pool_size = std::max(1, std::min<int>(pool_size, static_cast<int>(blocks.size()) - 1));
        std::atomic<std::size_t> next{1};
        std::exception_ptr fail;
        std::mutex fail_mu;
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < blocks.size(); i = next.fetch_add(1)) {
                try {
                    run_block(panel, spec, blocks[i], warm, out);
                } catch (...) {
                    std::lock_guard<std::mutex> g(fail_mu);
                    if (!fail) fail = std::current_exception();
                }
            }
        };
        if (pool_size == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < pool_size; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        if (fail) std::rethrow_exception(fail);
    }
    for (const Block& blk : blocks)
        if (!blk.converged) out.converged = false;

    // Blocks wrote at global day offsets; trim to the forecast span.
    out.forecast.erase(out.forecast.begin(), out.forecast.begin() + static_cast<long>(s));
    out.actual.erase(out.actual.begin(), out.actual.begin() + static_cast<long>(s));
    return out;
}

LossSummary loss(const ForecastSeries& f) {
    if (f.forecast.empty() || f.forecast.size() != f.actual.size())
        throw DataError("loss: empty or mismatched forecast series");
    LossSummary s;
    s.n = f.forecast.size();
    double se = 0.0, ae = 0.0, sd = 0.0, ad = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) {
        double e = f.forecast[i] - f.actual[i];
        se += e * e;
        ae += std::abs(e);
        double d = std::sqrt(std::max(f.forecast[i], 0.0)) -
                   std::sqrt(std::max(f.actual[i], 0.0));
        sd += d * d;
        ad += std::abs(d);
    }
    double n = static_cast<double>(s.n);
    s.rmse = std::sqrt(se / n);
    s.rmae = std::sqrt(ae / n);
    s.rmsd = std::sqrt(sd / n);
    s.rmad = std::sqrt(ad / n);
    return s;
}

DmResult dm_test(const ForecastSeries& a, const ForecastSeries& b, int robust_lags) {
    if (a.dates != b.dates || a.dates.empty())
        throw DataError("dm: forecast windows differ or are empty");
    const std::size_t n = a.dates.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        double ea = a.forecast[i] - a.actual[i];
        double eb = b.forecast[i] - b.actual[i];
        d[i] = ea * ea - eb * eb;
    }
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(n);

    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);

    if (robust_lags > 0) {
        double lrv = var;
        for (int l = 1; l <= robust_lags && static_cast<std::size_t>(l) < n; ++l) {
            double g = 0.0;
            for (std::size_t t = static_cast<std::size_t>(l); t < n; ++t)
                g += (d[t] - mean) * (d[t - static_cast<std::size_t>(l)] - mean);
            g /= static_cast<double>(n);
            lrv += 2.0 * (1.0 - static_cast<double>(l) / (robust_lags + 1.0)) * g;
        }
        if (lrv > 0.0) var = lrv;
    }

    DmResult r;
    r.n = n;
    if (!(var > 0.0)) return r;  // identical losses: stat 0, pvalue 1
    r.stat = mean / std::sqrt(var / static_cast<double>(n));
    r.pvalue = std::erfc(std::abs(r.stat) / std::sqrt(2.0));
    return r;
}

std::string dm_matrix_csv(const std::vector<ForecastSeries>& models, int robust_lags) {
    std::string out = "model";
    for (const auto& m : models) out += "," + m.model_id;
    out += "\n";
    for (std::size_t i = 0; i < models.size(); ++i) {
        out += models[i].model_id;
        for (std::size_t j = 0; j < models.size(); ++j) {
            out += ",";
            if (i == j) continue;
            DmResult r = dm_test(models[i], models[j], robust_lags);
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%+.2f", r.stat);
            out += buf;
            out += pvalue_stars(r.pvalue);
        }
        out += "\n";
    }
    return out;
}

std::string forecast_to_json(const ForecastSeries& f) {
    nlohmann::json j;
    j["model_id"] = f.model_id;
    j["split"] = f.split.str();
    j["refits"] = f.refits;
    j["converged"] = f.converged;
    nlohmann::json ds = nlohmann::json::array();
    for (const Date& d : f.dates) ds.push_back(d.str());
    j["dates"] = ds;
    j["forecast"] = f.forecast;
    j["actual"] = f.actual;
    LossSummary ls = loss(f);
    j["losses"] = {{"n", ls.n},   {"rmse", ls.rmse}, {"rmae", ls.rmae},
                   {"rmsd", ls.rmsd}, {"rmad", ls.rmad}};
    return j.dump(2) + "\n";
}

ForecastSeries forecast_from_json(const std::string& text, const std::string& source) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw DataError(source + ": " + e.what());
    }
    ForecastSeries f;
    try {
        f.model_id = j.at("model_id").get<std::string>();
        for (const auto& s : j.at("dates")) f.dates.push_back(Date::parse(s.get<std::string>()));
        f.forecast = j.at("forecast").get<std::vector<double>>();
        f.actual = j.at("actual").get<std::vector<double>>();
        if (j.contains("split")) f.split = Date::parse(j["split"].get<std::string>());
        if (j.contains("refits")) f.refits = j["refits"].get<int>();
        if (j.contains("converged")) f.converged = j["converged"].get<bool>();
    } catch (const DataError&) {
        throw;
    } catch (const std::exception& e) {
        throw DataError(source + ": " + e.what());
    }
    if (f.dates.size() != f.forecast.size() || f.dates.size() != f.actual.size())
        throw DataError(source + ": dates, forecast, actual lengths differ");
    return f;
}

}  // namespace midasvol
