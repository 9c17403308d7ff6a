#pragma once

#include <optional>
#include <string>
#include <vector>

#include "midasvol/estimator.hpp"
#include "midasvol/model.hpp"
#include "midasvol/panel.hpp"

namespace midasvol {

// Out-of-sample protocol: calibrate on a trailing window of calib_years,
// forecast one step at a time, refit every refit_every trading days on the
// window trailing the refit date. refit_every <= 0 keeps the first
// calibration for the whole evaluation span.
struct EvalOptions {
    int calib_years = 13;
    int refit_every = 22;
    std::optional<Date> split;  // first forecast day; default: calib_years after the sample start
    FitOptions fit;
};

struct ForecastSeries {
    std::string model_id;
    Date split{};
    int refits = 0;
    bool converged = true;  // every block fit met tolerances
    std::vector<Date> dates;
    std::vector<double> forecast;  // one-step-ahead conditional variance
    std::vector<double> actual;    // squared demeaned return, block-level mean
};

ForecastSeries rolling_forecast(const AlignedPanel& panel, const ModelSpec& spec,
                                const EvalOptions& opts);

// RMSE and RMAE on variances, RMSD and RMAD on standard deviations.
// RMAE and RMAD take the square root of the mean absolute error.
struct LossSummary {
    std::size_t n = 0;
    double rmse = 0.0;
    double rmae = 0.0;
    double rmsd = 0.0;
    double rmad = 0.0;
};

LossSummary loss(const ForecastSeries& f);

// Diebold-Mariano on squared forecast errors. Positive stat: a is worse.
// robust_lags > 0 switches the denominator to a Newey-West long-run variance
// with that many lags.
struct DmResult {
    double stat = 0.0;
    double pvalue = 1.0;
    std::size_t n = 0;
};

DmResult dm_test(const ForecastSeries& a, const ForecastSeries& b, int robust_lags = 0);

std::string dm_matrix_csv(const std::vector<ForecastSeries>& models, int robust_lags = 0);

std::string forecast_to_json(const ForecastSeries& f);
ForecastSeries forecast_from_json(const std::string& text, const std::string& source);

}  // namespace midasvol
