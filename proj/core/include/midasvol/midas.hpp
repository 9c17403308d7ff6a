#pragma once

#include <span>
#include <vector>

#include "midasvol/panel.hpp"
#include "midasvol/series.hpp"

namespace midasvol {

// Beta-polynomial lag weights over k = 1..K:
//   w_k proportional to k^(omega1-1) * (K-k)^(omega2-1), normalized to sum 1.
// omega1 = omega2 = 1 gives a flat profile; omega2 > 1 front-loads recent
// lags and pins w_K to zero. Requires omega1, omega2 >= 1 and K >= 1.
std::vector<double> beta_weights(double omega1, double omega2, int K);

// Sum of squared returns within each panel month. The panel's months must be
// contiguous for the result to form a valid monthly series.
MonthlySeries realized_vol_fixed(const AlignedPanel& panel);

// Same, as a bare vector aligned with panel.months (no contiguity demand).
std::vector<double> realized_vol_fixed_values(const AlignedPanel& panel);

// Backward-looking sum of squared returns over the previous `window` days,
// dated at the day it is available for. Output starts at index `window`.
DailySeries realized_vol_rolling(const DailySeries& returns, int window);

// Monthly factor copied to each trading day of its month, then averaged over
// the previous `window` days. Output starts at panel day `window`.
DailySeries macro_rolling(const MonthlySeries& factor, const AlignedPanel& panel,
                          int window);

// sum_{j=1..window} v[i-j], summed in that order. Shared by the rolling
// kernels and the simulator so both produce bit-identical values.
double window_sum_before(std::span<const double> v, std::size_t i, int window);
double window_sum_sq_before(std::span<const double> v, std::size_t i, int window);

}  // namespace midasvol
