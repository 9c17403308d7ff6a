#pragma once

#include <cstddef>
#include <vector>

namespace midasvol {

// Inverse of a symmetric positive definite matrix via Cholesky.
// Returns false (and leaves `inv` unspecified) when not positive definite.
bool spd_invert(const std::vector<std::vector<double>>& A,
                std::vector<std::vector<double>>& inv);

struct OlsFit {
    std::vector<double> coef;
    std::vector<double> se;
    double rss = 0.0;
    std::size_t n = 0;
};

// Least squares of y on the given columns. False on a singular design.
bool ols(const std::vector<std::vector<double>>& X_cols, const std::vector<double>& y,
         OlsFit& out);

}  // namespace midasvol
