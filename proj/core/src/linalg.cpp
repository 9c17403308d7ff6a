#include "midasvol/linalg.hpp"

#include <cmath>

namespace midasvol {

namespace {

// Lower-triangular Cholesky factor; false when A is not positive definite.
bool cholesky(const std::vector<std::vector<double>>& A,
              std::vector<std::vector<double>>& L) {
    const std::size_t n = A.size();
    L.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = A[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s)) return false;
                L[i][i] = std::sqrt(s);
            } else {
                L[i][j] = s / L[j][j];
            }
        }
    }
    return true;
}

}  // namespace

bool spd_invert(const std::vector<std::vector<double>>& A,
                std::vector<std::vector<double>>& inv) {
    const std::size_t n = A.size();
    std::vector<std::vector<double>> L;
    if (!cholesky(A, L)) return false;
    inv.assign(n, std::vector<double>(n, 0.0));
    std::vector<double> col(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (std::size_t k = 0; k < i; ++k) s -= L[i][k] * col[k];
            col[i] = s / L[i][i];
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = col[i];
            for (std::size_t k = i + 1; k < n; ++k) s -= L[k][i] * inv[k][c];
            inv[i][c] = s / L[i][i];
        }
    }
    return true;
}

bool ols(const std::vector<std::vector<double>>& X_cols, const std::vector<double>& y,
         OlsFit& out) {
    const std::size_t p = X_cols.size();
    const std::size_t n = y.size();
    if (p == 0 || n <= p) return false;
    for (const auto& c : X_cols)
        if (c.size() != n) return false;

    std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
    std::vector<double> xty(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += X_cols[i][r] * X_cols[j][r];
            xtx[i][j] = xtx[j][i] = s;
        }
        for (std::size_t r = 0; r < n; ++r) xty[i] += X_cols[i][r] * y[r];
    }

    std::vector<std::vector<double>> inv;
    if (!spd_invert(xtx, inv)) return false;

    out.coef.assign(p, 0.0);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) out.coef[i] += inv[i][j] * xty[j];

    out.rss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double fit = 0.0;
        for (std::size_t i = 0; i < p; ++i) fit += X_cols[i][r] * out.coef[i];
        out.rss += (y[r] - fit) * (y[r] - fit);
    }
    out.n = n;
    double s2 = out.rss / static_cast<double>(n - p);
    out.se.assign(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) out.se[i] = std::sqrt(s2 * inv[i][i]);
    return true;
}

}  // namespace midasvol
