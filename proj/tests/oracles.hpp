#pragma once

// Independent reference computations for the tests. Plain loops, no Eigen.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) {
                piv = r;
            }
        }
        if (a[piv][col] == 0.0) {
            throw std::runtime_error("singular system");
        }
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) {
            s -= a[i][c] * x[c];
        }
        x[i] = s / a[i][i];
    }
    return x;
}

inline double rbf(double a, double b, double sf2, double l) { return sf2 * std::exp(-(a - b) * (a - b) / (2 * l * l)); }

struct GpMoments {
    std::vector<double> mean;
    std::vector<double> var;
};

// mu = k*^T (K + s2 W)^-1 y, var = k(x,x) - k*^T (K + s2 W)^-1 k*, inputs already scaled
inline GpMoments gp_dense(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w,
                          double s2, double sf2, double l, const std::vector<double>& query) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> k(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            k[i][j] = rbf(x[i], x[j], sf2, l) + (i == j ? s2 * w[i] : 0.0);
        }
    }
    GpMoments out;
    const auto alpha = n ? dense_solve(k, y) : std::vector<double>{};
    for (double q : query) {
        std::vector<double> ks(n);
        for (std::size_t i = 0; i < n; ++i) {
            ks[i] = rbf(q, x[i], sf2, l);
        }
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            m += ks[i] * alpha[i];
        }
        double v = sf2;
        if (n) {
            const auto z = dense_solve(k, ks);
            for (std::size_t i = 0; i < n; ++i) {
                v -= ks[i] * z[i];
            }
        }
        out.mean.push_back(m);
        out.var.push_back(v);
    }
    return out;
}

// Best value over all combinations of grid indices whose summed budget fits
// the cap, by plain recursion.
inline double mck_best(const std::vector<std::vector<double>>& table, const std::vector<double>& grid, double cap,
                       std::size_t j = 0, double spent = 0.0) {
    if (j == table.size()) {
        return 0.0;
    }
    double best = -INFINITY;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        // budgets far below a unit step of rounding error count as fitting
        if (spent + grid[i] <= cap + 1e-9) {
            const double rest = mck_best(table, grid, cap, j + 1, spent + grid[i]);
            if (rest != -INFINITY) {
                best = std::max(best, table[j][i] + rest);
            }
        }
    }
    return best;
}

} // namespace oracle
