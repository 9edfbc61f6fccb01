#pragma once

// Straightforward reference implementations used as test oracles. They
// follow the textbook definitions literally (1-based indices, explicit
// fitted values, long double accumulation) and share no code with the
// library kernels.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

inline std::vector<long double> profile(const std::vector<double>& x) {
    long double mean = 0.0L;
    for (double v : x) mean += v;
    mean /= static_cast<long double>(x.size());
    std::vector<long double> X(x.size() + 1, 0.0L);  // X[0] unused, 1-based
    for (std::size_t t = 1; t <= x.size(); ++t) X[t] = X[t - 1] + (x[t - 1] - mean);
    return X;
}

// Residuals of the least-squares line a + b*i through (i, X[first + i]),
// i = 1..s, solved from raw normal equations.
inline std::vector<long double> line_residuals(const std::vector<long double>& X, std::size_t first,
                                               std::size_t s) {
    long double si = 0, sii = 0, sy = 0, siy = 0;
    for (std::size_t i = 1; i <= s; ++i) {
        const long double y = X[first + i];
        si += i;
        sii += static_cast<long double>(i) * i;
        sy += y;
        siy += i * y;
    }
    const long double n = s;
    const long double det = n * sii - si * si;
    const long double b = (n * siy - si * sy) / det;
    const long double a = (sy - b * si) / n;
    std::vector<long double> r(s);
    for (std::size_t i = 1; i <= s; ++i) r[i - 1] = X[first + i] - (a + b * i);
    return r;
}

// Box offsets (the index before the first element) of the 2*T_s boxes:
// forward X(s(j-1) + i), backward X(T - s(j - T_s) + i).
inline std::vector<std::size_t> box_offsets(std::size_t T, std::size_t s) {
    const std::size_t Ts = T / s;
    std::vector<std::size_t> off;
    for (std::size_t j = 1; j <= Ts; ++j) off.push_back(s * (j - 1));
    for (std::size_t j = Ts + 1; j <= 2 * Ts; ++j) off.push_back(T - s * (j - Ts));
    return off;
}

inline double dcca_covariance(const std::vector<double>& x, const std::vector<double>& y, std::size_t s) {
    const auto X = profile(x);
    const auto Y = profile(y);
    const auto offsets = box_offsets(x.size(), s);
    long double total = 0.0L;
    for (std::size_t off : offsets) {
        const auto rx = line_residuals(X, off, s);
        const auto ry = line_residuals(Y, off, s);
        long double f2 = 0.0L;
        for (std::size_t i = 0; i < s; ++i) f2 += rx[i] * ry[i];
        total += f2 / s;
    }
    return static_cast<double>(total / offsets.size());
}

inline double dfa_fluctuation(const std::vector<double>& x, std::size_t s) {
    return std::sqrt(dcca_covariance(x, x, s));
}

inline double dmca_covariance(const std::vector<double>& x, const std::vector<double>& y,
                              std::size_t lambda) {
    const auto X = profile(x);
    const auto Y = profile(y);
    const std::size_t T = x.size();
    const std::size_t h = (lambda - 1) / 2;
    long double total = 0.0L;
    std::size_t count = 0;
    for (std::size_t t = (lambda + 1) / 2; t <= T - h; ++t) {
        long double mx = 0, my = 0;
        for (std::size_t k = t - h; k <= t + h; ++k) {
            mx += X[k];
            my += Y[k];
        }
        mx /= lambda;
        my /= lambda;
        total += (X[t] - mx) * (Y[t] - my);
        ++count;
    }
    return static_cast<double>(total / count);
}

inline std::vector<double> random_series(std::size_t n, unsigned seed, double scale = 1.0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal(0.0, scale);
    std::vector<double> v(n);
    for (auto& e : v) e = normal(rng);
    return v;
}

}  // namespace oracle
