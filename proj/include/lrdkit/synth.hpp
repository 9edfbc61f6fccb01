#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lrdkit/detail/fft.hpp"
#include "lrdkit/error.hpp"
#include "lrdkit/parallel.hpp"
#include "lrdkit/series.hpp"

namespace lrdkit {

/// Fractional Gaussian noise parameters.
struct FgnSpec {
    double h = 0.5;
    std::size_t length = 0;
    std::uint64_t seed = 0;
    double sigma = 1.0;
};

/// Closed-form fGn autocovariance (sigma^2/2)(|k+1|^2H - 2|k|^2H + |k-1|^2H).
inline double fgn_autocovariance(double h, std::size_t lag, double sigma = 1.0) {
    const double k = static_cast<double>(lag);
    const double two_h = 2.0 * h;
    return 0.5 * sigma * sigma *
           (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) + std::pow(std::abs(k - 1.0), two_h));
}

namespace detail {

inline void validate_fgn(double h, std::size_t length, double sigma) {
    if (!(h > 0.0 && h < 1.0)) throw InvalidInput("fGn: H must lie strictly inside (0, 1)");
    if (length < 16) throw InvalidInput("fGn: length must be >= 16");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidInput("fGn: sigma must be positive");
}

// Eigenvalues of the 2N circulant embedding of the fGn covariance,
// scaled for direct use as sqrt-weights: lambda_k / M at the real bins
// (k = 0, M/2), lambda_k / (2M) elsewhere.
inline std::vector<double> fgn_embedding_weights(double h, std::size_t length, double sigma) {
    const std::size_t m = 2 * length;
    auto& fft = thread_fft(m);
    auto row = fft.real();
    for (std::size_t j = 0; j <= length; ++j) row[j] = fgn_autocovariance(h, j, sigma);
    for (std::size_t j = length + 1; j < m; ++j) row[j] = row[m - j];
    fft.forward();
    const auto spec = fft.spectrum();
    double lambda_max = 0.0;
    for (const auto& c : spec) lambda_max = std::max(lambda_max, c.real());
    std::vector<double> weights(spec.size());
    bool clipped = false;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        double lambda = spec[k].real();
        if (lambda < 0.0) {
            if (-lambda >= 1e-8 * sigma * sigma) {
                throw Aborted("fGn: circulant embedding eigenvalue " + std::to_string(lambda) +
                              " is negative");
            }
            lambda = 0.0;
            clipped = true;
        }
        const bool real_bin = (k == 0 || k == m / 2);
        weights[k] = std::sqrt(lambda / (real_bin ? static_cast<double>(m) : 2.0 * static_cast<double>(m)));
    }
    if (clipped) std::clog << "warning: fGn embedding eigenvalues clipped at zero\n";
    return weights;
}

// Complex standard Gaussian driver for every half-spectrum bin.
inline std::vector<std::complex<double>> gaussian_driver(std::size_t bins, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::complex<double>> z(bins);
    for (auto& c : z) {
        const double re = normal(rng);
        const double im = normal(rng);
        c = {re, im};
    }
    return z;
}

inline std::vector<double> color_driver(std::span<const double> weights,
                                        std::span<const std::complex<double>> driver,
                                        std::size_t length) {
    const std::size_t m = 2 * length;
    auto& fft = thread_fft(m);
    auto spec = fft.spectrum();
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const bool real_bin = (k == 0 || k == m / 2);
        spec[k] = real_bin ? std::complex<double>(weights[k] * driver[k].real(), 0.0)
                           : weights[k] * driver[k];
    }
    fft.inverse();
    const auto out = fft.real();
    return {out.begin(), out.begin() + static_cast<std::ptrdiff_t>(length)};
}

}  // namespace detail

/// Exact fractional Gaussian noise by circulant embedding (Davies-Harte).
inline TimeSeries generate_fgn(const FgnSpec& spec) {
    detail::validate_fgn(spec.h, spec.length, spec.sigma);
    const auto weights = detail::fgn_embedding_weights(spec.h, spec.length, spec.sigma);
    auto rng = substream(spec.seed, 0, 0x66476e);
    const auto driver = detail::gaussian_driver(weights.size(), rng);
    return TimeSeries(detail::color_driver(weights, driver, spec.length),
                      "fgn_h" + std::to_string(spec.h));
}

/// Two fGn series whose Gaussian drivers have instantaneous correlation
/// rho: y-driver = rho * x-driver + sqrt(1 - rho^2) * independent driver.
/// Each driver is then coloured to its own Hurst exponent, so the colored
/// series carry correlation rho exactly only when h1 == h2.
inline std::pair<TimeSeries, TimeSeries> generate_correlated_pair(double h1, double h2, double rho,
                                                                  std::size_t length,
                                                                  std::uint64_t seed,
                                                                  double sigma = 1.0) {
    detail::validate_fgn(h1, length, sigma);
    detail::validate_fgn(h2, length, sigma);
    if (!(rho >= -1.0 && rho <= 1.0)) throw InvalidInput("correlated pair: rho must be in [-1, 1]");
    const auto w1 = detail::fgn_embedding_weights(h1, length, sigma);
    const auto w2 = detail::fgn_embedding_weights(h2, length, sigma);
    auto rng = substream(seed, 0, 0x70616972);
    const auto z1 = detail::gaussian_driver(w1.size(), rng);
    const auto z2 = detail::gaussian_driver(w1.size(), rng);
    const double mix = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    std::vector<std::complex<double>> zy(z1.size());
    for (std::size_t k = 0; k < z1.size(); ++k) zy[k] = rho * z1[k] + mix * z2[k];
    return {TimeSeries(detail::color_driver(w1, z1, length), "x"),
            TimeSeries(detail::color_driver(w2, zy, length), "y")};
}

/// Independent standard Gaussian noise of the given length.
inline TimeSeries generate_white_noise(std::size_t length, std::uint64_t seed) {
    auto rng = substream(seed, 0, 0x776e);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(length);
    for (auto& x : v) x = normal(rng);
    return TimeSeries(std::move(v), "white_noise");
}

}  // namespace lrdkit
