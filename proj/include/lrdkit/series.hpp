#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lrdkit/date.hpp"
#include "lrdkit/error.hpp"

namespace lrdkit {

/// A labelled sequence of real observations, optionally dated.
///
/// Analysis kernels take `std::span<const double>`; a TimeSeries converts
/// implicitly so either can be passed.
struct TimeSeries {
    std::vector<double> values;
    std::string label;
    std::optional<std::vector<Date>> dates;

    TimeSeries() = default;
    explicit TimeSeries(std::vector<double> v, std::string l = {},
                        std::optional<std::vector<Date>> d = std::nullopt)
        : values(std::move(v)), label(std::move(l)), dates(std::move(d)) {}

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] std::span<const double> view() const noexcept { return values; }
    operator std::span<const double>() const noexcept { return values; }  // NOLINT

    /// Throws InvalidInput if values are non-finite, dates mismatch in length
    /// or are not strictly increasing.
    void validate() const {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(values[i])) {
                throw InvalidInput("series '" + label + "' has a non-finite value at index " +
                                   std::to_string(i));
            }
        }
        if (dates) {
            if (dates->size() != values.size()) {
                throw InvalidInput("series '" + label + "' has " + std::to_string(dates->size()) +
                                   " dates for " + std::to_string(values.size()) + " values");
            }
            for (std::size_t i = 1; i < dates->size(); ++i) {
                if (!((*dates)[i - 1] < (*dates)[i])) {
                    throw InvalidInput("series '" + label + "' dates not strictly increasing at " +
                                       format_iso_date((*dates)[i]));
                }
            }
        }
    }
};

namespace detail {

inline void require_series(std::span<const double> x, std::size_t min_length, const char* op) {
    if (x.size() < min_length) {
        throw InvalidInput(std::string(op) + ": series length " + std::to_string(x.size()) +
                           " < " + std::to_string(min_length));
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw InvalidInput(std::string(op) + ": non-finite value in series");
    }
}

inline double mean(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

// Population variance (divisor n), two-pass.
inline double population_variance(std::span<const double> x) {
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size());
}

}  // namespace detail

/// Cumulative sum of mean-centred observations, X(t) = sum_{i<=t}(x_i - mean).
struct Profile {
    std::vector<double> values;
    double source_mean = 0.0;
};

inline Profile build_profile(std::span<const double> series) {
    detail::require_series(series, 2, "build_profile");
    Profile p;
    p.source_mean = detail::mean(series);
    p.values.resize(series.size());
    double acc = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        acc += series[t] - p.source_mean;
        p.values[t] = acc;
    }
    return p;
}

/// Sample autocovariance at lag k with divisor T for every lag.
inline double autocovariance(std::span<const double> series, std::size_t k) {
    detail::require_series(series, 2, "autocovariance");
    const std::size_t n = series.size();
    if (k >= n) {
        throw InvalidInput("autocovariance: lag " + std::to_string(k) + " >= length " +
                           std::to_string(n));
    }
    const double m = detail::mean(series);
    double acc = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) acc += (series[t] - m) * (series[t + k] - m);
    return acc / static_cast<double>(n);
}

/// Autocovariances at lags 0..max_lag, sharing one centring pass.
inline std::vector<double> autocovariances(std::span<const double> series, std::size_t max_lag) {
    detail::require_series(series, 2, "autocovariances");
    const std::size_t n = series.size();
    if (max_lag >= n) throw InvalidInput("autocovariances: max lag >= length");
    const double m = detail::mean(series);
    std::vector<double> c(n);
    for (std::size_t t = 0; t < n; ++t) c[t] = series[t] - m;
    std::vector<double> gamma(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) acc += c[t] * c[t + k];
        gamma[k] = acc / static_cast<double>(n);
    }
    return gamma;
}

/// Bartlett-kernel HAC (long-run) variance S^2 with bandwidth q.
struct HacVariance {
    double s_squared = 0.0;
    std::size_t q = 0;
    double gamma0 = 0.0;
};

inline HacVariance hac_variance(std::span<const double> series, std::size_t q) {
    detail::require_series(series, 2, "hac_variance");
    if (q >= series.size()) {
        throw InvalidInput("hac_variance: bandwidth q=" + std::to_string(q) + " >= length " +
                           std::to_string(series.size()));
    }
    const auto gamma = autocovariances(series, q);
    double correction = 0.0;
    for (std::size_t k = 1; k <= q; ++k) {
        const double w = 1.0 - static_cast<double>(k) / static_cast<double>(q + 1);
        correction += w * gamma[k];
    }
    HacVariance out{gamma[0] + 2.0 * correction, q, gamma[0]};
    if (q == 0) out.s_squared = gamma[0];
    if (!(out.s_squared > 0.0)) {
        throw DegenerateVariance("hac_variance: S^2 = " + std::to_string(out.s_squared) +
                                 " is not positive (q=" + std::to_string(q) + ")");
    }
    return out;
}

/// Lo's automatic bandwidth for a series of the given length and lag-1
/// autocorrelation, clamped to length-1.
inline std::size_t lo_bandwidth(std::size_t length, double rho1) {
    if (length < 2) throw InvalidInput("lo_bandwidth: length < 2");
    if (!std::isfinite(rho1) || std::abs(rho1) >= 1.0) {
        throw InvalidInput("lo_bandwidth: |rho(1)| must be < 1");
    }
    const double a = 2.0 * std::abs(rho1) / (1.0 - rho1 * rho1);
    const double q = std::cbrt(1.5 * static_cast<double>(length)) * std::cbrt(a * a);
    const auto q_floor = static_cast<std::size_t>(std::floor(q));
    return std::min(q_floor, length - 1);
}

/// Lag-1 autocorrelation gamma(1)/gamma(0).
inline double lag1_autocorrelation(std::span<const double> series) {
    const auto gamma = autocovariances(series, 1);
    if (!(gamma[0] > 0.0)) throw DegenerateVariance("lag1_autocorrelation: zero variance");
    return gamma[1] / gamma[0];
}

inline std::size_t optimal_q(std::span<const double> series) {
    detail::require_series(series, 2, "optimal_q");
    return lo_bandwidth(series.size(), lag1_autocorrelation(series));
}

}  // namespace lrdkit
