#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrdkit/detail/boxes.hpp"
#include "lrdkit/error.hpp"
#include "lrdkit/series.hpp"

namespace lrdkit {

enum class XcorrMethod { DCCA, DMCA };

inline const char* to_string(XcorrMethod m) noexcept {
    return m == XcorrMethod::DCCA ? "DCCA" : "DMCA";
}

/// Per-scale cross-correlation coefficients. For DMCA the scales are the
/// (odd) moving-average window lengths.
struct ScaleCorrelogram {
    XcorrMethod method = XcorrMethod::DCCA;
    std::vector<std::size_t> scales;
    std::vector<double> rho;
    /// Present once surrogate significance has been attached.
    std::optional<std::vector<double>> p_values;
    /// Scales where a fluctuation vanished; rho is reported as 0 there.
    std::vector<bool> degenerate;
    /// Grid-average rho of every surrogate pair (empty without surrogates).
    std::vector<double> surrogate_mean_rho;
};

/// Scales 10, 20, ..., 250.
inline std::vector<std::size_t> dcca_default_grid() {
    std::vector<std::size_t> g;
    for (std::size_t s = 10; s <= 250; s += 10) g.push_back(s);
    return g;
}

/// Windows 11, 21, ..., 251.
inline std::vector<std::size_t> dmca_default_grid() {
    std::vector<std::size_t> g;
    for (std::size_t s = 11; s <= 251; s += 10) g.push_back(s);
    return g;
}

inline std::vector<std::size_t> default_grid(XcorrMethod m) {
    return m == XcorrMethod::DCCA ? dcca_default_grid() : dmca_default_grid();
}

/// Detrended second moments of a pair at one scale: the two detrended
/// variances and the detrended covariance.
struct DetrendedMoments {
    double xx = 0.0;
    double yy = 0.0;
    double xy = 0.0;
};

namespace detail {

inline void require_pair(std::span<const double> x, std::span<const double> y, const char* op) {
    require_series(x, 2, op);
    require_series(y, 2, op);
    if (x.size() != y.size()) {
        throw InvalidInput(std::string(op) + ": length mismatch " + std::to_string(x.size()) +
                           " vs " + std::to_string(y.size()));
    }
}

inline void require_dmca_window(std::size_t length, std::size_t window, const char* op) {
    if (window % 2 == 0) {
        throw InvalidInput(std::string(op) + ": window " + std::to_string(window) + " is even");
    }
    if (window < 3 || 2 * window > length) {
        throw InvalidInput(std::string(op) + ": window " + std::to_string(window) +
                           " outside [3, T/2] for T=" + std::to_string(length));
    }
}

inline DetrendedMoments dcca_moments_on_profiles(std::span<const double> px,
                                                 std::span<const double> py, std::size_t scale) {
    const std::size_t n = px.size();
    const std::size_t boxes = n / scale;
    DetrendedMoments acc;
    auto add = [&](std::size_t start) {
        const auto m = box_residual_moments(px, py, start, scale);
        acc.xx += m.xx;
        acc.yy += m.yy;
        acc.xy += m.xy;
    };
    for (std::size_t j = 0; j < boxes; ++j) add(forward_box_start(j, scale));
    for (std::size_t j = 0; j < boxes; ++j) add(backward_box_start(j, scale, n));
    const auto denom = static_cast<double>(2 * boxes);
    return {acc.xx / denom, acc.yy / denom, acc.xy / denom};
}

// Residuals Z(t) - CMA(Z)(t) of both profiles for every t where the
// centred window of odd length `window` fits, accumulated into mean
// products. The running window sums are recomputed from scratch every
// `window` steps to bound drift.
inline DetrendedMoments dmca_moments_on_profiles(std::span<const double> px,
                                                 std::span<const double> py, std::size_t window) {
    const std::size_t n = px.size();
    const std::size_t half = (window - 1) / 2;
    const double inv_w = 1.0 / static_cast<double>(window);
    double sum_x = 0.0, sum_y = 0.0;
    DetrendedMoments m;
    std::size_t since_refresh = window;
    for (std::size_t t = half; t + half < n; ++t) {
        if (since_refresh == window) {
            sum_x = 0.0;
            sum_y = 0.0;
            for (std::size_t k = t - half; k <= t + half; ++k) {
                sum_x += px[k];
                sum_y += py[k];
            }
            since_refresh = 0;
        } else {
            sum_x += px[t + half] - px[t - half - 1];
            sum_y += py[t + half] - py[t - half - 1];
        }
        ++since_refresh;
        const double rx = px[t] - sum_x * inv_w;
        const double ry = py[t] - sum_y * inv_w;
        m.xx += rx * rx;
        m.yy += ry * ry;
        m.xy += rx * ry;
    }
    const auto count = static_cast<double>(n - 2 * half);
    return {m.xx / count, m.yy / count, m.xy / count};
}

inline double coefficient_from(const DetrendedMoments& m, const char* op, std::size_t scale) {
    if (!(m.xx > 0.0) || !(m.yy > 0.0)) {
        throw DegenerateScale(std::string(op) + ": zero detrended variance at scale " +
                              std::to_string(scale));
    }
    return std::clamp(m.xy / std::sqrt(m.xx * m.yy), -1.0, 1.0);
}

inline DetrendedMoments moments_on_profiles(XcorrMethod method, std::span<const double> px,
                                            std::span<const double> py, std::size_t scale) {
    return method == XcorrMethod::DCCA ? dcca_moments_on_profiles(px, py, scale)
                                       : dmca_moments_on_profiles(px, py, scale);
}

inline void require_grid(XcorrMethod method, std::size_t length,
                         std::span<const std::size_t> grid) {
    if (grid.empty()) throw InvalidInput("scan_scales: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0 && grid[i] <= grid[i - 1]) {
            throw InvalidInput("scan_scales: grid must be strictly increasing");
        }
        if (method == XcorrMethod::DCCA) {
            require_box_scale(length, grid[i], "scan_scales");
        } else {
            require_dmca_window(length, grid[i], "scan_scales");
        }
    }
}

}  // namespace detail

/// Detrended covariance F^2_DCCA(s) of the two profiles over the same
/// 2 T_s box scheme as DFA. May be negative.
inline double dcca_covariance(std::span<const double> x, std::span<const double> y,
                              std::size_t scale) {
    detail::require_pair(x, y, "dcca_covariance");
    detail::require_box_scale(x.size(), scale, "dcca_covariance");
    const auto px = build_profile(x);
    const auto py = build_profile(y);
    return detail::dcca_moments_on_profiles(px.values, py.values, scale).xy;
}

inline DetrendedMoments dcca_moments(std::span<const double> x, std::span<const double> y,
                                     std::size_t scale) {
    detail::require_pair(x, y, "dcca_moments");
    detail::require_box_scale(x.size(), scale, "dcca_moments");
    const auto px = build_profile(x);
    const auto py = build_profile(y);
    return detail::dcca_moments_on_profiles(px.values, py.values, scale);
}

/// rho_DCCA(s) = F^2_DCCA / (F_DFA,x F_DFA,y).
inline double dcca_coefficient(std::span<const double> x, std::span<const double> y,
                               std::size_t scale) {
    return detail::coefficient_from(dcca_moments(x, y, scale), "dcca_coefficient", scale);
}

/// Mean product of the profiles' residuals from a centred moving average
/// of odd length `window`, over t = (window+1)/2 .. T-(window-1)/2.
inline double dmca_covariance(std::span<const double> x, std::span<const double> y,
                              std::size_t window) {
    detail::require_pair(x, y, "dmca_covariance");
    detail::require_dmca_window(x.size(), window, "dmca_covariance");
    const auto px = build_profile(x);
    const auto py = build_profile(y);
    return detail::dmca_moments_on_profiles(px.values, py.values, window).xy;
}

inline DetrendedMoments dmca_moments(std::span<const double> x, std::span<const double> y,
                                     std::size_t window) {
    detail::require_pair(x, y, "dmca_moments");
    detail::require_dmca_window(x.size(), window, "dmca_moments");
    const auto px = build_profile(x);
    const auto py = build_profile(y);
    return detail::dmca_moments_on_profiles(px.values, py.values, window);
}

inline double dmca_coefficient(std::span<const double> x, std::span<const double> y,
                               std::size_t window) {
    return detail::coefficient_from(dmca_moments(x, y, window), "dmca_coefficient", window);
}

/// Coefficient at every grid scale. Errors at any scale propagate.
inline ScaleCorrelogram scan_scales(std::span<const double> x, std::span<const double> y,
                                    XcorrMethod method, std::span<const std::size_t> grid) {
    detail::require_pair(x, y, "scan_scales");
    detail::require_grid(method, x.size(), grid);
    const auto px = build_profile(x);
    const auto py = build_profile(y);
    ScaleCorrelogram out;
    out.method = method;
    out.scales.assign(grid.begin(), grid.end());
    out.degenerate.assign(grid.size(), false);
    for (std::size_t s : grid) {
        out.rho.push_back(detail::coefficient_from(
            detail::moments_on_profiles(method, px.values, py.values, s), "scan_scales", s));
    }
    return out;
}

inline ScaleCorrelogram scan_scales(std::span<const double> x, std::span<const double> y,
                                    XcorrMethod method) {
    const auto grid = default_grid(method);
    return scan_scales(x, y, method, grid);
}

}  // namespace lrdkit
