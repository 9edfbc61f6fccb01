#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lrdkit/detail/boxes.hpp"
#include "lrdkit/detail/regression.hpp"
#include "lrdkit/error.hpp"
#include "lrdkit/series.hpp"

namespace lrdkit {

/// F(s) over a set of scales, with the number of boxes (2 T_s) behind each.
struct FluctuationFunction {
    std::vector<std::size_t> scales;
    std::vector<double> values;
    std::vector<std::size_t> boxes_per_scale;
};

struct HurstEstimate {
    double h = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    /// Scales that entered the fit (zero fluctuations are dropped).
    FluctuationFunction scales_used;
};

namespace detail {

// Mean of F^2(j, s) over forward and backward boxes of an existing profile.
inline double dfa_mean_square(std::span<const double> profile, std::size_t scale) {
    const std::size_t n = profile.size();
    const std::size_t boxes = n / scale;
    double acc = 0.0;
    for (std::size_t j = 0; j < boxes; ++j) {
        acc += box_residual_variance(profile, forward_box_start(j, scale), scale);
    }
    for (std::size_t j = 0; j < boxes; ++j) {
        acc += box_residual_variance(profile, backward_box_start(j, scale, n), scale);
    }
    return acc / static_cast<double>(2 * boxes);
}

}  // namespace detail

/// DFA-1 fluctuation F(s): root mean squared residual of box-wise linear
/// fits to the profile over 2 floor(T/s) boxes (from both ends).
inline double dfa_fluctuation(std::span<const double> series, std::size_t scale) {
    detail::require_series(series, 2, "dfa_fluctuation");
    detail::require_box_scale(series.size(), scale, "dfa_fluctuation");
    const auto profile = build_profile(series);
    return std::sqrt(detail::dfa_mean_square(profile.values, scale));
}

inline FluctuationFunction dfa_fluctuation_function(std::span<const double> series,
                                                    std::span<const std::size_t> scales) {
    detail::require_series(series, 2, "dfa_fluctuation_function");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        detail::require_box_scale(series.size(), scales[i], "dfa_fluctuation_function");
        if (i > 0 && scales[i] <= scales[i - 1]) {
            throw InvalidInput("dfa_fluctuation_function: scales must be strictly increasing");
        }
    }
    const auto profile = build_profile(series);
    FluctuationFunction out;
    out.scales.assign(scales.begin(), scales.end());
    out.values.reserve(scales.size());
    out.boxes_per_scale.reserve(scales.size());
    for (std::size_t s : scales) {
        out.values.push_back(std::sqrt(detail::dfa_mean_square(profile.values, s)));
        out.boxes_per_scale.push_back(2 * (series.size() / s));
    }
    return out;
}

/// Integer scales floor(10^e) for e = log10(s_min), log10(s_min) + 0.1, ...
/// up to log10(s_max), de-duplicated.
inline std::vector<std::size_t> dfa_scale_grid(std::size_t s_min, std::size_t s_max) {
    if (s_min == 0 || s_max < s_min) throw InvalidInput("dfa_scale_grid: need 0 < s_min <= s_max");
    std::vector<std::size_t> grid;
    const double e0 = std::log10(static_cast<double>(s_min));
    const double e_max = std::log10(static_cast<double>(s_max)) + 1e-12;
    for (int k = 0;; ++k) {
        const double e = e0 + 0.1 * k;
        if (e > e_max) break;
        // 10^(1 + 0.1*10) may land a hair below 100; nudge before flooring.
        const auto s = static_cast<std::size_t>(std::floor(std::pow(10.0, e) * (1.0 + 1e-12)));
        if (s > s_max) break;
        if (grid.empty() || s > grid.back()) grid.push_back(s);
    }
    return grid;
}

/// Hurst exponent as the OLS slope of log10 F(s) on log10 s over the
/// 0.1-decade scale grid. `s_max = 0` selects min(500, floor(T/5)).
inline HurstEstimate dfa_hurst(std::span<const double> series, std::size_t s_min = 10,
                               std::size_t s_max = 0) {
    detail::require_series(series, 2, "dfa_hurst");
    const std::size_t n = series.size();
    if (n < 5 * s_min) {
        throw InvalidInput("dfa_hurst: series length " + std::to_string(n) + " < 5 * s_min");
    }
    if (s_max == 0) s_max = std::min<std::size_t>(500, n / 5);
    const auto grid = dfa_scale_grid(s_min, s_max);
    if (grid.size() < 5) {
        throw InvalidInput("dfa_hurst: only " + std::to_string(grid.size()) +
                           " scales in [s_min, s_max], need >= 5");
    }
    const auto fluct = dfa_fluctuation_function(series, grid);

    HurstEstimate est;
    std::vector<double> log_s, log_f;
    for (std::size_t i = 0; i < fluct.scales.size(); ++i) {
        if (!(fluct.values[i] > 0.0)) continue;
        est.scales_used.scales.push_back(fluct.scales[i]);
        est.scales_used.values.push_back(fluct.values[i]);
        est.scales_used.boxes_per_scale.push_back(fluct.boxes_per_scale[i]);
        log_s.push_back(std::log10(static_cast<double>(fluct.scales[i])));
        log_f.push_back(std::log10(fluct.values[i]));
    }
    if (log_s.size() < 5) {
        throw DegenerateScale("dfa_hurst: only " + std::to_string(log_s.size()) +
                              " scales with nonzero fluctuation, need >= 5");
    }
    const auto fit = detail::ols_line(log_s, log_f);
    est.h = fit.slope;
    est.intercept = fit.intercept;
    est.r_squared = fit.r_squared;
    return est;
}

}  // namespace lrdkit
