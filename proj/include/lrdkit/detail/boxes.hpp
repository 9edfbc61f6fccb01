#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>

#include "lrdkit/error.hpp"

// Box-wise linear detrending shared by DFA and DCCA.
//
// A scale s splits a profile of length T into T_s = floor(T/s) boxes taken
// from the start and T_s boxes taken from the end, 2 T_s in total. Inside
// each box the profile is regressed on position i = 1..s and the residuals
// are used. With centred position u_i = i - (s+1)/2, sum u_i^2 = s(s^2-1)/12,
// the residual cross-product of two profiles is
//   sum r_x r_y = S_xy - S_ux S_uy / S_uu
// where S_* are sums of centred products inside the box.

namespace lrdkit::detail {

inline void require_box_scale(std::size_t length, std::size_t scale, const char* op) {
    if (scale < 4 || 2 * scale > length) {
        throw InvalidInput(std::string(op) + ": scale " + std::to_string(scale) +
                           " outside [4, T/2] for T=" + std::to_string(length));
    }
}

inline std::size_t forward_box_start(std::size_t j, std::size_t scale) { return j * scale; }

inline std::size_t backward_box_start(std::size_t j, std::size_t scale, std::size_t length) {
    return length - (j + 1) * scale;
}

inline double centred_position_ss(std::size_t scale) {
    const auto s = static_cast<double>(scale);
    return s * (s * s - 1.0) / 12.0;
}

// Mean squared residual of a linear fit to x[start, start+scale).
inline double box_residual_variance(std::span<const double> x, std::size_t start,
                                    std::size_t scale) {
    const auto s = static_cast<double>(scale);
    const double* p = x.data() + start;
    double mean = 0.0;
    for (std::size_t i = 0; i < scale; ++i) mean += p[i];
    mean /= s;
    const double u0 = (s + 1.0) / 2.0;
    double sxx = 0.0, sux = 0.0;
    for (std::size_t i = 0; i < scale; ++i) {
        const double d = p[i] - mean;
        sxx += d * d;
        sux += (static_cast<double>(i + 1) - u0) * d;
    }
    return std::max(0.0, sxx - sux * sux / centred_position_ss(scale)) / s;
}

struct BoxMoments {
    double xx = 0.0;
    double yy = 0.0;
    double xy = 0.0;
};

// Mean residual products (xx, yy, xy) of linear fits to two profiles over
// the same box.
inline BoxMoments box_residual_moments(std::span<const double> x, std::span<const double> y,
                                       std::size_t start, std::size_t scale) {
    const auto s = static_cast<double>(scale);
    const double* px = x.data() + start;
    const double* py = y.data() + start;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < scale; ++i) {
        mx += px[i];
        my += py[i];
    }
    mx /= s;
    my /= s;
    const double u0 = (s + 1.0) / 2.0;
    double sxx = 0.0, syy = 0.0, sxy = 0.0, sux = 0.0, suy = 0.0;
    for (std::size_t i = 0; i < scale; ++i) {
        const double u = static_cast<double>(i + 1) - u0;
        const double dx = px[i] - mx;
        const double dy = py[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
        sux += u * dx;
        suy += u * dy;
    }
    const double suu = centred_position_ss(scale);
    return {std::max(0.0, sxx - sux * sux / suu) / s, std::max(0.0, syy - suy * suy / suu) / s,
            (sxy - sux * suy / suu) / s};
}

}  // namespace lrdkit::detail
