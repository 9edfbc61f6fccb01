#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lrdkit/detail/fft.hpp"
#include "lrdkit/error.hpp"
#include "lrdkit/parallel.hpp"
#include "lrdkit/series.hpp"
#include "lrdkit/xcorr.hpp"

namespace lrdkit {

struct SurrogateConfig {
    std::size_t n_surrogates = 1000;
    std::uint64_t seed = 0;
    double significance_level = 0.10;
    unsigned threads = 0;
};

namespace detail {

// Places sorted(values) into the rank order of `pattern`; ties rank by
// position.
inline std::vector<double> rank_remap(std::span<const double> pattern,
                                      std::span<const double> sorted_values) {
    std::vector<std::pair<double, std::size_t>> keyed(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) keyed[i] = {pattern[i], i};
    std::sort(keyed.begin(), keyed.end());
    std::vector<double> out(pattern.size());
    for (std::size_t r = 0; r < keyed.size(); ++r) out[keyed[r].second] = sorted_values[r];
    return out;
}

struct TaaftStages {
    std::vector<double> gaussianized;
    std::vector<double> phase_randomized;
    std::vector<double> surrogate;
};

}  // namespace detail

/// Randomises the Fourier phases of `series` while keeping every amplitude.
/// Bins pair up with their conjugates so the result is real; for even
/// lengths the Nyquist bin keeps its modulus with a random sign.
template <std::uniform_random_bit_generator G>
std::vector<double> phase_randomize(std::span<const double> series, G& rng) {
    const std::size_t n = series.size();
    auto& fft = detail::thread_fft(n);
    std::copy(series.begin(), series.end(), fft.real().begin());
    fft.forward();
    auto spec = fft.spectrum();
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const std::size_t last_complex = (n % 2 == 0) ? n / 2 - 1 : n / 2;
    for (std::size_t k = 1; k <= last_complex; ++k) spec[k] *= std::polar(1.0, phase(rng));
    if (n % 2 == 0) {
        std::bernoulli_distribution flip(0.5);
        if (flip(rng)) spec[n / 2] = -spec[n / 2];
    }
    fft.inverse();
    std::vector<double> out(fft.real().begin(), fft.real().end());
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : out) v *= scale;
    return out;
}

/// Amplitude-adjusted Fourier transform surrogates of one series:
/// Gaussianise by rank, randomise phases, then put the original values
/// back in the rank order of the phase-randomised series. Every surrogate
/// is a permutation of the input values. The input's rank order is
/// computed once and shared by all draws.
class TaaftGenerator {
public:
    explicit TaaftGenerator(std::span<const double> series) {
        detail::require_series(series, 8, "taaft_surrogate");
        std::vector<std::pair<double, std::size_t>> keyed(series.size());
        for (std::size_t i = 0; i < series.size(); ++i) keyed[i] = {series[i], i};
        std::sort(keyed.begin(), keyed.end());
        sorted_values_.resize(series.size());
        order_.resize(series.size());
        for (std::size_t r = 0; r < keyed.size(); ++r) {
            sorted_values_[r] = keyed[r].first;
            order_[r] = keyed[r].second;
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return order_.size(); }

    template <std::uniform_random_bit_generator G>
    detail::TaaftStages stages(G& rng) const {
        const std::size_t n = size();
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> gauss(n);
        for (auto& g : gauss) g = normal(rng);
        std::sort(gauss.begin(), gauss.end());
        detail::TaaftStages st;
        st.gaussianized.resize(n);
        for (std::size_t r = 0; r < n; ++r) st.gaussianized[order_[r]] = gauss[r];
        st.phase_randomized = phase_randomize(std::span<const double>(st.gaussianized), rng);
        st.surrogate = detail::rank_remap(st.phase_randomized, sorted_values_);
        return st;
    }

    template <std::uniform_random_bit_generator G>
    std::vector<double> operator()(G& rng) const {
        return stages(rng).surrogate;
    }

private:
    std::vector<double> sorted_values_;
    std::vector<std::size_t> order_;
};

template <std::uniform_random_bit_generator G>
std::vector<double> taaft_surrogate(std::span<const double> series, G& rng) {
    return TaaftGenerator(series)(rng);
}

template <std::uniform_random_bit_generator G>
TimeSeries taaft_surrogate(const TimeSeries& series, G& rng) {
    return TimeSeries(taaft_surrogate(series.view(), rng), series.label + "_taaft", series.dates);
}

/// A method together with the scale grid it is evaluated on.
struct MethodGrid {
    XcorrMethod method;
    std::vector<std::size_t> grid;
};

namespace detail {

inline double two_sided_p(std::size_t exceed, std::size_t n) {
    return (1.0 + static_cast<double>(exceed)) / (1.0 + static_cast<double>(n));
}

inline double grid_mean(std::span<const double> v) {
    double acc = 0.0;
    for (double r : v) acc += r;
    return acc / static_cast<double>(v.size());
}

// Coefficients over a grid; degenerate scales give NaN.
inline std::vector<double> coefficients_or_nan(XcorrMethod method, std::span<const double> px,
                                               std::span<const double> py,
                                               std::span<const std::size_t> grid) {
    std::vector<double> rho(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            rho[i] = coefficient_from(moments_on_profiles(method, px, py, grid[i]), "xcorr", grid[i]);
        } catch (const DegenerateScale&) {
            rho[i] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return rho;
}

}  // namespace detail

/// Surrogate significance for several methods from one ensemble of TAAFT
/// surrogate pairs. Surrogate pair i draws x's then y's surrogate from
/// substream (seed, i), so results do not depend on the thread count.
///
/// Per-scale p-values are two-sided. A degenerate observed scale reports
/// rho = 0 and p = 1 and is flagged; a degenerate surrogate coefficient
/// counts as an exceedance and as 0 in the surrogate grid mean.
inline std::vector<ScaleCorrelogram> xcorr_significance(std::span<const double> x,
                                                        std::span<const double> y,
                                                        std::span<const MethodGrid> methods,
                                                        const SurrogateConfig& config = {}) {
    detail::require_pair(x, y, "xcorr_significance");
    detail::require_series(x, 8, "xcorr_significance");
    if (config.n_surrogates == 0) throw InvalidInput("xcorr_significance: no surrogates requested");
    for (const auto& mg : methods) detail::require_grid(mg.method, x.size(), mg.grid);

    const auto px = build_profile(x);
    const auto py = build_profile(y);
    std::vector<ScaleCorrelogram> out;
    for (const auto& mg : methods) {
        ScaleCorrelogram c;
        c.method = mg.method;
        c.scales = mg.grid;
        c.rho = detail::coefficients_or_nan(mg.method, px.values, py.values, mg.grid);
        c.degenerate.resize(c.rho.size());
        for (std::size_t i = 0; i < c.rho.size(); ++i) {
            c.degenerate[i] = std::isnan(c.rho[i]);
            if (c.degenerate[i]) c.rho[i] = 0.0;
        }
        out.push_back(std::move(c));
    }

    const std::size_t n = config.n_surrogates;
    // surrogate_rho[m][i] holds the grid of coefficients of pair i.
    std::vector<std::vector<std::vector<double>>> surrogate_rho(methods.size(),
                                                                std::vector<std::vector<double>>(n));
    const TaaftGenerator gen_x(x);
    const TaaftGenerator gen_y(y);
    parallel_for(n, config.threads, [&](std::size_t i) {
        auto rng = substream(config.seed, i, 0x7461);
        const auto sx = gen_x(rng);
        const auto sy = gen_y(rng);
        const auto psx = build_profile(sx);
        const auto psy = build_profile(sy);
        for (std::size_t m = 0; m < methods.size(); ++m) {
            surrogate_rho[m][i] =
                detail::coefficients_or_nan(methods[m].method, psx.values, psy.values, methods[m].grid);
        }
    });

    for (std::size_t m = 0; m < methods.size(); ++m) {
        auto& c = out[m];
        std::vector<double> p(c.scales.size());
        for (std::size_t s = 0; s < c.scales.size(); ++s) {
            if (c.degenerate[s]) {
                p[s] = 1.0;
                continue;
            }
            const double obs = std::abs(c.rho[s]);
            std::size_t exceed = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double r = surrogate_rho[m][i][s];
                if (std::isnan(r) || std::abs(r) >= obs) ++exceed;
            }
            p[s] = detail::two_sided_p(exceed, n);
        }
        c.p_values = std::move(p);
        c.surrogate_mean_rho.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& row = surrogate_rho[m][i];
            for (auto& r : row) {
                if (std::isnan(r)) r = 0.0;
            }
            c.surrogate_mean_rho[i] = detail::grid_mean(row);
        }
    }
    return out;
}

inline ScaleCorrelogram xcorr_significance(std::span<const double> x, std::span<const double> y,
                                           XcorrMethod method, std::span<const std::size_t> grid,
                                           const SurrogateConfig& config = {}) {
    const MethodGrid mg{method, {grid.begin(), grid.end()}};
    return xcorr_significance(x, y, std::span<const MethodGrid>(&mg, 1), config).front();
}

/// Grid-average coefficient with its spread and, when the correlogram
/// carries a surrogate ensemble, a two-sided p-value for the mean.
struct AverageCoefficient {
    double mean = 0.0;
    double std_dev = 0.0;
    std::optional<double> p_value;
};

/// Mean and sample standard deviation (divisor n-1) of rho across the grid.
inline AverageCoefficient average_coefficient(const ScaleCorrelogram& c) {
    if (c.rho.empty()) throw InvalidInput("average_coefficient: empty correlogram");
    AverageCoefficient a;
    a.mean = detail::grid_mean(c.rho);
    if (c.rho.size() > 1) {
        double ss = 0.0;
        for (double r : c.rho) ss += (r - a.mean) * (r - a.mean);
        a.std_dev = std::sqrt(ss / static_cast<double>(c.rho.size() - 1));
    }
    if (!c.surrogate_mean_rho.empty()) {
        const double obs = std::abs(a.mean);
        const auto exceed = static_cast<std::size_t>(
            std::count_if(c.surrogate_mean_rho.begin(), c.surrogate_mean_rho.end(),
                          [&](double m) { return std::abs(m) >= obs; }));
        a.p_value = detail::two_sided_p(exceed, c.surrogate_mean_rho.size());
    }
    return a;
}

/// Table-style sign of a pair: '+' or '-' from the mean of the significant
/// method (the smaller p-value when both are), '0' when none is significant.
inline char correlation_sign(std::span<const AverageCoefficient> averages, double level) {
    const AverageCoefficient* best = nullptr;
    for (const auto& a : averages) {
        if (!a.p_value || *a.p_value >= level) continue;
        if (best == nullptr || *a.p_value < *best->p_value) best = &a;
    }
    if (best == nullptr) return '0';
    return best->mean >= 0.0 ? '+' : '-';
}

}  // namespace lrdkit
