#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "lrdkit/error.hpp"
#include "lrdkit/parallel.hpp"
#include "lrdkit/series.hpp"

namespace lrdkit {

enum class LrdTestKind { RescaledRange, RescaledVariance };

inline const char* to_string(LrdTestKind kind) noexcept {
    return kind == LrdTestKind::RescaledRange ? "RescaledRange" : "RescaledVariance";
}

struct LrdTestResult {
    double statistic = 0.0;
    std::size_t q_used = 0;
    double p_value = 1.0;
    std::size_t n_surrogates = 0;
    std::size_t block_size = 0;
    LrdTestKind test_kind = LrdTestKind::RescaledRange;
    std::size_t redraws = 0;
};

/// Modified rescaled range V_T = R / (S sqrt(T)). R is the range of the
/// profile over t = 1..T and S^2 the Bartlett HAC variance at bandwidth q.
inline double rescaled_range_stat(std::span<const double> series, std::size_t q) {
    const auto hac = hac_variance(series, q);
    const auto profile = build_profile(series);
    const auto [lo, hi] = std::minmax_element(profile.values.begin(), profile.values.end());
    const double range = *hi - *lo;
    return range / (std::sqrt(hac.s_squared) * std::sqrt(static_cast<double>(series.size())));
}

/// Rescaled variance M_T = var(X) / (T S^2), var(X) the population variance
/// of the profile.
inline double rescaled_variance_stat(std::span<const double> series, std::size_t q) {
    const auto hac = hac_variance(series, q);
    const auto profile = build_profile(series);
    const double var_profile = detail::population_variance(profile.values);
    return var_profile / (static_cast<double>(series.size()) * hac.s_squared);
}

inline double lrd_statistic(std::span<const double> series, std::size_t q, LrdTestKind kind) {
    return kind == LrdTestKind::RescaledRange ? rescaled_range_stat(series, q)
                                              : rescaled_variance_stat(series, q);
}

struct BootstrapConfig {
    std::size_t block_size = 25;
    std::size_t n_surrogates = 1000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

/// Permutes the floor(T/block) leading non-overlapping blocks of `series`;
/// the T mod block trailing observations stay in place.
template <std::uniform_random_bit_generator G>
std::vector<double> block_shuffle(std::span<const double> series, std::size_t block_size, G& rng) {
    if (block_size == 0) throw InvalidInput("block_shuffle: block size must be positive");
    const std::size_t n_blocks = series.size() / block_size;
    std::vector<std::size_t> order(n_blocks);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> out;
    out.reserve(series.size());
    for (std::size_t b : order) {
        const auto first = series.begin() + static_cast<std::ptrdiff_t>(b * block_size);
        out.insert(out.end(), first, first + static_cast<std::ptrdiff_t>(block_size));
    }
    out.insert(out.end(), series.begin() + static_cast<std::ptrdiff_t>(n_blocks * block_size),
               series.end());
    return out;
}

namespace detail {

struct StatPair {
    double rescaled_range;
    double rescaled_variance;
};

// Both statistics from one HAC and one profile evaluation.
inline StatPair lrd_statistics(std::span<const double> series, std::size_t q) {
    const auto hac = hac_variance(series, q);
    const auto profile = build_profile(series);
    const auto [lo, hi] = std::minmax_element(profile.values.begin(), profile.values.end());
    const double t = static_cast<double>(series.size());
    return {(*hi - *lo) / (std::sqrt(hac.s_squared) * std::sqrt(t)),
            population_variance(profile.values) / (t * hac.s_squared)};
}

inline double upper_tail_p(std::span<const double> surrogate_stats, double observed) {
    const auto exceed = std::count_if(surrogate_stats.begin(), surrogate_stats.end(),
                                      [&](double s) { return s >= observed; });
    return (1.0 + static_cast<double>(exceed)) /
           (1.0 + static_cast<double>(surrogate_stats.size()));
}

}  // namespace detail

/// Both statistics computed on one shared ensemble of block-shuffled
/// surrogates. Element 0 is the rescaled range test, element 1 the
/// rescaled variance test.
///
/// q is re-selected on every surrogate. A surrogate whose HAC variance is
/// degenerate is redrawn from the same substream; more than
/// 10 * n_surrogates redraws in total aborts the test.
inline std::array<LrdTestResult, 2> block_bootstrap_tests(std::span<const double> series,
                                                          const BootstrapConfig& config = {}) {
    detail::require_series(series, 2, "block_bootstrap_test");
    if (config.block_size == 0 || config.n_surrogates == 0) {
        throw InvalidInput("block_bootstrap_test: block size and surrogate count must be positive");
    }
    if (series.size() < 2 * config.block_size) {
        throw InvalidInput("block_bootstrap_test: series length " + std::to_string(series.size()) +
                           " < 2 * block size " + std::to_string(config.block_size));
    }
    const std::size_t q_obs = optimal_q(series);
    const auto observed = detail::lrd_statistics(series, q_obs);
    const double v_obs = observed.rescaled_range;
    const double m_obs = observed.rescaled_variance;

    const std::size_t n = config.n_surrogates;
    const std::size_t max_redraws = 10 * n;
    std::vector<double> v_sur(n), m_sur(n);
    std::vector<std::size_t> redraws(n, 0);
    parallel_for(n, config.threads, [&](std::size_t i) {
        auto rng = substream(config.seed, i);
        for (;;) {
            const auto surrogate = block_shuffle(series, config.block_size, rng);
            try {
                const auto stats = detail::lrd_statistics(surrogate, optimal_q(surrogate));
                v_sur[i] = stats.rescaled_range;
                m_sur[i] = stats.rescaled_variance;
                return;
            } catch (const DegenerateVariance&) {
                if (++redraws[i] > max_redraws) break;
            } catch (const InvalidInput&) {
                if (++redraws[i] > max_redraws) break;
            }
        }
    });
    const std::size_t total_redraws = std::accumulate(redraws.begin(), redraws.end(), std::size_t{0});
    if (total_redraws > max_redraws) {
        throw Aborted("block_bootstrap_test: " + std::to_string(total_redraws) +
                      " degenerate surrogates exceed the redraw budget");
    }

    std::array<LrdTestResult, 2> out;
    out[0] = {v_obs, q_obs, detail::upper_tail_p(v_sur, v_obs), n, config.block_size,
              LrdTestKind::RescaledRange, total_redraws};
    out[1] = {m_obs, q_obs, detail::upper_tail_p(m_sur, m_obs), n, config.block_size,
              LrdTestKind::RescaledVariance, total_redraws};
    return out;
}

/// Moving-block bootstrap test of one statistic; one-sided upper tail,
/// p = (1 + #{surrogate >= observed}) / (1 + n).
inline LrdTestResult block_bootstrap_test(std::span<const double> series, LrdTestKind kind,
                                          const BootstrapConfig& config = {}) {
    const auto both = block_bootstrap_tests(series, config);
    return both[kind == LrdTestKind::RescaledRange ? 0 : 1];
}

}  // namespace lrdkit
