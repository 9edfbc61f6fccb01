#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <span>

namespace lrdkit::detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Real <-> half-complex transform pair of fixed length n on FFTW-owned,
// SIMD-aligned buffers. forward(): real() -> spectrum() (n/2 + 1 bins);
// inverse(): spectrum() -> real(), unnormalised (scaled by n).
class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n) {
        real_ = fftw_alloc_real(n);
        spec_ = fftw_alloc_complex(n / 2 + 1);
        if (real_ == nullptr || spec_ == nullptr) {
            release_buffers();
            throw std::bad_alloc();
        }
        std::lock_guard lock(fftw_planner_mutex());
        const int len = static_cast<int>(n);
        forward_ = fftw_plan_dft_r2c_1d(len, real_, spec_, FFTW_ESTIMATE);
        inverse_ = fftw_plan_dft_c2r_1d(len, spec_, real_, FFTW_ESTIMATE);
    }

    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    ~RealFft() {
        {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(forward_);
            fftw_destroy_plan(inverse_);
        }
        release_buffers();
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::span<double> real() noexcept { return {real_, n_}; }
    [[nodiscard]] std::span<std::complex<double>> spectrum() noexcept {
        return {reinterpret_cast<std::complex<double>*>(spec_), n_ / 2 + 1};
    }

    // c2r destroys its input; callers treat spectrum() as scratch after this.
    void forward() { fftw_execute(forward_); }
    void inverse() { fftw_execute(inverse_); }

private:
    void release_buffers() noexcept {
        if (real_ != nullptr) fftw_free(real_);
        if (spec_ != nullptr) fftw_free(spec_);
        real_ = nullptr;
        spec_ = nullptr;
    }

    std::size_t n_;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan inverse_ = nullptr;
};

// One transform object per (thread, length); plans are reused across calls.
inline RealFft& thread_fft(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<RealFft>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<RealFft>(n);
    return *slot;
}

}  // namespace lrdkit::detail
