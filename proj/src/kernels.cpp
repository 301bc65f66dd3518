#include "garmanet/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace garmanet::kernels {

namespace {

std::atomic<bool> g_parallel{true};

constexpr double kPi = 3.14159265358979323846;

// Minimum number of fused multiply-adds before a parallel region pays off.
constexpr std::size_t kParallelThreshold = 16384;

bool use_openmp(std::size_t work) {
#ifdef _OPENMP
    if (!g_parallel.load(std::memory_order_relaxed)) return false;
    if (omp_in_parallel()) return false;
    return work >= kParallelThreshold;
#else
    (void)work;
    return false;
#endif
}

inline double analysis_point(const double* x, const double* taps, std::size_t n_taps,
                             std::size_t n, std::size_t stride, std::size_t t) {
    double acc = 0.0;
    std::size_t idx = t;
    for (std::size_t l = 0; l < n_taps; ++l) {
        acc += taps[l] * x[idx];
        idx = (idx >= stride) ? idx - stride : idx + n - stride;
    }
    return acc;
}

inline double synthesis_point(const double* x, const double* taps, std::size_t n_taps,
                              std::size_t n, std::size_t stride, std::size_t t) {
    double acc = 0.0;
    std::size_t idx = t;
    for (std::size_t l = 0; l < n_taps; ++l) {
        acc += taps[l] * x[idx];
        idx += stride;
        if (idx >= n) idx -= n;
    }
    return acc;
}

inline double convolve_point(const double* x, const double* coef, std::size_t n_coef,
                             std::size_t t) {
    const std::size_t kmax = (t + 1 < n_coef) ? t + 1 : n_coef;
    double acc = 0.0;
    for (std::size_t j = 0; j < kmax; ++j) acc += coef[j] * x[t - j];
    return acc;
}

inline double goertzel_point(const double* x, std::size_t n, double mean, std::size_t j) {
    const double omega = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    const double c = 2.0 * std::cos(omega);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double s0 = (x[t] - mean) + c * s1 - s2;
        s2 = s1;
        s1 = s0;
    }
    return (s1 * s1 + s2 * s2 - c * s1 * s2) / static_cast<double>(n);
}

} // namespace

void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }
bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

// ===== serial reference =====

namespace serial {

void circular_filter_analysis(std::span<const double> x, std::span<const double> taps,
                              std::size_t stride, std::span<double> out) {
    const std::size_t n = x.size();
    const std::size_t s = stride % n;
    for (std::size_t t = 0; t < n; ++t)
        out[t] = analysis_point(x.data(), taps.data(), taps.size(), n, s, t);
}

void circular_filter_synthesis(std::span<const double> x, std::span<const double> taps,
                               std::size_t stride, std::span<double> out) {
    const std::size_t n = x.size();
    const std::size_t s = stride % n;
    for (std::size_t t = 0; t < n; ++t)
        out[t] = synthesis_point(x.data(), taps.data(), taps.size(), n, s, t);
}

void causal_convolve(std::span<const double> x, std::span<const double> coef,
                     std::span<double> out) {
    const std::size_t n = x.size();
    for (std::size_t t = 0; t < n; ++t)
        out[t] = convolve_point(x.data(), coef.data(), coef.size(), t);
}

void dft_power(std::span<const double> x, double mean, std::size_t j_lo,
               std::size_t j_hi, std::span<double> out) {
    const std::size_t n = x.size();
    for (std::size_t j = j_lo; j <= j_hi; ++j)
        out[j - j_lo] = goertzel_point(x.data(), n, mean, j);
}

} // namespace serial

// ===== OpenMP variants =====

namespace openmp {

void circular_filter_analysis(std::span<const double> x, std::span<const double> taps,
                              std::size_t stride, std::span<double> out) {
    const std::int64_t n = static_cast<std::int64_t>(x.size());
    const std::size_t s = stride % x.size();
    const double* xp = x.data();
    const double* tp = taps.data();
    const std::size_t nt = taps.size();
    double* op = out.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < n; ++t)
        op[t] = analysis_point(xp, tp, nt, static_cast<std::size_t>(n), s,
                               static_cast<std::size_t>(t));
}

void circular_filter_synthesis(std::span<const double> x, std::span<const double> taps,
                               std::size_t stride, std::span<double> out) {
    const std::int64_t n = static_cast<std::int64_t>(x.size());
    const std::size_t s = stride % x.size();
    const double* xp = x.data();
    const double* tp = taps.data();
    const std::size_t nt = taps.size();
    double* op = out.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < n; ++t)
        op[t] = synthesis_point(xp, tp, nt, static_cast<std::size_t>(n), s,
                                static_cast<std::size_t>(t));
}

void causal_convolve(std::span<const double> x, std::span<const double> coef,
                     std::span<double> out) {
    const std::int64_t n = static_cast<std::int64_t>(x.size());
    const double* xp = x.data();
    const double* cp = coef.data();
    const std::size_t nc = coef.size();
    double* op = out.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < n; ++t)
        op[t] = convolve_point(xp, cp, nc, static_cast<std::size_t>(t));
}

void dft_power(std::span<const double> x, double mean, std::size_t j_lo,
               std::size_t j_hi, std::span<double> out) {
    const std::int64_t count = static_cast<std::int64_t>(j_hi - j_lo + 1);
    const double* xp = x.data();
    const std::size_t n = x.size();
    double* op = out.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i)
        op[i] = goertzel_point(xp, n, mean, j_lo + static_cast<std::size_t>(i));
}

} // namespace openmp

// ===== dispatchers =====

void circular_filter_analysis(std::span<const double> x, std::span<const double> taps,
                              std::size_t stride, std::span<double> out) {
    if (use_openmp(x.size() * taps.size()))
        openmp::circular_filter_analysis(x, taps, stride, out);
    else
        serial::circular_filter_analysis(x, taps, stride, out);
}

void circular_filter_synthesis(std::span<const double> x, std::span<const double> taps,
                               std::size_t stride, std::span<double> out) {
    if (use_openmp(x.size() * taps.size()))
        openmp::circular_filter_synthesis(x, taps, stride, out);
    else
        serial::circular_filter_synthesis(x, taps, stride, out);
}

void causal_convolve(std::span<const double> x, std::span<const double> coef,
                     std::span<double> out) {
    if (use_openmp(x.size() * coef.size()))
        openmp::causal_convolve(x, coef, out);
    else
        serial::causal_convolve(x, coef, out);
}

void dft_power(std::span<const double> x, double mean, std::size_t j_lo,
               std::size_t j_hi, std::span<double> out) {
    if (use_openmp(x.size() * (j_hi - j_lo + 1)))
        openmp::dft_power(x, mean, j_lo, j_hi, out);
    else
        serial::dft_power(x, mean, j_lo, j_hi, out);
}

} // namespace garmanet::kernels
