#pragma once

#include <cstddef>
#include <span>

namespace garmanet::kernels {

// The hot inner loops live here in two variants: a plain serial reference
// and an OpenMP version parallelised over independent output elements.
// Each output element is accumulated in the same order in both variants,
// so they produce bit-identical results regardless of thread count.
//
// Dispatchers pick the OpenMP variant when it is enabled, the problem is
// large enough to amortise the fork/join, and we are not already inside a
// parallel region (multi-start fitting parallelises one level up).

void set_parallel(bool on);
bool parallel_enabled();

namespace serial {

// out[t] = sum_l taps[l] * x[(t - stride*l) mod n]
void circular_filter_analysis(std::span<const double> x, std::span<const double> taps,
                              std::size_t stride, std::span<double> out);

// out[t] = sum_l taps[l] * x[(t + stride*l) mod n]
void circular_filter_synthesis(std::span<const double> x, std::span<const double> taps,
                               std::size_t stride, std::span<double> out);

// out[t] = sum_{j=0}^{min(t, K-1)} coef[j] * x[t-j]
void causal_convolve(std::span<const double> x, std::span<const double> coef,
                     std::span<double> out);

// Goertzel recurrence: out[i] = |sum_t (x[t]-mean) e^{-i 2 pi j t / n}|^2 / n
// for j = j_lo + i. Frequencies are j/n cycles per sample.
void dft_power(std::span<const double> x, double mean, std::size_t j_lo,
               std::size_t j_hi, std::span<double> out);

} // namespace serial

namespace openmp {

void circular_filter_analysis(std::span<const double> x, std::span<const double> taps,
                              std::size_t stride, std::span<double> out);
void circular_filter_synthesis(std::span<const double> x, std::span<const double> taps,
                               std::size_t stride, std::span<double> out);
void causal_convolve(std::span<const double> x, std::span<const double> coef,
                     std::span<double> out);
void dft_power(std::span<const double> x, double mean, std::size_t j_lo,
               std::size_t j_hi, std::span<double> out);

} // namespace openmp

void circular_filter_analysis(std::span<const double> x, std::span<const double> taps,
                              std::size_t stride, std::span<double> out);
void circular_filter_synthesis(std::span<const double> x, std::span<const double> taps,
                               std::size_t stride, std::span<double> out);
void causal_convolve(std::span<const double> x, std::span<const double> coef,
                     std::span<double> out);
void dft_power(std::span<const double> x, double mean, std::size_t j_lo,
               std::size_t j_hi, std::span<double> out);

} // namespace garmanet::kernels
