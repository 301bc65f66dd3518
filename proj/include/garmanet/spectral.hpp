#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace garmanet {

// Frequencies are cycles per sample throughout: f_j = j/N for j = 1..N/2.

struct Periodogram {
    std::vector<double> freqs;
    std::vector<double> power;
};

// Mean-removed periodogram I(f_j) = |sum_t (x_t - xbar) e^{-i 2 pi f_j t}|^2 / N.
Periodogram periodogram(std::span<const double> x);

enum class LongMemoryMethod { gph, local_whittle };

struct LongMemoryEstimate {
    LongMemoryMethod method = LongMemoryMethod::gph;
    std::size_t bandwidth = 0;
    double d_hat = 0.0;
    double std_error = 0.0;
    double p_value = 0.0;
};

// Number of low frequencies used at bandwidth exponent e: round(N^e).
std::size_t bandwidth_count(std::size_t n, double exponent);

// Log-periodogram regression: OLS of ln I(f_j) on -ln(4 sin^2(pi f_j)),
// j = 1..m. d_hat is the slope, std_error the OLS slope error, p_value the
// two-sided normal test of d = 0.
LongMemoryEstimate gph_estimate(const Periodogram& pg, std::size_t m);

// Local Whittle: d_hat minimises
//   R(d) = ln( (1/m) sum_j f_j^{2d} I(f_j) ) - (2d/m) sum_j ln f_j
// over d in (-1, 1); std_error = 1 / (2 sqrt(m)).
LongMemoryEstimate local_whittle_estimate(const Periodogram& pg, std::size_t m);

LongMemoryEstimate gph_estimate(std::span<const double> x, std::size_t m);
LongMemoryEstimate local_whittle_estimate(std::span<const double> x, std::size_t m);

// Both estimators across a grid of bandwidth exponents (default Table-style
// {0.5, 0.6, 0.7, 0.8}), rows ordered method-major then exponent.
std::vector<LongMemoryEstimate> long_memory_table(std::span<const double> x,
                                                  std::span<const double> exponents);
std::vector<LongMemoryEstimate> long_memory_table(std::span<const double> x);

// The k largest separated local maxima of the periodogram, greedy in
// descending power with pairwise distance >= min_separation, returned
// sorted ascending. Throws when fewer than k separated maxima exist.
std::vector<double> detect_gfrequencies(const Periodogram& pg, std::size_t k,
                                        double min_separation = 0.01);

} // namespace garmanet
