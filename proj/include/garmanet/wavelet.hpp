#pragma once

#include <span>
#include <string>
#include <vector>

namespace garmanet {

enum class WaveletFamily { haar, d4, la8 };

WaveletFamily wavelet_family_from_string(const std::string& name);
std::string to_string(WaveletFamily family);

// Orthonormal wavelet/scaling filter pair. h is the wavelet (high-pass)
// filter from the standard Daubechies tabulation; g is derived from it via
// the quadrature-mirror relation g[l] = (-1)^{l+1} h[L-1-l].
struct WaveletFilter {
    WaveletFamily family;
    int width = 0;
    std::vector<double> h;
    std::vector<double> g;
};

WaveletFilter make_filter(WaveletFamily family);

// Largest decomposition depth whose equivalent filter still fits the sample:
// floor(log2(n / (width - 1) + 1)).
int max_level(std::size_t n, int width);

// Undecimated (shift-equivariant) transform coefficients, level 1..levels.
struct ModwtCoeffs {
    WaveletFamily family;
    int levels = 0;
    std::vector<std::vector<double>> wavelet; // wavelet[j-1] has length n
    std::vector<double> scaling;              // final-level scaling coefficients
};

// Additive multiresolution decomposition: x = sum_j details[j-1] + smooth.
struct Mra {
    int levels = 0;
    std::vector<std::vector<double>> details;
    std::vector<double> smooth;
};

ModwtCoeffs modwt(std::span<const double> x, const WaveletFilter& filter, int levels);
std::vector<double> imodwt(const ModwtCoeffs& coeffs, const WaveletFilter& filter);
Mra mra(std::span<const double> x, const WaveletFilter& filter, int levels);

} // namespace garmanet
