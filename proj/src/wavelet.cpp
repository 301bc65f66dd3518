#include "garmanet/wavelet.hpp"

#include <cmath>
#include <stdexcept>

#include "garmanet/errors.hpp"
#include "garmanet/kernels.hpp"

namespace garmanet {

namespace {

// Wavelet (high-pass) filters, Percival-Walden tabulation. The d4 and la8
// entries are h[l] = (-1)^l g[L-1-l] applied to the published scaling
// coefficients; haar is written directly.
const std::vector<double> kHaarH = {
    0.7071067811865476, -0.7071067811865476};

const std::vector<double> kD4H = {
    -0.1294095225512603811744494, -0.2241438680420133810259728,
    0.8365163037378079055752938, -0.4829629131445341433748716};

const std::vector<double> kLa8H = {
    0.0322231006040514678716165260125, 0.0126039672620313037539168453939,
    -0.0992195435766335325852071022801, -0.297857795605306051402903552701,
    0.803738751805132080878805931171, -0.497618667632774989979603572149,
    -0.0296355276460024917643704782861, 0.0757657147895022132277464318637};

std::vector<double> qmf_scaling_from_wavelet(const std::vector<double>& h) {
    const std::size_t L = h.size();
    std::vector<double> g(L);
    for (std::size_t l = 0; l < L; ++l) {
        const double sign = (l % 2 == 0) ? -1.0 : 1.0; // (-1)^{l+1}
        g[l] = sign * h[L - 1 - l];
    }
    return g;
}

std::vector<double> rescale(const std::vector<double>& f) {
    std::vector<double> out(f.size());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] * inv_sqrt2;
    return out;
}

void check_transform_args(std::size_t n, const WaveletFilter& filter, int levels) {
    if (n < 2) throw data_error("wavelet transform needs at least 2 samples");
    if (levels < 1) throw config_error("decomposition level must be >= 1");
    const int jmax = max_level(n, filter.width);
    if (levels > jmax)
        throw config_error("decomposition level " + std::to_string(levels) +
                           " exceeds maximum " + std::to_string(jmax) +
                           " for length " + std::to_string(n));
}

} // namespace

WaveletFamily wavelet_family_from_string(const std::string& name) {
    if (name == "haar") return WaveletFamily::haar;
    if (name == "d4") return WaveletFamily::d4;
    if (name == "la8") return WaveletFamily::la8;
    throw config_error("unknown wavelet family: " + name);
}

std::string to_string(WaveletFamily family) {
    switch (family) {
        case WaveletFamily::haar: return "haar";
        case WaveletFamily::d4: return "d4";
        case WaveletFamily::la8: return "la8";
    }
    throw std::logic_error("unreachable wavelet family");
}

WaveletFilter make_filter(WaveletFamily family) {
    WaveletFilter f;
    f.family = family;
    switch (family) {
        case WaveletFamily::haar: f.h = kHaarH; break;
        case WaveletFamily::d4: f.h = kD4H; break;
        case WaveletFamily::la8: f.h = kLa8H; break;
    }
    f.width = static_cast<int>(f.h.size());
    f.g = qmf_scaling_from_wavelet(f.h);
    return f;
}

int max_level(std::size_t n, int width) {
    if (width < 2) throw config_error("filter width must be >= 2");
    if (n < 2) return 0;
    // Largest J with (2^J - 1)(L - 1) <= n, i.e. floor(log2(n/(L-1) + 1)).
    int j = 0;
    while (((1ULL << (j + 1)) - 1) * static_cast<unsigned long long>(width - 1) <=
           static_cast<unsigned long long>(n))
        ++j;
    return j;
}

ModwtCoeffs modwt(std::span<const double> x, const WaveletFilter& filter, int levels) {
    check_transform_args(x.size(), filter, levels);
    const std::size_t n = x.size();
    const std::vector<double> ht = rescale(filter.h);
    const std::vector<double> gt = rescale(filter.g);

    ModwtCoeffs out;
    out.family = filter.family;
    out.levels = levels;
    out.wavelet.assign(static_cast<std::size_t>(levels), std::vector<double>(n));

    std::vector<double> v(x.begin(), x.end());
    std::vector<double> v_next(n);
    for (int j = 1; j <= levels; ++j) {
        const std::size_t stride = std::size_t{1} << (j - 1);
        kernels::circular_filter_analysis(v, ht, stride, out.wavelet[j - 1]);
        kernels::circular_filter_analysis(v, gt, stride, v_next);
        v.swap(v_next);
    }
    out.scaling = std::move(v);
    return out;
}

std::vector<double> imodwt(const ModwtCoeffs& coeffs, const WaveletFilter& filter) {
    if (coeffs.levels < 1 || coeffs.wavelet.size() != static_cast<std::size_t>(coeffs.levels))
        throw config_error("inconsistent transform coefficients");
    const std::size_t n = coeffs.scaling.size();
    const std::vector<double> ht = rescale(filter.h);
    const std::vector<double> gt = rescale(filter.g);

    std::vector<double> v = coeffs.scaling;
    std::vector<double> from_w(n), from_v(n);
    for (int j = coeffs.levels; j >= 1; --j) {
        const std::size_t stride = std::size_t{1} << (j - 1);
        kernels::circular_filter_synthesis(coeffs.wavelet[j - 1], ht, stride, from_w);
        kernels::circular_filter_synthesis(v, gt, stride, from_v);
        for (std::size_t t = 0; t < n; ++t) v[t] = from_w[t] + from_v[t];
    }
    return v;
}

Mra mra(std::span<const double> x, const WaveletFilter& filter, int levels) {
    const ModwtCoeffs coeffs = modwt(x, filter, levels);
    const std::size_t n = x.size();

    Mra out;
    out.levels = levels;
    out.details.reserve(static_cast<std::size_t>(levels));

    // Invert each level in isolation: zero every other band, run the
    // synthesis pyramid. The level sums then reconstruct x additively.
    ModwtCoeffs isolated;
    isolated.family = coeffs.family;
    isolated.levels = levels;
    for (int j = 1; j <= levels; ++j) {
        isolated.wavelet.assign(static_cast<std::size_t>(levels), std::vector<double>(n, 0.0));
        isolated.scaling.assign(n, 0.0);
        isolated.wavelet[j - 1] = coeffs.wavelet[j - 1];
        out.details.push_back(imodwt(isolated, filter));
    }
    isolated.wavelet.assign(static_cast<std::size_t>(levels), std::vector<double>(n, 0.0));
    isolated.scaling = coeffs.scaling;
    out.smooth = imodwt(isolated, filter);
    return out;
}

} // namespace garmanet
