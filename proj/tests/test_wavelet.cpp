#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <vector>

#include "garmanet/errors.hpp"
#include "garmanet/rng.hpp"
#include "garmanet/wavelet.hpp"

using namespace garmanet;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> random_series(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

double energy(const std::vector<double>& v) {
    double e = 0.0;
    for (double x : v) e += x * x;
    return e;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("filter identities hold for every family") {
    for (auto family : {WaveletFamily::haar, WaveletFamily::d4, WaveletFamily::la8}) {
        const WaveletFilter f = make_filter(family);
        const int L = f.width;

        const double sum_h = std::accumulate(f.h.begin(), f.h.end(), 0.0);
        CHECK(std::abs(sum_h) < 1e-12);

        const double sum_h2 = std::inner_product(f.h.begin(), f.h.end(), f.h.begin(), 0.0);
        CHECK(std::abs(sum_h2 - 1.0) < 1e-12);

        const double sum_g = std::accumulate(f.g.begin(), f.g.end(), 0.0);
        CHECK(std::abs(sum_g - std::sqrt(2.0)) < 1e-12);

        // Orthogonality to even shifts.
        for (int shift = 2; shift < L; shift += 2) {
            double hh = 0.0, gg = 0.0;
            for (int l = 0; l + shift < L; ++l) {
                hh += f.h[l] * f.h[l + shift];
                gg += f.g[l] * f.g[l + shift];
            }
            CHECK(std::abs(hh) < 1e-10);
            CHECK(std::abs(gg) < 1e-10);
        }

        // Quadrature-mirror relation g[l] = (-1)^{l+1} h[L-1-l].
        for (int l = 0; l < L; ++l) {
            const double sign = (l % 2 == 0) ? -1.0 : 1.0;
            CHECK(std::abs(f.g[l] - sign * f.h[L - 1 - l]) < 1e-15);
        }
    }
}

TEST_CASE("haar filter is the expected pair") {
    const WaveletFilter f = make_filter(WaveletFamily::haar);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(f.h[0] == doctest::Approx(s));
    CHECK(f.h[1] == doctest::Approx(-s));
    CHECK(f.g[0] == doctest::Approx(s));
    CHECK(f.g[1] == doctest::Approx(s));
}

TEST_CASE("max level matches the closed form") {
    CHECK(max_level(13128, 8) == 10);
    CHECK(max_level(4096, 2) == 12);
    CHECK(max_level(8, 8) == 1);
    CHECK(max_level(2, 2) == 1);
}

TEST_CASE("round trip is exact to 1e-8 at realistic length") {
    Rng rng(1);
    const auto x = random_series(rng, 13128);
    const WaveletFilter f = make_filter(WaveletFamily::la8);
    const auto coeffs = modwt(x, f, 10);
    const auto back = imodwt(coeffs, f);
    CHECK(max_abs_diff(x, back) < 1e-8);
}

TEST_CASE("unit impulse under haar splits energy evenly at level 1") {
    std::vector<double> x(32, 0.0);
    x[0] = 1.0;
    const WaveletFilter f = make_filter(WaveletFamily::haar);
    const auto coeffs = modwt(x, f, 1);
    const double we = energy(coeffs.wavelet[0]);
    const double ve = energy(coeffs.scaling);
    CHECK(we == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ve == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("transform preserves energy") {
    Rng rng(2);
    for (auto family : {WaveletFamily::haar, WaveletFamily::d4, WaveletFamily::la8}) {
        const WaveletFilter f = make_filter(family);
        const auto x = random_series(rng, 512);
        const int levels = max_level(x.size(), f.width);
        const auto coeffs = modwt(x, f, levels);
        double total = energy(coeffs.scaling);
        for (const auto& w : coeffs.wavelet) total += energy(w);
        CHECK(total == doctest::Approx(energy(x)).epsilon(1e-10));
    }
}

TEST_CASE("circular shift of the input shifts the coefficients") {
    Rng rng(3);
    const std::size_t n = 128, shift = 17;
    const auto x = random_series(rng, n);
    std::vector<double> xs(n);
    for (std::size_t t = 0; t < n; ++t) xs[t] = x[(t + n - shift) % n];

    const WaveletFilter f = make_filter(WaveletFamily::d4);
    const auto a = modwt(x, f, 4);
    const auto b = modwt(xs, f, 4);
    for (int j = 0; j < 4; ++j) {
        for (std::size_t t = 0; t < n; ++t) {
            const double expect = a.wavelet[j][(t + n - shift) % n];
            CHECK(std::abs(b.wavelet[j][t] - expect) < 1e-10);
        }
    }
    for (std::size_t t = 0; t < n; ++t) {
        const double expect = a.scaling[(t + n - shift) % n];
        CHECK(std::abs(b.scaling[t] - expect) < 1e-10);
    }
}

TEST_CASE("multiresolution components add back to the input") {
    Rng rng(4);
    const auto x = random_series(rng, 300);
    const WaveletFilter f = make_filter(WaveletFamily::la8);
    const auto m = mra(x, f, 4);
    std::vector<double> sum = m.smooth;
    for (const auto& d : m.details)
        for (std::size_t t = 0; t < sum.size(); ++t) sum[t] += d[t];
    CHECK(max_abs_diff(x, sum) < 1e-8);
}

TEST_CASE("linear trend concentrates in the smooth component") {
    const std::size_t n = 2048;
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = 0.01 * double(t);
    const WaveletFilter f = make_filter(WaveletFamily::la8);
    const auto m = mra(x, f, 3);
    const double se = energy(m.smooth);
    CHECK(se / energy(x) > 0.99);
}

TEST_CASE("interior-band cosine concentrates in the covering detail level") {
    // Period 12 lies strictly inside the level-3 band (periods 8..16).
    const std::size_t n = 768; // multiple of 12
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = std::cos(2.0 * kPi * double(t) / 12.0);
    const WaveletFilter f = make_filter(WaveletFamily::la8);
    const auto m = mra(x, f, 4);
    double detail_total = 0.0;
    std::vector<double> de(m.details.size());
    for (std::size_t j = 0; j < m.details.size(); ++j) {
        de[j] = energy(m.details[j]);
        detail_total += de[j];
    }
    CHECK(de[2] / detail_total > 0.60);
}

TEST_CASE("band-edge cosine splits between the two adjacent detail levels") {
    // Period 8 sits exactly on the boundary between the level-2 and level-3
    // bands; the squared gains there are equal for any of these filters, so
    // the energy divides evenly instead of favouring either level.
    const std::size_t n = 1024;
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = std::cos(2.0 * kPi * double(t) / 8.0);
    const WaveletFilter f = make_filter(WaveletFamily::la8);
    const auto m = mra(x, f, 4);
    double detail_total = 0.0;
    std::vector<double> de(m.details.size());
    for (std::size_t j = 0; j < m.details.size(); ++j) {
        de[j] = energy(m.details[j]);
        detail_total += de[j];
    }
    CHECK((de[1] + de[2]) / detail_total > 0.95);
    CHECK(de[1] / detail_total == doctest::Approx(0.5).epsilon(0.08));
    CHECK(de[2] / detail_total == doctest::Approx(0.5).epsilon(0.08));
}

TEST_CASE("invalid level requests are rejected") {
    Rng rng(5);
    const auto x = random_series(rng, 64);
    const WaveletFilter f = make_filter(WaveletFamily::la8);
    CHECK_THROWS_AS((void)modwt(x, f, 0), config_error);
    CHECK_THROWS_AS((void)modwt(x, f, max_level(x.size(), f.width) + 1), config_error);
    std::vector<double> tiny = {1.0};
    CHECK_THROWS_AS((void)modwt(tiny, f, 1), data_error);
}
