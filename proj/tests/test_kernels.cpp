#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "garmanet/kernels.hpp"
#include "garmanet/rng.hpp"

using namespace garmanet;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

} // namespace

TEST_CASE("circular analysis filter matches a hand-computed case") {
    // n=4, taps={1,2}, stride=1: out[t] = x[t] + 2 x[(t-1) mod 4]
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> taps = {1.0, 2.0};
    std::vector<double> out(4);
    kernels::serial::circular_filter_analysis(x, taps, 1, out);
    CHECK(out[0] == doctest::Approx(1.0 + 2.0 * 4.0));
    CHECK(out[1] == doctest::Approx(2.0 + 2.0 * 1.0));
    CHECK(out[2] == doctest::Approx(3.0 + 2.0 * 2.0));
    CHECK(out[3] == doctest::Approx(4.0 + 2.0 * 3.0));
}

TEST_CASE("circular synthesis filter matches a hand-computed case") {
    // stride=2: out[t] = x[t] + 2 x[(t+2) mod 4]
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> taps = {1.0, 2.0};
    std::vector<double> out(4);
    kernels::serial::circular_filter_synthesis(x, taps, 2, out);
    CHECK(out[0] == doctest::Approx(1.0 + 2.0 * 3.0));
    CHECK(out[1] == doctest::Approx(2.0 + 2.0 * 4.0));
    CHECK(out[2] == doctest::Approx(3.0 + 2.0 * 1.0));
    CHECK(out[3] == doctest::Approx(4.0 + 2.0 * 2.0));
}

TEST_CASE("causal convolution truncates at the series start") {
    std::vector<double> x = {1.0, 1.0, 1.0, 1.0, 1.0};
    std::vector<double> coef = {1.0, 0.5, 0.25};
    std::vector<double> out(5);
    kernels::serial::causal_convolve(x, coef, out);
    CHECK(out[0] == doctest::Approx(1.0));
    CHECK(out[1] == doctest::Approx(1.5));
    CHECK(out[2] == doctest::Approx(1.75));
    CHECK(out[3] == doctest::Approx(1.75));
    CHECK(out[4] == doctest::Approx(1.75));
}

TEST_CASE("dft power matches the direct definition on a pure cosine") {
    // x_t = cos(2 pi j0 t / n): |DFT|^2/n concentrates at j0 with value n/4.
    const std::size_t n = 64, j0 = 5;
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t)
        x[t] = std::cos(2.0 * 3.14159265358979323846 * double(j0) * double(t) / double(n));
    std::vector<double> out(n / 2);
    kernels::serial::dft_power(x, 0.0, 1, n / 2, out);
    CHECK(out[j0 - 1] == doctest::Approx(double(n) / 4.0).epsilon(1e-10));
    for (std::size_t j = 1; j <= n / 2; ++j) {
        if (j == j0) continue;
        CHECK(std::abs(out[j - 1]) < 1e-9);
    }
}

TEST_CASE("dft power subtracts the supplied mean") {
    Rng rng(11);
    auto x = random_vector(rng, 37);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= double(x.size());

    std::vector<double> centered(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) centered[i] = x[i] - mean;

    std::vector<double> a(10), b(10);
    kernels::serial::dft_power(x, mean, 1, 10, a);
    kernels::serial::dft_power(centered, 0.0, 1, 10, b);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("openmp kernel variants are bit-identical to the serial reference") {
    Rng rng(42);
    for (std::size_t n : {16ul, 255ul, 1024ul, 4096ul}) {
        auto x = random_vector(rng, n);
        auto taps = random_vector(rng, 8);
        auto coef = random_vector(rng, 64);

        std::vector<double> s(n), p(n);
        for (std::size_t stride : {1ul, 2ul, 8ul}) {
            kernels::serial::circular_filter_analysis(x, taps, stride, s);
            kernels::openmp::circular_filter_analysis(x, taps, stride, p);
            CHECK(s == p);
            kernels::serial::circular_filter_synthesis(x, taps, stride, s);
            kernels::openmp::circular_filter_synthesis(x, taps, stride, p);
            CHECK(s == p);
        }

        kernels::serial::causal_convolve(x, coef, s);
        kernels::openmp::causal_convolve(x, coef, p);
        CHECK(s == p);

        std::vector<double> ps(n / 2), pp(n / 2);
        kernels::serial::dft_power(x, 0.1, 1, n / 2, ps);
        kernels::openmp::dft_power(x, 0.1, 1, n / 2, pp);
        CHECK(ps == pp);
    }
}

TEST_CASE("dispatcher honours the parallel toggle") {
    Rng rng(7);
    auto x = random_vector(rng, 2048);
    auto coef = random_vector(rng, 32);
    std::vector<double> a(x.size()), b(x.size());

    kernels::set_parallel(false);
    kernels::causal_convolve(x, coef, a);
    kernels::set_parallel(true);
    kernels::causal_convolve(x, coef, b);
    CHECK(a == b);
}
