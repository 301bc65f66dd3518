// Timing harness for the parallel kernels. Each row runs the serial and the
// OpenMP variant of one kernel on a representative shape, confirms that the
// two outputs agree, and reports the speedup. With a single hardware thread
// the expected speedup is about 1.0x; the table exists so that multi-core
// machines can verify the parallel paths actually pay off.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "garmanet/kernels.hpp"
#include "garmanet/rng.hpp"

using namespace garmanet;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

// Best wall time over enough repetitions to accumulate ~0.2s of work.
double time_kernel(const std::function<void()>& fn) {
    using clock = std::chrono::steady_clock;
    fn(); // warm up and fault in the buffers
    const auto probe0 = clock::now();
    fn();
    const double once = std::chrono::duration<double>(clock::now() - probe0).count();
    const int reps = std::max(3, static_cast<int>(0.2 / std::max(once, 1e-7)));
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock::now();
        fn();
        best = std::min(best,
                        std::chrono::duration<double>(clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, const char* shape, const std::function<void()>& serial_fn,
         const std::function<void()>& openmp_fn, const std::vector<double>& serial_out,
         const std::vector<double>& openmp_out) {
    const double ts = time_kernel(serial_fn);
    const double tp = time_kernel(openmp_fn);
    double dev = 0.0;
    for (std::size_t i = 0; i < serial_out.size(); ++i)
        dev = std::max(dev, std::abs(serial_out[i] - openmp_out[i]));
    std::printf("%-26s %-22s %10.3f %10.3f %8.2fx %9.1e\n", name, shape, ts * 1e3,
                tp * 1e3, ts / tp, dev);
}

} // namespace

int main() {
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("kernel benchmark, %d OpenMP thread%s\n", threads,
                threads == 1 ? "" : "s");
    std::printf("%-26s %-22s %10s %10s %9s %9s\n", "kernel", "shape", "serial ms",
                "openmp ms", "speedup", "max diff");

    // level-3 undecimated filtering pass over a long series
    {
        const auto x = noise(65536, 1);
        const auto taps = noise(8, 2);
        std::vector<double> a(x.size()), b(x.size());
        row("circular_filter_analysis", "n=65536 taps=8",
            [&] { kernels::serial::circular_filter_analysis(x, taps, 4, a); },
            [&] { kernels::openmp::circular_filter_analysis(x, taps, 4, b); }, a, b);
        row("circular_filter_synthesis", "n=65536 taps=8",
            [&] { kernels::serial::circular_filter_synthesis(x, taps, 4, a); },
            [&] { kernels::openmp::circular_filter_synthesis(x, taps, 4, b); }, a, b);
    }

    // one conditional-sum-of-squares filtering pass at a realistic truncation
    {
        const auto x = noise(16384, 3);
        const auto coef = noise(600, 4);
        std::vector<double> a(x.size()), b(x.size());
        row("causal_convolve", "n=16384 coef=600",
            [&] { kernels::serial::causal_convolve(x, coef, a); },
            [&] { kernels::openmp::causal_convolve(x, coef, b); }, a, b);
    }

    // low-frequency band of the periodogram, the estimator workload
    {
        const auto x = noise(8192, 5);
        std::vector<double> a(512), b(512);
        row("dft_power", "n=8192 j=1..512",
            [&] { kernels::serial::dft_power(x, 0.0, 1, 512, a); },
            [&] { kernels::openmp::dft_power(x, 0.0, 1, 512, b); }, a, b);
    }

    return 0;
}
