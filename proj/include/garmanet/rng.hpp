#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace garmanet {

// Seeded random source. std::mt19937_64 has a standard-specified output
// sequence, and the uniform/normal transforms below are written out
// explicitly instead of using std::*_distribution (whose algorithms are
// implementation-defined), so any seeded run is bit-reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Derives an independent stream from a master seed. Used to give each
    // particle / multi-start / model its own generator so that parallel
    // evaluation order cannot change the results.
    static Rng stream(std::uint64_t master_seed, std::uint64_t stream_id) {
        return Rng(splitmix64(master_seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1)));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Marsaglia polar method; caches the spare deviate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        have_spare_ = true;
        return u * factor;
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Integer in [0, n). Rejection-free modulo bias is irrelevant for the
    // shuffle sizes used here, but use Lemire-style rejection anyway.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace garmanet
