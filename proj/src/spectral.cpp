#include "garmanet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "garmanet/errors.hpp"
#include "garmanet/kernels.hpp"
#include "garmanet/optim.hpp"

namespace garmanet {

// ===== periodogram =====

Periodogram periodogram(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 8) throw data_error("periodogram: need at least 8 observations");

    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const std::size_t half = n / 2;

    Periodogram pg;
    pg.freqs.resize(half);
    pg.power.resize(half);
    for (std::size_t j = 1; j <= half; ++j)
        pg.freqs[j - 1] = static_cast<double>(j) / static_cast<double>(n);
    kernels::dft_power(x, mean, 1, half + 1, pg.power);
    return pg;
}

std::size_t bandwidth_count(std::size_t n, double exponent) {
    if (exponent <= 0.0 || exponent >= 1.0)
        throw config_error("bandwidth exponent must lie in (0, 1)");
    return static_cast<std::size_t>(
        std::floor(std::pow(static_cast<double>(n), exponent) + 0.5));
}

// ===== long-memory estimators =====

namespace {

void check_bandwidth(const Periodogram& pg, std::size_t m) {
    if (m < 2) throw config_error("long-memory bandwidth must be at least 2");
    if (m > pg.freqs.size())
        throw config_error("long-memory bandwidth exceeds the number of Fourier frequencies");
}

double two_sided_normal_p(double t) {
    return std::erfc(std::abs(t) / std::sqrt(2.0));
}

} // namespace

LongMemoryEstimate gph_estimate(const Periodogram& pg, std::size_t m) {
    check_bandwidth(pg, m);
    if (m < 3) throw config_error("gph_estimate: need at least 3 frequencies for a slope error");

    std::vector<double> xr(m), yr(m);
    for (std::size_t j = 0; j < m; ++j) {
        if (pg.power[j] <= 0.0)
            throw numeric_error("gph_estimate: zero periodogram ordinate (degenerate spectrum)");
        const double s = std::sin(M_PI * pg.freqs[j]);
        xr[j] = -std::log(4.0 * s * s);
        yr[j] = std::log(pg.power[j]);
    }

    const double md = static_cast<double>(m);
    const double xbar = std::accumulate(xr.begin(), xr.end(), 0.0) / md;
    const double ybar = std::accumulate(yr.begin(), yr.end(), 0.0) / md;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        sxx += (xr[j] - xbar) * (xr[j] - xbar);
        sxy += (xr[j] - xbar) * (yr[j] - ybar);
    }
    if (sxx <= 0.0) throw numeric_error("gph_estimate: regressor has no variation");

    const double slope = sxy / sxx;
    const double intercept = ybar - slope * xbar;
    double rss = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double r = yr[j] - intercept - slope * xr[j];
        rss += r * r;
    }
    const double sigma2 = rss / (md - 2.0);
    const double se = std::sqrt(sigma2 / sxx);

    LongMemoryEstimate est;
    est.method = LongMemoryMethod::gph;
    est.bandwidth = m;
    est.d_hat = slope;
    est.std_error = se;
    est.p_value = se > 0.0 ? two_sided_normal_p(slope / se) : 0.0;
    return est;
}

LongMemoryEstimate local_whittle_estimate(const Periodogram& pg, std::size_t m) {
    check_bandwidth(pg, m);

    const double md = static_cast<double>(m);
    double sum_logf = 0.0;
    bool any_power = false;
    for (std::size_t j = 0; j < m; ++j) {
        sum_logf += std::log(pg.freqs[j]);
        if (pg.power[j] > 0.0) any_power = true;
    }
    if (!any_power)
        throw numeric_error("local_whittle_estimate: all periodogram ordinates are zero");

    auto objective = [&](double d) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            s += std::pow(pg.freqs[j], 2.0 * d) * pg.power[j];
        return std::log(s / md) - (2.0 * d / md) * sum_logf;
    };

    // coarse scan to land on the right basin, then refine by golden section
    const double d_lo = -0.995, d_hi = 0.995;
    const int grid = 41;
    int best = 0;
    double best_val = objective(d_lo);
    for (int i = 1; i < grid; ++i) {
        const double d = d_lo + (d_hi - d_lo) * static_cast<double>(i) / (grid - 1);
        const double v = objective(d);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double step = (d_hi - d_lo) / (grid - 1);
    const double a = std::max(d_lo, d_lo + step * (best - 1));
    const double b = std::min(d_hi, d_lo + step * (best + 1));
    const double d_hat = golden_section(objective, a, b, 1e-10);
    if (!std::isfinite(d_hat) || !std::isfinite(objective(d_hat)))
        throw numeric_error("local_whittle_estimate: objective not finite near the minimum");

    LongMemoryEstimate est;
    est.method = LongMemoryMethod::local_whittle;
    est.bandwidth = m;
    est.d_hat = d_hat;
    est.std_error = 1.0 / (2.0 * std::sqrt(md));
    est.p_value = two_sided_normal_p(d_hat / est.std_error);
    return est;
}

LongMemoryEstimate gph_estimate(std::span<const double> x, std::size_t m) {
    return gph_estimate(periodogram(x), m);
}

LongMemoryEstimate local_whittle_estimate(std::span<const double> x, std::size_t m) {
    return local_whittle_estimate(periodogram(x), m);
}

std::vector<LongMemoryEstimate> long_memory_table(std::span<const double> x,
                                                  std::span<const double> exponents) {
    const Periodogram pg = periodogram(x);
    std::vector<LongMemoryEstimate> rows;
    rows.reserve(2 * exponents.size());
    for (double e : exponents) rows.push_back(gph_estimate(pg, bandwidth_count(x.size(), e)));
    for (double e : exponents)
        rows.push_back(local_whittle_estimate(pg, bandwidth_count(x.size(), e)));
    return rows;
}

std::vector<LongMemoryEstimate> long_memory_table(std::span<const double> x) {
    const std::vector<double> exps = {0.5, 0.6, 0.7, 0.8};
    return long_memory_table(x, exps);
}

// ===== peak detection =====

std::vector<double> detect_gfrequencies(const Periodogram& pg, std::size_t k,
                                        double min_separation) {
    if (k < 1) throw config_error("detect_gfrequencies: k must be at least 1");
    if (min_separation <= 0.0)
        throw config_error("detect_gfrequencies: min_separation must be positive");
    const std::size_t n = pg.power.size();
    if (n < 3) throw data_error("detect_gfrequencies: periodogram too short");

    // candidate local maxima; boundary bins count against their one neighbour
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || pg.power[i] > pg.power[i - 1];
        const bool right_ok = i == n - 1 || pg.power[i] > pg.power[i + 1];
        if (left_ok && right_ok) cand.push_back(i);
    }
    std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
        if (pg.power[a] != pg.power[b]) return pg.power[a] > pg.power[b];
        return a < b;
    });

    std::vector<double> picked;
    for (std::size_t idx : cand) {
        const double f = pg.freqs[idx];
        bool clash = false;
        for (double g : picked)
            if (std::abs(f - g) < min_separation) {
                clash = true;
                break;
            }
        if (!clash) picked.push_back(f);
        if (picked.size() == k) break;
    }
    if (picked.size() < k)
        throw data_error("detect_gfrequencies: fewer separated spectral peaks than requested");
    std::sort(picked.begin(), picked.end());
    return picked;
}

} // namespace garmanet
