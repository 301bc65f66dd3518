#include "garmanet/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "garmanet/errors.hpp"
#include "garmanet/rng.hpp"

namespace garmanet {

namespace {

struct BoxedObjective {
    const Objective& f;
    std::span<const double> lo;
    std::span<const double> hi;

    double operator()(std::vector<double>& x) const {
        double penalty = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] < lo[i]) {
                const double d = lo[i] - x[i];
                penalty += d * d;
                x[i] = lo[i];
            } else if (x[i] > hi[i]) {
                const double d = x[i] - hi[i];
                penalty += d * d;
                x[i] = hi[i];
            }
        }
        const double base = f(x);
        return base + 1e8 * penalty;
    }
};

} // namespace

MinimizeResult nelder_mead(const Objective& f, std::span<const double> x0,
                           std::span<const double> lo, std::span<const double> hi,
                           const NelderMeadOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0 || lo.size() != n || hi.size() != n)
        throw std::invalid_argument("nelder_mead: inconsistent dimensions");

    const BoxedObjective eval{f, lo, hi};

    std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(x0.begin(), x0.end()));
    std::vector<double> fvals(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        const double step = options.initial_step * std::max(std::abs(x0[i - 1]), 1.0);
        simplex[i][i - 1] += step;
    }
    for (std::size_t i = 0; i <= n; ++i) fvals[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    int iter = 0;
    bool converged = false;
    for (; iter < options.max_iter; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });

        const std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];

        const double f_spread = std::abs(fvals[worst] - fvals[best]);
        double x_spread = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            x_spread = std::max(x_spread, std::abs(simplex[worst][i] - simplex[best][i]));
        if (f_spread <= options.f_tol * (std::abs(fvals[best]) + options.f_tol) &&
            x_spread <= options.x_tol) {
            converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) continue;
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i];
        }
        for (std::size_t i = 0; i < n; ++i) centroid[i] /= static_cast<double>(n);

        for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + (centroid[i] - simplex[worst][i]);
        const double fr = eval(xr);

        if (fr < fvals[best]) {
            for (std::size_t i = 0; i < n; ++i)
                xe[i] = centroid[i] + 2.0 * (centroid[i] - simplex[worst][i]);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fvals[worst] = fe;
            } else {
                simplex[worst] = xr;
                fvals[worst] = fr;
            }
        } else if (fr < fvals[second_worst]) {
            simplex[worst] = xr;
            fvals[worst] = fr;
        } else {
            const bool outside = fr < fvals[worst];
            if (outside) {
                for (std::size_t i = 0; i < n; ++i)
                    xc[i] = centroid[i] + 0.5 * (xr[i] - centroid[i]);
            } else {
                for (std::size_t i = 0; i < n; ++i)
                    xc[i] = centroid[i] + 0.5 * (simplex[worst][i] - centroid[i]);
            }
            const double fc = eval(xc);
            if (fc < std::min(fr, fvals[worst])) {
                simplex[worst] = xc;
                fvals[worst] = fc;
            } else {
                // shrink towards the best vertex
                for (std::size_t k = 0; k <= n; ++k) {
                    if (k == best) continue;
                    for (std::size_t i = 0; i < n; ++i)
                        simplex[k][i] = simplex[best][i] + 0.5 * (simplex[k][i] - simplex[best][i]);
                    fvals[k] = eval(simplex[k]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fvals[i] < fvals[best]) best = i;

    MinimizeResult out;
    out.x = simplex[best];
    out.fval = fvals[best];
    out.iterations = iter;
    out.converged = converged;
    return out;
}

MinimizeResult multistart_minimize(const Objective& f, std::span<const double> x0,
                                   std::span<const double> lo, std::span<const double> hi,
                                   int n_starts, std::uint64_t seed,
                                   const NelderMeadOptions& options) {
    if (n_starts < 1) throw std::invalid_argument("multistart_minimize: n_starts must be >= 1");
    const std::size_t n = x0.size();

    std::vector<std::vector<double>> starts(static_cast<std::size_t>(n_starts));
    starts[0].assign(x0.begin(), x0.end());
    for (int s = 1; s < n_starts; ++s) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
        auto& p = starts[static_cast<std::size_t>(s)];
        p.resize(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = rng.uniform(lo[i], hi[i]);
    }

    std::vector<MinimizeResult> results(static_cast<std::size_t>(n_starts));
#pragma omp parallel for schedule(dynamic, 1)
    for (int s = 0; s < n_starts; ++s)
        results[static_cast<std::size_t>(s)] =
            nelder_mead(f, starts[static_cast<std::size_t>(s)], lo, hi, options);

    int winner = 0;
    for (int s = 1; s < n_starts; ++s)
        if (results[static_cast<std::size_t>(s)].fval < results[static_cast<std::size_t>(winner)].fval)
            winner = s;

    MinimizeResult out = results[static_cast<std::size_t>(winner)];
    out.best_start = winner;
    return out;
}

double golden_section(const std::function<double(double)>& f, double a, double b, double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

std::vector<std::vector<double>> numerical_hessian(const Objective& f,
                                                   std::span<const double> x,
                                                   double rel_step) {
    const std::size_t n = x.size();
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = rel_step * std::max(std::abs(x[i]), 1.0);

    std::vector<double> p(x.begin(), x.end());
    const double f0 = f(p);

    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = x[i] + h[i];
        const double fp = f(p);
        p[i] = x[i] - h[i];
        const double fm = f(p);
        p[i] = x[i];
        H[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            p[i] = x[i] + h[i];
            p[j] = x[j] + h[j];
            const double fpp = f(p);
            p[j] = x[j] - h[j];
            const double fpm = f(p);
            p[i] = x[i] - h[i];
            const double fmm = f(p);
            p[j] = x[j] + h[j];
            const double fmp = f(p);
            p[i] = x[i];
            p[j] = x[j];
            H[i][j] = H[j][i] = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
        }
    }
    return H;
}

bool invert_matrix(std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    std::vector<std::vector<double>> a = m;
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[pivot], a[col]);
        std::swap(inv[pivot], inv[col]);

        const double scale = 1.0 / a[col][col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col][c] *= scale;
            inv[col][c] *= scale;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = a[r][col];
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a[r][c] -= factor * a[col][c];
                inv[r][c] -= factor * inv[col][c];
            }
        }
    }
    m = std::move(inv);
    return true;
}

bool poly_roots_outside_unit_disk(std::span<const double> coeffs, double margin) {
    const std::size_t p = coeffs.size();
    if (p == 0) return true;

    // Reflect: roots of 1 - sum c_i z^i outside radius r equal roots of
    // u^p - sum c_i r^i u^{p-i} inside the unit disk; run Schur-Cohn there.
    const double r = 1.0 + margin;
    std::vector<double> a(p + 1);
    a[p] = 1.0;
    double rpow = 1.0;
    for (std::size_t i = 1; i <= p; ++i) {
        rpow *= r;
        a[p - i] = -coeffs[i - 1] * rpow;
    }

    std::vector<double> b;
    std::size_t n = p;
    while (n > 0) {
        if (std::abs(a[0]) >= std::abs(a[n])) return false;
        b.assign(n, 0.0);
        for (std::size_t k = 1; k <= n; ++k)
            b[k - 1] = a[n] * a[k] - a[0] * a[n - k];
        a = b;
        --n;
    }
    return true;
}

} // namespace garmanet
