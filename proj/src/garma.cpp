#include "garmanet/garma.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "garmanet/errors.hpp"
#include "garmanet/kernels.hpp"
#include "garmanet/optim.hpp"
#include "garmanet/rng.hpp"
#include "json.hpp"

namespace garmanet {

// ===== model validation =====

bool GegenbauerFactor::stationary() const {
    const double a = std::abs(nu);
    if (a < 1.0) return d < 0.5;
    if (a == 1.0) return d < 0.25;
    return false;
}

bool GegenbauerFactor::long_memory() const { return d > 0.0; }

FrequencyReport frequency_report(const GegenbauerFactor& f) {
    if (std::abs(f.nu) > 1.0)
        throw config_error("frequency_report: nu must lie in [-1, 1]");
    FrequencyReport r;
    r.nu = f.nu;
    r.lambda_radians = std::acos(f.nu);
    r.f_cycles = r.lambda_radians / (2.0 * M_PI);
    r.period = r.f_cycles > 0.0 ? 1.0 / r.f_cycles
                                : std::numeric_limits<double>::infinity();
    return r;
}

void validate_model(const GarmaModel& m) {
    if (m.truncation < 1) throw config_error("garma: truncation must be at least 1");
    if (m.sigma2 < 0.0) throw config_error("garma: sigma2 must be non-negative");
    if (!m.ar.empty() && !poly_roots_outside_unit_disk(m.ar, 1e-8))
        throw config_error("garma: AR polynomial has a root on or inside the unit circle");
    if (!m.ma.empty()) {
        std::vector<double> neg(m.ma.size());
        for (std::size_t i = 0; i < m.ma.size(); ++i) neg[i] = -m.ma[i];
        if (!poly_roots_outside_unit_disk(neg, 1e-8))
            throw config_error("garma: MA polynomial has a root on or inside the unit circle");
    }
    for (const auto& f : m.factors) {
        if (std::abs(f.nu) > 1.0) throw config_error("garma: factor nu outside [-1, 1]");
        if (!f.stationary()) throw config_error("garma: non-stationary Gegenbauer factor");
    }
    for (std::size_t i = 0; i < m.factors.size(); ++i)
        for (std::size_t j = i + 1; j < m.factors.size(); ++j)
            if (std::abs(m.factors[i].nu - m.factors[j].nu) <= 1e-6)
                throw config_error("garma: factor frequencies collide");
}

// ===== filter expansions =====

std::vector<double> gegenbauer_coeffs(const GegenbauerFactor& f, std::size_t n) {
    std::vector<double> c(n + 1);
    c[0] = 1.0;
    if (n >= 1) c[1] = 2.0 * f.d * f.nu;
    for (std::size_t j = 2; j <= n; ++j) {
        const double dj = static_cast<double>(j);
        c[j] = 2.0 * f.nu * ((f.d - 1.0) / dj + 1.0) * c[j - 1] -
               (2.0 * (f.d - 1.0) / dj + 1.0) * c[j - 2];
    }
    return c;
}

namespace {

std::vector<double> truncated_conv(std::span<const double> a, std::span<const double> b,
                                   std::size_t max_len) {
    const std::size_t len = std::min(max_len, a.size() + b.size() - 1);
    std::vector<double> out(len, 0.0);
    for (std::size_t i = 0; i < a.size() && i < len; ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        const std::size_t jmax = std::min(b.size(), len - i);
        for (std::size_t j = 0; j < jmax; ++j) out[i + j] += ai * b[j];
    }
    return out;
}

} // namespace

std::vector<double> combined_gegenbauer(std::span<const GegenbauerFactor> factors,
                                        std::size_t n, bool invert) {
    std::vector<double> acc = {1.0};
    for (const auto& f : factors) {
        GegenbauerFactor g = f;
        if (invert) g.d = -g.d;
        const auto c = gegenbauer_coeffs(g, n);
        acc = truncated_conv(acc, c, n + 1);
    }
    acc.resize(n + 1, 0.0);
    return acc;
}

// ===== filtering, simulation, forecasting =====

namespace {

// a_t = w_t - sum phi_i w_{t-i}
void apply_ar(std::span<const double> w, std::span<const double> ar, std::span<double> out) {
    for (std::size_t t = 0; t < w.size(); ++t) {
        double v = w[t];
        for (std::size_t i = 0; i < ar.size() && i < t; ++i) v -= ar[i] * w[t - 1 - i];
        out[t] = v;
    }
}

// eps_t = a_t - sum theta_j eps_{t-j} (inverts Theta(L) eps = a)
void invert_ma(std::span<const double> a, std::span<const double> ma, std::span<double> out) {
    for (std::size_t t = 0; t < a.size(); ++t) {
        double v = a[t];
        for (std::size_t j = 0; j < ma.size() && j < t; ++j) v -= ma[j] * out[t - 1 - j];
        out[t] = v;
    }
}

} // namespace

std::vector<double> garma_apply_filter(std::span<const double> x, const GarmaModel& m) {
    if (m.truncation < 1) throw config_error("garma_apply_filter: truncation must be at least 1");
    const std::size_t n = x.size();

    std::vector<double> z(n);
    for (std::size_t t = 0; t < n; ++t) z[t] = x[t] - m.mu;

    std::vector<double> w(n);
    if (m.factors.empty()) {
        w = z;
    } else {
        const auto g = combined_gegenbauer(m.factors, m.truncation, /*invert=*/true);
        kernels::causal_convolve(z, g, w);
    }

    std::vector<double> a(n);
    apply_ar(w, m.ar, a);

    std::vector<double> eps(n);
    invert_ma(a, m.ma, eps);
    return eps;
}

std::vector<double> garma_simulate(const GarmaModel& m, std::size_t n,
                                   std::size_t burn_in, std::uint64_t seed) {
    validate_model(m);
    if (burn_in < m.truncation)
        throw config_error("garma_simulate: burn_in must be at least the truncation length");

    const std::size_t total = n + burn_in;
    Rng rng(seed);
    const double sd = std::sqrt(m.sigma2);

    std::vector<double> eps(total);
    for (auto& e : eps) e = sd * rng.normal();

    // Theta(L) eps
    std::vector<double> a(total);
    for (std::size_t t = 0; t < total; ++t) {
        double v = eps[t];
        for (std::size_t j = 0; j < m.ma.size() && j < t; ++j) v += m.ma[j] * eps[t - 1 - j];
        a[t] = v;
    }

    // long-memory expansion
    std::vector<double> u(total);
    if (m.factors.empty()) {
        u = a;
    } else {
        const auto g = combined_gegenbauer(m.factors, m.truncation, /*invert=*/false);
        kernels::causal_convolve(a, g, u);
    }

    // AR recursion
    std::vector<double> y(total);
    for (std::size_t t = 0; t < total; ++t) {
        double v = u[t];
        for (std::size_t i = 0; i < m.ar.size() && i < t; ++i) v += m.ar[i] * y[t - 1 - i];
        y[t] = v;
    }

    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = m.mu + y[burn_in + t];
    return out;
}

namespace {

// pi weights of Phi(L) prod (1 - 2 nu L + L^2)^{d} / Theta(L); pi_0 = 1.
std::vector<double> pi_weights(const GarmaModel& m) {
    const std::size_t n = m.truncation;
    std::vector<double> b;
    if (m.factors.empty()) {
        b.assign(n + 1, 0.0);
        b[0] = 1.0;
    } else {
        b = combined_gegenbauer(m.factors, n, /*invert=*/true);
    }
    if (!m.ar.empty()) {
        std::vector<double> phi(m.ar.size() + 1);
        phi[0] = 1.0;
        for (std::size_t i = 0; i < m.ar.size(); ++i) phi[i + 1] = -m.ar[i];
        b = truncated_conv(b, phi, n + 1);
        b.resize(n + 1, 0.0);
    }
    std::vector<double> pi(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        double v = b[j];
        for (std::size_t i = 1; i <= m.ma.size() && i <= j; ++i)
            v -= m.ma[i - 1] * pi[j - i];
        pi[j] = v;
    }
    return pi;
}

} // namespace

std::vector<double> garma_forecast(const GarmaModel& m, std::span<const double> history,
                                   std::size_t h) {
    if (h < 1) throw config_error("garma_forecast: horizon must be at least 1");
    validate_model(m);

    const auto pi = pi_weights(m);
    const std::size_t t = history.size();

    // deviations from mu, observed then forecast, indexed 0..t+h-1
    std::vector<double> dev(t + h);
    for (std::size_t s = 0; s < t; ++s) dev[s] = history[s] - m.mu;

    for (std::size_t j = 1; j <= h; ++j) {
        const std::size_t s = t + j - 1; // absolute index being predicted
        double v = 0.0;
        const std::size_t imax = std::min(s, pi.size() - 1);
        for (std::size_t i = 1; i <= imax; ++i) v -= pi[i] * dev[s - i];
        dev[s] = v;
    }

    std::vector<double> out(h);
    for (std::size_t j = 0; j < h; ++j) out[j] = m.mu + dev[t + j];
    return out;
}

// ===== estimation =====

GarmaModel garma_fit(std::span<const double> x, std::size_t p, std::size_t q,
                     std::span<const double> freqs, const GarmaFitOptions& opts) {
    const std::size_t k = freqs.size();
    const std::size_t n = x.size();
    const std::size_t n_params =
        (opts.estimate_mu ? 1 : 0) + p + q + k + (opts.free_frequencies ? k : 0);
    if (n < 10 * (p + q + 2 * k + 1))
        throw data_error("garma_fit: series too short for the requested model order");
    if (opts.truncation < 1) throw config_error("garma_fit: truncation must be at least 1");
    if (n_params == 0) {
        // nothing to optimize: white-noise model with fixed mu = 0
        GarmaModel m;
        m.truncation = opts.truncation;
        double css = 0.0;
        for (double v : x) css += v * v;
        m.sigma2 = css / static_cast<double>(n);
        m.fit.css = css;
        m.fit.n_obs = n;
        m.fit.converged = true;
        return m;
    }

    std::vector<double> nu0(k);
    for (std::size_t i = 0; i < k; ++i) nu0[i] = std::cos(2.0 * M_PI * freqs[i]);

    const bool est_mu = opts.estimate_mu;
    const bool free_nu = opts.free_frequencies;

    auto unpack = [&](std::span<const double> th) {
        GarmaModel m;
        std::size_t off = 0;
        m.mu = est_mu ? th[off++] : 0.0;
        m.ar.assign(th.begin() + off, th.begin() + off + p);
        off += p;
        m.ma.assign(th.begin() + off, th.begin() + off + q);
        off += q;
        m.factors.resize(k);
        for (std::size_t i = 0; i < k; ++i) m.factors[i].d = th[off++];
        for (std::size_t i = 0; i < k; ++i)
            m.factors[i].nu = free_nu ? th[off + i] : nu0[i];
        m.truncation = opts.truncation;
        return m;
    };

    auto css_objective = [&](std::span<const double> th) -> double {
        const GarmaModel m = unpack(th);
        // keep the search inside the stationary region with a sloped penalty
        double bad = 0.0;
        if (!m.ar.empty() && !poly_roots_outside_unit_disk(m.ar, 1e-8)) {
            for (double c : m.ar) bad += c * c;
            bad += 1.0;
        }
        if (!m.ma.empty()) {
            std::vector<double> neg(m.ma.size());
            for (std::size_t i = 0; i < m.ma.size(); ++i) neg[i] = -m.ma[i];
            if (!poly_roots_outside_unit_disk(neg, 1e-8)) {
                for (double c : m.ma) bad += c * c;
                bad += 1.0;
            }
        }
        if (free_nu)
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i + 1; j < k; ++j)
                    if (std::abs(m.factors[i].nu - m.factors[j].nu) <= 1e-6) bad += 1.0;
        if (bad > 0.0) return 1e10 * bad;

        const auto eps = garma_apply_filter(x, m);
        double css = 0.0;
        for (double e : eps) css += e * e;
        return std::isfinite(css) ? css : 1e12;
    };

    // parameter box and starting point
    std::vector<double> th0, lo, hi;
    std::vector<std::string> names;
    const double mean = [&] {
        double s = 0.0;
        for (double v : x) s += v;
        return s / static_cast<double>(n);
    }();
    const double spread = [&] {
        double s = 0.0;
        for (double v : x) s += (v - mean) * (v - mean);
        return std::sqrt(s / static_cast<double>(n));
    }();
    if (est_mu) {
        th0.push_back(mean);
        lo.push_back(mean - 10.0 * spread - 1.0);
        hi.push_back(mean + 10.0 * spread + 1.0);
        names.push_back("mu");
    }
    char buf[16];
    for (std::size_t i = 0; i < p; ++i) {
        th0.push_back(0.1);
        lo.push_back(-2.0);
        hi.push_back(2.0);
        std::snprintf(buf, sizeof buf, "ar%zu", i + 1);
        names.push_back(buf);
    }
    for (std::size_t j = 0; j < q; ++j) {
        th0.push_back(0.0);
        lo.push_back(-2.0);
        hi.push_back(2.0);
        std::snprintf(buf, sizeof buf, "ma%zu", j + 1);
        names.push_back(buf);
    }
    for (std::size_t i = 0; i < k; ++i) {
        th0.push_back(0.1);
        lo.push_back(-0.49);
        hi.push_back(0.49);
        std::snprintf(buf, sizeof buf, "d%zu", i + 1);
        names.push_back(buf);
    }
    if (free_nu)
        for (std::size_t i = 0; i < k; ++i) {
            th0.push_back(nu0[i]);
            lo.push_back(-1.0 + 1e-6);
            hi.push_back(1.0 - 1e-6);
            std::snprintf(buf, sizeof buf, "nu%zu", i + 1);
            names.push_back(buf);
        }

    NelderMeadOptions nm;
    nm.max_iter = opts.max_iter;
    const auto best =
        multistart_minimize(css_objective, th0, lo, hi, opts.n_starts, opts.seed, nm);
    if (!std::isfinite(best.fval) || best.fval >= 1e10)
        throw numeric_error("garma_fit: no feasible optimum within the start budget");

    GarmaModel m = unpack(best.x);
    if (free_nu) {
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                if (std::abs(m.factors[i].nu - m.factors[j].nu) <= 1e-6)
                    throw numeric_error("garma_fit: factor frequencies collided during search");
    }

    m.sigma2 = best.fval / static_cast<double>(n);
    m.fit.css = best.fval;
    m.fit.n_obs = n;
    m.fit.converged = best.converged;
    m.fit.param_names = names;
    m.fit.estimates = best.x;

    // asymptotic errors: cov = 2 sigma2 H^{-1} with H the CSS Hessian
    m.fit.std_errors.assign(best.x.size(), std::numeric_limits<double>::quiet_NaN());
    auto H = numerical_hessian(css_objective, best.x);
    if (invert_matrix(H)) {
        for (std::size_t i = 0; i < best.x.size(); ++i) {
            const double v = 2.0 * m.sigma2 * H[i][i];
            if (v > 0.0) m.fit.std_errors[i] = std::sqrt(v);
        }
    }
    return m;
}

// ===== persistence =====

std::string garma_to_json(const GarmaModel& m) {
    nlohmann::ordered_json j;
    j["mu"] = m.mu;
    j["ar"] = m.ar;
    j["ma"] = m.ma;
    j["factors"] = nlohmann::ordered_json::array();
    for (const auto& f : m.factors) j["factors"].push_back({{"nu", f.nu}, {"d", f.d}});
    j["sigma2"] = m.sigma2;
    j["truncation"] = m.truncation;
    j["fit"] = {{"css", m.fit.css}, {"n_obs", m.fit.n_obs}, {"converged", m.fit.converged}};
    if (!m.fit.param_names.empty()) {
        j["fit"]["param_names"] = m.fit.param_names;
        j["fit"]["estimates"] = m.fit.estimates;
        j["fit"]["std_errors"] = m.fit.std_errors;
    }
    return j.dump(2) + "\n";
}

GarmaModel garma_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("garma model: invalid JSON: ") + e.what());
    }
    GarmaModel m;
    try {
        m.mu = j.at("mu").get<double>();
        m.ar = j.at("ar").get<std::vector<double>>();
        m.ma = j.at("ma").get<std::vector<double>>();
        for (const auto& f : j.at("factors")) {
            GegenbauerFactor gf;
            gf.nu = f.at("nu").get<double>();
            gf.d = f.at("d").get<double>();
            m.factors.push_back(gf);
        }
        m.sigma2 = j.at("sigma2").get<double>();
        m.truncation = j.at("truncation").get<std::size_t>();
        if (j.contains("fit")) {
            const auto& f = j["fit"];
            m.fit.css = f.value("css", 0.0);
            m.fit.n_obs = f.value("n_obs", std::size_t{0});
            m.fit.converged = f.value("converged", false);
            if (f.contains("param_names")) {
                m.fit.param_names = f["param_names"].get<std::vector<std::string>>();
                m.fit.estimates = f["estimates"].get<std::vector<double>>();
                // NaN round-trips as null in JSON
                for (const auto& e : f["std_errors"])
                    m.fit.std_errors.push_back(
                        e.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                    : e.get<double>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("garma model: missing or mistyped field: ") + e.what());
    }
    return m;
}

void save_garma(const GarmaModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << garma_to_json(m);
}

GarmaModel load_garma(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open for reading: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return garma_from_json(ss.str());
}

} // namespace garmanet
