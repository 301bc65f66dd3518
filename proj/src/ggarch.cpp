#include "garmanet/ggarch.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "garmanet/errors.hpp"
#include "garmanet/optim.hpp"
#include "garmanet/rng.hpp"
#include "json.hpp"

namespace garmanet {

namespace {

constexpr double kEps2Floor = 1e-12;
constexpr double kVarFloor = 1e-300;

std::vector<double> log_eps2_dev(std::span<const double> eps, double tau) {
    std::vector<double> g(eps.size());
    for (std::size_t t = 0; t < eps.size(); ++t)
        g[t] = std::log(std::max(eps[t] * eps[t], kEps2Floor)) - tau;
    return g;
}

} // namespace

void validate_ggarch(const GGarchModel& m) {
    if (m.truncation < 1) throw config_error("ggarch: truncation must be at least 1");
    if (std::abs(m.beta) >= 1.0) throw config_error("ggarch: |beta| must be below 1");
    for (const auto& f : m.factors) {
        if (std::abs(f.nu) > 1.0) throw config_error("ggarch: factor nu outside [-1, 1]");
        if (!f.stationary()) throw config_error("ggarch: non-stationary variance factor");
    }
}

std::vector<double> ggarch_bracket(const GGarchModel& m, std::size_t n) {
    std::vector<double> b(n + 1, 0.0);
    b[0] = 1.0;
    if (n >= 1) b[1] = -m.beta;
    if (m.psi != 0.0) {
        const auto pv = combined_gegenbauer(m.factors, n, /*invert=*/true);
        for (std::size_t j = 0; j <= n; ++j) b[j] -= m.psi * pv[j];
    }
    return b;
}

std::vector<double> ggarch_filter(std::span<const double> eps, const GGarchModel& m,
                                  bool contemporaneous) {
    if (eps.empty()) throw data_error("ggarch_filter: empty residual sequence");
    validate_ggarch(m);

    const auto g = log_eps2_dev(eps, m.tau);
    const auto b = ggarch_bracket(m, m.truncation);
    const std::size_t j0 = contemporaneous ? 0 : 1;

    std::vector<double> ls(eps.size());
    double prev = 0.0;
    for (std::size_t t = 0; t < eps.size(); ++t) {
        double v = m.gamma + m.beta * prev;
        const std::size_t jmax = std::min(t, b.size() - 1);
        for (std::size_t j = j0; j <= jmax; ++j) v += b[j] * g[t - j];
        ls[t] = v;
        prev = v;
    }
    return ls;
}

std::vector<double> ggarch_simulate(const GGarchModel& m, std::size_t n,
                                    std::size_t burn_in, std::uint64_t seed) {
    validate_ggarch(m);
    const std::size_t total = n + burn_in;
    const auto b = ggarch_bracket(m, m.truncation);
    Rng rng(seed);

    std::vector<double> eps(total), g(total);
    double prev = 0.0;
    for (std::size_t t = 0; t < total; ++t) {
        double ls = m.gamma + m.beta * prev;
        const std::size_t jmax = std::min(t, b.size() - 1);
        for (std::size_t j = 1; j <= jmax; ++j) ls += b[j] * g[t - j];
        const double sigma = std::sqrt(std::max(std::exp(ls), kVarFloor));
        eps[t] = sigma * rng.normal();
        g[t] = std::log(std::max(eps[t] * eps[t], kEps2Floor)) - m.tau;
        prev = ls;
    }
    return std::vector<double>(eps.begin() + static_cast<std::ptrdiff_t>(burn_in), eps.end());
}

std::vector<double> ggarch_forecast(const GGarchModel& m, std::span<const double> eps,
                                    std::size_t h) {
    if (h < 1) throw config_error("ggarch_forecast: horizon must be at least 1");
    const auto ls = ggarch_filter(eps, m, /*contemporaneous=*/false);
    const auto g = log_eps2_dev(eps, m.tau);
    const auto b = ggarch_bracket(m, m.truncation);
    const std::size_t T = eps.size();

    std::vector<double> out(h);
    double prev = ls.back();
    for (std::size_t i = 1; i <= h; ++i) {
        const std::size_t t = T - 1 + i; // absolute index being predicted
        double v = m.gamma + m.beta * prev;
        // realized deviations only; unrealized ones have expectation zero
        for (std::size_t j = 1; j < b.size() && j <= t; ++j) {
            const std::size_t s = t - j;
            if (s < T) v += b[j] * g[s];
        }
        out[i - 1] = std::max(std::exp(v), kVarFloor);
        prev = v;
    }
    return out;
}

GGarchModel ggarch_fit(std::span<const double> eps, std::span<const double> freqs,
                       const GGarchFitOptions& opts) {
    const std::size_t n = eps.size();
    if (n < 50) throw data_error("ggarch_fit: residual sequence too short");
    {
        double mean = 0.0;
        for (double e : eps) mean += e;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double e : eps) var += (e - mean) * (e - mean);
        var /= static_cast<double>(n);
        if (var < 1e-12) throw data_error("ggarch_fit: degenerate residuals (near-zero variance)");
    }
    if (opts.truncation < 1) throw config_error("ggarch_fit: truncation must be at least 1");

    const std::size_t k = freqs.size();
    std::vector<double> nus(k);
    for (std::size_t i = 0; i < k; ++i) nus[i] = std::cos(2.0 * M_PI * freqs[i]);

    const auto g = log_eps2_dev(eps, -1.27);

    auto unpack = [&](std::span<const double> th) {
        GGarchModel m;
        m.gamma = th[0];
        m.beta = th[1];
        m.psi = k > 0 ? th[2] : 0.0;
        m.factors.resize(k);
        for (std::size_t i = 0; i < k; ++i) m.factors[i] = {nus[i], th[3 + i]};
        m.truncation = opts.truncation;
        return m;
    };

    auto neg_loglik = [&](std::span<const double> th) -> double {
        const GGarchModel m = unpack(th);
        const auto b = ggarch_bracket(m, m.truncation);
        double nll = 0.0;
        double prev = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            double ls = m.gamma + m.beta * prev;
            const std::size_t jmax = std::min(t, b.size() - 1);
            for (std::size_t j = 1; j <= jmax; ++j) ls += b[j] * g[t - j];
            prev = ls;
            nll += 0.5 * (ls + eps[t] * eps[t] * std::exp(-ls));
        }
        return std::isfinite(nll) ? nll : 1e12;
    };

    std::vector<double> th0 = {0.0, 0.1}, lo = {-20.0, -0.99}, hi = {20.0, 0.99};
    std::vector<std::string> names = {"gamma", "beta"};
    if (k > 0) {
        th0.push_back(0.5);
        lo.push_back(-2.0);
        hi.push_back(2.0);
        names.push_back("psi");
        char buf[16];
        for (std::size_t i = 0; i < k; ++i) {
            th0.push_back(0.1);
            lo.push_back(-0.49);
            hi.push_back(0.49);
            std::snprintf(buf, sizeof buf, "d%zu", i + 1);
            names.push_back(buf);
        }
    }

    NelderMeadOptions nm;
    nm.max_iter = opts.max_iter;
    const auto best = multistart_minimize(neg_loglik, th0, lo, hi, opts.n_starts, opts.seed, nm);
    if (!std::isfinite(best.fval) || best.fval >= 1e12)
        throw numeric_error("ggarch_fit: no finite optimum within the start budget");

    GGarchModel m = unpack(best.x);
    m.fit.css = best.fval; // negative log-likelihood for this model family
    m.fit.n_obs = n;
    m.fit.converged = best.converged;
    m.fit.param_names = names;
    m.fit.estimates = best.x;
    m.fit.std_errors.assign(best.x.size(), std::numeric_limits<double>::quiet_NaN());
    auto H = numerical_hessian(neg_loglik, best.x);
    if (invert_matrix(H)) {
        for (std::size_t i = 0; i < best.x.size(); ++i)
            if (H[i][i] > 0.0) m.fit.std_errors[i] = std::sqrt(H[i][i]);
    }
    return m;
}

// ===== persistence =====

std::string ggarch_to_json(const GGarchModel& m) {
    nlohmann::ordered_json j;
    j["gamma"] = m.gamma;
    j["beta"] = m.beta;
    j["psi"] = m.psi;
    j["factors"] = nlohmann::ordered_json::array();
    for (const auto& f : m.factors) j["factors"].push_back({{"nu", f.nu}, {"d", f.d}});
    j["tau"] = m.tau;
    j["truncation"] = m.truncation;
    j["fit"] = {{"nll", m.fit.css}, {"n_obs", m.fit.n_obs}, {"converged", m.fit.converged}};
    if (!m.fit.param_names.empty()) {
        j["fit"]["param_names"] = m.fit.param_names;
        j["fit"]["estimates"] = m.fit.estimates;
        j["fit"]["std_errors"] = m.fit.std_errors;
    }
    return j.dump(2) + "\n";
}

GGarchModel ggarch_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("ggarch model: invalid JSON: ") + e.what());
    }
    GGarchModel m;
    try {
        m.gamma = j.at("gamma").get<double>();
        m.beta = j.at("beta").get<double>();
        m.psi = j.at("psi").get<double>();
        for (const auto& f : j.at("factors")) {
            GegenbauerFactor gf;
            gf.nu = f.at("nu").get<double>();
            gf.d = f.at("d").get<double>();
            m.factors.push_back(gf);
        }
        m.tau = j.at("tau").get<double>();
        m.truncation = j.at("truncation").get<std::size_t>();
        if (j.contains("fit")) {
            const auto& f = j["fit"];
            m.fit.css = f.value("nll", 0.0);
            m.fit.n_obs = f.value("n_obs", std::size_t{0});
            m.fit.converged = f.value("converged", false);
            if (f.contains("param_names")) {
                m.fit.param_names = f["param_names"].get<std::vector<std::string>>();
                m.fit.estimates = f["estimates"].get<std::vector<double>>();
                for (const auto& e : f["std_errors"])
                    m.fit.std_errors.push_back(
                        e.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                    : e.get<double>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("ggarch model: missing or mistyped field: ") + e.what());
    }
    return m;
}

void save_ggarch(const GGarchModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << ggarch_to_json(m);
}

GGarchModel load_ggarch(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open for reading: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ggarch_from_json(ss.str());
}

} // namespace garmanet
