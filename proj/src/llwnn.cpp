#include "garmanet/llwnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "garmanet/errors.hpp"
#include "garmanet/rng.hpp"
#include "garmanet/wavelet.hpp"
#include "json.hpp"

namespace garmanet {

namespace {

constexpr double kScaleFloor = 1e-6;
constexpr double kExpCap = 700.0; // keep exp() finite

// Per-unit forward quantities shared by evaluation and gradients.
struct UnitEval {
    double lin = 0.0;   // w_0 + w.x
    double psi = 0.0;   // wavelet activation
    double shell = 0.0; // common factor of the activation derivatives
    double r2 = 0.0;
};

UnitEval eval_unit(const LlwnnUnit& u, WaveletKind kind, std::span<const double> x,
                   std::vector<double>& z) {
    const std::size_t n = x.size();
    UnitEval e;
    double log_norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        z[j] = (x[j] - u.b[j]) / u.a[j];
        e.r2 += z[j] * z[j];
        log_norm -= 0.5 * std::log(u.a[j]);
    }
    if (kind == WaveletKind::gaussian) {
        e.psi = std::exp(std::min(log_norm - e.r2, kExpCap));
        e.shell = e.psi;
    } else {
        e.shell = std::exp(std::min(log_norm - 0.5 * e.r2, kExpCap));
        e.psi = (1.0 - e.r2) * e.shell;
    }
    e.lin = u.w[0];
    for (std::size_t j = 0; j < n; ++j) e.lin += u.w[j + 1] * x[j];
    return e;
}

// d psi / d b_j and d psi / d a_j, given the shared forward quantities.
inline double dpsi_db(const UnitEval& e, WaveletKind kind, double zj, double aj) {
    if (kind == WaveletKind::gaussian) return e.psi * 2.0 * zj / aj;
    return e.shell * zj * (3.0 - e.r2) / aj;
}

inline double dpsi_da(const UnitEval& e, WaveletKind kind, double zj, double aj) {
    if (kind == WaveletKind::gaussian) return e.psi * (2.0 * zj * zj - 0.5) / aj;
    return (e.shell * zj * zj * (3.0 - e.r2) - 0.5 * e.psi) / aj;
}

void check_input(const LlwnnModel& m, std::span<const double> x) {
    if (x.size() != m.n_inputs)
        throw config_error("llwnn: feature vector length does not match n_inputs");
    for (double v : x)
        if (!std::isfinite(v)) throw data_error("llwnn: non-finite feature value");
}

void validate_supervised(const SupervisedSet& data, std::size_t n_inputs) {
    if (data.inputs.empty()) throw data_error("llwnn: empty training set");
    if (data.inputs.size() != data.targets.size())
        throw data_error("llwnn: sample count does not match target count");
    for (const auto& row : data.inputs) {
        if (row.size() != n_inputs)
            throw data_error("llwnn: feature row length does not match n_inputs");
        for (double v : row)
            if (!std::isfinite(v)) throw data_error("llwnn: non-finite feature value");
    }
    for (double t : data.targets)
        if (!std::isfinite(t)) throw data_error("llwnn: non-finite target value");
}

double mse_over(const LlwnnModel& m, const SupervisedSet& data) {
    double acc = 0.0;
    for (std::size_t i = 0; i < data.inputs.size(); ++i) {
        const double e = llwnn_forward(m, data.inputs[i]) - data.targets[i];
        acc += e * e;
    }
    return acc / static_cast<double>(data.inputs.size());
}

std::string kind_name(WaveletKind k) {
    return k == WaveletKind::gaussian ? "gaussian" : "mexican_hat";
}

WaveletKind kind_from_name(const std::string& s) {
    if (s == "gaussian") return WaveletKind::gaussian;
    if (s == "mexican_hat") return WaveletKind::mexican_hat;
    throw config_error("llwnn: unknown wavelet kind '" + s + "'");
}

} // namespace

void validate_llwnn(const LlwnnModel& m) {
    if (m.n_inputs < 1) throw config_error("llwnn: n_inputs must be at least 1");
    if (m.units.empty()) throw config_error("llwnn: at least one hidden unit required");
    for (const auto& u : m.units) {
        if (u.a.size() != m.n_inputs || u.b.size() != m.n_inputs ||
            u.w.size() != m.n_inputs + 1)
            throw config_error("llwnn: unit parameter lengths do not match n_inputs");
        for (double v : u.a) {
            if (!std::isfinite(v)) throw numeric_error("llwnn: non-finite scale");
            if (v < kScaleFloor) throw config_error("llwnn: scale below 1e-6 floor");
        }
        for (double v : u.b)
            if (!std::isfinite(v)) throw numeric_error("llwnn: non-finite translation");
        for (double v : u.w)
            if (!std::isfinite(v)) throw numeric_error("llwnn: non-finite weight");
    }
}

LlwnnModel llwnn_init(std::size_t n_inputs, std::size_t n_units, WaveletKind kind,
                      std::uint64_t seed) {
    if (n_inputs < 1) throw config_error("llwnn_init: n_inputs must be at least 1");
    if (n_units < 1) throw config_error("llwnn_init: n_units must be at least 1");
    Rng rng(seed);
    LlwnnModel m;
    m.n_inputs = n_inputs;
    m.kind = kind;
    m.units.resize(n_units);
    for (auto& u : m.units) {
        u.a.resize(n_inputs);
        u.b.resize(n_inputs);
        u.w.resize(n_inputs + 1);
        for (auto& v : u.a) v = rng.uniform(0.2, 1.0);
        for (auto& v : u.b) v = rng.uniform(0.0, 1.0);
        for (auto& v : u.w) v = rng.uniform(-0.1, 0.1);
    }
    return m;
}

double llwnn_forward(const LlwnnModel& m, std::span<const double> x) {
    check_input(m, x);
    std::vector<double> z(m.n_inputs);
    double y = 0.0;
    for (const auto& u : m.units) {
        const auto e = eval_unit(u, m.kind, x, z);
        y += e.lin * e.psi;
    }
    return y;
}

std::vector<double> llwnn_encode(const LlwnnModel& m) {
    std::vector<double> p;
    p.reserve(m.units.size() * (3 * m.n_inputs + 1));
    for (const auto& u : m.units) {
        p.insert(p.end(), u.a.begin(), u.a.end());
        p.insert(p.end(), u.b.begin(), u.b.end());
        p.insert(p.end(), u.w.begin(), u.w.end());
    }
    return p;
}

LlwnnModel llwnn_decode(const LlwnnModel& shape, std::span<const double> params) {
    const std::size_t n = shape.n_inputs;
    const std::size_t per_unit = 3 * n + 1;
    if (params.size() != shape.units.size() * per_unit)
        throw config_error("llwnn_decode: parameter vector length mismatch");
    LlwnnModel m = shape;
    std::size_t k = 0;
    for (auto& u : m.units) {
        for (std::size_t j = 0; j < n; ++j) u.a[j] = std::max(params[k++], kScaleFloor);
        for (std::size_t j = 0; j < n; ++j) u.b[j] = params[k++];
        for (std::size_t j = 0; j <= n; ++j) u.w[j] = params[k++];
    }
    return m;
}

std::vector<double> llwnn_gradient(const LlwnnModel& m, std::span<const double> x,
                                   double target) {
    check_input(m, x);
    const std::size_t n = m.n_inputs;
    std::vector<double> z(n);

    std::vector<UnitEval> evals(m.units.size());
    std::vector<std::vector<double>> zs(m.units.size());
    double y = 0.0;
    for (std::size_t i = 0; i < m.units.size(); ++i) {
        evals[i] = eval_unit(m.units[i], m.kind, x, z);
        zs[i] = z;
        y += evals[i].lin * evals[i].psi;
    }
    const double err = y - target; // dE/dY for E = err^2 / 2

    std::vector<double> grad(m.units.size() * (3 * n + 1));
    std::size_t k = 0;
    for (std::size_t i = 0; i < m.units.size(); ++i) {
        const auto& u = m.units[i];
        const auto& e = evals[i];
        for (std::size_t j = 0; j < n; ++j)
            grad[k++] = err * e.lin * dpsi_da(e, m.kind, zs[i][j], u.a[j]);
        for (std::size_t j = 0; j < n; ++j)
            grad[k++] = err * e.lin * dpsi_db(e, m.kind, zs[i][j], u.a[j]);
        grad[k++] = err * e.psi;
        for (std::size_t j = 0; j < n; ++j) grad[k++] = err * e.psi * x[j];
    }
    return grad;
}

// ===== backpropagation =====

TrainResult bp_train(const LlwnnModel& start, const SupervisedSet& data,
                     const TrainConfig& cfg) {
    if (cfg.algorithm != TrainAlgorithm::bp)
        throw config_error("bp_train: config selects a different algorithm");
    if (cfg.bp.learning_rate < 0.0)
        throw config_error("bp_train: learning rate must be nonnegative");
    validate_llwnn(start);
    validate_supervised(data, start.n_inputs);

    const std::size_t n = start.n_inputs;
    const std::size_t N = data.inputs.size();
    const double lr = cfg.bp.learning_rate;

    LlwnnModel m = start;
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);

    std::vector<UnitEval> evals(m.units.size());
    std::vector<std::vector<double>> zs(m.units.size(), std::vector<double>(n));

    TrainResult out;
    out.trace.reserve(cfg.bp.epochs);
    for (std::size_t epoch = 0; epoch < cfg.bp.epochs; ++epoch) {
        for (std::size_t i = N - 1; i > 0; --i)
            std::swap(order[i], order[rng.below(i + 1)]);

        double loss = 0.0;
        for (std::size_t s : order) {
            const auto& x = data.inputs[s];
            double y = 0.0;
            for (std::size_t i = 0; i < m.units.size(); ++i) {
                evals[i] = eval_unit(m.units[i], m.kind, x, zs[i]);
                y += evals[i].lin * evals[i].psi;
            }
            const double err = y - data.targets[s];
            loss += 0.5 * err * err;

            const double step = lr * err;
            for (std::size_t i = 0; i < m.units.size(); ++i) {
                auto& u = m.units[i];
                const auto& e = evals[i];
                u.w[0] -= step * e.psi;
                for (std::size_t j = 0; j < n; ++j) u.w[j + 1] -= step * e.psi * x[j];
                if (cfg.bp.weights_only) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    u.b[j] -= step * e.lin * dpsi_db(e, m.kind, zs[i][j], u.a[j]);
                    u.a[j] -= step * e.lin * dpsi_da(e, m.kind, zs[i][j], u.a[j]);
                    u.a[j] = std::max(u.a[j], kScaleFloor);
                }
            }
        }
        loss /= static_cast<double>(N);
        out.trace.push_back(loss);
        if (!std::isfinite(loss) || loss > 1e6) {
            std::ostringstream msg;
            msg << "bp_train: diverged at epoch " << epoch << " with mean loss " << loss
                << "; reduce the learning rate";
            throw numeric_error(msg.str());
        }
    }
    out.model = std::move(m);
    return out;
}

// ===== particle swarm =====

PsoResult pso_minimize(const Objective& f, std::span<const double> init_lo,
                       std::span<const double> init_hi, const PsoConfig& cfg,
                       std::uint64_t seed) {
    const std::size_t dim = init_lo.size();
    if (dim == 0 || init_hi.size() != dim)
        throw config_error("pso_minimize: initialization bounds are inconsistent");
    const std::size_t P = cfg.population;
    if (P < 2) throw config_error("pso_minimize: population must be at least 2");

    std::vector<std::vector<double>> s(P, std::vector<double>(dim));
    std::vector<std::vector<double>> v(P, std::vector<double>(dim));
    std::vector<Rng> streams;
    streams.reserve(P);
    for (std::size_t i = 0; i < P; ++i) {
        streams.push_back(Rng::stream(seed, i));
        auto& rng = streams.back();
        for (std::size_t j = 0; j < dim; ++j) s[i][j] = rng.uniform(init_lo[j], init_hi[j]);
        for (std::size_t j = 0; j < dim; ++j) v[i][j] = rng.uniform(-cfg.v_init, cfg.v_init);
    }

    std::vector<double> fit(P);
    auto evaluate = [&]() {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(P); ++i)
            fit[static_cast<std::size_t>(i)] = f(s[static_cast<std::size_t>(i)]);
    };
    evaluate();

    auto pbest = s;
    auto pbest_fit = fit;
    std::size_t g_idx = 0;
    for (std::size_t i = 1; i < P; ++i)
        if (pbest_fit[i] < pbest_fit[g_idx]) g_idx = i;
    std::vector<double> gbest = pbest[g_idx];
    double gbest_fit = pbest_fit[g_idx];

    PsoResult out;
    out.trace.reserve(cfg.generations + 1);
    out.trace.push_back(gbest_fit);

    const std::size_t G = cfg.generations;
    for (std::size_t gen = 0; gen < G; ++gen) {
        const double frac =
            G > 1 ? static_cast<double>(gen) / static_cast<double>(G - 1) : 0.0;
        const double inertia = cfg.w_start + (cfg.w_end - cfg.w_start) * frac;

        for (std::size_t i = 0; i < P; ++i) {
            auto& rng = streams[i];
            for (std::size_t j = 0; j < dim; ++j) {
                const double r1 = rng.uniform();
                const double r2 = rng.uniform();
                double vel = inertia * v[i][j] + cfg.c1 * r1 * (pbest[i][j] - s[i][j]) +
                             cfg.c2 * r2 * (gbest[j] - s[i][j]);
                vel = std::clamp(vel, -cfg.v_max, cfg.v_max);
                v[i][j] = vel;
                s[i][j] += vel;
            }
        }
        evaluate();
        for (std::size_t i = 0; i < P; ++i) {
            if (fit[i] < pbest_fit[i]) {
                pbest_fit[i] = fit[i];
                pbest[i] = s[i];
            }
            if (pbest_fit[i] < gbest_fit) {
                gbest_fit = pbest_fit[i];
                gbest = pbest[i];
            }
        }
        out.trace.push_back(gbest_fit);
    }

    out.x = std::move(gbest);
    out.fitness = gbest_fit;
    return out;
}

TrainResult pso_train(const LlwnnModel& shape, const SupervisedSet& data,
                      const TrainConfig& cfg) {
    if (cfg.algorithm != TrainAlgorithm::pso)
        throw config_error("pso_train: config selects a different algorithm");
    validate_llwnn(shape);
    validate_supervised(data, shape.n_inputs);

    const std::size_t n = shape.n_inputs;
    const std::size_t dim = shape.units.size() * (3 * n + 1);
    std::vector<double> lo(dim), hi(dim);
    std::size_t k = 0;
    // Wider weight spread than llwnn_init: swarm diversity has to cover the
    // output range on its own, with no gradient steps to grow into it.
    for (std::size_t i = 0; i < shape.units.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j, ++k) lo[k] = 0.2, hi[k] = 1.0;   // scales
        for (std::size_t j = 0; j < n; ++j, ++k) lo[k] = 0.0, hi[k] = 1.0;   // translations
        for (std::size_t j = 0; j <= n; ++j, ++k) lo[k] = -0.5, hi[k] = 0.5; // weights
    }

    Objective f = [&](std::span<const double> params) {
        return mse_over(llwnn_decode(shape, params), data);
    };
    auto res = pso_minimize(f, lo, hi, cfg.pso, cfg.seed);

    TrainResult out;
    out.model = llwnn_decode(shape, res.x);
    out.trace = std::move(res.trace);
    return out;
}

TrainResult train_llwnn(const LlwnnModel& start, const SupervisedSet& data,
                        const TrainConfig& cfg) {
    return cfg.algorithm == TrainAlgorithm::bp ? bp_train(start, data, cfg)
                                               : pso_train(start, data, cfg);
}

// ===== wavelet-decomposed input pipeline =====

namespace {

// Normalized window split into additive components: MRA details and smooth,
// or the normalized window itself when decomposition is disabled.
// Components of the causal prefix norm[0..t); for levels = 0 the prefix is
// immaterial because raw lags never look past t - 1.
std::vector<std::vector<double>> prefix_components(std::span<const double> norm,
                                                   std::size_t t, const WllwnnConfig& cfg) {
    if (cfg.levels == 0) return {std::vector<double>(norm.begin(), norm.begin() + static_cast<std::ptrdiff_t>(t))};
    const auto filter = make_filter(wavelet_family_from_string(cfg.filter));
    auto decomp = mra(norm.first(t), filter, static_cast<int>(cfg.levels));
    std::vector<std::vector<double>> comps;
    comps.reserve(cfg.levels + 1);
    for (auto& d : decomp.details) comps.push_back(std::move(d));
    comps.push_back(std::move(decomp.smooth));
    return comps;
}

std::vector<double> features_at(const std::vector<std::vector<double>>& comps,
                                std::size_t t, std::size_t n_lags) {
    std::vector<double> row;
    row.reserve(comps.size() * n_lags);
    for (const auto& c : comps)
        for (std::size_t lag = 1; lag <= n_lags; ++lag) row.push_back(c[t - lag]);
    return row;
}

} // namespace

std::size_t wllwnn_feature_dim(const WllwnnConfig& cfg) {
    return cfg.n_lags * (cfg.levels + 1);
}

std::size_t wllwnn_min_window(const WllwnnConfig& cfg) {
    std::size_t reach = 0;
    if (cfg.levels > 0) {
        const auto filter = make_filter(wavelet_family_from_string(cfg.filter));
        reach = std::max(static_cast<std::size_t>(filter.width) << cfg.levels,
                         cfg.min_prefix);
    }
    return cfg.n_lags + reach + 1;
}

WllwnnPrep wllwnn_prepare(std::span<const double> residuals, const WllwnnConfig& cfg) {
    if (cfg.n_lags < 1) throw config_error("wllwnn_prepare: n_lags must be at least 1");
    for (double v : residuals)
        if (!std::isfinite(v)) throw data_error("wllwnn_prepare: non-finite residual");

    if (residuals.size() < wllwnn_min_window(cfg))
        throw data_error("wllwnn_prepare: residual history too short for the "
                         "requested lags and decomposition depth");

    WllwnnPrep prep;
    prep.config = cfg;
    prep.window.assign(residuals.begin(), residuals.end());
    prep.norm = minmax_params(prep.window);
    return prep;
}

SupervisedSet wllwnn_supervised(const WllwnnPrep& prep) {
    const auto norm = minmax_normalize(prep.window, prep.norm);
    const std::size_t n_lags = prep.config.n_lags;
    const std::size_t t0 = wllwnn_min_window(prep.config) - 1;
    const std::size_t n = prep.window.size();

    SupervisedSet set;
    set.inputs.resize(n - t0);
    set.targets.resize(n - t0);
    // Each row decomposes its own prefix; rows are independent.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n - t0); ++i) {
        const std::size_t t = t0 + static_cast<std::size_t>(i);
        const auto comps = prefix_components(norm, t, prep.config);
        set.inputs[static_cast<std::size_t>(i)] = features_at(comps, t, n_lags);
        set.targets[static_cast<std::size_t>(i)] = norm[t];
    }
    return set;
}

std::vector<double> wllwnn_next_features(const WllwnnPrep& prep) {
    const auto norm = minmax_normalize(prep.window, prep.norm);
    const auto comps = prefix_components(norm, norm.size(), prep.config);
    return features_at(comps, prep.window.size(), prep.config.n_lags);
}

std::vector<double> predict_recursive(const LlwnnModel& m, const WllwnnPrep& prep,
                                      std::size_t h) {
    if (h < 1) throw config_error("predict_recursive: horizon must be at least 1");
    if (m.n_inputs != wllwnn_feature_dim(prep.config))
        throw config_error("predict_recursive: model input width does not match "
                           "the feature dimension");
    WllwnnPrep cur = prep;
    std::vector<double> out;
    out.reserve(h);
    for (std::size_t step = 0; step < h; ++step) {
        const auto feats = wllwnn_next_features(cur);
        const double y = denormalize_one(llwnn_forward(m, feats), cur.norm);
        out.push_back(y);
        cur.window.push_back(y);
    }
    return out;
}

// ===== persistence =====

std::string llwnn_to_json(const LlwnnModel& m) {
    nlohmann::ordered_json j;
    j["n_inputs"] = m.n_inputs;
    j["wavelet_kind"] = kind_name(m.kind);
    j["units"] = nlohmann::ordered_json::array();
    for (const auto& u : m.units) {
        nlohmann::ordered_json ju;
        ju["a"] = u.a;
        ju["b"] = u.b;
        ju["w"] = u.w;
        j["units"].push_back(std::move(ju));
    }
    return j.dump(2) + "\n";
}

LlwnnModel llwnn_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("llwnn model json: ") + e.what());
    }
    try {
        LlwnnModel m;
        m.n_inputs = j.at("n_inputs").get<std::size_t>();
        m.kind = kind_from_name(j.at("wavelet_kind").get<std::string>());
        for (const auto& ju : j.at("units")) {
            LlwnnUnit u;
            u.a = ju.at("a").get<std::vector<double>>();
            u.b = ju.at("b").get<std::vector<double>>();
            u.w = ju.at("w").get<std::vector<double>>();
            m.units.push_back(std::move(u));
        }
        validate_llwnn(m);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("llwnn model json: ") + e.what());
    }
}

void save_llwnn(const LlwnnModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open '" + path + "' for writing");
    out << llwnn_to_json(m);
    if (!out) throw data_error("failed writing '" + path + "'");
}

LlwnnModel load_llwnn(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return llwnn_from_json(buf.str());
}

} // namespace garmanet
