#include "garmanet/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "garmanet/errors.hpp"
#include "garmanet/rng.hpp"
#include "json.hpp"

namespace garmanet {

namespace {

// Rethrows the in-flight stage exception with a locating prefix, keeping its
// type so the CLI exit-code mapping still sees the original category.
[[noreturn]] void rethrow_labeled(const std::string& label) {
    try {
        throw;
    } catch (const config_error& e) {
        throw config_error(label + ": " + e.what());
    } catch (const data_error& e) {
        throw data_error(label + ": " + e.what());
    } catch (const numeric_error& e) {
        throw numeric_error(label + ": " + e.what());
    }
}

bool is_network(ResidualKind k) {
    return k == ResidualKind::llwnn || k == ResidualKind::wllwnn;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string residual_kind_name(ResidualKind k) {
    switch (k) {
    case ResidualKind::none: return "none";
    case ResidualKind::llwnn: return "llwnn";
    case ResidualKind::wllwnn: return "wllwnn";
    case ResidualKind::ggarch: return "ggarch";
    }
    throw config_error("residual_kind_name: unknown kind");
}

ResidualKind residual_kind_from_name(const std::string& name) {
    if (name == "none") return ResidualKind::none;
    if (name == "llwnn") return ResidualKind::llwnn;
    if (name == "wllwnn") return ResidualKind::wllwnn;
    if (name == "ggarch") return ResidualKind::ggarch;
    throw config_error("residual_kind_from_name: unknown kind '" + name + "'");
}

void validate_hybrid(const HybridModel& m) {
    validate_model(m.mean);
    if (m.kind == ResidualKind::none) return;
    if (m.kind == ResidualKind::ggarch) {
        validate_ggarch(m.var);
        return;
    }
    validate_llwnn(m.net);
    if (m.kind == ResidualKind::llwnn && m.prep.config.levels != 0)
        throw config_error("validate_hybrid: llwnn residual model must use raw "
                           "lags (levels = 0)");
    if (m.kind == ResidualKind::wllwnn && m.prep.config.levels == 0)
        throw config_error("validate_hybrid: wllwnn residual model needs at "
                           "least one decomposition level");
    if (m.net.n_inputs != wllwnn_feature_dim(m.prep.config))
        throw config_error("validate_hybrid: network input width does not match "
                           "the feature dimension");
    if (!(m.prep.norm.y_max > m.prep.norm.y_min))
        throw config_error("validate_hybrid: degenerate normalization range");
    if (m.prep.window.size() < wllwnn_min_window(m.prep.config))
        throw data_error("validate_hybrid: stored residual window is too short");
    for (double v : m.prep.window)
        if (!std::isfinite(v))
            throw data_error("validate_hybrid: non-finite residual window value");
}

// ===== fitting =====

HybridModel fit_hybrid(std::span<const double> train, const MeanSpec& mean_spec,
                       const ResidualSpec& residual_spec, std::uint64_t seed) {
    HybridModel m;
    m.mean_enabled = mean_spec.enabled;
    m.kind = residual_spec.kind;

    try {
        if (mean_spec.enabled) {
            GarmaFitOptions opts = mean_spec.options;
            opts.seed = seed;
            m.mean = garma_fit(train, mean_spec.p, mean_spec.q, mean_spec.freqs, opts);
        } else {
            // Standalone network mode: identity mean, the series itself is
            // handed to stage 2.
            m.mean = GarmaModel{};
        }
    } catch (...) {
        rethrow_labeled("mean stage");
    }

    if (m.kind == ResidualKind::none) return m;

    try {
        auto eps = garma_apply_filter(train, m.mean);
        if (residual_spec.burn >= eps.size())
            throw config_error("burn-in leaves no residuals");
        if (residual_spec.burn > 0)
            eps.erase(eps.begin(), eps.begin() + static_cast<std::ptrdiff_t>(residual_spec.burn));

        if (m.kind == ResidualKind::ggarch) {
            GGarchFitOptions opts = residual_spec.ggarch;
            opts.seed = seed + 1;
            m.var = ggarch_fit(eps, residual_spec.ggarch_freqs, opts);
        } else {
            WllwnnConfig cfg = residual_spec.features;
            if (m.kind == ResidualKind::llwnn) cfg.levels = 0;
            if (m.kind == ResidualKind::wllwnn && cfg.levels == 0)
                throw config_error("wllwnn residual model needs at least one "
                                   "decomposition level");
            m.prep = wllwnn_prepare(eps, cfg);
            const auto data = wllwnn_supervised(m.prep);
            const auto start = llwnn_init(wllwnn_feature_dim(cfg), residual_spec.n_units,
                                          residual_spec.wavelet, seed + 1);
            TrainConfig tc = residual_spec.train;
            tc.seed = seed + 2;
            m.net = train_llwnn(start, data, tc).model;
        }
    } catch (...) {
        rethrow_labeled("residual stage");
    }

    return m;
}

double residual_fit_rmse(const HybridModel& m) {
    if (!is_network(m.kind))
        throw config_error("residual_fit_rmse: only network residual models "
                           "have an in-sample fit");
    const auto data = wllwnn_supervised(m.prep);
    double acc = 0.0;
    for (std::size_t i = 0; i < data.inputs.size(); ++i) {
        const double pred = denormalize_one(llwnn_forward(m.net, data.inputs[i]), m.prep.norm);
        const double act = denormalize_one(data.targets[i], m.prep.norm);
        acc += (pred - act) * (pred - act);
    }
    return std::sqrt(acc / static_cast<double>(data.inputs.size()));
}

// ===== forecasting =====

HybridForecast forecast_hybrid(const HybridModel& m, std::span<const double> history,
                               std::size_t h) {
    if (h < 1) throw config_error("forecast_hybrid: horizon must be at least 1");
    validate_hybrid(m);

    HybridForecast fc;
    fc.mean = garma_forecast(m.mean, history, h);
    fc.residual.assign(h, 0.0);

    if (is_network(m.kind)) {
        auto eps = garma_apply_filter(history, m.mean);
        if (eps.size() < wllwnn_min_window(m.prep.config))
            throw data_error("forecast_hybrid: history leaves too short a "
                             "residual window for the feature pipeline");
        WllwnnPrep cur = m.prep; // keep the training normalization
        cur.window = std::move(eps);
        fc.residual = predict_recursive(m.net, cur, h);
    } else if (m.kind == ResidualKind::ggarch) {
        const auto eps = garma_apply_filter(history, m.mean);
        fc.sigma2 = ggarch_forecast(m.var, eps, h);
    }

    fc.total.resize(h);
    for (std::size_t j = 0; j < h; ++j) fc.total[j] = fc.mean[j] + fc.residual[j];
    return fc;
}

// ===== evaluation =====

Metrics metrics(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.empty()) throw data_error("metrics: empty input");
    if (actual.size() != predicted.size())
        throw data_error("metrics: actual and predicted lengths differ");
    double abs_acc = 0.0;
    double sq_acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = actual[i] - predicted[i];
        if (!std::isfinite(d)) throw data_error("metrics: non-finite value");
        abs_acc += std::fabs(d);
        sq_acc += d * d;
    }
    const double n = static_cast<double>(actual.size());
    Metrics out;
    out.mae = abs_acc / n;
    out.mse = sq_acc / n;
    out.rmse = std::sqrt(out.mse);
    return out;
}

// ===== multi-horizon backtest =====

ForecastReport horizon_backtest(const std::vector<BacktestModelSpec>& models,
                                std::span<const double> series, const SplitSpec& split,
                                const std::vector<std::size_t>& horizons,
                                std::uint64_t seed) {
    if (models.empty()) throw config_error("horizon_backtest: no models given");
    if (horizons.empty()) throw config_error("horizon_backtest: no horizons given");
    for (std::size_t h : horizons) {
        if (h < 1) throw config_error("horizon_backtest: horizon must be at least 1");
        if (h > split.test_len)
            throw config_error("horizon_backtest: horizon exceeds the test segment");
    }
    for (std::size_t i = 0; i < models.size(); ++i)
        for (std::size_t j = i + 1; j < models.size(); ++j)
            if (models[i].name == models[j].name)
                throw config_error("horizon_backtest: duplicate model name '" +
                                   models[i].name + "'");

    const std::vector<double> series_vec(series.begin(), series.end());
    const auto parts = split_series(series_vec, split);

    std::vector<double> fitwin;
    fitwin.reserve(parts.init.size() + parts.train.size());
    fitwin.insert(fitwin.end(), parts.init.begin(), parts.init.end());
    fitwin.insert(fitwin.end(), parts.train.begin(), parts.train.end());

    const std::size_t h_max = *std::max_element(horizons.begin(), horizons.end());
    std::vector<std::size_t> hs = horizons;
    std::sort(hs.begin(), hs.end());

    ForecastReport report;
    report.actual.assign(parts.test.begin(), parts.test.begin() + static_cast<std::ptrdiff_t>(h_max));

    for (const auto& spec : models) {
        // Per-model seed from the name, so adding or reordering models never
        // changes another model's draw sequence.
        const std::uint64_t model_seed = Rng::splitmix64(seed ^ fnv1a(spec.name));

        std::vector<double> path;
        std::vector<double> sigma2;
        try {
            if (spec.baseline == BaselineKind::perfect_foresight) {
                path.assign(report.actual.begin(), report.actual.end());
            } else if (spec.baseline == BaselineKind::last_value) {
                if (fitwin.empty())
                    throw config_error("last-value baseline needs a non-empty "
                                       "fitting window");
                path.assign(h_max, fitwin.back());
            } else {
                ResidualSpec rs = spec.residual;
                rs.burn = split.init_len;
                const HybridModel hm = fit_hybrid(fitwin, spec.mean, rs, model_seed);
                auto fc = forecast_hybrid(hm, fitwin, h_max);
                path = std::move(fc.total);
                sigma2 = std::move(fc.sigma2);
            }
        } catch (...) {
            rethrow_labeled("model " + spec.name);
        }

        for (std::size_t h : hs) {
            const Metrics mt = metrics(std::span<const double>(report.actual).first(h),
                                       std::span<const double>(path).first(h));
            report.rows.push_back({spec.name, h, mt.mae, mt.mse, mt.rmse});
        }
        report.runs.push_back({spec.name, std::move(path), std::move(sigma2)});
    }

    std::sort(report.rows.begin(), report.rows.end(),
              [](const ReportRow& a, const ReportRow& b) {
                  if (a.model != b.model) return a.model < b.model;
                  return a.horizon < b.horizon;
              });
    std::sort(report.runs.begin(), report.runs.end(),
              [](const ModelRun& a, const ModelRun& b) { return a.name < b.name; });
    return report;
}

std::vector<BacktestModelSpec> standard_model_set(const StandardSetOptions& opts) {
    MeanSpec mean_on = opts.mean;
    mean_on.enabled = true;
    MeanSpec mean_off;
    mean_off.enabled = false;

    WllwnnConfig raw = opts.features;
    raw.levels = 0;

    const auto net_spec = [&](ResidualKind kind, TrainAlgorithm alg) {
        ResidualSpec rs;
        rs.kind = kind;
        rs.features = (kind == ResidualKind::llwnn) ? raw : opts.features;
        rs.n_units = opts.n_units;
        rs.wavelet = opts.wavelet;
        rs.train.algorithm = alg;
        rs.train.bp = opts.bp;
        rs.train.pso = opts.pso;
        return rs;
    };

    ResidualSpec garch_spec;
    garch_spec.kind = ResidualKind::ggarch;
    garch_spec.ggarch = opts.ggarch;
    garch_spec.ggarch_freqs = opts.ggarch_freqs;

    std::vector<BacktestModelSpec> set;
    set.push_back({"llwnn-bp", BaselineKind::none, mean_off,
                   net_spec(ResidualKind::llwnn, TrainAlgorithm::bp)});
    set.push_back({"llwnn-pso", BaselineKind::none, mean_off,
                   net_spec(ResidualKind::llwnn, TrainAlgorithm::pso)});
    set.push_back({"garma-llwnn-bp", BaselineKind::none, mean_on,
                   net_spec(ResidualKind::llwnn, TrainAlgorithm::bp)});
    set.push_back({"garma-llwnn-pso", BaselineKind::none, mean_on,
                   net_spec(ResidualKind::llwnn, TrainAlgorithm::pso)});
    set.push_back({"wllwnn-bp", BaselineKind::none, mean_off,
                   net_spec(ResidualKind::wllwnn, TrainAlgorithm::bp)});
    set.push_back({"wllwnn-pso", BaselineKind::none, mean_off,
                   net_spec(ResidualKind::wllwnn, TrainAlgorithm::pso)});
    set.push_back({"garma-wllwnn-bp", BaselineKind::none, mean_on,
                   net_spec(ResidualKind::wllwnn, TrainAlgorithm::bp)});
    set.push_back({"garma-wllwnn-pso", BaselineKind::none, mean_on,
                   net_spec(ResidualKind::wllwnn, TrainAlgorithm::pso)});
    set.push_back({"garma-ggarch", BaselineKind::none, mean_on, garch_spec});
    return set;
}

// ===== report output =====

std::string report_csv(const ForecastReport& report) {
    std::string out = "model,horizon,mae,mse,rmse\n";
    for (const auto& r : report.rows) {
        out += r.model;
        out += ',';
        out += std::to_string(r.horizon);
        out += ',';
        out += format_g(r.mae);
        out += ',';
        out += format_g(r.mse);
        out += ',';
        out += format_g(r.rmse);
        out += '\n';
    }
    return out;
}

std::string report_json(const ForecastReport& report) {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json row;
        row["model"] = r.model;
        row["horizon"] = r.horizon;
        row["mae"] = r.mae;
        row["mse"] = r.mse;
        row["rmse"] = r.rmse;
        j["rows"].push_back(std::move(row));
    }
    j["actual"] = report.actual;
    j["models"] = nlohmann::ordered_json::object();
    for (const auto& run : report.runs) {
        nlohmann::ordered_json one;
        one["forecast"] = run.forecast;
        if (!run.sigma2.empty()) one["sigma2"] = run.sigma2;
        j["models"][run.name] = std::move(one);
    }
    return j.dump(2) + "\n";
}

void write_report(const ForecastReport& report, const std::string& dir) {
    if (!std::filesystem::is_directory(dir))
        throw config_error("write_report: not a directory: " + dir);
    const auto csv_path = std::filesystem::path(dir) / "report.csv";
    const auto json_path = std::filesystem::path(dir) / "forecasts.json";
    std::ofstream csv(csv_path);
    if (!csv) throw data_error("write_report: cannot open " + csv_path.string());
    csv << report_csv(report);
    std::ofstream js(json_path);
    if (!js) throw data_error("write_report: cannot open " + json_path.string());
    js << report_json(report);
}

// ===== persistence =====

std::string hybrid_to_json(const HybridModel& m) {
    nlohmann::ordered_json j;
    j["mean_enabled"] = m.mean_enabled;
    j["mean"] = nlohmann::ordered_json::parse(garma_to_json(m.mean));
    j["residual_kind"] = residual_kind_name(m.kind);
    if (is_network(m.kind)) {
        j["net"] = nlohmann::ordered_json::parse(llwnn_to_json(m.net));
        nlohmann::ordered_json feat;
        feat["n_lags"] = m.prep.config.n_lags;
        feat["levels"] = m.prep.config.levels;
        feat["filter"] = m.prep.config.filter;
        feat["min_prefix"] = m.prep.config.min_prefix;
        j["features"] = std::move(feat);
        nlohmann::ordered_json norm;
        norm["y_min"] = m.prep.norm.y_min;
        norm["y_max"] = m.prep.norm.y_max;
        j["norm"] = std::move(norm);
        j["window"] = m.prep.window;
    } else if (m.kind == ResidualKind::ggarch) {
        j["var"] = nlohmann::ordered_json::parse(ggarch_to_json(m.var));
    }
    return j.dump(2) + "\n";
}

HybridModel hybrid_from_json(const std::string& text) {
    HybridModel m;
    try {
        const auto j = nlohmann::ordered_json::parse(text);
        m.mean_enabled = j.at("mean_enabled").get<bool>();
        m.mean = garma_from_json(j.at("mean").dump());
        m.kind = residual_kind_from_name(j.at("residual_kind").get<std::string>());
        if (is_network(m.kind)) {
            m.net = llwnn_from_json(j.at("net").dump());
            m.prep.config.n_lags = j.at("features").at("n_lags").get<std::size_t>();
            m.prep.config.levels = j.at("features").at("levels").get<std::size_t>();
            m.prep.config.filter = j.at("features").at("filter").get<std::string>();
            m.prep.config.min_prefix = j.at("features").at("min_prefix").get<std::size_t>();
            m.prep.norm.y_min = j.at("norm").at("y_min").get<double>();
            m.prep.norm.y_max = j.at("norm").at("y_max").get<double>();
            m.prep.window = j.at("window").get<std::vector<double>>();
        } else if (m.kind == ResidualKind::ggarch) {
            m.var = ggarch_from_json(j.at("var").dump());
        }
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("hybrid_from_json: ") + e.what());
    }
    validate_hybrid(m);
    return m;
}

void save_hybrid(const HybridModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("save_hybrid: cannot open " + path);
    out << hybrid_to_json(m);
}

HybridModel load_hybrid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("load_hybrid: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return hybrid_from_json(buf.str());
}

} // namespace garmanet
