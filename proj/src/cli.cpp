#include "garmanet/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "garmanet/data_io.hpp"
#include "garmanet/errors.hpp"
#include "garmanet/garma.hpp"
#include "garmanet/ggarch.hpp"
#include "garmanet/hybrid.hpp"
#include "garmanet/llwnn.hpp"
#include "garmanet/spectral.hpp"
#include "garmanet/wavelet.hpp"

namespace fs = std::filesystem;

namespace garmanet {
namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ===== list parsing =====

std::vector<double> parse_double_list(const std::string& text, char sep = ',') {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw config_error("cannot parse number '" + item + "' in list '" + text + "'");
        }
        if (pos != item.size())
            throw config_error("cannot parse number '" + item + "' in list '" + text + "'");
        out.push_back(v);
    }
    if (out.empty()) throw config_error("empty list '" + text + "'");
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    for (double v : parse_double_list(text)) {
        if (v < 0.0 || v != std::floor(v))
            throw config_error("expected non-negative integers in list '" + text + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

// ===== run plumbing =====

// Per-run bookkeeping: where artifacts go and what ends up in manifest.json.
struct RunContext {
    std::string command;
    fs::path dir;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string config_ini; // effective option values, INI text
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    std::time_t started_at = std::time(nullptr);
};

void prepare_output_dir(const fs::path& dir, bool force) {
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir))
            throw config_error("output path is not a directory: " + dir.string());
        if (!fs::is_empty(dir) && !force)
            throw config_error("output directory is not empty (pass --force to reuse): " +
                               dir.string());
    } else {
        fs::create_directories(dir);
    }
}

void write_text(RunContext& rc, const std::string& name, const std::string& text) {
    const fs::path p = rc.dir / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + p.string());
    out << text;
    if (!out) throw data_error("write failed: " + p.string());
    rc.outputs.push_back(name);
}

// The manifest records everything needed to repeat the run: the command, the
// effective configuration (defaults included), the seed, and the artifact
// list. Wall-clock fields vary between runs, so determinism comparisons are
// over the artifacts, not the manifest.
void write_manifest(RunContext& rc) {
    nlohmann::ordered_json j;
    j["tool"] = "garmanet";
    j["version"] = kToolVersion;
    j["command"] = rc.command;
    if (rc.has_seed) j["seed"] = rc.seed;
    j["config"] = rc.config_ini;
    j["outputs"] = rc.outputs;
    j["started_at"] = format_iso8601(static_cast<std::int64_t>(rc.started_at));
    j["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - rc.t0).count();
    const fs::path p = rc.dir / "manifest.json";
    std::ofstream out(p, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + p.string());
    out << j.dump(2) << "\n";
}

// ===== shared option blocks =====

struct InputOpts {
    std::string path;
    std::string timestamp_col = "timestamp";
    std::string value_col = "price";
    std::string fill = "none";
    bool log_ret = false;
};

void add_input_opts(CLI::App* sub, InputOpts& in) {
    sub->add_option("--input", in.path, "input CSV with a header row")->required();
    sub->add_option("--timestamp-col", in.timestamp_col, "timestamp column name");
    sub->add_option("--value-col", in.value_col, "value column name");
    sub->add_option("--fill", in.fill, "single-step gap handling")
        ->check(CLI::IsMember({"none", "interpolate"}));
    sub->add_flag("--log-returns", in.log_ret,
                  "work on log returns of the values instead of the values themselves");
}

std::vector<double> load_values(const InputOpts& in) {
    LoadOptions lo;
    lo.timestamp_column = in.timestamp_col;
    lo.value_column = in.value_col;
    lo.fill = in.fill == "interpolate" ? GapFill::interpolate : GapFill::none;
    auto series = load_series(in.path, lo);
    return in.log_ret ? log_returns(series.values) : series.values;
}

struct OutputOpts {
    std::string dir;
    bool force = false;
};

void add_output_opts(CLI::App* sub, OutputOpts& out, const char* flag = "--output") {
    sub->add_option(flag, out.dir, "output directory (must be empty unless --force)")
        ->required();
    sub->add_flag("--force", out.force, "allow writing into a non-empty output directory");
}

struct MeanOpts {
    std::size_t k = 1;
    std::size_t p = 1;
    std::size_t q = 0;
    std::string freqs = "auto";
    std::size_t truncation = 1000;
    std::size_t n_starts = 8;
    bool estimate_mu = false;
};

void add_mean_opts(CLI::App* sub, MeanOpts& m) {
    sub->add_option("--k", m.k, "number of seasonal memory factors (used with --freqs auto)");
    sub->add_option("--p", m.p, "autoregressive order");
    sub->add_option("--q", m.q, "moving-average order");
    sub->add_option("--freqs", m.freqs,
                    "'auto' (periodogram peaks) or comma-separated cycles per sample");
    sub->add_option("--truncation", m.truncation, "filter truncation length");
    sub->add_option("--n-starts", m.n_starts, "multi-start count for the optimizer");
    sub->add_flag("--estimate-mu", m.estimate_mu,
                  "estimate the process mean (otherwise fixed at 0)");
}

// Resolves --freqs against a data window: explicit lists pass through, auto
// picks the k largest separated periodogram peaks of that window.
std::vector<double> resolve_freqs(const std::string& spec, std::size_t k,
                                  std::span<const double> window) {
    if (spec == "auto") {
        if (k == 0) return {};
        return detect_gfrequencies(periodogram(window), k);
    }
    return parse_double_list(spec);
}

GarmaFitOptions mean_fit_options(const MeanOpts& m) {
    GarmaFitOptions o;
    o.truncation = m.truncation;
    o.n_starts = m.n_starts;
    o.estimate_mu = m.estimate_mu;
    return o;
}

struct NetOpts {
    std::size_t lags = 24;
    std::size_t levels = 10;
    std::string filter = "la8";
    std::size_t min_prefix = 0;
    std::size_t units = 10;
    std::string unit_wavelet = "gaussian";
    std::string algo = "bp";
    double lr = 0.5;
    std::size_t epochs = 2000;
    std::size_t pop = 20;
    std::size_t gens = 200;
    double c1 = 1.05;
    double c2 = 1.05;
};

void add_net_opts(CLI::App* sub, NetOpts& n) {
    sub->add_option("--lags", n.lags, "number of lagged inputs");
    sub->add_option("--levels", n.levels,
                    "wavelet decomposition depth for the features (0 = raw lags)");
    sub->add_option("--filter", n.filter, "wavelet filter for the features")
        ->check(CLI::IsMember({"haar", "d4", "la8"}));
    sub->add_option("--min-prefix", n.min_prefix,
                    "shortest history prefix a decomposed training row may use");
    sub->add_option("--units", n.units, "hidden wavelet units");
    sub->add_option("--unit-wavelet", n.unit_wavelet, "hidden-unit mother wavelet")
        ->check(CLI::IsMember({"gaussian", "mexican_hat"}));
    sub->add_option("--algo", n.algo, "training algorithm")
        ->check(CLI::IsMember({"bp", "pso"}));
    sub->add_option("--lr", n.lr, "backpropagation learning rate");
    sub->add_option("--epochs", n.epochs, "backpropagation epochs");
    sub->add_option("--pop", n.pop, "swarm population size");
    sub->add_option("--gens", n.gens, "swarm generations");
    sub->add_option("--c1", n.c1, "swarm cognitive acceleration");
    sub->add_option("--c2", n.c2, "swarm social acceleration");
}

void fill_net_spec(ResidualSpec& rs, const NetOpts& n) {
    rs.kind = n.levels == 0 ? ResidualKind::llwnn : ResidualKind::wllwnn;
    rs.features.n_lags = n.lags;
    rs.features.levels = n.levels;
    rs.features.filter = n.filter;
    rs.features.min_prefix = n.min_prefix;
    rs.n_units = n.units;
    rs.wavelet = n.unit_wavelet == "mexican_hat" ? WaveletKind::mexican_hat
                                                 : WaveletKind::gaussian;
    rs.train.algorithm = n.algo == "pso" ? TrainAlgorithm::pso : TrainAlgorithm::bp;
    rs.train.bp.learning_rate = n.lr;
    rs.train.bp.epochs = n.epochs;
    rs.train.pso.population = n.pop;
    rs.train.pso.generations = n.gens;
    rs.train.pso.c1 = n.c1;
    rs.train.pso.c2 = n.c2;
}

// ===== inline simulation model parser =====

// Comma-separated key=value description of a simulation model, e.g.
// "mu=0,ar=0.5|-0.2,nu=0.966,d=0.3". Each nu= opens a seasonal factor and the
// following d= completes it; ar= and ma= take '|'-separated coefficient lists.
GarmaModel parse_garma_inline(const std::string& text) {
    GarmaModel m;
    m.mu = 0.0;
    bool factor_open = false;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw config_error("simulation model: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        try {
            if (key == "mu") {
                m.mu = std::stod(val);
            } else if (key == "sigma2") {
                m.sigma2 = std::stod(val);
            } else if (key == "truncation") {
                m.truncation = static_cast<std::size_t>(std::stoul(val));
            } else if (key == "ar") {
                m.ar = parse_double_list(val, '|');
            } else if (key == "ma") {
                m.ma = parse_double_list(val, '|');
            } else if (key == "nu") {
                if (factor_open)
                    throw config_error("simulation model: nu without a matching d");
                m.factors.push_back({std::stod(val), 0.0});
                factor_open = true;
            } else if (key == "d") {
                if (!factor_open)
                    throw config_error("simulation model: d before any nu");
                m.factors.back().d = std::stod(val);
                factor_open = false;
            } else {
                throw config_error("simulation model: unknown key '" + key + "'");
            }
        } catch (const config_error&) {
            throw;
        } catch (const std::exception&) {
            throw config_error("simulation model: cannot parse value '" + val + "' for '" +
                               key + "'");
        }
    }
    if (factor_open) throw config_error("simulation model: nu without a matching d");
    return m;
}

// ===== subcommand bodies =====

struct DecomposeOpts {
    InputOpts in;
    OutputOpts out;
    std::string filter = "la8";
    std::size_t levels = 0; // 0 = deepest level the sample supports
};

void run_decompose(const DecomposeOpts& o, RunContext& rc) {
    prepare_output_dir(o.out.dir, o.out.force);
    const auto x = load_values(o.in);
    const auto filter = make_filter(wavelet_family_from_string(o.filter));
    int levels = static_cast<int>(o.levels);
    if (levels == 0) levels = max_level(x.size(), filter.width);
    const auto components = mra(x, filter, levels);

    const auto component_csv = [](const std::vector<double>& v) {
        std::string csv = "t,value\n";
        for (std::size_t t = 0; t < v.size(); ++t)
            csv += std::to_string(t) + "," + g17(v[t]) + "\n";
        return csv;
    };
    for (int j = 0; j < levels; ++j)
        write_text(rc, "D" + std::to_string(j + 1) + ".csv",
                   component_csv(components.details[static_cast<std::size_t>(j)]));
    write_text(rc, "S" + std::to_string(levels) + ".csv", component_csv(components.smooth));
    write_manifest(rc);
}

struct DiagnoseOpts {
    InputOpts in;
    OutputOpts out;
    std::string exponents = "0.5,0.6,0.7,0.8";
};

void run_diagnose(const DiagnoseOpts& o, RunContext& rc) {
    prepare_output_dir(o.out.dir, o.out.force);
    const auto x = load_values(o.in);
    const auto pg = periodogram(x);

    std::string pcsv = "freq,power\n";
    for (std::size_t i = 0; i < pg.freqs.size(); ++i)
        pcsv += g17(pg.freqs[i]) + "," + g17(pg.power[i]) + "\n";
    write_text(rc, "periodogram.csv", pcsv);

    const auto exps = parse_double_list(o.exponents);
    const auto table = long_memory_table(x, exps);
    std::string lcsv = "method,bandwidth,d_hat,std_error,p_value\n";
    for (const auto& row : table) {
        lcsv += row.method == LongMemoryMethod::gph ? "gph" : "local_whittle";
        lcsv += "," + std::to_string(row.bandwidth) + "," + g17(row.d_hat) + "," +
                g17(row.std_error) + "," + g17(row.p_value) + "\n";
    }
    write_text(rc, "longmem.csv", lcsv);
    write_manifest(rc);
}

struct FitGarmaOpts {
    InputOpts in;
    OutputOpts out;
    MeanOpts mean;
    std::uint64_t seed = 1;
};

void run_fit_garma(const FitGarmaOpts& o, RunContext& rc) {
    prepare_output_dir(o.out.dir, o.out.force);
    const auto x = load_values(o.in);
    const auto freqs = resolve_freqs(o.mean.freqs, o.mean.k, x);
    auto opts = mean_fit_options(o.mean);
    opts.seed = o.seed;
    const auto model = garma_fit(x, o.mean.p, o.mean.q, freqs, opts);
    write_text(rc, "garma_model.json", garma_to_json(model));
    write_manifest(rc);
}

struct FitGgarchOpts {
    InputOpts in;
    OutputOpts out;
    std::string garma_model; // optional: filter the input through this first
    std::size_t burn = 0;
    std::size_t k = 0;
    std::string freqs = "auto";
    std::size_t truncation = 1000;
    std::size_t n_starts = 8;
    std::uint64_t seed = 1;
};

void run_fit_ggarch(const FitGgarchOpts& o, RunContext& rc) {
    prepare_output_dir(o.out.dir, o.out.force);
    auto eps = load_values(o.in);
    if (!o.garma_model.empty()) {
        const auto mean = load_garma(o.garma_model);
        eps = garma_apply_filter(eps, mean);
    }
    if (o.burn >= eps.size()) throw config_error("burn-in leaves no residuals");
    eps.erase(eps.begin(), eps.begin() + static_cast<std::ptrdiff_t>(o.burn));

    std::vector<double> freqs;
    if (o.freqs == "auto" && o.k > 0) {
        // volatility memory shows up in the squared residuals
        std::vector<double> sq(eps.size());
        for (std::size_t t = 0; t < eps.size(); ++t) sq[t] = eps[t] * eps[t];
        freqs = detect_gfrequencies(periodogram(sq), o.k);
    } else if (o.freqs != "auto") {
        freqs = parse_double_list(o.freqs);
    }

    GGarchFitOptions opts;
    opts.truncation = o.truncation;
    opts.n_starts = o.n_starts;
    opts.seed = o.seed;
    const auto model = ggarch_fit(eps, freqs, opts);
    write_text(rc, "ggarch_model.json", ggarch_to_json(model));
    write_manifest(rc);
}

struct TrainOpts {
    InputOpts in;
    OutputOpts out;
    std::string mean = "none"; // none = the series itself feeds the network
    MeanOpts mean_opts;
    NetOpts net;
    std::size_t burn = 0;
    std::uint64_t seed = 1;
};

void run_train(const TrainOpts& o, RunContext& rc) {
    prepare_output_dir(o.out.dir, o.out.force);
    const auto x = load_values(o.in);

    MeanSpec ms;
    if (o.mean == "garma") {
        ms.enabled = true;
        ms.p = o.mean_opts.p;
        ms.q = o.mean_opts.q;
        ms.freqs = resolve_freqs(o.mean_opts.freqs, o.mean_opts.k, x);
        ms.options = mean_fit_options(o.mean_opts);
    } else {
        ms.enabled = false;
    }

    ResidualSpec rs;
    fill_net_spec(rs, o.net);
    rs.burn = o.burn;

    const auto model = fit_hybrid(x, ms, rs, o.seed);
    write_text(rc, "model.json", hybrid_to_json(model));
    write_manifest(rc);
}

struct ForecastOpts {
    InputOpts in;
    OutputOpts out;
    std::string model;
    std::size_t h = 72;
};

void run_forecast(const ForecastOpts& o, RunContext& rc) {
    prepare_output_dir(o.out.dir, o.out.force);
    const auto x = load_values(o.in);

    // accept either a full hybrid document or a bare mean-model document
    std::ifstream in(o.model, std::ios::binary);
    if (!in) throw data_error("cannot open for reading: " + o.model);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    HybridModel m;
    bool is_hybrid = false;
    try {
        is_hybrid = nlohmann::json::parse(text).contains("residual_kind");
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("model file is not valid JSON: ") + e.what());
    }
    if (is_hybrid) {
        m = hybrid_from_json(text);
    } else {
        m.mean = garma_from_json(text);
        m.kind = ResidualKind::none;
    }

    const auto fc = forecast_hybrid(m, x, o.h);
    std::string csv = fc.sigma2.empty() ? "h,mean,residual,total\n"
                                        : "h,mean,residual,total,sigma2\n";
    for (std::size_t j = 0; j < o.h; ++j) {
        csv += std::to_string(j + 1) + "," + g17(fc.mean[j]) + "," + g17(fc.residual[j]) +
               "," + g17(fc.total[j]);
        if (!fc.sigma2.empty()) csv += "," + g17(fc.sigma2[j]);
        csv += "\n";
    }
    write_text(rc, "forecast.csv", csv);
    write_manifest(rc);
}

struct BacktestOpts {
    InputOpts in;
    OutputOpts out;
    MeanOpts mean;
    NetOpts net;
    std::size_t init_len = 0;
    std::size_t train_len = 0;
    std::size_t test_len = 0;
    std::string horizons = "6,12,24,48,72";
    std::size_t ggarch_k = 0;
    std::string ggarch_freqs = "auto";
    std::size_t ggarch_truncation = 1000;
    std::size_t ggarch_n_starts = 8;
    std::uint64_t seed = 1;
};

void run_backtest(const BacktestOpts& o, RunContext& rc) {
    prepare_output_dir(o.out.dir, o.out.force);
    const auto x = load_values(o.in);
    const SplitSpec split{o.init_len, o.train_len, o.test_len};
    const auto parts = split_series(x, split);

    // frequency detection only ever sees the fitting window
    std::vector<double> fitwin = parts.init;
    fitwin.insert(fitwin.end(), parts.train.begin(), parts.train.end());

    StandardSetOptions opts;
    opts.mean.p = o.mean.p;
    opts.mean.q = o.mean.q;
    opts.mean.freqs = resolve_freqs(o.mean.freqs, o.mean.k, fitwin);
    opts.mean.options = mean_fit_options(o.mean);

    ResidualSpec net_probe;
    fill_net_spec(net_probe, o.net);
    opts.features = net_probe.features;
    opts.n_units = net_probe.n_units;
    opts.wavelet = net_probe.wavelet;
    opts.bp = net_probe.train.bp;
    opts.pso = net_probe.train.pso;

    opts.ggarch.truncation = o.ggarch_truncation;
    opts.ggarch.n_starts = o.ggarch_n_starts;
    if (o.ggarch_freqs == "auto") {
        if (o.ggarch_k > 0) {
            std::vector<double> sq(fitwin.size());
            for (std::size_t t = 0; t < fitwin.size(); ++t) sq[t] = fitwin[t] * fitwin[t];
            opts.ggarch_freqs = detect_gfrequencies(periodogram(sq), o.ggarch_k);
        }
    } else {
        opts.ggarch_freqs = parse_double_list(o.ggarch_freqs);
    }

    const auto models = standard_model_set(opts);
    const auto report = horizon_backtest(models, x, split, parse_size_list(o.horizons), o.seed);
    write_report(report, o.out.dir);
    rc.outputs.push_back("report.csv");
    rc.outputs.push_back("forecasts.json");
    write_manifest(rc);
}

struct SimulateOpts {
    OutputOpts out;
    std::string garma;
    std::size_t n = 0;
    std::size_t burn = 0; // 0 = the model's truncation length
    std::uint64_t seed = 1;
};

void run_simulate(const SimulateOpts& o, RunContext& rc) {
    prepare_output_dir(o.out.dir, o.out.force);
    const auto model = parse_garma_inline(o.garma);
    const std::size_t burn = o.burn == 0 ? model.truncation : o.burn;
    const auto y = garma_simulate(model, o.n, burn, o.seed);

    // hourly grid anchored at an arbitrary fixed origin so reruns match byte
    // for byte
    const std::int64_t start = parse_iso8601("2000-01-01T00:00:00");
    std::string csv = "timestamp,value\n";
    for (std::size_t t = 0; t < y.size(); ++t)
        csv += format_iso8601(start + static_cast<std::int64_t>(t) * 3600) + "," +
               g17(y[t]) + "\n";
    write_text(rc, "series.csv", csv);
    write_manifest(rc);
}

} // namespace

// ===== entry point =====

int cli_main(int argc, char** argv) {
    CLI::App app{"seasonal long-memory forecasting toolkit"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "read options from an INI file ([subcommand] sections)");
    app.set_version_flag("--version", kToolVersion);

    DecomposeOpts dec;
    auto* sub_dec = app.add_subcommand(
        "decompose", "split a series into wavelet detail and smooth components");
    add_input_opts(sub_dec, dec.in);
    add_output_opts(sub_dec, dec.out);
    sub_dec->add_option("--filter", dec.filter, "wavelet filter")
        ->check(CLI::IsMember({"haar", "d4", "la8"}));
    sub_dec->add_option("--levels", dec.levels, "decomposition depth (0 = deepest possible)");

    DiagnoseOpts dia;
    auto* sub_dia = app.add_subcommand(
        "diagnose", "periodogram and long-memory estimates for a series");
    add_input_opts(sub_dia, dia.in);
    add_output_opts(sub_dia, dia.out);
    sub_dia->add_option("--exponents", dia.exponents,
                        "bandwidth exponents for the estimator table");

    FitGarmaOpts fg;
    auto* sub_fg = app.add_subcommand("fit-garma", "fit the seasonal long-memory mean model");
    add_input_opts(sub_fg, fg.in);
    add_output_opts(sub_fg, fg.out);
    add_mean_opts(sub_fg, fg.mean);
    sub_fg->add_option("--seed", fg.seed, "master seed for the multi-start optimizer");

    FitGgarchOpts gg;
    auto* sub_gg = app.add_subcommand(
        "fit-ggarch", "fit the long-memory log-variance model on residuals");
    add_input_opts(sub_gg, gg.in);
    add_output_opts(sub_gg, gg.out);
    sub_gg->add_option("--garma-model", gg.garma_model,
                       "mean-model JSON whose residuals to use instead of the raw values");
    sub_gg->add_option("--burn", gg.burn, "residuals to drop before fitting");
    sub_gg->add_option("--k", gg.k, "number of seasonal variance factors");
    sub_gg->add_option("--freqs", gg.freqs,
                       "'auto' (peaks of the squared residuals) or comma-separated list");
    sub_gg->add_option("--truncation", gg.truncation, "filter truncation length");
    sub_gg->add_option("--n-starts", gg.n_starts, "multi-start count for the optimizer");
    sub_gg->add_option("--seed", gg.seed, "master seed for the multi-start optimizer");

    TrainOpts tr;
    auto* sub_tr = app.add_subcommand(
        "train", "train a network forecaster, optionally on mean-model residuals");
    add_input_opts(sub_tr, tr.in);
    add_output_opts(sub_tr, tr.out);
    sub_tr->add_option("--mean", tr.mean, "conditional-mean stage")
        ->check(CLI::IsMember({"none", "garma"}));
    add_mean_opts(sub_tr, tr.mean_opts);
    add_net_opts(sub_tr, tr.net);
    sub_tr->add_option("--burn", tr.burn, "residuals to drop before the network stage");
    sub_tr->add_option("--seed", tr.seed, "master seed for fitting and training");

    ForecastOpts fc;
    auto* sub_fc = app.add_subcommand(
        "forecast", "forecast from a saved model over the end of a series");
    add_input_opts(sub_fc, fc.in);
    add_output_opts(sub_fc, fc.out);
    sub_fc->add_option("--model", fc.model, "saved model JSON (hybrid or mean-only)")
        ->required();
    sub_fc->add_option("--horizon", fc.h, "forecast horizon");

    BacktestOpts bt;
    auto* sub_bt = app.add_subcommand(
        "backtest", "fixed-origin comparison of the nine standard model configurations");
    add_input_opts(sub_bt, bt.in);
    add_output_opts(sub_bt, bt.out, "--report-dir");
    add_mean_opts(sub_bt, bt.mean);
    add_net_opts(sub_bt, bt.net);
    sub_bt->add_option("--init", bt.init_len, "initialization segment length")->required();
    sub_bt->add_option("--train", bt.train_len, "training segment length")->required();
    sub_bt->add_option("--test", bt.test_len, "test segment length")->required();
    sub_bt->add_option("--horizons", bt.horizons, "comma-separated forecast horizons");
    sub_bt->add_option("--ggarch-k", bt.ggarch_k, "seasonal variance factors");
    sub_bt->add_option("--ggarch-freqs", bt.ggarch_freqs,
                       "'auto' or comma-separated variance frequencies");
    sub_bt->add_option("--ggarch-truncation", bt.ggarch_truncation,
                       "variance filter truncation length");
    sub_bt->add_option("--ggarch-n-starts", bt.ggarch_n_starts,
                       "variance fit multi-start count");
    sub_bt->add_option("--seed", bt.seed, "master seed; each model derives its own");

    SimulateOpts sim;
    auto* sub_sim = app.add_subcommand("simulate", "generate a synthetic seasonal series");
    add_output_opts(sub_sim, sim.out);
    sub_sim
        ->add_option("--garma", sim.garma,
                     "model description, e.g. 'mu=0,ar=0.5|-0.2,nu=0.966,d=0.3'")
        ->required();
    sub_sim->add_option("--n", sim.n, "number of observations")->required();
    sub_sim->add_option("--burn", sim.burn,
                        "burn-in length (0 = the model's truncation length)");
    sub_sim->add_option("--seed", sim.seed, "simulation seed");

    // lets a trailing --config reach the main app from behind the subcommand
    for (auto* sub : {sub_dec, sub_dia, sub_fg, sub_gg, sub_tr, sub_fc, sub_bt, sub_sim})
        sub->fallthrough();

    const auto make_context = [&](CLI::App* sub, std::uint64_t seed, bool has_seed,
                                  const std::string& dir) {
        RunContext rc;
        rc.command = sub->get_name();
        rc.dir = dir;
        rc.seed = seed;
        rc.has_seed = has_seed;
        rc.config_ini = "[" + sub->get_name() + "]\n" + sub->config_to_str(true, false);
        return rc;
    };

    sub_dec->callback([&] {
        auto rc = make_context(sub_dec, 0, false, dec.out.dir);
        run_decompose(dec, rc);
    });
    sub_dia->callback([&] {
        auto rc = make_context(sub_dia, 0, false, dia.out.dir);
        run_diagnose(dia, rc);
    });
    sub_fg->callback([&] {
        auto rc = make_context(sub_fg, fg.seed, true, fg.out.dir);
        run_fit_garma(fg, rc);
    });
    sub_gg->callback([&] {
        auto rc = make_context(sub_gg, gg.seed, true, gg.out.dir);
        run_fit_ggarch(gg, rc);
    });
    sub_tr->callback([&] {
        auto rc = make_context(sub_tr, tr.seed, true, tr.out.dir);
        run_train(tr, rc);
    });
    sub_fc->callback([&] {
        auto rc = make_context(sub_fc, 0, false, fc.out.dir);
        run_forecast(fc, rc);
    });
    sub_bt->callback([&] {
        auto rc = make_context(sub_bt, bt.seed, true, bt.out.dir);
        run_backtest(bt, rc);
    });
    sub_sim->callback([&] {
        auto rc = make_context(sub_sim, sim.seed, true, sim.out.dir);
        run_simulate(sim, rc);
    });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const data_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints help or the parse message
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace garmanet
