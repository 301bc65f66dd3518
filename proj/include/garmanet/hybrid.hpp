#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "garmanet/data_io.hpp"
#include "garmanet/garma.hpp"
#include "garmanet/ggarch.hpp"
#include "garmanet/llwnn.hpp"

namespace garmanet {

// Two-stage composition y_t = mu_t + eps_t: a seasonal long-memory model
// carries the conditional mean, and whatever structure is left in the
// residuals goes to a second model. The residual slot takes a wavelet-input
// network (wllwnn), a raw-lag network (llwnn), a log-variance model (ggarch),
// or nothing.

enum class ResidualKind { none, llwnn, wllwnn, ggarch };

std::string residual_kind_name(ResidualKind k);
ResidualKind residual_kind_from_name(const std::string& name);

struct HybridModel {
    GarmaModel mean;
    // false for standalone network models: the series itself plays the role
    // of the residuals and the mean forecast is identically zero.
    bool mean_enabled = true;
    ResidualKind kind = ResidualKind::none;
    LlwnnModel net;  // llwnn / wllwnn
    WllwnnPrep prep; // llwnn / wllwnn; llwnn keeps levels = 0 (raw lags)
    GGarchModel var; // ggarch
};

void validate_hybrid(const HybridModel& m);

// ===== fitting =====

struct MeanSpec {
    bool enabled = true; // false: skip stage 1, residuals = the series itself
    std::size_t p = 1;
    std::size_t q = 0;
    std::vector<double> freqs; // Gegenbauer frequencies, cycles per sample
    GarmaFitOptions options;   // seed is overridden by fit_hybrid
};

struct ResidualSpec {
    ResidualKind kind = ResidualKind::none;
    // Residuals dropped before stage-2 preparation. The backtest sets this to
    // the initialization length so the network never trains on the filter's
    // zero-start transient.
    std::size_t burn = 0;
    WllwnnConfig features; // n_lags / levels / filter; llwnn forces levels = 0
    std::size_t n_units = 10;
    WaveletKind wavelet = WaveletKind::gaussian;
    TrainConfig train;            // seed is overridden by fit_hybrid
    GGarchFitOptions ggarch;      // ggarch kind only; seed overridden
    std::vector<double> ggarch_freqs;
};

// Stage 1 fits the mean model on the whole window (seed), stage 2 extracts
// its residuals, drops `burn` of them, and trains the residual model
// (network init seed + 1, training seed + 2). Errors from either stage are
// rethrown with a "mean stage:" / "residual stage:" prefix.
HybridModel fit_hybrid(std::span<const double> train, const MeanSpec& mean_spec,
                       const ResidualSpec& residual_spec, std::uint64_t seed);

// In-sample RMSE of the network residual model over its stored training
// window, on the original residual scale. Network kinds only.
double residual_fit_rmse(const HybridModel& m);

// ===== forecasting =====

struct HybridForecast {
    std::vector<double> mean;     // stage-1 path
    std::vector<double> residual; // stage-2 path; zero for none / ggarch
    std::vector<double> total;    // mean + residual
    std::vector<double> sigma2;   // ggarch only: variance path, else empty
};

// h-step path from the end of `history`: the mean model forecasts
// recursively, the network predicts its own residual path recursively from
// the filtered history, and a ggarch residual model contributes variances
// only (its point forecast is zero).
HybridForecast forecast_hybrid(const HybridModel& m, std::span<const double> history,
                               std::size_t h);

// ===== evaluation =====

struct Metrics {
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
};

Metrics metrics(std::span<const double> actual, std::span<const double> predicted);

// ===== multi-horizon backtest =====

// Cheating / naive reference forecasters for harness sanity checks.
enum class BaselineKind { none, perfect_foresight, last_value };

struct BacktestModelSpec {
    std::string name;
    BaselineKind baseline = BaselineKind::none; // != none ignores the specs
    MeanSpec mean;
    ResidualSpec residual;
};

struct ReportRow {
    std::string model;
    std::size_t horizon = 0;
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
};

struct ModelRun {
    std::string name;
    std::vector<double> forecast; // full max-horizon path
    std::vector<double> sigma2;   // ggarch models only
};

struct ForecastReport {
    std::vector<ReportRow> rows; // ordered by (model name, horizon)
    std::vector<ModelRun> runs;  // ordered by model name
    std::vector<double> actual;  // first max-horizon test values
};

inline const std::vector<std::size_t> kDefaultHorizons = {6, 12, 24, 48, 72};

// Fixed-origin protocol: every model fits on init + train (stage 2 burns the
// init residuals), forecasts one max-horizon recursive path from the end of
// training, and each requested horizon scores a prefix of that path against
// the first test values. Each model derives its own seed from (seed, name),
// so results do not depend on the order of the set.
ForecastReport horizon_backtest(const std::vector<BacktestModelSpec>& models,
                                std::span<const double> series, const SplitSpec& split,
                                const std::vector<std::size_t>& horizons = kDefaultHorizons,
                                std::uint64_t seed = 1);

// The nine standard comparison configurations: llwnn-bp, llwnn-pso,
// garma-llwnn-bp, garma-llwnn-pso, wllwnn-bp, wllwnn-pso, garma-wllwnn-bp,
// garma-wllwnn-pso, garma-ggarch. Network models share the feature settings;
// the garma- variants share the mean spec; standalone networks skip stage 1.
struct StandardSetOptions {
    MeanSpec mean;
    WllwnnConfig features;  // levels applies to the wllwnn variants
    std::size_t n_units = 10;
    WaveletKind wavelet = WaveletKind::gaussian;
    BpConfig bp;
    PsoConfig pso;
    GGarchFitOptions ggarch;
    std::vector<double> ggarch_freqs;
};

std::vector<BacktestModelSpec> standard_model_set(const StandardSetOptions& opts);

// ===== report output =====

// CSV rows model,horizon,mae,mse,rmse with a header line.
std::string report_csv(const ForecastReport& report);
// JSON object with rows, the actual path, and each model's forecast path.
std::string report_json(const ForecastReport& report);
// Writes report.csv and forecasts.json into an existing directory.
void write_report(const ForecastReport& report, const std::string& dir);

// ===== persistence =====

std::string hybrid_to_json(const HybridModel& m);
HybridModel hybrid_from_json(const std::string& text);
void save_hybrid(const HybridModel& m, const std::string& path);
HybridModel load_hybrid(const std::string& path);

} // namespace garmanet
