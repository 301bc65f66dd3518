#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "garmanet/data_io.hpp"
#include "garmanet/optim.hpp"

namespace garmanet {

// ===== local linear wavelet network =====
//
// One hidden layer of wavelet units. Each unit carries a scale vector a,
// a translation vector b and local linear weights w (intercept first), and
// contributes (w_0 + w.x) * psi((x - b) / a) to the output.

enum class WaveletKind { gaussian, mexican_hat };

struct LlwnnUnit {
    std::vector<double> a; // component scales, length n, floored at 1e-6
    std::vector<double> b; // component translations, length n
    std::vector<double> w; // intercept followed by n slopes
};

struct LlwnnModel {
    std::size_t n_inputs = 0;
    WaveletKind kind = WaveletKind::gaussian;
    std::vector<LlwnnUnit> units;
};

struct SupervisedSet {
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;
};

void validate_llwnn(const LlwnnModel& m);

// Seeded initialization: w ~ U(-0.1, 0.1), b ~ U(0, 1), a ~ U(0.2, 1.0).
LlwnnModel llwnn_init(std::size_t n_inputs, std::size_t n_units, WaveletKind kind,
                      std::uint64_t seed);

double llwnn_forward(const LlwnnModel& m, std::span<const double> x);

// Flat parameter vector, per unit: a[0..n), b[0..n), w[0..n]. Used by the
// swarm trainer and by gradient checks.
std::vector<double> llwnn_encode(const LlwnnModel& m);
LlwnnModel llwnn_decode(const LlwnnModel& shape, std::span<const double> params);

// Gradient of the squared-error loss E = (y - target)^2 / 2 with respect to
// the flat parameter vector, at one sample.
std::vector<double> llwnn_gradient(const LlwnnModel& m, std::span<const double> x,
                                   double target);

// ===== trainers =====

struct BpConfig {
    double learning_rate = 0.5;
    std::size_t epochs = 2000;
    bool weights_only = false; // freeze a and b, update linear weights only
};

struct PsoConfig {
    std::size_t population = 20;
    std::size_t generations = 200;
    double c1 = 1.05;
    double c2 = 1.05;
    double v_max = 1.0;  // componentwise velocity clamp
    double v_init = 0.3; // |v| sampling range at initialization
    // Inertia interpolates linearly from w_start to w_end. The default is the
    // constriction-equivalent constant, which measures markedly better here
    // than the 0.9 -> 0.4 linear decay at these c1/c2 values.
    double w_start = 0.72;
    double w_end = 0.72;
};

enum class TrainAlgorithm { bp, pso };

struct TrainConfig {
    TrainAlgorithm algorithm = TrainAlgorithm::bp;
    BpConfig bp;
    PsoConfig pso;
    std::uint64_t seed = 1;
};

struct TrainResult {
    LlwnnModel model;
    // bp: mean half-squared error per epoch; pso: best swarm fitness (MSE)
    // recorded after initialization and after each generation.
    std::vector<double> trace;
};

// Per-sample gradient descent with a fresh shuffle each epoch. Aborts with a
// numeric error if the mean epoch loss exceeds 1e6.
TrainResult bp_train(const LlwnnModel& start, const SupervisedSet& data,
                     const TrainConfig& cfg);

// Generic particle swarm on an objective. Positions start uniform inside
// [init_lo, init_hi] and are free to leave it; velocities start uniform in
// [-v_init, v_init] and stay clamped to [-v_max, v_max]. Each particle draws
// from its own seeded stream: position first, then velocity, then two uniforms
// per component per generation. Fitness evaluation may run in parallel; the
// best-position reduction always scans particles in ascending index order.
struct PsoResult {
    std::vector<double> x;
    double fitness = 0.0;
    std::vector<double> trace;
};

PsoResult pso_minimize(const Objective& f, std::span<const double> init_lo,
                       std::span<const double> init_hi, const PsoConfig& cfg,
                       std::uint64_t seed);

// Swarm training over the full parameter vector; `shape` fixes the topology
// and the initialization ranges follow llwnn_init.
TrainResult pso_train(const LlwnnModel& shape, const SupervisedSet& data,
                      const TrainConfig& cfg);

TrainResult train_llwnn(const LlwnnModel& start, const SupervisedSet& data,
                        const TrainConfig& cfg);

// ===== wavelet-decomposed input pipeline =====
//
// Residuals are min-max normalized with training-window statistics, and the
// feature vector for time t concatenates every MODWT multiresolution
// component (details then smooth) of the causal prefix window[0..t) at lags
// 1..n_lags. Decomposing the prefix rather than the whole window keeps the
// features computable one step ahead, so training rows and forecast-time
// rows come from the same distribution; a whole-window decomposition would
// smuggle each target into its own inputs through the two-sided transform.
// levels = 0 bypasses the decomposition and feeds raw normalized lags, which
// is the plain-network input mode.

struct WllwnnConfig {
    std::size_t n_lags = 24;
    std::size_t levels = 10;
    std::string filter = "la8";
    // Shortest prefix a decomposed training row may be built from; rows with
    // less causal history are dropped. The wrap-around of the transform makes
    // components of very short prefixes mostly boundary noise. Ignored when
    // levels = 0.
    std::size_t min_prefix = 0;
};

struct WllwnnPrep {
    WllwnnConfig config;
    NormParams norm;
    std::vector<double> window; // raw residual history, oldest first
};

std::size_t wllwnn_feature_dim(const WllwnnConfig& cfg);

// Shortest residual history the pipeline accepts: enough for one training
// row after the lag offset, the decomposition reach and the prefix floor.
std::size_t wllwnn_min_window(const WllwnnConfig& cfg);

WllwnnPrep wllwnn_prepare(std::span<const double> residuals, const WllwnnConfig& cfg);

// Training rows built from the prepared window.
SupervisedSet wllwnn_supervised(const WllwnnPrep& prep);

// Feature vector for the observation one step past the end of the window.
std::vector<double> wllwnn_next_features(const WllwnnPrep& prep);

// Iterated multi-step prediction: each step evaluates the network on the
// current window's features, denormalizes the output, appends it to the
// window and recomputes the decomposition. Returns denormalized values.
std::vector<double> predict_recursive(const LlwnnModel& m, const WllwnnPrep& prep,
                                      std::size_t h);

// ===== persistence =====

std::string llwnn_to_json(const LlwnnModel& m);
LlwnnModel llwnn_from_json(const std::string& text);
void save_llwnn(const LlwnnModel& m, const std::string& path);
LlwnnModel load_llwnn(const std::string& path);

} // namespace garmanet
