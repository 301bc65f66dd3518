#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace garmanet {

// ===== model =====

struct GegenbauerFactor {
    double nu = 0.0; // cos of the seasonal angular frequency, in [-1, 1]
    double d = 0.0;  // memory exponent

    bool stationary() const;  // |nu| < 1 and d < 1/2, or |nu| = 1 and d < 1/4
    bool long_memory() const; // d > 0
};

struct FrequencyReport {
    double nu = 0.0;
    double lambda_radians = 0.0; // arccos(nu)
    double f_cycles = 0.0;       // lambda / (2 pi), cycles per sample
    double period = 0.0;         // 1 / f_cycles, samples (inf at nu = 1)
};

FrequencyReport frequency_report(const GegenbauerFactor& f);

struct GarmaFitInfo {
    double css = 0.0;
    std::size_t n_obs = 0;
    bool converged = false;
    std::vector<std::string> param_names;
    std::vector<double> estimates;
    std::vector<double> std_errors; // NaN when the Hessian is singular
};

// Phi(L) = 1 - sum_i ar[i] L^{i+1},  Theta(L) = 1 + sum_j ma[j] L^{j+1};
// Phi(L) prod_i (1 - 2 nu_i L + L^2)^{d_i} (y - mu) = Theta(L) eps.
struct GarmaModel {
    double mu = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
    std::vector<GegenbauerFactor> factors;
    double sigma2 = 1.0;
    std::size_t truncation = 1000;
    GarmaFitInfo fit;
};

// Throws config_error when AR/MA roots touch the unit circle, a factor is
// non-stationary, factor nus collide, sigma2 < 0, or truncation < 1.
void validate_model(const GarmaModel& m);

// ===== filter expansions =====

// Coefficients C_0..C_n of (1 - 2 nu z + z^2)^{-d}:
//   C_0 = 1, C_1 = 2 d nu,
//   C_j = 2 nu ((d-1)/j + 1) C_{j-1} - (2 (d-1)/j + 1) C_{j-2}.
std::vector<double> gegenbauer_coeffs(const GegenbauerFactor& f, std::size_t n);

// Product of all factors' expansions truncated at order n; invert = true
// negates every d, giving the whitening direction.
std::vector<double> combined_gegenbauer(std::span<const GegenbauerFactor> factors,
                                        std::size_t n, bool invert);

// ===== model operations =====

// Residuals eps_t from applying the full inverse model to x; pre-sample
// deviations are treated as zero (conditional sum-of-squares convention).
std::vector<double> garma_apply_filter(std::span<const double> x, const GarmaModel& m);

// Seeded Gaussian simulation through the truncated expansion; the first
// burn_in draws are discarded. Requires burn_in >= truncation.
std::vector<double> garma_simulate(const GarmaModel& m, std::size_t n,
                                   std::size_t burn_in, std::uint64_t seed);

// Iterated mean forecast ŷ_{t+1..t+h} from the truncated AR(inf) weights;
// future innovations set to zero, pre-sample deviations to zero.
std::vector<double> garma_forecast(const GarmaModel& m, std::span<const double> history,
                                   std::size_t h);

// ===== estimation =====

struct GarmaFitOptions {
    std::size_t truncation = 1000;
    int n_starts = 8;
    std::uint64_t seed = 1;
    bool estimate_mu = true;
    bool free_frequencies = false; // optimize nu around the supplied values
    int max_iter = 2000;
};

// Conditional sum-of-squares fit with k Gegenbauer factors at the supplied
// frequencies (cycles/sample; one per factor). Parameter layout, in both
// fit.param_names and fit.std_errors:
//   [mu] ar1..arp ma1..maq d1..dk [nu1..nuk]
GarmaModel garma_fit(std::span<const double> x, std::size_t p, std::size_t q,
                     std::span<const double> freqs, const GarmaFitOptions& opts = {});

// ===== persistence =====

std::string garma_to_json(const GarmaModel& m);
GarmaModel garma_from_json(const std::string& text);
void save_garma(const GarmaModel& m, const std::string& path);
GarmaModel load_garma(const std::string& path);

} // namespace garmanet
