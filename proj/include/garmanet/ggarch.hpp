#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "garmanet/garma.hpp" // GegenbauerFactor, GarmaFitInfo

namespace garmanet {

// Log-variance model over mean-model residuals:
//   ln s2_t = gamma + beta ln s2_{t-1} + [1 - beta L - psi P_v(L)] (ln eps_t^2 - tau)
// with P_v(L) = prod_i (1 - 2 nu_i L + L^2)^{d_i} expanded to `truncation`
// lags. Positivity is automatic through exponentiation.
//
// The bracket has a lag-0 coefficient (1 - psi). Evaluating it makes the
// recursion contemporaneous in eps_t, which is fine as a descriptive filter
// but useless for prediction (today's shock explains itself), so estimation
// and forecasting drop the lag-0 term; ggarch_filter exposes both forms.
// At psi = 1 the two coincide.
struct GGarchModel {
    double gamma = 0.0;
    double beta = 0.0; // coefficient of L in beta(L)
    double psi = 0.0;  // scalar psi(L)
    std::vector<GegenbauerFactor> factors;
    double tau = -1.27; // E[ln z^2] for Gaussian z, fixed
    std::size_t truncation = 1000;
    GarmaFitInfo fit;
};

void validate_ggarch(const GGarchModel& m);

// Coefficients b_0..b_n of 1 - beta L - psi P_v(L).
std::vector<double> ggarch_bracket(const GGarchModel& m, std::size_t n);

// ln s2_t for t = 0..N-1; pre-sample ln s2 and (ln eps^2 - tau) are zero,
// eps^2 is floored at 1e-12 before the log.
std::vector<double> ggarch_filter(std::span<const double> eps, const GGarchModel& m,
                                  bool contemporaneous = true);

// Seeded Gaussian simulation of the causal recursion: eps_t = s_t z_t.
std::vector<double> ggarch_simulate(const GGarchModel& m, std::size_t n,
                                    std::size_t burn_in, std::uint64_t seed);

// Variance forecasts s2_{t+1..t+h} (strictly positive); unrealized
// (ln eps^2 - tau) terms are replaced by their martingale-difference
// expectation of zero.
std::vector<double> ggarch_forecast(const GGarchModel& m, std::span<const double> eps,
                                    std::size_t h);

struct GGarchFitOptions {
    std::size_t truncation = 1000;
    int n_starts = 8;
    std::uint64_t seed = 1;
    int max_iter = 2000;
};

// Gaussian quasi-likelihood fit on the causal recursion, tau fixed.
// Frequencies (cycles/sample) pin each factor's nu. Parameter layout:
//   gamma beta [psi d1..dk]   (psi is unidentified without factors and is
//                              fixed at 0 when freqs is empty)
GGarchModel ggarch_fit(std::span<const double> eps, std::span<const double> freqs,
                       const GGarchFitOptions& opts = {});

std::string ggarch_to_json(const GGarchModel& m);
GGarchModel ggarch_from_json(const std::string& text);
void save_ggarch(const GGarchModel& m, const std::string& path);
GGarchModel load_ggarch(const std::string& path);

} // namespace garmanet
