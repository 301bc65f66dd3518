#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace garmanet {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
    int max_iter = 2000;
    double f_tol = 1e-10;
    double x_tol = 1e-9;
    double initial_step = 0.1;
};

struct MinimizeResult {
    std::vector<double> x;
    double fval = 0.0;
    int iterations = 0;
    bool converged = false;
    int best_start = 0;
};

// Downhill simplex. Candidate points are clamped into [lo, hi] with a
// quadratic penalty on the excursion so the simplex stays informed near
// the boundary.
MinimizeResult nelder_mead(const Objective& f, std::span<const double> x0,
                           std::span<const double> lo, std::span<const double> hi,
                           const NelderMeadOptions& options = {});

// Runs Nelder-Mead from x0 plus (n_starts - 1) seeded uniform draws inside
// the box. Starts are independent, so they may be evaluated concurrently;
// the winner is the lowest objective value with ties broken by the lowest
// start index, which keeps the result independent of evaluation order.
MinimizeResult multistart_minimize(const Objective& f, std::span<const double> x0,
                                   std::span<const double> lo, std::span<const double> hi,
                                   int n_starts, std::uint64_t seed,
                                   const NelderMeadOptions& options = {});

// Golden-section search for a scalar minimum on [a, b].
double golden_section(const std::function<double(double)>& f, double a, double b,
                      double tol = 1e-10);

// Central-difference Hessian.
std::vector<std::vector<double>> numerical_hessian(const Objective& f,
                                                   std::span<const double> x,
                                                   double rel_step = 1e-4);

// Gauss-Jordan inverse with partial pivoting; returns false when singular.
bool invert_matrix(std::vector<std::vector<double>>& m);

// True when all roots of 1 - sum_i coeffs[i] z^{i+1} lie outside the disk
// of radius 1 + margin (Schur-Cohn test on the reflected polynomial).
bool poly_roots_outside_unit_disk(std::span<const double> coeffs, double margin = 1e-8);

} // namespace garmanet
