// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "mimopa/channel.hpp"
#include "mimopa/precoding.hpp"

namespace mimopa {

/// Per-stream amplitude weights; stream m radiates power a_m^2. Every
/// allocator returns vectors satisfying ||a||^2 = 1 (the unit power budget).
using AllocationVector = RVector;

/// Diagonal covariance of the channel-estimation error, Xi = E[err^H err].
/// For i.i.d. per-entry error variance sigma_e2 this is n_rx * sigma_e2 * I.
struct ErrorCovariance {
    RVector xi;  // diagonal entries, length n_tx

    static ErrorCovariance homogeneous(int n_rx, int n_tx, double sigma_e2,
                                       double scale = 1.0);
};

/// Full history of one gradient-descent run: the iterate after each step's
/// conditional renormalization, the objective at that iterate (noise constant
/// omitted), and the rescale factor applied.
struct AllocatorTrace {
    std::vector<AllocationVector> iterates;
    std::vector<double> objective_values;
    std::vector<double> beta_history;
};

/// Expected squared reconstruction error E||s - y||^2 between transmitted
/// symbols and the raw received vector, as a closed form in a:
///   sum_m d_m a_m^2 - 2 sum_m r_m a_m + n_rx (1 + sigma_n2),
/// where d_m = ||(HP) column m||^2 and r_m = Re (HP)_mm. The input a need not
/// be normalized.
double mse_objective(const ChannelMatrix& h, const Precoder& p,
                     const AllocationVector& a, double sigma_n2);

/// Gradient of mse_objective in a: entry m is 2 d_m a_m - 2 r_m.
RVector mse_gradient(const ChannelMatrix& h, const Precoder& p,
                     const AllocationVector& a);

/// Gradient of the error-averaged objective built from the channel estimate:
/// mse_gradient plus the penalty term 2 [P^H Xi P]_mm a_m that accounts for
/// the estimation-error covariance.
RVector robust_gradient(const ChannelMatrix& h_est, const Precoder& p,
                        const ErrorCovariance& xi, const AllocationVector& a);

/// Rescales to the unit sphere; returns (beta * a, beta) with beta = 1/||a||.
std::pair<AllocationVector, double> normalize_power(const RVector& a);

/// Gradient descent on the mean-square reconstruction error with a
/// renormalization to the unit power sphere after every step. Starts from
/// a0 when given, otherwise from the zero vector (first step then lands on
/// the normalized direction of r). Aborts with DivergenceError if the
/// pre-rescale objective exceeds 1e6 times its initial value.
AllocatorTrace mapa(const ChannelMatrix& h, const Precoder& p, double mu, int iters,
                    const std::optional<AllocationVector>& a0 = std::nullopt);

/// Same descent with the error-covariance penalty added to the quadratic
/// coefficients: Xi = robust_scale * n_rx * sigma_e2 * I built from the
/// homogeneous error model. With sigma_e2 = 0 the arithmetic path is
/// identical to mapa.
AllocatorTrace rmapa(const ChannelMatrix& h_est, const Precoder& p, double sigma_e2,
                     double mu, int iters, double robust_scale = 1.0);

/// Uniform allocation a_m = 1/sqrt(n_r).
AllocationVector upa(int n_r);

/// Nonnegative uniform draws normalized to the unit sphere.
AllocationVector random_allocation(int n_r, Rng& rng);

enum class SearchObjective { MSE, SUMRATE };

/// Dense grid search over the nonnegative orthant of the unit sphere:
/// a_1..a_{n_r-1} range over multiples of grid_step and the last entry takes
/// up the remaining power. Returns the grid point minimizing the MSE or
/// maximizing the sum-rate (for SUMRATE, pass the effective noise variance
/// sigma_n2 / e_tr; the user partition is read from h). Refuses grids whose
/// enumeration bound exceeds 1e8 points.
AllocationVector exhaustive_search(const ChannelMatrix& h, const Precoder& p,
                                   double grid_step, SearchObjective objective,
                                   double sigma_n2);

}  // namespace mimopa
