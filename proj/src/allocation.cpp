// SPDX-License-Identifier: Apache-2.0
#include "mimopa/allocation.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mimopa/errors.hpp"
#include "mimopa/metrics.hpp"

namespace mimopa {

namespace {

// Shared coefficients of the quadratic objective sum d_m a_m^2 - 2 r_m a_m:
// d_m = ||(HP) column m||^2 and r_m = Re (HP)_mm.
struct QuadraticForm {
    RVector d;
    RVector r;
};

QuadraticForm effective_form(const ChannelMatrix& h, const Precoder& p) {
    if (h.m.cols() != p.matrix.rows()) {
        throw DimensionError("channel has " + std::to_string(h.m.cols()) +
                             " transmit antennas, precoder has " +
                             std::to_string(p.matrix.rows()));
    }
    if (p.matrix.cols() != h.m.rows()) {
        throw DimensionError("precoder carries " + std::to_string(p.matrix.cols()) +
                             " streams, channel has " + std::to_string(h.m.rows()) +
                             " receive antennas");
    }
    const Matrix f = h.m * p.matrix;
    QuadraticForm q;
    q.d.resize(f.cols());
    q.r.resize(f.cols());
    for (Eigen::Index m = 0; m < f.cols(); ++m) {
        q.d(m) = f.col(m).squaredNorm();
        q.r(m) = f(m, m).real();
    }
    return q;
}

void check_allocation_size(const AllocationVector& a, Eigen::Index n_r,
                           const char* where) {
    if (a.size() != n_r) {
        throw DimensionError(std::string(where) + ": allocation has " +
                             std::to_string(a.size()) + " entries, expected " +
                             std::to_string(n_r));
    }
}

double quadratic_value(const QuadraticForm& q, const RVector& a) {
    return (q.d.array() * a.array().square()).sum() - 2.0 * q.r.dot(a);
}

// Descent core shared verbatim by mapa and rmapa so the sigma_e2 = 0
// reduction is an arithmetic identity, not merely a numerical one.
AllocatorTrace descend(const QuadraticForm& q, double mu, int iters,
                       const std::optional<AllocationVector>& a0) {
    if (!(mu > 0.0)) {
        throw DomainError("step size mu must be positive");
    }
    if (iters < 1) {
        throw DomainError("iteration count must be at least 1");
    }
    const Eigen::Index n_r = q.d.size();
    RVector a = RVector::Zero(n_r);
    if (a0) {
        check_allocation_size(*a0, n_r, "mapa");
        a = *a0;
    }
    const double n_rx = static_cast<double>(n_r);
    const double f_initial = quadratic_value(q, a) + n_rx;

    AllocatorTrace trace;
    trace.iterates.reserve(iters);
    trace.objective_values.reserve(iters);
    trace.beta_history.reserve(iters);
    for (int i = 0; i < iters; ++i) {
        const RVector grad = 2.0 * (q.d.array() * a.array()).matrix() - 2.0 * q.r;
        a -= mu * grad;
        const double f_pre = quadratic_value(q, a) + n_rx;
        if (f_pre > 1e6 * f_initial) {
            throw DivergenceError("objective exceeded 1e6x its initial value at iteration " +
                                      std::to_string(i + 1),
                                  mu);
        }
        const double norm2 = a.squaredNorm();
        double beta = 1.0;
        if (norm2 == 0.0) {
            a = upa(static_cast<int>(n_r));  // degenerate restart from uniform weights
        } else if (norm2 != 1.0) {
            beta = 1.0 / std::sqrt(norm2);
            a *= beta;
        }
        trace.iterates.push_back(a);
        trace.objective_values.push_back(quadratic_value(q, a) + n_rx);
        trace.beta_history.push_back(beta);
    }
    return trace;
}

}  // namespace

ErrorCovariance ErrorCovariance::homogeneous(int n_rx, int n_tx, double sigma_e2,
                                             double scale) {
    if (n_rx < 1 || n_tx < 1) {
        throw DimensionError("error covariance dimensions must be positive");
    }
    if (sigma_e2 < 0.0 || scale < 0.0) {
        throw DomainError("error variance and scale must be nonnegative");
    }
    ErrorCovariance xi;
    xi.xi = RVector::Constant(n_tx, scale * static_cast<double>(n_rx) * sigma_e2);
    return xi;
}

double mse_objective(const ChannelMatrix& h, const Precoder& p,
                     const AllocationVector& a, double sigma_n2) {
    const QuadraticForm q = effective_form(h, p);
    check_allocation_size(a, q.d.size(), "mse_objective");
    const double n_rx = static_cast<double>(h.m.rows());
    return quadratic_value(q, a) + n_rx * (1.0 + sigma_n2);
}

RVector mse_gradient(const ChannelMatrix& h, const Precoder& p,
                     const AllocationVector& a) {
    const QuadraticForm q = effective_form(h, p);
    check_allocation_size(a, q.d.size(), "mse_gradient");
    return 2.0 * (q.d.array() * a.array()).matrix() - 2.0 * q.r;
}

RVector robust_gradient(const ChannelMatrix& h_est, const Precoder& p,
                        const ErrorCovariance& xi, const AllocationVector& a) {
    if (xi.xi.size() != p.matrix.rows()) {
        throw DimensionError("error covariance has " + std::to_string(xi.xi.size()) +
                             " diagonal entries, precoder has " +
                             std::to_string(p.matrix.rows()) + " rows");
    }
    RVector grad = mse_gradient(h_est, p, a);
    for (Eigen::Index m = 0; m < grad.size(); ++m) {
        const double q_m =
            (xi.xi.array() * p.matrix.col(m).array().abs2()).sum();
        grad(m) += 2.0 * q_m * a(m);
    }
    return grad;
}

std::pair<AllocationVector, double> normalize_power(const RVector& a) {
    const double norm = a.norm();
    if (norm == 0.0) {
        throw DegenerateInputError("cannot normalize an all-zero allocation");
    }
    const double beta = 1.0 / norm;
    return {beta * a, beta};
}

AllocatorTrace mapa(const ChannelMatrix& h, const Precoder& p, double mu, int iters,
                    const std::optional<AllocationVector>& a0) {
    return descend(effective_form(h, p), mu, iters, a0);
}

AllocatorTrace rmapa(const ChannelMatrix& h_est, const Precoder& p, double sigma_e2,
                     double mu, int iters, double robust_scale) {
    if (sigma_e2 < 0.0) {
        throw DomainError("sigma_e2 must be nonnegative");
    }
    QuadraticForm q = effective_form(h_est, p);
    const ErrorCovariance xi = ErrorCovariance::homogeneous(
        static_cast<int>(h_est.m.rows()), static_cast<int>(h_est.m.cols()), sigma_e2,
        robust_scale);
    for (Eigen::Index m = 0; m < q.d.size(); ++m) {
        q.d(m) += (xi.xi.array() * p.matrix.col(m).array().abs2()).sum();
    }
    return descend(q, mu, iters, std::nullopt);
}

AllocationVector upa(int n_r) {
    if (n_r < 1) {
        throw DimensionError("allocation length must be positive");
    }
    return RVector::Constant(n_r, 1.0 / std::sqrt(static_cast<double>(n_r)));
}

AllocationVector random_allocation(int n_r, Rng& rng) {
    if (n_r < 1) {
        throw DimensionError("allocation length must be positive");
    }
    RVector a(n_r);
    do {
        for (int i = 0; i < n_r; ++i) {
            a(i) = rng.uniform01();
        }
    } while (a.norm() == 0.0);
    return normalize_power(a).first;
}

AllocationVector exhaustive_search(const ChannelMatrix& h, const Precoder& p,
                                   double grid_step, SearchObjective objective,
                                   double sigma_n2) {
    if (!(grid_step > 0.0) || grid_step > 1.0) {
        throw DomainError("grid step must lie in (0, 1]");
    }
    const Eigen::Index n_r = h.m.rows();
    const double levels = std::floor(1.0 / grid_step) + 1.0;
    const double bound = std::pow(levels, static_cast<double>(n_r - 1));
    if (bound > 1e8) {
        throw SearchBudgetError(
            "grid of ~" + std::to_string(bound) +
            " points exceeds the 1e8 enumeration budget; use a coarser grid_step");
    }

    const QuadraticForm q = effective_form(h, p);

    const bool minimize = (objective == SearchObjective::MSE);
    double best_score = minimize ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
    RVector best = upa(static_cast<int>(n_r));
    RVector a = RVector::Zero(n_r);

    // Walks coordinates 0..n_r-2 over grid multiples, tracking the partial
    // power sum and (for MSE) the partial objective; the last coordinate
    // absorbs the remaining power.
    auto evaluate_leaf = [&](double quad_partial, double ssq) {
        const double rem = 1.0 - ssq;
        a(n_r - 1) = (rem > 0.0) ? std::sqrt(rem) : 0.0;
        double score;
        if (minimize) {
            const double last = a(n_r - 1);
            score = quad_partial + q.d(n_r - 1) * last * last - 2.0 * q.r(n_r - 1) * last;
        } else {
            score = sum_rate(h, p, a, sigma_n2, 1.0, h.users).sum_rate;
        }
        if (minimize ? (score < best_score) : (score > best_score)) {
            best_score = score;
            best = a;
        }
    };

    auto walk = [&](auto&& self, Eigen::Index coord, double quad_partial,
                    double ssq) -> void {
        if (coord == n_r - 1) {
            evaluate_leaf(quad_partial, ssq);
            return;
        }
        for (int k = 0;; ++k) {
            const double v = k * grid_step;
            const double s2 = ssq + v * v;
            if (s2 > 1.0 + 1e-12) {
                break;
            }
            a(coord) = v;
            self(self, coord + 1,
                 quad_partial + q.d(coord) * v * v - 2.0 * q.r(coord) * v, s2);
        }
        a(coord) = 0.0;
    };
    walk(walk, 0, 0.0, 0.0);
    return best;
}

}  // namespace mimopa
