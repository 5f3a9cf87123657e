// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mimopa/rng.hpp"

namespace mimopa {

using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Flat-fading channel for one coherence block. Rows are receive antennas,
/// grouped per user: user k owns users[k] consecutive rows.
struct ChannelMatrix {
    Matrix m;
    std::vector<int> users;

    ChannelMatrix() = default;
    ChannelMatrix(Matrix mat, std::vector<int> user_partition);

    Eigen::Index n_rx() const { return m.rows(); }
    Eigen::Index n_tx() const { return m.cols(); }
};

/// True channel, transmitter-side estimate, and the estimation error between
/// them: h_true = h_est + h_err, with E|h_err|^2 = sigma_e2 per entry.
struct ChannelSet {
    ChannelMatrix h_true;
    ChannelMatrix h_est;
    ChannelMatrix h_err;
    double sigma_e2 = 0.0;
};

/// Additive receiver noise, circularly symmetric with covariance sigma_n2 * I.
struct NoiseModel {
    double sigma_n2 = 1.0;

    explicit NoiseModel(double variance);
};

/// Scenario parameters shared by the allocators and the experiment harness.
struct SystemConfig {
    int n_tx = 4;
    std::vector<int> users{2, 2};  // receive antennas per user
    double sigma_n2 = 1.0;
    double sigma_e2 = 0.0;
    double e_tr = 10.0;  // total transmit power budget used in rate evaluation
    std::uint64_t seed = 12345;
    double mu = 0.01;        // gradient step size
    int iterations = 100;    // fixed descent length
    double es_grid_step = 0.005;
    double robust_scale = 1.0;  // multiplier on the error-covariance term

    int n_rx() const;
    void validate() const;
};

/// Draws an n_r x n_t matrix of i.i.d. circularly symmetric complex Gaussian
/// entries with unit variance (Rayleigh-fading gains).
ChannelMatrix sample_rayleigh(int n_r, int n_t, Rng& rng,
                              std::vector<int> user_partition = {});

/// Splits a true channel into (estimate, error): the error is drawn i.i.d.
/// complex Gaussian with per-entry variance sigma_e2 from its own stream, and
/// the estimate is h_true - h_err so reconstruction is exact.
ChannelSet split_csit(const ChannelMatrix& h_true, double sigma_e2, Rng& rng);

/// Draws a vector of unit-variance circularly symmetric Gaussian symbols.
CVector sample_symbols(int n_r, Rng& rng);

struct Precoder;  // precoding.hpp

/// Transmit vector x = P * diag(a) * s.
CVector transmit(const Precoder& p, const RVector& a, const CVector& s);

/// Received vector y = H x + n with n ~ CN(0, sigma_n2 * I).
CVector receive(const ChannelMatrix& h, const CVector& x, const NoiseModel& noise,
                Rng& rng);

/// Noise-free received vector y = H x.
CVector receive_noiseless(const ChannelMatrix& h, const CVector& x);

}  // namespace mimopa
