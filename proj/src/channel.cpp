// SPDX-License-Identifier: Apache-2.0
#include "mimopa/channel.hpp"

#include <numeric>
#include <string>

#include "mimopa/errors.hpp"
#include "mimopa/precoding.hpp"

namespace mimopa {

namespace {

std::vector<int> default_partition(Eigen::Index n_r) {
    return {static_cast<int>(n_r)};  // single user owning every receive antenna
}

void check_partition(const Matrix& m, const std::vector<int>& users) {
    int total = 0;
    for (int nk : users) {
        if (nk <= 0) {
            throw DimensionError("user partition entries must be positive");
        }
        total += nk;
    }
    if (total != m.rows()) {
        throw DimensionError("user partition sums to " + std::to_string(total) +
                             " but channel has " + std::to_string(m.rows()) + " rows");
    }
}

}  // namespace

ChannelMatrix::ChannelMatrix(Matrix mat, std::vector<int> user_partition)
    : m(std::move(mat)), users(std::move(user_partition)) {
    if (m.rows() < 1 || m.cols() < 1) {
        throw DimensionError("channel matrix must be at least 1x1");
    }
    if (users.empty()) {
        users = default_partition(m.rows());
    }
    check_partition(m, users);
}

NoiseModel::NoiseModel(double variance) : sigma_n2(variance) {
    if (!(variance > 0.0)) {
        throw DomainError("noise variance must be positive, got " +
                          std::to_string(variance));
    }
}

int SystemConfig::n_rx() const {
    return std::accumulate(users.begin(), users.end(), 0);
}

void SystemConfig::validate() const {
    if (n_tx < 1) {
        throw DomainError("n_tx must be positive");
    }
    if (users.empty()) {
        throw DomainError("user partition must be non-empty");
    }
    for (int nk : users) {
        if (nk < 1) {
            throw DomainError("per-user antenna counts must be positive");
        }
    }
    if (!(sigma_n2 > 0.0)) {
        throw DomainError("sigma_n2 must be positive");
    }
    if (sigma_e2 < 0.0) {
        throw DomainError("sigma_e2 must be nonnegative");
    }
    if (!(e_tr > 0.0)) {
        throw DomainError("e_tr must be positive");
    }
    if (!(mu > 0.0)) {
        throw DomainError("step size mu must be positive");
    }
    if (iterations < 1) {
        throw DomainError("iteration count must be at least 1");
    }
    if (!(es_grid_step > 0.0) || es_grid_step > 1.0) {
        throw DomainError("es_grid_step must lie in (0, 1]");
    }
    if (robust_scale < 0.0) {
        throw DomainError("robust_scale must be nonnegative");
    }
}

ChannelMatrix sample_rayleigh(int n_r, int n_t, Rng& rng,
                              std::vector<int> user_partition) {
    if (n_r < 1 || n_t < 1) {
        throw DimensionError("channel dimensions must be positive, got " +
                             std::to_string(n_r) + "x" + std::to_string(n_t));
    }
    Matrix m(n_r, n_t);
    for (int i = 0; i < n_r; ++i) {
        for (int j = 0; j < n_t; ++j) {
            m(i, j) = rng.complex_gaussian(1.0);
        }
    }
    return ChannelMatrix(std::move(m), std::move(user_partition));
}

ChannelSet split_csit(const ChannelMatrix& h_true, double sigma_e2, Rng& rng) {
    if (sigma_e2 < 0.0) {
        throw DomainError("CSIT error variance must be nonnegative, got " +
                          std::to_string(sigma_e2));
    }
    Matrix err = Matrix::Zero(h_true.m.rows(), h_true.m.cols());
    if (sigma_e2 > 0.0) {
        for (Eigen::Index i = 0; i < err.rows(); ++i) {
            for (Eigen::Index j = 0; j < err.cols(); ++j) {
                err(i, j) = rng.complex_gaussian(sigma_e2);
            }
        }
    }
    ChannelSet set;
    set.h_true = h_true;
    set.h_err = ChannelMatrix(err, h_true.users);
    set.h_est = ChannelMatrix(h_true.m - err, h_true.users);
    set.sigma_e2 = sigma_e2;
    return set;
}

CVector sample_symbols(int n_r, Rng& rng) {
    if (n_r < 1) {
        throw DimensionError("symbol vector length must be positive");
    }
    CVector s(n_r);
    for (int i = 0; i < n_r; ++i) {
        s(i) = rng.complex_gaussian(1.0);
    }
    return s;
}

CVector transmit(const Precoder& p, const RVector& a, const CVector& s) {
    if (a.size() != p.matrix.cols() || s.size() != p.matrix.cols()) {
        throw DimensionError("transmit: precoder has " +
                             std::to_string(p.matrix.cols()) + " streams but a has " +
                             std::to_string(a.size()) + " and s has " +
                             std::to_string(s.size()));
    }
    return p.matrix * (a.array() * s.array()).matrix();
}

CVector receive(const ChannelMatrix& h, const CVector& x, const NoiseModel& noise,
                Rng& rng) {
    CVector y = receive_noiseless(h, x);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        y(i) += rng.complex_gaussian(noise.sigma_n2);
    }
    return y;
}

CVector receive_noiseless(const ChannelMatrix& h, const CVector& x) {
    if (x.size() != h.m.cols()) {
        throw DimensionError("receive: channel expects " + std::to_string(h.m.cols()) +
                             " transmit antennas, signal has " +
                             std::to_string(x.size()));
    }
    return h.m * x;
}

}  // namespace mimopa
