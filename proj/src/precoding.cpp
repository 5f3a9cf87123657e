// SPDX-License-Identifier: Apache-2.0
#include "mimopa/precoding.hpp"

#include <Eigen/SVD>
#include <cstring>
#include <limits>

#include "mimopa/errors.hpp"

namespace mimopa {

std::string to_string(PrecoderKind kind) {
    switch (kind) {
        case PrecoderKind::MF: return "mf";
        case PrecoderKind::ZF: return "zf";
        case PrecoderKind::MMSE: return "mmse";
    }
    return "?";
}

std::uint64_t channel_fingerprint(const ChannelMatrix& h) {
    auto mix_double = [](std::uint64_t acc, double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        return splitmix64(acc ^ bits);
    };
    std::uint64_t acc = splitmix64(static_cast<std::uint64_t>(h.m.rows()) << 32 |
                                   static_cast<std::uint64_t>(h.m.cols()));
    for (Eigen::Index j = 0; j < h.m.cols(); ++j) {
        for (Eigen::Index i = 0; i < h.m.rows(); ++i) {
            acc = mix_double(acc, h.m(i, j).real());
            acc = mix_double(acc, h.m(i, j).imag());
        }
    }
    return acc;
}

Matrix normalize_columns(const Matrix& m) {
    Matrix out = m;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        const double norm = out.col(j).norm();
        if (norm == 0.0) {
            throw DegenerateInputError("cannot normalize zero column " +
                                       std::to_string(j));
        }
        out.col(j) /= norm;
    }
    return out;
}

Precoder mf_precoder(const ChannelMatrix& h_est) {
    Precoder p;
    p.matrix = normalize_columns(h_est.m.adjoint());
    p.kind = PrecoderKind::MF;
    p.built_from = channel_fingerprint(h_est);
    return p;
}

Precoder zf_precoder(const ChannelMatrix& h_est) {
    const auto n_r = h_est.m.rows();
    const auto n_t = h_est.m.cols();
    if (n_t < n_r) {
        throw DimensionError("zero forcing needs n_tx >= n_rx, got " +
                             std::to_string(n_t) + " < " + std::to_string(n_r));
    }
    // Right pseudo-inverse via SVD; the singular values double as the
    // conditioning guard for h_est * h_est^H.
    Eigen::JacobiSVD<Matrix> svd(h_est.m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    const double cond = (smin > 0.0) ? (smax / smin) * (smax / smin)
                                     : std::numeric_limits<double>::infinity();
    if (!(cond < 1e12)) {
        throw SingularityError("rank-deficient channel estimate in zero forcing", cond);
    }
    Matrix pinv = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
    Precoder p;
    p.matrix = normalize_columns(pinv);
    p.kind = PrecoderKind::ZF;
    p.built_from = channel_fingerprint(h_est);
    return p;
}

Precoder mmse_precoder(const ChannelMatrix& h_est, double sigma_n2, double e_tr) {
    if (!(sigma_n2 > 0.0) || !(e_tr > 0.0)) {
        throw DomainError("mmse precoder needs sigma_n2 > 0 and e_tr > 0");
    }
    const auto n_r = h_est.m.rows();
    const double loading = static_cast<double>(n_r) * sigma_n2 / e_tr;
    Matrix gram = h_est.m * h_est.m.adjoint();
    gram.diagonal().array() += loading;
    // gram is Hermitian positive definite thanks to the diagonal loading.
    Matrix raw = h_est.m.adjoint() * gram.ldlt().solve(Matrix::Identity(n_r, n_r));
    Precoder p;
    p.matrix = normalize_columns(raw);
    p.kind = PrecoderKind::MMSE;
    p.built_from = channel_fingerprint(h_est);
    return p;
}

Precoder make_precoder(PrecoderKind kind, const ChannelMatrix& h_est, double sigma_n2,
                       double e_tr) {
    switch (kind) {
        case PrecoderKind::MF: return mf_precoder(h_est);
        case PrecoderKind::ZF: return zf_precoder(h_est);
        case PrecoderKind::MMSE: return mmse_precoder(h_est, sigma_n2, e_tr);
    }
    throw DomainError("unknown precoder kind");
}

}  // namespace mimopa
