// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "mimopa/channel.hpp"

namespace mimopa {

enum class PrecoderKind { MF, ZF, MMSE };

std::string to_string(PrecoderKind kind);

/// Linear precoder mapping stream symbols to transmit antennas. Columns are
/// normalized to unit Euclidean norm so the allocation vector alone carries
/// the power split. built_from fingerprints the channel estimate the matrix
/// was constructed from.
struct Precoder {
    Matrix matrix;  // n_tx x n_rx
    PrecoderKind kind = PrecoderKind::MF;
    std::uint64_t built_from = 0;
};

/// Content hash of a channel matrix, for precoder provenance tracking.
std::uint64_t channel_fingerprint(const ChannelMatrix& h);

/// Divides each column by its Euclidean norm. Rejects zero columns.
Matrix normalize_columns(const Matrix& m);

/// Matched filter: conjugate transpose of the estimate, columns normalized.
Precoder mf_precoder(const ChannelMatrix& h_est);

/// Zero forcing: right pseudo-inverse of the estimate, columns normalized.
/// After normalization h_est * P is diagonal with positive real diagonal.
/// Requires n_tx >= n_rx and a well-conditioned h_est * h_est^H.
Precoder zf_precoder(const ChannelMatrix& h_est);

/// Regularized inverse with loading n_rx * sigma_n2 / e_tr, columns
/// normalized. Interpolates between the ZF and MF constructions as the
/// loading goes to zero or infinity.
Precoder mmse_precoder(const ChannelMatrix& h_est, double sigma_n2, double e_tr);

/// Builds the precoder of the requested kind from the channel estimate.
Precoder make_precoder(PrecoderKind kind, const ChannelMatrix& h_est, double sigma_n2,
                       double e_tr);

}  // namespace mimopa
