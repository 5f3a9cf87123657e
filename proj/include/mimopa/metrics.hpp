// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mimopa/allocation.hpp"
#include "mimopa/channel.hpp"
#include "mimopa/precoding.hpp"

namespace mimopa {

/// One point of an ergodic sum-rate curve.
struct RatePoint {
    double snr_db = 0.0;
    double sum_rate = 0.0;               // bits per channel use
    std::vector<double> per_user_rates;  // length K, each nonnegative
};

/// Squared deviation from the optimal allocation per iteration, averaged
/// over Monte Carlo traces.
struct MsdCurve {
    std::vector<double> values;
    int trials_averaged = 0;
};

enum class AllocatorKind { ES, RMAPA, MAPA, UPA, RANDOM };

std::string to_string(AllocatorKind kind);

/// Gaussian achievable sum-rate with residual interference treated as noise,
/// evaluated on the true channel. Per user block, the own-stream columns of
/// G = H P diag(a) sqrt(e_tr) form the signal covariance and all other
/// columns plus sigma_n2 * I form the noise covariance; the user rate is
/// log2 det(I + Z^-1 S).
RatePoint sum_rate(const ChannelMatrix& h_true, const Precoder& p,
                   const AllocationVector& a, double sigma_n2, double e_tr,
                   const std::vector<int>& user_partition);

/// Mean square deviation ||  |a_i| - |a_opt|  ||^2 per iteration, averaged
/// over traces. Magnitudes are compared because power is sign-invariant.
MsdCurve msd(const std::vector<AllocatorTrace>& traces, const AllocationVector& a_opt);

/// Ergodic sum-rate for one (allocator, precoder) pair over an SNR grid.
struct ErgodicResult {
    std::vector<RatePoint> points;  // one per SNR grid entry
    long failed_trials = 0;         // diverged trials, excluded from the means
};

/// Averages sum_rate over n_channels independent channel draws per SNR point.
/// The precoder and the allocators consume the channel estimate; rates are
/// evaluated on the true channel. SNR in dB maps to e_tr = 10^(snr/10) with
/// sigma_n2 fixed by the config. Channel substreams are keyed by trial index
/// only, so different allocators, precoders, and SNR points see identical
/// channels under the same seed (common random numbers).
ErgodicResult ergodic_sum_rate(const SystemConfig& config, AllocatorKind allocator,
                               PrecoderKind precoder_kind,
                               const std::vector<double>& snr_grid_db, int n_channels);

}  // namespace mimopa
