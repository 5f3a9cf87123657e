// SPDX-License-Identifier: Apache-2.0
#include "mimopa/metrics.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "mimopa/errors.hpp"
#include "mimopa/parallel.hpp"
#include "mimopa/streams.hpp"

namespace mimopa {

std::string to_string(AllocatorKind kind) {
    switch (kind) {
        case AllocatorKind::ES: return "es";
        case AllocatorKind::RMAPA: return "rmapa";
        case AllocatorKind::MAPA: return "mapa";
        case AllocatorKind::UPA: return "upa";
        case AllocatorKind::RANDOM: return "random";
    }
    return "?";
}

RatePoint sum_rate(const ChannelMatrix& h_true, const Precoder& p,
                   const AllocationVector& a, double sigma_n2, double e_tr,
                   const std::vector<int>& user_partition) {
    if (!(sigma_n2 > 0.0) || !(e_tr > 0.0)) {
        throw DomainError("sum_rate needs sigma_n2 > 0 and e_tr > 0");
    }
    const Eigen::Index n_r = h_true.m.rows();
    if (a.size() != n_r || p.matrix.cols() != n_r || p.matrix.rows() != h_true.m.cols()) {
        throw DimensionError("sum_rate: non-conformable channel/precoder/allocation");
    }
    const int total = std::accumulate(user_partition.begin(), user_partition.end(), 0);
    if (user_partition.empty() || total != n_r) {
        throw DimensionError("sum_rate: user partition sums to " + std::to_string(total) +
                             ", expected " + std::to_string(n_r));
    }

    const Matrix g = std::sqrt(e_tr) * (h_true.m * p.matrix * a.asDiagonal());
    RatePoint point;
    point.snr_db = 10.0 * std::log10(e_tr / sigma_n2);
    point.per_user_rates.reserve(user_partition.size());
    Eigen::Index row0 = 0;
    for (int nk : user_partition) {
        const Matrix gk = g.middleRows(row0, nk);
        const Matrix own = gk.middleCols(row0, nk);
        Matrix noise_cov = Matrix::Zero(nk, nk);
        if (row0 > 0) {
            const Matrix left = gk.leftCols(row0);
            noise_cov += left * left.adjoint();
        }
        if (row0 + nk < n_r) {
            const Matrix right = gk.rightCols(n_r - row0 - nk);
            noise_cov += right * right.adjoint();
        }
        noise_cov.diagonal().array() += sigma_n2;
        const Matrix total_cov = noise_cov + own * own.adjoint();
        // Both determinants are real positive (Hermitian positive definite).
        const double rate =
            std::log2(total_cov.determinant().real()) -
            std::log2(noise_cov.determinant().real());
        point.per_user_rates.push_back(std::max(rate, 0.0));
        row0 += nk;
    }
    point.sum_rate = std::accumulate(point.per_user_rates.begin(),
                                     point.per_user_rates.end(), 0.0);
    return point;
}

MsdCurve msd(const std::vector<AllocatorTrace>& traces, const AllocationVector& a_opt) {
    if (traces.empty()) {
        throw DimensionError("msd needs at least one trace");
    }
    const std::size_t len = traces.front().iterates.size();
    MsdCurve curve;
    curve.values.assign(len, 0.0);
    curve.trials_averaged = static_cast<int>(traces.size());
    for (const auto& trace : traces) {
        if (trace.iterates.size() != len) {
            throw DimensionError("msd: traces have mismatched lengths");
        }
        for (std::size_t i = 0; i < len; ++i) {
            if (trace.iterates[i].size() != a_opt.size()) {
                throw DimensionError("msd: iterate and optimum lengths differ");
            }
            curve.values[i] +=
                (trace.iterates[i].cwiseAbs() - a_opt.cwiseAbs()).squaredNorm();
        }
    }
    for (double& v : curve.values) {
        v /= static_cast<double>(traces.size());
    }
    return curve;
}

ErgodicResult ergodic_sum_rate(const SystemConfig& config, AllocatorKind allocator,
                               PrecoderKind precoder_kind,
                               const std::vector<double>& snr_grid_db, int n_channels) {
    config.validate();
    if (snr_grid_db.empty()) {
        throw DomainError("ergodic_sum_rate needs a non-empty SNR grid");
    }
    if (n_channels < 1) {
        throw DomainError("ergodic_sum_rate needs at least one channel");
    }
    const int n_rx = config.n_rx();
    const std::size_t n_snr = snr_grid_db.size();
    const std::size_t n_users = config.users.size();

    // Per-trial slots filled in parallel, reduced afterwards in trial order.
    std::vector<std::vector<std::vector<double>>> rates(
        n_channels, std::vector<std::vector<double>>(
                        n_snr, std::vector<double>(n_users, 0.0)));
    std::vector<char> failed(n_channels, 0);

    parallel_for(n_channels, [&](int t) {
        const std::uint64_t trial = static_cast<std::uint64_t>(t);
        Rng ch_rng = Rng::substream(config.seed, {stream_tag::channel, trial});
        const ChannelMatrix h =
            sample_rayleigh(n_rx, config.n_tx, ch_rng, config.users);
        Rng err_rng = Rng::substream(config.seed, {stream_tag::csit_error, trial});
        const ChannelSet set = split_csit(h, config.sigma_e2, err_rng);

        AllocationVector random_a;
        if (allocator == AllocatorKind::RANDOM) {
            // One draw per trial so the same vector is reused across SNR.
            Rng a_rng = Rng::substream(config.seed, {stream_tag::random_alloc, trial});
            random_a = random_allocation(n_rx, a_rng);
        }

        try {
            for (std::size_t si = 0; si < n_snr; ++si) {
                const double e_tr = std::pow(10.0, snr_grid_db[si] / 10.0);
                const Precoder p =
                    make_precoder(precoder_kind, set.h_est, config.sigma_n2, e_tr);
                AllocationVector a;
                switch (allocator) {
                    case AllocatorKind::ES:
                        a = exhaustive_search(set.h_est, p, config.es_grid_step,
                                              SearchObjective::SUMRATE,
                                              config.sigma_n2 / e_tr);
                        break;
                    case AllocatorKind::MAPA:
                        a = mapa(set.h_est, p, config.mu, config.iterations)
                                .iterates.back();
                        break;
                    case AllocatorKind::RMAPA:
                        a = rmapa(set.h_est, p, config.sigma_e2, config.mu,
                                  config.iterations, config.robust_scale)
                                .iterates.back();
                        break;
                    case AllocatorKind::UPA:
                        a = upa(n_rx);
                        break;
                    case AllocatorKind::RANDOM:
                        a = random_a;
                        break;
                }
                const RatePoint pt =
                    sum_rate(set.h_true, p, a, config.sigma_n2, e_tr, config.users);
                rates[t][si] = pt.per_user_rates;
            }
        } catch (const Error&) {
            failed[t] = 1;  // diverged (or otherwise failed) trial: excluded
        }
    });

    ErgodicResult result;
    result.points.resize(n_snr);
    long n_ok = 0;
    for (int t = 0; t < n_channels; ++t) {
        if (failed[t]) {
            ++result.failed_trials;
        } else {
            ++n_ok;
        }
    }
    for (std::size_t si = 0; si < n_snr; ++si) {
        RatePoint& pt = result.points[si];
        pt.snr_db = snr_grid_db[si];
        pt.per_user_rates.assign(n_users, 0.0);
        for (int t = 0; t < n_channels; ++t) {
            if (failed[t]) {
                continue;
            }
            for (std::size_t k = 0; k < n_users; ++k) {
                pt.per_user_rates[k] += rates[t][si][k];
            }
        }
        for (std::size_t k = 0; k < n_users; ++k) {
            pt.per_user_rates[k] /= static_cast<double>(std::max(n_ok, 1L));
        }
        pt.sum_rate = std::accumulate(pt.per_user_rates.begin(),
                                      pt.per_user_rates.end(), 0.0);
    }
    return result;
}

}  // namespace mimopa
