// SPDX-License-Identifier: Apache-2.0
#include "mimopa/oracle.hpp"

#include <cmath>
#include <ostream>

#include "mimopa/allocation.hpp"
#include "mimopa/streams.hpp"

namespace mimopa {

namespace {

constexpr std::uint64_t oracle_tag = 0x6f7261636cULL;

// Central finite difference of a scalar objective in coordinate m.
template <typename F>
double central_diff(const F& f, AllocationVector a, Eigen::Index m, double step) {
    const double orig = a(m);
    a(m) = orig + step;
    const double up = f(a);
    a(m) = orig - step;
    const double down = f(a);
    return (up - down) / (2.0 * step);
}

}  // namespace

OracleReport run_oracle_suite(const ExperimentSpec& spec, std::ostream& out) {
    OracleReport report;
    const double sigma_n2 = spec.system.sigma_n2;
    const double fd_step = 1e-6;
    const PrecoderKind kinds[] = {PrecoderKind::MF, PrecoderKind::ZF,
                                  PrecoderKind::MMSE};

    // Gradient checks: closed forms against central finite differences of
    // the matching objective, for both the plain and the error-averaged
    // gradient, over mixed dimensions and precoders.
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t inst = static_cast<std::uint64_t>(i);
        const int n_r = 2 + (i % 3);   // 2..4 streams
        const int n_t = 4;
        Rng ch_rng = Rng::substream(spec.system.seed, {oracle_tag, 1, inst});
        const ChannelMatrix h = sample_rayleigh(n_r, n_t, ch_rng);
        const Precoder p =
            make_precoder(kinds[i % 3], h, sigma_n2, spec.system.e_tr);
        AllocationVector a(n_r);
        for (int m = 0; m < n_r; ++m) {
            a(m) = 2.0 * ch_rng.uniform01() - 1.0;
        }
        const double sigma_e2 = 0.05 + 0.1 * (i % 5);
        const ErrorCovariance xi = ErrorCovariance::homogeneous(
            n_r, n_t, sigma_e2, spec.system.robust_scale);

        const RVector g_plain = mse_gradient(h, p, a);
        const RVector g_robust = robust_gradient(h, p, xi, a);
        auto f_plain = [&](const AllocationVector& v) {
            return mse_objective(h, p, v, sigma_n2);
        };
        auto f_robust = [&](const AllocationVector& v) {
            double penalty = 0.0;
            for (int m = 0; m < n_r; ++m) {
                penalty += (xi.xi.array() * p.matrix.col(m).array().abs2()).sum() *
                           v(m) * v(m);
            }
            return mse_objective(h, p, v, sigma_n2) + penalty;
        };
        double worst = 0.0;
        for (int m = 0; m < n_r; ++m) {
            const double fd_p = central_diff(f_plain, a, m, fd_step);
            const double fd_r = central_diff(f_robust, a, m, fd_step);
            const double rel_p =
                std::abs(g_plain(m) - fd_p) / std::max(std::abs(fd_p), 1e-12);
            const double rel_r =
                std::abs(g_robust(m) - fd_r) / std::max(std::abs(fd_r), 1e-12);
            worst = std::max({worst, rel_p, rel_r});
        }
        report.gradient_worst_rel_err = std::max(report.gradient_worst_rel_err, worst);
        ++report.gradient_checks;
        if (!(worst < 1e-5)) {
            ++report.gradient_failures;
        }
    }
    out << "gradient vs finite differences: " << report.gradient_checks
        << " instances, " << report.gradient_failures
        << " failures, worst relative error " << report.gradient_worst_rel_err
        << "\n";

    // Optimality checks: converged descent against a dense two-stream grid.
    for (int i = 0; i < 50; ++i) {
        const std::uint64_t inst = static_cast<std::uint64_t>(i);
        Rng ch_rng = Rng::substream(spec.system.seed, {oracle_tag, 2, inst});
        const ChannelMatrix h = sample_rayleigh(2, 4, ch_rng);
        const Precoder p =
            make_precoder(kinds[i % 3], h, sigma_n2, spec.system.e_tr);
        const AllocatorTrace trace = mapa(h, p, spec.system.mu, 2000);
        const AllocationVector a_es =
            exhaustive_search(h, p, 0.005, SearchObjective::MSE, sigma_n2);
        const double f_mapa =
            mse_objective(h, p, trace.iterates.back(), sigma_n2);
        const double f_es = mse_objective(h, p, a_es, sigma_n2);
        const double gap = f_mapa - f_es;
        report.search_worst_gap = std::max(report.search_worst_gap, gap);
        ++report.search_checks;
        if (!(gap < 1e-3)) {
            ++report.search_failures;
        }
    }
    out << "descent vs grid search: " << report.search_checks << " instances, "
        << report.search_failures << " failures, worst objective gap "
        << report.search_worst_gap << "\n";

    const int passed = (report.gradient_checks - report.gradient_failures) +
                       (report.search_checks - report.search_failures);
    const int total = report.gradient_checks + report.search_checks;
    out << "oracle suite: " << passed << "/" << total << " checks passed\n";
    return report;
}

}  // namespace mimopa
