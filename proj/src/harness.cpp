// SPDX-License-Identifier: Apache-2.0
#include "mimopa/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mimopa/allocation.hpp"
#include "mimopa/errors.hpp"
#include "mimopa/parallel.hpp"
#include "mimopa/streams.hpp"

namespace mimopa {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_names(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out += (i ? "," : "") + parts[i];
    }
    return out;
}

std::vector<std::string> precoder_names(const ExperimentSpec& spec) {
    std::vector<std::string> names;
    for (PrecoderKind k : spec.precoders) {
        names.push_back(to_string(k));
    }
    return names;
}

// Effective-spec echo shared by all experiments; deterministic order.
std::vector<std::pair<std::string, std::string>> base_metadata(
    const ExperimentSpec& spec) {
    std::vector<std::pair<std::string, std::string>> md;
    md.emplace_back("schema_version", "1");
    md.emplace_back("kind", to_string(spec.kind));
    md.emplace_back("spec_fingerprint", spec_fingerprint(spec));
    md.emplace_back("seed", std::to_string(spec.system.seed));
    md.emplace_back("trials", std::to_string(spec.trials));
    md.emplace_back("n_tx", std::to_string(spec.system.n_tx));
    {
        std::vector<std::string> users;
        for (int nk : spec.system.users) {
            users.push_back(std::to_string(nk));
        }
        md.emplace_back("users", join_names(users));
    }
    md.emplace_back("sigma_n2", format_double(spec.system.sigma_n2));
    md.emplace_back("sigma_e2", format_double(spec.system.sigma_e2));
    md.emplace_back("e_tr", format_double(spec.system.e_tr));
    md.emplace_back("mu", format_double(spec.system.mu));
    md.emplace_back("iterations", std::to_string(spec.system.iterations));
    md.emplace_back("es_grid_step", format_double(spec.system.es_grid_step));
    md.emplace_back("robust_scale", format_double(spec.system.robust_scale));
    md.emplace_back("precoders", join_names(precoder_names(spec)));
    {
        std::vector<std::string> allocs;
        for (AllocatorKind k : spec.allocators) {
            allocs.push_back(to_string(k));
        }
        md.emplace_back("allocators", join_names(allocs));
    }
    if (spec.kind == ExperimentKind::SUMRATE_SWEEP) {
        std::vector<std::string> snrs;
        for (double s : spec.snr_grid_db) {
            snrs.push_back(format_double(s));
        }
        md.emplace_back("snr_grid_db", join_names(snrs));
    }
    if (spec.kind == ExperimentKind::CONVEXITY_PROBE) {
        md.emplace_back("theta_steps", std::to_string(spec.theta_steps));
    }
    return md;
}

class WallClock {
  public:
    WallClock() : start_(std::chrono::steady_clock::now()) {}
    std::string elapsed_ms() const {
        const auto dt = std::chrono::steady_clock::now() - start_;
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(dt);
        return std::to_string(ms.count());
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::LEARNING_CURVE: return "learning_curve";
        case ExperimentKind::SUMRATE_SWEEP: return "sumrate_sweep";
        case ExperimentKind::CONVEXITY_PROBE: return "convexity_probe";
    }
    return "?";
}

std::string to_string(OutputFormat format) {
    return format == OutputFormat::CSV ? "csv" : "json";
}

void ExperimentSpec::validate() const {
    system.validate();
    if (trials < 1) {
        throw ConfigError("trials must be at least 1");
    }
    if (precoders.empty()) {
        throw ConfigError("at least one precoder is required");
    }
    for (PrecoderKind k : precoders) {
        if (k != PrecoderKind::MF && system.n_rx() > system.n_tx) {
            throw ConfigError(
                to_string(k) + " precoding takes a right (pseudo-)inverse and needs "
                "n_tx >= total receive antennas; got n_tx = " +
                std::to_string(system.n_tx) + " with user antennas summing to " +
                std::to_string(system.n_rx()));
        }
    }
    if (kind == ExperimentKind::SUMRATE_SWEEP) {
        if (snr_grid_db.empty()) {
            throw ConfigError("sumrate_sweep requires an SNR grid");
        }
        if (allocators.empty()) {
            throw ConfigError("sumrate_sweep requires at least one allocator");
        }
    } else if (!snr_grid_db.empty()) {
        throw ConfigError("snr_db is only valid for kind = sumrate_sweep");
    }
    if (kind == ExperimentKind::CONVEXITY_PROBE) {
        if (system.n_rx() != 2) {
            throw ConfigError("convexity_probe requires exactly two streams "
                              "(user partition summing to 2)");
        }
        if (theta_steps < 2) {
            throw ConfigError("theta_steps must be at least 2");
        }
    }
}

std::string spec_fingerprint(const ExperimentSpec& spec) {
    std::ostringstream canon;
    canon << to_string(spec.kind) << '|' << spec.system.n_tx << '|';
    for (int nk : spec.system.users) {
        canon << nk << ',';
    }
    canon << '|' << format_double(spec.system.sigma_n2) << '|'
          << format_double(spec.system.sigma_e2) << '|'
          << format_double(spec.system.e_tr) << '|' << spec.system.seed << '|'
          << format_double(spec.system.mu) << '|' << spec.system.iterations << '|'
          << format_double(spec.system.es_grid_step) << '|'
          << format_double(spec.system.robust_scale) << '|' << spec.trials << '|'
          << spec.theta_steps << '|';
    for (PrecoderKind k : spec.precoders) {
        canon << to_string(k) << ',';
    }
    canon << '|';
    for (AllocatorKind k : spec.allocators) {
        canon << to_string(k) << ',';
    }
    canon << '|';
    for (double s : spec.snr_grid_db) {
        canon << format_double(s) << ',';
    }
    const std::string s = canon.str();
    std::uint64_t h = 0x6d696d6f70610000ULL;  // arbitrary fixed basis
    for (unsigned char c : s) {
        h = splitmix64(h ^ c);
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentResult run_learning_curve(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.kind != ExperimentKind::LEARNING_CURVE) {
        throw ConfigError("run_learning_curve called with kind " + to_string(spec.kind));
    }
    const WallClock clock;
    const SystemConfig& sys = spec.system;
    const int n_rx = sys.n_rx();
    const int iters = sys.iterations;
    const std::size_t n_prec = spec.precoders.size();

    // Refuse up front if the per-trial optimum grid is not enumerable.
    {
        const double levels = std::floor(1.0 / sys.es_grid_step) + 1.0;
        if (std::pow(levels, static_cast<double>(n_rx - 1)) > 1e8) {
            throw SearchBudgetError(
                "es_grid_step " + format_double(sys.es_grid_step) + " over " +
                std::to_string(n_rx) +
                " streams exceeds the enumeration budget; coarsen es_grid_step");
        }
    }

    // slot[t][p] = per-iteration squared deviations, or empty when that
    // (trial, precoder) pair failed.
    std::vector<std::vector<std::vector<double>>> slots(
        spec.trials, std::vector<std::vector<double>>(n_prec));
    parallel_for(spec.trials, [&](int t) {
        const std::uint64_t trial = static_cast<std::uint64_t>(t);
        Rng ch_rng = Rng::substream(sys.seed, {stream_tag::channel, trial});
        const ChannelMatrix h = sample_rayleigh(n_rx, sys.n_tx, ch_rng, sys.users);
        Rng err_rng = Rng::substream(sys.seed, {stream_tag::csit_error, trial});
        const ChannelSet set = split_csit(h, sys.sigma_e2, err_rng);
        for (std::size_t pi = 0; pi < n_prec; ++pi) {
            try {
                const Precoder p = make_precoder(spec.precoders[pi], set.h_est,
                                                 sys.sigma_n2, sys.e_tr);
                const AllocationVector a_opt =
                    exhaustive_search(set.h_est, p, sys.es_grid_step,
                                      SearchObjective::MSE, sys.sigma_n2);
                const AllocatorTrace trace = mapa(set.h_est, p, sys.mu, iters);
                std::vector<double> dev(iters);
                for (int i = 0; i < iters; ++i) {
                    dev[i] = (trace.iterates[i].cwiseAbs() - a_opt.cwiseAbs())
                                 .squaredNorm();
                }
                slots[t][pi] = std::move(dev);
            } catch (const Error&) {
                // failed pair stays empty and is excluded from the average
            }
        }
    });

    ExperimentResult result;
    result.spec_fingerprint = spec_fingerprint(spec);
    result.column_names.push_back("iteration");
    result.columns.emplace_back();
    for (int i = 1; i <= iters; ++i) {
        result.columns[0].push_back(static_cast<double>(i));
    }
    std::vector<long> ok_counts(n_prec, 0);
    for (std::size_t pi = 0; pi < n_prec; ++pi) {
        std::vector<double> acc(iters, 0.0);
        for (int t = 0; t < spec.trials; ++t) {
            if (slots[t][pi].empty()) {
                continue;
            }
            ++ok_counts[pi];
            for (int i = 0; i < iters; ++i) {
                acc[i] += slots[t][pi][i];
            }
        }
        const double denom = static_cast<double>(std::max(ok_counts[pi], 1L));
        for (double& v : acc) {
            v /= denom;
        }
        result.column_names.push_back("msd_" + to_string(spec.precoders[pi]));
        result.columns.push_back(std::move(acc));
    }

    result.metadata = base_metadata(spec);
    for (std::size_t pi = 0; pi < n_prec; ++pi) {
        const std::string name = to_string(spec.precoders[pi]);
        result.metadata.emplace_back("trials_averaged_" + name,
                                     std::to_string(ok_counts[pi]));
        result.metadata.emplace_back(
            "failed_" + name, std::to_string(spec.trials - ok_counts[pi]));
    }
    result.metadata.emplace_back("wall_time_ms", clock.elapsed_ms());
    return result;
}

ExperimentResult run_sum_rate_sweep(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.kind != ExperimentKind::SUMRATE_SWEEP) {
        throw ConfigError("run_sum_rate_sweep called with kind " + to_string(spec.kind));
    }
    const WallClock clock;

    ExperimentResult result;
    result.spec_fingerprint = spec_fingerprint(spec);
    result.column_names.push_back("snr_db");
    result.columns.push_back(spec.snr_grid_db);
    std::vector<std::pair<std::string, long>> failures;
    for (AllocatorKind alloc : spec.allocators) {
        for (PrecoderKind prec : spec.precoders) {
            const ErgodicResult er = ergodic_sum_rate(spec.system, alloc, prec,
                                                      spec.snr_grid_db, spec.trials);
            std::vector<double> col;
            col.reserve(er.points.size());
            for (const RatePoint& pt : er.points) {
                col.push_back(pt.sum_rate);
            }
            const std::string name = to_string(alloc) + "_" + to_string(prec);
            result.column_names.push_back(name);
            result.columns.push_back(std::move(col));
            failures.emplace_back(name, er.failed_trials);
        }
    }

    result.metadata = base_metadata(spec);
    long total_failed = 0;
    for (const auto& [name, count] : failures) {
        result.metadata.emplace_back("failed_" + name, std::to_string(count));
        total_failed += count;
    }
    result.metadata.emplace_back("failed_total", std::to_string(total_failed));
    result.metadata.emplace_back("wall_time_ms", clock.elapsed_ms());
    return result;
}

ExperimentResult run_convexity_probe(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.kind != ExperimentKind::CONVEXITY_PROBE) {
        throw ConfigError("run_convexity_probe called with kind " +
                          to_string(spec.kind));
    }
    const WallClock clock;
    const SystemConfig& sys = spec.system;

    Rng ch_rng = Rng::substream(sys.seed, {stream_tag::channel, 0});
    const ChannelMatrix h = sample_rayleigh(2, sys.n_tx, ch_rng, sys.users);
    Rng err_rng = Rng::substream(sys.seed, {stream_tag::csit_error, 0});
    const ChannelSet set = split_csit(h, sys.sigma_e2, err_rng);

    ExperimentResult result;
    result.spec_fingerprint = spec_fingerprint(spec);
    result.column_names.push_back("theta");
    result.columns.emplace_back();
    const int steps = spec.theta_steps;
    for (int j = 0; j < steps; ++j) {
        result.columns[0].push_back(M_PI_2 * static_cast<double>(j) /
                                    static_cast<double>(steps - 1));
    }

    std::vector<std::pair<std::string, std::string>> verdicts;
    for (PrecoderKind kind : spec.precoders) {
        const Precoder p = make_precoder(kind, set.h_est, sys.sigma_n2, sys.e_tr);
        std::vector<double> curve(steps);
        AllocationVector a(2);
        for (int j = 0; j < steps; ++j) {
            const double theta = result.columns[0][j];
            a << std::cos(theta), std::sin(theta);
            curve[j] = mse_objective(set.h_est, p, a, sys.sigma_n2);
        }
        // Discrete unimodality: ignoring first differences below tolerance,
        // the sign pattern along the arc must be a fall followed by a rise.
        constexpr double tol = 1e-9;
        int sign_changes = 0;
        int prev_sign = 0;
        bool rose_then_fell = false;
        for (int j = 1; j < steps; ++j) {
            const double diff = curve[j] - curve[j - 1];
            if (std::abs(diff) <= tol) {
                continue;
            }
            const int sign = diff > 0 ? 1 : -1;
            if (prev_sign != 0 && sign != prev_sign) {
                ++sign_changes;
                if (sign < 0) {
                    rose_then_fell = true;  // a rise turning into a fall
                }
            }
            prev_sign = sign;
        }
        const bool unimodal = (sign_changes <= 1) && !rose_then_fell;
        const std::string name = to_string(kind);
        verdicts.emplace_back("unimodal_" + name, unimodal ? "true" : "false");
        result.column_names.push_back("mse_" + name);
        result.columns.push_back(std::move(curve));
    }

    result.metadata = base_metadata(spec);
    for (auto& v : verdicts) {
        result.metadata.push_back(std::move(v));
    }
    result.metadata.emplace_back("wall_time_ms", clock.elapsed_ms());
    return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    switch (spec.kind) {
        case ExperimentKind::LEARNING_CURVE: return run_learning_curve(spec);
        case ExperimentKind::SUMRATE_SWEEP: return run_sum_rate_sweep(spec);
        case ExperimentKind::CONVEXITY_PROBE: return run_convexity_probe(spec);
    }
    throw ConfigError("unknown experiment kind");
}

}  // namespace mimopa
