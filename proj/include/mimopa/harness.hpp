// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mimopa/channel.hpp"
#include "mimopa/metrics.hpp"
#include "mimopa/precoding.hpp"

namespace mimopa {

enum class ExperimentKind { LEARNING_CURVE, SUMRATE_SWEEP, CONVEXITY_PROBE };
enum class OutputFormat { CSV, JSON };

std::string to_string(ExperimentKind kind);
std::string to_string(OutputFormat format);

/// Fully resolved description of one experiment run.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::LEARNING_CURVE;
    SystemConfig system;
    std::vector<PrecoderKind> precoders;
    std::vector<AllocatorKind> allocators;
    int trials = 1;
    std::vector<double> snr_grid_db;  // sum-rate sweep only
    int theta_steps = 200;            // convexity probe only
    std::string output_path;
    OutputFormat output_format = OutputFormat::CSV;

    void validate() const;
};

/// Tabular experiment output plus ordered metadata. The data table is fully
/// determined by the effective spec (same spec, same bytes); metadata also
/// carries run facts such as wall time and failure counts.
struct ExperimentResult {
    std::string spec_fingerprint;
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> columns;  // column-major, equal lengths
    std::vector<std::pair<std::string, std::string>> metadata;
};

/// Hash of every spec field that influences the data table (format and
/// output path are presentation-only and excluded).
std::string spec_fingerprint(const ExperimentSpec& spec);

/// Gradient-descent learning curves: per trial and precoder, runs the
/// adaptive allocator against the per-channel grid-search optimum and
/// averages the squared deviation per iteration. Columns: iteration,
/// msd_<precoder>...
ExperimentResult run_learning_curve(const ExperimentSpec& spec);

/// Ergodic sum-rate sweep over the SNR grid for every allocator x precoder
/// pair under common random numbers. Columns: snr_db, <allocator>_<precoder>...
ExperimentResult run_sum_rate_sweep(const ExperimentSpec& spec);

/// Objective profile along the two-stream constraint arc a = (cos t, sin t),
/// t in [0, pi/2], with a per-curve discrete unimodality verdict in the
/// metadata. Columns: theta, mse_<precoder>...
ExperimentResult run_convexity_probe(const ExperimentSpec& spec);

/// Dispatches on spec.kind.
ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace mimopa
