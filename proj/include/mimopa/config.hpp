// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

#include "mimopa/harness.hpp"

namespace mimopa {

/// Parses a TOML-style experiment config (sections, key = value pairs,
/// strings, numbers, booleans, flat arrays, # comments) into a fully
/// defaulted ExperimentSpec. Unknown keys are rejected with a
/// nearest-key suggestion; every diagnostic carries file and line.
///
/// Recognized layout:
///   schema_version = 1            (optional, must be 1 when present)
///   [experiment]  kind, trials, seed, precoders, allocators, output, format
///   [system]      n_tx, users, sigma_n2, sigma_e2, e_tr
///   [algorithm]   mu, iterations, es_grid_step, robust_scale
///   [sweep]       snr_db          (sumrate_sweep only)
///   [probe]       theta_steps     (convexity_probe only)
///
/// Defaults depend on kind; the effective values are echoed in result
/// metadata.
ExperimentSpec parse_config(const std::string& path);

/// Same parser over an in-memory document; origin names the source in
/// diagnostics.
ExperimentSpec parse_config_text(const std::string& text, const std::string& origin);

/// Writes an ExperimentResult. CSV: metadata as leading '# key = value'
/// comment lines, a header row, then one row per grid point with values at 9
/// significant digits. JSON: a single {"metadata": ..., "tables": ...}
/// document with full-precision numbers.
void emit_result(const ExperimentResult& result, OutputFormat format,
                 const std::string& path);

/// Tables read back from an emitted file.
struct ReadBack {
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> columns;
    std::map<std::string, std::string> metadata;
};

/// Parses a file previously written by emit_result.
ReadBack read_result(const std::string& path, OutputFormat format);

/// Extracts the deterministic data section from emitted file contents: for
/// CSV everything except '#' comment lines, for JSON the canonicalized
/// "tables" subtree. Two runs of the same effective spec produce identical
/// data sections even though metadata (wall time) differs.
std::string data_section(const std::string& file_contents, OutputFormat format);

}  // namespace mimopa
