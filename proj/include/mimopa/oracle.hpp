// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

#include "mimopa/harness.hpp"

namespace mimopa {

/// Outcome of the self-check suite: closed-form gradients against central
/// finite differences, and the adaptive allocator against a dense grid
/// search on two-stream instances.
struct OracleReport {
    int gradient_checks = 0;
    int gradient_failures = 0;
    double gradient_worst_rel_err = 0.0;
    int search_checks = 0;
    int search_failures = 0;
    double search_worst_gap = 0.0;

    bool all_passed() const {
        return gradient_failures == 0 && search_failures == 0;
    }
};

/// Runs the oracle suite seeded from the spec and prints one line per check
/// group plus a final pass count to out. Instance dimensions and precoders
/// cycle deterministically; tolerances: 1e-5 relative for gradients
/// (finite-difference step 1e-6), 1e-3 absolute for the converged objective
/// versus a 0.005-step grid search.
OracleReport run_oracle_suite(const ExperimentSpec& spec, std::ostream& out);

}  // namespace mimopa
