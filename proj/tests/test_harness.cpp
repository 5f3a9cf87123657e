// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <string>

#include "mimopa/errors.hpp"
#include "mimopa/harness.hpp"

using namespace mimopa;

namespace {

ExperimentSpec small_learning_spec() {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::LEARNING_CURVE;
  spec.system.seed = 2026;
  spec.system.iterations = 30;
  spec.system.es_grid_step = 0.05;
  spec.precoders = {PrecoderKind::MF, PrecoderKind::ZF};
  spec.trials = 4;
  return spec;
}

std::map<std::string, std::string> metadata_map(const ExperimentResult& r) {
  return {r.metadata.begin(), r.metadata.end()};
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("spec validation catches inconsistent requests") {
  ExperimentSpec spec = small_learning_spec();
  CHECK_NOTHROW(spec.validate());

  ExperimentSpec bad = spec;
  bad.trials = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = spec;
  bad.precoders = {};
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  // a right pseudo-inverse cannot exist with more streams than tx antennas
  bad = spec;
  bad.system.users = {3, 2};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.precoders = {PrecoderKind::MF};  // matched filter has no such constraint
  CHECK_NOTHROW(bad.validate());

  bad = spec;
  bad.snr_grid_db = {0.0, 10.0};  // SNR grid outside a sweep
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = spec;
  bad.kind = ExperimentKind::SUMRATE_SWEEP;
  CHECK_THROWS_AS(bad.validate(), ConfigError);  // no grid, no allocators

  ExperimentSpec probe;
  probe.kind = ExperimentKind::CONVEXITY_PROBE;
  probe.precoders = {PrecoderKind::ZF};
  probe.system.users = {2, 2};
  CHECK_THROWS_AS(probe.validate(), ConfigError);  // needs exactly two streams
  probe.system.users = {1, 1};
  CHECK_NOTHROW(probe.validate());
  probe.theta_steps = 1;
  CHECK_THROWS_AS(probe.validate(), ConfigError);
}

TEST_CASE("fingerprint tracks data-shaping fields and ignores presentation") {
  const ExperimentSpec spec = small_learning_spec();
  const std::string base = spec_fingerprint(spec);
  CHECK(base == spec_fingerprint(spec));

  ExperimentSpec other = spec;
  other.system.seed = 1;
  CHECK(spec_fingerprint(other) != base);
  other = spec;
  other.system.mu = 0.02;
  CHECK(spec_fingerprint(other) != base);
  other = spec;
  other.trials = 5;
  CHECK(spec_fingerprint(other) != base);

  other = spec;
  other.output_path = "elsewhere.csv";
  other.output_format = OutputFormat::JSON;
  CHECK(spec_fingerprint(other) == base);
}

TEST_CASE("learning curves decrease and rerun bit-identically") {
  const ExperimentSpec spec = small_learning_spec();
  const ExperimentResult a = run_learning_curve(spec);
  REQUIRE(a.column_names.size() == 3);
  CHECK(a.column_names[0] == "iteration");
  CHECK(a.column_names[1] == "msd_mf");
  CHECK(a.column_names[2] == "msd_zf");
  REQUIRE(a.columns[0].size() == 30);
  CHECK(a.columns[0].front() == 1.0);
  CHECK(a.columns[0].back() == 30.0);
  for (std::size_t c = 1; c < 3; ++c) {
    for (double v : a.columns[c]) CHECK(v >= 0.0);
    CHECK(a.columns[c].back() < a.columns[c].front());
  }
  const auto md = metadata_map(a);
  CHECK(md.at("trials_averaged_mf") == "4");
  CHECK(md.at("failed_mf") == "0");
  CHECK(md.at("kind") == "learning_curve");
  CHECK(md.at("spec_fingerprint") == a.spec_fingerprint);

  const ExperimentResult b = run_learning_curve(spec);
  CHECK(a.columns == b.columns);
  CHECK(a.column_names == b.column_names);
}

TEST_CASE("results are invariant to the worker count") {
  const ExperimentSpec spec = small_learning_spec();
  setenv("MIMOPA_WORKERS", "1", 1);
  const ExperimentResult serial = run_learning_curve(spec);
  setenv("MIMOPA_WORKERS", "3", 1);
  const ExperimentResult threaded = run_learning_curve(spec);
  unsetenv("MIMOPA_WORKERS");
  CHECK(serial.columns == threaded.columns);
}

TEST_CASE("a step size that always diverges yields full failure accounting") {
  ExperimentSpec spec = small_learning_spec();
  spec.system.mu = 1e6;
  spec.precoders = {PrecoderKind::ZF};
  const ExperimentResult r = run_learning_curve(spec);
  const auto md = metadata_map(r);
  CHECK(md.at("failed_zf") == "4");
  CHECK(md.at("trials_averaged_zf") == "0");
  for (double v : r.columns[1]) CHECK(v == 0.0);
}

TEST_CASE("sum-rate sweep columns are named allocator_precoder and rerun equal") {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::SUMRATE_SWEEP;
  spec.system.seed = 515;
  spec.system.sigma_e2 = 0.1;
  spec.system.iterations = 40;
  spec.system.es_grid_step = 0.25;
  spec.trials = 3;
  spec.snr_grid_db = {0.0, 10.0};
  spec.precoders = {PrecoderKind::ZF};
  spec.allocators = {AllocatorKind::UPA, AllocatorKind::RANDOM};
  const ExperimentResult a = run_sum_rate_sweep(spec);
  REQUIRE(a.column_names.size() == 3);
  CHECK(a.column_names[0] == "snr_db");
  CHECK(a.column_names[1] == "upa_zf");
  CHECK(a.column_names[2] == "random_zf");
  CHECK(a.columns[0] == spec.snr_grid_db);
  const auto md = metadata_map(a);
  CHECK(md.at("failed_upa_zf") == "0");
  CHECK(md.at("failed_total") == "0");

  // common random numbers: reordering allocators permutes columns only
  ExperimentSpec swapped = spec;
  swapped.allocators = {AllocatorKind::RANDOM, AllocatorKind::UPA};
  const ExperimentResult b = run_sum_rate_sweep(swapped);
  CHECK(b.column_names[1] == "random_zf");
  CHECK(b.columns[1] == a.columns[2]);
  CHECK(b.columns[2] == a.columns[1]);
}

TEST_CASE("convexity probe emits verdicts and refines stably") {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::CONVEXITY_PROBE;
  spec.system.seed = 626;
  spec.system.users = {1, 1};
  spec.precoders = {PrecoderKind::ZF};
  spec.theta_steps = 64;
  const ExperimentResult coarse = run_convexity_probe(spec);
  REQUIRE(coarse.column_names.size() == 2);
  CHECK(coarse.column_names[0] == "theta");
  CHECK(coarse.column_names[1] == "mse_zf");
  REQUIRE(coarse.columns[0].size() == 64);
  CHECK(coarse.columns[0].front() == 0.0);
  CHECK(coarse.columns[0].back() == doctest::Approx(M_PI_2).epsilon(1e-15));
  const auto md = metadata_map(coarse);
  REQUIRE(md.count("unimodal_zf") == 1);
  const std::string verdict = md.at("unimodal_zf");
  CHECK((verdict == "true" || verdict == "false"));

  // doubling the resolution moves the arc minimum by at most two coarse cells
  spec.theta_steps = 128;
  const ExperimentResult fine = run_convexity_probe(spec);
  auto argmin_theta = [](const ExperimentResult& r) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < r.columns[1].size(); ++j)
      if (r.columns[1][j] < r.columns[1][best]) best = j;
    return r.columns[0][best];
  };
  CHECK(std::abs(argmin_theta(coarse) - argmin_theta(fine)) <=
        2.0 * (M_PI_2 / 63.0) + 1e-12);
}

TEST_CASE("run_experiment dispatches on kind and rejects mismatched calls") {
  ExperimentSpec spec = small_learning_spec();
  const ExperimentResult direct = run_learning_curve(spec);
  const ExperimentResult dispatched = run_experiment(spec);
  CHECK(direct.columns == dispatched.columns);

  ExperimentSpec sweep;
  sweep.kind = ExperimentKind::SUMRATE_SWEEP;
  sweep.trials = 1;
  sweep.snr_grid_db = {0.0};
  sweep.precoders = {PrecoderKind::MF};
  sweep.allocators = {AllocatorKind::UPA};
  CHECK_THROWS_AS((void)run_learning_curve(sweep), ConfigError);
  CHECK_THROWS_AS((void)run_convexity_probe(sweep), ConfigError);
}

}  // TEST_SUITE
