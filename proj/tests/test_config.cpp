// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>

#include "mimopa/config.hpp"
#include "mimopa/errors.hpp"

using namespace mimopa;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool error_mentions(const std::function<void()>& fn, const std::string& needle) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

ExperimentResult tiny_result() {
  ExperimentResult r;
  r.spec_fingerprint = "deadbeef00000000";
  r.column_names = {"x", "y"};
  r.columns = {{1.0, 2.5, 100.0}, {0.123456789123, -0.5, 3.0e-7}};
  r.metadata = {{"alpha", "1"}, {"note", "two words"}};
  return r;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("a minimal learning-curve config fills every default") {
  const ExperimentSpec spec = parse_config_text(
      "[experiment]\nkind = \"learning_curve\"\n", "mini.toml");
  CHECK(spec.kind == ExperimentKind::LEARNING_CURVE);
  CHECK(spec.trials == 1000);
  CHECK(spec.system.seed == 12345);
  CHECK(spec.system.n_tx == 4);
  REQUIRE(spec.system.users.size() == 2);
  CHECK(spec.system.users[0] == 2);
  CHECK(spec.system.sigma_n2 == 1.0);
  CHECK(spec.system.sigma_e2 == 0.0);
  CHECK(spec.system.e_tr == 10.0);
  CHECK(spec.system.mu == 0.01);
  CHECK(spec.system.iterations == 100);
  CHECK(spec.system.es_grid_step == 0.005);
  CHECK(spec.system.robust_scale == 1.0);
  REQUIRE(spec.precoders.size() == 3);
  CHECK(spec.precoders[0] == PrecoderKind::MF);
  CHECK(spec.precoders[2] == PrecoderKind::MMSE);
  REQUIRE(spec.allocators.size() == 1);
  CHECK(spec.allocators[0] == AllocatorKind::MAPA);
  CHECK(spec.snr_grid_db.empty());
  CHECK(spec.output_format == OutputFormat::CSV);
  CHECK(spec.output_path == "learning_curve.csv");
}

TEST_CASE("sweep and probe kinds carry their own defaults") {
  const ExperimentSpec sweep = parse_config_text(
      "[experiment]\nkind = \"sumrate_sweep\"\n", "sweep.toml");
  CHECK(sweep.trials == 2000);
  CHECK(sweep.system.sigma_e2 == 0.1);
  CHECK(sweep.system.es_grid_step == 0.05);
  REQUIRE(sweep.precoders.size() == 2);
  CHECK(sweep.precoders[0] == PrecoderKind::ZF);
  REQUIRE(sweep.allocators.size() == 5);
  CHECK(sweep.allocators[0] == AllocatorKind::ES);
  CHECK(sweep.allocators[4] == AllocatorKind::RANDOM);
  REQUIRE(sweep.snr_grid_db.size() == 5);
  CHECK(sweep.snr_grid_db[1] == 5.0);

  const ExperimentSpec probe = parse_config_text(
      "[experiment]\nkind = \"convexity_probe\"\nformat = \"json\"\n",
      "probe.toml");
  CHECK(probe.trials == 1);
  REQUIRE(probe.system.users.size() == 2);
  CHECK(probe.system.users[0] == 1);
  CHECK(probe.theta_steps == 200);
  CHECK(probe.output_format == OutputFormat::JSON);
  CHECK(probe.output_path == "convexity_probe.json");
}

TEST_CASE("explicit values override every default") {
  const std::string text =
      "schema_version = 1\n"
      "[experiment]\n"
      "kind = \"sumrate_sweep\"\n"
      "trials = 12  # inline comment\n"
      "seed = 777\n"
      "precoders = [\"zf\"]\n"
      "allocators = [\"upa\", \"random\"]\n"
      "output = \"my_run.json\"\n"
      "format = \"json\"\n"
      "[system]\n"
      "n_tx = 6\n"
      "users = [3, 2]\n"
      "sigma_n2 = 0.5\n"
      "sigma_e2 = 0.2\n"
      "e_tr = 4.0\n"
      "[algorithm]\n"
      "mu = 0.02\n"
      "iterations = 55\n"
      "es_grid_step = 0.1\n"
      "robust_scale = 0.5\n"
      "[sweep]\n"
      "snr_db = [0.0, 2.5, 5]\n";
  const ExperimentSpec spec = parse_config_text(text, "full.toml");
  CHECK(spec.trials == 12);
  CHECK(spec.system.seed == 777);
  CHECK(spec.system.n_tx == 6);
  CHECK(spec.system.users[0] == 3);
  CHECK(spec.system.sigma_n2 == 0.5);
  CHECK(spec.system.sigma_e2 == 0.2);
  CHECK(spec.system.e_tr == 4.0);
  CHECK(spec.system.mu == 0.02);
  CHECK(spec.system.iterations == 55);
  CHECK(spec.system.es_grid_step == 0.1);
  CHECK(spec.system.robust_scale == 0.5);
  REQUIRE(spec.precoders.size() == 1);
  REQUIRE(spec.allocators.size() == 2);
  CHECK(spec.allocators[1] == AllocatorKind::RANDOM);
  REQUIRE(spec.snr_grid_db.size() == 3);
  CHECK(spec.snr_grid_db[2] == 5.0);
  CHECK(spec.output_path == "my_run.json");
  CHECK(spec.output_format == OutputFormat::JSON);
}

TEST_CASE("unknown keys are rejected with a nearest-key suggestion and line") {
  const std::string text =
      "[experiment]\nkind = \"learning_curve\"\ntrails = 10\n";
  CHECK(error_mentions([&] { (void)parse_config_text(text, "cfg.toml"); },
                       "did you mean 'trials'"));
  CHECK(error_mentions([&] { (void)parse_config_text(text, "cfg.toml"); },
                       "cfg.toml:3"));
}

TEST_CASE("unknown sections are rejected with a suggestion") {
  const std::string text = "[experimnt]\nkind = \"learning_curve\"\n";
  CHECK(error_mentions([&] { (void)parse_config_text(text, "cfg.toml"); },
                       "did you mean [experiment]"));
}

TEST_CASE("structural problems carry file and line diagnostics") {
  CHECK(error_mentions(
      [] {
        (void)parse_config_text(
            "[experiment]\nkind = \"learning_curve\"\nkind = \"learning_curve\"\n",
            "dup.toml");
      },
      "dup.toml:3: duplicate key"));
  CHECK(error_mentions(
      [] { (void)parse_config_text("[experiment]\njust some words\n", "bad.toml"); },
      "bad.toml:2"));
  CHECK(error_mentions(
      [] {
        (void)parse_config_text("[experiment\nkind = \"learning_curve\"\n",
                                "sec.toml");
      },
      "sec.toml:1"));
  CHECK(error_mentions(
      [] {
        (void)parse_config_text(
            "[experiment]\nkind = \"learning_curve\"\ntrials = \"ten\"\n",
            "typ.toml");
      },
      "must be an integer"));
  CHECK(error_mentions([] { (void)parse_config_text("", "empty.toml"); },
                       "missing required key 'kind'"));
}

TEST_CASE("schema_version must be 1 when present") {
  CHECK_NOTHROW((void)parse_config_text(
      "schema_version = 1\n[experiment]\nkind = \"learning_curve\"\n", "v.toml"));
  CHECK(error_mentions(
      [] {
        (void)parse_config_text(
            "schema_version = 2\n[experiment]\nkind = \"learning_curve\"\n",
            "v.toml");
      },
      "unsupported schema_version"));
}

TEST_CASE("kind-specific keys are rejected for other kinds") {
  CHECK(error_mentions(
      [] {
        (void)parse_config_text(
            "[experiment]\nkind = \"learning_curve\"\n[sweep]\nsnr_db = [0]\n",
            "k.toml");
      },
      "only valid for kind = sumrate_sweep"));
  CHECK(error_mentions(
      [] {
        (void)parse_config_text(
            "[experiment]\nkind = \"sumrate_sweep\"\n[probe]\ntheta_steps = 10\n",
            "k.toml");
      },
      "only valid for kind = convexity_probe"));
}

TEST_CASE("semantic validation failures carry the config origin") {
  // more streams than transmit antennas cannot use a pseudo-inverse precoder
  CHECK(error_mentions(
      [] {
        (void)parse_config_text(
            "[experiment]\nkind = \"learning_curve\"\n[system]\nusers = [3, 2]\n",
            "dim.toml");
      },
      "dim.toml"));
  CHECK(error_mentions(
      [] {
        (void)parse_config_text(
            "[experiment]\nkind = \"learning_curve\"\n[system]\nusers = [3, 2]\n",
            "dim.toml");
      },
      "n_tx"));
}

TEST_CASE("enumerated names are validated") {
  CHECK(error_mentions(
      [] {
        (void)parse_config_text("[experiment]\nkind = \"banana\"\n", "e.toml");
      },
      "unknown kind"));
  CHECK(error_mentions(
      [] {
        (void)parse_config_text(
            "[experiment]\nkind = \"learning_curve\"\nprecoders = [\"dirty\"]\n",
            "e.toml");
      },
      "unknown precoder"));
  CHECK(error_mentions(
      [] {
        (void)parse_config_text(
            "[experiment]\nkind = \"sumrate_sweep\"\nallocators = [\"best\"]\n",
            "e.toml");
      },
      "unknown allocator"));
  CHECK(error_mentions(
      [] {
        (void)parse_config_text(
            "[experiment]\nkind = \"learning_curve\"\nformat = \"xml\"\n",
            "e.toml");
      },
      "unknown format"));
}

TEST_CASE("missing config files are reported as config errors") {
  CHECK(error_mentions([] { (void)parse_config("/nonexistent/nowhere.toml"); },
                       "cannot open"));
}

TEST_CASE("CSV emit/read round-trip preserves 9 significant digits") {
  const ExperimentResult r = tiny_result();
  const std::string path = "test_tmp_roundtrip.csv";
  emit_result(r, OutputFormat::CSV, path);
  const ReadBack rb = read_result(path, OutputFormat::CSV);
  REQUIRE(rb.column_names == r.column_names);
  REQUIRE(rb.columns.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    REQUIRE(rb.columns[c].size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      const double expect = r.columns[c][i];
      const double scale = std::max(std::abs(expect), 1e-300);
      CHECK(std::abs(rb.columns[c][i] - expect) / scale < 1e-8);
    }
  }
  CHECK(rb.metadata.at("alpha") == "1");
  CHECK(rb.metadata.at("note") == "two words");
  std::remove(path.c_str());
}

TEST_CASE("JSON emit/read round-trip is exact") {
  const ExperimentResult r = tiny_result();
  const std::string path = "test_tmp_roundtrip.json";
  emit_result(r, OutputFormat::JSON, path);
  const ReadBack rb = read_result(path, OutputFormat::JSON);
  REQUIRE(rb.columns.size() == 2);
  // JSON object order is lexicographic, not emission order: match by name
  for (std::size_t c = 0; c < rb.column_names.size(); ++c) {
    const auto it = std::find(r.column_names.begin(), r.column_names.end(),
                              rb.column_names[c]);
    REQUIRE(it != r.column_names.end());
    const std::size_t src = it - r.column_names.begin();
    REQUIRE(rb.columns[c].size() == r.columns[src].size());
    for (std::size_t i = 0; i < rb.columns[c].size(); ++i)
      CHECK(rb.columns[c][i] == r.columns[src][i]);
  }
  CHECK(rb.metadata.at("note") == "two words");
  std::remove(path.c_str());
}

TEST_CASE("the data section ignores metadata in both formats") {
  ExperimentResult a = tiny_result();
  ExperimentResult b = tiny_result();
  b.metadata.emplace_back("wall_time_ms", "9999");  // run-dependent noise
  for (OutputFormat fmt : {OutputFormat::CSV, OutputFormat::JSON}) {
    const std::string pa = "test_tmp_a." + to_string(fmt);
    const std::string pb = "test_tmp_b." + to_string(fmt);
    emit_result(a, fmt, pa);
    emit_result(b, fmt, pb);
    const std::string fa = slurp(pa);
    const std::string fb = slurp(pb);
    CHECK(fa != fb);  // metadata differs...
    CHECK(data_section(fa, fmt) == data_section(fb, fmt));  // ...data does not
    std::remove(pa.c_str());
    std::remove(pb.c_str());
  }
}

TEST_CASE("CSV layout: comment metadata, then header, then rows") {
  const ExperimentResult r = tiny_result();
  const std::string path = "test_tmp_layout.csv";
  emit_result(r, OutputFormat::CSV, path);
  const std::string text = slurp(path);
  CHECK(text.rfind("# alpha = 1\n", 0) == 0);
  CHECK(text.find("x,y\n") != std::string::npos);
  CHECK(text.find("1,0.123456789\n") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("emit rejects malformed results") {
  ExperimentResult empty;
  CHECK_THROWS_AS(emit_result(empty, OutputFormat::CSV, "test_tmp_x.csv"), IoError);
  ExperimentResult ragged = tiny_result();
  ragged.columns[1].pop_back();
  CHECK_THROWS_AS(emit_result(ragged, OutputFormat::CSV, "test_tmp_x.csv"), IoError);
}

}  // TEST_SUITE
