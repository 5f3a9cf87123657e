# SPDX-License-Identifier: Apache-2.0
"""End-to-end smoke tests for the Python bindings.

Deep numerical verification lives in the C++ unit and acceptance suites;
these tests check that the bound surface works, stays deterministic, and
maps errors onto Python exceptions.
"""

import math

import numpy as np
import pytest

import mimopa as mp


def seeded_channel(seed, n_r=4, n_t=4):
    rng = mp.Rng.substream(seed, [1, 0])
    return mp.sample_rayleigh(n_r, n_t, rng, [1] * n_r)


def test_rng_determinism():
    a = mp.Rng(42)
    b = mp.Rng(42)
    assert [a.next_u64() for _ in range(100)] == [b.next_u64() for _ in range(100)]
    u = mp.Rng(7).uniform01()
    assert 0.0 < u <= 1.0
    g0, g1 = mp.Rng(7).gaussian_pair()
    assert math.isfinite(g0) and math.isfinite(g1)


def test_substream_paths_distinct():
    base = mp.Rng.substream(1, [1, 0])
    other = mp.Rng.substream(1, [1, 1])
    again = mp.Rng.substream(1, [1, 0])
    first = base.next_u64()
    assert first == again.next_u64()
    assert first != other.next_u64()


def test_channel_split_reconstructs():
    h = seeded_channel(11)
    rng = mp.Rng.substream(11, [2, 0])
    cs = mp.split_csit(h, 0.1, rng)
    assert np.allclose(cs.h_est.m + cs.h_err.m, cs.h_true.m, rtol=0, atol=1e-14)
    assert cs.sigma_e2 == 0.1


def test_precoder_columns_unit_norm():
    h = seeded_channel(23)
    for kind in (mp.PrecoderKind.MF, mp.PrecoderKind.ZF, mp.PrecoderKind.MMSE):
        p = mp.make_precoder(kind, h, 1.0, 10.0)
        assert p.kind == kind
        norms = np.linalg.norm(p.matrix, axis=0)
        assert np.allclose(norms, 1.0, atol=1e-12)
        assert p.built_from == mp.channel_fingerprint(h)


def test_mapa_lands_on_unit_sphere():
    h = seeded_channel(31)
    p = mp.zf_precoder(h)
    trace = mp.mapa(h, p, 0.01, 200)
    a = trace.iterates[-1]
    assert abs(np.dot(a, a) - 1.0) < 1e-10
    assert trace.objective_values[0] >= trace.objective_values[-1]


def test_rmapa_zero_error_matches_mapa():
    h = seeded_channel(47)
    p = mp.mmse_precoder(h, 1.0, 10.0)
    plain = mp.mapa(h, p, 0.01, 50)
    robust = mp.rmapa(h, p, 0.0, 0.01, 50)
    for x, y in zip(plain.iterates, robust.iterates):
        assert np.array_equal(np.asarray(x), np.asarray(y))
    assert plain.objective_values == robust.objective_values


def test_gradient_matches_finite_difference():
    h = seeded_channel(53, 2, 4)
    p = mp.mf_precoder(h)
    a = np.array([0.3, -0.7])
    g = np.asarray(mp.mse_gradient(h, p, a))
    eps = 1e-6
    for m in range(2):
        e = np.zeros(2)
        e[m] = eps
        fd = (
            mp.mse_objective(h, p, a + e, 0.0) - mp.mse_objective(h, p, a - e, 0.0)
        ) / (2 * eps)
        assert abs(g[m] - fd) < 1e-5 * max(1.0, abs(fd))


def test_exhaustive_search_beats_descent_start():
    h = seeded_channel(61, 2, 4)
    p = mp.zf_precoder(h)
    best = mp.exhaustive_search(h, p, 0.01, mp.SearchObjective.MSE, 0.0)
    converged = mp.mapa(h, p, 0.01, 2000).iterates[-1]
    f_grid = mp.mse_objective(h, p, best, 0.0)
    f_descent = mp.mse_objective(h, p, converged, 0.0)
    assert f_descent <= f_grid + 1e-9
    assert f_grid - f_descent < 1e-3


def test_sum_rate_scalar_awgn_closed_form():
    h = mp.ChannelMatrix(np.array([[1.0 + 0.0j]]), [1])
    p = mp.Precoder(np.array([[1.0 + 0.0j]]), mp.PrecoderKind.MF)
    point = mp.sum_rate(h, p, np.array([1.0]), 1.0, 10.0, [1])
    assert point.sum_rate == pytest.approx(math.log2(11.0), abs=1e-12)
    assert point.per_user_rates == pytest.approx([math.log2(11.0)])


def test_allocation_baselines():
    a = mp.upa(4)
    assert np.allclose(np.asarray(a), 0.5)
    r = mp.random_allocation(5, mp.Rng.substream(3, [3, 0]))
    assert abs(np.dot(r, r) - 1.0) < 1e-12
    assert np.all(np.asarray(r) >= 0.0)


def test_config_parse_run_deterministic(tmp_path):
    text = """
schema_version = 1
[experiment]
kind = "convexity_probe"
seed = 99
precoders = ["zf"]
[system]
users = [1, 1]
[probe]
theta_steps = 50
"""
    spec = mp.parse_config_text(text, "inline.toml")
    assert spec.kind == mp.ExperimentKind.CONVEXITY_PROBE
    assert spec.theta_steps == 50
    r1 = mp.run_experiment(spec)
    r2 = mp.run_experiment(spec)
    assert r1.column_names == r2.column_names
    assert r1.columns == r2.columns
    assert r1.spec_fingerprint == r2.spec_fingerprint

    out = tmp_path / "probe.json"
    mp.emit_result(r1, mp.OutputFormat.JSON, str(out))
    back = mp.read_result(str(out), mp.OutputFormat.JSON)
    assert set(back.column_names) == set(r1.column_names)
    for name, col in zip(r1.column_names, r1.columns):
        got = back.columns[back.column_names.index(name)]
        assert got == pytest.approx(col, rel=0, abs=0)
    assert "spec_fingerprint" in back.metadata


def test_csv_round_trip(tmp_path):
    spec = mp.parse_config_text(
        '[experiment]\nkind = "learning_curve"\ntrials = 2\nprecoders = ["mf"]\n'
        "[algorithm]\niterations = 10\nes_grid_step = 0.05\n",
        "inline.toml",
    )
    result = mp.run_experiment(spec)
    out = tmp_path / "curve.csv"
    mp.emit_result(result, mp.OutputFormat.CSV, str(out))
    back = mp.read_result(str(out), mp.OutputFormat.CSV)
    assert back.column_names == result.column_names
    for col, ref in zip(back.columns, result.columns):
        assert col == pytest.approx(ref, rel=1e-8, abs=1e-300)


def test_errors_map_to_python_exceptions():
    with pytest.raises(mp.DomainError):
        mp.NoiseModel(-1.0)
    with pytest.raises(mp.DimensionError):
        mp.zf_precoder(seeded_channel(5, 4, 2))
    with pytest.raises(mp.ConfigError):
        mp.parse_config_text("[experiment]\nkind = \"nope\"\n", "bad.toml")
    with pytest.raises(mp.DivergenceError):
        h = seeded_channel(71)
        mp.mapa(h, mp.mf_precoder(h), 1e6, 50)
    with pytest.raises(mp.SearchBudgetError):
        h = seeded_channel(73, 6, 6)
        mp.exhaustive_search(h, mp.mf_precoder(h), 1e-4, mp.SearchObjective.MSE, 0.0)
    assert issubclass(mp.DomainError, mp.Error)


def test_oracle_suite_passes():
    spec = mp.ExperimentSpec()
    report, text = mp.run_oracle_suite(spec)
    assert report.all_passed()
    assert report.gradient_checks > 0 and report.search_checks > 0
    assert "oracle suite" in text
