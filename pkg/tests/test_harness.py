"""Experiment configuration, run driver, power-law fits, and the suite."""

import dataclasses
import json

import numpy as np
import pytest

from kpwave.errors import ConfigError, InvalidInputError
from kpwave.evolution import SolverConfig, evolve
from kpwave.grids import Grid2D
from kpwave.harness import (
    DecayFit,
    DiagnosticSpec,
    ExperimentConfig,
    InitialSpec,
    Pulse,
    bracketed_times,
    build_initial_data,
    fit_decay,
    log_times,
    run_experiment,
    run_theorem_suite,
    sup_norm_series,
    theorem_suite_configs,
)

# the norm diagnostics apply coordinate weights to noisy box-filling fields
pytestmark = pytest.mark.filterwarnings(
    "ignore::kpwave.vfields.UntrustedFieldWarning")


def small_config(**overrides):
    cfg = ExperimentConfig(
        grid=Grid2D(64, 32, 40.0, 20.0, 0.0, 0.0),
        initial=InitialSpec("modulated_gaussian",
                            (Pulse(0.05, (1.0, 0.0), (4.0, 3.0)),),
                            noise_amplitude=0.01),
        solver=SolverConfig(dt=0.1, t0=0.0, t_end=1.0),
        diagnostics=(DiagnosticSpec("norms"), DiagnosticSpec("sup")),
        snapshot_times=(0.0, 0.5, 1.0),
        seed=7,
        save_trajectory=False)
    return dataclasses.replace(cfg, **overrides)


class TestFitDecay:
    def test_exact_power_law(self):
        series = [(t, 7.0 / t) for t in np.geomspace(1.0, 100.0, 20)]
        fit = fit_decay(series, (1.0, 100.0))
        assert fit.exponent == pytest.approx(-1.0, abs=1e-12)
        assert fit.prefactor == pytest.approx(7.0, rel=1e-12)
        assert fit.residual_rms < 1e-12

    def test_constant_series(self):
        series = [(t, 3.0) for t in np.geomspace(1.0, 100.0, 20)]
        fit = fit_decay(series, (1.0, 100.0))
        assert fit.exponent == pytest.approx(0.0, abs=1e-12)

    def test_log_periodic_wobble(self):
        series = [(t, (1 + 0.05 * np.sin(np.log(t))) / t)
                  for t in np.geomspace(1.0, 100.0, 20)]
        fit = fit_decay(series, (1.0, 100.0))
        assert fit.exponent == pytest.approx(-1.0, abs=0.05)

    def test_too_few_points(self):
        series = [(t, 1.0 / t) for t in (1.0, 2.0, 4.0, 8.0, 16.0)]
        with pytest.raises(InvalidInputError):
            fit_decay(series, (1.0, 8.0))

    def test_positive_values_required(self):
        series = [(t, 1.0 / t - 0.1) for t in np.geomspace(1.0, 100.0, 20)]
        with pytest.raises(InvalidInputError):
            fit_decay(series, (1.0, 100.0))

    def test_window_must_be_nonempty(self):
        with pytest.raises(InvalidInputError):
            DecayFit(exponent=-1.0, prefactor=1.0, residual_rms=0.0,
                     window=(2.0, 2.0))


class TestConfig:
    def test_json_round_trip(self):
        cfg = small_config()
        assert ExperimentConfig.from_json(cfg.to_json()) == cfg

    def test_unknown_family(self):
        with pytest.raises(ConfigError):
            InitialSpec("solitary", (Pulse(0.1, (1.0, 0.0), (1.0, 1.0)),))

    def test_pulse_count(self):
        p = Pulse(0.1, (1.0, 0.0), (1.0, 1.0))
        with pytest.raises(ConfigError):
            InitialSpec("two_packet", (p,))

    def test_pulse_validation(self):
        with pytest.raises(ConfigError):
            Pulse(-0.1, (1.0, 0.0), (1.0, 1.0))
        with pytest.raises(ConfigError):
            Pulse(0.1, (1.0, 0.0), (0.0, 1.0))

    def test_unknown_diagnostic(self):
        with pytest.raises(ConfigError):
            DiagnosticSpec("spectrogram")

    def test_inadmissible_gamma_ray(self):
        with pytest.raises(ConfigError):
            DiagnosticSpec("gamma", {"rays": [(3.0, 0.0)]})

    def test_malformed_json(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_json("{not json")
        with pytest.raises(ConfigError):
            ExperimentConfig.from_json("{}")


class TestInitialData:
    def test_zero_x_mean(self):
        u0 = build_initial_data(small_config())
        assert np.abs(u0.samples.mean(axis=0)).max() < 1e-14

    def test_amplitude_scaling(self):
        cfg = small_config(initial=InitialSpec(
            "modulated_gaussian", (Pulse(0.05, (1.0, 0.0), (4.0, 3.0)),)))
        cfg2 = small_config(initial=InitialSpec(
            "modulated_gaussian", (Pulse(0.10, (1.0, 0.0), (4.0, 3.0)),)))
        a, b = build_initial_data(cfg), build_initial_data(cfg2)
        assert np.abs(b.samples - 2 * a.samples).max() < 1e-14

    def test_noise_is_seeded(self):
        a = build_initial_data(small_config())
        b = build_initial_data(small_config())
        c = build_initial_data(small_config(seed=8))
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)


class TestRunExperiment:
    def test_deterministic_outputs(self, tmp_path):
        cfg = small_config()
        a = run_experiment(cfg, tmp_path / "a")
        b = run_experiment(cfg, tmp_path / "b")
        for name in ("norms.csv", "sup.csv", "config.json", "manifest.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_seed_changes_outputs(self, tmp_path):
        a = run_experiment(small_config(), tmp_path / "a")
        c = run_experiment(small_config(seed=8), tmp_path / "c")
        assert (a / "norms.csv").read_bytes() != (c / "norms.csv").read_bytes()

    def test_zero_amplitude_runs_linear(self, tmp_path):
        cfg = small_config(initial=InitialSpec(
            "modulated_gaussian", (Pulse(0.0, (1.0, 0.0), (4.0, 3.0)),),
            noise_amplitude=0.01))
        out = run_experiment(cfg, tmp_path / "z")
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["linear"] is True


class TestSeriesHelpers:
    def test_sup_norm_series(self):
        cfg = small_config()
        traj = evolve(build_initial_data(cfg), cfg.solver,
                      snapshot_times=cfg.snapshot_times)
        series = sup_norm_series(traj, "u")
        assert [t for t, _ in series] == [0.0, 0.5, 1.0]
        assert all(v > 0 for _, v in series)
        with pytest.raises(InvalidInputError):
            sup_norm_series(traj, "u_yy")

    def test_log_times(self):
        ts = log_times(2.0, 8.0, per_octave=4)
        assert ts[0] == 2.0 and ts[-1] == 8.0
        assert all(b > a for a, b in zip(ts, ts[1:]))

    def test_bracketed_times(self):
        assert bracketed_times([4.0], 0.05) == (3.95, 4.0, 4.05)


class TestTheoremSuite:
    def test_config_catalog(self):
        cfgs = theorem_suite_configs()
        assert set(cfgs) == {"linear_decay", "conservation", "energy",
                             "profile", "packet", "scatter"}
        assert all(isinstance(c, ExperimentConfig) for c in cfgs.values())

    def test_scale_validation(self):
        with pytest.raises(ConfigError):
            theorem_suite_configs(scale=0.0)
        with pytest.raises(ConfigError):
            theorem_suite_configs(scale=2.0)

    def test_smoke_run(self, tmp_path):
        results = run_theorem_suite(tmp_path, scale=0.05, only=["conservation"])
        assert set(results) == {"conservation", "resonances"}
        out = results["conservation"]
        for name in ("config.json", "manifest.json", "norms.csv"):
            assert (out / name).exists()
        rows = (tmp_path / "resonances.csv").read_text().splitlines()[1:]
        assert len(rows) == 8
        assert max(abs(float(r.split(",")[-1])) for r in rows) < 1e-12
