"""Tests for the Monte Carlo harness: reproducibility, bookkeeping, bound flags."""

import io

import numpy as np
import pytest

from spectralvol.errors import InvalidParameter
from spectralvol.estimators import EstimatorKind, noise_expectation_exact
from spectralvol.experiments import (
    CSV_COLUMNS,
    ExperimentConfig,
    run_consistency,
    run_experiment,
    run_initial_noise_contrast,
    run_noise_bounds,
    run_normality,
)
from spectralvol.market import ConstantVol, NoiseModel, OrnsteinUhlenbeckVol, ZeroDrift


def _config(**overrides):
    base = dict(
        kinds=(EstimatorKind.SIML,),
        n_schedule=(64, 128),
        vol=ConstantVol(1.0),
        drift=ZeroDrift(),
        noise=NoiseModel(0.0),
        replications=60,
        base_seed=123,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestConfigValidation:
    def test_unsorted_schedule_rejected(self):
        with pytest.raises(InvalidParameter):
            _config(n_schedule=(128, 64))

    def test_zero_replications_rejected(self):
        with pytest.raises(InvalidParameter):
            _config(replications=0)

    def test_fourier_kind_needs_odd_n(self):
        with pytest.raises(InvalidParameter):
            _config(kinds=(EstimatorKind.MM_FOURIER_REAL_ZERO,), n_schedule=(64,))

    def test_complex_kind_rejected(self):
        with pytest.raises(InvalidParameter):
            _config(kinds=(EstimatorKind.MM_FOURIER_COMPLEX,))

    def test_cutoff_rule(self):
        cfg = _config(m_exponent=0.4)
        assert cfg.cutoff(1024, 0.35) == 16
        assert _config().cutoff(1024, 0.35) == 11


class TestReproducibility:
    def test_identical_runs_identical_summaries(self):
        a = run_consistency(_config())
        b = run_consistency(_config())
        assert a == b

    def test_thread_count_does_not_change_results(self):
        serial = run_consistency(_config(threads=1))
        threaded = run_consistency(_config(threads=4))
        assert serial.rows == threaded.rows

    def test_different_seed_changes_results(self):
        a = run_consistency(_config(base_seed=1))
        b = run_consistency(_config(base_seed=2))
        assert a.rows != b.rows


class TestConsistencyRun:
    def test_rmse_bookkeeping_identity(self):
        """rmse^2 = bias^2 + population variance of the errors (se carries ddof=1)."""
        summary = run_consistency(_config(replications=200))
        for row in summary.rows:
            var0 = row.se_mean**2 * (row.replications - 1)
            assert row.rmse**2 == pytest.approx(row.bias**2 + var0, abs=1e-9)

    def test_rmse_decreases_with_n(self):
        summary = run_consistency(_config(n_schedule=(64, 256, 1024), replications=150))
        assert dict(summary.checks)["rmse_decreasing[siml]"]

    def test_noise_free_bias_small_and_flag_consistent(self):
        summary = run_consistency(_config(replications=300))
        for row in summary.rows:
            # true bias is zero here, so the sample bias is pure MC noise
            assert abs(row.bias) <= 4 * row.se_mean
            assert row.bound_satisfied == (abs(row.bias) <= 2 * row.se_mean)
            assert row.bound_value == pytest.approx(2 * row.se_mean)


class TestNormalityRun:
    def test_moment_fields_populated(self):
        summary = run_normality(
            _config(n_schedule=(256,), replications=400, m_exponent=0.35)
        )
        row = summary.rows[0]
        assert row.std_err_mean is not None
        assert row.std_err_var is not None
        assert row.std_err_skew is not None
        assert row.std_err_kurt is not None
        assert abs(row.std_err_mean) < 0.5
        assert 0.5 < row.std_err_var < 2.0

    def test_stochastic_vol_rejected(self):
        vol = OrnsteinUhlenbeckVol(1.0, 1.0, 0.5, 1.0)
        with pytest.raises(InvalidParameter):
            run_normality(_config(vol=vol))


class TestNoiseBoundsRun:
    def _cfg(self, **kw):
        base = dict(
            kinds=(EstimatorKind.SIML, EstimatorKind.MM_FOURIER_REAL_ZERO, EstimatorKind.INA_SINE),
            n_schedule=(255,),
            vol=ConstantVol(0.0),
            noise=NoiseModel(0.01, include_initial=True, include_terminal=True),
            replications=400,
            base_seed=5,
        )
        base.update(kw)
        return _config(**base)

    def test_bounds_hold(self):
        summary = run_noise_bounds(self._cfg())
        assert summary.all_ok
        by_kind = {row.kind: row for row in summary.rows}
        assert by_kind["siml"].bound_value == pytest.approx(0.005)
        assert by_kind["mm_fourier_real_zero"].bound_value == pytest.approx(0.02)
        assert by_kind["siml"].noise_exact >= 0.005
        assert by_kind["mm_fourier_real_zero"].noise_exact >= 0.02
        assert by_kind["ina_sine"].noise_exact <= by_kind["ina_sine"].bound_value

    def test_exact_column_matches_oracle(self):
        summary = run_noise_bounds(self._cfg(kinds=(EstimatorKind.INA_SINE,)))
        row = summary.rows[0]
        assert row.noise_exact == noise_expectation_exact(
            EstimatorKind.INA_SINE, row.n, row.m, 0.01
        )

    def test_requires_pure_noise_design(self):
        with pytest.raises(InvalidParameter):
            run_noise_bounds(self._cfg(vol=ConstantVol(1.0)))


class TestContrastRun:
    def test_cross_term_centered_and_flags_set(self):
        cfg = _config(
            kinds=(EstimatorKind.SIML, EstimatorKind.INA_SINE),
            n_schedule=(512, 1024),
            noise=NoiseModel(0.01, include_initial=True),
            replications=300,
            base_seed=77,
        )
        summary = run_initial_noise_contrast(cfg)
        assert len(summary.rows) == 4
        for row in summary.rows:
            assert row.cross_mean is not None
            assert abs(row.cross_mean) <= 3 * row.cross_se
        siml_rows = [r for r in summary.rows if r.kind == "siml"]
        assert all(r.bias >= 0.005 - 4 * r.se_mean for r in siml_rows)

    def test_requires_initial_noise(self):
        with pytest.raises(InvalidParameter):
            run_initial_noise_contrast(
                _config(noise=NoiseModel(0.01, include_initial=False))
            )

    def test_zero_noise_control_biases_agree(self):
        """With no noise at all, the two estimators' biases agree within 2 se."""
        cfg = _config(
            kinds=(EstimatorKind.SIML, EstimatorKind.INA_SINE),
            n_schedule=(1024,),
            noise=NoiseModel(0.0, include_initial=True),
            replications=300,
            base_seed=3,
        )
        rows = run_initial_noise_contrast(cfg).rows
        by_kind = {r.kind: r for r in rows}
        diff = by_kind["siml"].bias - by_kind["ina_sine"].bias
        se = np.hypot(by_kind["siml"].se_mean, by_kind["ina_sine"].se_mean)
        assert abs(diff) <= 2 * se


class TestCsvOutput:
    def test_header_and_shape(self):
        summary = run_consistency(_config(replications=20))
        buf = io.StringIO()
        summary.write_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + len(summary.rows)
        # floats are written with round-trip precision
        first = lines[1].split(",")
        assert float(first[CSV_COLUMNS.index("mean")]) == summary.rows[0].mean

    def test_dispatch_by_name(self):
        summary = run_experiment("consistency", _config(replications=10))
        assert summary.experiment == "consistency"
        with pytest.raises(InvalidParameter):
            run_experiment("nope", _config())
