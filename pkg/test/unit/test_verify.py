import jax
import pytest

from hnse.verify import (
    SuiteResult,
    algebra_suite,
    analytic_suite,
    commutators_suite,
    heat_suite,
    key_identity_suite,
    nsh_suite,
    run_suites,
    scaling_suite,
    spectral_gap_suite,
    stability_suite,
    stokes_suite,
    suite_presets,
    transform_suite,
)

jax.config.update("jax_enable_x64", True)


class TestSuites:
    def test_commutators(self):
        result = commutators_suite(n_fields=3)
        assert result.passed, result.residuals

    def test_algebra(self):
        result = algebra_suite(n_fields=5)
        assert result.passed, result.residuals
        # Check that the Leray projection does not commute with every J_k
        assert result.residuals["leray_friedrichs_witness"] > 1e-3

    def test_key_identity(self):
        result = key_identity_suite(n_fields=5)
        assert result.passed, result.residuals

    def test_spectral_gap(self):
        result = spectral_gap_suite(n_fields=5)
        assert result.passed, result.residuals

    def test_scaling(self):
        result = scaling_suite(n_fields=3)
        assert result.passed, result.residuals

    def test_heat(self):
        result = heat_suite()
        assert result.passed, result.residuals
        assert result.residuals["vertical_smoothing"] <= 0.0

    def test_transform(self):
        result = transform_suite(n_pairs=2)
        assert result.passed, result.residuals
        assert result.residuals["vertical_lift"] < 1e-10

    def test_stokes(self):
        result = stokes_suite(M=4, n_s=8, T=0.2)
        assert result.passed, result.residuals
        assert 3.5 <= result.residuals["convergence_ratio"] <= 4.5

    def test_nsh(self):
        result = nsh_suite(dt=1e-3, T=0.02)
        assert result.passed, result.residuals
        assert result.residuals["orthogonality"] < 1e-8
        assert result.residuals["analytic_ratio"] <= 1 + 1e-4

    def test_analytic(self):
        result = analytic_suite(dt=1e-3, T=0.02)
        assert result.passed, result.residuals

    def test_stability(self):
        result = stability_suite(dt=1e-3, T=0.02)
        assert result.passed, result.residuals
        assert result.residuals["c_fit"] <= result.residuals["c_hat"]


class TestRunner:
    def test_presets(self):
        assert set(suite_presets) >= {"algebra", "transform", "stokes", "nsh", "stability", "determinism"}

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            run_suites(["nonexistent"])

    def test_result_dict(self, capsys):
        (result,) = run_suites(["spectral_gap"])
        assert isinstance(result, SuiteResult)
        assert result.as_dict()["passed"] is True
        assert "Running suite spectral_gap." in capsys.readouterr().out
