import math

import jax
import jax.numpy as jnp
import numpy as np
import pytest

from hnse.errors import SymbolError
from hnse.frequency import (
    HorizontalField,
    dilate,
    inner_product,
    make_grid,
    random_horizontal_field,
    random_spectral_field,
    sobolev_norm_sq,
    unit_mode,
)
from hnse.operators import (
    LadderSpec,
    SymbolSpec,
    apply_ladder,
    apply_operator,
    apply_symbol,
    commutator,
    divergence_h,
    gradient_h,
    partial_s,
    right_gradient_h,
    sublaplacian,
)

jax.config.update("jax_enable_x64", True)

LADDERS = [LadderSpec("X"), LadderSpec("Xi"), LadderSpec("X_tilde"), LadderSpec("Xi_tilde")]


def relative(a, b):
    return math.sqrt(float(sobolev_norm_sq(a - b, "left_hom") / sobolev_norm_sq(b, "left_hom")))


class TestSymbols:
    grid = make_grid(1, 4, "uniform_periodic", n_s=6)

    def test_partial_s(self):
        f = unit_mode(self.grid, 1, 1, 5)
        # node 5 is lambda = 3
        assert jnp.isclose(partial_s(f).coeffs[1, 1, 5], 3j)

    def test_sublaplacian(self):
        f = unit_mode(self.grid, 0, 2, 1)
        # node 1 is lambda = -2, so the eigenvalue is 4 * 2 * 5
        assert jnp.isclose(sublaplacian(f).coeffs[0, 2, 1], -40.0)

    def test_powers(self):
        f = random_spectral_field(jax.random.PRNGKey(0), self.grid)
        half = apply_symbol(f, SymbolSpec("left_sublap_pow", ell=0.5))
        full = apply_symbol(half, SymbolSpec("left_sublap_pow", ell=0.5))
        assert relative(full, -sublaplacian(f)) < 1e-13
        g = apply_symbol(f, SymbolSpec("abs_ds_pow", ell=2.0))
        assert relative(g, -partial_s(partial_s(f))) < 1e-13
        inhom = apply_symbol(f, SymbolSpec("right_inhom_pow", ell=1.0))
        right = apply_symbol(f, SymbolSpec("right_sublap_pow", ell=1.0))
        assert relative(inhom, right + f) < 1e-13

    def test_band_indicator(self):
        f = random_spectral_field(jax.random.PRNGKey(1), self.grid, margin=0)
        low = apply_symbol(f, SymbolSpec("band_indicator", band=(0.0, 20.0)))
        high = apply_symbol(f, SymbolSpec("band_indicator", band=(20.0 + 1e-9, math.inf)))
        assert relative(low + high, f) < 1e-14
        assert float(jnp.max(jnp.where(self.grid.eigen_left > 20.0, jnp.abs(low.coeffs), 0.0))) == 0.0

    def test_exponential_overflow(self):
        f = random_spectral_field(jax.random.PRNGKey(2), self.grid)
        with pytest.raises(SymbolError):
            apply_symbol(f, SymbolSpec("exp_abs_ds", zeta=1000.0))
        restored = apply_symbol(
            apply_symbol(f, SymbolSpec("exp_abs_ds", zeta=0.7)), SymbolSpec("exp_abs_ds", zeta=-0.7)
        )
        assert relative(restored, f) < 1e-14

    def test_unknown_kind(self):
        f = random_spectral_field(jax.random.PRNGKey(3), self.grid)
        with pytest.raises(ValueError):
            apply_symbol(f, SymbolSpec("laplace"))


class TestLadders:
    grid = make_grid(1, 6, "uniform_periodic", n_s=8)

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            LadderSpec("Y")
        with pytest.raises(ValueError):
            LadderSpec("X", 0)
        f = random_spectral_field(jax.random.PRNGKey(0), self.grid)
        with pytest.raises(ValueError):
            apply_ladder(f, LadderSpec("X", 2))

    def test_left_ladders_act_on_m(self):
        f = unit_mode(self.grid, 2, 3, 5)
        # Check that X and Xi only move m, X~ and Xi~ only move n
        for spec in LADDERS[:2]:
            moved = np.nonzero(np.abs(np.asarray(apply_ladder(f, spec).coeffs)) > 0)
            assert set(moved[0]) == {2}
            assert set(moved[1]) == {2, 4}
        for spec in LADDERS[2:]:
            moved = np.nonzero(np.abs(np.asarray(apply_ladder(f, spec).coeffs)) > 0)
            assert set(moved[0]) == {1, 3}
            assert set(moved[1]) == {3}

    @pytest.mark.parametrize("spec", LADDERS)
    def test_skew_adjoint(self, spec):
        f = random_spectral_field(jax.random.PRNGKey(1), self.grid, margin=0, real=False)
        g = random_spectral_field(jax.random.PRNGKey(2), self.grid, margin=0, real=False)
        lhs = inner_product(apply_ladder(f, spec), g)
        rhs = -inner_product(f, apply_ladder(g, spec))
        assert jnp.isclose(lhs, rhs, rtol=1e-12)

    def test_commutators(self):
        f = random_spectral_field(jax.random.PRNGKey(3), self.grid, margin=2)
        ds = partial_s(f)
        X, Xi, X_tilde, Xi_tilde = LADDERS
        assert relative(commutator(f, X, Xi), ds * -4.0) < 1e-10
        assert relative(commutator(f, X_tilde, Xi_tilde), ds * 4.0) < 1e-10
        for left in (X, Xi):
            for right in (X_tilde, Xi_tilde):
                value = float(sobolev_norm_sq(commutator(f, left, right), "left_hom"))
                assert value / float(sobolev_norm_sq(ds, "left_hom")) < 1e-20

    def test_ladders_commute_with_ds(self):
        f = random_spectral_field(jax.random.PRNGKey(4), self.grid, margin=1)
        ds = SymbolSpec("ds")
        for spec in LADDERS:
            value = float(sobolev_norm_sq(commutator(f, spec, ds), "left_hom"))
            assert value < 1e-20 * float(sobolev_norm_sq(f, "left_hom"))

    @pytest.mark.parametrize("p", [-2, 1, 2])
    def test_dilation_homogeneity(self, p):
        # P (f o delta_mu) = mu (P f) o delta_mu for every ladder P
        grid = make_grid(1, 5, "geometric", lambda0=0.125, ratio=2.0, count=8)
        inner = np.zeros(grid.n_lambda)
        inner[2:6] = 1.0
        inner[10:14] = 1.0
        f = random_spectral_field(jax.random.PRNGKey(7), grid, margin=1)
        f = f.with_coeffs(f.coeffs * inner)
        mu = grid.ratio ** (p / 2)
        g = dilate(f, p)
        for spec in LADDERS:
            assert relative(apply_ladder(g, spec), dilate(apply_ladder(f, spec), p) * mu) < 1e-12

    def test_horizontal_field_componentwise(self):
        u = random_horizontal_field(jax.random.PRNGKey(5), self.grid)
        Xu = apply_ladder(u, LadderSpec("X"))
        for i, component in enumerate(u.components()):
            assert jnp.allclose(Xu.coeffs[i], apply_ladder(component, LadderSpec("X")).coeffs)

    def test_apply_operator(self):
        f = random_spectral_field(jax.random.PRNGKey(6), self.grid)
        assert jnp.allclose(apply_operator(f, SymbolSpec("ds")).coeffs, partial_s(f).coeffs)
        assert jnp.allclose(apply_operator(f, LADDERS[0]).coeffs, apply_ladder(f, LADDERS[0]).coeffs)
        assert jnp.allclose(apply_operator(f, sublaplacian).coeffs, sublaplacian(f).coeffs)


class TestGradient:
    grid = make_grid(1, 6, "uniform_periodic", n_s=8)

    def test_div_grad_is_sublaplacian(self):
        f = random_spectral_field(jax.random.PRNGKey(0), self.grid, margin=2)
        assert relative(divergence_h(gradient_h(f)), sublaplacian(f)) < 1e-12

    def test_gradient_norm(self):
        f = random_spectral_field(jax.random.PRNGKey(1), self.grid, margin=1)
        # ||grad_H f||^2 = ||f||^2_{H^1} and ||grad~_H f||^2 = ||f||^2_{H~^1}
        assert jnp.isclose(
            sobolev_norm_sq(gradient_h(f), "left_hom"), sobolev_norm_sq(f, "left_hom", 1.0), rtol=1e-12
        )
        assert jnp.isclose(
            sobolev_norm_sq(right_gradient_h(f), "left_hom"), sobolev_norm_sq(f, "right_hom", 1.0), rtol=1e-12
        )

    def test_divergence_is_minus_adjoint(self):
        f = random_spectral_field(jax.random.PRNGKey(2), self.grid, margin=0, real=False)
        u = random_horizontal_field(jax.random.PRNGKey(3), self.grid, margin=0, real=False)
        assert jnp.isclose(inner_product(gradient_h(f), u), -inner_product(f, divergence_h(u)), rtol=1e-12)

    def test_components(self):
        f = random_spectral_field(jax.random.PRNGKey(4), self.grid)
        grad = gradient_h(f)
        assert isinstance(grad, HorizontalField)
        assert jnp.allclose(grad.component(1).coeffs, apply_ladder(f, LadderSpec("Xi")).coeffs)
