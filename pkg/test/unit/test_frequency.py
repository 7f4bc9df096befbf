import jax
import jax.numpy as jnp
import numpy as np
import pytest

from hnse.errors import GridMismatchError, OutOfBandError
from hnse.frequency import (
    HorizontalField,
    SpectralField,
    band_margin,
    dilate,
    inner_product,
    make_grid,
    random_horizontal_field,
    random_spectral_field,
    sobolev_norm_sq,
    unit_mode,
)

jax.config.update("jax_enable_x64", True)


class TestFrequencyGrid:
    def test_uniform_periodic_nodes(self):
        grid = make_grid(1, 3, "uniform_periodic", s_period=2 * np.pi, n_s=8)
        nodes = np.asarray(grid.lambda_nodes)
        # Check that the nodes are symmetric, ascending and exclude 0
        assert np.allclose(nodes, -nodes[::-1])
        assert np.all(np.diff(nodes) > 0)
        assert not np.any(nodes == 0)
        assert np.allclose(nodes, [-4, -3, -2, -1, 1, 2, 3, 4])
        assert np.array_equal(grid.k_index, [-4, -3, -2, -1, 1, 2, 3, 4])
        # weights (2 pi / L) |lambda|^d
        assert np.allclose(np.asarray(grid.lambda_weights), np.abs(nodes))

    def test_geometric_nodes(self):
        grid = make_grid(2, 2, "geometric", lambda0=0.5, ratio=2.0, count=3)
        nodes = np.asarray(grid.lambda_nodes)
        assert np.allclose(nodes, [-2, -1, -0.5, 0.5, 1, 2])
        weights = np.asarray(grid.lambda_weights)
        assert np.all(weights > 0)
        assert np.allclose(weights, weights[::-1])
        assert np.allclose(weights, np.log(2.0) * np.abs(nodes) ** 3)

    def test_homogeneous_dimension(self):
        for d in (1, 2, 3):
            grid = make_grid(d, 1, "uniform_periodic", n_s=4)
            assert grid.Q == 2 * d + 2
            assert grid.field_shape == (2,) * (2 * d) + (4,)

    def test_eigenvalues(self):
        grid = make_grid(1, 3, "uniform_periodic", n_s=4)
        # mode n = 1, m = 2 at lambda = -2 (node 0)
        assert np.isclose(float(grid.eigen_left[1, 2, 0]), 4 * 2 * (2 * 2 + 1))
        assert np.isclose(float(grid.eigen_right[1, 2, 0]), 4 * 2 * (2 * 1 + 1))

    @pytest.mark.parametrize(
        "params",
        [
            {"mode": "geometric", "lambda0": 0.0},
            {"mode": "geometric", "lambda0": -1.0},
            {"mode": "geometric", "ratio": 1.0},
            {"mode": "uniform_periodic", "n_s": 5},
            {"mode": "uniform_periodic", "n_s": 2},
            {"mode": "uniform_periodic", "s_period": 0.0},
            {"mode": "spherical"},
        ],
    )
    def test_invalid_parameters(self, params):
        params = dict(params)
        mode = params.pop("mode")
        with pytest.raises(ValueError):
            make_grid(1, 2, mode, **params)

    def test_invalid_dimensions(self):
        with pytest.raises(ValueError):
            make_grid(0, 2, "uniform_periodic")
        with pytest.raises(ValueError):
            make_grid(1, -1, "uniform_periodic")

    def test_compatibility(self):
        grid = make_grid(1, 3, "uniform_periodic", n_s=4)
        assert grid.is_compatible(make_grid(1, 3, "uniform_periodic", n_s=4))
        assert not grid.is_compatible(make_grid(1, 4, "uniform_periodic", n_s=4))
        assert not grid.is_compatible(make_grid(1, 3, "uniform_periodic", n_s=6))


class TestFields:
    grid = make_grid(1, 4, "uniform_periodic", n_s=6)

    def test_arithmetic(self):
        f = random_spectral_field(jax.random.PRNGKey(0), self.grid)
        g = random_spectral_field(jax.random.PRNGKey(1), self.grid)
        assert jnp.allclose((f + g - g).coeffs, f.coeffs)
        assert jnp.allclose((f * 2.0).coeffs, 2.0 * f.coeffs)
        assert jnp.allclose((-f).coeffs, -f.coeffs)
        assert f.is_finite()
        assert not f.with_coeffs(f.coeffs.at[0, 0, 0].set(jnp.nan)).is_finite()

    def test_mismatched_grids(self):
        f = SpectralField.zeros(self.grid)
        g = SpectralField.zeros(make_grid(1, 4, "uniform_periodic", n_s=8))
        with pytest.raises(GridMismatchError):
            f + g
        with pytest.raises(GridMismatchError):
            inner_product(f, g)

    def test_horizontal_components(self):
        u = random_horizontal_field(jax.random.PRNGKey(2), self.grid)
        components = u.components()
        assert len(components) == 2
        rebuilt = HorizontalField.from_components(components)
        assert jnp.allclose(rebuilt.coeffs, u.coeffs)
        assert jnp.allclose(u.component(1).coeffs, u.coeffs[1])

    def test_random_field_is_real(self):
        f = random_spectral_field(jax.random.PRNGKey(3), self.grid)
        # F(n, m, -lambda) = conj F(n, m, lambda)
        assert jnp.allclose(f.coeffs[..., ::-1], jnp.conj(f.coeffs))

    def test_band_margin(self):
        f = random_spectral_field(jax.random.PRNGKey(4), self.grid, margin=2)
        assert band_margin(f) == 2
        assert band_margin(SpectralField.zeros(self.grid)) == self.grid.M + 1
        assert band_margin(unit_mode(self.grid, 4, 0, 0)) == 0


class TestNorms:
    grid = make_grid(1, 4, "uniform_periodic", n_s=6)

    def test_inner_product_hermitian(self):
        f = random_spectral_field(jax.random.PRNGKey(0), self.grid, real=False)
        g = random_spectral_field(jax.random.PRNGKey(1), self.grid, real=False)
        assert jnp.isclose(inner_product(f, g), jnp.conj(inner_product(g, f)))
        assert float(inner_product(f, f).real) > 0
        assert jnp.isclose(inner_product(f, f).imag, 0.0)

    def test_unit_mode_norm(self):
        f = unit_mode(self.grid, 1, 2, 4, value=3.0)
        # |lambda| = 2 at node 4, weight 2 and symbol 4 * 2 * (2 * 2 + 1)
        assert np.isclose(float(sobolev_norm_sq(f, "left_hom")), 9.0 * 2)
        assert np.isclose(float(sobolev_norm_sq(f, "left_hom", 1.0)), 9.0 * 2 * 40)
        assert np.isclose(float(sobolev_norm_sq(f, "right_hom", 1.0)), 9.0 * 2 * 24)
        assert np.isclose(float(sobolev_norm_sq(f, "mixed", 1.0, 1.0)), 9.0 * 2 * 41 * 24)
        assert np.isclose(float(sobolev_norm_sq(f, "mixed_hom", 1.0, 1.0)), 9.0 * 2 * 40 * 24)

    def test_inhomogeneous_norm_is_monotone(self):
        f = random_spectral_field(jax.random.PRNGKey(2), self.grid)
        values = [float(sobolev_norm_sq(f, "left_inhom", ell)) for ell in (-1.0, 0.0, 1.0, 2.0)]
        assert np.all(np.diff(values) > 0)

    def test_horizontal_norm_sums_components(self):
        u = random_horizontal_field(jax.random.PRNGKey(3), self.grid)
        total = sum(float(sobolev_norm_sq(c, "right_hom", 1.0)) for c in u.components())
        assert np.isclose(float(sobolev_norm_sq(u, "right_hom", 1.0)), total)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            sobolev_norm_sq(SpectralField.zeros(self.grid), "sideways")


class TestDilate:
    grid = make_grid(1, 3, "geometric", lambda0=0.25, ratio=2.0, count=6)

    def interior_field(self, key):
        f = random_spectral_field(key, self.grid)
        inner = np.zeros(self.grid.n_lambda)
        inner[2:4] = 1.0
        inner[8:10] = 1.0
        return f.with_coeffs(f.coeffs * inner)

    def test_identity(self):
        f = self.interior_field(jax.random.PRNGKey(0))
        assert jnp.allclose(dilate(f, 0).coeffs, f.coeffs)

    def test_inverse_pair(self):
        f = self.interior_field(jax.random.PRNGKey(1))
        for p in (1, 2):
            assert jnp.allclose(dilate(dilate(f, p), -p).coeffs, f.coeffs)

    def test_scaling(self):
        f = self.interior_field(jax.random.PRNGKey(2))
        g = dilate(f, 2)
        mu = 2.0
        for ell in (0.0, 1.0, 2.0):
            expected = mu ** (2 * ell - self.grid.Q) * sobolev_norm_sq(f, "left_hom", ell)
            assert jnp.isclose(sobolev_norm_sq(g, "left_hom", ell), expected, rtol=1e-12)

    def test_out_of_band(self):
        f = self.interior_field(jax.random.PRNGKey(3))
        with pytest.raises(OutOfBandError):
            dilate(f, 3)
        with pytest.raises(OutOfBandError):
            dilate(f, -3)
        with pytest.raises(OutOfBandError):
            dilate(f, 12)

    def test_zero_field_leaves_band(self):
        zero = SpectralField.zeros(self.grid)
        assert jnp.all(dilate(zero, 12).coeffs == 0)

    def test_requires_geometric_grid(self):
        with pytest.raises(ValueError):
            dilate(SpectralField.zeros(make_grid(1, 3, "uniform_periodic", n_s=4)), 1)
