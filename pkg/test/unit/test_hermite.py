import jax
import jax.numpy as jnp
import numpy as np
import pytest

from hnse.errors import HermiteAccuracyError
from hnse.hermite import (
    build_table,
    hermite_functions,
    hermite_samples,
    rescaled_hermite_functions,
    w_kernel,
    w_matrix,
)

jax.config.update("jax_enable_x64", True)


class TestHermiteFunctions:
    def test_unit_norm(self):
        table = build_table(1.0, 6)
        norm_sq = jnp.sum(table.values[0] ** 2 * table.x_weights)
        assert jnp.isclose(norm_sq, 1.0, atol=1e-13)
        assert table.orthonormality_residual() < 1e-12

    def test_rescaling(self):
        x = jnp.linspace(-3.0, 3.0, 41)
        h04 = rescaled_hermite_functions(0, x, 4.0)[0]
        h01 = hermite_functions(0, 2 * x)[0]
        assert jnp.allclose(h04, jnp.sqrt(2.0) * h01, atol=1e-14)

    def test_ground_state(self):
        x = jnp.linspace(-4.0, 4.0, 33)
        assert jnp.allclose(hermite_functions(0, x)[0], jnp.pi**-0.25 * jnp.exp(-(x**2) / 2))

    def test_multiplication_recurrence(self):
        n_max = 6
        x = build_table(1.0, n_max).x_nodes
        h = hermite_functions(n_max + 1, x)
        for n in range(1, n_max + 1):
            expected = jnp.sqrt(n / 2) * h[n - 1] + jnp.sqrt((n + 1) / 2) * h[n + 1]
            assert jnp.allclose(x * h[n], expected, atol=1e-12)

    def test_derivative_recurrence(self):
        n_max = 6
        x = jnp.linspace(-3.0, 3.0, 25)
        h = hermite_functions(n_max + 1, x)
        derivative = jax.vmap(jax.jacfwd(lambda t: hermite_functions(n_max + 1, t[None])[:, 0]))(x).T
        for n in range(1, n_max + 1):
            expected = jnp.sqrt(n / 2) * h[n - 1] - jnp.sqrt((n + 1) / 2) * h[n + 1]
            assert jnp.allclose(derivative[n], expected, atol=1e-12)

    def test_samples_reject_zero_lambda(self):
        with pytest.raises(ValueError):
            hermite_samples(0.0, 3, jnp.zeros(3))


class TestHermiteTable:
    def test_too_few_nodes(self):
        with pytest.raises(HermiteAccuracyError):
            build_table(1.0, 10, n_nodes=6)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            build_table(0.0, 3)
        with pytest.raises(ValueError):
            build_table(1.0, -1)

    def test_window(self):
        table = build_table(4.0, 3)
        assert np.isclose(table.window, (np.sqrt(6) + 6.5) / 2)


class TestKernel:
    M = 4

    def test_origin_is_identity(self):
        table = build_table(1.5, self.M)
        Y = jnp.zeros((1, 2))
        for n in range(self.M + 1):
            for m in range(self.M + 1):
                value = w_kernel(table, (n,), (m,), Y)[0]
                assert jnp.isclose(value, float(n == m), atol=1e-12)

    def test_gaussian_closed_form(self):
        table = build_table(1.0, self.M)
        Y = jax.random.normal(jax.random.PRNGKey(0), (20, 2))
        value = w_kernel(table, (0,), (0,), Y)
        assert jnp.allclose(value, jnp.exp(-jnp.sum(Y**2, axis=-1)), atol=1e-12)
        assert jnp.all(jnp.abs(value) <= 1.0 + 1e-12)

    def test_gaussian_closed_form_scaled(self):
        table = build_table(-2.5, self.M)
        Y = jax.random.normal(jax.random.PRNGKey(1), (20, 2))
        value = w_kernel(table, (0,), (0,), Y)
        assert jnp.allclose(value, jnp.exp(-2.5 * jnp.sum(Y**2, axis=-1)), atol=1e-12)

    def test_negative_lambda_is_conjugate(self):
        positive = build_table(1.3, self.M)
        negative = build_table(-1.3, self.M)
        Y = jax.random.normal(jax.random.PRNGKey(2), (10, 2))
        for n, m in [(0, 1), (2, 1), (3, 3), (1, 4)]:
            assert jnp.allclose(
                w_kernel(negative, (n,), (m,), Y),
                jnp.conj(w_kernel(positive, (n,), (m,), Y)),
                atol=1e-12,
            )

    def test_operator_norm(self):
        table = build_table(0.8, self.M)
        Y = jnp.array([[0.7, -0.4]])
        matrix = jnp.array(
            [[w_kernel(table, (n,), (m,), Y)[0] for m in range(self.M + 1)] for n in range(self.M + 1)]
        )
        assert float(jnp.linalg.norm(matrix, ord=2)) <= 1 + 1e-6

    def test_tensor_product(self):
        table = build_table(1.0, 2, d=2)
        Y = jnp.array([[0.3, -0.2, 0.5, 0.1]])
        one_d = build_table(1.0, 2)
        first = w_kernel(one_d, (1,), (0,), Y[:, [0, 2]])
        second = w_kernel(one_d, (2,), (1,), Y[:, [1, 3]])
        assert jnp.allclose(w_kernel(table, (1, 2), (0, 1), Y), first * second, atol=1e-13)

    def test_outside_window(self):
        table = build_table(1.0, self.M)
        with pytest.raises(HermiteAccuracyError):
            w_kernel(table, (0,), (0,), jnp.array([[20.0, 0.0]]))

    def test_index_checks(self):
        table = build_table(1.0, self.M)
        with pytest.raises(ValueError):
            w_kernel(table, (self.M + 1,), (0,), jnp.zeros((1, 2)))
        with pytest.raises(ValueError):
            w_kernel(table, (0, 0), (0, 0), jnp.zeros((1, 2)))

    def test_matrix_matches_kernel(self):
        lam = 1.7
        y_nodes = jnp.linspace(-2.0, 2.0, 7)
        block = w_matrix(lam, self.M, y_nodes)
        table = build_table(lam, self.M)
        Y = jnp.array([[y_nodes[2], y_nodes[5]]])
        for n, m in [(0, 0), (1, 3), (4, 2)]:
            assert jnp.isclose(block[n, m, 2, 5], w_kernel(table, (n,), (m,), Y)[0], atol=1e-12)
