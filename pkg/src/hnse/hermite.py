import math

import equinox as eqx
import jax.numpy as jnp
import numpy as np
from beartype import beartype as typechecker
from jaxtyping import Array, Complex, Float, jaxtyped

from hnse.constants import MAX_GAUSS_HERMITE_NODES, ORTHONORMALITY_TOL, kernel_window
from hnse.errors import HermiteAccuracyError


def gauss_hermite(n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for the weight exp(-t^2)."""
    if n_nodes > MAX_GAUSS_HERMITE_NODES:
        raise HermiteAccuracyError(
            f"{n_nodes} Gauss-Hermite nodes requested, at most {MAX_GAUSS_HERMITE_NODES} supported."
        )
    return np.polynomial.hermite.hermgauss(n_nodes)


def default_node_count(M: int) -> int:
    """
    Quadrature size for a level-M table: enough nodes to resolve the phase
    e^{-2i eta t} across the whole kernel window, plus the degree of p_m p_n.
    """
    return math.ceil(2 * kernel_window(M) ** 2) + 2 * (M + 2)


def hermite_polynomials(n_max: int, x: Array) -> Array:
    """
    Polynomial part p_k of the unit-norm Hermite functions, h_k = p_k exp(-x^2/2).

    Args:
        n_max: Highest degree.
        x: Points, any shape.

    Returns:
        Array of shape (n_max + 1,) + x.shape.
    """
    x = jnp.asarray(x, dtype=jnp.float64)
    values = [jnp.full_like(x, jnp.pi**-0.25)]
    if n_max >= 1:
        values.append(jnp.sqrt(2.0) * x * values[0])
    for k in range(1, n_max):
        values.append(
            jnp.sqrt(2.0 / (k + 1)) * x * values[k]
            - jnp.sqrt(k / (k + 1)) * values[k - 1]
        )
    return jnp.stack(values)


@jaxtyped(typechecker=typechecker)
def hermite_functions(n_max: int, x: Float[Array, " n"]) -> Float[Array, " n_max_1 n"]:
    """Unit-norm Hermite functions h_0..h_{n_max} at x."""
    return hermite_polynomials(n_max, x) * jnp.exp(-(x**2) / 2)


def rescaled_hermite_functions(n_max: int, x: Array, lam: float) -> Array:
    """One-dimensional factors |lambda|^{1/4} h_n(|lambda|^{1/2} x)."""
    scale = abs(lam)
    u = math.sqrt(scale) * jnp.asarray(x, dtype=jnp.float64)
    return scale**0.25 * hermite_polynomials(n_max, u) * jnp.exp(-(u**2) / 2)


def hermite_samples(lam: float, n_max: int, x: Array) -> Array:
    if lam == 0:
        raise ValueError("lambda must be nonzero.")
    return rescaled_hermite_functions(n_max, x, lam)


class HermiteTable(eqx.Module):
    """
    Rescaled Hermite functions h_{n, lambda}, n <= M + 2, tabulated at
    Gauss-Hermite nodes matched to the scale |lambda|.

    values has shape (M + 3, n_nodes) and holds the one-dimensional factors;
    d-dimensional functions are tensor products of them.
    """

    x_nodes: Float[Array, " n_nodes"]
    x_weights: Float[Array, " n_nodes"]
    values: Float[Array, " n_index n_nodes"]
    t_nodes: Float[Array, " n_nodes"]
    t_weights: Float[Array, " n_nodes"]
    lam: float = eqx.field(static=True)
    M: int = eqx.field(static=True)
    d: int = eqx.field(static=True)

    @property
    def window(self) -> float:
        """Largest |Y| (unscaled) at which W can be evaluated."""
        return kernel_window(self.M) / math.sqrt(abs(self.lam))

    def orthonormality_residual(self) -> float:
        gram = (self.values * self.x_weights) @ self.values.T
        return float(jnp.max(jnp.abs(gram - jnp.eye(self.values.shape[0]))))


def build_table(lam: float, M: int, n_nodes: int | None = None, d: int = 1) -> HermiteTable:
    if lam == 0:
        raise ValueError("lambda must be nonzero.")
    if M < 0:
        raise ValueError("M must be nonnegative.")
    n_nodes = default_node_count(M) if n_nodes is None else n_nodes
    t, w = gauss_hermite(n_nodes)
    scale = math.sqrt(abs(lam))
    t_nodes = jnp.asarray(t)
    x_nodes = t_nodes / scale
    x_weights = jnp.asarray(w * np.exp(t**2)) / scale
    values = rescaled_hermite_functions(M + 2, x_nodes, lam)
    table = HermiteTable(
        x_nodes, x_weights, values, t_nodes, jnp.asarray(w), lam=float(lam), M=M, d=d
    )
    residual = table.orthonormality_residual()
    if residual > ORTHONORMALITY_TOL:
        raise HermiteAccuracyError(
            f"Hermite table at lambda={lam} with {n_nodes} nodes misses orthonormality "
            f"by {residual:.3e}."
        )
    return table


def _kernel_1d(
    n_max: int,
    sign: float,
    y: Array,
    eta: Array,
    t_nodes: Array,
    t_weights: Array,
) -> Array:
    """
    W at |lambda| = 1 for one coordinate pair:
    K(n, m, y, eta) = e^{-y^2} sum_t w_t e^{-2i sign eta t} p_m(t - y) p_n(t + y).

    y and eta share a shape; the result has shape (n_max+1, n_max+1) + y.shape.
    """
    shifted_down = hermite_polynomials(n_max, t_nodes - y[..., None])
    shifted_up = hermite_polynomials(n_max, t_nodes + y[..., None])
    phase = jnp.exp(-2j * sign * eta[..., None] * t_nodes) * t_weights
    kernel = jnp.einsum("n...t,m...t,...t->nm...", shifted_up, shifted_down, phase)
    return kernel * jnp.exp(-(y**2))


@jaxtyped(typechecker=typechecker)
def w_kernel(table: HermiteTable, n: tuple[int, ...], m: tuple[int, ...], Y: Float[Array, "... two_d"]) -> Complex[Array, "..."]:
    """
    Matrix coefficient W(n, m, lambda, Y) of the Schrodinger representation,
    W = int e^{-2i lambda <eta, x - y>} h_{m,lambda}(x - 2y) h_{n,lambda}(x) dx,
    evaluated by Gauss-Hermite quadrature at the table's lambda.
    """
    d = table.d
    if Y.shape[-1] != 2 * d or len(n) != d or len(m) != d:
        raise ValueError("Index and point dimensions must match the table.")
    if max(n + m) > table.M:
        raise ValueError("Indices must not exceed the table cutoff.")
    radius = jnp.sqrt(jnp.sum(Y**2, axis=-1))
    if float(jnp.max(radius)) > table.window:
        raise HermiteAccuracyError(
            f"|Y| beyond the kernel window {table.window:.3f} at lambda={table.lam}."
        )
    scale = math.sqrt(abs(table.lam))
    sign = math.copysign(1.0, table.lam)
    value = jnp.ones(Y.shape[:-1], dtype=jnp.complex128)
    for j in range(d):
        kernel = _kernel_1d(
            table.M,
            sign,
            scale * Y[..., j],
            scale * Y[..., d + j],
            table.t_nodes,
            table.t_weights,
        )
        value = value * kernel[n[j], m[j]]
    return value


def w_matrix(
    lam: float,
    M: int,
    y_nodes: Array,
    n_nodes: int | None = None,
) -> Array:
    """
    One-coordinate kernel block K(n, m, y_i, eta_j) on the tensor grid
    y_nodes x y_nodes, shape (M+1, M+1, n_y, n_y). Entries whose scaled
    radius exceeds the kernel window are set to zero.
    """
    t, w = gauss_hermite(default_node_count(M) if n_nodes is None else n_nodes)
    scale = math.sqrt(abs(lam))
    sign = math.copysign(1.0, lam)
    y_scaled = scale * jnp.asarray(y_nodes)
    y_grid, eta_grid = jnp.meshgrid(y_scaled, y_scaled, indexing="ij")
    t_nodes = jnp.asarray(t)
    shifted_down = hermite_polynomials(M, t_nodes - y_scaled[:, None])
    shifted_up = hermite_polynomials(M, t_nodes + y_scaled[:, None])
    weighted = jnp.einsum("nyt,myt,t->nmyt", shifted_up, shifted_down, jnp.asarray(w))
    phase = jnp.exp(-2j * sign * y_scaled[:, None] * t_nodes)
    kernel = jnp.einsum("nmyt,et->nmye", weighted, phase)
    kernel = kernel * jnp.exp(-(y_scaled**2))[:, None]
    inside = y_grid**2 + eta_grid**2 <= kernel_window(M) ** 2
    return jnp.where(inside, kernel, 0.0)


def tensor_kernel(kernel: Array, d: int) -> Array:
    """
    Product over coordinates of a one-coordinate block (n, m, y, eta), giving
    axes (n_1..n_d, m_1..m_d, y_1..y_d, eta_1..eta_d).
    """
    if d == 1:
        return kernel
    letters = "abcdefghijklmnopqrstuvwxyz"
    n_idx, m_idx = letters[:d], letters[d : 2 * d]
    y_idx, e_idx = letters[2 * d : 3 * d], letters[3 * d : 4 * d]
    operands = ",".join(n_idx[j] + m_idx[j] + y_idx[j] + e_idx[j] for j in range(d))
    return jnp.einsum(f"{operands}->{n_idx}{m_idx}{y_idx}{e_idx}", *([kernel] * d))
