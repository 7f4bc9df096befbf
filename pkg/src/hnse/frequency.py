import math
from typing import Literal, Union

import equinox as eqx
import jax
import jax.numpy as jnp
import numpy as np
from jaxtyping import Array, Complex, Float, PRNGKeyArray

from hnse.errors import GridMismatchError, OutOfBandError

GridMode = Literal["geometric", "uniform_periodic"]
NormKind = Literal[
    "left_hom", "right_hom", "left_inhom", "right_inhom", "mixed", "mixed_hom"
]


class FrequencyGrid(eqx.Module):
    """
    Discretization of the frequency set (n, m, lambda) of the Heisenberg group.

    Multi-indices n, m range over [0, M]^d per coordinate. The lambda nodes are
    symmetric under negation and never contain 0. The weights approximate
    the Plancherel measure |lambda|^d d lambda over the covered band.

    Coefficient arrays on this grid have shape (M+1,)*d + (M+1,)*d + (n_lambda,),
    i.e. axes (n_1..n_d, m_1..m_d, lambda).
    """

    lambda_nodes: Float[Array, " n_lambda"]
    lambda_weights: Float[Array, " n_lambda"]
    d: int = eqx.field(static=True)
    M: int = eqx.field(static=True)
    grid_mode: str = eqx.field(static=True)
    # uniform_periodic parameters
    s_period: float = eqx.field(static=True, default=0.0)
    n_s: int = eqx.field(static=True, default=0)
    # geometric parameters
    lambda0: float = eqx.field(static=True, default=0.0)
    ratio: float = eqx.field(static=True, default=0.0)
    count: int = eqx.field(static=True, default=0)

    @property
    def Q(self) -> int:
        """Homogeneous dimension."""
        return 2 * self.d + 2

    @property
    def n_lambda(self) -> int:
        if self.grid_mode == "geometric":
            return 2 * self.count
        return self.n_s

    @property
    def index_shape(self) -> tuple[int, ...]:
        return (self.M + 1,) * (2 * self.d)

    @property
    def field_shape(self) -> tuple[int, ...]:
        return self.index_shape + (self.n_lambda,)

    @property
    def k_index(self) -> np.ndarray:
        """Signed DFT index of every node (uniform_periodic grids)."""
        if self.grid_mode != "uniform_periodic":
            raise ValueError("k_index is only defined on uniform_periodic grids.")
        K = self.n_s // 2
        return np.concatenate([np.arange(-K, 0), np.arange(1, K + 1)])

    @property
    def magnitude_index(self) -> np.ndarray:
        """Index of |lambda| among the positive nodes, for every node."""
        half = self.n_lambda // 2
        return np.concatenate([np.arange(half)[::-1], np.arange(half)])

    @property
    def max_abs_lambda(self) -> float:
        if self.grid_mode == "geometric":
            return self.lambda0 * self.ratio ** (self.count - 1)
        return 2 * math.pi * (self.n_s // 2) / self.s_period

    @property
    def min_abs_lambda(self) -> float:
        if self.grid_mode == "geometric":
            return self.lambda0
        return 2 * math.pi / self.s_period

    def broadcast_lambda(self, values: Array) -> Array:
        return jnp.reshape(values, (1,) * (2 * self.d) + (-1,))

    @property
    def abs_lambda(self) -> Array:
        return self.broadcast_lambda(jnp.abs(self.lambda_nodes))

    @property
    def weights(self) -> Array:
        return self.broadcast_lambda(self.lambda_weights)

    def index_sum(self, which: Literal["n", "m"]) -> np.ndarray:
        """|n| or |m| for every index position, with a trailing lambda axis of size 1."""
        idx = np.indices(self.index_shape)
        offset = 0 if which == "n" else self.d
        total = sum(idx[offset + j] for j in range(self.d))
        return np.asarray(total)[..., None]

    def index_max(self) -> np.ndarray:
        """Largest single coordinate of (n, m) at every index position."""
        idx = np.indices(self.index_shape)
        return idx.max(axis=0)[..., None]

    @property
    def eigen_left(self) -> Array:
        """Eigenvalues 4|lambda|(2|m|+d) of the left sub-Laplacian."""
        return 4 * self.abs_lambda * (2 * self.index_sum("m") + self.d)

    @property
    def eigen_right(self) -> Array:
        """Eigenvalues 4|lambda|(2|n|+d) of the right sub-Laplacian."""
        return 4 * self.abs_lambda * (2 * self.index_sum("n") + self.d)

    def is_compatible(self, other: "FrequencyGrid") -> bool:
        if (self.d, self.M, self.grid_mode) != (other.d, other.M, other.grid_mode):
            return False
        if self.grid_mode == "geometric":
            return (
                self.count == other.count
                and math.isclose(self.lambda0, other.lambda0, rel_tol=1e-12)
                and math.isclose(self.ratio, other.ratio, rel_tol=1e-12)
            )
        return self.n_s == other.n_s and math.isclose(
            self.s_period, other.s_period, rel_tol=1e-12
        )

    def check_compatible(self, other: "FrequencyGrid"):
        if not self.is_compatible(other):
            raise GridMismatchError(
                f"Grid mismatch: (d={self.d}, M={self.M}, {self.grid_mode}) "
                f"vs (d={other.d}, M={other.M}, {other.grid_mode})."
            )


def make_grid(d: int, M: int, mode: GridMode, **params) -> FrequencyGrid:
    """
    Build a frequency grid.

    Args:
        d: Heisenberg dimension index, >= 1.
        M: Hermite cutoff, >= 0.
        mode: "geometric" (params lambda0, ratio, count) or
            "uniform_periodic" (params s_period, n_s).
    """
    if d < 1:
        raise ValueError("d must be a positive integer.")
    if M < 0:
        raise ValueError("M must be nonnegative.")
    if mode == "geometric":
        lambda0 = float(params.get("lambda0", 1.0))
        ratio = float(params.get("ratio", 2.0))
        count = int(params.get("count", 4))
        if lambda0 <= 0:
            raise ValueError("lambda0 must be positive.")
        if ratio <= 1:
            raise ValueError("ratio must be larger than 1.")
        if count < 1:
            raise ValueError("count must be at least 1.")
        positive = lambda0 * ratio ** np.arange(count)
        nodes = np.concatenate([-positive[::-1], positive])
        # midpoint rule in log(lambda): d lambda = lambda d log(lambda)
        weights = math.log(ratio) * np.abs(nodes) ** (d + 1)
        return FrequencyGrid(
            jnp.asarray(nodes),
            jnp.asarray(weights),
            d=d,
            M=M,
            grid_mode=mode,
            lambda0=lambda0,
            ratio=ratio,
            count=count,
        )
    elif mode == "uniform_periodic":
        s_period = float(params.get("s_period", 2 * math.pi))
        n_s = int(params.get("n_s", 8))
        if s_period <= 0:
            raise ValueError("s_period must be positive.")
        if n_s % 2 != 0 or n_s < 4:
            raise ValueError("n_s must be an even integer >= 4.")
        K = n_s // 2
        k = np.concatenate([np.arange(-K, 0), np.arange(1, K + 1)])
        nodes = 2 * math.pi * k / s_period
        weights = (2 * math.pi / s_period) * np.abs(nodes) ** d
        return FrequencyGrid(
            jnp.asarray(nodes),
            jnp.asarray(weights),
            d=d,
            M=M,
            grid_mode=mode,
            s_period=s_period,
            n_s=n_s,
        )
    raise ValueError(f"Grid mode {mode} not recognized.")


def grid_from_nodes(d: int, M: int, mode: GridMode, nodes: np.ndarray) -> FrequencyGrid:
    """Rebuild a grid from its node list, as stored in field files."""
    nodes = np.sort(np.asarray(nodes, dtype=np.float64))
    half = len(nodes) // 2
    positive = nodes[half:]
    if mode == "geometric":
        ratio = positive[1] / positive[0] if half > 1 else 2.0
        return make_grid(d, M, mode, lambda0=positive[0], ratio=ratio, count=half)
    return make_grid(d, M, mode, s_period=2 * math.pi / positive[0], n_s=2 * half)


class GridField(eqx.Module):
    grid: FrequencyGrid
    coeffs: Complex[Array, "..."]

    def with_coeffs(self, coeffs: Array):
        return type(self)(self.grid, coeffs)

    def _check(self, other: "GridField"):
        if type(self) is not type(other):
            raise TypeError(f"Cannot combine {type(self).__name__} and {type(other).__name__}.")
        self.grid.check_compatible(other.grid)

    def __add__(self, other: "GridField"):
        self._check(other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: "GridField"):
        self._check(other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __neg__(self):
        return self.with_coeffs(-self.coeffs)

    def __mul__(self, scalar: Union[float, complex, Array]):
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__

    def map(self, fn):
        """Apply fn to the coefficient array (componentwise for horizontal fields)."""
        return self.with_coeffs(fn(self.coeffs))

    def is_finite(self) -> bool:
        return bool(jnp.all(jnp.isfinite(self.coeffs)))


class SpectralField(GridField):
    """Coefficients F(n, m, lambda) of a scalar function on the Heisenberg group."""

    @classmethod
    def zeros(cls, grid: FrequencyGrid) -> "SpectralField":
        return cls(grid, jnp.zeros(grid.field_shape, dtype=jnp.complex128))


class HorizontalField(GridField):
    """
    Horizontal vector field stored as a stacked coefficient array of shape
    (2d,) + field_shape. Components 0..d-1 follow the X directions and
    d..2d-1 the Xi directions.
    """

    @classmethod
    def zeros(cls, grid: FrequencyGrid) -> "HorizontalField":
        return cls(grid, jnp.zeros((2 * grid.d,) + grid.field_shape, dtype=jnp.complex128))

    @classmethod
    def from_components(cls, components: list[SpectralField]) -> "HorizontalField":
        grid = components[0].grid
        if len(components) != 2 * grid.d:
            raise ValueError(f"Expected {2 * grid.d} components, got {len(components)}.")
        for component in components[1:]:
            grid.check_compatible(component.grid)
        return cls(grid, jnp.stack([c.coeffs for c in components]))

    def component(self, i: int) -> SpectralField:
        return SpectralField(self.grid, self.coeffs[i])

    def components(self) -> list[SpectralField]:
        return [self.component(i) for i in range(2 * self.grid.d)]


Field = Union[SpectralField, HorizontalField]


def unit_mode(
    grid: FrequencyGrid,
    n: Union[int, tuple[int, ...]],
    m: Union[int, tuple[int, ...]],
    lam_index: int,
    value: complex = 1.0,
) -> SpectralField:
    n = (n,) * grid.d if isinstance(n, int) else tuple(n)
    m = (m,) * grid.d if isinstance(m, int) else tuple(m)
    coeffs = jnp.zeros(grid.field_shape, dtype=jnp.complex128)
    return SpectralField(grid, coeffs.at[n + m + (lam_index,)].set(value))


def lambda_index(grid: FrequencyGrid, lam: float) -> int:
    """Position of the node closest to lam."""
    return int(np.argmin(np.abs(np.asarray(grid.lambda_nodes) - lam)))


def band_margin(f: Field, tol: float = 0.0) -> int:
    """Largest r such that f vanishes whenever an index exceeds M - r."""
    grid = f.grid
    magnitude = np.abs(np.asarray(f.coeffs))
    if magnitude.ndim == len(grid.field_shape) + 1:
        magnitude = magnitude.max(axis=0)
    occupied = (magnitude > tol).any(axis=-1)
    if not occupied.any():
        return grid.M + 1
    highest = int(np.indices(grid.index_shape).max(axis=0)[occupied].max())
    return grid.M - highest


def hermitian_symmetrize(coeffs: Array, grid: FrequencyGrid) -> Array:
    """Enforce F(n, m, -lambda) = conj F(n, m, lambda) so the physical field is real."""
    half = grid.n_lambda // 2
    positive = coeffs[..., half:]
    return jnp.concatenate([jnp.conj(positive[..., ::-1]), positive], axis=-1)


def random_field(
    key: PRNGKeyArray,
    grid: FrequencyGrid,
    margin: int = 2,
    decay: float = 0.0,
    real: bool = True,
    leading_shape: tuple[int, ...] = (),
) -> Array:
    """
    Random coefficient array supported on indices <= M - margin.

    The coefficients are damped by exp(-decay |lambda|); with real=True they
    satisfy the Hermitian symmetry of real physical fields.
    """
    shape = leading_shape + grid.field_shape
    key_re, key_im = jax.random.split(key)
    coeffs = jax.random.normal(key_re, shape) + 1j * jax.random.normal(key_im, shape)
    mask = grid.index_max() <= grid.M - margin
    coeffs = coeffs * mask * jnp.exp(-decay * grid.abs_lambda)
    if real:
        coeffs = hermitian_symmetrize(coeffs, grid)
    return coeffs


def random_spectral_field(key: PRNGKeyArray, grid: FrequencyGrid, **kwargs) -> SpectralField:
    return SpectralField(grid, random_field(key, grid, **kwargs))


def random_horizontal_field(key: PRNGKeyArray, grid: FrequencyGrid, **kwargs) -> HorizontalField:
    return HorizontalField(
        grid, random_field(key, grid, leading_shape=(2 * grid.d,), **kwargs)
    )


def inner_product(f: Field, g: Field) -> Array:
    """Frequency pairing sum F conj(G) w over all modes (and components)."""
    f.grid.check_compatible(g.grid)
    if f.coeffs.shape != g.coeffs.shape:
        raise GridMismatchError("Fields have different component counts.")
    return jnp.sum(f.coeffs * jnp.conj(g.coeffs) * f.grid.weights)


def norm_symbol(grid: FrequencyGrid, kind: NormKind, ell: float, ell_prime: float = 0.0) -> Array:
    """Squared symbol sigma(n, m, lambda) of a Sobolev norm."""
    left = grid.eigen_left
    right = grid.eigen_right
    if kind == "left_hom":
        return left**ell
    elif kind == "right_hom":
        return right**ell
    elif kind == "left_inhom":
        return (1 + left) ** ell
    elif kind == "right_inhom":
        return (1 + right) ** ell
    elif kind == "mixed":
        return (1 + left) ** ell * right**ell_prime
    elif kind == "mixed_hom":
        return left**ell * right**ell_prime
    raise ValueError(f"Norm kind {kind} not recognized.")


def sobolev_norm_sq(f: Field, kind: NormKind, ell: float = 0.0, ell_prime: float = 0.0) -> Array:
    sigma = norm_symbol(f.grid, kind, ell, ell_prime)
    return jnp.sum(jnp.abs(f.coeffs) ** 2 * sigma * f.grid.weights)


def dilate(f: Field, p: int) -> Field:
    """
    Frequency-side action of f -> f o delta_mu with mu = ratio^{p/2}:
    F'(n, m, lambda) = mu^{-Q} F(n, m, lambda / mu^2).
    On a geometric grid lambda / mu^2 is the node p positions closer to 0.
    """
    grid = f.grid
    if grid.grid_mode != "geometric":
        raise ValueError("dilate requires a geometric grid.")
    if p == 0:
        return f
    count = grid.count
    coeffs = f.coeffs
    negative = coeffs[..., :count][..., ::-1]
    positive = coeffs[..., count:]
    leaving = slice(count - p, count) if p > 0 else slice(0, -p)
    lost = jnp.sum(jnp.abs(negative[..., leaving]) ** 2 + jnp.abs(positive[..., leaving]) ** 2)
    if abs(p) >= count:
        lost = jnp.sum(jnp.abs(coeffs) ** 2)
    if float(lost) > 0:
        raise OutOfBandError(f"Dilation by {p} moves nonzero mass out of the band.")
    if abs(p) >= count:
        return f.with_coeffs(jnp.zeros_like(coeffs))

    def shift(x: Array) -> Array:
        pad = [(0, 0)] * (x.ndim - 1)
        if p > 0:
            return jnp.pad(x[..., : count - p], pad + [(p, 0)])
        return jnp.pad(x[..., -p:], pad + [(0, -p)])

    mu = grid.ratio ** (p / 2)
    shifted = jnp.concatenate([shift(negative)[..., ::-1], shift(positive)], axis=-1)
    return f.with_coeffs(mu ** (-grid.Q) * shifted)
