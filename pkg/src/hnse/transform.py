import math
from typing import Callable, Literal

import equinox as eqx
import jax
import jax.numpy as jnp
import numpy as np
from jaxtyping import Array, Complex, Float

from hnse.constants import (
    ORTHONORMALITY_TOL,
    PHYSICAL_WINDOW_PAD,
    S_MEAN_TOL,
    inversion_constant,
)
from hnse.errors import GridMismatchError, HermiteAccuracyError
from hnse.frequency import FrequencyGrid, SpectralField
from hnse.hermite import gauss_hermite, tensor_kernel, w_matrix

VectorFieldName = Literal["X", "Xi", "X_tilde", "Xi_tilde"]


class PhysicalGrid(eqx.Module):
    """
    Tensor Gauss-Hermite grid in Y = (y, eta) times a uniform grid in s,
    paired with a uniform_periodic FrequencyGrid.

    kernel holds W(n, m, lambda_k, Y) for every node, flattened to shape
    (n_index, n_Y, n_lambda).
    """

    fgrid: FrequencyGrid
    y_nodes: Float[Array, " n_y"]
    y_weights: Float[Array, " n_y"]
    kernel: Complex[Array, "n_index n_Y n_lambda"]
    n_y: int = eqx.field(static=True)
    n_s_phys: int = eqx.field(static=True)
    dealias: bool = eqx.field(static=True)

    @property
    def d(self) -> int:
        return self.fgrid.d

    @property
    def s_period(self) -> float:
        return self.fgrid.s_period

    @property
    def y_shape(self) -> tuple[int, ...]:
        return (self.n_y,) * (2 * self.d)

    @property
    def sample_shape(self) -> tuple[int, ...]:
        return self.y_shape + (self.n_s_phys,)

    @property
    def s_nodes(self) -> Array:
        return jnp.arange(self.n_s_phys) * (self.s_period / self.n_s_phys)

    @property
    def s_weight(self) -> float:
        return self.s_period / self.n_s_phys

    @property
    def bins(self) -> np.ndarray:
        """DFT bin of every lambda node on the physical s grid."""
        return np.mod(self.fgrid.k_index, self.n_s_phys)

    def y_weight_tensor(self) -> Array:
        return tensor_weights(self.y_weights, 2 * self.d)

    def coordinates(self) -> tuple[Array, Array]:
        """Y of shape sample_shape + (2d,) and s of shape sample_shape."""
        axes = [self.y_nodes] * (2 * self.d) + [self.s_nodes]
        mesh = jnp.meshgrid(*axes, indexing="ij")
        return jnp.stack(mesh[:-1], axis=-1), mesh[-1]


class PhysicalField(eqx.Module):
    pgrid: PhysicalGrid
    samples: Complex[Array, "..."]

    def with_samples(self, samples: Array) -> "PhysicalField":
        return PhysicalField(self.pgrid, samples)

    def __mul__(self, other: "PhysicalField") -> "PhysicalField":
        return self.with_samples(self.samples * other.samples)


def tensor_weights(weights: Array, dims: int) -> Array:
    out = weights
    for _ in range(dims - 1):
        out = out[..., None] * weights
    return out


def default_y_count(fgrid: FrequencyGrid) -> int:
    radius = math.sqrt(2 * fgrid.M) + PHYSICAL_WINDOW_PAD
    band_ratio = fgrid.max_abs_lambda / fgrid.min_abs_lambda
    return max(24, math.ceil(1.5 * radius**2 * math.sqrt(2 * band_ratio)))


def _check_orthogonality(fgrid: FrequencyGrid, kernel: Array, weights: Array):
    weighted = kernel * weights[None, :, None]
    gram = jnp.einsum("iyk,jyk->kij", weighted, jnp.conj(kernel))
    expected = (math.pi / (2 * jnp.abs(fgrid.lambda_nodes))) ** fgrid.d
    eye = jnp.eye(kernel.shape[0])
    residual = jnp.max(
        jnp.abs(gram / expected[:, None, None] - eye[None]), axis=(1, 2)
    )
    worst = int(jnp.argmax(residual))
    if float(residual[worst]) > ORTHONORMALITY_TOL:
        raise HermiteAccuracyError(
            f"Physical grid misses W orthogonality by {float(residual[worst]):.3e} "
            f"at lambda={float(fgrid.lambda_nodes[worst])}; increase n_y."
        )


def make_physical_grid(
    fgrid: FrequencyGrid, n_y: int | None = None, dealias: bool = True
) -> PhysicalGrid:
    """
    Build the physical grid paired with a uniform_periodic frequency grid.

    The Y nodes are Gauss-Hermite nodes matched to exp(-2 lambda_ref |Y|^2),
    lambda_ref = sqrt(2 lambda_min lambda_max). With dealias=True the s
    grid has more than 3K points (K = n_s / 2) so products of band-limited
    fields do not alias into the band; otherwise it has n_s + 2 points.
    """
    if fgrid.grid_mode != "uniform_periodic":
        raise GridMismatchError("Only uniform_periodic grids can be paired with a physical grid.")
    n_y = default_y_count(fgrid) if n_y is None else n_y
    K = fgrid.n_s // 2
    n_s_phys = 3 * K + 1 + (3 * K + 1) % 2 if dealias else fgrid.n_s + 2

    # centred between |W|^2 integrands (2 lambda_min) and triple products (4 lambda_max)
    lambda_ref = math.sqrt(2 * fgrid.min_abs_lambda * fgrid.max_abs_lambda)
    t, w = gauss_hermite(n_y)
    scale = math.sqrt(2 * lambda_ref)
    y_nodes = jnp.asarray(t / scale)
    y_weights = jnp.asarray(w * np.exp(t**2) / scale)

    half = fgrid.n_lambda // 2
    positive_nodes = np.asarray(fgrid.lambda_nodes)[half:]
    blocks = []
    for lam in positive_nodes:
        block = tensor_kernel(w_matrix(float(lam), fgrid.M, y_nodes), fgrid.d)
        blocks.append(block.reshape((fgrid.M + 1) ** (2 * fgrid.d), -1))
    positive = jnp.stack(blocks, axis=-1)
    kernel = jnp.concatenate([jnp.conj(positive[..., ::-1]), positive], axis=-1)

    weights = tensor_weights(y_weights, 2 * fgrid.d)
    _check_orthogonality(fgrid, kernel, weights.reshape(-1))
    return PhysicalGrid(
        fgrid, y_nodes, y_weights, kernel, n_y=n_y, n_s_phys=n_s_phys, dealias=dealias
    )


def _check_pairing(fgrid: FrequencyGrid, pgrid: PhysicalGrid):
    if not fgrid.is_compatible(pgrid.fgrid):
        raise GridMismatchError("Frequency grid is not paired with this physical grid.")


@eqx.filter_jit
def _forward_kernel(pgrid: PhysicalGrid, samples: Array) -> Array:
    fgrid = pgrid.fgrid
    spectrum = jnp.fft.fft(samples, axis=-1) * pgrid.s_weight
    selected = spectrum[..., pgrid.bins].reshape(-1, fgrid.n_lambda)
    weights = pgrid.y_weight_tensor().reshape(-1, 1)
    coeffs = jnp.einsum("iyk,yk->ik", pgrid.kernel, selected * weights)
    return coeffs.reshape(fgrid.field_shape)


@eqx.filter_jit
def _inverse_kernel(pgrid: PhysicalGrid, coeffs: Array) -> Array:
    fgrid = pgrid.fgrid
    flat = coeffs.reshape(-1, fgrid.n_lambda)
    traced = jnp.einsum("ik,iyk->yk", flat, jnp.conj(pgrid.kernel))
    traced = traced * inversion_constant(fgrid.d) * fgrid.lambda_weights
    spectrum = jnp.zeros((traced.shape[0], pgrid.n_s_phys), dtype=jnp.complex128)
    spectrum = spectrum.at[:, pgrid.bins].set(traced)
    samples = jnp.fft.ifft(spectrum, axis=-1) * pgrid.n_s_phys
    return samples.reshape(pgrid.sample_shape)


def s_mean_fraction(f: PhysicalField) -> float:
    mean = jnp.mean(f.samples, axis=-1)
    total = jnp.sqrt(jnp.mean(jnp.abs(f.samples) ** 2))
    if float(total) == 0.0:
        return 0.0
    return float(jnp.sqrt(jnp.mean(jnp.abs(mean) ** 2)) / total)


def forward(f: PhysicalField, fgrid: FrequencyGrid, strict: bool = True) -> SpectralField:
    """
    Heisenberg Fourier transform F(n, m, lambda) = int e^{-i s lambda} W(n, m, lambda, Y) f(Y, s).

    The s integral is a DFT on the periodic grid, the Y integral the tensor
    Gauss-Hermite quadrature. s-frequencies outside the band are projected
    out; with strict=True a nonzero s-mean is rejected.
    """
    _check_pairing(fgrid, f.pgrid)
    if strict and s_mean_fraction(f) > S_MEAN_TOL:
        raise ValueError("Physical field has a nonzero s-mean (k = 0) component.")
    return SpectralField(fgrid, _forward_kernel(f.pgrid, f.samples))


def inverse(F: SpectralField, pgrid: PhysicalGrid) -> PhysicalField:
    """
    Inverse transform
    f(Y, s) = 2^{d-1} / pi^{d+1} sum_k w_k sum_{n,m} F(n, m, lambda_k) conj(W(n, m, lambda_k, Y)) e^{i s lambda_k}.
    """
    _check_pairing(F.grid, pgrid)
    return PhysicalField(pgrid, _inverse_kernel(pgrid, F.coeffs))


def physical_inner_product(f: PhysicalField, g: PhysicalField) -> Array:
    weights = f.pgrid.y_weight_tensor()[..., None] * f.pgrid.s_weight
    return jnp.sum(f.samples * jnp.conj(g.samples) * weights)


def physical_lp_norm(f: PhysicalField, p: float = 2.0) -> Array:
    weights = f.pgrid.y_weight_tensor()[..., None] * f.pgrid.s_weight
    return jnp.sum(jnp.abs(f.samples) ** p * weights) ** (1 / p)


def sample_function(fn: Callable[[Array, Array], Array], pgrid: PhysicalGrid) -> PhysicalField:
    """Evaluate fn(Y, s) on the grid; Y carries a trailing axis of size 2d."""
    Y, s = pgrid.coordinates()
    return PhysicalField(pgrid, jnp.asarray(fn(Y, s), dtype=jnp.complex128))


def s_multiplier(f: PhysicalField, multiplier: Callable[[Array], Array]) -> PhysicalField:
    """Euclidean Fourier multiplier in s: multiplies the s-frequency lambda by multiplier(lambda)."""
    pgrid = f.pgrid
    frequencies = 2 * jnp.pi * jnp.fft.fftfreq(pgrid.n_s_phys, d=1.0 / pgrid.n_s_phys) / pgrid.s_period
    spectrum = jnp.fft.fft(f.samples, axis=-1) * multiplier(frequencies)
    return f.with_samples(jnp.fft.ifft(spectrum, axis=-1))


def translate_s(f: PhysicalField, steps: int) -> PhysicalField:
    """f(Y, s - steps * ds) on the periodic s grid."""
    return f.with_samples(jnp.roll(f.samples, steps, axis=-1))


def group_law(w: tuple[Array, Array], w_prime: tuple[Array, Array]) -> tuple[Array, Array]:
    """(Y, s) . (Y', s') = (Y + Y', s + s' + <S Y, Y'>) with S = [[0, 2I], [-2I, 0]]."""
    Y, s = w
    Y_prime, s_prime = w_prime
    d = Y.shape[-1] // 2
    twist = 2 * jnp.sum(Y[..., d:] * Y_prime[..., :d] - Y[..., :d] * Y_prime[..., d:], axis=-1)
    return Y + Y_prime, s + s_prime + twist


def vector_field_derivative(
    fn: Callable[[Array, Array], Array], which: VectorFieldName, j: int
) -> Callable[[Array, Array], Array]:
    """
    Physical-space action of X_j, Xi_j (left-invariant) or X~_j, Xi~_j
    (right-invariant) on fn, as the derivative along the group law.
    """
    if which not in ("X", "Xi", "X_tilde", "Xi_tilde"):
        raise ValueError(f"Vector field {which} not recognized.")

    def derivative(Y: Array, s: Array) -> Array:
        d = Y.shape[-1] // 2
        if not 1 <= j <= d:
            raise ValueError(f"j={j} out of range [1, {d}].")
        axis = j - 1 if which in ("X", "X_tilde") else d + j - 1
        direction = jnp.zeros(2 * d).at[axis].set(1.0)

        def along(t):
            step = (t * direction, jnp.zeros(()))
            if which in ("X", "Xi"):
                Y_t, s_t = group_law((Y, s), step)
            else:
                Y_t, s_t = group_law(step, (Y, s))
            return fn(Y_t, s_t)

        return jax.jvp(along, (jnp.asarray(0.0),), (jnp.asarray(1.0),))[1]

    return derivative


def vertical_lift(components: list[PhysicalField]) -> PhysicalField:
    """Suppressed vertical component 2 sum_j (eta_j v_j - y_j v_{j+d}) of a horizontal field."""
    pgrid = components[0].pgrid
    d = pgrid.d
    Y, _ = pgrid.coordinates()
    lift = sum(
        Y[..., d + j] * components[j].samples - Y[..., j] * components[d + j].samples
        for j in range(d)
    )
    return PhysicalField(pgrid, 2 * lift)
