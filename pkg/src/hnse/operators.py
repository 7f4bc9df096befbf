import math
from dataclasses import dataclass
from typing import Callable, Literal, Union

import jax.numpy as jnp
from jax import lax
from jaxtyping import Array

from hnse.constants import EXP_GUARD
from hnse.errors import SymbolError
from hnse.frequency import Field, FrequencyGrid, HorizontalField, SpectralField

SymbolKind = Literal[
    "left_sublap_pow",
    "right_sublap_pow",
    "left_inhom_pow",
    "right_inhom_pow",
    "ds",
    "abs_ds_pow",
    "exp_abs_ds",
    "band_indicator",
]
LadderName = Literal["X", "Xi", "X_tilde", "Xi_tilde"]


@dataclass(frozen=True)
class SymbolSpec:
    """
    Diagonal operator in frequency space.

    ell is the power for the *_pow kinds, zeta the exponent of exp_abs_ds,
    band the closed interval [a, b] of eigenvalues kept by band_indicator
    (eigenvalues of the left or right sub-Laplacian according to side).
    """

    kind: SymbolKind
    ell: float = 0.0
    zeta: float = 0.0
    band: tuple[float, float] = (0.0, math.inf)
    side: Literal["left", "right"] = "left"


@dataclass(frozen=True)
class LadderSpec:
    """Left (X_j, Xi_j) or right (X~_j, Xi~_j) invariant vector field, j counted from 1."""

    which: LadderName
    j: int = 1

    def __post_init__(self):
        if self.which not in ("X", "Xi", "X_tilde", "Xi_tilde"):
            raise ValueError(f"Ladder {self.which} not recognized.")
        if self.j < 1:
            raise ValueError("Ladder index j starts at 1.")


Operator = Union[SymbolSpec, LadderSpec, Callable[[Field], Field]]


def symbol_values(grid: FrequencyGrid, spec: SymbolSpec) -> Array:
    if spec.kind == "left_sublap_pow":
        return grid.eigen_left**spec.ell
    elif spec.kind == "right_sublap_pow":
        return grid.eigen_right**spec.ell
    elif spec.kind == "left_inhom_pow":
        return (1 + grid.eigen_left) ** spec.ell
    elif spec.kind == "right_inhom_pow":
        return (1 + grid.eigen_right) ** spec.ell
    elif spec.kind == "ds":
        return 1j * grid.broadcast_lambda(grid.lambda_nodes)
    elif spec.kind == "abs_ds_pow":
        return grid.abs_lambda**spec.ell
    elif spec.kind == "exp_abs_ds":
        if abs(spec.zeta) * grid.max_abs_lambda > EXP_GUARD:
            raise SymbolError(
                f"exp(zeta |lambda|) overflows: zeta={spec.zeta}, max |lambda|={grid.max_abs_lambda}."
            )
        return jnp.exp(spec.zeta * grid.abs_lambda)
    elif spec.kind == "band_indicator":
        eigen = grid.eigen_left if spec.side == "left" else grid.eigen_right
        low, high = spec.band
        return ((eigen >= low) & (eigen <= high)).astype(jnp.float64)
    raise ValueError(f"Symbol kind {spec.kind} not recognized.")


def apply_symbol(f: Field, spec: SymbolSpec) -> Field:
    return f.with_coeffs(f.coeffs * symbol_values(f.grid, spec))


def _shift(x: Array, axis: int, step: int) -> Array:
    """result[i] = x[i + step] along axis, zero where i + step is out of range."""
    size = x.shape[axis]
    pad = [(0, 0)] * x.ndim
    if step > 0:
        body = lax.slice_in_dim(x, min(step, size), size, axis=axis)
        pad[axis] = (0, min(step, size))
    else:
        body = lax.slice_in_dim(x, 0, max(size + step, 0), axis=axis)
        pad[axis] = (min(-step, size), 0)
    return jnp.pad(body, pad)


def _ladder_combination(x: Array, axis: int, sign: float) -> Array:
    """sqrt(i + 1) x[i + 1] + sign * sqrt(i) x[i - 1] along axis."""
    shape = [1] * x.ndim
    shape[axis] = x.shape[axis]
    index = jnp.arange(x.shape[axis], dtype=jnp.float64).reshape(shape)
    return jnp.sqrt(index + 1) * _shift(x, axis, 1) + sign * jnp.sqrt(index) * _shift(x, axis, -1)


def apply_ladder(f: Field, spec: LadderSpec) -> Field:
    """
    Frequency-side action of an invariant vector field:
    F(X_j f) = -M+_j F, F(Xi_j f) = M-_j F acting on m_j, and
    F(X~_j f) = M~+_j F, F(Xi~_j f) = M~-_j F acting on n_j, with
    M+ = sqrt(2|lambda|) (a - a^*) and M- = i sqrt(2) lambda / sqrt(|lambda|) (a + a^*).
    Indices stepping outside [0, M] read zero.
    """
    grid = f.grid
    if spec.j > grid.d:
        raise ValueError(f"Ladder index j={spec.j} exceeds d={grid.d}.")
    offset = f.coeffs.ndim - len(grid.field_shape)
    on_m = spec.which in ("X", "Xi")
    axis = offset + (grid.d if on_m else 0) + spec.j - 1
    lam = grid.broadcast_lambda(grid.lambda_nodes)
    abs_lam = jnp.abs(lam)
    if spec.which in ("X", "X_tilde"):
        prefactor = jnp.sqrt(2 * abs_lam) * (-1.0 if on_m else 1.0)
        return f.with_coeffs(prefactor * _ladder_combination(f.coeffs, axis, -1.0))
    prefactor = 1j * math.sqrt(2) * lam / jnp.sqrt(abs_lam)
    return f.with_coeffs(prefactor * _ladder_combination(f.coeffs, axis, 1.0))


def gradient_h(f: SpectralField) -> HorizontalField:
    """(X_1 f, ..., X_d f, Xi_1 f, ..., Xi_d f)."""
    d = f.grid.d
    components = [apply_ladder(f, LadderSpec("X", j)) for j in range(1, d + 1)]
    components += [apply_ladder(f, LadderSpec("Xi", j)) for j in range(1, d + 1)]
    return HorizontalField.from_components(components)


def right_gradient_h(f: SpectralField) -> HorizontalField:
    d = f.grid.d
    components = [apply_ladder(f, LadderSpec("X_tilde", j)) for j in range(1, d + 1)]
    components += [apply_ladder(f, LadderSpec("Xi_tilde", j)) for j in range(1, d + 1)]
    return HorizontalField.from_components(components)


def divergence_h(u: HorizontalField) -> SpectralField:
    d = u.grid.d
    total = SpectralField.zeros(u.grid)
    for j in range(1, d + 1):
        total = total + apply_ladder(u.component(j - 1), LadderSpec("X", j))
        total = total + apply_ladder(u.component(d + j - 1), LadderSpec("Xi", j))
    return total


def partial_s(f: Field) -> Field:
    return apply_symbol(f, SymbolSpec("ds"))


def sublaplacian(f: Field) -> Field:
    """Delta_H f, i.e. multiplication by -4|lambda|(2|m| + d)."""
    return f.with_coeffs(-f.grid.eigen_left * f.coeffs)


def apply_operator(f: Field, op: Operator) -> Field:
    if isinstance(op, SymbolSpec):
        return apply_symbol(f, op)
    if isinstance(op, LadderSpec):
        return apply_ladder(f, op)
    return op(f)


def commutator(f: Field, A: Operator, B: Operator) -> Field:
    """(A B - B A) f."""
    return apply_operator(apply_operator(f, B), A) - apply_operator(apply_operator(f, A), B)
