import math
from typing import Literal, Optional

import jax
import jax.numpy as jnp
import numpy as np
from jaxtyping import Array, PRNGKeyArray

from hnse.constants import DIVERGENCE_TOL
from hnse.errors import ConstraintError
from hnse.frequency import (
    Field,
    FrequencyGrid,
    HorizontalField,
    SpectralField,
    random_horizontal_field,
    sobolev_norm_sq,
)
from hnse.operators import divergence_h, gradient_h, sublaplacian


def s_matrix(d: int) -> Array:
    """The 2d x 2d matrix [[0, 2I], [-2I, 0]] of the group law."""
    eye = jnp.eye(d)
    zero = jnp.zeros((d, d))
    return jnp.block([[zero, 2 * eye], [-2 * eye, zero]])


def apply_s_matrix(u: HorizontalField, transpose: bool = False) -> HorizontalField:
    d = u.grid.d
    top, bottom = u.coeffs[:d], u.coeffs[d:]
    if transpose:
        return u.with_coeffs(jnp.concatenate([-2 * bottom, 2 * top]))
    return u.with_coeffs(jnp.concatenate([2 * bottom, -2 * top]))


def truncated_sublaplacian(grid: FrequencyGrid) -> Array:
    """
    Diagonal symbol of -div_H o grad_H on the truncated space:
    4|lambda| sum_j e(m_j) with e(m) = 2m + 1 for m < M and e(M) = M.
    """
    idx = np.indices(grid.index_shape)[grid.d : 2 * grid.d]
    levels = np.where(idx == grid.M, grid.M, 2 * idx + 1).sum(axis=0)
    return 4 * grid.abs_lambda * levels[..., None]


def _inverse_truncated_sublaplacian(grid: FrequencyGrid) -> Array:
    symbol = truncated_sublaplacian(grid)
    positive = symbol > 0
    return jnp.where(positive, 1.0 / jnp.where(positive, symbol, 1.0), 0.0)


def solve_sublaplacian(f: SpectralField) -> SpectralField:
    """(-Delta_H)^{-1} f, inverted on the truncated space (zero where the symbol vanishes)."""
    return f.with_coeffs(f.coeffs * _inverse_truncated_sublaplacian(f.grid))


def leray(u: HorizontalField) -> HorizontalField:
    """P u = u + grad_H (-Delta_H)^{-1} div_H u."""
    return u + gradient_h(solve_sublaplacian(divergence_h(u)))


def pi_h(u: HorizontalField) -> HorizontalField:
    """
    Pi_H u = 4 (Id - P) S^T u, the operator with
    (Id - P)(-Delta_H v) = Pi_H d_s v for divergence-free v.
    """
    rotated = apply_s_matrix(u, transpose=True)
    return 4 * (rotated - leray(rotated))


def pi_h_ds(v: HorizontalField) -> HorizontalField:
    """
    Pi_H d_s v in the form (Id - P)(-Delta_H v).

    Equal to pi_h(partial_s(v)) on divergence-free v away from the top
    Hermite level. On the whole truncated space Delta_H v + pi_h_ds(v) is
    P Delta_H v, so the flow it generates stays divergence-free.
    """
    forcing = -sublaplacian(v)
    return forcing - leray(forcing)


def pi_h_norm_proxy(grid: FrequencyGrid, key: PRNGKeyArray, n_samples: int = 50) -> float:
    """Monte-Carlo estimate of sup ||Pi_H u|| / ||u|| over random fields."""
    ratios = []
    for subkey in jax.random.split(key, n_samples):
        u = random_horizontal_field(subkey, grid, margin=0, real=False)
        ratios.append(
            jnp.sqrt(sobolev_norm_sq(pi_h(u), "left_hom") / sobolev_norm_sq(u, "left_hom"))
        )
    return float(jnp.max(jnp.stack(ratios)))


def divergence_residual(u: HorizontalField) -> float:
    """||div_H u|| / ||u||_{H^1}, zero for the zero field."""
    scale = float(sobolev_norm_sq(u, "left_hom", 1.0))
    if scale == 0.0:
        return 0.0
    return math.sqrt(float(sobolev_norm_sq(divergence_h(u), "left_hom")) / scale)


def check_divergence_free(u: HorizontalField, tol: float = DIVERGENCE_TOL):
    residual = divergence_residual(u)
    if residual > tol:
        raise ConstraintError(f"Field is not divergence-free: residual {residual:.3e}.")


def recover_pressure(u: HorizontalField, nonlinear: Optional[HorizontalField] = None) -> SpectralField:
    """
    Pressure p = (-Delta_H)^{-1} div_H (-Delta_H u + N), so that
    -grad_H p = (Id - P)(-Delta_H u + N).
    """
    check_divergence_free(u)
    forcing = -sublaplacian(u)
    if nonlinear is not None:
        forcing = forcing + nonlinear
    return solve_sublaplacian(divergence_h(forcing))


def friedrichs_mask(grid: FrequencyGrid, k: int, kind: Literal["bi", "right"] = "bi") -> Array:
    low, high = 2.0 ** (-(k + 1)), 2.0**k
    right = (grid.eigen_right >= low) & (grid.eigen_right <= high)
    if kind == "right":
        return right
    elif kind == "bi":
        left = (grid.eigen_left >= low) & (grid.eigen_left <= high)
        return left & right
    raise ValueError(f"Friedrichs kind {kind} not recognized.")


def friedrichs(f: Field, k: int, kind: Literal["bi", "right"] = "bi") -> Field:
    """J_k (bi) or J~_k (right): band indicator 2^{-(k+1)} <= eigenvalue <= 2^k."""
    if k < 0:
        raise ValueError("Friedrichs index must be nonnegative.")
    return f.with_coeffs(f.coeffs * friedrichs_mask(f.grid, k, kind))


def covering_index(grid: FrequencyGrid) -> int:
    """Smallest k for which J_k is the identity on the grid."""
    lowest = 4 * grid.min_abs_lambda * grid.d
    highest = 4 * grid.max_abs_lambda * (2 * grid.d * grid.M + grid.d)
    k = 0
    while 2.0 ** (-(k + 1)) > lowest or 2.0**k < highest:
        k += 1
    return k


def is_right_truncated(u: Field, k: int, tol: float = DIVERGENCE_TOL) -> bool:
    total = float(sobolev_norm_sq(u, "left_hom"))
    if total == 0.0:
        return True
    outside = float(sobolev_norm_sq(u - friedrichs(u, k, "right"), "left_hom"))
    return math.sqrt(outside / total) <= tol
