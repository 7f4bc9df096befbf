import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional

import equinox as eqx
import jax.numpy as jnp
import numpy as np
from jaxtyping import Array

from hnse.base import Stepper, StepResult
from hnse.constants import DENSE_QUADRATURE_NODES
from hnse.errors import CFLError, ConstraintError, NumericalAbort
from hnse.frequency import Field, FrequencyGrid, HorizontalField, sobolev_norm_sq
from hnse.navier_stokes.nonlinear import convect
from hnse.projection import (
    check_divergence_free,
    covering_index,
    friedrichs,
    is_right_truncated,
    leray,
    pi_h_ds,
)
from hnse.transform import PhysicalGrid

# ||4 (Id - P) S^T|| <= 4 ||S|| = 8
PI_H_NORM_BOUND = 8.0


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    scheme: Literal["exact_diagonal", "etd_rk2"] = "etd_rk2"
    k: Optional[int] = None
    dealias: bool = True
    cfl_guard: float = 0.5
    n_roots: int = 16

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive.")
        if self.scheme not in ("exact_diagonal", "etd_rk2"):
            raise ValueError(f"Scheme {self.scheme} not recognized.")
        if not self.cfl_guard > 0:
            raise ValueError("cfl_guard must be positive.")
        if self.k is not None and self.k < 0:
            raise ValueError("Friedrichs index must be nonnegative.")

    def friedrichs_index(self, grid: FrequencyGrid) -> int:
        return covering_index(grid) if self.k is None else self.k


class EtdCoefficients(eqx.Module):
    """e^{hL}, phi_1(hL) and phi_2(hL) for the diagonal part L = Delta_H."""

    decay: Array
    phi1: Array
    phi2: Array


def etd_coefficients(eigen: Array, dt: float, n_roots: int = 16) -> EtdCoefficients:
    """
    phi functions of z = -dt * eigen, averaged over a contour around each z
    to avoid the cancellation of (e^z - 1) / z near 0.
    """
    z = -dt * eigen
    roots = jnp.exp(1j * jnp.pi * (jnp.arange(n_roots) + 0.5) / n_roots)
    lr = z[..., None] + roots
    phi1 = jnp.mean((jnp.exp(lr) - 1.0) / lr, axis=-1).real
    phi2 = jnp.mean((jnp.exp(lr) - 1.0 - lr) / lr**2, axis=-1).real
    return EtdCoefficients(jnp.exp(z), phi1, phi2)


def step_heat(u: Field, dt: float) -> Field:
    """Exact heat flow: every coefficient times e^{-dt 4|lambda|(2|m|+d)}."""
    return u.with_coeffs(u.coeffs * jnp.exp(-dt * u.grid.eigen_left))


def check_cfl(grid: FrequencyGrid, cfg: StepperConfig, pi_norm: Optional[float] = None):
    pi_norm = PI_H_NORM_BOUND if pi_norm is None else pi_norm
    value = cfg.dt * grid.max_abs_lambda * pi_norm
    if value > cfg.cfl_guard:
        raise CFLError(
            f"dt * max|lambda| * ||Pi_H|| = {value:.4g} exceeds cfl_guard = {cfg.cfl_guard}."
        )


def _etd_rk2(
    u: HorizontalField,
    remainder: Callable[[HorizontalField], HorizontalField],
    coefficients: EtdCoefficients,
    dt: float,
) -> tuple[HorizontalField, HorizontalField, HorizontalField]:
    """One step and the remainder at both stages, which fix the dense output."""
    n0 = remainder(u)
    stage = u.with_coeffs(coefficients.decay * u.coeffs + dt * coefficients.phi1 * n0.coeffs)
    n1 = remainder(stage)
    raw = stage.with_coeffs(stage.coeffs + dt * coefficients.phi2 * (n1.coeffs - n0.coeffs))
    return raw, n0, n1


class DenseOutput(eqx.Module):
    """
    Coefficients of the ETD-RK2 interpolant
    c(tau) = e^{-mu tau} c_0 + tau phi_1 n_0 + tau^2 / dt phi_2 (n_1 - n_0)
    at the Gauss-Legendre nodes of one step, and the quadrature weights.
    """

    decay: Array
    phi1: Array
    phi2: Array
    weights: Array


def dense_output(
    eigen: Array, dt: float, n_roots: int = 16, n_nodes: int = DENSE_QUADRATURE_NODES
) -> DenseOutput:
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    taus = 0.5 * dt * (nodes + 1.0)
    tables = [etd_coefficients(eigen, float(tau), n_roots) for tau in taus]
    return DenseOutput(
        jnp.stack([table.decay for table in tables]),
        jnp.stack([tau * table.phi1 for tau, table in zip(taus, tables)]),
        jnp.stack([tau**2 / dt * table.phi2 for tau, table in zip(taus, tables)]),
        jnp.asarray(0.5 * dt * weights),
    )


def dense_dissipation(
    u: HorizontalField, n0: HorizontalField, n1: HorizontalField, dense: DenseOutput
) -> Array:
    """2 int ||grad_H c(tau)||^2 over one step along the ETD-RK2 interpolant."""
    grid = u.grid
    states = (
        dense.decay[:, None] * u.coeffs[None]
        + dense.phi1[:, None] * n0.coeffs[None]
        + dense.phi2[:, None] * (n1.coeffs - n0.coeffs)[None]
    )
    density = 2 * grid.eigen_left * jnp.abs(states) ** 2 * grid.weights
    return jnp.sum(dense.weights * jnp.sum(density, axis=tuple(range(1, density.ndim))))


def _finish(
    raw: HorizontalField,
    project: Callable[[HorizontalField], HorizontalField],
    dissipation: Optional[float] = None,
) -> StepResult:
    if not raw.is_finite():
        raise NumericalAbort("Non-finite coefficients after step.")
    projected = project(raw)
    norm = float(sobolev_norm_sq(raw, "left_hom"))
    if norm == 0.0:
        return StepResult(projected, 0.0, dissipation)
    drift = math.sqrt(float(sobolev_norm_sq(raw - projected, "left_hom")) / norm)
    return StepResult(projected, drift, dissipation)


def step_stokes(
    u: HorizontalField,
    forcing: Optional[HorizontalField],
    cfg: StepperConfig,
    pi_norm: Optional[float] = None,
    coefficients: Optional[EtdCoefficients] = None,
    dense: Optional[DenseOutput] = None,
) -> StepResult:
    """
    One ETD-RK2 step of d_t u = Delta_H u + Pi_H d_s u + P f, followed by P.
    The Pi_H term is evaluated as (Id - P)(-Delta_H u), see pi_h_ds.
    """
    if cfg.scheme != "etd_rk2":
        raise ValueError("Stokes steps use the etd_rk2 scheme.")
    check_divergence_free(u)
    check_cfl(u.grid, cfg, pi_norm)
    if coefficients is None:
        coefficients = etd_coefficients(u.grid.eigen_left, cfg.dt, cfg.n_roots)
    if dense is None:
        dense = dense_output(u.grid.eigen_left, cfg.dt, cfg.n_roots)
    projected_forcing = leray(forcing) if forcing is not None else None

    def remainder(v: HorizontalField) -> HorizontalField:
        rate = pi_h_ds(v)
        if projected_forcing is not None:
            rate = rate + projected_forcing
        return rate

    raw, n0, n1 = _etd_rk2(u, remainder, coefficients, cfg.dt)
    return _finish(raw, leray, float(dense_dissipation(u, n0, n1, dense)))


def step_nsh(
    u: HorizontalField,
    cfg: StepperConfig,
    pgrid: PhysicalGrid,
    pi_norm: Optional[float] = None,
    coefficients: Optional[EtdCoefficients] = None,
    dense: Optional[DenseOutput] = None,
) -> StepResult:
    """
    One ETD-RK2 step of d_t u = Delta_H u + Pi_H d_s u - P J_k (u . grad_H J_k u),
    followed by J~_k and P.
    """
    if cfg.scheme != "etd_rk2":
        raise ValueError("Navier-Stokes steps use the etd_rk2 scheme.")
    k = cfg.friedrichs_index(u.grid)
    check_divergence_free(u)
    if not is_right_truncated(u, k):
        raise ConstraintError(f"Field is not invariant under J~_{k}.")
    check_cfl(u.grid, cfg, pi_norm)
    if coefficients is None:
        coefficients = etd_coefficients(u.grid.eigen_left, cfg.dt, cfg.n_roots)
    if dense is None:
        dense = dense_output(u.grid.eigen_left, cfg.dt, cfg.n_roots)

    def remainder(v: HorizontalField) -> HorizontalField:
        return pi_h_ds(v) - convect(v, k, pgrid, check=False)

    def project(v: HorizontalField) -> HorizontalField:
        return leray(friedrichs(v, k, "right"))

    raw, n0, n1 = _etd_rk2(u, remainder, coefficients, cfg.dt)
    return _finish(raw, project, float(dense_dissipation(u, n0, n1, dense)))


def _ramp(x: Array) -> Array:
    """(1 - (1 + x) e^{-x}) / x, with its series below 1e-2."""
    small = x < 1e-2
    safe = jnp.where(small, 1.0, x)
    series = x / 2 - x**2 / 3 + x**3 / 8 - x**4 / 30 + x**5 / 144
    return jnp.where(small, series, (-jnp.expm1(-safe) - safe * jnp.exp(-safe)) / safe)


def _log_growth(x: Array) -> Array:
    """log((e^x - 1 - x) / x), finite for every x > 0."""
    small = x < 1e-2
    safe = jnp.where(small, 1.0, x)
    series = jnp.log(x / 2 + x**2 / 6 + x**3 / 24 + x**4 / 120 + x**5 / 720)
    return jnp.where(small, series, safe + jnp.log1p(-(1 + safe) * jnp.exp(-safe)) - jnp.log(safe))


def dissipation_increment(u0: Field, u1: Field, dt: float) -> Array:
    """
    2 int ||grad_H u||^2 over one step. Per mode, e^{2 mu t}|c(t)|^2 is
    interpolated linearly between the end points (mu the mode's eigenvalue),
    which is exact for the diagonal heat flow.
    """
    grid = u0.grid
    x = 2 * grid.eigen_left * dt
    start = jnp.abs(u0.coeffs) ** 2
    end = jnp.abs(u1.coeffs) ** 2
    ramp = _ramp(x)
    # the end point enters as e^x |c_1|^2 ramp = |c_1|^2 (e^x - 1 - x) / x
    integral = start * (-jnp.expm1(-x) - ramp) + jnp.exp(jnp.log(end) + _log_growth(x))
    return jnp.sum(integral * grid.weights)


class HeatStepper(Stepper):
    def __init__(self, grid: FrequencyGrid, dt: float):
        self.grid = grid
        self.dt = dt

    def step(self, u: HorizontalField) -> StepResult:
        v = step_heat(u, self.dt)
        return StepResult(v, 0.0, float(dissipation_increment(u, v, self.dt)))


class StokesStepper(Stepper):
    def __init__(
        self,
        grid: FrequencyGrid,
        cfg: StepperConfig,
        forcing: Optional[HorizontalField] = None,
        pi_norm: Optional[float] = None,
    ):
        self.grid = grid
        self.cfg = cfg
        self.dt = cfg.dt
        self.forcing = forcing
        self.pi_norm = pi_norm
        check_cfl(grid, cfg, pi_norm)
        self.coefficients = etd_coefficients(grid.eigen_left, cfg.dt, cfg.n_roots)
        self.dense = dense_output(grid.eigen_left, cfg.dt, cfg.n_roots)

    def prepare(self, u: HorizontalField) -> HorizontalField:
        return leray(u)

    def step(self, u: HorizontalField) -> StepResult:
        return step_stokes(u, self.forcing, self.cfg, self.pi_norm, self.coefficients, self.dense)


class NSHStepper(Stepper):
    def __init__(
        self,
        grid: FrequencyGrid,
        cfg: StepperConfig,
        pgrid: PhysicalGrid,
        pi_norm: Optional[float] = None,
    ):
        self.grid = grid
        self.cfg = cfg
        self.dt = cfg.dt
        grid.check_compatible(pgrid.fgrid)
        self.pgrid = pgrid
        self.pi_norm = pi_norm
        self.k = cfg.friedrichs_index(grid)
        check_cfl(grid, cfg, pi_norm)
        self.coefficients = etd_coefficients(grid.eigen_left, cfg.dt, cfg.n_roots)
        self.dense = dense_output(grid.eigen_left, cfg.dt, cfg.n_roots)

    def prepare(self, u: HorizontalField) -> HorizontalField:
        return leray(friedrichs(u, self.k, "right"))

    def step(self, u: HorizontalField) -> StepResult:
        return step_nsh(u, self.cfg, self.pgrid, self.pi_norm, self.coefficients, self.dense)
