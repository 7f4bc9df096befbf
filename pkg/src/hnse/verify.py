import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Callable, Optional

import jax
import jax.numpy as jnp
import numpy as np

from hnse.constants import plancherel_constant
from hnse.frequency import (
    Field,
    HorizontalField,
    SpectralField,
    dilate,
    inner_product,
    lambda_index,
    make_grid,
    random_horizontal_field,
    random_spectral_field,
    sobolev_norm_sq,
)
from hnse.navier_stokes.diagnostics import analyticity_radius, gronwall_fit
from hnse.navier_stokes.nonlinear import convect, m_zeta
from hnse.navier_stokes.runManager import leray_random
from hnse.navier_stokes.stepper import (
    HeatStepper,
    NSHStepper,
    StepperConfig,
    StokesStepper,
    step_heat,
)
from hnse.operators import (
    LadderSpec,
    SymbolSpec,
    apply_ladder,
    apply_symbol,
    commutator,
    divergence_h,
    gradient_h,
    partial_s,
    sublaplacian,
)
from hnse.projection import (
    covering_index,
    divergence_residual,
    friedrichs,
    leray,
    pi_h,
    pi_h_ds,
)
from hnse.solver import Solver
from hnse.transform import (
    PhysicalGrid,
    forward,
    inverse,
    make_physical_grid,
    physical_inner_product,
    physical_lp_norm,
    s_multiplier,
    sample_function,
    vector_field_derivative,
    vertical_lift,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    residuals: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "residuals": self.residuals}


def _relative(a: Field, b: Field) -> float:
    scale = math.sqrt(float(sobolev_norm_sq(b, "left_hom")))
    difference = math.sqrt(float(sobolev_norm_sq(a - b, "left_hom")))
    return difference / scale if scale > 0 else difference


def _finish(name: str, residuals: dict[str, float], tolerances: dict[str, float]) -> SuiteResult:
    passed = all(residuals[key] <= tolerances[key] for key in tolerances)
    return SuiteResult(name, bool(passed), {k: float(v) for k, v in residuals.items()})


def _worst(residuals: dict[str, float], key: str, value: float):
    residuals[key] = max(residuals.get(key, 0.0), float(value))


def _keys(seed: int, count: int) -> list:
    return list(jax.random.split(jax.random.PRNGKey(seed), count))


X1, XI1 = LadderSpec("X", 1), LadderSpec("Xi", 1)
X1_TILDE, XI1_TILDE = LadderSpec("X_tilde", 1), LadderSpec("Xi_tilde", 1)


def _commutator_residuals(f: SpectralField, residuals: dict[str, float]):
    ds = partial_s(f)
    scale = math.sqrt(float(sobolev_norm_sq(ds, "left_hom")))
    _worst(residuals, "X_Xi", _relative(commutator(f, X1, XI1), ds * -4.0))
    _worst(residuals, "X_tilde_Xi_tilde", _relative(commutator(f, X1_TILDE, XI1_TILDE), ds * 4.0))
    for key, (A, B) in {"X_X_tilde": (X1, X1_TILDE), "X_Xi_tilde": (X1, XI1_TILDE)}.items():
        value = math.sqrt(float(sobolev_norm_sq(commutator(f, A, B), "left_hom")))
        _worst(residuals, key, value / scale)


def commutators_suite(seed: int = 0, n_fields: int = 5) -> SuiteResult:
    grid = make_grid(1, 6, "uniform_periodic", n_s=8)
    residuals: dict[str, float] = {}
    for key in _keys(seed, n_fields):
        _commutator_residuals(random_spectral_field(key, grid, margin=2), residuals)
    return _finish("commutators", residuals, {key: 1e-10 for key in residuals})


def algebra_suite(seed: int = 0, n_fields: int = 100) -> SuiteResult:
    """Commutators, Leray and Friedrichs identities on random interior fields."""
    grid = make_grid(1, 6, "uniform_periodic", n_s=8)
    k = covering_index(grid)
    residuals: dict[str, float] = {}
    for key in _keys(seed, n_fields):
        key_f, key_u = jax.random.split(key)
        f = random_spectral_field(key_f, grid, margin=2)
        u = random_horizontal_field(key_u, grid, margin=2)
        _commutator_residuals(f, residuals)
        _worst(residuals, "sublaplacian_div_grad", _relative(divergence_h(gradient_h(f)), sublaplacian(f)))
        Pu = leray(u)
        _worst(residuals, "leray_idempotent", _relative(leray(Pu), Pu))
        _worst(residuals, "div_leray", divergence_residual(Pu))
        grad = gradient_h(f)
        _worst(
            residuals,
            "leray_grad",
            math.sqrt(float(sobolev_norm_sq(leray(grad), "left_hom") / sobolev_norm_sq(grad, "left_hom"))),
        )
        for name, op in {
            "leray_X_tilde": lambda v: apply_ladder(v, X1_TILDE),
            "leray_exp_ds": lambda v: apply_symbol(v, SymbolSpec("exp_abs_ds", zeta=0.5)),
        }.items():
            _worst(residuals, name, _relative(leray(op(u)), op(leray(u))))
        for j in sorted({0, k // 2, k}):
            Ju = friedrichs(u, j, "bi")
            ratio = float(sobolev_norm_sq(Ju, "left_hom") / sobolev_norm_sq(u, "left_hom"))
            _worst(residuals, "friedrichs_contraction", ratio - 1.0)
            _worst(residuals, "friedrichs_idempotent", _relative(friedrichs(Ju, j, "bi"), Ju))
            _worst(residuals, "friedrichs_bi_right", _relative(friedrichs(friedrichs(u, j, "right"), j, "bi"), Ju))
    # witness: P and J_k do not commute for some k below the covering index
    witness = 0.0
    u = random_horizontal_field(jax.random.PRNGKey(seed + 1), grid, margin=2)
    for j in range(k):
        gap = leray(friedrichs(u, j, "bi")) - friedrichs(leray(u), j, "bi")
        witness = max(witness, math.sqrt(float(sobolev_norm_sq(gap, "left_hom") / sobolev_norm_sq(u, "left_hom"))))
    residuals["leray_friedrichs_witness"] = witness
    tolerances = {key: 1e-10 for key in residuals if key != "leray_friedrichs_witness"}
    result = _finish("algebra", residuals, tolerances)
    result.passed = result.passed and witness > 1e-3
    return result


def key_identity_suite(seed: int = 0, n_fields: int = 50) -> SuiteResult:
    """(Id - P)(-Delta_H v) = Pi_H d_s v on divergence-free interior v."""
    grid = make_grid(1, 6, "uniform_periodic", n_s=8)
    residuals: dict[str, float] = {}
    for key in _keys(seed, n_fields):
        v = leray(random_horizontal_field(key, grid, margin=3))
        _worst(residuals, "key_identity", _relative(pi_h_ds(v), pi_h(partial_s(v))))
    return _finish("key_identity", residuals, {"key_identity": 1e-8})


def transform_grid() -> PhysicalGrid:
    return make_physical_grid(make_grid(1, 3, "uniform_periodic", n_s=4))


def transform_suite(seed: int = 0, n_pairs: int = 10, pgrid: Optional[PhysicalGrid] = None) -> SuiteResult:
    """Plancherel, round trip, vertical multiplier, the Gaussian oracle and the horizontal chain rule."""
    pgrid = transform_grid() if pgrid is None else pgrid
    grid = pgrid.fgrid
    residuals: dict[str, float] = {}
    constant = plancherel_constant(grid.d)
    for key in _keys(seed, n_pairs):
        key_f, key_g = jax.random.split(key)
        F = random_spectral_field(key_f, grid, margin=0)
        G = random_spectral_field(key_g, grid, margin=0)
        f, g = inverse(F, pgrid), inverse(G, pgrid)
        spectral = inner_product(F, G)
        physical = constant * physical_inner_product(f, g)
        scale = math.sqrt(float(sobolev_norm_sq(F, "left_hom") * sobolev_norm_sq(G, "left_hom")))
        _worst(residuals, "plancherel", abs(complex(physical - spectral)) / scale)
        _worst(residuals, "round_trip", _relative(forward(f, grid), F))
        zeta = 0.3
        lifted = inverse(apply_symbol(F, SymbolSpec("exp_abs_ds", zeta=zeta)), pgrid)
        multiplied = s_multiplier(f, lambda lam: jnp.exp(zeta * jnp.abs(lam)))
        scale = float(physical_lp_norm(lifted))
        _worst(residuals, "vertical_multiplier", float(physical_lp_norm(lifted.with_samples(lifted.samples - multiplied.samples))) / scale)
    lam0 = grid.min_abs_lambda
    gaussian = sample_function(
        lambda Y, s: jnp.exp(-lam0 * jnp.sum(Y**2, axis=-1) + 1j * lam0 * s), pgrid
    )
    value = forward(gaussian, grid).coeffs[(0,) * (2 * grid.d) + (lambda_index(grid, lam0),)]
    expected = grid.s_period * (math.pi / (2 * lam0)) ** grid.d
    residuals["gaussian_oracle"] = abs(complex(value) - expected) / expected
    residuals["vertical_lift"] = _horizontal_chain_rule(pgrid, lam0, seed)
    tolerances = {
        "plancherel": 1e-6,
        "round_trip": 1e-7,
        "vertical_multiplier": 1e-7,
        "gaussian_oracle": 1e-7,
        "vertical_lift": 1e-10,
    }
    return _finish("transform", residuals, tolerances)


def _horizontal_chain_rule(pgrid: PhysicalGrid, lam0: float, seed: int) -> float:
    """
    sum_j v_j X_j f + v_{j+d} Xi_j f = v . grad_Y f + lift(v) d_s f for the
    Gaussian f = exp(-lam0 |Y|^2 + i lam0 s) and a random horizontal v.
    """
    d = pgrid.d

    def fn(Y, s):
        return jnp.exp(-lam0 * jnp.sum(Y**2, axis=-1) + 1j * lam0 * s)

    f = sample_function(fn, pgrid)
    field = random_horizontal_field(jax.random.PRNGKey(seed), pgrid.fgrid)
    v = [inverse(component, pgrid) for component in field.components()]
    Y, _ = pgrid.coordinates()
    lhs = sum(
        v[j].samples * sample_function(vector_field_derivative(fn, "X", j + 1), pgrid).samples
        + v[d + j].samples * sample_function(vector_field_derivative(fn, "Xi", j + 1), pgrid).samples
        for j in range(d)
    )
    euclidean = sum(v[k].samples * (-2 * lam0 * Y[..., k]) for k in range(2 * d)) * f.samples
    rhs = euclidean + vertical_lift(v).samples * 1j * lam0 * f.samples
    return float(jnp.max(jnp.abs(lhs - rhs)) / jnp.max(jnp.abs(lhs)))


def spectral_gap_suite(seed: int = 0, n_fields: int = 20) -> SuiteResult:
    """||D_s|^{1/2} f|| <= (4d)^{-1/2} ||f||_{H^1}, equality on m = 0 (left) and n = 0 (right)."""
    residuals: dict[str, float] = {"left_excess": 0.0, "right_excess": 0.0}
    for grid in (make_grid(1, 6, "uniform_periodic", n_s=8), make_grid(1, 6, "geometric", lambda0=0.25, ratio=2.0, count=6)):
        d = grid.d
        for key in _keys(seed, n_fields):
            f = random_spectral_field(key, grid, margin=0, real=False)
            vertical = float(jnp.sum(grid.abs_lambda * jnp.abs(f.coeffs) ** 2 * grid.weights))
            left = float(sobolev_norm_sq(f, "left_hom", 1.0)) / (4 * d)
            right = float(sobolev_norm_sq(f, "right_hom", 1.0)) / (4 * d)
            _worst(residuals, "left_excess", (vertical - left) / left)
            _worst(residuals, "right_excess", (vertical - right) / right)
            lowest_m = f.coeffs * (np.indices(grid.index_shape)[d:].sum(axis=0) == 0)[..., None]
            lowest_n = f.coeffs * (np.indices(grid.index_shape)[:d].sum(axis=0) == 0)[..., None]
            for name, coeffs, kind in (("left_equality", lowest_m, "left_hom"), ("right_equality", lowest_n, "right_hom")):
                g = f.with_coeffs(coeffs)
                lhs = float(jnp.sum(grid.abs_lambda * jnp.abs(coeffs) ** 2 * grid.weights))
                rhs = float(sobolev_norm_sq(g, kind, 1.0)) / (4 * d)
                _worst(residuals, name, abs(lhs - rhs) / rhs)
    tolerances = {"left_excess": 1e-12, "right_excess": 1e-12, "left_equality": 1e-10, "right_equality": 1e-10}
    return _finish("spectral_gap", residuals, tolerances)


def scaling_suite(seed: int = 0, n_fields: int = 10) -> SuiteResult:
    """Homogeneity of Sobolev norms and ladders under dilation on a geometric grid."""
    grid = make_grid(1, 5, "geometric", lambda0=0.125, ratio=2.0, count=8)
    residuals: dict[str, float] = {}
    # |lambda| nodes 2..5 of 8 on each side, so shifts by -2..2 stay in the band
    inner = np.zeros(grid.n_lambda)
    inner[2:6] = 1.0
    inner[10:14] = 1.0
    for key in _keys(seed, n_fields):
        f = random_spectral_field(key, grid, margin=1)
        f = f.with_coeffs(f.coeffs * inner)
        for p in (-2, 1, 2):
            mu = grid.ratio ** (p / 2)
            g = dilate(f, p)
            for ell in (0.0, 1.0, 2.0):
                expected = mu ** (ell - grid.Q / 2) * math.sqrt(float(sobolev_norm_sq(f, "left_hom", ell)))
                actual = math.sqrt(float(sobolev_norm_sq(g, "left_hom", ell)))
                _worst(residuals, "norm_homogeneity", abs(actual - expected) / expected)
            for ladder in (X1, XI1, X1_TILDE, XI1_TILDE):
                _worst(residuals, "ladder_homogeneity", _relative(apply_ladder(g, ladder), dilate(apply_ladder(f, ladder), p) * mu))
    return _finish("scaling", residuals, {"norm_homogeneity": 1e-10, "ladder_homogeneity": 1e-12})


def heat_suite(seed: int = 0, sigmas: tuple[float, ...] = (1.0, 2.0, 3.5)) -> SuiteResult:
    grid = make_grid(1, 6, "uniform_periodic", n_s=8)
    u = random_horizontal_field(jax.random.PRNGKey(seed), grid, margin=0)
    residuals: dict[str, float] = {}
    residuals["semigroup"] = _relative(step_heat(step_heat(u, 0.03), 0.05), step_heat(u, 0.08))
    residuals["vertical_smoothing"] = 0.0
    for sigma in sigmas:
        exponent = sigma * grid.abs_lambda - grid.eigen_left
        residuals["vertical_smoothing"] = max(residuals["vertical_smoothing"], float(jnp.max(exponent)))
    stepper = HeatStepper(grid, 0.01)
    energy0 = float(sobolev_norm_sq(u, "left_hom"))
    state, dissipated = u, 0.0
    norms = {sigma: [float(sobolev_norm_sq(u, "left_hom"))] for sigma in sigmas}
    for step in range(100):
        result = stepper.step(state)
        dissipated += result.dissipation
        state = result.u
        t = (step + 1) * stepper.dt
        for sigma in sigmas:
            weighted = apply_symbol(state, SymbolSpec("exp_abs_ds", zeta=sigma * t))
            norms[sigma].append(float(sobolev_norm_sq(weighted, "left_hom")))
    residuals["energy_balance"] = abs(float(sobolev_norm_sq(state, "left_hom")) + dissipated - energy0) / energy0
    residuals["analytic_increase"] = max(
        max(float(np.max(np.diff(values))) / values[0], 0.0) for values in norms.values()
    )
    tolerances = {"semigroup": 1e-13, "vertical_smoothing": 0.0, "energy_balance": 1e-10, "analytic_increase": 0.0}
    return _finish("heat", residuals, tolerances)


def _stokes_final(u0: HorizontalField, dt: float, T: float) -> HorizontalField:
    stepper = StokesStepper(u0.grid, StepperConfig(dt=dt))
    u = stepper.prepare(u0)
    for _ in range(int(round(T / dt))):
        u = stepper.step(u).u
    return u


def stokes_suite(
    seed: int = 0,
    M: int = 8,
    n_s: int = 32,
    dt: float = 1e-3,
    T: float = 1.0,
    ladder: tuple[float, float, float] = (2e-3, 1e-3, 5e-4),
    ladder_T: float = 0.1,
) -> SuiteResult:
    """
    Energy identity over a run and ETD-RK2 self-convergence: the differences
    between the final states at the three step sizes of ladder shrink by 4.
    """
    grid = make_grid(1, M, "uniform_periodic", n_s=n_s)
    u0 = leray_random(jax.random.PRNGKey(seed), grid, covering_index(grid), amplitude=1.0, margin=2, decay=0.25)
    solver = Solver(StokesStepper(grid, StepperConfig(dt=dt)), [], progress=False)
    _, series = solver.run(u0, T)
    residuals = {"energy_drift": float(np.max(series.column("diss_residual")))}
    coarse, medium, fine = (_stokes_final(u0, step, ladder_T) for step in ladder)
    ratio = math.sqrt(
        float(sobolev_norm_sq(coarse - medium, "left_hom") / sobolev_norm_sq(medium - fine, "left_hom"))
    )
    residuals["convergence_ratio"] = ratio
    result = _finish("stokes", residuals, {"energy_drift": 1e-4})
    result.passed = result.passed and 3.5 <= ratio <= 4.5
    return result


def nsh_setup(seed: int = 0, M: int = 3, n_s: int = 6, amplitude: float = 0.05):
    grid = make_grid(1, M, "uniform_periodic", n_s=n_s)
    pgrid = make_physical_grid(grid)
    k = covering_index(grid)
    u0 = leray_random(jax.random.PRNGKey(seed), grid, k, amplitude=amplitude, margin=1)
    return grid, pgrid, k, u0


def nsh_suite(seed: int = 0, dt: float = 5e-4, T: float = 1.0, sigma: float = 2.0) -> SuiteResult:
    """Small-data NSH: L^2 monotonicity, H~^d energy bound, orthogonality of the convection term."""
    grid, pgrid, k, u0 = nsh_setup(seed)
    stepper = NSHStepper(grid, StepperConfig(dt=dt, k=k), pgrid)
    orthogonality: list[float] = []

    def check(t: float, u: HorizontalField, result):
        step = int(round(t / dt))
        if step % 10 == 0:
            N = convect(u, k, pgrid)
            pairing = abs(complex(inner_product(N, u)))
            scale = math.sqrt(float(sobolev_norm_sq(N, "left_hom") * sobolev_norm_sq(u, "left_hom")))
            orthogonality.append(pairing / scale if scale > 0 else 0.0)

    solver = Solver(stepper, [sigma], progress=False)
    u, series = solver.run(u0, T, callback=check)
    energy = series.column("l2_sq")
    htilde = series.column("htilde_d_sq")
    residuals = {
        "l2_increase": float(np.max(np.diff(energy) / energy[:-1])),
        "htilde_energy_ratio": float(np.max((htilde + solver.htilde_dissipation_array) / htilde[0])),
        "orthogonality": max(orthogonality) if orthogonality else 0.0,
        "diss_residual": float(np.max(series.column("diss_residual"))),
        "analytic_ratio": float(np.max(series.column(f"analytic_sigma_{float(sigma)!r}")) / htilde[0]),
    }
    tolerances = {
        "l2_increase": 1e-6,
        "htilde_energy_ratio": 2 * (1 + 1e-3),
        "orthogonality": 1e-8,
        "diss_residual": 1e-4,
        "analytic_ratio": 1 + 1e-4,
    }
    return _finish("nsh", residuals, tolerances)


def analytic_suite(seed: int = 0, dt: float = 5e-4, T: float = 1.0, sigma: float = 2.0, radius: float = 0.7) -> SuiteResult:
    """Weighted-norm surrogate of analytic smoothing and recovery of a synthetic radius."""
    grid, pgrid, k, u0 = nsh_setup(seed)
    solver = Solver(NSHStepper(grid, StepperConfig(dt=dt, k=k), pgrid), [sigma], progress=False)
    _, series = solver.run(u0, T)
    column = series.column(f"analytic_sigma_{float(sigma)!r}")
    residuals = {"analytic_excess": float(np.max(column) / column[0] - 1.0)}
    synthetic_grid = make_grid(1, 4, "uniform_periodic", n_s=8)
    coeffs = jnp.broadcast_to(jnp.exp(-radius * synthetic_grid.abs_lambda), synthetic_grid.field_shape)
    estimate = analyticity_radius(HorizontalField(synthetic_grid, jnp.stack([coeffs, coeffs]).astype(jnp.complex128)))
    residuals["radius_error"] = abs(estimate - radius) / radius
    return _finish("analytic", residuals, {"analytic_excess": 1e-4, "radius_error": 0.1})


def m_zeta_suite(zetas: tuple[float, ...] = (0.0, 1.0, 2.0, 5.0, 10.0), pgrid: Optional[PhysicalGrid] = None) -> SuiteResult:
    """||m_zeta(A, B)||_{L^2} / (||A||_{L^4} ||B||_{L^4}) stays within a factor 2 across zeta."""
    pgrid = make_physical_grid(make_grid(1, 3, "uniform_periodic", n_s=6)) if pgrid is None else pgrid
    grid = pgrid.fgrid
    lam = grid.min_abs_lambda
    coeffs = jnp.zeros(grid.field_shape, dtype=jnp.complex128)
    for node, value in ((lam, 1.0), (2 * lam, 0.3)):
        for signed in (node, -node):
            coeffs = coeffs.at[(0, 0, lambda_index(grid, signed))].set(value)
    A = SpectralField(grid, coeffs)
    B = SpectralField(grid, coeffs.at[(1, 0)].set(coeffs[0, 0] * 0.5))
    denominator = float(physical_lp_norm(inverse(A, pgrid), 4) * physical_lp_norm(inverse(B, pgrid), 4))
    ratios = [
        math.sqrt(float(sobolev_norm_sq(m_zeta(A, B, zeta, pgrid), "left_hom"))) / denominator
        for zeta in zetas
    ]
    residuals = {"spread": max(ratios) / min(ratios)}
    return _finish("m_zeta", residuals, {"spread": 2.0})


def stability_suite(seed: int = 0, dt: float = 1e-3, T: float = 0.5) -> SuiteResult:
    """Twin run with one mode perturbed by 1e-3; Gronwall-form fit of the divergence."""
    grid, pgrid, k, u0 = nsh_setup(seed)
    half = grid.n_lambda // 2
    index = (0,) + (1,) * (2 * grid.d)
    factor = 1 + 1e-3
    coeffs = u0.coeffs.at[index + (half,)].multiply(factor).at[index + (half - 1,)].multiply(factor)
    solver = Solver(NSHStepper(grid, StepperConfig(dt=dt, k=k), pgrid), [], progress=False)
    _, series = solver.run(u0, T, twin=u0.with_coeffs(coeffs))
    fit = gronwall_fit(series.column("twin_div_sq"), series.column("twin_diss_integral"))
    residuals = {"c_hat": fit["c_hat"], "c_fit": fit["c_fit"], "r_squared": fit["r_squared"]}
    return SuiteResult("stability", bool(fit["bound_holds"]), residuals)


def determinism_suite(seed: int = 0, dt: float = 5e-3, T: float = 0.05) -> SuiteResult:
    """Two identical runs produce byte-identical CSV."""
    contents = []
    with tempfile.TemporaryDirectory() as directory:
        for attempt in range(2):
            grid, pgrid, k, u0 = nsh_setup(seed)
            solver = Solver(NSHStepper(grid, StepperConfig(dt=dt, k=k), pgrid), [2.0], progress=False)
            _, series = solver.run(u0, T)
            path = os.path.join(directory, f"run_{attempt}.csv")
            series.to_csv(path)
            with open(path, "rb") as file:
                contents.append(file.read())
    identical = contents[0] == contents[1]
    return SuiteResult("determinism", identical, {"identical": float(identical)})


suite_presets: dict[str, Callable[..., SuiteResult]] = {
    "algebra": algebra_suite,
    "key_identity": key_identity_suite,
    "transform": transform_suite,
    "spectral_gap": spectral_gap_suite,
    "scaling": scaling_suite,
    "heat": heat_suite,
    "stokes": stokes_suite,
    "nsh": nsh_suite,
    "analytic": analytic_suite,
    "m_zeta": m_zeta_suite,
    "stability": stability_suite,
    "determinism": determinism_suite,
    "commutators": commutators_suite,
}


def run_suites(names: Optional[list[str]] = None) -> list[SuiteResult]:
    names = list(suite_presets) if names is None else names
    results = []
    for name in names:
        if name not in suite_presets:
            raise ValueError(f"Suite {name} not recognized.")
        print(f"Running suite {name}.")
        result = suite_presets[name]()
        print(f"Suite {name}: {'passed' if result.passed else 'FAILED'}.")
        results.append(result)
    return results
