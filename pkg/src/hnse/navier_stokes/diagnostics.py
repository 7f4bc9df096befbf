import math
from dataclasses import dataclass, field
from typing import Optional

import jax.numpy as jnp
import numpy as np

from hnse.constants import RADIUS_FLOOR
from hnse.errors import EstimatorError
from hnse.frequency import Field, sobolev_norm_sq
from hnse.operators import SymbolSpec, apply_symbol

BASE_COLUMNS = ["t", "l2_sq", "grad_l2_sq", "htilde_d_sq"]
TRAILING_COLUMNS = ["radius", "diss_residual", "drift"]


@dataclass
class RadiusFit:
    radius: float
    slope: float
    intercept: float
    bins: list[float] = field(default_factory=list)


def radius_fit(u: Field) -> RadiusFit:
    """
    Least-squares fit of log S(|lambda|) = c - 2 R |lambda|, S being the
    H~^d-weighted mean squared amplitude of the modes at |lambda| (both signs,
    all components). Bins below RADIUS_FLOOR * max S are left out.
    """
    grid = u.grid
    sigma = (1 + grid.eigen_right) ** grid.d * grid.weights
    sigma = jnp.broadcast_to(sigma, grid.field_shape)
    power = jnp.abs(u.coeffs) ** 2 * sigma
    count = 1
    if power.ndim > len(grid.field_shape):
        count = power.shape[0]
        power = power.sum(axis=0)
    axes = tuple(range(2 * grid.d))
    mass = np.asarray(power.sum(axis=axes))
    measure = np.asarray(sigma.sum(axis=axes)) * count
    half = grid.n_lambda // 2
    S = (mass[half:] + mass[:half][::-1]) / (measure[half:] + measure[:half][::-1])
    magnitudes = np.abs(np.asarray(grid.lambda_nodes))[half:]
    if not np.any(S > 0):
        raise EstimatorError("Analyticity radius is undefined for the zero field.")
    usable = S > RADIUS_FLOOR * S.max()
    if usable.sum() < 3:
        raise EstimatorError(
            f"Only {int(usable.sum())} usable |lambda| bins; at least 3 are needed."
        )
    x = magnitudes[usable]
    y = np.log(S[usable])
    slope, intercept = np.polyfit(x, y, 1)
    return RadiusFit(float(max(-slope / 2, 0.0)), float(slope), float(intercept), x.tolist())


def analyticity_radius(u: Field) -> float:
    """Estimate of sup{R >= 0 : e^{R |D_s|} u in H~^d} from the lambda-decay of u."""
    return radius_fit(u).radius


def analytic_norm_sq(u: Field, zeta: float) -> float:
    """||e^{zeta |D_s|} u||^2 in H~^d."""
    weighted = apply_symbol(u, SymbolSpec("exp_abs_ds", zeta=zeta))
    return float(sobolev_norm_sq(weighted, "right_hom", u.grid.d))


def gradient_htilde_sq(u: Field) -> float:
    """||grad_H u||^2 in H~^d."""
    return float(sobolev_norm_sq(u, "mixed_hom", 1.0, u.grid.d))


def sigma_column(sigma: float) -> str:
    return f"analytic_sigma_{float(sigma)!r}"


class TimeSeries:
    """
    Per-step diagnostics. The leading and trailing columns are fixed; problem
    specific columns are appended after them.
    """

    def __init__(self, sigma_list: list[float], extra_columns: Optional[list[str]] = None):
        self.sigma_list = list(sigma_list)
        self.columns = (
            BASE_COLUMNS
            + [sigma_column(s) for s in self.sigma_list]
            + TRAILING_COLUMNS
            + list(extra_columns or [])
        )
        self.rows: list[list[float]] = []

    def __len__(self) -> int:
        return len(self.rows)

    def append(self, record: dict[str, float]):
        missing = [c for c in self.columns if c not in record]
        if missing:
            raise ValueError(f"Record is missing columns {missing}.")
        if self.rows and not record["t"] > self.rows[-1][0]:
            raise ValueError("TimeSeries times must be strictly increasing.")
        self.rows.append([float(record[c]) for c in self.columns])

    def column(self, name: str) -> np.ndarray:
        index = self.columns.index(name)
        return np.array([row[index] for row in self.rows])

    def last(self, name: str) -> float:
        return self.rows[-1][self.columns.index(name)]

    def to_csv(self, path: str):
        np.savetxt(
            path,
            np.array(self.rows, dtype=np.float64).reshape(len(self.rows), len(self.columns)),
            delimiter=",",
            header=",".join(self.columns),
            comments="",
            fmt="%.17g",
        )

    def as_dict(self) -> dict[str, list[float]]:
        return {c: self.column(c).tolist() for c in self.columns}


def state_record(
    u: Field,
    t: float,
    sigma_list: list[float],
    initial_energy: float,
    dissipated: float,
    drift: float,
) -> dict[str, float]:
    d = u.grid.d
    energy = float(sobolev_norm_sq(u, "left_hom"))
    record = {
        "t": t,
        "l2_sq": energy,
        "grad_l2_sq": float(sobolev_norm_sq(u, "left_hom", 1.0)),
        "htilde_d_sq": float(sobolev_norm_sq(u, "right_hom", d)),
        "drift": drift,
    }
    for sigma in sigma_list:
        record[sigma_column(sigma)] = analytic_norm_sq(u, sigma * t)
    try:
        record["radius"] = analyticity_radius(u)
    except EstimatorError:
        record["radius"] = math.nan
    if initial_energy > 0:
        record["diss_residual"] = abs(energy + dissipated - initial_energy) / initial_energy
    else:
        record["diss_residual"] = 0.0
    return record


def gronwall_fit(
    divergence: np.ndarray, dissipation: np.ndarray, slack: float = 0.05
) -> dict[str, float | bool]:
    """
    Gronwall-form constant of a twin run, D the twin divergence and A the
    accumulated dissipation. c_hat = max log(D(t) / D(0)) / A(t) over A > 0 is
    the smallest C with D(t) <= D(0) e^{C A(t)}; c_fit and r_squared describe
    the least-squares line log(D / D(0)) ~ C A through the origin. The bound
    is checked with (1 + slack) at every time and at the final time.
    """
    divergence = np.asarray(divergence, dtype=np.float64)
    dissipation = np.asarray(dissipation, dtype=np.float64)
    log_ratio = np.log(divergence / divergence[0])
    used = dissipation > 0
    x, y = dissipation[used], log_ratio[used]
    if x.size == 0:
        raise EstimatorError("No accumulated dissipation to fit against.")
    if not np.all(np.isfinite(y)):
        raise EstimatorError("Twin divergence is not finite and positive.")
    c_hat = float(np.max(y / x))
    c_fit = float(np.dot(x, y) / np.dot(x, x))
    residual = y - c_fit * x
    total = np.sum((y - y.mean()) ** 2)
    r_squared = float(1 - np.sum(residual**2) / total) if total > 0 else 1.0
    bound = c_hat * dissipation + math.log1p(slack)
    holds = bool(np.all(log_ratio <= bound) and log_ratio[-1] <= bound[-1])
    return {"c_hat": c_hat, "c_fit": c_fit, "r_squared": r_squared, "bound_holds": holds}
