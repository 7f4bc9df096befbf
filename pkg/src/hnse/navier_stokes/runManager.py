import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Optional, Union

import jax
import jax.numpy as jnp
import numpy as np
import yaml
from jaxlib.xla_extension import ArrayImpl
from jaxtyping import PRNGKeyArray

from hnse.base import RunManager, Stepper
from hnse.constants import SMALL_DATA_AMPLITUDE
from hnse.frequency import (
    FrequencyGrid,
    HorizontalField,
    lambda_index,
    make_grid,
    random_field,
    sobolev_norm_sq,
)
from hnse.io import save_field
from hnse.navier_stokes.diagnostics import TimeSeries, gronwall_fit, radius_fit
from hnse.navier_stokes.stepper import (
    HeatStepper,
    NSHStepper,
    StepperConfig,
    StokesStepper,
)
from hnse.operators import SymbolSpec, apply_symbol
from hnse.projection import covering_index, friedrichs, leray, pi_h_norm_proxy
from hnse.solver import Solver
from hnse.transform import PhysicalGrid, make_physical_grid


def jaxarray_representer(dumper: yaml.Dumper, data: ArrayImpl):
    return dumper.represent_list(data.tolist())


yaml.add_representer(ArrayImpl, jaxarray_representer)  # type: ignore

TWIN_PERTURBATION = 1e-3


def _normalize(u: HorizontalField, amplitude: float) -> HorizontalField:
    norm = math.sqrt(float(sobolev_norm_sq(u, "right_hom", u.grid.d)))
    if norm == 0.0:
        raise ValueError("Initial data vanishes after projection.")
    return u * (amplitude / norm)


def leray_random(
    key: PRNGKeyArray,
    grid: FrequencyGrid,
    k: int,
    amplitude: float = SMALL_DATA_AMPLITUDE,
    margin: int = 3,
    decay: float = 0.0,
    **kwargs,
) -> HorizontalField:
    """P J~_k of a random real interior field, scaled to ||u_0||_{H~^d} = amplitude."""
    coeffs = random_field(key, grid, margin=margin, decay=decay, leading_shape=(2 * grid.d,))
    u = leray(friedrichs(HorizontalField(grid, coeffs), k, "right"))
    return _normalize(u, amplitude)


def gauss_mode(
    key: PRNGKeyArray,
    grid: FrequencyGrid,
    k: int,
    amplitude: float = SMALL_DATA_AMPLITUDE,
    **kwargs,
) -> HorizontalField:
    """
    A few Gaussian-type modes at the smallest |lambda|: (0, 0) in the first
    X-direction and (0, e_1) in the first Xi-direction, both signs of lambda.
    """
    d = grid.d
    positive = lambda_index(grid, grid.min_abs_lambda)
    negative = lambda_index(grid, -grid.min_abs_lambda)
    zero = (0,) * d
    first = (min(1, grid.M),) + (0,) * (d - 1)
    coeffs = jnp.zeros((2 * d,) + grid.field_shape, dtype=jnp.complex128)
    for lam_index in (positive, negative):
        coeffs = coeffs.at[(0,) + zero + zero + (lam_index,)].set(1.0)
        coeffs = coeffs.at[(d,) + zero + first + (lam_index,)].set(0.5)
    u = leray(friedrichs(HorizontalField(grid, coeffs), k, "right"))
    return _normalize(u, amplitude)


initial_data_presets = {
    "leray_random": leray_random,
    "gauss_mode": gauss_mode,
}

# problem -> (needs a physical grid, stepper kind)
problem_presets = {
    "verify": (False, None),
    "heat": (False, "heat"),
    "stokes": (False, "stokes"),
    "nsh": (True, "nsh"),
    "nsh_twin": (True, "nsh"),
    "dothd_ramp": (True, "nsh"),
}


@dataclass
class HeisenbergRun:
    problem: str
    seed: int = 0
    path: str = "./experiment"
    sigma_list: list[float] = field(default_factory=lambda: [2.0])
    delta_ramp: dict[str, float] = field(
        default_factory=lambda: {"a": 0.0, "delta1": 1.0}
    )
    grid: dict[str, Union[str, float, int, bool, None]] = field(
        default_factory=lambda: {
            "d": 1,
            "M": 4,
            "mode": "uniform_periodic",
            "s_period": 2 * math.pi,
            "n_s": 6,
            "n_y": None,
        }
    )
    stepper: dict[str, Union[str, float, int, bool, None]] = field(
        default_factory=lambda: {
            "dt": 1e-3,
            "T": 0.1,
            "scheme": "etd_rk2",
            "k": None,
            "dealias": True,
            "cfl_guard": 0.5,
            "cfl_norm": "bound",
        }
    )
    init: dict[str, Union[str, float, int]] = field(
        default_factory=lambda: {
            "preset": "leray_random",
            "amplitude": SMALL_DATA_AMPLITUDE,
            "margin": 2,
            "decay": 0.0,
        }
    )
    output: dict[str, Union[str, bool]] = field(
        default_factory=lambda: {
            "csv": "series.csv",
            "summary": "summary.json",
            "state": "final.hnse",
            "progress": False,
        }
    )


class HeisenbergRunManager(RunManager):
    run: HeisenbergRun
    grid: FrequencyGrid
    pgrid: Optional[PhysicalGrid]
    stepper: Optional[Stepper]

    @property
    def problem(self) -> str:
        return self.run.problem

    @property
    def d(self) -> int:
        return int(self.run.grid["d"])  # type: ignore

    def __init__(self, **kwargs):
        if "run" in kwargs:
            print("Run instance provided. Loading from instance.")
            self.run = kwargs["run"]
        elif "path" in kwargs:
            print("Run instance not provided. Loading from path.")
            self.run = self.load_from_path(kwargs["path"])
        else:
            print("Neither run instance nor path provided.")
            raise ValueError("Either a run or a path is required.")
        if kwargs.get("out") is not None:
            self.run.path = kwargs["out"]

        self.validate()
        self.key = jax.random.PRNGKey(self.run.seed)
        self.grid = self.initialize_grid()
        self.pgrid = None
        self.stepper = None
        self.suite_results = []
        if self.problem == "verify":
            return
        self.pgrid = self.initialize_physical_grid()
        self.stepper = self.initialize_stepper()

    def validate(self):
        assert self.problem in problem_presets, f"Problem {self.problem} not recognized."
        upper = 4 * self.d
        for sigma in self.run.sigma_list:
            assert 0 < sigma < upper, f"sigma = {sigma} must lie in (0, {upper})."
        assert self.run.init["amplitude"] > 0, "Amplitude must be positive."  # type: ignore
        assert self.run.init["preset"] in initial_data_presets, (
            f"Initial data preset {self.run.init['preset']} not recognized."
        )
        assert self.run.stepper["T"] > 0, "T must be positive."  # type: ignore
        assert self.run.delta_ramp["delta1"] < upper, (
            f"delta1 = {self.run.delta_ramp['delta1']} must be below {upper}."
        )

    def save(self, path: str):
        output_dict = asdict(self.run)
        with open(path + ".yaml", "w") as f:
            yaml.dump(output_dict, f, sort_keys=False)

    def load_from_path(self, path: str) -> HeisenbergRun:
        with open(path, "r") as f:
            data = yaml.safe_load(f)
        return HeisenbergRun(**data)

    ### Initialization functions ###

    def initialize_grid(self) -> FrequencyGrid:
        print("Initializing frequency grid.")
        params = {
            key: value
            for key, value in self.run.grid.items()
            if key not in ("d", "M", "mode", "n_y") and value is not None
        }
        return make_grid(self.d, int(self.run.grid["M"]), self.run.grid["mode"], **params)  # type: ignore

    def initialize_physical_grid(self) -> Optional[PhysicalGrid]:
        needs_products, _ = problem_presets[self.problem]
        if not needs_products:
            return None
        print("Initializing physical grid.")
        return make_physical_grid(
            self.grid,
            n_y=self.run.grid.get("n_y"),  # type: ignore
            dealias=bool(self.run.stepper.get("dealias", True)),
        )

    def initialize_config(self) -> StepperConfig:
        stepper = self.run.stepper
        return StepperConfig(
            dt=float(stepper["dt"]),  # type: ignore
            scheme=stepper.get("scheme", "etd_rk2"),  # type: ignore
            k=stepper.get("k"),  # type: ignore
            dealias=bool(stepper.get("dealias", True)),
            cfl_guard=float(stepper.get("cfl_guard", 0.5)),  # type: ignore
            n_roots=int(stepper.get("n_roots", 16)),  # type: ignore
        )

    def initialize_pi_norm(self) -> Optional[float]:
        cfl_norm = self.run.stepper.get("cfl_norm", "bound")
        if cfl_norm == "bound":
            return None
        assert cfl_norm == "proxy", f"CFL norm {cfl_norm} not recognized."
        self.key, subkey = jax.random.split(self.key)
        return pi_h_norm_proxy(self.grid, subkey)

    def initialize_stepper(self) -> Stepper:
        print("Initializing stepper.")
        _, kind = problem_presets[self.problem]
        if kind == "heat":
            return HeatStepper(self.grid, float(self.run.stepper["dt"]))  # type: ignore
        cfg = self.initialize_config()
        pi_norm = self.initialize_pi_norm()
        if kind == "stokes":
            return StokesStepper(self.grid, cfg, pi_norm=pi_norm)
        assert self.pgrid is not None
        return NSHStepper(self.grid, cfg, self.pgrid, pi_norm=pi_norm)

    def initialize_data(self) -> HorizontalField:
        print("Initializing initial data.")
        k = self.run.stepper.get("k")
        k = covering_index(self.grid) if k is None else int(k)  # type: ignore
        init = dict(self.run.init)
        preset = init.pop("preset")
        self.key, subkey = jax.random.split(self.key)
        return initial_data_presets[preset](subkey, self.grid, k, **init)  # type: ignore

    def initialize_twin(self, u0: HorizontalField) -> HorizontalField:
        """u0 with one random occupied interior mode multiplied by 1 + 1e-3."""
        magnitude = np.abs(np.asarray(u0.coeffs))
        half = self.grid.n_lambda // 2
        occupied = np.argwhere(magnitude[..., half:] > 1e-3 * magnitude.max())
        self.key, subkey = jax.random.split(self.key)
        choice = tuple(occupied[int(jax.random.randint(subkey, (), 0, len(occupied)))])
        component, index, lam = choice[0], choice[1:-1], choice[-1] + half
        mirror = self.grid.n_lambda - 1 - lam
        factor = 1 + TWIN_PERTURBATION
        coeffs = u0.coeffs.at[(component,) + index + (lam,)].multiply(factor)
        coeffs = coeffs.at[(component,) + index + (mirror,)].multiply(factor)
        return u0.with_coeffs(coeffs)

    def initialize_observables(self) -> dict:
        if self.problem != "dothd_ramp":
            return {}
        a = float(self.run.delta_ramp["a"])
        delta1 = float(self.run.delta_ramp["delta1"])

        def dothd_ramp_sq(u: HorizontalField, t: float) -> float:
            weighted = apply_symbol(u, SymbolSpec("exp_abs_ds", zeta=a + delta1 * t))
            return float(sobolev_norm_sq(weighted, "left_hom", u.grid.d))

        return {"dothd_ramp_sq": dothd_ramp_sq}

    ### Running ###

    def output_path(self, name: str) -> str:
        return os.path.join(self.run.path, str(self.run.output[name]))

    def run_verify(self) -> None:
        from hnse.verify import run_suites

        self.suite_results = run_suites()
        summary = {
            "problem": "verify",
            "passed": all(result.passed for result in self.suite_results),
            "suites": {result.name: result.as_dict() for result in self.suite_results},
        }
        self.write_summary(summary)
        return None

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.suite_results)

    def execute(self) -> Optional[TimeSeries]:
        """
        Run the configured problem and write the CSV, the JSON summary and the
        final state under run.path.
        """
        os.makedirs(self.run.path, exist_ok=True)
        if self.problem == "verify":
            return self.run_verify()
        assert self.stepper is not None
        u0 = self.stepper.prepare(self.initialize_data())
        twin = self.initialize_twin(u0) if self.problem == "nsh_twin" else None
        solver = Solver(
            self.stepper,
            self.run.sigma_list,
            observables=self.initialize_observables(),
            dump_dir=self.run.path,
            progress=bool(self.run.output.get("progress", False)),
        )
        u, series = solver.run(u0, float(self.run.stepper["T"]), twin=twin)  # type: ignore
        self.final_state = u
        self.solver = solver
        print("Writing outputs.")
        series.to_csv(self.output_path("csv"))
        save_field(u, self.output_path("state"))
        self.write_summary(self.summarize(u0, u, series, solver))
        return series

    def summarize(
        self, u0: HorizontalField, u: HorizontalField, series: TimeSeries, solver: Solver
    ) -> dict:
        d = self.d
        initial_htilde = float(sobolev_norm_sq(u0, "right_hom", d))
        summary: dict = {
            "problem": self.problem,
            "seed": self.run.seed,
            "steps": len(series) - 1,
            "final_time": series.last("t"),
            "friedrichs_index": getattr(self.stepper, "k", None),
            "max_diss_residual": float(np.max(series.column("diss_residual"))),
            "max_drift": float(np.max(series.column("drift"))),
            "htilde_energy_ratio": float(
                np.max(
                    (series.column("htilde_d_sq") + solver.htilde_dissipation_array)
                    / initial_htilde
                )
            ),
        }
        for sigma in self.run.sigma_list:
            column = f"analytic_sigma_{float(sigma)!r}"
            summary[f"{column}_max_ratio"] = float(np.max(series.column(column)) / initial_htilde)
        try:
            fit = radius_fit(u)
            summary["radius_fit"] = asdict(fit)
        except ValueError as error:
            summary["radius_fit"] = {"error": str(error)}
        if self.problem in ("stokes", "nsh", "nsh_twin", "dothd_ramp"):
            self.key, subkey = jax.random.split(self.key)
            summary["pi_h_norm_proxy"] = pi_h_norm_proxy(self.grid, subkey)
        if self.problem == "nsh_twin":
            summary["twin_fit"] = gronwall_fit(
                series.column("twin_div_sq"), series.column("twin_diss_integral")
            )
        return summary

    def write_summary(self, summary: dict):
        with open(self.output_path("summary"), "w") as f:
            json.dump(summary, f, indent=2)
