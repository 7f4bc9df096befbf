import os
from typing import Callable, Optional

import numpy as np
from tqdm import tqdm

from hnse.base import Stepper, StepResult
from hnse.errors import NumericalAbort
from hnse.frequency import HorizontalField, sobolev_norm_sq
from hnse.io import save_field
from hnse.navier_stokes.diagnostics import TimeSeries, gradient_htilde_sq, state_record
from hnse.navier_stokes.stepper import dissipation_increment

Observable = Callable[[HorizontalField, float], float]


class Solver(object):
    """
    Time loop around a stepper. Every step is followed by a TimeSeries record;
    the first record is the prepared initial data at t = 0.

    With a twin, a second trajectory is advanced by the same stepper and the
    columns twin_div_sq and twin_diss_integral are recorded.
    """

    stepper: Stepper
    sigma_list: list[float]
    observables: dict[str, Observable]

    # Accumulated int ||grad_H u||^2_{H~^d} dt at every recorded time
    htilde_dissipation: list[float]
    # Final state of the twin trajectory of the last run, None without a twin
    final_twin: Optional[HorizontalField]

    def __init__(
        self,
        stepper: Stepper,
        sigma_list: list[float],
        observables: Optional[dict[str, Observable]] = None,
        dump_dir: Optional[str] = None,
        progress: bool = True,
    ):
        self.stepper = stepper
        self.sigma_list = list(sigma_list)
        self.observables = dict(observables or {})
        self.dump_dir = dump_dir
        self.progress = progress
        self.htilde_dissipation = []
        self.final_twin = None

    def _columns(self, twin: bool) -> list[str]:
        columns = list(self.observables)
        if twin:
            columns += ["twin_div_sq", "twin_diss_integral"]
        return columns

    def _dump(self, u: HorizontalField) -> Optional[str]:
        if self.dump_dir is None:
            return None
        os.makedirs(self.dump_dir, exist_ok=True)
        path = os.path.join(self.dump_dir, "abort_state.hnse")
        save_field(u, path)
        return path

    def _advance(self, u: HorizontalField, t: float) -> StepResult:
        try:
            return self.stepper.step(u)
        except NumericalAbort as error:
            path = self._dump(u)
            raise NumericalAbort(f"{error} (t = {t:.6g})", dump_path=path) from error

    def run(
        self,
        u0: HorizontalField,
        T: float,
        twin: Optional[HorizontalField] = None,
        callback: Optional[Callable[[float, HorizontalField, StepResult], None]] = None,
    ) -> tuple[HorizontalField, TimeSeries]:
        """
        Advance u0 up to time T in round(T / dt) steps.

        Returns the final state and the recorded TimeSeries.
        """
        assert T > 0, "T must be positive."
        dt = self.stepper.dt
        n_steps = max(int(round(T / dt)), 1)
        series = TimeSeries(self.sigma_list, self._columns(twin is not None))

        u = self.stepper.prepare(u0)
        v = self.stepper.prepare(twin) if twin is not None else None
        initial_energy = float(sobolev_norm_sq(u, "left_hom"))
        dissipated = 0.0
        gradient = gradient_htilde_sq(u)
        self.htilde_dissipation = [0.0]
        twin_gradient = gradient_htilde_sq(v) if v is not None else 0.0
        twin_integral = 0.0

        def record(t: float, drift: float):
            row = state_record(u, t, self.sigma_list, initial_energy, dissipated, drift)
            for name, observable in self.observables.items():
                row[name] = observable(u, t)
            if v is not None:
                row["twin_div_sq"] = float(sobolev_norm_sq(u - v, "right_hom", u.grid.d))
                row["twin_diss_integral"] = twin_integral
            series.append(row)

        record(0.0, 0.0)
        for step in tqdm(range(n_steps), desc="Time stepping", disable=not self.progress):
            t = (step + 1) * dt
            result = self._advance(u, t - dt)
            if result.dissipation is not None:
                dissipated += result.dissipation
            else:
                dissipated += float(dissipation_increment(u, result.u, dt))
            u = result.u
            previous, gradient = gradient, gradient_htilde_sq(u)
            self.htilde_dissipation.append(
                self.htilde_dissipation[-1] + 0.5 * dt * (previous + gradient)
            )
            if v is not None:
                v = self._advance(v, t - dt).u
                previous_twin, twin_gradient = twin_gradient, gradient_htilde_sq(v)
                twin_integral += 0.5 * dt * (previous + gradient + previous_twin + twin_gradient)
            record(t, result.drift)
            if callback is not None:
                callback(t, u, result)
        self.final_twin = v
        return u, series

    @property
    def htilde_dissipation_array(self) -> np.ndarray:
        return np.array(self.htilde_dissipation)
