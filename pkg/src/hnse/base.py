from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

from hnse.frequency import FrequencyGrid, HorizontalField


@dataclass(frozen=True)
class StepResult:
    """
    State after one step, the relative change caused by re-projection and,
    when the stepper provides it, 2 int ||grad_H u||^2 over the step.
    """

    u: HorizontalField
    drift: float = 0.0
    dissipation: Optional[float] = None


class Stepper(ABC):
    """
    Base class for time steppers.

    A stepper advances a horizontal field by a fixed dt. Concrete steppers
    own their precomputed coefficients, so the solver only needs step().
    """

    grid: FrequencyGrid
    dt: float

    @abstractmethod
    def step(self, u: HorizontalField) -> StepResult:
        """
        Advance u by dt.
        """
        raise NotImplementedError

    def prepare(self, u: HorizontalField) -> HorizontalField:
        """
        Bring initial data into the stepper's admissible set.
        """
        return u


class RunManager(ABC):
    """
    Base class for run managers.

    A run manager is a class that help with book keeping for a run.
    It should be able to build the run from its configuration, save the
    configuration and load it back. Individual problems extend this class.

    """

    @abstractmethod
    def save(self, path: str):
        """
        Save the run.
        """
        raise NotImplementedError

    @abstractmethod
    def load_from_path(self, path: str):
        """
        Load the run.
        """
        raise NotImplementedError
