from __future__ import annotations

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.BayesNet.models import PathDistribution
from src.constants import Method
from src.QState.models import frozen_array

NO_ACCEPTED_SHOTS = "NoAcceptedShots"
UNCOVERED_EIGENSTATE = "UncoveredEigenstate"


class ShotReport(BaseModel):
    """Outcome of a simulated run of the two-stage postselection protocol"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    fingerprint: str
    seed: int = Field(ge=0)
    shots_requested: int = Field(ge=1)
    accepted: int = Field(ge=0)
    acceptance_rate: float
    counts: np.ndarray
    estimates: np.ndarray
    std_errors: np.ndarray
    stage1_frequencies: np.ndarray
    accepted_by_eigenstate: np.ndarray
    flags: Tuple[str, ...] = ()

    @field_validator("counts", "accepted_by_eigenstate", mode="before")
    @classmethod
    def _integer_arrays(cls, value) -> np.ndarray:
        return frozen_array(value, dtype=np.int64)

    @field_validator("estimates", "std_errors", "stage1_frequencies", mode="before")
    @classmethod
    def _real_arrays(cls, value) -> np.ndarray:
        return frozen_array(value, dtype=np.float64)

    @property
    def no_accepted_shots(self) -> bool:
        return NO_ACCEPTED_SHOTS in self.flags

    def paths(self):
        yield from np.ndindex(*self.counts.shape)

    def to_distribution(self) -> PathDistribution:
        return PathDistribution.from_array(
            fingerprint=self.fingerprint,
            probabilities=self.estimates,
            method=Method.SAMPLED,
            times=range(self.counts.ndim),
            warnings=self.flags,
        )


class ConvergenceRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    shots: int
    max_abs_error: float = Field(ge=0)
    rms_error: float = Field(ge=0)
    acceptance_rate: float
