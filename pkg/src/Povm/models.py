from __future__ import annotations

from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.BayesNet.models import Path, PathDistribution
from src.QState.models import ComplexOperator, DensityMatrix, frozen_array


class BroadcastState(BaseModel):
    model_config = ConfigDict(frozen=True)

    copies: int = Field(ge=1)
    state: DensityMatrix


class PovmElement(BaseModel):
    model_config = ConfigDict(frozen=True)

    path: Path
    op: ComplexOperator
    min_eigenvalue: float


class WorkDistribution(BaseModel):
    """Work values in ascending order with their probabilities"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    support: np.ndarray
    probs: np.ndarray
    bin_tol: float = Field(ge=0)

    @field_validator("support", "probs", mode="before")
    @classmethod
    def _real_arrays(cls, value) -> np.ndarray:
        return frozen_array(value, dtype=np.float64)

    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))


class CheckReport(BaseModel):
    """Key-value report of a numerical check"""

    model_config = ConfigDict(frozen=True)

    check: str
    passed: bool
    note: Optional[str] = None

    def as_text(self) -> str:
        lines = [f"[{self.check}]"]
        for key, value in self.model_dump(exclude={"check"}).items():
            if value is None:
                continue
            if isinstance(value, float):
                value = repr(value)
            elif isinstance(value, bool):
                value = "pass" if value else "fail"
            lines.append(f"{key} = {value}")
        return "\n".join(lines)


class PovmReport(CheckReport):
    check: str = "povm"
    paths: int
    completeness_defect: float
    min_eigenvalue: float


class BroadcastReport(CheckReport):
    check: str = "broadcast_marginals"
    copies: int
    max_marginal_defect: float


class FirstLawReport(CheckReport):
    check: str = "first_law"
    mean_work: float
    energy_change: float
    defect: float


class JarzynskiReport(CheckReport):
    check: str = "jarzynski"
    beta: float
    exponential_average: float
    partition_ratio: float
    relative_error: float


class SkippedReport(CheckReport):
    passed: bool = True


class PropertiesReport(CheckReport):
    """The three properties of the Bayesian-network row of the comparison table"""

    check: str = "bayesian_network_properties"
    measurable: bool
    fluctuation_theorem: Optional[bool]
    coherent_process: bool
    coherence: float


class RouteComparison(BaseModel):
    """Every exact route on one scenario and the largest entrywise disagreement"""

    model_config = ConfigDict(frozen=True)

    distributions: Dict[str, PathDistribution]
    max_pairwise_deviation: float
    worst_pair: Tuple[str, str]
