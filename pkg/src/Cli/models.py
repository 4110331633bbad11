from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from src.BayesNet.models import Scenario
from src.constants import NamedBasis, NamedModel, NamedUnitary

Pair = Tuple[float, float]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MatrixSpec(_Strict):
    """Row-major matrix of [re, im] pairs"""

    matrix: List[List[Pair]] = Field(min_length=1)


class ModelSpec(_Strict):
    model: NamedModel
    params: Dict[str, float] = Field(default_factory=dict)


class AdiabaticPhaseSpec(_Strict):
    adiabatic_phase: float


class VectorsSpec(_Strict):
    """Basis vectors, each a list of [re, im] pairs; vector k becomes column k"""

    vectors: List[List[Pair]] = Field(min_length=1)


class TimeSpec(_Strict):
    label: str
    unitary: NamedUnitary | AdiabaticPhaseSpec | MatrixSpec = NamedUnitary.IDENTITY
    basis: NamedBasis | VectorsSpec = NamedBasis.COMPUTATIONAL


class EnergySpec(_Strict):
    initial: List[float]
    final: List[float]


class OptionsSpec(_Strict):
    incremental: bool = False
    allow_initial_evolution: bool = False
    tolerances: Dict[str, Any] = Field(default_factory=dict)


class ScenarioFile(_Strict):
    version: Literal[1]
    dims: Optional[List[int]] = None
    rho: MatrixSpec | ModelSpec
    times: Optional[List[TimeSpec]] = Field(default=None, min_length=1)
    energies: Optional[EnergySpec] = None
    beta: Optional[float] = Field(default=None, gt=0)
    options: OptionsSpec = Field(default_factory=OptionsSpec)


class LoadedScenario(BaseModel):
    """A validated scenario plus the optional thermodynamic data of its file"""

    model_config = ConfigDict(frozen=True)

    scenario: Scenario
    energies_initial: Optional[Tuple[float, ...]] = None
    energies_final: Optional[Tuple[float, ...]] = None
    beta: Optional[float] = None
    source: str = "<string>"

    @property
    def has_energies(self) -> bool:
        return self.energies_initial is not None and self.energies_final is not None
