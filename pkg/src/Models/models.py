from __future__ import annotations

import math
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit

from src.constants import Figure
from src.Povm.models import CheckReport


def _half_sech(x: float) -> float:
    """1/(2 cosh x) without overflow for large |x|"""
    t = math.exp(-abs(x))
    return t / (1 + t * t)


class CoherentQubitParams(BaseModel):
    """Qubit with H_t = g_t sigma_z prepared in rho_th + alpha sigma_x"""

    model_config = ConfigDict(frozen=True)

    beta: float = Field(gt=0)
    g0: float = 1.0
    g1: float = 2.0
    a: float = Field(default=0.0, ge=-1, le=1)
    phase: float = 0.0

    @property
    def b(self) -> float:
        """Tr[sigma_z rho_th]"""
        return -math.tanh(self.beta * self.g0)

    @property
    def alpha(self) -> float:
        # a sqrt(1 - b^2)/2 = a sech(beta g0)/2
        return self.a * _half_sech(self.beta * self.g0)

    @property
    def energies_initial(self) -> Tuple[float, float]:
        return (self.g0, -self.g0)

    @property
    def energies_final(self) -> Tuple[float, float]:
        return (self.g1, -self.g1)


class QubitPairParams(BaseModel):
    """Two thermal qubits with correlations alpha sigma_+ x sigma_- + h.c."""

    model_config = ConfigDict(frozen=True)

    beta_a: float = Field(gt=0)
    beta_b: float = Field(gt=0)
    a: float = Field(default=0.0, ge=-1, le=1)
    phase: float = 0.0

    @property
    def inverse_partition(self) -> float:
        """1/(Z_A Z_B)"""
        return _half_sech(self.beta_a) * _half_sech(self.beta_b)

    @property
    def plus_minus(self) -> float:
        """Thermal population of |+->, exp(-delta_beta)/(Z_A Z_B)"""
        return float(expit(-2 * self.beta_a) * expit(2 * self.beta_b))

    @property
    def minus_plus(self) -> float:
        return float(expit(2 * self.beta_a) * expit(-2 * self.beta_b))

    @property
    def delta_beta(self) -> float:
        return self.beta_a - self.beta_b

    @property
    def alpha(self) -> complex:
        return 1j * self.a * self.inverse_partition

    @property
    def xi(self) -> float:
        return 2 * self.a**2 + 1

    @property
    def correlation_weight(self) -> float:
        """
        gamma/(gamma + s(s + xi)) with s = exp(2 delta_beta) and gamma = s xi + 1,
        rescaled by 1/s^2 when s > 1
        """
        if self.delta_beta <= 0:
            s = math.exp(2 * self.delta_beta)
            return (s * self.xi + 1) / (s * s + 2 * s * self.xi + 1)
        u = math.exp(-2 * self.delta_beta)
        return (self.xi * u + u * u) / (1 + 2 * self.xi * u + u * u)

    @property
    def energies(self) -> Tuple[float, float, float, float]:
        """sigma_z x I + I x sigma_z on |++>, |+->, |-+>, |-->"""
        return (2.0, 0.0, 0.0, -2.0)


class FigureRow(BaseModel):
    """
    One grid point. `temperature` is T for the qubit figure and T_B for the pair
    figure; value columns are None when the row is flagged.
    """

    model_config = ConfigDict(frozen=True)

    temperature: float
    a: float
    engine: Optional[float] = None
    tpm: Optional[float] = None
    analytic: Optional[float] = None
    bloch: Optional[float] = None
    flag: Optional[str] = None


class FigureTable(BaseModel):
    name: Figure
    parameters: Dict[str, float | str]
    rows: List[FigureRow]

    @property
    def temperature_column(self) -> str:
        return "T" if self.name == Figure.FIG2 else "T_B"

    @property
    def flagged(self) -> List[FigureRow]:
        return [row for row in self.rows if row.flag is not None]

    def column(self, name: str, a: float) -> List[Optional[float]]:
        return [getattr(row, name) for row in self.rows if row.a == a]


class DiscrepancyReport(CheckReport):
    """Engine against the printed closed form and against the independent Bloch oracle"""

    check: str = "discrepancy"
    model: str
    grid_points: int
    flagged_rows: int
    max_engine_vs_closed_form: float
    worst_closed_form_at: Optional[str] = None
    max_engine_vs_bloch: float
    max_population_gap: Optional[float] = None
