from __future__ import annotations

from typing import List, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.constants import (
    DEGENERACY_TOL,
    DIMENSION_CAP,
    ENUMERATION_CAP,
    POP_CUTOFF,
    TOL_HERM,
    TOL_NORM,
    TOL_ORTH,
    TOL_PSD,
    TOL_RECON,
    TOL_TRACE,
    TOL_UNITARY,
)
from src.errors import DimensionOverflow, EnumerationTooLarge


def frozen_array(value, dtype=np.complex128) -> np.ndarray:
    """Copy into a read-only numpy array of the given dtype"""
    array = np.array(value, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


class Tolerances(BaseModel):
    """Numerical tolerances and size caps shared by every operation"""

    model_config = ConfigDict(frozen=True)

    tol_herm: float = Field(default=TOL_HERM, ge=0)
    tol_trace: float = Field(default=TOL_TRACE, ge=0)
    tol_psd: float = Field(default=TOL_PSD, ge=0)
    tol_unitary: float = Field(default=TOL_UNITARY, ge=0)
    tol_norm: float = Field(default=TOL_NORM, ge=0)
    tol_orth: float = Field(default=TOL_ORTH, ge=0)
    tol_recon: float = Field(default=TOL_RECON, ge=0)
    degeneracy_tol: float = Field(default=DEGENERACY_TOL, ge=0)
    pop_cutoff: float = Field(default=POP_CUTOFF, ge=0)
    dimension_cap: int = Field(default=DIMENSION_CAP, gt=0)
    enumeration_cap: int = Field(default=ENUMERATION_CAP, gt=0)
    cap_override: bool = False

    def check_dimension(self, dim: int) -> None:
        if dim > self.dimension_cap and not self.cap_override:
            raise DimensionOverflow(dim, self.dimension_cap)

    def check_enumeration(self, count: int) -> None:
        if count > self.enumeration_cap and not self.cap_override:
            raise EnumerationTooLarge(count, self.enumeration_cap)


DEFAULT_TOLERANCES = Tolerances()


class ComplexOperator(BaseModel):
    """Dense square complex matrix; the entries are read-only"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _square_complex(cls, value) -> np.ndarray:
        array = frozen_array(value)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
            raise ValueError(f"expected a non-empty square matrix, got shape {array.shape}")
        return array

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, dim: int) -> ComplexOperator:
        return cls(entries=np.eye(dim))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[Sequence[float]]]) -> ComplexOperator:
        """Build from a row-major nested list of [re, im] pairs"""
        array = np.asarray(pairs, dtype=np.float64)
        return cls(entries=array[..., 0] + 1j * array[..., 1])

    def to_pairs(self) -> List[List[List[float]]]:
        return [
            [[float(z.real), float(z.imag)] for z in row] for row in self.entries
        ]

    def dagger(self) -> ComplexOperator:
        return ComplexOperator(entries=self.entries.conj().T)

    def max_abs_diff(self, other: ComplexOperator | np.ndarray) -> float:
        other_entries = other.entries if isinstance(other, ComplexOperator) else other
        return float(np.max(np.abs(self.entries - other_entries)))

    def __str__(self) -> str:
        return f"ComplexOperator(dim={self.dim})"


class DensityMatrix(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: ComplexOperator
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float

    @property
    def dim(self) -> int:
        return self.op.dim


class SpectralDecomposition(BaseModel):
    """Populations in non-increasing order with eigenvectors as matching columns"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    populations: np.ndarray
    eigenvectors: np.ndarray
    degeneracy_flag: bool = False

    @field_validator("populations", mode="before")
    @classmethod
    def _real_populations(cls, value) -> np.ndarray:
        return frozen_array(value, dtype=np.float64)

    @field_validator("eigenvectors", mode="before")
    @classmethod
    def _complex_vectors(cls, value) -> np.ndarray:
        return frozen_array(value)

    @property
    def dim(self) -> int:
        return self.populations.shape[0]

    def vector(self, s_index: int) -> np.ndarray:
        return self.eigenvectors[:, s_index]

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.populations) @ self.eigenvectors.conj().T


class Unitary(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: ComplexOperator
    unitarity_defect: float

    @property
    def dim(self) -> int:
        return self.op.dim

    @property
    def entries(self) -> np.ndarray:
        return self.op.entries
