from __future__ import annotations

import hashlib
import math
from functools import cached_property
from typing import Dict, Iterator, Sequence, Tuple

import numpy as np
import orjson
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.constants import NEGATIVE_PROBABILITY_TOL, NORMALIZATION_TOL, Method
from src.QState.models import (
    DEFAULT_TOLERANCES,
    DensityMatrix,
    SpectralDecomposition,
    Tolerances,
    Unitary,
    frozen_array,
)

Path = Tuple[int, ...]


def _pairs(array: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.stack([array.real, array.imag], axis=-1))


class TimePoint(BaseModel):
    """A measurement time: cumulative evolution U_t and a local basis stored as columns"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    label: str
    unitary: Unitary
    basis: np.ndarray

    @field_validator("basis", mode="before")
    @classmethod
    def _square_basis(cls, value) -> np.ndarray:
        array = frozen_array(value)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise ValueError(f"basis must be a square matrix of columns, got {array.shape}")
        return array

    @model_validator(mode="after")
    def _matching_dims(self) -> TimePoint:
        if self.basis.shape[0] != self.unitary.dim:
            raise ValueError(
                f"basis dimension {self.basis.shape[0]} does not match unitary "
                f"dimension {self.unitary.dim}"
            )
        return self

    @property
    def dim(self) -> int:
        return self.unitary.dim


class Scenario(BaseModel):
    """State, decomposition and the ordered measurement times of one problem"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dims: Tuple[int, ...]
    rho: DensityMatrix
    times: Tuple[TimePoint, ...] = Field(min_length=1)
    decomposition: SpectralDecomposition
    tolerances: Tolerances = DEFAULT_TOLERANCES

    @model_validator(mode="after")
    def _consistent_dims(self) -> Scenario:
        if math.prod(self.dims) != self.rho.dim:
            raise ValueError(f"dims {self.dims} do not factor dimension {self.rho.dim}")
        for time in self.times:
            if time.dim != self.rho.dim:
                raise ValueError(f"time point {time.label} has dimension {time.dim}")
        if self.decomposition.dim != self.rho.dim:
            raise ValueError("decomposition dimension differs from the state")
        return self

    @property
    def dim(self) -> int:
        return self.rho.dim

    @property
    def copies(self) -> int:
        return len(self.times)

    @property
    def steps(self) -> int:
        """N, the number of times after t_0"""
        return len(self.times) - 1

    @property
    def populations(self) -> np.ndarray:
        return self.decomposition.populations

    @property
    def path_shape(self) -> Tuple[int, ...]:
        return (self.dim,) * self.copies

    @property
    def path_count(self) -> int:
        return self.dim**self.copies

    @cached_property
    def amplitudes(self) -> Tuple[np.ndarray, ...]:
        """Per time, the matrix of <x_n|U_n|s> indexed [x, s]"""
        vectors = self.decomposition.eigenvectors
        return tuple(
            frozen_array(time.basis.conj().T @ time.unitary.entries @ vectors)
            for time in self.times
        )

    @cached_property
    def conditionals(self) -> Tuple[np.ndarray, ...]:
        """Per time, p(x_n|s_n) indexed [x, s]"""
        return tuple(
            frozen_array(np.abs(amplitude) ** 2, dtype=np.float64)
            for amplitude in self.amplitudes
        )

    @cached_property
    def fingerprint(self) -> str:
        payload = orjson.dumps(
            {
                "dims": list(self.dims),
                "rho": _pairs(self.rho.op.entries),
                "times": [
                    {
                        "label": time.label,
                        "unitary": _pairs(time.unitary.entries),
                        "basis": _pairs(time.basis),
                    }
                    for time in self.times
                ],
            },
            option=orjson.OPT_SERIALIZE_NUMPY,
        )
        return hashlib.sha256(payload).hexdigest()


class PathDistribution(BaseModel):
    """Probabilities over outcome tuples, stored as an array indexed by the path"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    fingerprint: str
    probabilities: np.ndarray
    method: Method
    times: Tuple[int, ...]
    total: float
    complete: bool
    warnings: Tuple[str, ...] = ()

    @field_validator("probabilities", mode="before")
    @classmethod
    def _real_probabilities(cls, value) -> np.ndarray:
        return frozen_array(value, dtype=np.float64)

    @classmethod
    def from_array(
        cls,
        fingerprint: str,
        probabilities: np.ndarray,
        method: Method,
        times: Sequence[int],
        warnings: Sequence[str] = (),
    ) -> PathDistribution:
        total = math.fsum(np.asarray(probabilities, dtype=np.float64).ravel())
        complete = (
            abs(total - 1.0) <= NORMALIZATION_TOL
            and float(np.min(probabilities)) >= -NEGATIVE_PROBABILITY_TOL
        )
        return cls(
            fingerprint=fingerprint,
            probabilities=probabilities,
            method=method,
            times=tuple(times),
            total=total,
            complete=complete,
            warnings=tuple(warnings),
        )

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.probabilities.shape

    def paths(self) -> Iterator[Path]:
        """Lexicographic order"""
        yield from np.ndindex(*self.shape)

    def probability(self, path: Sequence[int]) -> float:
        return float(self.probabilities[tuple(path)])

    def entries(self) -> Dict[Path, float]:
        return {path: float(self.probabilities[path]) for path in self.paths()}

    def clamped(self) -> np.ndarray:
        """Presentation values; tiny negatives become zero"""
        return np.where(self.probabilities < 0.0, 0.0, self.probabilities)

    def max_deviation(self, other: PathDistribution) -> float:
        if self.shape != other.shape:
            return float("inf")
        return float(np.max(np.abs(self.probabilities - other.probabilities)))
