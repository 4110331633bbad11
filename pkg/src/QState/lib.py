import logging
from functools import reduce
from math import prod
from typing import List, Sequence

import numpy as np
import scipy.linalg
from scipy.linalg import LinAlgError

from src.constants import PHASE_TIE_TOL
from src.errors import (
    BadFactorization,
    DecompositionFailed,
    NotHermitian,
    NotNormalized,
    NotOrthonormal,
    NotPositive,
    NotUnitary,
    TraceNotOne,
)
from src.QState.models import (
    DEFAULT_TOLERANCES,
    ComplexOperator,
    DensityMatrix,
    SpectralDecomposition,
    Tolerances,
    Unitary,
)

logger = logging.getLogger(__name__)

# projections of computational vectors below this norm are discarded
CANONICAL_DISCARD_TOL = 1e-8

OperatorLike = ComplexOperator | np.ndarray


def _entries(op: OperatorLike) -> np.ndarray:
    if isinstance(op, ComplexOperator):
        return op.entries
    return np.asarray(op, dtype=np.complex128)


def max_norm(array: np.ndarray) -> float:
    """Max-entry norm"""
    if array.size == 0:
        return 0.0
    return float(np.max(np.abs(array)))


def orthonormality_defect(columns: np.ndarray) -> float:
    return max_norm(columns.conj().T @ columns - np.eye(columns.shape[1]))


def validate_density(
    matrix: OperatorLike, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> DensityMatrix:
    """
    Check that a matrix is a density operator and return it symmetrized as (M + M†)/2
    with its diagnostics.

    Raises:
        NotHermitian: max-entry distance to the adjoint exceeds tol_herm
        TraceNotOne: |Tr M - 1| exceeds tol_trace
        NotPositive: smallest eigenvalue is below -tol_psd
    """
    op = matrix if isinstance(matrix, ComplexOperator) else ComplexOperator(entries=matrix)
    tolerances.check_dimension(op.dim)
    raw = op.entries
    hermiticity_defect = max_norm(raw - raw.conj().T)
    if hermiticity_defect > tolerances.tol_herm:
        raise NotHermitian(hermiticity_defect, tolerances.tol_herm, "tol_herm")

    symmetric = (raw + raw.conj().T) / 2
    trace_defect = float(abs(np.trace(symmetric) - 1.0))
    if trace_defect > tolerances.tol_trace:
        raise TraceNotOne(trace_defect, tolerances.tol_trace, "tol_trace")

    try:
        min_eigenvalue = float(scipy.linalg.eigvalsh(symmetric)[0])
    except LinAlgError as e:
        raise DecompositionFailed(str(e)) from e
    if min_eigenvalue < -tolerances.tol_psd:
        raise NotPositive(min_eigenvalue, tolerances.tol_psd, "tol_psd")

    return DensityMatrix(
        op=ComplexOperator(entries=symmetric),
        hermiticity_defect=hermiticity_defect,
        trace_defect=trace_defect,
        min_eigenvalue=min_eigenvalue,
    )


def validate_unitary(
    matrix: OperatorLike, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> Unitary:
    op = matrix if isinstance(matrix, ComplexOperator) else ComplexOperator(entries=matrix)
    tolerances.check_dimension(op.dim)
    defect = max_norm(op.entries @ op.entries.conj().T - np.eye(op.dim))
    if defect > tolerances.tol_unitary:
        raise NotUnitary(defect, tolerances.tol_unitary, "tol_unitary")
    return Unitary(op=op, unitarity_defect=defect)


def validate_basis(
    vectors: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """Columns must form a complete orthonormal basis"""
    columns = np.asarray(vectors, dtype=np.complex128)
    if columns.ndim != 2 or columns.shape[0] != columns.shape[1]:
        raise NotOrthonormal(float("inf"), tolerances.tol_orth, "tol_orth")
    defect = orthonormality_defect(columns)
    if defect > tolerances.tol_orth:
        raise NotOrthonormal(defect, tolerances.tol_orth, "tol_orth")
    return columns


def _eigenvalue_clusters(values: np.ndarray, degeneracy_tol: float) -> List[slice]:
    """Group consecutive sorted eigenvalues whose gaps stay below the tolerance"""
    clusters, start = [], 0
    for k in range(1, len(values) + 1):
        if k == len(values) or abs(values[k - 1] - values[k]) >= degeneracy_tol:
            clusters.append(slice(start, k))
            start = k
    return clusters


def _canonical_cluster_basis(subspace: np.ndarray) -> np.ndarray:
    """Gram-Schmidt over the computational vectors projected onto the subspace,
    in index order"""
    projector = subspace @ subspace.conj().T
    size = subspace.shape[1]
    basis: List[np.ndarray] = []
    for k in range(projector.shape[0]):
        candidate = projector[:, k].copy()
        # two passes keep the result orthogonal to working precision
        for _ in range(2):
            for v in basis:
                candidate -= v * np.vdot(v, candidate)
        norm = np.linalg.norm(candidate)
        if norm > CANONICAL_DISCARD_TOL:
            basis.append(candidate / norm)
        if len(basis) == size:
            break
    if len(basis) != size:
        raise DecompositionFailed(
            f"canonical basis spans {len(basis)} of {size} degenerate directions"
        )
    return np.column_stack(basis)


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    """Rotate so the largest-magnitude entry (lowest index on ties) is real positive"""
    magnitudes = np.abs(vector)
    pivot = int(np.flatnonzero(magnitudes >= magnitudes.max() - PHASE_TIE_TOL)[0])
    magnitude = abs(vector[pivot])
    fixed = vector * (np.conj(vector[pivot]) / magnitude)
    fixed[pivot] = magnitude
    return fixed


def spectral_decompose(
    rho: DensityMatrix,
    degeneracy_tol: float | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> SpectralDecomposition:
    """
    Eigendecomposition of a density matrix with a deterministic basis.

    Populations are sorted in non-increasing order. Inside a degenerate cluster the
    eigenvalues are replaced by their mean and the basis is the canonical one built
    from the computational vectors; every eigenvector is then phase-fixed.
    """
    degeneracy_tol = tolerances.degeneracy_tol if degeneracy_tol is None else degeneracy_tol
    try:
        values, vectors = scipy.linalg.eigh(rho.op.entries)
    except LinAlgError as e:
        raise DecompositionFailed(str(e)) from e
    values = values[::-1].copy()
    vectors = vectors[:, ::-1].copy()

    degenerate = False
    for cluster in _eigenvalue_clusters(values, degeneracy_tol):
        if cluster.stop - cluster.start < 2:
            continue
        degenerate = True
        vectors[:, cluster] = _canonical_cluster_basis(vectors[:, cluster])
        values[cluster] = np.mean(values[cluster])

    vectors = np.column_stack([_fix_phase(v) for v in vectors.T])
    populations = np.clip(values, 0.0, 1.0)

    decomposition = SpectralDecomposition(
        populations=populations, eigenvectors=vectors, degeneracy_flag=degenerate
    )
    orthonormality = orthonormality_defect(decomposition.eigenvectors)
    reconstruction = max_norm(decomposition.reconstruct() - rho.op.entries)
    if orthonormality > tolerances.tol_orth or reconstruction > tolerances.tol_recon:
        raise DecompositionFailed(
            f"orthonormality defect {orthonormality:.3e}, "
            f"reconstruction defect {reconstruction:.3e}"
        )
    if degenerate:
        logger.debug("Degenerate spectrum; canonical basis used")
    return decomposition


def tensor(
    ops: Sequence[OperatorLike], tolerances: Tolerances = DEFAULT_TOLERANCES
) -> ComplexOperator:
    """Kronecker product in list order"""
    if not ops:
        raise BadFactorization("tensor product of an empty list")
    arrays = [_entries(op) for op in ops]
    tolerances.check_dimension(prod(a.shape[0] for a in arrays))
    return ComplexOperator(entries=reduce(np.kron, arrays))


def partial_trace(op: OperatorLike, dims: Sequence[int], keep: int) -> ComplexOperator:
    """Reduced operator on subsystem `keep` of a product space with factors `dims`"""
    entries = _entries(op)
    dims = [int(d) for d in dims]
    if not dims or prod(dims) != entries.shape[0]:
        raise BadFactorization(f"dims {dims} do not factor dimension {entries.shape[0]}")
    if not 0 <= keep < len(dims):
        raise BadFactorization(f"subsystem {keep} outside 0..{len(dims) - 1}")
    left, right = prod(dims[:keep]), prod(dims[keep + 1 :])
    block = entries.reshape(left, dims[keep], right, left, dims[keep], right)
    return ComplexOperator(entries=np.einsum("aibajb->ij", block))


def projector(
    v: np.ndarray | Sequence[complex], tolerances: Tolerances = DEFAULT_TOLERANCES
) -> ComplexOperator:
    vector = np.asarray(v, dtype=np.complex128).reshape(-1)
    defect = abs(float(np.linalg.norm(vector)) - 1.0)
    if defect > tolerances.tol_norm:
        raise NotNormalized(defect, tolerances.tol_norm, "tol_norm")
    return ComplexOperator(entries=np.outer(vector, vector.conj()))


def computational_basis(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)
