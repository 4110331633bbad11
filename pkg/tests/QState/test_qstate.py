import numpy as np
import pytest
from scipy.stats import unitary_group

from src.errors import (
    BadFactorization,
    DimensionOverflow,
    NotHermitian,
    NotNormalized,
    NotOrthonormal,
    NotPositive,
    NotUnitary,
    TraceNotOne,
)
from src.QState.lib import (
    _fix_phase,
    computational_basis,
    partial_trace,
    projector,
    spectral_decompose,
    tensor,
    validate_basis,
    validate_density,
    validate_unitary,
)
from src.QState.models import ComplexOperator, Tolerances


class TestValidateDensity:
    def test_accepts_mixed_state(self):
        rho = validate_density(np.diag([0.7, 0.3]))
        assert rho.trace_defect < 1e-15
        assert rho.min_eigenvalue == pytest.approx(0.3)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian) as error:
            validate_density(np.array([[0.5, 0.1], [0.0, 0.5]]))
        assert error.value.tolerance_name == "tol_herm"
        assert error.value.defect == pytest.approx(0.1)

    def test_rejects_wrong_trace(self):
        with pytest.raises(TraceNotOne):
            validate_density(np.diag([0.5, 0.4]))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(NotPositive):
            validate_density(np.diag([1.2, -0.2]))

    def test_symmetrizes_within_tolerance(self):
        raw = np.array([[0.5, 0.1 + 1e-12], [0.1, 0.5]])
        rho = validate_density(raw)
        np.testing.assert_array_equal(rho.op.entries, rho.op.entries.conj().T)

    def test_dimension_cap(self):
        with pytest.raises(DimensionOverflow):
            validate_density(np.eye(4) / 4, Tolerances(dimension_cap=2))

    def test_cap_override(self):
        rho = validate_density(np.eye(4) / 4, Tolerances(dimension_cap=2, cap_override=True))
        assert rho.dim == 4


class TestValidateUnitaryAndBasis:
    def test_random_unitary(self):
        u = validate_unitary(unitary_group.rvs(3, random_state=1))
        assert u.unitarity_defect < 1e-12

    def test_rejects_scaled_matrix(self):
        with pytest.raises(NotUnitary):
            validate_unitary(2 * np.eye(2))

    def test_rejects_non_orthonormal_basis(self):
        with pytest.raises(NotOrthonormal):
            validate_basis(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_rejects_incomplete_basis(self):
        with pytest.raises(NotOrthonormal):
            validate_basis(np.array([[1.0], [0.0]]))


class TestSpectralDecompose:
    def test_diagonal_state(self):
        decomposition = spectral_decompose(validate_density(np.diag([0.25, 0.75])))
        np.testing.assert_allclose(decomposition.populations, [0.75, 0.25])
        np.testing.assert_allclose(np.abs(decomposition.eigenvectors), [[0, 1], [1, 0]])

    def test_pure_plus_state(self):
        rho = np.full((2, 2), 0.5)
        decomposition = spectral_decompose(validate_density(rho))
        np.testing.assert_allclose(decomposition.populations, [1.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(
            decomposition.vector(0), np.array([1, 1]) / np.sqrt(2), atol=1e-15
        )

    def test_maximally_mixed_uses_computational_basis(self):
        decomposition = spectral_decompose(validate_density(np.eye(3) / 3))
        assert decomposition.degeneracy_flag
        np.testing.assert_allclose(decomposition.eigenvectors, np.eye(3), atol=1e-15)
        np.testing.assert_allclose(decomposition.populations, [1 / 3] * 3)

    def test_largest_entry_is_real_positive(self, rng):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = g @ g.conj().T
        decomposition = spectral_decompose(validate_density(rho / np.trace(rho).real))
        for s in range(4):
            v = decomposition.vector(s)
            pivot = int(np.argmax(np.abs(v)))
            assert v[pivot].imag == 0.0
            assert v[pivot].real > 0

    def test_near_tie_picks_lowest_index(self):
        # the second entry is larger by 1e-14
        vector = np.array([np.exp(0.3j), np.exp(1.1j) * (1 + 1e-14)])
        fixed = _fix_phase(vector)
        assert fixed[0].imag == 0.0
        assert fixed[0].real == pytest.approx(1.0, abs=1e-15)
        assert np.angle(fixed[1]) == pytest.approx(0.8)

    def test_reconstruction(self, rng):
        for dim in (2, 3, 5):
            g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            rho = g @ g.conj().T
            rho = validate_density(rho / np.trace(rho).real)
            decomposition = spectral_decompose(rho)
            assert np.max(np.abs(decomposition.reconstruct() - rho.op.entries)) < 1e-10
            assert np.all(np.diff(decomposition.populations) <= 0)

    def test_deterministic(self, rng):
        g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        rho = validate_density((g @ g.conj().T) / np.trace(g @ g.conj().T).real)
        first, second = spectral_decompose(rho), spectral_decompose(rho)
        np.testing.assert_array_equal(first.eigenvectors, second.eigenvectors)
        np.testing.assert_array_equal(first.populations, second.populations)


class TestTensorAndPartialTrace:
    def test_tensor_is_associative(self, rng):
        a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
        left = tensor([a, tensor([b, c])])
        right = tensor([tensor([a, b]), c])
        np.testing.assert_allclose(left.entries, right.entries, atol=1e-12)

    def test_tensor_of_empty_list(self):
        with pytest.raises(BadFactorization):
            tensor([])

    def test_partial_trace_of_product(self, rng):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        product = tensor([a, b])
        np.testing.assert_allclose(
            partial_trace(product, [2, 3], 0).entries, a * np.trace(b), atol=1e-12
        )
        np.testing.assert_allclose(
            partial_trace(product, [2, 3], 1).entries, b * np.trace(a), atol=1e-12
        )

    def test_partial_trace_middle_factor(self, rng):
        ops = [rng.normal(size=(d, d)) for d in (2, 3, 2)]
        traced = partial_trace(tensor(ops), [2, 3, 2], 1)
        np.testing.assert_allclose(
            traced.entries, ops[1] * np.trace(ops[0]) * np.trace(ops[2]), atol=1e-12
        )

    def test_bell_state_marginal_is_mixed(self):
        bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
        reduced = partial_trace(np.outer(bell, bell), [2, 2], 0)
        np.testing.assert_allclose(reduced.entries, np.eye(2) / 2, atol=1e-15)

    def test_bad_factorization(self):
        with pytest.raises(BadFactorization):
            partial_trace(np.eye(6), [2, 2], 0)


class TestProjector:
    def test_projector_of_normalized_vector(self):
        p = projector([1 / np.sqrt(2), 1j / np.sqrt(2)])
        np.testing.assert_allclose(p.entries @ p.entries, p.entries, atol=1e-15)

    def test_rejects_unnormalized_vector(self):
        with pytest.raises(NotNormalized):
            projector([1.0, 1.0])


class TestComplexOperator:
    def test_pairs_round_trip(self):
        op = ComplexOperator(entries=np.array([[1 + 2j, 0.1], [-3j, 4.0]]))
        again = ComplexOperator.from_pairs(op.to_pairs())
        np.testing.assert_array_equal(op.entries, again.entries)

    def test_entries_are_read_only(self):
        op = ComplexOperator.identity(2)
        with pytest.raises(ValueError):
            op.entries[0, 0] = 2.0

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            ComplexOperator(entries=np.zeros((2, 3)))

    def test_computational_basis(self):
        np.testing.assert_array_equal(computational_basis(3), np.eye(3))
