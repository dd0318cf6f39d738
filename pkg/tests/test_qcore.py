import numpy as np
import pytest

from nlmagic import DensityMatrix, partial_trace, pauli_expectations, purity, tensor
from nlmagic.qcore import PAULI_I, PAULI_X, PAULI_Z, all_pauli_strings

from helpers import random_mixed, random_pure


def test_tensor_identity():
    assert np.allclose(tensor(PAULI_I, PAULI_I), np.eye(4))


def test_tensor_qubit_ordering():
    # qubit 0 is the leftmost factor, i.e. the most significant bit
    assert np.allclose(tensor(PAULI_Z, PAULI_I), np.diag([1, 1, -1, -1]))


def test_tensor_basis_action():
    v00 = np.array([1, 0, 0, 0], dtype=complex)
    v10 = np.array([0, 0, 1, 0], dtype=complex)
    assert np.allclose(tensor(PAULI_X, PAULI_Z) @ v00, v10)


def test_partial_trace_product_state():
    rho = DensityMatrix.from_state_vector([1, 0, 0, 0])
    reduced = partial_trace(rho, {0})
    assert np.allclose(reduced.matrix, [[1, 0], [0, 0]], atol=1e-12)


def test_partial_trace_bell():
    bell = DensityMatrix.from_state_vector([1, 0, 0, 1])
    reduced = partial_trace(bell, {0})
    assert np.allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)


def test_partial_trace_schmidt_weights():
    lam = np.cos(np.pi / 8) ** 2
    vec = [np.sqrt(lam), 0, 0, np.sqrt(1 - lam)]
    reduced = partial_trace(DensityMatrix.from_state_vector(vec), {0})
    assert np.allclose(np.diag(reduced.matrix).real, [0.85355339, 0.14644661], atol=1e-8)


@pytest.mark.parametrize("keep", [set(), {0, 1}])
def test_partial_trace_invalid_subset(keep):
    rho = DensityMatrix.from_state_vector([1, 0, 0, 0])
    with pytest.raises(ValueError):
        partial_trace(rho, keep)


def test_partial_trace_recovers_factors():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a = random_pure(rng, 1)
        b = random_mixed(rng, 1)
        joint = DensityMatrix(tensor(a.matrix, b.matrix))
        assert np.allclose(partial_trace(joint, {0}).matrix, a.matrix, atol=1e-12)
        assert np.allclose(partial_trace(joint, {1}).matrix, b.matrix, atol=1e-12)


def test_purity_pure_and_mixed():
    assert purity(DensityMatrix.from_state_vector([1, 0])) == pytest.approx(1.0, abs=1e-12)
    assert purity(DensityMatrix.maximally_mixed(1)) == pytest.approx(0.5, abs=1e-12)


def test_purity_depolarized_two_qubit():
    # Tr((p rho + (1-p) I/4)^2) = 0.75 p^2 + 0.25 for pure rho
    rho = DensityMatrix.from_state_vector([1, 0, 0, 1])
    p = 0.96
    mixed = DensityMatrix(p * rho.matrix + (1 - p) * np.eye(4) / 4)
    assert purity(mixed) == pytest.approx(0.9412, abs=1e-12)


def test_pauli_expectations_zero_state():
    t = pauli_expectations(DensityMatrix.from_state_vector([1, 0]))
    assert np.allclose(t, [1, 0, 0, 1], atol=1e-12)


def test_pauli_expectations_t_plus():
    vec = [1 / np.sqrt(2), np.exp(1j * np.pi / 4) / np.sqrt(2)]
    t = pauli_expectations(DensityMatrix.from_state_vector(vec))
    s = 1 / np.sqrt(2)
    assert np.allclose(t, [1, s, s, 0], atol=1e-12)


@pytest.mark.parametrize("num_qubits", [1, 2])
def test_pauli_completeness(num_qubits):
    rng = np.random.default_rng(5)
    for k in range(100):
        rho = random_pure(rng, num_qubits) if k % 2 else random_mixed(rng, num_qubits)
        t = pauli_expectations(rho)
        d = rho.dim
        assert abs((t**2).sum() - d * purity(rho)) < 1e-10


def test_pauli_string_count():
    assert len(all_pauli_strings(2)) == 16
    letters = [p.letters for p in all_pauli_strings(1)]
    assert letters == ["I", "X", "Y", "Z"]


def test_density_matrix_rejects_non_hermitian():
    m = np.array([[1, 1], [0, 0]], dtype=complex)
    with pytest.raises(ValueError):
        DensityMatrix(m)


def test_density_matrix_rejects_bad_trace():
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(2, dtype=complex))


def test_density_matrix_rejects_negative_eigenvalue():
    m = np.diag([1.5, -0.5]).astype(complex)
    with pytest.raises(ValueError):
        DensityMatrix(m)


def test_density_matrix_immutable():
    rho = DensityMatrix.from_state_vector([1, 0])
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 0.0
