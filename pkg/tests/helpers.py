"""Shared random-state generators for the test suite."""

import numpy as np

from nlmagic import DensityMatrix


def random_pure(rng: np.random.Generator, num_qubits: int) -> DensityMatrix:
    d = 2**num_qubits
    vec = rng.normal(size=d) + 1j * rng.normal(size=d)
    return DensityMatrix.from_state_vector(vec)


def random_mixed(rng: np.random.Generator, num_qubits: int) -> DensityMatrix:
    d = 2**num_qubits
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return DensityMatrix(rho / np.trace(rho))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))
