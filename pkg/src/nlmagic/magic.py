"""Exact brute-force magic oracles and closed-form non-local magic.

The central quantity is the degree-2 stabilizer Renyi entropy

    M2(rho) = -log2 W(rho) + log2 P(rho) - log2 d,

with stabilizer purity W = d^-2 sum_P Tr(P rho)^4 and purity P = Tr(rho^2),
the sum running over all 4^N Pauli strings. For pure states this reduces to
the usual -log2( d^-1 sum_P Tr(P psi)^4 ); subtracting the 2-Renyi entropy
extends it to mixed states. M2 vanishes exactly on stabilizer states and on
the maximally mixed state, and is invariant under Clifford conjugation.

For two qubits the non-local part (the minimum of M2 over local unitaries)
is a closed function of the Schmidt weight lambda, and hence of the purity
of either single-qubit reduced state, which is what makes it measurable
without tomography.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .qcore import (
    DensityMatrix,
    expectations_from_matrix,
    partial_trace,
    purity,
)

LOG2_4_3 = np.log2(4.0 / 3.0)


@dataclass(frozen=True)
class MagicReport:
    purity: float
    stabilizer_purity: float
    m2: float
    m2_nonlocal: Optional[float] = None
    m2_local: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.stabilizer_purity <= 1.0:
            raise ValueError("stabilizer purity must lie in (0, 1]")
        if self.m2 < -1e-10:
            raise ValueError("m2 must be nonnegative up to 1e-10")
        if self.m2_nonlocal is not None and self.m2_local is not None:
            if abs(self.m2_local - (self.m2 - self.m2_nonlocal)) > 1e-12:
                raise ValueError("m2_local must equal m2 - m2_nonlocal")


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Two-qubit Schmidt weights {lambda, 1-lambda}, with lambda >= 1/2."""

    lam: float
    theta: float

    def __post_init__(self):
        if not 0.5 <= self.lam <= 1.0 + 1e-12:
            raise ValueError("canonical Schmidt weight must lie in [0.5, 1]")
        if abs(self.lam - np.cos(self.theta / 2) ** 2) > 1e-12:
            raise ValueError("lambda and theta are inconsistent")

    @classmethod
    def from_lambda(cls, lam: float) -> "SchmidtSpectrum":
        lam = float(lam)
        if not 0.0 <= lam <= 1.0:
            raise ValueError("lambda must lie in [0, 1]")
        lam = max(lam, 1.0 - lam)
        lam = min(lam, 1.0)
        return cls(lam, 2.0 * np.arccos(np.sqrt(lam)))

    @classmethod
    def from_theta(cls, theta: float) -> "SchmidtSpectrum":
        return cls.from_lambda(np.cos(theta / 2) ** 2)


def schmidt_spectrum(rho: DensityMatrix) -> SchmidtSpectrum:
    """Schmidt weight of a pure two-qubit state (largest weight first)."""
    if rho.num_qubits != 2:
        raise ValueError("Schmidt spectrum is defined here for two qubits")
    if purity(rho) < 1.0 - 1e-9:
        raise ValueError("state must be pure to read off Schmidt weights")
    eigs, vecs = np.linalg.eigh(rho.matrix)
    amp = vecs[:, -1].reshape(2, 2)
    s = np.linalg.svd(amp, compute_uv=False)
    return SchmidtSpectrum.from_lambda(float(s[0] ** 2))


def stabilizer_purity_exact(rho: DensityMatrix) -> float:
    """W(rho) = d^-2 sum_P Tr(P rho)^4 by direct Pauli enumeration."""
    t = expectations_from_matrix(rho.matrix, rho.num_qubits)
    return float((t**4).sum()) / rho.dim**2


def sre_exact(rho: DensityMatrix) -> float:
    """Degree-2 stabilizer Renyi entropy, mixed-state convention."""
    return _sre_from_matrix(rho.matrix, rho.num_qubits)


def _sre_from_matrix(mat: np.ndarray, num_qubits: int) -> float:
    d = 2**num_qubits
    t = expectations_from_matrix(mat, num_qubits)
    t2 = t**2
    w = float((t2**2).sum()) / d**2
    pur = float(t2.sum()) / d
    return float(-np.log2(w) + np.log2(pur) - np.log2(d))


def magic_report(rho: DensityMatrix, m2_nonlocal: Optional[float] = None) -> MagicReport:
    m2 = sre_exact(rho)
    local = None if m2_nonlocal is None else local_magic(rho, m2_nonlocal)
    return MagicReport(
        purity=purity(rho),
        stabilizer_purity=stabilizer_purity_exact(rho),
        m2=m2,
        m2_nonlocal=m2_nonlocal,
        m2_local=local,
    )


# ---------------------------------------------------------------------------
# Closed forms for two-qubit non-local magic


def nonlocal_magic_schmidt(lam: float) -> float:
    """M_NL = -log2(4 (lam-1) lam (1-2 lam)^2 + 1) for Schmidt weight lam."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    return float(-np.log2(4.0 * (lam - 1.0) * lam * (1.0 - 2.0 * lam) ** 2 + 1.0))


def nonlocal_magic_theta(theta: float) -> float:
    """M_NL(theta) = log2(8 / (7 + cos 4 theta)) with lam = cos^2(theta/2)."""
    return float(np.log2(8.0 / (7.0 + np.cos(4.0 * theta))))


def nonlocal_magic_from_rdm_purity(p_a: float) -> float:
    """M_NL = -log2(4 P_A^2 - 6 P_A + 3) from the reduced-state purity."""
    if not 0.5 - 1e-12 <= p_a <= 1.0 + 1e-12:
        raise ValueError("single-qubit reduced purity must lie in [0.5, 1]")
    p_a = min(max(p_a, 0.5), 1.0)
    return float(-np.log2(4.0 * p_a**2 - 6.0 * p_a + 3.0))


def rdm_purity_noisy(lam: float, p_dep: float) -> float:
    """Reduced purity of a Schmidt-form state after global depolarizing.

    Tr(rho_A^2) = p^2 (lam^2 + (1-lam)^2) + p (1-p) + (1-p)^2 / 2.
    """
    pure = lam**2 + (1.0 - lam) ** 2
    return p_dep**2 * pure + p_dep * (1.0 - p_dep) + (1.0 - p_dep) ** 2 / 2.0


class OutOfModelError(ValueError):
    """A measured value is incompatible with the assumed noise model."""


def nonlocal_magic_noisy(p_a_measured: float, p_dep: float, atol: float = 1e-9) -> float:
    """Invert the depolarized reduced-purity relation and evaluate M_NL.

    Solves Tr(rho_A^2) = p^2 (lam^2 + (1-lam)^2) + p(1-p) + (1-p)^2/2 for
    the Schmidt weight lam in [0.5, 1] and plugs it into the closed form.
    A measured purity outside the attainable interval (beyond ``atol``)
    signals a mismatch with the global depolarizing model and raises.
    """
    if not 0.0 < p_dep <= 1.0:
        raise ValueError("p_dep must lie in (0, 1]")
    lo = rdm_purity_noisy(0.5, p_dep)
    hi = rdm_purity_noisy(1.0, p_dep)
    if p_a_measured < lo - atol or p_a_measured > hi + atol:
        raise OutOfModelError(
            f"reduced purity {p_a_measured} outside attainable [{lo}, {hi}]"
        )
    pure = (min(max(p_a_measured, lo), hi) - p_dep * (1.0 - p_dep) - (1.0 - p_dep) ** 2 / 2.0) / p_dep**2
    # lam^2 + (1-lam)^2 = pure  =>  lam = (1 + sqrt(2 pure - 1)) / 2
    lam = 0.5 * (1.0 + np.sqrt(max(2.0 * pure - 1.0, 0.0)))
    return nonlocal_magic_schmidt(lam)


def sre_nlm_depolarized(p_err: float, theta: float) -> float:
    """Closed-form M2 of the depolarized Schmidt-form state family.

    ``p_err`` is the error probability 1 - p_survival of the global
    depolarizing channel applied once after the entangling gate. At
    p_err = 0 this reduces to nonlocal_magic_theta(theta).
    """
    if not 0.0 <= p_err <= 1.0:
        raise ValueError("p_err must lie in [0, 1]")
    p = p_err
    inner = (p - 1.0) ** 4 * np.cos(4.0 * theta) + 5.0 * (p - 2.0) * p * ((p - 2.0) * p + 2.0) + 7.0
    return float(-np.log2(4.0 * inner) + np.log2(3.0 * (p - 2.0) * p + 4.0) + 3.0)


def local_magic(rho: DensityMatrix, nl: float) -> float:
    """Locally erasable magic: total M2 minus the non-local part."""
    total = sre_exact(rho)
    if nl > total + 1e-9:
        raise ValueError(f"non-local magic {nl} exceeds total {total}")
    return total - nl


# ---------------------------------------------------------------------------
# Distillation bound checker


def check_distillation_lemma(
    psi: DensityMatrix, c_factorized: np.ndarray, atol: float = 1e-9
) -> Optional[bool]:
    """Check that a factorized Clifford distills at most the local magic.

    ``psi`` is a pure two-qubit state on subsystems A (qubit 0) and
    B (qubit 1); an ancilla in |0> is appended as qubit 2 and
    ``c_factorized`` (an 8x8 Clifford of the form C_A (x) C_BC) is applied.
    If the output splits as psi' on (A, B) times phi on the ancilla, returns
    True when M2(phi) <= local magic of psi (up to ``atol``), False when the
    bound is violated. Returns None when the output does not factorize,
    which makes the bound inapplicable rather than violated.
    """
    if psi.num_qubits != 2:
        raise ValueError("input state must be on two qubits")
    if purity(psi) < 1.0 - 1e-9:
        raise ValueError("input state must be pure")
    c = np.asarray(c_factorized, dtype=complex)
    if c.shape != (8, 8):
        raise ValueError("Clifford must act on three qubits")
    if np.max(np.abs(c.conj().T @ c - np.eye(8))) > 1e-9:
        raise ValueError("Clifford must be unitary")
    ancilla = np.zeros((2, 2), dtype=complex)
    ancilla[0, 0] = 1.0
    full = np.kron(psi.matrix, ancilla)
    out = DensityMatrix(c @ full @ c.conj().T)
    phi = partial_trace(out, {2})
    if purity(phi) < 1.0 - atol:
        return None
    spec = schmidt_spectrum(psi)
    m_local = local_magic(psi, nonlocal_magic_schmidt(spec.lam))
    return sre_exact(phi) <= m_local + atol
