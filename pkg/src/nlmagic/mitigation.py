"""Readout calibration estimation and constrained least-squares mitigation.

Inverting the calibration matrix can push probability vectors out of the
simplex, so the mitigated vector is instead the simplex-constrained
minimizer of || Lambda p - p_exp ||^2. The solver is projected gradient
descent with an exact Euclidean projection onto the simplex and a fixed
step 1/L, where L is the largest squared singular value of Lambda obtained
by power iteration. At dimension <= 8 this is fast, deterministic and
always feasible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .noise import CalibrationMatrix


class ConvergenceError(RuntimeError):
    """The solver hit its iteration cap before the objective settled."""


@dataclass(frozen=True)
class InitializationCounts:
    """Counts of measured outcomes per prepared computational state.

    Row i holds the outcome histogram recorded after preparing state i;
    every row must sum to the same shot count.
    """

    counts: np.ndarray
    n_shot: int

    def __post_init__(self):
        c = np.array(self.counts, dtype=int)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("counts must form a square table")
        if (c < 0).any():
            raise ValueError("counts must be nonnegative")
        if self.n_shot <= 0:
            raise ValueError("n_shot must be positive")
        rows = c.sum(axis=1)
        if (rows != self.n_shot).any():
            raise ValueError("every row must sum to n_shot")
        c.flags.writeable = False
        object.__setattr__(self, "counts", c)

    def to_json(self) -> str:
        return json.dumps({"counts": self.counts.tolist(), "n_shot": self.n_shot})

    @classmethod
    def from_json(cls, text: str) -> "InitializationCounts":
        payload = json.loads(text)
        return cls(np.array(payload["counts"], dtype=int), int(payload["n_shot"]))


def calibration_from_counts(ic: InitializationCounts) -> CalibrationMatrix:
    """Column j of the calibration matrix is the histogram of preparation j."""
    lam = ic.counts.T.astype(float) / float(ic.n_shot)
    return CalibrationMatrix(lam)


def readout_fidelity(lam: CalibrationMatrix) -> float:
    """Mean probability of measuring the prepared state (diagonal average)."""
    return float(np.mean(np.diag(lam.matrix)))


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    x = np.asarray(v, dtype=float).ravel()
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, x.size + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    tau = css[cond][-1] / rho
    return np.clip(x - tau, 0.0, None)


def _largest_squared_singular_value(m: np.ndarray, iters: int = 200) -> float:
    gram = m.T @ m
    v = np.ones(m.shape[1]) / np.sqrt(m.shape[1])
    for _ in range(iters):
        w = gram @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
    return float(v @ gram @ v)


def mitigate_least_squares(
    p_exp,
    lam: CalibrationMatrix,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    full_output: bool = False,
):
    """argmin_{p >= 0, sum p = 1} || Lambda p - p_exp ||_2^2.

    ``tol`` bounds the objective decrease per iteration at which the solver
    stops. Raises ConvergenceError if the cap is reached while the objective
    is still moving. With ``full_output`` the objective history is returned
    alongside the minimizer for diagnostics.
    """
    b = np.asarray(p_exp, dtype=float).ravel()
    m = lam.matrix
    if m.shape[0] != b.size:
        raise ValueError("calibration matrix and vector dimensions differ")
    lip = _largest_squared_singular_value(m)
    step = 1.0 / lip if lip > 0 else 1.0
    p = project_to_simplex(b)
    resid = m @ p - b
    obj = float(resid @ resid)
    history = [obj]
    converged = False
    for _ in range(max_iter):
        grad = m.T @ resid
        p_next = project_to_simplex(p - step * grad)
        resid_next = m @ p_next - b
        obj_next = float(resid_next @ resid_next)
        decrease = obj - obj_next
        p, resid, obj = p_next, resid_next, obj_next
        history.append(obj)
        # The fixed step guarantees descent analytically, so a decrease below
        # tol (including float-level negatives) means the iteration stalled.
        if decrease < tol:
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"no convergence in {max_iter} iterations (objective {obj:.3e})"
        )
    if full_output:
        return p, {"objective": history, "iterations": len(history) - 1}
    return p
