"""Randomized Clifford measurements for purity and stabilizer purity.

The protocol applies random tensor products of single-qubit Cliffords,
records the computational-basis outcome distribution for each draw, and
combines pairs and quadruples of outcome strings with (-2)^(-Hamming)
weights. Writing ``g(u) = sum_s p(s) p(s XOR u)`` for the XOR
autocorrelation of one outcome vector, the two per-draw statistics are

    X_P = d * sum_u (-2)^(-|u|) g(u)
    X_W = sum_{u,v} (-2)^(-|u XOR v|) g(u) g(v)

whose averages over the Clifford ensemble equal Tr(rho^2) and
d^-2 sum_P Tr(P rho)^4. Means, sample standard deviations (the N-1 form)
and sampling errors s/sqrt(N) are reported for every estimator. The same
shot data serves both statistics; the O(1/N_shot) plug-in bias is accepted
and quantified in tests rather than corrected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .circuits import single_qubit_clifford_group
from .noise import NoiseConfig, clean_probability_vector, sample_shots
from .qcore import DensityMatrix, tensor_all

_LN2 = float(np.log(2.0))


class UndersampledDataError(ValueError):
    """Estimator means are incompatible with taking logarithms."""


@dataclass(frozen=True)
class EstimateWithError:
    """Mean, spread and finite-sampling error of a per-draw statistic."""

    mean: float
    sample_std: float
    sampling_error: float
    n_samples: int

    def __post_init__(self):
        if self.sample_std < 0:
            raise ValueError("sample_std must be nonnegative")
        if abs(self.sampling_error - self.sample_std / np.sqrt(self.n_samples)) > 1e-12:
            raise ValueError("sampling_error must equal sample_std / sqrt(n)")

    @classmethod
    def from_samples(cls, values: np.ndarray) -> "EstimateWithError":
        v = np.asarray(values, dtype=float)
        if v.size < 2:
            raise ValueError("need at least two samples")
        std = float(v.std(ddof=1))
        return cls(float(v.mean()), std, std / np.sqrt(v.size), int(v.size))


@dataclass(frozen=True)
class RcmDataset:
    """Outcome probability vectors for a sequence of Clifford draws."""

    clifford_ids: np.ndarray
    prob_vectors: np.ndarray
    n_shot: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        ids = np.array(self.clifford_ids, dtype=int)
        probs = np.array(self.prob_vectors, dtype=float)
        if ids.ndim != 2 or probs.ndim != 2 or ids.shape[0] != probs.shape[0]:
            raise ValueError("ids and probability vectors must align per sample")
        if ids.shape[0] < 2:
            raise ValueError("variance estimation needs at least two samples")
        if probs.shape[1] != 2 ** ids.shape[1]:
            raise ValueError("probability vectors do not match the qubit count")
        if (ids < 0).any() or (ids >= 24).any():
            raise ValueError("Clifford ids must lie in [0, 24)")
        probs = np.array([clean_probability_vector(p) for p in probs])
        ids.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "clifford_ids", ids)
        object.__setattr__(self, "prob_vectors", probs)

    @property
    def n_samples(self) -> int:
        return self.clifford_ids.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.clifford_ids.shape[1]

    def with_vectors(self, prob_vectors: np.ndarray) -> "RcmDataset":
        return RcmDataset(self.clifford_ids, prob_vectors, self.n_shot, self.seed)

    def to_json(self) -> str:
        payload = {
            "version": 1,
            "num_qubits": self.num_qubits,
            "clifford_ids": self.clifford_ids.tolist(),
            "prob_vectors": self.prob_vectors.tolist(),
            "n_shot": self.n_shot,
            "seed": self.seed,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RcmDataset":
        payload = json.loads(text)
        return cls(
            np.array(payload["clifford_ids"], dtype=int),
            np.array(payload["prob_vectors"], dtype=float),
            payload.get("n_shot"),
            payload.get("seed", 0),
        )


def sample_local_cliffords(n_qubits: int, n_rand: int, seed: int) -> np.ndarray:
    """Uniform i.i.d. id tuples over {0..23}^N, shape (n_rand, n_qubits).

    When ``n_rand`` equals 24^N every tuple is returned exactly once, in
    lexicographic order, turning the sample mean into an exact group average.
    """
    if n_rand < 2:
        raise ValueError("n_rand must be >= 2")
    if n_rand == 24**n_qubits:
        grids = np.meshgrid(*([np.arange(24)] * n_qubits), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return rng.integers(0, 24, size=(n_rand, n_qubits))


def exhaustive_size(n_qubits: int) -> int:
    return 24**n_qubits


def collect_dataset(
    rho: DensityMatrix,
    tuples: Iterable[Sequence[int]],
    noise: NoiseConfig,
    workers: int = 1,
) -> RcmDataset:
    """Simulate the measurement stage for each Clifford draw.

    For every id tuple the local Clifford product is applied to ``rho``,
    the diagonal Born probabilities are read off, readout corruption is
    applied if configured, and finite shots are drawn if configured. Shot
    seeds derive from (noise.seed, sample index) and results are written
    back by index, so the output is bit-identical for any ``workers``.
    """
    group = single_qubit_clifford_group()
    ids = np.array(list(tuples), dtype=int)
    vectors = np.empty((ids.shape[0], rho.dim))

    def fill(k: int) -> None:
        c = tensor_all(*(group[i].matrix for i in ids[k]))
        p = np.einsum("ij,jk,ik->i", c, rho.matrix, c.conj()).real
        p = clean_probability_vector(p)
        if noise.readout_lambda is not None:
            p = clean_probability_vector(noise.readout_lambda.matrix @ p)
        if noise.n_shot is not None:
            p = sample_shots(p, noise.n_shot, _sample_seed(noise.seed, k))
        vectors[k] = p

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(ids.shape[0])))
    else:
        for k in range(ids.shape[0]):
            fill(k)
    return RcmDataset(ids, vectors, noise.n_shot, noise.seed)


def _sample_seed(seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=seed, spawn_key=(index,))


def hamming_xor_weight(strings: Sequence[str]) -> int:
    """Hamming weight of the bitwise XOR of k equal-length bitstrings."""
    if len(strings) not in (2, 4):
        raise ValueError("XOR weight is used for 2 or 4 strings")
    length = len(strings[0])
    if any(len(s) != length for s in strings):
        raise ValueError("bitstrings must have equal length")
    acc = 0
    for s in strings:
        acc ^= int(s, 2)
    return bin(acc).count("1")


@lru_cache(maxsize=8)
def _xor_index(d: int) -> np.ndarray:
    u = np.arange(d)
    table = u[:, None] ^ u[None, :]
    table.flags.writeable = False
    return table


@lru_cache(maxsize=8)
def _neg_half_weights(d: int) -> np.ndarray:
    w = np.array([(-2.0) ** (-bin(u).count("1")) for u in range(d)])
    w.flags.writeable = False
    return w


@lru_cache(maxsize=8)
def _pair_weight_matrix(d: int) -> np.ndarray:
    w = _neg_half_weights(d)[_xor_index(d)]
    w.flags.writeable = False
    return w


def _autocorrelation(p: np.ndarray) -> np.ndarray:
    return (p[_xor_index(p.size)] * p[None, :]).sum(axis=1)


def purity_statistic(p: np.ndarray) -> float:
    """Per-draw pair statistic d * sum (-2)^-|s1 XOR s2| P(s1) P(s2)."""
    d = p.size
    g = _autocorrelation(p)
    return float(d * (_neg_half_weights(d) * g).sum())


def stabilizer_purity_statistic(p: np.ndarray) -> float:
    """Per-draw quadruple statistic with (-2)^-|s1 XOR s2 XOR s3 XOR s4| weights.

    The sign and normalization are fixed so that the exhaustive
    exact-probability average reproduces d^-2 sum_P Tr(P rho)^4.
    """
    d = p.size
    g = _autocorrelation(p)
    return float(g @ _pair_weight_matrix(d) @ g)


def estimate_purity(ds: RcmDataset) -> EstimateWithError:
    values = np.array([purity_statistic(p) for p in ds.prob_vectors])
    return EstimateWithError.from_samples(values)


def estimate_stabilizer_purity(ds: RcmDataset) -> EstimateWithError:
    values = np.array([stabilizer_purity_statistic(p) for p in ds.prob_vectors])
    return EstimateWithError.from_samples(values)


def estimate_sre(ds: RcmDataset) -> EstimateWithError:
    """M2 estimate with first-order propagated sampling error.

    The purity and stabilizer-purity statistics are uncorrelated over the
    Clifford ensemble, so the M2 variance is the sum of the two relative
    variances scaled by 1/ln(2)^2.
    """
    west = estimate_stabilizer_purity(ds)
    pest = estimate_purity(ds)
    if west.mean <= 0.0 or pest.mean <= 0.0:
        raise UndersampledDataError(
            "nonpositive purity or stabilizer purity mean; collect more data"
        )
    d = 2**ds.num_qubits
    m2 = -np.log2(west.mean) + np.log2(pest.mean) - np.log2(d)
    n = ds.n_samples
    err = (
        np.sqrt(
            west.sample_std**2 / (n * west.mean**2)
            + pest.sample_std**2 / (n * pest.mean**2)
        )
        / _LN2
    )
    return EstimateWithError(float(m2), float(err * np.sqrt(n)), float(err), n)


def marginalize(p: np.ndarray, keep: set[int], num_qubits: Optional[int] = None) -> np.ndarray:
    """Marginal outcome distribution on the kept qubits.

    P(s_A) = sum_{s_B} P(s_A, s_B), with kept qubits keeping their order.
    """
    v = np.asarray(p, dtype=float)
    n = num_qubits or int(round(np.log2(v.size)))
    keep_sorted = sorted(keep)
    if not keep_sorted or len(keep_sorted) >= n:
        raise ValueError("keep must be a nonempty proper subset of the qubits")
    if keep_sorted[0] < 0 or keep_sorted[-1] >= n:
        raise ValueError(f"qubit indices {keep_sorted} out of range")
    t = v.reshape((2,) * n)
    axes = tuple(q for q in range(n) if q not in keep_sorted)
    return t.sum(axis=axes).ravel()


def estimate_rdm_purity(ds: RcmDataset, keep: set[int]) -> EstimateWithError:
    """Purity of the reduced state from marginals of the same outcome data."""
    n = ds.num_qubits
    values = np.array(
        [purity_statistic(marginalize(p, keep, n)) for p in ds.prob_vectors]
    )
    return EstimateWithError.from_samples(values)
