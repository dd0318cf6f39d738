import numpy as np
import pytest

from nlmagic import (
    Circuit,
    GateSpec,
    NoiseConfig,
    clifford_cardinality,
    gate_matrix,
    purity,
    run_circuit,
    single_qubit_clifford_group,
    sre_exact,
    state_circuit,
)
from nlmagic.circuits import canonical_phase

from helpers import random_pure


ALL_1Q = ["Rx", "Ry", "Rz", "Rxy", "H", "S", "T", "X", "Y", "Z"]


@pytest.mark.parametrize("kind", ALL_1Q + ["CZ", "CNOT"])
def test_gate_matrices_unitary(kind):
    if kind in ("CZ", "CNOT"):
        g = GateSpec(kind, (0, 1))
    elif kind == "Rxy":
        g = GateSpec(kind, (0,), (0.3, 1.1))
    elif kind in ("Rx", "Ry", "Rz"):
        g = GateSpec(kind, (0,), (0.7,))
    else:
        g = GateSpec(kind, (0,))
    u = gate_matrix(g)
    assert np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < 1e-12


def test_cz_matrix():
    assert np.allclose(gate_matrix(GateSpec("CZ", (0, 1))), np.diag([1, 1, 1, -1]))


def test_t_gate_phases():
    t = gate_matrix(GateSpec("T", (0,)))
    assert np.allclose(t, np.diag([np.exp(-1j * np.pi / 8), np.exp(1j * np.pi / 8)]))


def test_t_on_plus_magic():
    circ = Circuit(1, (GateSpec("H", (0,)), GateSpec("T", (0,))))
    rho = run_circuit(circ)
    assert sre_exact(rho) == pytest.approx(np.log2(4 / 3), abs=1e-12)


def test_cnot_is_its_decomposition():
    u = gate_matrix(GateSpec("CNOT", (0, 1)))
    ideal = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )
    assert np.allclose(canonical_phase(u), canonical_phase(ideal), atol=1e-12)


def test_rejects_unknown_gate():
    with pytest.raises(ValueError):
        GateSpec("Toffoli", (0, 1))


def test_gate_spec_validation():
    with pytest.raises(ValueError):
        GateSpec("CZ", (0, 0))
    with pytest.raises(ValueError):
        GateSpec("Rx", (0,))
    with pytest.raises(ValueError):
        GateSpec("H", (0,), (0.1,))
    with pytest.raises(ValueError):
        Circuit(1, (GateSpec("H", (1,)),))


def test_run_circuit_preserves_purity_without_noise():
    rng = np.random.default_rng(3)
    kinds = ["H", "S", "T", "X"]
    for _ in range(10):
        gates = [GateSpec(rng.choice(kinds), (int(rng.integers(0, 2)),)) for _ in range(6)]
        gates.append(GateSpec("CZ", (0, 1)))
        rho = run_circuit(Circuit(2, tuple(gates)))
        assert purity(rho) == pytest.approx(1.0, abs=1e-12)


def test_depolarizing_attaches_to_each_cz():
    p = 0.96
    one = run_circuit(state_circuit("lm"), NoiseConfig(p_dep_cz=p))
    assert purity(one) == pytest.approx(0.75 * p**2 + 0.25, abs=1e-12)
    two_cz = Circuit(
        2, (GateSpec("H", (0,)), GateSpec("CNOT", (0, 1)), GateSpec("CZ", (0, 1)))
    )
    rho = run_circuit(two_cz, NoiseConfig(p_dep_cz=p))
    assert purity(rho) == pytest.approx(0.75 * p**4 + 0.25, abs=1e-12)


def test_clifford_group_order_and_identity():
    group = single_qubit_clifford_group()
    assert len(group) == 24
    assert group[0].canonical_id == 0
    assert np.allclose(group[0].matrix, np.eye(2))
    assert len(group) == clifford_cardinality(1)


def test_clifford_group_distinct_and_closed():
    group = single_qubit_clifford_group()
    mats = [e.matrix for e in group]
    for i, a in enumerate(mats):
        for j, b in enumerate(mats):
            prod = canonical_phase(a @ b)
            hits = sum(np.allclose(prod, m, atol=1e-9) for m in mats)
            assert hits == 1, f"product {i},{j} matched {hits} elements"


def test_clifford_invariance_on_stabilizer_states():
    zero = run_circuit(Circuit(1, ()))
    for elem in single_qubit_clifford_group():
        rotated = elem.matrix @ zero.matrix @ elem.matrix.conj().T
        from nlmagic import DensityMatrix

        assert sre_exact(DensityMatrix(rotated)) < 1e-10


def test_clifford_cardinality_values():
    assert clifford_cardinality(1) == 24
    assert clifford_cardinality(2) == 11520
    assert clifford_cardinality(1) ** 2 == 576
    with pytest.raises(ValueError):
        clifford_cardinality(0)


# ---------------------------------------------------------------------------
# state catalogue


def _state_vector(state_id, params=None):
    rho = run_circuit(state_circuit(state_id, params))
    eigs, vecs = np.linalg.eigh(rho.matrix)
    return vecs[:, -1]


def test_lm_state_amplitudes():
    vec = _state_vector("lm")
    vec = vec * np.exp(-1j * np.angle(vec[0]))
    want = np.array([1, 0, 0, np.exp(1j * np.pi / 4)]) / np.sqrt(2)
    assert np.allclose(vec, want, atol=1e-10)


def test_lm_erased_is_stabilizer():
    rho = run_circuit(state_circuit("lm_erased"))
    assert sre_exact(rho) < 1e-10


def test_m_state_amplitudes():
    # 2^(-3/2) [c+ (|00> + e^{i pi/8}|01>) - i c- (|10> - e^{i pi/8}|11>)]
    # with c_pm = sqrt(2 pm sqrt(2 + sqrt(2))); the entangling gate flips the
    # sign of the last component relative to a bare product of the factors.
    cp = np.sqrt(2 + np.sqrt(2 + np.sqrt(2)))
    cm = np.sqrt(2 - np.sqrt(2 + np.sqrt(2)))
    ph = np.exp(1j * np.pi / 8)
    want = np.array([cp, ph * cp, -1j * cm, 1j * ph * cm]) / (2 * np.sqrt(2))
    assert np.linalg.norm(want) == pytest.approx(1.0, abs=1e-12)
    assert cp**2 + cm**2 == pytest.approx(4.0, abs=1e-12)
    vec = _state_vector("m")
    vec = vec * np.exp(-1j * np.angle(vec[0]))
    assert np.allclose(vec, want, atol=1e-10)


def test_m_state_ideal_magic():
    rho = run_circuit(state_circuit("m"))
    assert sre_exact(rho) == pytest.approx(2 - np.log2(3.0625), abs=1e-10)


def test_nlm_state_vector():
    theta = 0.7
    vec = _state_vector("nlm", {"theta": theta})
    vec = vec * np.exp(-1j * np.angle(vec[0]))
    want = np.array([np.cos(theta / 2), 0, 0, -1j * np.sin(theta / 2)])
    assert np.allclose(vec, want, atol=1e-10)


def test_nlm_bell_point_has_no_magic():
    rho = run_circuit(state_circuit("nlm", {"theta": np.pi / 2}))
    assert sre_exact(rho) < 1e-10


def test_psi_catalogue_magic_values():
    assert sre_exact(run_circuit(state_circuit("psi0"))) < 1e-12
    assert sre_exact(run_circuit(state_circuit("psi1"))) < 1e-12
    t_plus = run_circuit(state_circuit("psi1", {"phase": np.pi / 4}))
    assert sre_exact(t_plus) == pytest.approx(np.log2(4 / 3), abs=1e-12)
    assert sre_exact(run_circuit(state_circuit("psi2"))) < 1e-12
    both_t = run_circuit(
        state_circuit("psi3", {"phase0": np.pi / 4, "phase1": np.pi / 4})
    )
    assert sre_exact(both_t) == pytest.approx(2 * np.log2(4 / 3), abs=1e-12)
    assert sre_exact(run_circuit(state_circuit("psi4"))) < 1e-10


def test_state_circuit_errors():
    with pytest.raises(ValueError):
        state_circuit("nope")
    with pytest.raises(ValueError):
        state_circuit("nlm")
    with pytest.raises(ValueError):
        state_circuit("m_sweep", {"gamma": 0.1})


def test_m_sweep_appends_rotations():
    base = state_circuit("m")
    swept = state_circuit("m_sweep", {"gamma": 0.3, "phi": 0.4})
    assert len(swept.gates) == len(base.gates) + 2
    assert swept.gates[-2].angles == (0.3,)
    assert swept.gates[-1].angles == (0.4,)
