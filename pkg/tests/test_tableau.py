import numpy as np
import pytest

from qecft.circuit import Circuit, Op
from qecft.dense import GATES, DenseState, apply_pauli, basis_state, equal_up_to_phase, run_circuit_dense
from qecft.pauli import PauliOperator, iter_paulis, parse_pauli, pauli_matrix
from qecft.tableau import (
    PauliFrame,
    apply_cnot,
    apply_h,
    apply_pauli as tab_pauli,
    apply_s,
    conjugate,
    measure_pauli,
    new_tableau,
    peek_pauli,
    run_circuit_tableau,
    state_equal,
)

ONE = ["H", "S", "SDG", "X", "Y", "Z"]
TWO = ["CNOT", "CZ", "CY"]
U = {**GATES}
U_TWO = {
    "CNOT": np.eye(4)[[0, 1, 3, 2]],
    "CZ": np.diag([1, 1, 1, -1]),
    "CY": np.block([[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), GATES["Y"]]]),
}


def gate_matrix(name, qubits, n):
    if len(qubits) == 1:
        mats = [U[name] if q == qubits[0] else np.eye(2) for q in range(n)]
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out
    # build via permutation for two-qubit gates
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    a, b = qubits
    g = U_TWO[name]
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        idx = bits[a] * 2 + bits[b]
        for row_local in range(4):
            amp = g[row_local, idx]
            if amp == 0:
                continue
            nb = list(bits)
            nb[a], nb[b] = row_local >> 1, row_local & 1
            row = sum(bit << (n - 1 - q) for q, bit in enumerate(nb))
            out[row, col] += amp
    return out


@pytest.mark.parametrize("gate", ONE + TWO)
def test_conjugation_matches_matrices(gate):
    n = 2
    qubits = (0,) if gate in ONE else (0, 1)
    u = gate_matrix(gate, qubits, n)
    for p in iter_paulis(n):
        q = conjugate(p, gate, qubits)
        assert np.allclose(pauli_matrix(q), u @ pauli_matrix(p) @ u.conj().T)


def random_circuit(n, gates, rng):
    ops = []
    for _ in range(gates):
        if n > 1 and rng.random() < 0.35:
            a, b = rng.choice(n, size=2, replace=False)
            ops.append(Op(str(rng.choice(TWO)), (int(a), int(b))))
        else:
            ops.append(Op(str(rng.choice(ONE)), (int(rng.integers(n)),)))
    return Circuit(n, [[op] for op in ops])


def tableau_to_dense(t):
    """Common +1 eigenvector of the stabilizer rows."""
    v = np.zeros(1 << t.n, dtype=complex)
    for seed in range(1 << t.n):
        v = np.zeros(1 << t.n, dtype=complex)
        v[seed] = 1
        for s in t.stabilizers:
            v = (v + pauli_matrix(s) @ v) / 2
        if np.linalg.norm(v) > 1e-6:
            break
    return DenseState.normalized(t.n, v)


def test_random_circuits_agree_with_dense():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        circ = random_circuit(n, int(rng.integers(0, 41)), rng)
        t, _ = run_circuit_tableau(circ)
        t.assert_valid()
        dense, _ = run_circuit_dense(circ)
        assert equal_up_to_phase(tableau_to_dense(t), dense)
        for s in t.stabilizers:
            assert np.allclose(pauli_matrix(s) @ dense.amplitudes, dense.amplitudes)


def test_random_measurements_agree_with_dense():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(1, 5))
        circ = random_circuit(n, 15, rng)
        t, _ = run_circuit_tableau(circ)
        dense, _ = run_circuit_dense(circ)
        p = PauliOperator(n, int(rng.integers(1 << n)), int(rng.integers(1 << n)))
        if not p.is_hermitian:
            continue
        ev = np.vdot(dense.amplitudes, pauli_matrix(p) @ dense.amplitudes).real
        peek = peek_pauli(t, p)
        if abs(abs(ev) - 1) < 1e-9:
            assert peek == round(ev)
        else:
            assert peek == 0 and abs(ev) < 1e-9


def test_determined_measurement_consumes_no_randomness():
    t = new_tableau(2)
    rng = np.random.default_rng(0)
    before = rng.bit_generator.state
    assert measure_pauli(t, parse_pauli("ZI"), rng) == 1
    assert measure_pauli(t, parse_pauli("-ZZ"), rng) == -1
    assert rng.bit_generator.state == before


def test_random_measurement_collapses():
    t = new_tableau(1)
    apply_h(t, 0)
    out = measure_pauli(t, parse_pauli("Z"), forced=-1)
    assert out == -1
    assert peek_pauli(t, parse_pauli("Z")) == -1
    with pytest.raises(ValueError):
        measure_pauli(t, parse_pauli("X"))  # random, no rng


def test_bell_state_equality():
    a, b = new_tableau(2), new_tableau(2)
    apply_h(a, 0)
    apply_cnot(a, 0, 1)
    apply_h(b, 1)
    apply_cnot(b, 1, 0)
    assert state_equal(a, b)
    tab_pauli(b, parse_pauli("ZI"))
    assert not state_equal(a, b)


def test_s_squared_is_z():
    t = new_tableau(1)
    apply_h(t, 0)
    apply_s(t, 0)
    apply_s(t, 0)
    assert peek_pauli(t, parse_pauli("X")) == -1


def test_pauli_frame_propagation_matches_conjugation():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = 4
        circ = random_circuit(n, 20, rng)
        circ = Circuit(n, [m for m in circ.moments if m[0].name not in ("X", "Y", "Z")])
        e = PauliOperator(n, int(rng.integers(16)), int(rng.integers(16)))
        frame = PauliFrame(n)
        frame.apply_pauli(tuple(range(n)), e)
        want = e
        for m in circ.moments:
            for op in m:
                frame.apply(op)
                want = conjugate(want, op.name, op.qubits)
        assert frame.pauli() == want.unsigned()


def test_tableau_rejects_non_clifford():
    from qecft.circuit import UnsupportedOperation
    with pytest.raises(UnsupportedOperation):
        run_circuit_tableau(Circuit.from_text("@qubits 1\nPREP_T 0\n"))


def test_dense_pauli_on_tableau_state():
    t = new_tableau(2)
    apply_h(t, 0)
    apply_cnot(t, 0, 1)
    dense = tableau_to_dense(t)
    assert equal_up_to_phase(apply_pauli(dense, parse_pauli("XX")), dense)
    assert not equal_up_to_phase(basis_state(2), dense)
