import numpy as np
import pytest

from qecft.circuit import Circuit
from qecft.codes import encoded_css_basis_description
from qecft.dense import (
    GATES,
    CapacityError,
    DenseState,
    apply_cnot,
    apply_pauli,
    apply_unitary_1q,
    apply_unitary_2q,
    basis_state,
    check_kl,
    codespace_basis,
    equal_up_to_phase,
    measure_pauli,
    run_circuit_dense,
)
from qecft.pauli import iter_paulis, parse_pauli, pauli_matrix
from qecft.stabilizer import min_weight_logical, validate


def random_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return DenseState.normalized(n, v)


def test_apply_pauli_matches_matrix(rng):
    psi = random_state(3, rng)
    for p in [parse_pauli(s) for s in ("XYZ", "-iZIY", "IXI", "+iYYX")]:
        out = apply_pauli(psi, p)
        assert np.allclose(out.amplitudes, pauli_matrix(p) @ psi.amplitudes)


def test_single_qubit_gate_matches_kron(rng):
    psi = random_state(3, rng)
    h = GATES["H"]
    out = apply_unitary_1q(psi, 1, h)
    full = np.kron(np.kron(np.eye(2), h), np.eye(2))
    assert np.allclose(out.amplitudes, full @ psi.amplitudes)


def test_cnot_on_basis_states():
    for bits in range(8):
        out = apply_cnot(basis_state(3, bits), 0, 2)
        s = format(bits, "03b")
        want = s[0] + s[1] + str(int(s[2]) ^ int(s[0]))
        assert out.probability(want) == pytest.approx(1)


def test_two_qubit_gate_order(rng):
    psi = random_state(3, rng)
    u = np.eye(4)[[0, 1, 3, 2]]  # CNOT with the first listed qubit as control
    a = apply_unitary_2q(psi, 2, 0, u)
    b = apply_cnot(psi, 2, 0)
    assert np.allclose(a.amplitudes, b.amplitudes)


def test_rejects_non_unitary_and_bad_qubits(rng):
    psi = random_state(2, rng)
    with pytest.raises(ValueError):
        apply_unitary_1q(psi, 0, np.array([[1, 1], [0, 1]]))
    with pytest.raises(IndexError):
        apply_unitary_1q(psi, 5, GATES["H"])
    with pytest.raises(ValueError):
        apply_cnot(psi, 1, 1)


def test_state_validation():
    with pytest.raises(ValueError):
        DenseState(1, np.array([1, 1]))
    with pytest.raises(CapacityError):
        basis_state(15)


def test_measure_pauli_forced_and_probability():
    plus = apply_unitary_1q(basis_state(1), 0, GATES["H"])
    out, post, prob = measure_pauli(plus, parse_pauli("Z"), forced_outcome=-1)
    assert out == -1 and prob == pytest.approx(0.5)
    assert equal_up_to_phase(post, basis_state(1, 1))
    out, post, prob = measure_pauli(plus, parse_pauli("X"), forced_outcome=1)
    assert prob == pytest.approx(1)
    with pytest.raises(ValueError):
        measure_pauli(plus, parse_pauli("X"), forced_outcome=-1)
    with pytest.raises(ValueError):
        measure_pauli(plus, parse_pauli("+iX"), forced_outcome=1)


def test_measure_pauli_statistics(rng):
    psi = random_state(2, rng)
    p = parse_pauli("XY")
    expect = np.vdot(psi.amplitudes, pauli_matrix(p) @ psi.amplitudes).real
    _, _, prob = measure_pauli(psi, p, forced_outcome=1)
    assert prob == pytest.approx((1 + expect) / 2)


def test_global_phase_quotiented(rng):
    psi = random_state(2, rng)
    rotated = DenseState(2, psi.amplitudes * np.exp(0.7j))
    assert equal_up_to_phase(psi, rotated)
    assert not equal_up_to_phase(psi, apply_pauli(psi, parse_pauli("XI")))


def test_codespace_basis_five(five):
    basis = codespace_basis(five)
    assert len(basis) == 2
    for v in basis:
        for g in five.generators:
            assert equal_up_to_phase(apply_pauli(v, g), v)
    z = five.logical_z[0]
    assert np.allclose(apply_pauli(basis[0], z).amplitudes, basis[0].amplitudes)
    assert np.allclose(apply_pauli(basis[1], z).amplitudes, -basis[1].amplitudes)
    assert abs(basis[0].inner(basis[1])) < 1e-12


def test_steane_zero_is_even_codewords(steane):
    zero = codespace_basis(steane)[0]
    words = encoded_css_basis_description(steane).zero
    want = np.zeros(128, dtype=complex)
    for w in words:
        want[int(w, 2)] = 1
    assert equal_up_to_phase(zero, DenseState.normalized(7, want))


def test_kl_five_qubit(five):
    errors = [p for p in iter_paulis(5) if p.weight <= 1]
    report = check_kl(five, errors)
    assert report.satisfied
    assert max(report.max_offdiag_violation, report.max_identity_violation) < 1e-10
    bad = check_kl(five, errors + [min_weight_logical(five, 5)])
    assert not bad.satisfied


def test_kl_k0_code():
    code = validate([parse_pauli("XX"), parse_pauli("ZZ")])
    assert len(codespace_basis(code)) == 1
    # with a single code state every error set trivially satisfies the conditions
    assert check_kl(code, [parse_pauli("II"), parse_pauli("XI")]).satisfied


def test_run_circuit_pads_initial_state():
    circ = Circuit.from_text("@qubits 2\nH 0\nCNOT 0 1\n")
    out, _ = run_circuit_dense(circ, basis_state(1))
    bell = DenseState.normalized(2, [1, 0, 0, 1])
    assert equal_up_to_phase(out, bell)


def test_run_circuit_forced_and_rng(rng):
    circ = Circuit.from_text("@qubits 1\nPREP_X 0\nMZ 0 -> c0\n")
    _, res = run_circuit_dense(circ, forced={"c0": 1})
    assert res.bits["c0"] == 1 and res.probabilities["c0"] == pytest.approx(0.5)
    seen = {run_circuit_dense(circ, rng=rng)[1].bits["c0"] for _ in range(30)}
    assert seen == {0, 1}


def test_t_preparation_and_px_check():
    circ = Circuit.from_text("@qubits 1\nPREP_T 0\n")
    out, _ = run_circuit_dense(circ)
    want = DenseState.normalized(1, [1, np.exp(1j * np.pi / 4)])
    assert equal_up_to_phase(out, want)
