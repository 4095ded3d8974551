import numpy as np
import pytest

from qecft.circuit import Circuit, CircuitError, Op, UnsupportedOperation
from qecft.codes import UnsupportedCodeError, bit_flip_code, css_code, hamming_code, five_qubit_code
from qecft.dense import GATES, DenseState, apply_pauli, codespace_basis, equal_up_to_phase, run_circuit_dense
from qecft.ft import (
    BREAKS,
    PRESERVES,
    cat_measurement_circuit,
    check_transversal_clifford,
    encoder_ops,
    fault_injection_check,
    pi8_ancilla_check_circuit,
    pi8_injection_circuit,
    reduced_weight,
    shor_ec_round,
    steane_ec_circuit,
    transversal_cnot,
    verification_pairs,
)
from qecft.pauli import PauliOperator, parse_pauli, single


def random_qubit(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def expect(state: DenseState, p: PauliOperator, qubits) -> float:
    full = p.embed(state.n, tuple(qubits))
    return float(np.vdot(state.amplitudes, apply_pauli(state, full).amplitudes).real)


def logical_state(code, amps):
    zero, one = codespace_basis(code)
    return DenseState.normalized(code.n, amps[0] * zero.amplitudes + amps[1] * one.amplitudes)


def bloch(state, code, qubits):
    return [expect(state, code.logical_operator(letter), qubits) for letter in "XYZ"]


# -- transversal gates --------------------------------------------------------------

def test_transversal_cnot_layout(steane):
    circ = transversal_cnot(steane)
    assert circ.num_qubits == 14 and circ.depth == 1
    assert circ.count("CNOT") == 7
    assert circ.registers["block_a"] == tuple(range(7))
    with pytest.raises(CircuitError):
        transversal_cnot(steane, range(7), range(6))
    with pytest.raises(CircuitError):
        transversal_cnot(steane, range(7), range(3, 10))


@pytest.mark.parametrize("gate, name", [("H", "H"), ("S", "SDG"), ("SDG", "S"), ("CNOT", "CNOT")])
def test_steane_transversal_cliffords(steane, gate, name):
    action = check_transversal_clifford(steane, gate)
    assert action.verdict == PRESERVES
    assert action.gate == name


def test_five_qubit_code_breaks_under_h(five):
    action = check_transversal_clifford(five, "H")
    assert action.verdict == BREAKS and action.broken_generators
    assert action.describe().startswith(BREAKS)


def test_transversal_pauli_is_logical_pauli(five):
    action = check_transversal_clifford(five, parse_pauli("XXXXX"))
    assert action.preserves
    assert action.gate.startswith("PAULI")
    action = check_transversal_clifford(five, "PAULI", parse_pauli("IIIII"))
    assert action.gate == "I"


def test_css_codes_admit_transversal_cnot():
    code = css_code(hamming_code(), hamming_code())
    assert check_transversal_clifford(code, "CNOT").gate == "CNOT"
    assert check_transversal_clifford(bit_flip_code(3), "CNOT").gate == "CNOT"


def test_non_clifford_is_rejected(steane):
    with pytest.raises(UnsupportedOperation):
        check_transversal_clifford(steane, "T")
    with pytest.raises(UnsupportedOperation):
        check_transversal_clifford(steane, "FROB")


# -- cat-state measurement ----------------------------------------------------------------

def test_verification_pairs_cover_every_qubit():
    pairs = verification_pairs(4, 2)
    assert len(pairs) == 2
    touched = {q for rnd in pairs for pair in rnd for q in pair}
    assert touched == set(range(4))
    assert verification_pairs(1, 3) == [[], [], []]


def test_cat_circuit_shape():
    circ = cat_measurement_circuit(2, parse_pauli("ZZ"))
    assert len(circ.registers["cat"]) == 2
    counts = circ.gate_counts()
    assert counts["CZ"] == 2
    assert "parity" in circ.notes
    with pytest.raises(ValueError):
        cat_measurement_circuit(2, parse_pauli("II"))
    with pytest.raises(ValueError):
        cat_measurement_circuit(3, parse_pauli("ZZ"))


def test_cat_measurement_reads_eigenvalue(steane):
    zero = codespace_basis(steane)[0]
    circ = cat_measurement_circuit(steane, steane.logical_z[0])
    for seed in range(3):
        _, res = run_circuit_dense(circ, zero, rng=np.random.default_rng(seed))
        assert res.bits[circ.notes["parity"]] == 0
    flipped = apply_pauli(zero, steane.logical_x[0])
    _, res = run_circuit_dense(circ, flipped, rng=np.random.default_rng(0))
    assert res.bits[circ.notes["parity"]] == 1


def test_cat_measurement_of_generator_on_error(five):
    zero = codespace_basis(five)[0]
    g = five.generators[0]
    circ = cat_measurement_circuit(five, g)
    e = single(5, 1, "X")  # anticommutes with XZZXI
    _, res = run_circuit_dense(circ, apply_pauli(zero, e), rng=np.random.default_rng(1))
    assert res.bits[circ.notes["parity"]] == 1


# -- full error correction ------------------------------------------------------------------

def test_shor_ec_structure(five):
    circ = shor_ec_round(five, 3)
    assert circ.count("ABORT_IF") > 0
    assert len(circ.notes["syndrome"].split()) == 4
    # one cat gadget per generator per repetition
    assert sum(1 for op in circ.ops() if op.name == "MZ" and op.qubits[0] in circ.registers["cat"]) \
        == 12 * five.generators[0].weight
    with pytest.raises(ValueError):
        shor_ec_round(five, 2)
    with pytest.raises(ValueError):
        shor_ec_round(five, 3, vote_mode="plurality")


def _check_ec(circ, code, rng, errors):
    for e in errors:
        amps = random_qubit(rng)
        clean = logical_state(code, amps)
        want = bloch(clean, code, range(code.n))
        state, res = run_circuit_dense(circ, apply_pauli(clean, e), rng=rng)
        assert not res.aborted
        data = circ.registers["data"]
        for g in code.generators:
            assert expect(state, g, data) == pytest.approx(1, abs=1e-9)
        assert bloch(state, code, data) == pytest.approx(want, abs=1e-9)


def test_shor_ec_corrects_single_errors(five, rng):
    circ = shor_ec_round(five, 1)
    errors = [single(5, q, letter) for q in range(5) for letter in "XYZ"][::4] + [PauliOperator(5, 0, 0)]
    _check_ec(circ, five, rng, errors)


def test_steane_ec_corrects_single_errors(steane, rng):
    circ = steane_ec_circuit(steane)
    assert circ.num_qubits == 14
    assert "ancilla_prep" in circ.notes
    errors = [single(7, q, letter) for q, letter in [(0, "X"), (3, "Y"), (6, "Z")]]
    _check_ec(circ, steane, rng, errors)


def test_steane_ec_needs_css(five):
    with pytest.raises(UnsupportedCodeError):
        steane_ec_circuit(five)


def test_encoder_prepares_row_space():
    rows = [0b1111000, 0b1100110, 0b1010101]
    circ = Circuit(7, [[Op(n, q)] for n, q in encoder_ops(rows, tuple(range(7)))])
    state, _ = run_circuit_dense(circ)
    probs = np.abs(state.amplitudes) ** 2
    support = {i for i, pr in enumerate(probs) if pr > 1e-12}
    assert len(support) == 8
    for i in support:
        assert probs[i] == pytest.approx(1 / 8)


# -- pi/8 gadgets -----------------------------------------------------------------------------

def test_pi8_injection_both_branches(rng):
    circ = pi8_injection_circuit()
    bit = circ.notes["outcome"]
    out = circ.registers["output"][0]
    for _ in range(3):
        psi = random_qubit(rng)
        want = DenseState(1, GATES["T"] @ psi)
        for branch in (0, 1):
            state, res = run_circuit_dense(circ, DenseState(1, psi), forced={bit: branch})
            assert res.bits[bit] == branch
            got = state.subsystem([out], {0: branch})
            assert equal_up_to_phase(got, want)


def test_pi8_check_accepts_good_ancilla():
    circ = pi8_ancilla_check_circuit(include_preparation=True)
    bit = circ.notes["accept_if_zero"]
    _, res = run_circuit_dense(circ, rng=np.random.default_rng(0))
    assert res.bits[bit] == 0
    assert res.probabilities[bit] == pytest.approx(1)
    # |0> is an equal mixture of the two eigenstates
    circ = pi8_ancilla_check_circuit()
    _, res = run_circuit_dense(circ, forced={circ.notes["accept_if_zero"]: 0})
    assert res.probabilities[circ.notes["accept_if_zero"]] == pytest.approx(0.5)


def test_pi8_circuits_round_trip():
    for circ in (pi8_injection_circuit(), pi8_ancilla_check_circuit(True)):
        assert Circuit.from_text(circ.to_text()).to_text() == circ.to_text()
        assert not circ.is_clifford()


# -- fault injection ---------------------------------------------------------------------------

def test_reduced_weight(steane):
    assert reduced_weight(steane, parse_pauli("IIIZZZZ")) == 0
    assert reduced_weight(steane, parse_pauli("IIIZZZI")) == 1
    assert reduced_weight(steane, parse_pauli("XXIIIII")) is None


@pytest.fixture(scope="module")
def five_code():
    return five_qubit_code()


def test_shor_ec_is_fault_tolerant_for_five_qubit_code(five_code):
    report = fault_injection_check(shor_ec_round(five_code), five_code)
    assert report.ok, report.violations[:3]
    assert report.trials > report.locations
    assert report.flagged > 0


def test_bitwise_vote_is_not_fault_tolerant(five_code):
    report = fault_injection_check(shor_ec_round(five_code, vote_mode="bitwise"), five_code)
    assert not report.ok


def test_unverified_cat_is_not_fault_tolerant(five_code):
    report = fault_injection_check(shor_ec_round(five_code, verify_rounds=0), five_code)
    assert not report.ok


def test_transversal_cnot_spreads_no_errors_within_a_block(steane):
    circ = transversal_cnot(steane)
    report = fault_injection_check(circ, steane, block_registers=("block_a", "block_b"))
    assert report.ok


def test_gadget_text_round_trip(five, steane):
    for circ in (shor_ec_round(five), steane_ec_circuit(steane), cat_measurement_circuit(five, five.generators[1])):
        again = Circuit.from_text(circ.to_text())
        assert again.to_text() == circ.to_text()
        assert again.registers == circ.registers
