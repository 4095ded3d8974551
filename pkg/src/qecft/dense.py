"""
Dense state-vector oracle for small systems (at most 14 qubits).

Qubit 0 is the most significant bit of the amplitude index, so basis index
``b`` corresponds to the bit string ``format(b, f"0{n}b")`` read with qubit 0
first, matching the text form of Pauli operators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Backend, Circuit, CircuitError, ExecutionResult, Op, execute
from .pauli import DimensionError, PauliOperator
from .stabilizer import StabilizerCode

__all__ = [
    "MAX_QUBITS",
    "TOL",
    "CapacityError",
    "DenseState",
    "KLReport",
    "basis_state",
    "codespace_basis",
    "stabilizer_state",
    "check_kl",
    "apply_pauli",
    "apply_unitary_1q",
    "apply_unitary_2q",
    "apply_cnot",
    "measure_pauli",
    "run_circuit_dense",
    "equal_up_to_phase",
    "GATES",
]

MAX_QUBITS = 14
TOL = 1e-10

_W = np.exp(1j * np.pi / 4)
GATES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.diag([1, 1j]).astype(complex),
    "SDG": np.diag([1, -1j]).astype(complex),
    "T": np.diag([1, _W]).astype(complex),
    # e^{-i pi/4} S X: Hermitian, fixes |0> + e^{i pi/4}|1>
    "A": np.array([[0, np.conj(_W)], [_W, 0]], dtype=complex),
}


class CapacityError(ValueError):
    pass


def _controlled(u: np.ndarray) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = u
    return out


_TWO_QUBIT = {
    "CNOT": _controlled(GATES["X"]),
    "CX": _controlled(GATES["X"]),
    "CY": _controlled(GATES["Y"]),
    "CZ": _controlled(GATES["Z"]),
    "CPX": _controlled(GATES["A"]),
}


@dataclass(frozen=True, eq=False)
class DenseState:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n > MAX_QUBITS:
            raise CapacityError(f"{self.n} qubits exceeds the dense limit of {MAX_QUBITS}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n,):
            raise DimensionError(f"need {1 << self.n} amplitudes, got {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > TOL:
            raise ValueError(f"state is not normalized (norm {norm})")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, n: int, amps) -> DenseState:
        amps = np.asarray(amps, dtype=complex)
        return cls(n, amps / np.linalg.norm(amps))

    def tensor(self, other: DenseState) -> DenseState:
        return DenseState(self.n + other.n, np.kron(self.amplitudes, other.amplitudes))

    def inner(self, other: DenseState) -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def probability(self, bitstring: str) -> float:
        return float(abs(self.amplitudes[int(bitstring, 2)]) ** 2)

    def subsystem(self, qubits, given: dict[int, int]) -> DenseState:
        """Normalized state of ``qubits`` conditioned on the other qubits' values."""
        qubits = list(qubits)
        rest = [q for q in range(self.n) if q not in qubits]
        if sorted(given) != rest:
            raise ValueError("condition must fix exactly the remaining qubits")
        psi = self.amplitudes.reshape([2] * self.n)
        idx = tuple(given[q] if q in given else slice(None) for q in range(self.n))
        sub = psi[idx]
        # remaining axes are in increasing qubit order
        order = sorted(qubits)
        sub = np.moveaxis(sub, [order.index(q) for q in qubits], list(range(len(qubits))))
        return DenseState.normalized(len(qubits), sub.reshape(-1))


def equal_up_to_phase(a: DenseState, b: DenseState, tol: float = TOL) -> bool:
    """True when the states differ only by a global phase."""
    if a.n != b.n:
        return False
    overlap = a.inner(b)
    if abs(overlap) < 0.5:
        return False
    aligned = a.amplitudes * (overlap / abs(overlap))
    return bool(np.max(np.abs(aligned - b.amplitudes)) < tol)


def basis_state(n: int, bits: int | str = 0) -> DenseState:
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")
    idx = int(bits, 2) if isinstance(bits, str) else bits
    amps = np.zeros(1 << n, dtype=complex)
    amps[idx] = 1
    return DenseState(n, amps)


# -- raw vector kernels ---------------------------------------------------------

def _index_mask(mask: int, n: int) -> int:
    """Qubit-bit mask -> amplitude-index mask (qubit 0 is the top bit)."""
    out = 0
    for q in range(n):
        if mask >> q & 1:
            out |= 1 << (n - 1 - q)
    return out


def _pauli_vec(vec: np.ndarray, n: int, p: PauliOperator) -> np.ndarray:
    xm, zm = _index_mask(p.x_bits, n), _index_mask(p.z_bits, n)
    idx = np.arange(1 << n, dtype=np.int64)
    signs = 1 - 2 * (np.bitwise_count(idx & zm) & 1).astype(np.int8)
    phase = 1j ** ((p.phase_exponent + (p.x_bits & p.z_bits).bit_count()) % 4)
    out = np.empty_like(vec)
    out[idx ^ xm] = phase * signs * vec
    return out


def _u1_vec(vec: np.ndarray, n: int, q: int, u: np.ndarray) -> np.ndarray:
    psi = vec.reshape(1 << q, 2, 1 << (n - q - 1))
    return np.einsum("ab,ibj->iaj", u, psi).reshape(-1)


def _u2_vec(vec: np.ndarray, n: int, q1: int, q2: int, u: np.ndarray) -> np.ndarray:
    psi = vec.reshape([2] * n)
    psi = np.moveaxis(psi, [q1, q2], [0, 1])
    shape = psi.shape
    psi = (u @ psi.reshape(4, -1)).reshape(shape)
    return np.moveaxis(psi, [0, 1], [q1, q2]).reshape(-1)


def _check_unitary(u: np.ndarray, dim: int) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (dim, dim) or not np.allclose(u.conj().T @ u, np.eye(dim), atol=TOL):
        raise ValueError("matrix is not unitary")
    return u


def _check_qubit(state: DenseState, *qs: int) -> None:
    for q in qs:
        if not 0 <= q < state.n:
            raise IndexError(f"qubit {q} out of range")
    if len(set(qs)) != len(qs):
        raise ValueError("qubits must be distinct")


# -- public operations -------------------------------------------------------------

def apply_pauli(state: DenseState, p: PauliOperator) -> DenseState:
    if p.n != state.n:
        raise DimensionError("Pauli and state sizes differ")
    return DenseState(state.n, _pauli_vec(state.amplitudes, state.n, p))


def apply_unitary_1q(state: DenseState, qubit: int, u) -> DenseState:
    _check_qubit(state, qubit)
    u = _check_unitary(u, 2)
    return DenseState(state.n, _u1_vec(state.amplitudes, state.n, qubit, u))


def apply_unitary_2q(state: DenseState, q1: int, q2: int, u) -> DenseState:
    """``u`` acts on (q1, q2) with q1 as the more significant factor."""
    _check_qubit(state, q1, q2)
    u = _check_unitary(u, 4)
    return DenseState(state.n, _u2_vec(state.amplitudes, state.n, q1, q2, u))


def apply_cnot(state: DenseState, control: int, target: int) -> DenseState:
    return apply_unitary_2q(state, control, target, _TWO_QUBIT["CNOT"])


def measure_pauli(state: DenseState, p: PauliOperator, forced_outcome: int | None = None, rng=None):
    """Projective measurement of Hermitian ``p``.

    Returns ``(outcome, post_state, probability_of_outcome)``.
    """
    if p.n != state.n:
        raise DimensionError("Pauli and state sizes differ")
    if not p.is_hermitian:
        raise ValueError(f"{p} is not Hermitian")
    pv = _pauli_vec(state.amplitudes, state.n, p)
    plus = (state.amplitudes + pv) / 2
    prob_plus = float(np.vdot(plus, plus).real)
    if forced_outcome is None:
        if rng is None:
            raise ValueError("need forced_outcome or rng")
        outcome = 1 if rng.random() < prob_plus else -1
    elif forced_outcome in (1, -1):
        outcome = forced_outcome
    else:
        raise ValueError("forced outcome must be +1 or -1")
    branch = plus if outcome == 1 else (state.amplitudes - pv) / 2
    prob = prob_plus if outcome == 1 else 1 - prob_plus
    if prob < TOL:
        raise ValueError(f"outcome {outcome:+d} has zero probability")
    return outcome, DenseState(state.n, branch / np.sqrt(prob)), min(max(prob, 0.0), 1.0)


def outcome_probability(state: DenseState, p: PauliOperator) -> float:
    """Probability of the +1 outcome."""
    pv = _pauli_vec(state.amplitudes, state.n, p)
    plus = (state.amplitudes + pv) / 2
    return float(np.vdot(plus, plus).real)


def _fix_global_phase(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec) > 1e-8))
    return vec * (abs(vec[k]) / vec[k])


def stabilizer_state(generators, n: int | None = None) -> DenseState:
    """The state (or first codeword) fixed by commuting Hermitian Paulis.

    Seeds are computational basis states tried in lexicographic order.
    """
    gens = list(generators)
    n = gens[0].n if n is None else n
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")
    for seed in range(1 << n):
        v = np.zeros(1 << n, dtype=complex)
        v[seed] = 1
        for g in gens:
            v = (v + _pauli_vec(v, n, g)) / 2
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            return DenseState(n, _fix_global_phase(v / norm))
    raise RuntimeError("projector annihilated every seed; generators are inconsistent")


def codespace_basis(code: StabilizerCode) -> list[DenseState]:
    """Logical basis |x>, x = 0 .. 2^k - 1 (logical qubit 0 most significant).

    |0...0> is the common +1 eigenstate of the generators and every logical Z;
    the others are obtained by applying logical X representatives.
    """
    if code.n > MAX_QUBITS:
        raise CapacityError(f"{code.n} qubits exceeds the dense limit of {MAX_QUBITS}")
    zero = stabilizer_state(list(code.generators) + list(code.logical_z), code.n)
    out = []
    for x in range(1 << code.k):
        v = zero.amplitudes
        for j in range(code.k):
            if x >> (code.k - 1 - j) & 1:
                v = _pauli_vec(v, code.n, code.logical_x[j])
        out.append(DenseState(code.n, v))
    return out


@dataclass(frozen=True)
class KLReport:
    error_labels: list[str]
    c_matrix: np.ndarray
    max_offdiag_violation: float
    max_identity_violation: float
    tolerance: float = TOL

    @property
    def satisfied(self) -> bool:
        return self.max_offdiag_violation < self.tolerance and self.max_identity_violation < self.tolerance


def check_kl(code: StabilizerCode, errors, tol: float = TOL) -> KLReport:
    """Evaluate <psi_i| E_a^dag E_b |psi_j> over the logical basis."""
    errors = list(errors)
    if not errors:
        raise ValueError("need at least one error")
    basis = codespace_basis(code)
    psi = np.array([b.amplitudes for b in basis])            # (K, N)
    moved = np.array([[_pauli_vec(v, code.n, e) for v in psi] for e in errors])  # (A, K, N)
    full = np.einsum("aik,bjk->abij", moved.conj(), moved)
    K = len(basis)
    offdiag = full * (1 - np.eye(K))[None, None]
    diag = np.einsum("abii->abi", full)
    return KLReport(
        [str(e) for e in errors],
        full[:, :, 0, 0],
        float(np.max(np.abs(offdiag))) if K > 1 else 0.0,
        float(np.max(np.abs(diag - diag[:, :, :1]))),
        tol,
    )


# -- circuit execution ----------------------------------------------------------------

class DenseBackend(Backend):
    def __init__(self, state: DenseState, rng=None, forced: dict[str, int] | None = None):
        self.n = state.n
        self.vec = np.array(state.amplitudes)
        self.rng = rng
        self.forced = forced or {}
        self.probabilities: dict[str, float] = {}

    def state(self) -> DenseState:
        return DenseState.normalized(self.n, self.vec)

    def apply_pauli(self, qubits, pauli: PauliOperator) -> None:
        self.vec = _pauli_vec(self.vec, self.n, pauli.embed(self.n, qubits))

    def _z(self, q):
        return PauliOperator(self.n, 0, 1 << q)

    def _measure(self, p: PauliOperator, forced: int | None) -> tuple[int, float]:
        pv = _pauli_vec(self.vec, self.n, p)
        plus = (self.vec + pv) / 2
        prob_plus = float(np.vdot(plus, plus).real)
        if forced is None:
            if prob_plus > 1 - TOL:
                outcome = 1
            elif prob_plus < TOL:
                outcome = -1
            elif self.rng is None:
                raise CircuitError("random measurement outcome but no rng or forced value")
            else:
                outcome = 1 if self.rng.random() < prob_plus else -1
        else:
            outcome = forced
        prob = prob_plus if outcome == 1 else 1 - prob_plus
        if prob < TOL:
            raise CircuitError(f"forced outcome {outcome:+d} has zero probability")
        branch = plus if outcome == 1 else (self.vec - pv) / 2
        self.vec = branch / np.sqrt(prob)
        return outcome, prob

    def apply(self, op: Op) -> None:
        name, qs = op.name, op.qubits
        if name in ("PREP_Z", "PREP_X", "PREP_T"):
            q = qs[0]
            # reset: a deterministic |1> is flipped back; a random qubit is measured first
            outcome, _ = self._measure(self._z(q), None)
            if outcome == -1:
                self.vec = _u1_vec(self.vec, self.n, q, GATES["X"])
            if name == "PREP_X":
                self.vec = _u1_vec(self.vec, self.n, q, GATES["H"])
            elif name == "PREP_T":
                self.vec = _u1_vec(self.vec, self.n, q, GATES["T"] @ GATES["H"])
        elif name in GATES:
            self.vec = _u1_vec(self.vec, self.n, qs[0], GATES[name])
        elif name in _TWO_QUBIT:
            self.vec = _u2_vec(self.vec, self.n, qs[0], qs[1], _TWO_QUBIT[name])
        else:
            raise CircuitError(f"dense backend cannot run {name}")

    def measure(self, op: Op) -> int:
        q = op.qubits[0]
        p = self._z(q) if op.name == "MZ" else PauliOperator(self.n, 1 << q, 0)
        forced = self.forced.get(op.bits_out[0])
        outcome, prob = self._measure(p, None if forced is None else 1 - 2 * forced)
        self.probabilities[op.bits_out[0]] = prob
        return 0 if outcome == 1 else 1


def run_circuit_dense(circuit: Circuit, initial: DenseState | None = None, rng=None,
                      forced: dict[str, int] | None = None, **kwargs) -> tuple[DenseState, ExecutionResult]:
    """Execute ``circuit`` exactly.

    ``initial`` may cover only the first qubits; the rest start in |0>.
    Random outcomes are taken from ``forced`` (bit name -> 0/1) when listed,
    otherwise sampled from ``rng``.
    """
    n = circuit.num_qubits
    if n > MAX_QUBITS:
        raise CapacityError(f"circuit uses {n} qubits; the dense limit is {MAX_QUBITS}")
    if initial is None:
        initial = basis_state(n)
    elif initial.n < n:
        initial = initial.tensor(basis_state(n - initial.n))
    elif initial.n > n:
        raise DimensionError("initial state is larger than the circuit")
    backend = DenseBackend(initial, rng, forced)
    res = execute(circuit, backend, **kwargs)
    res.probabilities.update(backend.probabilities)
    return backend.state(), res
