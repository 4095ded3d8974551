"""
Stabilizer-state simulation of Clifford circuits (destabilizer/stabilizer
tableau) and phase-free Pauli-frame propagation.
"""

from __future__ import annotations

import numpy as np

from .circuit import Backend, Circuit, ExecutionResult, Op, UnsupportedOperation, execute
from .pauli import DimensionError, PauliOperator, commutes, multiply

__all__ = [
    "Tableau",
    "new_tableau",
    "apply_h",
    "apply_s",
    "apply_sdg",
    "apply_cnot",
    "apply_cz",
    "apply_cy",
    "apply_pauli",
    "measure_pauli",
    "peek_pauli",
    "state_equal",
    "conjugate",
    "PauliFrame",
    "TableauBackend",
    "run_circuit_tableau",
]


# -- conjugation of a single Pauli: returns U P U^dagger -----------------------

def _bit(v: int, q: int) -> int:
    return v >> q & 1


def conj_h(p: PauliOperator, q: int) -> PauliOperator:
    x, z = _bit(p.x_bits, q), _bit(p.z_bits, q)
    if x == z:
        return p if not x else p.negate()
    m = 1 << q
    return PauliOperator(p.n, p.x_bits ^ m, p.z_bits ^ m, p.phase_exponent)


def conj_s(p: PauliOperator, q: int) -> PauliOperator:
    # X -> Y, Y -> -X, Z -> Z
    if not _bit(p.x_bits, q):
        return p
    m = 1 << q
    e = p.phase_exponent + (2 if _bit(p.z_bits, q) else 0)
    return PauliOperator(p.n, p.x_bits, p.z_bits ^ m, e)


def conj_sdg(p: PauliOperator, q: int) -> PauliOperator:
    # X -> -Y, Y -> X, Z -> Z
    if not _bit(p.x_bits, q):
        return p
    m = 1 << q
    e = p.phase_exponent + (0 if _bit(p.z_bits, q) else 2)
    return PauliOperator(p.n, p.x_bits, p.z_bits ^ m, e)


def conj_cnot(p: PauliOperator, c: int, t: int) -> PauliOperator:
    xc, zc, xt, zt = _bit(p.x_bits, c), _bit(p.z_bits, c), _bit(p.x_bits, t), _bit(p.z_bits, t)
    e = p.phase_exponent + 2 * (xc & zt & (xt ^ zc ^ 1))
    x = p.x_bits ^ (xc << t)
    z = p.z_bits ^ (zt << c)
    return PauliOperator(p.n, x, z, e)


def conj_pauli(p: PauliOperator, g: PauliOperator) -> PauliOperator:
    return p if commutes(p, g) else p.negate()


def conjugate(p: PauliOperator, gate: str, qubits: tuple[int, ...]) -> PauliOperator:
    """Image of ``p`` under conjugation by a named Clifford gate."""
    if gate == "H":
        return conj_h(p, qubits[0])
    if gate == "S":
        return conj_s(p, qubits[0])
    if gate == "SDG":
        return conj_sdg(p, qubits[0])
    if gate in ("CNOT", "CX"):
        return conj_cnot(p, *qubits)
    if gate == "CZ":
        a, b = qubits
        return conj_h(conj_cnot(conj_h(p, b), a, b), b)
    if gate == "CY":
        c, t = qubits
        return conj_s(conj_cnot(conj_sdg(p, t), c, t), t)
    if gate in ("X", "Y", "Z"):
        q = qubits[0]
        x = 1 if gate in "XY" else 0
        z = 1 if gate in "YZ" else 0
        return conj_pauli(p, PauliOperator(p.n, x << q, z << q))
    if gate == "I":
        return p
    raise UnsupportedOperation(f"{gate} is not a supported Clifford gate")


# -- tableau ------------------------------------------------------------------

class Tableau:
    """Stabilizer state on n qubits with a companion destabilizer set.

    Row ``i`` of ``destabilizers`` anticommutes with stabilizer row ``i`` only.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need n >= 1")
        self.n = n
        self.destabilizers = [PauliOperator(n, 1 << q, 0) for q in range(n)]
        self.stabilizers = [PauliOperator(n, 0, 1 << q) for q in range(n)]

    def copy(self) -> Tableau:
        t = Tableau.__new__(Tableau)
        t.n = self.n
        t.destabilizers = list(self.destabilizers)
        t.stabilizers = list(self.stabilizers)
        return t

    def _check(self, *qubits):
        for q in qubits:
            if not 0 <= q < self.n:
                raise IndexError(f"qubit {q} out of range for {self.n} qubits")
        if len(set(qubits)) != len(qubits):
            raise ValueError("two-qubit gate needs distinct qubits")

    def _conj_all(self, gate: str, qubits: tuple[int, ...]):
        self._check(*qubits)
        self.destabilizers = [conjugate(r, gate, qubits) for r in self.destabilizers]
        self.stabilizers = [conjugate(r, gate, qubits) for r in self.stabilizers]

    def assert_valid(self) -> None:
        """Rows are legal Paulis with real signs and the expected commutation."""
        for i, s in enumerate(self.stabilizers):
            assert s.is_hermitian, f"stabilizer {s} has imaginary phase"
            for j, s2 in enumerate(self.stabilizers):
                assert commutes(s, s2)
                assert commutes(s, self.destabilizers[j]) == (i != j)

    def __repr__(self) -> str:
        return "Tableau(" + ", ".join(f"{s}" for s in self.stabilizers) + ")"


def new_tableau(n: int) -> Tableau:
    return Tableau(n)


def apply_h(t: Tableau, q: int) -> None:
    t._conj_all("H", (q,))


def apply_s(t: Tableau, q: int) -> None:
    t._conj_all("S", (q,))


def apply_sdg(t: Tableau, q: int) -> None:
    t._conj_all("SDG", (q,))


def apply_cnot(t: Tableau, control: int, target: int) -> None:
    t._conj_all("CNOT", (control, target))


def apply_cz(t: Tableau, a: int, b: int) -> None:
    t._conj_all("CZ", (a, b))


def apply_cy(t: Tableau, control: int, target: int) -> None:
    t._conj_all("CY", (control, target))


def apply_pauli(t: Tableau, p: PauliOperator) -> None:
    if p.n != t.n:
        raise DimensionError("Pauli and tableau sizes differ")
    t.destabilizers = [conj_pauli(r, p) for r in t.destabilizers]
    t.stabilizers = [conj_pauli(r, p) for r in t.stabilizers]


def _require_hermitian(t: Tableau, p: PauliOperator) -> None:
    if p.n != t.n:
        raise DimensionError("Pauli and tableau sizes differ")
    if not p.is_hermitian:
        raise ValueError(f"cannot measure non-Hermitian operator {p}")


def _deterministic_sign(t: Tableau, p: PauliOperator) -> int:
    prod = PauliOperator(t.n, 0, 0)
    for d, s in zip(t.destabilizers, t.stabilizers):
        if not commutes(d, p):
            prod = multiply(prod, s)
    assert prod.x_bits == p.x_bits and prod.z_bits == p.z_bits, "tableau is corrupted"
    rel = (p.phase_exponent - prod.phase_exponent) % 4
    assert rel in (0, 2), "measured operator is not +-1 times a stabilizer"
    return 1 if rel == 0 else -1


def peek_pauli(t: Tableau, p: PauliOperator) -> int:
    """+1 or -1 if the outcome of measuring ``p`` is determined, 0 if random."""
    _require_hermitian(t, p)
    if any(not commutes(s, p) for s in t.stabilizers):
        return 0
    return _deterministic_sign(t, p)


def measure_pauli(t: Tableau, p: PauliOperator, rng=None, forced: int | None = None) -> int:
    """Projectively measure Hermitian ``p``; returns +1 or -1.

    Random outcomes come from ``rng`` (a numpy Generator) unless ``forced``
    supplies one; a determined outcome never consumes randomness.
    """
    _require_hermitian(t, p)
    anti = [i for i, s in enumerate(t.stabilizers) if not commutes(s, p)]
    if not anti:
        return _deterministic_sign(t, p)
    k = anti[0]
    pivot = t.stabilizers[k]
    for i in anti[1:]:
        t.stabilizers[i] = multiply(t.stabilizers[i], pivot)
    for i, d in enumerate(t.destabilizers):
        if i != k and not commutes(d, p):
            t.destabilizers[i] = multiply(d, pivot)
    if forced is not None:
        if forced not in (1, -1):
            raise ValueError("forced outcome must be +1 or -1")
        outcome = forced
    else:
        if rng is None:
            raise ValueError("random measurement needs an rng or a forced outcome")
        outcome = 1 if rng.integers(2) == 0 else -1
    t.destabilizers[k] = pivot
    t.stabilizers[k] = p.unsigned() if outcome == p.sign else p.unsigned().negate()
    return outcome


def state_equal(t1: Tableau, t2: Tableau) -> bool:
    if t1.n != t2.n:
        return False
    return all(peek_pauli(t2, s) == 1 for s in t1.stabilizers)


# -- Pauli frames ---------------------------------------------------------------

class PauliFrame(Backend):
    """Phase-free Pauli error propagated through Clifford operations.

    Measurement results are reported as flips relative to the noiseless run.
    """

    def __init__(self, n: int):
        self.n = n
        self.x = 0
        self.z = 0

    def pauli(self) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z)

    def restrict(self, qubits) -> PauliOperator:
        return self.pauli().restrict(qubits)

    def apply_pauli(self, qubits, pauli: PauliOperator) -> None:
        for j, q in enumerate(qubits):
            self.x ^= (pauli.x_bits >> j & 1) << q
            self.z ^= (pauli.z_bits >> j & 1) << q

    def apply(self, op: Op) -> None:
        name, qs = op.name, op.qubits
        if op.condition is not None and name not in ("X", "Y", "Z", "I"):
            raise UnsupportedOperation("classically controlled Cliffords are outside the frame model")
        if name in ("X", "Y", "Z", "I"):
            # the condition bit holds the flip relative to the noiseless run
            if op.condition is not None and name != "I":
                q = qs[0]
                self.x ^= (name in "XY") << q
                self.z ^= (name in "YZ") << q
            return
        if name in ("PREP_Z", "PREP_X"):
            m = ~(1 << qs[0])
            self.x &= m
            self.z &= m
        elif name == "H":
            q = qs[0]
            xb, zb = self.x >> q & 1, self.z >> q & 1
            if xb != zb:
                self.x ^= 1 << q
                self.z ^= 1 << q
        elif name in ("S", "SDG"):
            q = qs[0]
            self.z ^= (self.x >> q & 1) << q
        elif name in ("CNOT", "CX"):
            c, t = qs
            self.x ^= (self.x >> c & 1) << t
            self.z ^= (self.z >> t & 1) << c
        elif name == "CZ":
            a, b = qs
            self.z ^= (self.x >> b & 1) << a
            self.z ^= (self.x >> a & 1) << b
        elif name == "CY":
            c, t = qs
            self.z ^= (self.x >> t & 1) << t
            self.x ^= (self.x >> c & 1) << t
            self.z ^= (self.z >> t & 1) << c
            self.z ^= (self.x >> t & 1) << t
        else:
            raise UnsupportedOperation(f"{name} cannot be propagated as a Pauli frame")

    def measure(self, op: Op) -> int:
        q = op.qubits[0]
        if op.name == "MZ":
            return self.x >> q & 1
        return self.z >> q & 1


# -- full tableau backend -----------------------------------------------------------

class TableauBackend(Backend):
    def __init__(self, tableau: Tableau, rng=None, forced: dict[str, int] | None = None):
        self.t = tableau
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.forced = forced or {}

    def _z(self, q):
        return PauliOperator(self.t.n, 0, 1 << q)

    def _x(self, q):
        return PauliOperator(self.t.n, 1 << q, 0)

    def apply_pauli(self, qubits, pauli: PauliOperator) -> None:
        apply_pauli(self.t, pauli.unsigned().embed(self.t.n, qubits))

    def apply(self, op: Op) -> None:
        name, qs = op.name, op.qubits
        if name in ("PREP_Z", "PREP_X"):
            q = qs[0]
            if measure_pauli(self.t, self._z(q), self.rng) == -1:
                self.t._conj_all("X", (q,))
            if name == "PREP_X":
                self.t._conj_all("H", (q,))
        elif name in ("PREP_T", "CPX"):
            raise UnsupportedOperation(f"{name} is not a Clifford operation")
        else:
            self.t._conj_all(name, qs)

    def measure(self, op: Op) -> int:
        q = op.qubits[0]
        p = self._z(q) if op.name == "MZ" else self._x(q)
        forced = self.forced.get(op.bits_out[0])
        if forced is not None:
            forced = 1 - 2 * forced
            if peek_pauli(self.t, p) != 0:
                forced = None
        return 0 if measure_pauli(self.t, p, self.rng, forced) == 1 else 1


def run_circuit_tableau(circuit: Circuit, tableau: Tableau | None = None, rng=None,
                        forced: dict[str, int] | None = None, **kwargs) -> tuple[Tableau, ExecutionResult]:
    if tableau is None:
        tableau = Tableau(circuit.num_qubits)
    if tableau.n != circuit.num_qubits:
        raise DimensionError("tableau and circuit sizes differ")
    backend = TableauBackend(tableau, rng, forced)
    return tableau, execute(circuit, backend, **kwargs)
