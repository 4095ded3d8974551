"""
Circuits as data: timestep-ordered operations over qubit registers with
classical wires, a text serialization, and a backend-agnostic interpreter.

Text grammar (one timestep per line, operations separated by ``;``)::

    # comment
    @qubits 12
    @register data 0 1 2 3 4 5 6
    @decoder ec t=1 IIIZZZZ IZZIIZZ ...
    @note prep_zero requires verification
    PREP_Z 7; PREP_Z 8
    H 7
    CNOT 7 8
    MZ 9 -> c0
    ABORT_IF c0 @cat0
    PARITY c1 c2 c3 c4 -> c5
    VOTE m=4 c5 c6 ... -> c20 c21 c22 c23
    DECODE ec c20 c21 c22 c23 -> 0 1 2 3 4
    IF c3 X 1

Block labels (``@name`` suffix) mark operations re-run when an
``ABORT_IF`` of the same block fires.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .pauli import PauliOperator, parse_pauli
from .stabilizer import DecoderTable, StabilizerCode, build_decoder

ONE_QUBIT_GATES = {"I", "H", "S", "SDG", "X", "Y", "Z"}
TWO_QUBIT_GATES = {"CNOT", "CX", "CY", "CZ"}
NON_CLIFFORD = {"PREP_T", "CPX"}
PREPARATIONS = {"PREP_Z", "PREP_X", "PREP_T"}
MEASUREMENTS = {"MZ", "MX"}
CLASSICAL = {"PARITY", "VOTE", "DECODE", "ABORT_IF"}
QUANTUM = ONE_QUBIT_GATES | TWO_QUBIT_GATES | PREPARATIONS | MEASUREMENTS | {"CPX"}
OPCODES = QUANTUM | CLASSICAL

MAX_ATTEMPTS = 10


class CircuitError(ValueError):
    pass


class UnsupportedOperation(CircuitError):
    """The backend cannot execute this opcode (e.g. non-Clifford on a tableau)."""


@dataclass(frozen=True)
class Op:
    name: str
    qubits: tuple[int, ...] = ()
    bits_in: tuple[str, ...] = ()
    bits_out: tuple[str, ...] = ()
    condition: str | None = None
    block: str | None = None
    arg: str | None = None

    def __post_init__(self):
        if self.name not in OPCODES:
            raise CircuitError(f"unknown opcode {self.name}")

    @property
    def is_location(self) -> bool:
        """Physical operations that can fail; classical control is noiseless."""
        return self.name in QUANTUM and self.condition is None

    def to_text(self) -> str:
        n = self.name
        if n == "PARITY":
            s = f"PARITY {' '.join(self.bits_in)} -> {self.bits_out[0]}"
        elif n == "VOTE":
            s = f"VOTE m={self.arg.split(',')[0]}"
            if "," in self.arg:
                s += f" mode={self.arg.split(',')[1]}"
            s += f" {' '.join(self.bits_in)} -> {' '.join(self.bits_out)}"
        elif n == "DECODE":
            s = f"DECODE {self.arg} {' '.join(self.bits_in)} -> {' '.join(map(str, self.qubits))}"
        elif n == "ABORT_IF":
            s = f"ABORT_IF {self.bits_in[0]}"
        else:
            s = " ".join([n, *map(str, self.qubits)])
            if self.bits_out:
                s += " -> " + " ".join(self.bits_out)
        if self.condition:
            s = f"IF {self.condition} {s}"
        if self.block:
            s += f" @{self.block}"
        return s


@dataclass
class Circuit:
    num_qubits: int
    moments: list[list[Op]] = field(default_factory=list)
    registers: dict[str, tuple[int, ...]] = field(default_factory=dict)
    decoders: dict[str, DecoderTable] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)

    def ops(self) -> Iterable[Op]:
        for m in self.moments:
            yield from m

    def count(self, name: str | None = None) -> int:
        return sum(1 for op in self.ops() if name is None or op.name == name)

    @property
    def depth(self) -> int:
        return len(self.moments)

    def gate_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for op in self.ops():
            out[op.name] = out.get(op.name, 0) + 1
        return dict(sorted(out.items()))

    def is_clifford(self) -> bool:
        return not any(op.name in NON_CLIFFORD for op in self.ops())

    def check(self) -> None:
        """Validate the structural invariants."""
        produced: set[str] = set()
        for t, moment in enumerate(self.moments):
            seen: set[int] = set()
            new_bits: set[str] = set()
            for op in moment:
                for q in op.qubits:
                    if not 0 <= q < self.num_qubits:
                        raise CircuitError(f"timestep {t}: qubit {q} out of range")
                    if q in seen:
                        raise CircuitError(f"timestep {t}: qubit {q} used twice")
                    seen.add(q)
                needed = list(op.bits_in) + ([op.condition] if op.condition else [])
                for b in needed:
                    if b not in produced:
                        raise CircuitError(f"timestep {t}: bit {b} read before it is produced")
                if op.name == "DECODE" and op.arg not in self.decoders:
                    raise CircuitError(f"unknown decoder {op.arg}")
                new_bits.update(op.bits_out)
            produced |= new_bits

    # -- serialization ----------------------------------------------------
    def to_text(self) -> str:
        lines = [f"@qubits {self.num_qubits}"]
        for name, qs in self.registers.items():
            lines.append(f"@register {name} {' '.join(map(str, qs))}")
        for name, table in self.decoders.items():
            gens = " ".join(str(g) for g in table.code.generators)
            lines.append(f"@decoder {name} t={table.covered_weight} {gens}")
        for key, text in self.notes.items():
            lines.append(f"@note {key} {text}")
        for moment in self.moments:
            lines.append("; ".join(op.to_text() for op in moment))
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def from_text(cls, text: str) -> Circuit:
        circ = cls(0)
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                if line.startswith("@"):
                    _parse_directive(circ, line)
                else:
                    circ.moments.append([_parse_op(tok.strip()) for tok in line.split(";") if tok.strip()])
            except (ValueError, IndexError, KeyError) as exc:
                raise CircuitError(f"line {lineno}: {exc}") from exc
        circ.check()
        return circ

    @classmethod
    def load(cls, path) -> Circuit:
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def _parse_directive(circ: Circuit, line: str) -> None:
    head, *rest = line.split()
    if head == "@qubits":
        circ.num_qubits = int(rest[0])
    elif head == "@register":
        circ.registers[rest[0]] = tuple(int(q) for q in rest[1:])
    elif head == "@decoder":
        name, t = rest[0], int(rest[1].removeprefix("t="))
        code = StabilizerCode([parse_pauli(g) for g in rest[2:]])
        circ.decoders[name] = build_decoder(code, t)
    elif head == "@note":
        circ.notes[rest[0]] = " ".join(rest[1:])
    else:
        raise CircuitError(f"unknown directive {head}")


def _parse_op(tok: str) -> Op:
    block = None
    if "@" in tok:
        tok, block = tok.rsplit("@", 1)
        tok, block = tok.strip(), block.strip()
    condition = None
    words = tok.split()
    if words[0] == "IF":
        condition, words = words[1], words[2:]
    name = words[0]
    lhs, rhs = words[1:], []
    if "->" in lhs:
        k = lhs.index("->")
        lhs, rhs = lhs[:k], lhs[k + 1:]
    if name == "PARITY":
        return Op(name, bits_in=tuple(lhs), bits_out=tuple(rhs), block=block)
    if name == "VOTE":
        m = lhs[0].removeprefix("m=")
        arg = m
        if lhs[1].startswith("mode="):
            arg += "," + lhs[1].removeprefix("mode=")
            lhs = lhs[1:]
        return Op(name, bits_in=tuple(lhs[1:]), bits_out=tuple(rhs), arg=arg, block=block)
    if name == "DECODE":
        return Op(name, qubits=tuple(int(q) for q in rhs), bits_in=tuple(lhs[1:]), arg=lhs[0], block=block)
    if name == "ABORT_IF":
        return Op(name, bits_in=(lhs[0],), block=block)
    return Op(name, qubits=tuple(int(q) for q in lhs), bits_out=tuple(rhs), condition=condition, block=block)


class CircuitBuilder:
    """Places each operation in the earliest timestep its dependencies allow."""

    def __init__(self):
        self.num_qubits = 0
        self.registers: dict[str, tuple[int, ...]] = {}
        self.moments: list[list[Op]] = []
        self.decoders: dict[str, DecoderTable] = {}
        self.notes: dict[str, str] = {}
        self._last_q: dict[int, int] = {}
        self._last_b: dict[str, int] = {}
        self._floor = -1
        self._nbits = 0
        self._block: str | None = None
        self.last_time = -1

    def register(self, name: str, size: int) -> tuple[int, ...]:
        qs = tuple(range(self.num_qubits, self.num_qubits + size))
        self.num_qubits += size
        self.registers[name] = qs
        return qs

    def alias(self, name: str, qubits: Iterable[int]) -> tuple[int, ...]:
        self.registers[name] = tuple(qubits)
        return self.registers[name]

    def bit(self) -> str:
        b = f"c{self._nbits}"
        self._nbits += 1
        return b

    def barrier(self) -> None:
        self._floor = len(self.moments) - 1

    @contextlib.contextmanager
    def block(self, name: str):
        prev, self._block = self._block, name
        try:
            yield
        finally:
            self._block = prev

    def add(self, name: str, qubits=(), *, bits_in=(), bits_out=(), condition=None, arg=None,
            guard: Iterable[int] = (), after: int = -1) -> Op:
        """Append an operation; ``after`` forces it past that timestep."""
        qubits, bits_in, bits_out = tuple(qubits), tuple(bits_in), tuple(bits_out)
        deps = [self._floor, after]
        deps += [self._last_q.get(q, -1) for q in (*qubits, *guard)]
        deps += [self._last_b.get(b, -1) for b in (*bits_in, *([condition] if condition else []))]
        # classical results are usable one step after they are produced
        t = max(deps) + 1
        while len(self.moments) <= t:
            self.moments.append([])
        op = Op(name, qubits, bits_in, bits_out, condition, self._block, arg)
        self.moments[t].append(op)
        for q in (*qubits, *guard):
            self._last_q[q] = t
        for b in bits_out:
            self._last_b[b] = t
        self.last_time = t
        return op

    def measure(self, name: str, q: int) -> str:
        b = self.bit()
        self.add(name, (q,), bits_out=(b,))
        return b

    def parity(self, bits: Iterable[str]) -> str:
        out = self.bit()
        self.add("PARITY", bits_in=tuple(bits), bits_out=(out,))
        return out

    def build(self) -> Circuit:
        circ = Circuit(self.num_qubits, [m for m in self.moments], dict(self.registers),
                       dict(self.decoders), dict(self.notes))
        circ.check()
        return circ


# -- interpretation -----------------------------------------------------------

class Backend:
    """Quantum side of the interpreter. Measurements return a bit (0 for +1)."""

    def apply(self, op: Op) -> None:
        raise NotImplementedError

    def measure(self, op: Op) -> int:
        raise NotImplementedError

    def apply_pauli(self, qubits: tuple[int, ...], pauli: PauliOperator) -> None:
        raise NotImplementedError


@dataclass
class ExecutionResult:
    bits: dict[str, int]
    aborted: bool = False
    flagged: bool = False
    attempts: dict[str, int] = field(default_factory=dict)
    corrections: list[PauliOperator] = field(default_factory=list)
    # probability of each recorded measurement outcome (dense backend only)
    probabilities: dict[str, float] = field(default_factory=dict)


# fault hook: (op, location_key) -> PauliOperator on op.qubits, or None
FaultHook = Callable[[Op, tuple], "PauliOperator | None"]
IdleHook = Callable[[int, tuple], "PauliOperator | None"]


def vote(reps: list[tuple[int, ...]], mode: str = "vector") -> tuple[int, ...]:
    """Combine repeated syndrome vectors.

    ``vector``: a vector seen in more than half of the repetitions, otherwise
    the last repetition. ``bitwise``: per-position majority.
    """
    if mode == "bitwise":
        r = len(reps)
        return tuple(int(sum(col) * 2 > r) for col in zip(*reps))
    counts: dict[tuple[int, ...], int] = {}
    for v in reps:
        counts[v] = counts.get(v, 0) + 1
    for v, c in counts.items():
        if 2 * c > len(reps):
            return v
    return reps[-1]


def execute(
    circuit: Circuit,
    backend: Backend,
    *,
    fault: FaultHook | None = None,
    idle: IdleHook | None = None,
    max_attempts: int = MAX_ATTEMPTS,
) -> ExecutionResult:
    """Run ``circuit`` on ``backend`` with exact classical control.

    ``fault`` is asked for an error at every physical location; measurement
    faults are applied just before the measurement, others just after the op.
    ``idle`` is asked once per timestep for every live qubit the step leaves alone.
    When an ``ABORT_IF`` fires, its block is re-run from the start until every
    check of the block up to that point reads 0, at most ``max_attempts`` times.
    """
    res = ExecutionResult({})
    bits = res.bits
    data = set(circuit.registers.get("data", ()))
    live = set(data)

    def run(op: Op, key: tuple) -> bool:
        """Returns False when the circuit has to stop (abort)."""
        if op.condition is not None and not bits[op.condition]:
            return True
        n = op.name
        if n == "PARITY":
            bits[op.bits_out[0]] = sum(bits[b] for b in op.bits_in) & 1
        elif n == "VOTE":
            m, _, mode = op.arg.partition(",")
            m = int(m)
            vals = [bits[b] for b in op.bits_in]
            reps = [tuple(vals[i:i + m]) for i in range(0, len(vals), m)]
            for b, v in zip(op.bits_out, vote(reps, mode or "vector")):
                bits[b] = v
        elif n == "DECODE":
            table = circuit.decoders[op.arg]
            s = sum(bits[b] << i for i, b in enumerate(op.bits_in))
            corr = table.lookup(s)[0]
            res.corrections.append(corr)
            if corr.weight:
                backend.apply_pauli(op.qubits, corr)
        elif n == "ABORT_IF":
            pass
        else:
            err = fault(op, key) if (fault is not None and op.is_location) else None
            if n in MEASUREMENTS:
                if err is not None:
                    backend.apply_pauli(op.qubits, err)
                bits[op.bits_out[0]] = backend.measure(op)
                if op.qubits[0] not in data:
                    live.discard(op.qubits[0])
            else:
                backend.apply(op)
                if n in PREPARATIONS:
                    live.add(op.qubits[0])
                if err is not None:
                    backend.apply_pauli(op.qubits, err)
        return True

    for t, moment in enumerate(circuit.moments):
        touched = set()
        for j, op in enumerate(moment):
            touched.update(op.qubits)
            run(op, (t, j, 0))
            if op.name == "ABORT_IF" and bits[op.bits_in[0]]:
                res.flagged = True
                block_ops = [
                    (tt, jj, o)
                    for tt in range(t + 1)
                    for jj, o in enumerate(circuit.moments[tt])
                    if o.block == op.block and (tt < t or jj <= j)
                ]
                checks = [o.bits_in[0] for _, _, o in block_ops if o.name == "ABORT_IF"]
                attempt = 1
                while any(bits[b] for b in checks):
                    if attempt >= max_attempts:
                        res.aborted = True
                        res.attempts[op.block] = attempt
                        return res
                    for tt, jj, o in block_ops:
                        run(o, (tt, jj, attempt))
                    attempt += 1
                res.attempts[op.block] = max(res.attempts.get(op.block, 1), attempt)
        if idle is not None:
            for q in sorted(live - touched):
                err = idle(q, (t, q))
                if err is not None:
                    backend.apply_pauli((q,), err)
    return res
