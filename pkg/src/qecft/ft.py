"""
Fault-tolerant gadgets as circuits: transversal gates and their logical
action, cat-state syndrome measurement, repeated (Shor-style) error
correction, Steane-style error correction, pi/8 injection, and an exhaustive
single-fault checker.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import gf2
from .circuit import (
    Circuit,
    CircuitBuilder,
    CircuitError,
    Op,
    UnsupportedOperation,
    execute,
)
from .codes import UnsupportedCodeError
from .pauli import PauliOperator, commutes, multiply, single
from .stabilizer import (
    StabilizerCode,
    build_decoder,
    in_stabilizer,
    logical_class,
    stabilizer_sign,
)
from .tableau import PauliFrame, conjugate

__all__ = [
    "LogicalAction",
    "PRESERVES",
    "BREAKS",
    "DEFAULT_REPETITIONS",
    "DEFAULT_VERIFY_ROUNDS",
    "transversal_cnot",
    "check_transversal_clifford",
    "verification_pairs",
    "cat_measurement_circuit",
    "shor_ec_round",
    "steane_ec_circuit",
    "encoder_ops",
    "pi8_injection_circuit",
    "pi8_ancilla_check_circuit",
    "FaultReport",
    "fault_locations",
    "fault_injection_check",
    "reduced_weight",
]

PRESERVES = "preserves-code"
BREAKS = "breaks-code"
DEFAULT_REPETITIONS = 3
DEFAULT_VERIFY_ROUNDS = 2

_CONTROLLED = {"X": "CX", "Y": "CY", "Z": "CZ"}


# -- transversal gates -------------------------------------------------------------

def transversal_cnot(code: StabilizerCode, block_a=None, block_b=None) -> Circuit:
    """Qubit i of block A controls qubit i of block B, all in one timestep."""
    n = code.n
    a = tuple(range(n)) if block_a is None else tuple(block_a)
    b = tuple(range(n, 2 * n)) if block_b is None else tuple(block_b)
    if len(a) != n or len(b) != n:
        raise CircuitError(f"blocks must both have {n} qubits (got {len(a)} and {len(b)})")
    if set(a) & set(b):
        raise CircuitError("blocks overlap")
    size = max(a + b) + 1
    circ = Circuit(size, [[Op("CNOT", (a[i], b[i])) for i in range(n)]],
                   {"data": a + b, "block_a": a, "block_b": b})
    circ.check()
    return circ


@dataclass(frozen=True)
class LogicalAction:
    """How a transversal Clifford acts on the encoded qubits.

    ``images`` maps "X0", "Z0", ... to the signed logical Pauli (on the
    encoded qubits) that the gate conjugates each logical generator into.
    ``gate`` names the recognised logical gate, if any.
    """

    verdict: str
    images: dict[str, PauliOperator] = field(default_factory=dict)
    gate: str | None = None
    broken_generators: tuple[int, ...] = ()

    @property
    def preserves(self) -> bool:
        return self.verdict == PRESERVES

    def describe(self) -> str:
        if not self.preserves:
            return f"{BREAKS}: generators {list(self.broken_generators)} leave the stabilizer"
        maps = ", ".join(f"{k} -> {_signed(v)}" for k, v in self.images.items())
        name = f"logical {self.gate}" if self.gate else "unrecognised logical Clifford"
        return f"{PRESERVES}: {name} ({maps})"


def _signed(p: PauliOperator) -> str:
    s = str(p)
    return s if s[0] in "+-" or s.startswith("i") else "+" + s


def _transversal_images(p: PauliOperator, gate: str, n_block: int, blocks: int,
                        pauli: PauliOperator | None) -> PauliOperator:
    if gate == "PAULI":
        return p if commutes(p, pauli) else p.negate()
    if gate == "CNOT":
        for i in range(n_block):
            p = conjugate(p, "CNOT", (i, n_block + i))
        return p
    for q in range(n_block * blocks):
        p = conjugate(p, gate, (q,))
    return p


def _reference_images(k: int, gate: str) -> dict[str, PauliOperator] | None:
    """Images of the logical generators under the named gate on every encoded qubit."""
    out = {}
    for j in range(k):
        for letter in "XZ":
            p = single(k, j, letter)
            if gate == "CNOT":
                half = k // 2
                for i in range(half):
                    p = conjugate(p, "CNOT", (i, half + i))
            elif gate != "I":
                for q in range(k):
                    p = conjugate(p, gate, (q,))
            out[f"{letter}{j}"] = p
    return out


def check_transversal_clifford(code: StabilizerCode, gate, pauli: PauliOperator | None = None) -> LogicalAction:
    """Conjugate the code by a transversal Clifford and read off its logical action.

    ``gate`` is "H", "S", "SDG", "CNOT" (between two blocks of ``code``) or a
    Pauli operator (also accepted as gate="PAULI" with ``pauli``) applied
    qubit-wise. Membership of the conjugated generators is sign sensitive.
    """
    if isinstance(gate, PauliOperator):
        gate, pauli = "PAULI", gate
    gate = gate.upper()
    if gate in ("T", "PI8", "PREP_T", "CPX"):
        raise UnsupportedOperation(f"{gate} is not Clifford; use the injection gadget")
    if gate not in ("H", "S", "SDG", "CNOT", "PAULI"):
        raise UnsupportedOperation(f"unknown transversal gate {gate}")
    if gate == "PAULI":
        if pauli is None or pauli.n != code.n:
            raise ValueError("PAULI needs an operator on the code's qubits")
        pauli = pauli.unsigned()
    target = code.tensor(code) if gate == "CNOT" else code
    blocks = 2 if gate == "CNOT" else 1

    broken = []
    for i, g in enumerate(target.generators):
        image = _transversal_images(g, gate, code.n, blocks, pauli)
        if stabilizer_sign(target, image) != 1:
            broken.append(i)
    if broken:
        return LogicalAction(BREAKS, broken_generators=tuple(broken))

    images = {}
    for j in range(target.k):
        for letter, rep in (("X", target.logical_x[j]), ("Z", target.logical_z[j])):
            images[f"{letter}{j}"] = logical_class(
                target, _transversal_images(rep, gate, code.n, blocks, pauli)
            )
    _check_symplectic(images, target.k)
    return LogicalAction(PRESERVES, images, _identify(images, target.k, gate))


def _check_symplectic(images: dict[str, PauliOperator], k: int) -> None:
    for a in range(k):
        for b in range(k):
            for la in "XZ":
                for lb in "XZ":
                    want = not (a == b and la != lb)
                    if commutes(images[f"{la}{a}"], images[f"{lb}{b}"]) != want:
                        raise AssertionError("induced logical map does not preserve commutation")


def _identify(images: dict[str, PauliOperator], k: int, gate: str) -> str | None:
    if k == 0:
        return "I"
    candidates = ["CNOT"] if gate == "CNOT" else ["I", "H", "S", "SDG"]
    for name in candidates:
        if _reference_images(k, name) == images:
            return name
    # a logical Pauli: every generator maps to plus or minus itself
    if all(v.unsigned() == single(k, int(key[1:]), key[0]) for key, v in images.items()):
        x = z = 0
        for j in range(k):
            if images[f"Z{j}"].sign == -1:
                x |= 1 << j
            if images[f"X{j}"].sign == -1:
                z |= 1 << j
        return f"PAULI {PauliOperator(k, x, z)}"
    return None


# -- cat-state syndrome measurement -----------------------------------------------------

def verification_pairs(size: int, rounds: int) -> list[list[tuple[int, int]]]:
    """Adjacent pairs (0,1), (2,3), ... on even rounds; (1,2), (3,4), ... on odd ones."""
    out = []
    for r in range(rounds):
        start = r % 2
        out.append([(a, a + 1) for a in range(start, size - 1, 2)])
    return out


def _cat_gadget(b: CircuitBuilder, data: tuple[int, ...], cat: tuple[int, ...], ver: int,
                m: PauliOperator, verify_rounds: int, label: str) -> str:
    """Measure ``m`` (on ``data``) with a verified cat state. Returns the parity bit."""
    support = m.support
    w = len(support)
    c = cat[:w]
    with b.block(label):
        for q in c:
            b.add("PREP_Z", (q,))
        b.add("H", (c[0],))
        for i in range(w - 1):
            b.add("CNOT", (c[i], c[i + 1]))
        for pairs in verification_pairs(w, verify_rounds):
            for i, j in pairs:
                b.add("PREP_Z", (ver,))
                b.add("CNOT", (c[i], ver))
                b.add("CNOT", (c[j], ver))
                bit = b.measure("MZ", ver)
                b.add("ABORT_IF", bits_in=(bit,))
        # the data is touched only once the cat has passed every check
        accepted = b.last_time
    for i, q in enumerate(support):
        b.add(_CONTROLLED[m.letter(q)], (c[i], data[q]), after=accepted)
    outs = []
    for q in c:
        b.add("H", (q,))
        outs.append(b.measure("MZ", q))
    return b.parity(outs)


def _check_measurable(m: PauliOperator) -> None:
    if m.weight == 0:
        raise ValueError("cannot measure the identity: weight(M) must be at least 1")
    if m.phase_exponent:
        raise ValueError(f"{m} must be an unsigned Pauli")


def cat_measurement_circuit(code, m: PauliOperator, verify_rounds: int = DEFAULT_VERIFY_ROUNDS) -> Circuit:
    """Measure ``m`` on a data block with a verified cat state.

    ``code`` may be a StabilizerCode or a qubit count. The parity of the cat
    outcomes is recorded in ``notes["parity"]`` (0 for eigenvalue +1).
    """
    n = code if isinstance(code, int) else code.n
    _check_measurable(m)
    if m.n != n:
        raise ValueError(f"M acts on {m.n} qubits but the block has {n}")
    if verify_rounds < 0:
        raise ValueError("verify_rounds must be non-negative")
    b = CircuitBuilder()
    data = b.register("data", n)
    cat = b.register("cat", m.weight)
    ver = b.register("ver", 1)[0]
    parity = _cat_gadget(b, data, cat, ver, m, verify_rounds, "cat")
    b.notes["parity"] = parity
    return b.build()


def shor_ec_round(code: StabilizerCode, repetitions: int = DEFAULT_REPETITIONS, *,
                  verify_rounds: int = DEFAULT_VERIFY_ROUNDS, vote_mode: str = "vector") -> Circuit:
    """Full syndrome extraction by cat-state measurement of every generator,
    repeated ``repetitions`` times, followed by a vote and a lookup-table
    correction.

    ``vote_mode`` "vector" takes the syndrome seen in a majority of the
    repetitions (falling back to the last one); "bitwise" votes each
    generator separately.
    """
    if repetitions < 1 or repetitions % 2 == 0:
        raise ValueError(f"repetitions must be a positive odd number, got {repetitions}")
    if vote_mode not in ("vector", "bitwise"):
        raise ValueError(f"unknown vote mode {vote_mode}")
    if code.num_generators == 0:
        raise ValueError("code has no generators to measure")
    gens = code.generators
    b = CircuitBuilder()
    data = b.register("data", code.n)
    cat = b.register("cat", max(g.weight for g in gens))
    ver = b.register("ver", 1)[0]
    t = max(1, ((code.known_distance or 3) - 1) // 2)
    b.decoders["ec"] = build_decoder(code, t)
    rounds = []
    for r in range(repetitions):
        rounds += [_cat_gadget(b, data, cat, ver, g, verify_rounds, f"r{r}g{i}") for i, g in enumerate(gens)]
    synd = [b.bit() for _ in gens]
    arg = str(len(gens)) + ("" if vote_mode == "vector" else f",{vote_mode}")
    b.add("VOTE", bits_in=tuple(rounds), bits_out=tuple(synd), arg=arg)
    b.add("DECODE", data, bits_in=tuple(synd), arg="ec")
    b.notes["syndrome"] = " ".join(synd)
    return b.build()


# -- Steane-style error correction ------------------------------------------------------

def _css_parts(code: StabilizerCode):
    if code.k != 1 or not code.is_css:
        raise UnsupportedCodeError("Steane error correction needs a CSS code with k = 1")
    z_type = [(i, g) for i, g in enumerate(code.generators) if g.x_bits == 0]
    x_type = [(i, g) for i, g in enumerate(code.generators) if g.z_bits == 0]
    lx, lz = code.logical_x[0], code.logical_z[0]
    if lx.z_bits or lz.x_bits:
        raise UnsupportedCodeError("logical operators are not in CSS form")
    return z_type, x_type, lx


def encoder_ops(x_rows: list[int], qubits: tuple[int, ...]) -> list[tuple[str, tuple[int, ...]]]:
    """Gates preparing the uniform superposition over the row space of ``x_rows``
    from |0...0>: H on each pivot, then CNOTs from the pivot along its row."""
    ops: list[tuple[str, tuple[int, ...]]] = []
    reduced = gf2.rref(x_rows)
    for p, _ in reduced:
        ops.append(("H", (qubits[p],)))
    for p, row in reduced:
        for j in range(len(qubits)):
            if j != p and row >> j & 1:
                ops.append(("CNOT", (qubits[p], qubits[j])))
    return ops


def steane_ec_circuit(code: StabilizerCode) -> Circuit:
    """Syndrome extraction with encoded ancillas.

    Bit-flip syndrome: transversal CNOT from the data onto an encoded |+>
    ancilla, which is then measured in the Z basis. Phase syndrome:
    transversal CNOT from an encoded |0> ancilla onto the data, with the
    ancilla measured in the X basis. One ancilla block is reused for both.
    The ancilla encoders are not fault tolerant and are flagged as needing
    verification.
    """
    z_type, x_type, lx = _css_parts(code)
    n = code.n
    b = CircuitBuilder()
    data = b.register("data", n)
    anc = b.register("ancilla", n)
    b.decoders["ec"] = build_decoder(code, max(1, ((code.known_distance or 3) - 1) // 2))
    synd: dict[int, str] = {}

    def prepare(rows):
        for q in anc:
            b.add("PREP_Z", (q,))
        for name, qs in encoder_ops(rows, anc):
            b.add(name, qs)

    x_rows = [g.x_bits for _, g in x_type]
    prepare(x_rows + [lx.x_bits])                       # encoded |+>
    for i in range(n):
        b.add("CNOT", (data[i], anc[i]))
    flips = [b.measure("MZ", q) for q in anc]
    for i, g in z_type:
        synd[i] = b.parity([flips[q] for q in g.support])

    prepare(x_rows)                                     # encoded |0>
    for i in range(n):
        b.add("CNOT", (anc[i], data[i]))
    phases = [b.measure("MX", q) for q in anc]
    for i, g in x_type:
        synd[i] = b.parity([phases[q] for q in g.support])

    bits = tuple(synd[i] for i in range(code.num_generators))
    b.add("DECODE", data, bits_in=bits, arg="ec")
    b.notes["ancilla_prep"] = "requires verification (encoder is not fault tolerant)"
    b.notes["syndrome"] = " ".join(bits)
    return b.build()


# -- pi/8 gate by injection -----------------------------------------------------------------

def pi8_injection_circuit() -> Circuit:
    """Apply diag(1, e^{i pi/4}) to qubit 0 using the ancilla |0> + e^{i pi/4}|1>.

    The ancilla (qubit 1) controls a CNOT onto the data, the data is measured
    in the Z basis, and on outcome 1 the ancilla receives X then S. The
    ancilla carries the output.
    """
    b = CircuitBuilder()
    data = b.register("data", 1)[0]
    anc = b.register("ancilla", 1)[0]
    b.alias("output", (anc,))
    b.add("PREP_T", (anc,))
    b.add("CNOT", (anc, data))
    m = b.measure("MZ", data)
    b.add("X", (anc,), condition=m)
    b.add("S", (anc,), condition=m)
    b.notes["outcome"] = m
    return b.build()


def pi8_ancilla_check_circuit(include_preparation: bool = False) -> Circuit:
    """Measure e^{-i pi/4} S X on a candidate ancilla (qubit 0) with a probe
    qubit; outcome 0 (eigenvalue +1) accepts."""
    b = CircuitBuilder()
    cand = b.register("candidate", 1)[0]
    probe = b.register("probe", 1)[0]
    if include_preparation:
        b.add("PREP_T", (cand,))
    b.add("PREP_X", (probe,))
    b.add("CPX", (probe, cand))
    b.add("H", (probe,))
    b.notes["accept_if_zero"] = b.measure("MZ", probe)
    return b.build()


# -- single-fault enumeration -------------------------------------------------------------------

_LETTERS = ("X", "Y", "Z")


def _faults_for(op: Op) -> list[PauliOperator]:
    k = len(op.qubits)
    return [PauliOperator(k, v & ((1 << k) - 1), v >> k) for v in range(1, 1 << (2 * k))]


def reduced_weight(code: StabilizerCode, e: PauliOperator, limit: int = 1) -> int | None:
    """Smallest weight in e*S if it is at most ``limit``, otherwise None."""
    if in_stabilizer(code, e):
        return 0
    if limit >= 1:
        for q in range(code.n):
            for letter in _LETTERS:
                if in_stabilizer(code, multiply(e, single(code.n, q, letter))):
                    return 1
    if limit >= 2:
        raise NotImplementedError("only limits 0 and 1 are supported")
    return None


@dataclass
class FaultReport:
    locations: int
    idle_locations: int
    trials: int
    flagged: int
    aborted: int
    violations: list[tuple[tuple, str, PauliOperator]]

    @property
    def ok(self) -> bool:
        return not self.violations


def fault_locations(circuit: Circuit, include_idle: bool = True):
    """Keys of every physical location reached in a fault-free run."""
    ops: list[tuple[tuple, Op]] = []
    idles: list[tuple[int, tuple]] = []

    def record(op, key):
        ops.append((key, op))
        return None

    def record_idle(q, key):
        idles.append((q, key))
        return None

    execute(circuit, PauliFrame(circuit.num_qubits), fault=record,
            idle=record_idle if include_idle else None)
    return ops, idles


def fault_injection_check(circuit: Circuit, code: StabilizerCode, *, include_idle: bool = True,
                          block_registers=("data",)) -> FaultReport:
    """Insert every single Pauli fault at every location and check the outcome.

    A fault at a one-qubit location is X, Y or Z; at a two-qubit location any
    of the 15 non-identity Paulis. Measurement faults act just before the
    measurement. The residual error on each data block, taken modulo the
    stabilizer, must have weight at most 1 unless the run aborted.
    """
    ops, idles = fault_locations(circuit, include_idle)
    blocks = [circuit.registers[name] for name in block_registers]
    for blk in blocks:
        if len(blk) % code.n:
            raise ValueError("data register size is not a multiple of the code length")
    trials = flagged = aborted = 0
    violations = []

    def run(fault_hook, idle_hook, where, err):
        nonlocal trials, flagged, aborted
        frame = PauliFrame(circuit.num_qubits)
        res = execute(circuit, frame, fault=fault_hook, idle=idle_hook)
        trials += 1
        flagged += res.flagged
        if res.aborted:
            aborted += 1
            return
        for blk in blocks:
            for s in range(0, len(blk), code.n):
                residual = frame.restrict(blk[s:s + code.n])
                if reduced_weight(code, residual) is None:
                    violations.append((where, err, residual))

    for key, op in ops:
        for err in _faults_for(op):
            run(lambda o, k, key=key, err=err: err if k == key else None, None,
                (key, op.to_text()), str(err))
    for q, key in idles:
        for letter in _LETTERS:
            err = single(1, 0, letter)
            run(None, lambda qq, k, key=key, err=err: err if k == key else None,
                (key, f"idle {q}"), letter)
    return FaultReport(len(ops), len(idles), trials, flagged, aborted, violations)
