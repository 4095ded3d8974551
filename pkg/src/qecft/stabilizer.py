"""
Stabilizer codes: validation, syndromes, logical operators, distance,
degeneracy, erasure decoding and lookup-table decoding.
"""

from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from . import gf2
from .pauli import (
    DimensionError,
    PauliOperator,
    commutes,
    format_pauli,
    identity,
    multiply,
    parse_pauli,
    symplectic_product,
)

log = logging.getLogger(__name__)

__all__ = [
    "CodeValidationError",
    "InfeasibleErasureError",
    "StabilizerCode",
    "Syndrome",
    "DecoderTable",
    "Cap",
    "validate",
    "syndrome",
    "in_stabilizer",
    "in_normalizer",
    "stabilizer_sign",
    "distance",
    "min_weight_logical",
    "is_degenerate",
    "verify_detection",
    "decode_erasure",
    "build_decoder",
    "decode",
    "read_stab",
    "write_stab",
    "paulis_of_weight",
]


class CodeValidationError(ValueError):
    """A generator list does not define a stabilizer code."""

    def __init__(self, message: str, *, pair=None, combination=None, index=None):
        super().__init__(message)
        self.pair = pair
        self.combination = combination
        self.index = index


class InfeasibleErasureError(ValueError):
    """No Pauli on the erased positions reproduces the syndrome."""


class Cap(enum.Enum):
    EXCEEDS = "exceeds cap"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Syndrome:
    """Bit ``i`` is 1 iff the error anticommutes with generator ``i``."""

    bits: tuple[int, ...]

    @classmethod
    def from_int(cls, value: int, length: int) -> Syndrome:
        return cls(tuple(value >> i & 1 for i in range(length)))

    def to_int(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def __len__(self) -> int:
        return len(self.bits)

    def is_trivial(self) -> bool:
        return not any(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def _pair_phase_ok(p: PauliOperator) -> bool:
    return p.phase_exponent == 0


class StabilizerCode:
    """An [[n, k]] stabilizer code given by independent commuting generators.

    Construction validates the generators and, unless supplied, completes
    ``k`` logical X/Z pairs by symplectic Gram-Schmidt over the normalizer.
    """

    def __init__(
        self,
        generators: Sequence[PauliOperator],
        logical_x: Sequence[PauliOperator] | None = None,
        logical_z: Sequence[PauliOperator] | None = None,
        *,
        known_distance: int | None = None,
        name: str | None = None,
    ):
        gens = tuple(generators)
        if not gens:
            raise CodeValidationError("empty generator list; pass n via StabilizerCode.trivial")
        self._init(gens[0].n, gens, logical_x, logical_z, known_distance, name)

    @classmethod
    def trivial(cls, n: int) -> StabilizerCode:
        """The [[n, n]] code with no generators."""
        obj = cls.__new__(cls)
        obj._init(n, (), None, None, None, f"trivial[[{n},{n}]]")
        return obj

    def _init(self, n, gens, logical_x, logical_z, known_distance, name):
        self.n = n
        self.name = name
        self.known_distance = known_distance
        for i, g in enumerate(gens):
            if g.n != n:
                raise CodeValidationError(f"generator {i} acts on {g.n} qubits, expected {n}", index=i)
            if not _pair_phase_ok(g):
                raise CodeValidationError(
                    f"generator {i} ({format_pauli(g)}) carries a nonzero phase", index=i
                )
        for i, j in itertools.combinations(range(len(gens)), 2):
            if not commutes(gens[i], gens[j]):
                raise CodeValidationError(
                    f"generators {i} ({gens[i]}) and {j} ({gens[j]}) anticommute", pair=(i, j)
                )
        basis = gf2.XorBasis()
        for i, g in enumerate(gens):
            dep = basis.add(g.symplectic(), 1 << i)
            if dep is not None:
                combo = [j for j in range(len(gens)) if dep >> j & 1]
                raise CodeValidationError(
                    "generators are dependent: product of generators "
                    + ", ".join(map(str, combo))
                    + " is proportional to the identity",
                    combination=combo,
                )
        self.generators: tuple[PauliOperator, ...] = gens
        self.k = n - len(gens)
        self._basis = basis
        # syndrome contributed by X_q / Z_q, one bit per generator
        self._synd_x = [sum(1 << i for i, g in enumerate(gens) if g.z_bits >> q & 1) for q in range(n)]
        self._synd_z = [sum(1 << i for i, g in enumerate(gens) if g.x_bits >> q & 1) for q in range(n)]
        if logical_x is None and logical_z is None:
            lx, lz = self._complete_logicals()
        elif logical_x is None or logical_z is None:
            raise CodeValidationError("logical_x and logical_z must be given together")
        else:
            lx, lz = tuple(logical_x), tuple(logical_z)
            self._check_logicals(lx, lz)
        self.logical_x: tuple[PauliOperator, ...] = lx
        self.logical_z: tuple[PauliOperator, ...] = lz

    # -- logical operators --------------------------------------------------
    def _complete_logicals(self):
        n = self.n
        if self.k == 0:
            return (), ()
        # v commutes with g iff v . swap(g) = 0
        constraints = [(g.z_bits) | (g.x_bits << n) for g in self.generators]
        normalizer = gf2.nullspace(constraints, 2 * n)
        basis = gf2.XorBasis()
        for g in self.generators:
            basis.add(g.symplectic(), 0)
        complement = []
        for v in normalizer:
            if basis.add(v, 0) is None:
                complement.append(v)
        assert len(complement) == 2 * self.k, "normalizer dimension mismatch"

        def sp(a, b):
            return ((a & (b >> n)).bit_count() + ((a >> n) & b).bit_count()) & 1

        lx, lz = [], []
        pool = complement
        while pool:
            a = pool.pop(0)
            partner = next((i for i, b in enumerate(pool) if sp(a, b)), None)
            assert partner is not None, "normalizer quotient is not symplectic"
            b = pool.pop(partner)
            pool = [c ^ (a if sp(c, b) else 0) ^ (b if sp(c, a) else 0) for c in pool]
            lx.append(PauliOperator.from_symplectic(n, a))
            lz.append(PauliOperator.from_symplectic(n, b))
        return tuple(lx), tuple(lz)

    def _check_logicals(self, lx, lz):
        if len(lx) != self.k or len(lz) != self.k:
            raise CodeValidationError(f"expected {self.k} logical pairs")
        for op in (*lx, *lz):
            if op.n != self.n or self.syndrome_int(op):
                raise CodeValidationError(f"logical {op} is not in the normalizer")
        for i in range(self.k):
            for j in range(self.k):
                if commutes(lx[i], lz[j]) != (i != j):
                    raise CodeValidationError(f"logical X{i}/Z{j} have the wrong commutation")
                if i < j and not (commutes(lx[i], lx[j]) and commutes(lz[i], lz[j])):
                    raise CodeValidationError(f"logicals {i} and {j} do not commute")
        for op in (*lx, *lz):
            if op.phase_exponent:
                raise CodeValidationError(f"logical {op} must be unsigned")

    # -- fast helpers -------------------------------------------------------
    @property
    def num_generators(self) -> int:
        return len(self.generators)

    def syndrome_int(self, e: PauliOperator) -> int:
        if e.n != self.n:
            raise DimensionError(f"error acts on {e.n} qubits, code on {self.n}")
        s = 0
        for i, g in enumerate(self.generators):
            if symplectic_product(e, g):
                s |= 1 << i
        return s

    def syndrome_of_letters(self, x_bits: int, z_bits: int) -> int:
        s = 0
        q = 0
        while x_bits or z_bits:
            if x_bits & 1:
                s ^= self._synd_x[q]
            if z_bits & 1:
                s ^= self._synd_z[q]
            x_bits >>= 1
            z_bits >>= 1
            q += 1
        return s

    def stabilizer_element(self, mask: int) -> PauliOperator:
        """Product of the generators selected by ``mask`` (in index order)."""
        out = identity(self.n)
        for i, g in enumerate(self.generators):
            if mask >> i & 1:
                out = multiply(out, g)
        return out

    def iter_stabilizer_group(self) -> Iterator[PauliOperator]:
        for mask in range(1 << len(self.generators)):
            yield self.stabilizer_element(mask)

    def logical_operator(self, letters: str) -> PauliOperator:
        """Representative of a logical Pauli written on the k encoded qubits.

        Y is taken as i*X*Z on each logical qubit, so the result is Hermitian.
        """
        if len(letters) != self.k:
            raise DimensionError(f"need {self.k} logical letters")
        out = identity(self.n)
        for i, ch in enumerate(letters):
            if ch == "X":
                out = multiply(out, self.logical_x[i])
            elif ch == "Z":
                out = multiply(out, self.logical_z[i])
            elif ch == "Y":
                xz = multiply(self.logical_x[i], self.logical_z[i])
                out = multiply(out, xz.with_phase(xz.phase_exponent + 1))
            elif ch != "I":
                raise ValueError(f"bad logical letter {ch!r}")
        return out

    def tensor(self, other: StabilizerCode) -> StabilizerCode:
        """Two blocks side by side (this code on the first n qubits)."""
        n = self.n + other.n
        lift_a = lambda p: p.tensor(identity(other.n))  # noqa: E731
        lift_b = lambda p: identity(self.n).tensor(p)  # noqa: E731
        gens = [lift_a(g) for g in self.generators] + [lift_b(g) for g in other.generators]
        lx = [lift_a(p) for p in self.logical_x] + [lift_b(p) for p in other.logical_x]
        lz = [lift_a(p) for p in self.logical_z] + [lift_b(p) for p in other.logical_z]
        if not gens:
            code = StabilizerCode.trivial(n)
            return code
        return StabilizerCode(gens, lx, lz, name=f"{self.name}x{other.name}")

    @property
    def is_css(self) -> bool:
        return all(g.x_bits == 0 or g.z_bits == 0 for g in self.generators)

    def __repr__(self) -> str:
        d = f",{self.known_distance}" if self.known_distance else ""
        label = f" {self.name}" if self.name else ""
        return f"<StabilizerCode{label} [[{self.n},{self.k}{d}]]>"


def validate(generators: Sequence[PauliOperator], **kwargs) -> StabilizerCode:
    gens = list(generators)
    if not gens:
        raise CodeValidationError("empty generator list")
    n = gens[0].n
    if any(g.n != n for g in gens):
        raise CodeValidationError("generators act on different numbers of qubits")
    return StabilizerCode(gens, **kwargs)


def syndrome(code: StabilizerCode, e: PauliOperator) -> Syndrome:
    return Syndrome.from_int(code.syndrome_int(e), code.num_generators)


def in_normalizer(code: StabilizerCode, p: PauliOperator) -> bool:
    return code.syndrome_int(p) == 0


def stabilizer_sign(code: StabilizerCode, p: PauliOperator) -> int | None:
    """+1 if p is in S, -1 if -p is in S, None otherwise (including +-i p)."""
    if p.n != code.n:
        raise DimensionError(f"operator acts on {p.n} qubits, code on {code.n}")
    mask = code._basis.decompose(p.symplectic())
    if mask is None:
        return None
    rel = (p.phase_exponent - code.stabilizer_element(mask).phase_exponent) % 4
    return {0: 1, 2: -1}.get(rel)


def in_stabilizer(code: StabilizerCode, p: PauliOperator, *, signed: bool = False) -> bool:
    """Membership in S; by default the sign of ``p`` is ignored."""
    if signed:
        return stabilizer_sign(code, p) == 1
    if p.n != code.n:
        raise DimensionError(f"operator acts on {p.n} qubits, code on {code.n}")
    return code._basis.contains(p.symplectic())


def is_logical_error(code: StabilizerCode, p: PauliOperator) -> bool:
    """True iff p lies in the normalizer but not (up to phase) in S."""
    return code.syndrome_int(p) == 0 and not code._basis.contains(p.symplectic())


def logical_class(code: StabilizerCode, p: PauliOperator) -> PauliOperator:
    """The k-qubit Pauli that ``p`` implements on the code space.

    ``p`` must lie in the normalizer. The result carries the sign: when ``p``
    acts as minus a logical Pauli on the code space it is returned negated.
    Y on logical qubit j means i * X_j * Z_j.
    """
    if code.syndrome_int(p):
        raise ValueError(f"{p} is not in the normalizer")
    x = z = 0
    for j in range(code.k):
        if not commutes(p, code.logical_z[j]):
            x |= 1 << j
        if not commutes(p, code.logical_x[j]):
            z |= 1 << j
    label = PauliOperator(code.k, x, z)
    rest = multiply(code.logical_operator(label.letters), p)
    sign = stabilizer_sign(code, rest)
    if sign is None:
        # p is i times a Hermitian operator; keep the extra phase
        sign_exp = (rest.phase_exponent - code.stabilizer_element(
            code._basis.decompose(rest.symplectic())).phase_exponent) % 4
        return label.with_phase(sign_exp)
    return label if sign == 1 else label.negate()


def paulis_of_weight(n: int, w: int, positions: Iterable[int] | None = None) -> Iterator[PauliOperator]:
    """All unsigned Paulis of weight exactly w supported inside ``positions``."""
    pos = range(n) if positions is None else list(positions)
    for support in itertools.combinations(pos, w):
        for lets in itertools.product((1, 2, 3), repeat=w):
            x = z = 0
            for q, code in zip(support, lets):
                if code & 1:
                    x |= 1 << q
                if code & 2:
                    z |= 1 << q
            # code 1 -> X, 2 -> Z, 3 -> Y
            yield PauliOperator(n, x, z)


def _search(code: StabilizerCode, weights: Iterable[int], want_logical: bool):
    contrib_x, contrib_z = code._synd_x, code._synd_z
    for w in weights:
        for support in itertools.combinations(range(code.n), w):
            parts = [(contrib_x[q], contrib_z[q], contrib_x[q] ^ contrib_z[q]) for q in support]
            for lets in itertools.product((0, 1, 2), repeat=w):
                s = 0
                for part, l in zip(parts, lets):
                    s ^= part[l]
                if s:
                    continue
                x = z = 0
                for q, l in zip(support, lets):
                    if l != 1:
                        x |= 1 << q
                    if l != 0:
                        z |= 1 << q
                vec = x | (z << code.n)
                inside = code._basis.contains(vec)
                if want_logical != inside:
                    return w, PauliOperator(code.n, x, z)
    return None


def min_weight_logical(code: StabilizerCode, weight_cap: int) -> PauliOperator | None:
    """A minimum-weight element of the normalizer outside S (or, for k = 0, a
    minimum-weight nontrivial stabilizer element), None when above the cap."""
    if weight_cap < 1:
        raise ValueError("weight_cap must be >= 1")
    found = _search(code, range(1, min(weight_cap, code.n) + 1), want_logical=code.k > 0)
    return None if found is None else found[1]


def distance(code: StabilizerCode, weight_cap: int) -> int | Cap:
    """Exhaustive distance up to ``weight_cap``; ``Cap.EXCEEDS`` beyond it.

    For k = 0 codes this is the smallest weight of a nontrivial stabilizer element.
    """
    witness = min_weight_logical(code, weight_cap)
    if witness is None:
        return Cap.EXCEEDS
    return witness.weight


def is_degenerate(code: StabilizerCode, d: int) -> bool:
    if d < 1:
        raise ValueError("d must be >= 1")
    if d == 1:
        return False
    return _search(code, range(1, d), want_logical=False) is not None


def verify_detection(code: StabilizerCode, d: int) -> bool:
    """Every Pauli of weight 1..d-1 is either in S or has a nonzero syndrome."""
    return _search(code, range(1, d), want_logical=True) is None if code.k else True


def decode_erasure(code: StabilizerCode, erased_positions: Iterable[int], synd) -> PauliOperator:
    """Correction supported on ``erased_positions`` reproducing ``synd``."""
    erased = sorted(set(erased_positions))
    for q in erased:
        if not 0 <= q < code.n:
            raise IndexError(f"erased position {q} out of range")
    target = synd.to_int() if isinstance(synd, Syndrome) else int(synd)
    columns = []
    for q in erased:
        columns.append(code._synd_x[q])
        columns.append(code._synd_z[q])
    sol = gf2.solve(columns, target)
    if sol is None:
        raise InfeasibleErasureError(
            f"no Pauli on {erased} has syndrome {Syndrome.from_int(target, code.num_generators)}"
        )
    x = z = 0
    for j, q in enumerate(erased):
        if sol >> (2 * j) & 1:
            x |= 1 << q
        if sol >> (2 * j + 1) & 1:
            z |= 1 << q
    return PauliOperator(code.n, x, z)


@dataclass(frozen=True)
class DecoderTable:
    code: StabilizerCode
    covered_weight: int
    entries: dict[int, PauliOperator]
    _extended: dict[int, PauliOperator] = field(default_factory=dict, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, s) -> tuple[PauliOperator, bool]:
        """Return ``(correction, best_effort)`` for a syndrome."""
        key = s.to_int() if isinstance(s, Syndrome) else int(s)
        hit = self.entries.get(key)
        if hit is not None:
            return hit, False
        hit = self._extended.get(key)
        if hit is None:
            hit = _extend_search(self.code, key, self.covered_weight + 1)
            self._extended[key] = hit
        return hit, True

    def complete(self) -> list[PauliOperator]:
        """Corrections for every syndrome value, indexed by the syndrome integer."""
        return [self.lookup(s)[0] for s in range(1 << self.code.num_generators)]


def _sorted_weight(n: int, w: int) -> list[PauliOperator]:
    return sorted(paulis_of_weight(n, w), key=format_pauli)


def _extend_search(code: StabilizerCode, key: int, start: int) -> PauliOperator:
    for w in range(start, code.n + 1):
        for p in _sorted_weight(code.n, w):
            if code.syndrome_of_letters(p.x_bits, p.z_bits) == key:
                log.debug("best-effort correction %s of weight %d", p, w)
                return p
    raise ValueError(f"syndrome {key} is not reachable")  # impossible for independent generators


def build_decoder(code: StabilizerCode, t: int) -> DecoderTable:
    """Lookup table from every syndrome of a weight <= t error to a
    minimum-weight correction (ties broken by text form)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    entries: dict[int, PauliOperator] = {}
    for w in range(0, min(t, code.n) + 1):
        cands = [identity(code.n)] if w == 0 else _sorted_weight(code.n, w)
        for p in cands:
            entries.setdefault(code.syndrome_of_letters(p.x_bits, p.z_bits), p)
    return DecoderTable(code, t, entries)


def decode(table: DecoderTable, s) -> PauliOperator:
    return table.lookup(s)[0]


# -- .stab files --------------------------------------------------------------

def read_stab(path) -> list[PauliOperator]:
    gens = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            gens.append(parse_pauli(line))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return gens


def write_stab(path, generators: Iterable[PauliOperator], comment: str | None = None) -> None:
    lines = []
    if comment:
        lines += [f"# {c}" for c in comment.splitlines()]
    lines += [format_pauli(g) for g in generators]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
