"""
Code constructions (CSS, built-in codes, concatenation) and rate bounds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import gf2
from .pauli import PauliOperator, multiply, parse_pauli
from .stabilizer import StabilizerCode

__all__ = [
    "ClassicalLinearCode",
    "CSSError",
    "UnsupportedCodeError",
    "DomainError",
    "BoundReport",
    "css_code",
    "five_qubit_code",
    "steane_code",
    "hamming_code",
    "repetition_code",
    "bit_flip_code",
    "phase_flip_code",
    "shor_code",
    "encoded_css_basis_description",
    "concatenate",
    "singleton_check",
    "gv_rate",
    "hamming_rate",
    "binary_entropy",
    "bound_report",
    "read_pcm",
    "write_pcm",
]

FIVE_QUBIT_GENERATORS = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")
HAMMING_PARITY_CHECK = ((0, 0, 0, 1, 1, 1, 1), (0, 1, 1, 0, 0, 1, 1), (1, 0, 1, 0, 1, 0, 1))


class CSSError(ValueError):
    def __init__(self, message: str, pair=None):
        super().__init__(message)
        self.pair = pair


class UnsupportedCodeError(ValueError):
    pass


class DomainError(ValueError):
    pass


class ClassicalLinearCode:
    """Binary linear code given by its parity check matrix (rows may be dependent)."""

    def __init__(self, h):
        h = np.atleast_2d(np.asarray(h, dtype=np.uint8)) & 1
        if h.ndim != 2:
            raise ValueError("parity check matrix must be 2-D")
        self.h = h
        self.n = h.shape[1]
        self.rows = gf2.matrix_to_rows(h) if h.shape[0] else []
        self.k = self.n - gf2.rank(self.rows)

    @classmethod
    def empty(cls, n: int) -> ClassicalLinearCode:
        return cls(np.zeros((0, n), dtype=np.uint8))

    def codewords(self) -> list[int]:
        """All codewords as bit masks (bit j = position j)."""
        return gf2.span(gf2.nullspace(self.rows, self.n))

    def is_codeword(self, v) -> bool:
        v = np.asarray(v, dtype=np.uint8)
        return not np.any((self.h.astype(int) @ v) % 2)

    def distance(self) -> int | None:
        if self.n > 24:
            raise ValueError("exhaustive classical distance is limited to n <= 24")
        weights = [c.bit_count() for c in self.codewords() if c]
        return min(weights) if weights else None

    def __repr__(self) -> str:
        return f"<ClassicalLinearCode [{self.n},{self.k}]>"


def _bits_str(v: int, n: int) -> str:
    return "".join(str(v >> j & 1) for j in range(n))


def _independent(rows: list[int], label: str) -> list[int]:
    keep = gf2.independent_rows(rows)
    if len(keep) != len(rows):
        warnings.warn(f"{label}: dropped {len(rows) - len(keep)} dependent parity-check row(s)", stacklevel=3)
    return [rows[i] for i in keep]


def _css_logicals(z_rows: list[int], x_rows: list[int], n: int):
    """Pair X-type and Z-type logical representatives.

    X logicals live in ker(H1) modulo rowspace(H2); Z logicals in ker(H2)
    modulo rowspace(H1).
    """
    def complement(kernel, stab_rows):
        basis = gf2.XorBasis()
        for r in stab_rows:
            basis.add(r, 0)
        return [v for v in kernel if basis.add(v, 0) is None]

    xs = complement(gf2.nullspace(z_rows, n), x_rows)
    zs = complement(gf2.nullspace(x_rows, n), z_rows)
    dot = lambda a, b: (a & b).bit_count() & 1  # noqa: E731
    for i in range(len(xs)):
        j = next(j for j in range(i, len(zs)) if dot(xs[i], zs[j]))
        zs[i], zs[j] = zs[j], zs[i]
        for m in range(len(zs)):
            if m != i and dot(xs[i], zs[m]):
                zs[m] ^= zs[i]
        for m in range(len(xs)):
            if m != i and dot(xs[m], zs[i]):
                xs[m] ^= xs[i]
    lx = [PauliOperator(n, v, 0) for v in xs]
    lz = [PauliOperator(n, 0, v) for v in zs]
    return lx, lz


def css_code(c1: ClassicalLinearCode, c2: ClassicalLinearCode, *, name: str | None = None) -> StabilizerCode:
    """Z-type generators from the rows of H1, X-type generators from the rows of H2."""
    if c1.n != c2.n:
        raise CSSError(f"codes have different lengths {c1.n} and {c2.n}")
    n = c1.n
    z_rows = _independent(list(c1.rows), "H1")
    x_rows = _independent(list(c2.rows), "H2")
    for i, a in enumerate(z_rows):
        for j, b in enumerate(x_rows):
            if (a & b).bit_count() & 1:
                raise CSSError(
                    f"H1 row {i} ({_bits_str(a, n)}) and H2 row {j} ({_bits_str(b, n)}) "
                    "have odd overlap, so C2-dual is not inside C1",
                    pair=(i, j),
                )
    gens = [PauliOperator(n, 0, r) for r in z_rows] + [PauliOperator(n, r, 0) for r in x_rows]
    if not gens:
        return StabilizerCode.trivial(n)
    lx, lz = _css_logicals(z_rows, x_rows, n)
    return StabilizerCode(gens, lx, lz, name=name)


def hamming_code() -> ClassicalLinearCode:
    return ClassicalLinearCode(HAMMING_PARITY_CHECK)


def repetition_code(n: int) -> ClassicalLinearCode:
    if n < 2:
        raise ValueError("repetition code needs n >= 2")
    h = np.zeros((n - 1, n), dtype=np.uint8)
    for i in range(n - 1):
        h[i, i] = h[i, i + 1] = 1
    return ClassicalLinearCode(h)


def five_qubit_code() -> StabilizerCode:
    return StabilizerCode([parse_pauli(g) for g in FIVE_QUBIT_GENERATORS], known_distance=3, name="five-qubit")


def steane_code() -> StabilizerCode:
    code = css_code(hamming_code(), hamming_code(), name="steane")
    code.known_distance = 3
    return code


def bit_flip_code(n: int = 3) -> StabilizerCode:
    """Z-type checks of the repetition code."""
    return css_code(repetition_code(n), ClassicalLinearCode.empty(n), name=f"bit-flip-{n}")


def phase_flip_code(n: int = 3) -> StabilizerCode:
    """X-type checks of the repetition code."""
    return css_code(ClassicalLinearCode.empty(n), repetition_code(n), name=f"phase-flip-{n}")


def shor_code() -> StabilizerCode:
    code = concatenate(phase_flip_code(3), bit_flip_code(3))
    code.name = "shor"
    return code


@dataclass(frozen=True)
class CSSBasis:
    """Bit strings (qubit 0 first) whose uniform superpositions are |0> and |1> logical."""

    zero: tuple[str, ...]
    one: tuple[str, ...]


def encoded_css_basis_description(code: StabilizerCode) -> CSSBasis:
    if not code.is_css or code.k != 1:
        raise UnsupportedCodeError("need a CSS code encoding exactly one qubit")
    lx, lz = code.logical_x[0], code.logical_z[0]
    if lx.z_bits or lz.x_bits:
        raise UnsupportedCodeError("logical operators are not in CSS form")
    x_rows = [g.x_bits for g in code.generators if g.x_bits]
    zero = gf2.span(x_rows)
    n = code.n
    return CSSBasis(
        tuple(sorted(_bits_str(v, n) for v in zero)),
        tuple(sorted(_bits_str(v ^ lx.x_bits, n) for v in zero)),
    )


def _lift(outer_op: PauliOperator, inner: StabilizerCode) -> PauliOperator:
    """Replace each letter of an outer operator by the inner logical on that block."""
    ni = inner.n
    n = outer_op.n * ni
    lx, lz = inner.logical_x[0], inner.logical_z[0]
    ly = multiply(lx, lz).unsigned()
    x = z = 0
    for j in range(outer_op.n):
        letter = outer_op.letter(j)
        if letter == "I":
            continue
        rep = {"X": lx, "Z": lz, "Y": ly}[letter]
        x |= rep.x_bits << (j * ni)
        z |= rep.z_bits << (j * ni)
    return PauliOperator(n, x, z)


def concatenate(outer: StabilizerCode, inner: StabilizerCode) -> StabilizerCode:
    """Encode every qubit of ``outer`` in a block of ``inner``."""
    if outer.k != 1 or inner.k != 1:
        raise UnsupportedCodeError("concatenation needs k = 1 for both codes")
    no, ni = outer.n, inner.n
    n = no * ni
    gens = []
    for b in range(no):
        for g in inner.generators:
            gens.append(PauliOperator(n, g.x_bits << (b * ni), g.z_bits << (b * ni)))
    gens += [_lift(g, inner) for g in outer.generators]
    lx = [_lift(outer.logical_x[0], inner)]
    lz = [_lift(outer.logical_z[0], inner)]
    return StabilizerCode(gens, lx, lz, name=f"{outer.name}∘{inner.name}")


# -- bounds -----------------------------------------------------------------

def binary_entropy(x: float) -> float:
    if not 0 <= x <= 1:
        raise DomainError(f"entropy argument {x} outside [0, 1]")
    if x in (0, 1):
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def singleton_check(n: int, K: int, d: int) -> bool:
    """n - log2 K >= 2d - 2."""
    if K < 2 or d < 1 or n < 1:
        raise DomainError("need n >= 1, K >= 2, d >= 1")
    return n - math.log2(K) >= 2 * d - 2


def gv_rate(delta: float) -> float:
    """1 - delta log2 3 - h(delta): rate achievable at relative distance delta."""
    if not 0 <= delta <= 1:
        raise DomainError(f"relative distance {delta} outside [0, 1]")
    return 1 - delta * math.log2(3) - binary_entropy(delta)


def hamming_rate(tau: float) -> float:
    """1 - tau log2 3 - h(tau): rate ceiling for non-degenerate codes correcting tau*n errors."""
    if not 0 <= tau <= 1:
        raise DomainError(f"relative error count {tau} outside [0, 1]")
    return 1 - tau * math.log2(3) - binary_entropy(tau)


@dataclass(frozen=True)
class BoundReport:
    n: int
    k: int
    d: int
    singleton_ok: bool
    singleton_tight: bool
    hamming_rate_bound: float
    gv_rate_bound: float
    notes: str

    def as_text(self) -> str:
        lhs, rhs = self.n - self.k, 2 * self.d - 2
        if self.singleton_ok:
            sing = "satisfied with equality" if self.singleton_tight else "satisfied"
        else:
            sing = "VIOLATED"
        return "\n".join([
            f"[[{self.n},{self.k},{self.d}]]  rate k/n = {self.k / self.n:.6g}",
            f"Singleton: {sing} (n - k = {lhs}, 2d - 2 = {rhs})",
            f"Hamming rate bound (t = {(self.d - 1) // 2}): {self.hamming_rate_bound:.6g}",
            f"Gilbert-Varshamov rate (d/n = {self.d / self.n:.6g}): {self.gv_rate_bound:.6g}",
            self.notes,
        ])


def bound_report(n: int, k: int, d: int) -> BoundReport:
    if n < 1 or not 0 <= k <= n or d < 1:
        raise DomainError("need n >= 1, 0 <= k <= n, d >= 1")
    K = 2 ** k
    ok = singleton_check(n, K, d) if K >= 2 else (n >= 2 * d - 2)
    tight = (n - k) == 2 * d - 2
    t = (d - 1) // 2
    ham = max(0.0, min(1.0, hamming_rate(t / n))) if t <= n else 0.0
    gv = max(0.0, min(1.0, gv_rate(d / n))) if d <= n else 0.0
    rate = k / n
    notes = []
    notes.append(
        "rate within the Hamming bound (asymptotic, non-degenerate codes)"
        if rate <= ham else "rate above the asymptotic Hamming bound for non-degenerate codes"
    )
    notes.append(
        "rate at or below the Gilbert-Varshamov guarantee" if rate <= gv
        else "rate above the Gilbert-Varshamov guarantee (not a violation)"
    )
    return BoundReport(n, k, d, ok, tight, ham, gv, "; ".join(notes))


# -- .pcm files ---------------------------------------------------------------

def read_pcm(path) -> ClassicalLinearCode:
    rows = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if any(t not in ("0", "1") for t in toks):
            raise ValueError(f"{path}:{lineno}: entries must be 0 or 1")
        rows.append([int(t) for t in toks])
    if not rows:
        raise ValueError(f"{path}: no rows")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: rows differ in length")
    return ClassicalLinearCode(np.array(rows, dtype=np.uint8))


def write_pcm(path, code: ClassicalLinearCode, comment: str | None = None) -> None:
    lines = [f"# {c}" for c in comment.splitlines()] if comment else []
    lines += [" ".join(str(int(b)) for b in row) for row in code.h]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
