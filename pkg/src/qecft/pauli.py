"""
Pauli operators in the binary symplectic representation.

An n-qubit Pauli is stored as two n-bit masks packed into Python integers
(bit ``i`` is qubit ``i``, which is the ``i``-th character of the text form)
together with an exponent ``e`` so that the operator equals ``i**e`` times
the tensor product of the displayed letters I, X, Y, Z.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "PauliOperator",
    "PauliParseError",
    "DimensionError",
    "weight",
    "commutes",
    "multiply",
    "parse_pauli",
    "format_pauli",
    "pauli_matrix",
    "identity",
    "single",
    "iter_paulis",
]

_LETTERS = "IXYZ"
_SIGN_PREFIX = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_PREFIX_OUT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_SIGN_RE = re.compile(r"^(\+i|-i|\+|-|i)?")

# unicode minus sign is accepted on input
_MINUS_CHARS = str.maketrans({"−": "-"})


class DimensionError(ValueError):
    """Raised when operators on different numbers of qubits are combined."""


class PauliParseError(ValueError):
    """Raised for malformed Pauli text; ``position`` is the offending index."""

    def __init__(self, message: str, position: int):
        super().__init__(message)
        self.position = position


@dataclass(frozen=True, slots=True)
class PauliOperator:
    n: int
    x_bits: int
    z_bits: int
    phase_exponent: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a Pauli operator needs at least one qubit")
        full = (1 << self.n) - 1
        if self.x_bits & ~full or self.z_bits & ~full or self.x_bits < 0 or self.z_bits < 0:
            raise ValueError(f"bit masks do not fit in {self.n} qubits")
        object.__setattr__(self, "phase_exponent", self.phase_exponent % 4)

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_text(cls, text: str) -> PauliOperator:
        return parse_pauli(text)

    @classmethod
    def from_bits(cls, x, z, phase_exponent: int = 0) -> PauliOperator:
        """Build from two equal-length 0/1 sequences."""
        x = [int(b) & 1 for b in x]
        z = [int(b) & 1 for b in z]
        if len(x) != len(z):
            raise DimensionError("x and z vectors differ in length")
        xm = sum(b << i for i, b in enumerate(x))
        zm = sum(b << i for i, b in enumerate(z))
        return cls(len(x), xm, zm, phase_exponent)

    # -- views ------------------------------------------------------------
    @property
    def weight(self) -> int:
        return (self.x_bits | self.z_bits).bit_count()

    @property
    def support(self) -> tuple[int, ...]:
        m = self.x_bits | self.z_bits
        return tuple(i for i in range(self.n) if m >> i & 1)

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exponent % 2 == 0

    @property
    def sign(self) -> int:
        """+1/-1 for Hermitian operators."""
        if not self.is_hermitian:
            raise ValueError(f"{self} is not Hermitian")
        return 1 if self.phase_exponent == 0 else -1

    def letter(self, qubit: int) -> str:
        return "IXZY"[(self.x_bits >> qubit & 1) | ((self.z_bits >> qubit & 1) << 1)]

    @property
    def letters(self) -> str:
        return "".join(self.letter(i) for i in range(self.n))

    def x_vector(self) -> np.ndarray:
        return np.array([self.x_bits >> i & 1 for i in range(self.n)], dtype=np.uint8)

    def z_vector(self) -> np.ndarray:
        return np.array([self.z_bits >> i & 1 for i in range(self.n)], dtype=np.uint8)

    def symplectic(self) -> int:
        """Single integer ``x | z << n`` used by the GF(2) routines."""
        return self.x_bits | (self.z_bits << self.n)

    @classmethod
    def from_symplectic(cls, n: int, vec: int, phase_exponent: int = 0) -> PauliOperator:
        full = (1 << n) - 1
        return cls(n, vec & full, (vec >> n) & full, phase_exponent)

    def unsigned(self) -> PauliOperator:
        if self.phase_exponent == 0:
            return self
        return PauliOperator(self.n, self.x_bits, self.z_bits, 0)

    def with_phase(self, phase_exponent: int) -> PauliOperator:
        return PauliOperator(self.n, self.x_bits, self.z_bits, phase_exponent)

    def negate(self) -> PauliOperator:
        return self.with_phase(self.phase_exponent + 2)

    def restrict(self, qubits: Iterable[int]) -> PauliOperator:
        """Tensor factors on ``qubits`` (in the given order), phase dropped."""
        qubits = list(qubits)
        x = sum((self.x_bits >> q & 1) << j for j, q in enumerate(qubits))
        z = sum((self.z_bits >> q & 1) << j for j, q in enumerate(qubits))
        return PauliOperator(len(qubits), x, z)

    def embed(self, n: int, qubits: Iterable[int]) -> PauliOperator:
        """Place this operator on ``qubits`` of an ``n``-qubit register."""
        qubits = list(qubits)
        if len(qubits) != self.n:
            raise DimensionError(f"need {self.n} target qubits, got {len(qubits)}")
        x = sum((self.x_bits >> j & 1) << q for j, q in enumerate(qubits))
        z = sum((self.z_bits >> j & 1) << q for j, q in enumerate(qubits))
        return PauliOperator(n, x, z, self.phase_exponent)

    def tensor(self, other: PauliOperator) -> PauliOperator:
        return PauliOperator(
            self.n + other.n,
            self.x_bits | (other.x_bits << self.n),
            self.z_bits | (other.z_bits << self.n),
            self.phase_exponent + other.phase_exponent,
        )

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return multiply(self, other)

    def __str__(self) -> str:
        return format_pauli(self)

    def __repr__(self) -> str:
        return f"PauliOperator('{format_pauli(self)}')"


def _check_same(p: PauliOperator, q: PauliOperator) -> None:
    if p.n != q.n:
        raise DimensionError(f"operators act on {p.n} and {q.n} qubits")


def weight(p: PauliOperator) -> int:
    return (p.x_bits | p.z_bits).bit_count()


def symplectic_product(p: PauliOperator, q: PauliOperator) -> int:
    """p_X . q_Z + p_Z . q_X mod 2."""
    _check_same(p, q)
    return ((p.x_bits & q.z_bits).bit_count() + (p.z_bits & q.x_bits).bit_count()) & 1


def commutes(p: PauliOperator, q: PauliOperator) -> bool:
    return symplectic_product(p, q) == 0


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Exact operator product ``p @ q``.

    Letters are converted to the X^x Z^z form (Y = i X Z), multiplied there
    (moving q's X past p's Z costs a sign per overlap) and converted back.
    """
    _check_same(p, q)
    x = p.x_bits ^ q.x_bits
    z = p.z_bits ^ q.z_bits
    e = (
        p.phase_exponent
        + q.phase_exponent
        + (p.x_bits & p.z_bits).bit_count()
        + (q.x_bits & q.z_bits).bit_count()
        + 2 * (p.z_bits & q.x_bits).bit_count()
        - (x & z).bit_count()
    )
    return PauliOperator(p.n, x, z, e)


def identity(n: int) -> PauliOperator:
    return PauliOperator(n, 0, 0, 0)


def single(n: int, qubit: int, letter: str) -> PauliOperator:
    """Weight-one operator ``letter`` on ``qubit``."""
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range for n={n}")
    idx = "IXYZ".index(letter)
    x = 1 if idx in (1, 2) else 0
    z = 1 if idx in (2, 3) else 0
    return PauliOperator(n, x << qubit, z << qubit)


def parse_pauli(text: str) -> PauliOperator:
    """Parse ``[+|-|+i|-i]`` followed by letters from IXYZ.

    >>> parse_pauli("-Y").phase_exponent
    2
    """
    s = text.strip().translate(_MINUS_CHARS)
    m = _SIGN_RE.match(s)
    prefix = m.group(0) if m else ""
    body = s[len(prefix):]
    if not body:
        raise PauliParseError("no Pauli letters", len(prefix))
    x = z = 0
    for j, ch in enumerate(body):
        if ch not in _LETTERS:
            pos = len(prefix) + j
            raise PauliParseError(f"bad character {ch!r} at index {pos}", pos)
        if ch in "XY":
            x |= 1 << j
        if ch in "YZ":
            z |= 1 << j
    return PauliOperator(len(body), x, z, _SIGN_PREFIX[prefix])


def format_pauli(p: PauliOperator, *, signed: bool | None = None) -> str:
    """Text form; the ``+`` prefix is omitted unless ``signed`` is true."""
    body = p.letters
    if p.phase_exponent == 0 and not signed:
        return body
    return _PREFIX_OUT[p.phase_exponent] + body


_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    """Dense 2^n x 2^n matrix; qubit 0 is the most significant tensor factor."""
    out = np.array([[1j ** p.phase_exponent]], dtype=complex)
    for ch in p.letters:
        out = np.kron(out, _MATS[ch])
    return out


def iter_paulis(n: int):
    """All 4^n unsigned Paulis on n qubits."""
    for x in range(1 << n):
        for z in range(1 << n):
            yield PauliOperator(n, x, z)
