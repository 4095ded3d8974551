"""GF(2) linear algebra on bit vectors packed into Python integers."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


class XorBasis:
    """Incremental row-echelon basis that remembers how each row was formed.

    Every inserted vector carries a ``tag`` bit mask (normally ``1 << index``);
    reduced rows keep the XOR of the tags that produced them, so a dependency
    or a span decomposition can be reported in terms of the original inputs.
    """

    def __init__(self):
        self._rows: dict[int, tuple[int, int]] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vec: int) -> tuple[int, int]:
        """Return ``(residual, tags)``; residual is 0 iff ``vec`` is in the span."""
        tags = 0
        while vec:
            top = vec.bit_length() - 1
            row = self._rows.get(top)
            if row is None:
                return vec, tags
            vec ^= row[0]
            tags ^= row[1]
        return 0, tags

    def add(self, vec: int, tag: int) -> int | None:
        """Insert ``vec``. Returns None if it was independent, otherwise the
        tag combination (including ``tag``) whose XOR vanishes."""
        residual, tags = self.reduce(vec)
        if residual == 0:
            return tags ^ tag
        self._rows[residual.bit_length() - 1] = (residual, tags ^ tag)
        return None

    def contains(self, vec: int) -> bool:
        return self.reduce(vec)[0] == 0

    def decompose(self, vec: int) -> int | None:
        """Tag combination spanning ``vec``, or None when outside the span."""
        residual, tags = self.reduce(vec)
        return tags if residual == 0 else None


def rank(rows: Iterable[int]) -> int:
    basis = XorBasis()
    for r in rows:
        basis.add(r, 0)
    return len(basis)


def independent_rows(rows: Sequence[int]) -> list[int]:
    """Indices of a maximal independent prefix-greedy subset of ``rows``."""
    basis = XorBasis()
    keep = []
    for i, r in enumerate(rows):
        if basis.add(r, 0) is None:
            keep.append(i)
    return keep


def nullspace(rows: Sequence[int], ncols: int) -> list[int]:
    """Basis of {v : popcount(r & v) even for every r in rows}."""
    pivots: list[tuple[int, int]] = []  # (pivot column, row)
    for r in rows:
        for col, prow in pivots:
            if r >> col & 1:
                r ^= prow
        if r == 0:
            continue
        col = r.bit_length() - 1
        # keep the matrix fully reduced so free-variable back-substitution is direct
        pivots = [(c, pr ^ r if pr >> col & 1 else pr) for c, pr in pivots]
        pivots.append((col, r))
    pivot_cols = {c for c, _ in pivots}
    basis = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        v = 1 << free
        for col, prow in pivots:
            if prow >> free & 1:
                v |= 1 << col
        basis.append(v)
    return basis


def solve(columns: Sequence[int], target: int) -> int | None:
    """Find a bit mask ``a`` with XOR of ``columns[i]`` over set bits equal to ``target``."""
    basis = XorBasis()
    for i, c in enumerate(columns):
        basis.add(c, 1 << i)
    return basis.decompose(target)


def matrix_to_rows(mat) -> list[int]:
    """Rows of a 0/1 matrix as integers, column ``j`` at bit ``j``."""
    mat = np.asarray(mat, dtype=np.uint8) & 1
    if mat.ndim != 2:
        raise ValueError("expected a 2-D 0/1 matrix")
    return [sum(int(b) << j for j, b in enumerate(row)) for row in mat]


def rows_to_matrix(rows: Sequence[int], ncols: int) -> np.ndarray:
    out = np.zeros((len(rows), ncols), dtype=np.uint8)
    for i, r in enumerate(rows):
        for j in range(ncols):
            out[i, j] = r >> j & 1
    return out


def span(rows: Sequence[int]) -> list[int]:
    """Every element of the row space (2**rank of them)."""
    basis = [rows[i] for i in independent_rows(rows)]
    out = [0]
    for b in basis:
        out += [v ^ b for v in out]
    return out


def rref(rows: Sequence[int]) -> list[tuple[int, int]]:
    """Reduced row echelon form as ``(pivot_column, row)`` pairs.

    The pivot is the lowest set bit of each row, and no other row has that
    bit set. Dependent rows are dropped.
    """
    out: list[tuple[int, int]] = []
    for r in rows:
        for p, row in out:
            if r >> p & 1:
                r ^= row
        if not r:
            continue
        p = (r & -r).bit_length() - 1
        out = [(q, row ^ r if row >> p & 1 else row) for q, row in out]
        out.append((p, r))
    return sorted(out)
