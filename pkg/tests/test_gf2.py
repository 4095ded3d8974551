from hypothesis import given
from hypothesis import strategies as st

from qecft import gf2

rows_st = st.lists(st.integers(0, 255), min_size=0, max_size=8)


@given(rows_st)
def test_nullspace_is_orthogonal_and_complete(rows):
    null = gf2.nullspace(rows, 8)
    for v in null:
        for r in rows:
            assert (v & r).bit_count() % 2 == 0
    assert len(null) == 8 - gf2.rank(rows)


@given(rows_st, st.integers(0, 255))
def test_solve_consistent_with_span(rows, target):
    sol = gf2.solve(rows, target)
    in_span = target in set(gf2.span(rows))
    assert (sol is not None) == in_span
    if sol is not None:
        acc = 0
        for i, r in enumerate(rows):
            if sol >> i & 1:
                acc ^= r
        assert acc == target


@given(rows_st)
def test_rref_spans_same_space_and_is_reduced(rows):
    red = gf2.rref(rows)
    assert sorted(gf2.span([r for _, r in red])) == sorted(gf2.span(rows))
    for p, r in red:
        assert r >> p & 1 and r & ((1 << p) - 1) == 0
        assert all(not (other >> p & 1) for q, other in red if q != p)


def test_dependency_tags():
    basis = gf2.XorBasis()
    assert basis.add(0b011, 1) is None
    assert basis.add(0b110, 2) is None
    assert basis.add(0b101, 4) == 0b111
