from fractions import Fraction

import sympy
from hypothesis import given, strategies as st

from dtnforms import exactlinalg

entries = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def matrices(max_rows=5, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(
                st.lists(st.one_of(st.just(Fraction(0)), entries), min_size=c, max_size=c),
                min_size=r, max_size=r,
            )
        )
    )


@given(matrices())
def test_rank_and_nullspace_match_sympy(m):
    ncols = len(m[0])
    cols = exactlinalg.dense_columns(m)
    sm = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in m])
    assert exactlinalg.rank(cols) == sm.rank()
    null = exactlinalg.nullspace(cols, ncols)
    assert len(null) == ncols - sm.rank()
    for v in null:
        for row in m:
            assert sum(a * b for a, b in zip(row, v)) == 0
    if null:
        assert exactlinalg.rank_dense([list(v) for v in null]) == len(null)


def test_nullspace_is_deterministic():
    m = [[1, 2, 3], [2, 4, 6]]
    a = exactlinalg.nullspace(exactlinalg.dense_columns(m), 3)
    b = exactlinalg.nullspace(exactlinalg.dense_columns(m), 3)
    assert a == b == [[-2, 1, 0], [-3, 0, 1]]


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(entries, min_size=n, max_size=n), min_size=1, max_size=4)))
def test_gram_matrices_are_psd(rows):
    n = len(rows[0])
    G = [[sum(r[i] * r[j] for r in rows) for j in range(n)] for i in range(n)]
    assert exactlinalg.is_psd(G)


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_psd_matches_sympy_eigenvalues(m):
    n = len(m)
    S = [[m[i][j] + m[j][i] for j in range(n)] for i in range(n)]
    sm = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in S])
    # exact criterion: all principal minors non-negative
    from itertools import combinations
    expected = all(sm.extract(list(c), list(c)).det() >= 0 for k in range(1, n + 1) for c in combinations(range(n), k))
    assert exactlinalg.is_psd(S) == expected


def test_psd_examples():
    assert exactlinalg.is_psd([[1, 1], [1, 1]])
    assert not exactlinalg.is_psd([[0, 1], [1, 0]])
    assert not exactlinalg.is_psd([[1, 2], [2, 1]])
    assert exactlinalg.is_psd([[0, 0], [0, 0]])
