"""Sparse exact Gaussian elimination over Q.

Matrices are given column-wise as sparse dicts ``{row_key: Fraction}``; row
keys can be any sortable hashables (typically ``(index tuple, exponent)``
pairs). Pivot columns are chosen left to right, so the kernel basis returned
for a fixed input is always the same.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Mapping, Sequence


def _to_rows(columns: Sequence[Mapping[Hashable, Fraction]]) -> list[dict[int, Fraction]]:
    rows: dict[Hashable, dict[int, Fraction]] = {}
    for j, col in enumerate(columns):
        for key, v in col.items():
            if v:
                rows.setdefault(key, {})[j] = Fraction(v)
    return [rows[k] for k in sorted(rows, key=repr)]


def echelon(columns: Sequence[Mapping[Hashable, Fraction]]) -> dict[int, dict[int, Fraction]]:
    """Reduced row echelon form as ``{pivot column: normalized row}``.

    Every returned row has a 1 at its pivot column and zeros at all other
    pivot columns.
    """
    pivots: dict[int, dict[int, Fraction]] = {}
    for row in _to_rows(columns):
        row = dict(row)
        while True:
            hits = [c for c in row if c in pivots]
            if not hits:
                break
            c = min(hits)
            f = row[c]
            for cc, v in pivots[c].items():
                nv = row.get(cc, 0) - f * v
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
        if not row:
            continue
        p = min(row)
        inv = 1 / row[p]
        pivots[p] = {c: v * inv for c, v in row.items()}
    # back-substitute so each pivot row is clean in other pivot columns
    for p in sorted(pivots, reverse=True):
        prow = pivots[p]
        for q, qrow in pivots.items():
            if q != p and p in qrow:
                f = qrow[p]
                for c, v in prow.items():
                    nv = qrow.get(c, 0) - f * v
                    if nv:
                        qrow[c] = nv
                    else:
                        qrow.pop(c, None)
    return pivots


def rank(columns: Sequence[Mapping[Hashable, Fraction]]) -> int:
    return len(echelon(columns))


def nullspace(columns: Sequence[Mapping[Hashable, Fraction]], ncols: int | None = None) -> list[list[Fraction]]:
    """Exact kernel basis of the matrix with the given sparse columns.

    Returns dense coefficient vectors of length ``ncols``; one vector per free
    column, in increasing order of that column, with a 1 at the free column.
    """
    n = len(columns) if ncols is None else ncols
    piv = echelon(columns)
    basis = []
    for f in range(n):
        if f in piv:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for p, row in piv.items():
            if f in row:
                v[p] = -row[f]
        basis.append(v)
    return basis


def dense_columns(matrix: Sequence[Sequence]) -> list[dict[int, Fraction]]:
    """Convert a dense row-major matrix into sparse columns."""
    if not matrix:
        return []
    ncols = len(matrix[0])
    cols: list[dict[int, Fraction]] = [dict() for _ in range(ncols)]
    for i, row in enumerate(matrix):
        for j, v in enumerate(row):
            if v:
                cols[j][i] = Fraction(v)
    return cols


def is_psd(matrix: Sequence[Sequence[Fraction]]) -> bool:
    """Exact test that a symmetric rational matrix is positive semidefinite.

    Symmetric Gaussian elimination: a zero pivot is allowed only when its whole
    remaining row is zero, and every pivot must be non-negative.
    """
    m = [[Fraction(v) for v in row] for row in matrix]
    n = len(m)
    for i in range(n):
        for j in range(n):
            if m[i][j] != m[j][i]:
                raise ValueError("matrix is not symmetric")
    active = list(range(n))
    while active:
        i = active.pop(0)
        d = m[i][i]
        if d < 0:
            return False
        if d == 0:
            if any(m[i][j] for j in active):
                return False
            continue
        for j in active:
            if m[j][i]:
                f = m[j][i] / d
                for k in active:
                    if m[i][k]:
                        m[j][k] -= f * m[i][k]
    return True


def rank_dense(matrix: Sequence[Sequence]) -> int:
    return rank(dense_columns(matrix))
