"""Spaces of homogeneous polynomial forms and their harmonic subspaces.

For ambient dimension ``n + 1`` the spaces are

* ``P(k, p)``: all p-forms with homogeneous degree-k coefficients,
* ``H(k, p)``: the members of P with ``Laplacian = 0`` and ``delta = 0``,
* ``H'(k, p)``: the closed members of H,
* ``H''(k, p)``: the members of H with no radial component (``i_Z = 0``).

Everything is computed as an exact rational kernel over the monomial basis.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Sequence

from . import exactlinalg
from .exterior import (
    PForm,
    codifferential,
    combine,
    componentwise_laplacian,
    exterior_d,
    interior_radial,
    monomial_forms,
    to_vector,
)

LABELS = ("P", "H", "Hprime", "Hdoubleprime")


@dataclass(frozen=True)
class FormSubspace:
    basis: tuple[PForm, ...]
    k: int
    p: int
    dim: int
    label: str

    @property
    def n(self) -> int:
        return self.dim - 1

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _check_range(n: int, k: int, p: int) -> None:
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if not 0 <= p <= n + 1:
        raise ValueError(f"p={p} out of range 0..{n + 1}")


def build_Pkp(n: int, k: int, p: int) -> FormSubspace:
    _check_range(n, k, p)
    return _build_P(n, k, p)


@lru_cache(maxsize=None)
def _build_P(n: int, k: int, p: int) -> FormSubspace:
    return FormSubspace(tuple(monomial_forms(n + 1, k, p)), k, p, n + 1, "P")


def kernel_within(
    basis: Sequence[PForm],
    maps: Sequence[Callable[[PForm], PForm]],
    degree: int,
    dim: int,
) -> list[PForm]:
    """Basis of ``{v in span(basis): f(v) = 0 for every f in maps}``."""
    if not basis:
        return []
    columns = []
    for b in basis:
        col = {}
        for m, f in enumerate(maps):
            for key, v in to_vector(f(b)).items():
                col[(m, key)] = v
        columns.append(col)
    kernel = exactlinalg.nullspace(columns, len(basis))
    return [combine(basis, v, degree, dim) for v in kernel]


def _laplacian_or_zero(a: PForm) -> PForm:
    return componentwise_laplacian(a)


def _delta_or_zero(a: PForm) -> PForm:
    return codifferential(a) if a.degree > 0 else PForm.zero(0, a.dim)


def _d_or_zero(a: PForm) -> PForm:
    return exterior_d(a) if a.degree < a.dim else PForm.zero(a.degree, a.dim)


def _iz_or_zero(a: PForm) -> PForm:
    return interior_radial(a) if a.degree > 0 else PForm.zero(0, a.dim)


def build_Hkp(n: int, k: int, p: int) -> FormSubspace:
    _check_range(n, k, p)
    return _build_H(n, k, p)


@lru_cache(maxsize=None)
def _build_H(n: int, k: int, p: int) -> FormSubspace:
    P = _build_P(n, k, p)
    basis = kernel_within(P.basis, [_laplacian_or_zero, _delta_or_zero], p, n + 1)
    return FormSubspace(tuple(basis), k, p, n + 1, "H")


def split_H(space: FormSubspace) -> tuple[FormSubspace, FormSubspace]:
    """Closed part and radially horizontal part of an H space."""
    if space.label != "H":
        raise ValueError(f"split_H needs an H space, got label {space.label!r}")
    return _split(space.dim - 1, space.k, space.p)


@lru_cache(maxsize=None)
def _split(n: int, k: int, p: int) -> tuple[FormSubspace, FormSubspace]:
    H = _build_H(n, k, p)
    closed = kernel_within(H.basis, [_d_or_zero], p, n + 1)
    horizontal = kernel_within(H.basis, [_iz_or_zero], p, n + 1)
    return (
        FormSubspace(tuple(closed), k, p, n + 1, "Hprime"),
        FormSubspace(tuple(horizontal), k, p, n + 1, "Hdoubleprime"),
    )


def build_Hprime(n: int, k: int, p: int) -> FormSubspace:
    _check_range(n, k, p)
    return _split(n, k, p)[0]


def build_Hdoubleprime(n: int, k: int, p: int) -> FormSubspace:
    _check_range(n, k, p)
    return _split(n, k, p)[1]


def multiplicity(n: int, k: int, p: int) -> int:
    """``dim H''(k, p)``, the common multiplicity of the sphere and ball eigenvalues."""
    return len(build_Hdoubleprime(n, k, p))


def check_d_isomorphism(n: int, k: int, p: int) -> bool:
    """Whether ``d`` maps ``H''(k, p)`` bijectively onto ``H'(k-1, p+1)``."""
    if k < 1:
        raise ValueError("d-isomorphism needs k >= 1")
    if p + 1 > n + 1:
        return multiplicity(n, k, p) == 0
    source = build_Hdoubleprime(n, k, p)
    target = build_Hprime(n, k - 1, p + 1)
    images = [exterior_d(w) for w in source.basis]
    for img in images:
        if not is_member(img, "Hprime"):
            return False
    if exactlinalg.rank([to_vector(w) for w in images]) != len(source):
        return False
    return len(target) == len(source)


def is_member(w: PForm, label: str) -> bool:
    """Defining conditions of the labelled space (degree homogeneity not checked)."""
    if label == "P":
        return True
    if componentwise_laplacian(w) or _delta_or_zero(w):
        return False
    if label == "Hprime":
        return not _d_or_zero(w)
    if label == "Hdoubleprime":
        return not _iz_or_zero(w)
    return label == "H"


def dim_P(n: int, k: int, p: int) -> int:
    return comb(n + k, k) * comb(n + 1, p)


def classical_harmonic_dim(n: int, k: int) -> int:
    """Dimension of degree-k harmonic polynomials on R^(n+1)."""
    return comb(n + k, k) - (comb(n + k - 2, k - 2) if k >= 2 else 0)


@dataclass(frozen=True)
class DimensionRow:
    n: int
    k: int
    p: int
    dimP: int
    dimH: int
    dimHprime: int
    dimHdoubleprime: int

    def as_dict(self) -> dict:
        return {
            "n": self.n, "k": self.k, "p": self.p, "dimP": self.dimP, "dimH": self.dimH,
            "dimH'": self.dimHprime, "dimH''": self.dimHdoubleprime,
        }


def dimension_table(n: int, k_max: int) -> list[DimensionRow]:
    rows = []
    for k in range(k_max + 1):
        for p in range(n + 2):
            hp, hpp = _split(n, k, p)
            rows.append(DimensionRow(n, k, p, dim_P(n, k, p), len(_build_H(n, k, p)), len(hp), len(hpp)))
    return rows


def dimension_table_json(n: int, k_max: int) -> str:
    return json.dumps([r.as_dict() for r in dimension_table(n, k_max)], indent=2)


def coordinates_in(w: PForm, space: FormSubspace) -> list[Fraction] | None:
    """Exact coordinates of ``w`` in the basis of ``space``, or None if outside."""
    cols = [to_vector(b) for b in space.basis] + [to_vector(w)]
    null = exactlinalg.nullspace(cols, len(cols))
    for v in null:
        if v[-1]:
            return [-c / v[-1] for c in v[:-1]]
    return None
