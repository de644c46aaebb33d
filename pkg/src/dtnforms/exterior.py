"""Polynomial differential forms on flat R^m and their exterior calculus.

A p-form is stored as ``{(i_1 < ... < i_p): Poly}`` over the coordinate
coframe ``dx_1 .. dx_m``. Index tuples are 0-based internally and 1-based in
the text format (``(x1^2 - x2) * dx1^dx3``).

Sign conventions: the Hodge Laplacian is ``d delta + delta d`` with
``delta = -sum_j i_{e_j} d/dx_j``, so on functions it is ``-sum d^2/dx_j^2``
and is non-negative.
"""
from __future__ import annotations

import itertools
import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .polycore import Poly, Scalar, format_poly, grlex_key, parse_poly, sphere_quadric, vanishes_on_quadric

Index = tuple[int, ...]


def _sort_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (distinct entries)."""
    sign = 1
    s = list(seq)
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


class PForm:
    """Immutable polynomial p-form on R^dim."""

    __slots__ = ("_comps", "_deg", "_dim")

    def __init__(self, components: Mapping[Iterable[int], Poly] | None, degree: int, dim: int):
        if not 0 <= degree <= dim:
            raise ValueError(f"form degree {degree} out of range for dimension {dim}")
        comps: dict[Index, Poly] = {}
        for idx, poly in (components or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} does not have length {degree}")
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index {idx} is not strictly increasing")
            if idx and not (0 <= idx[0] and idx[-1] < dim):
                raise ValueError(f"index {idx} out of range")
            if not isinstance(poly, Poly):
                poly = Poly.const(poly, dim)
            if poly.dim != dim:
                raise ValueError("coefficient dimension mismatch")
            total = comps.get(idx, Poly.zero(dim)) + poly
            if total:
                comps[idx] = total
            else:
                comps.pop(idx, None)
        self._comps = comps
        self._deg = degree
        self._dim = dim

    @classmethod
    def _raw(cls, comps: dict[Index, Poly], degree: int, dim: int) -> "PForm":
        obj = cls.__new__(cls)
        obj._comps = {i: c for i, c in comps.items() if c}
        obj._deg = degree
        obj._dim = dim
        return obj

    @classmethod
    def zero(cls, degree: int, dim: int) -> "PForm":
        return cls._raw({}, degree, dim)

    @classmethod
    def function(cls, f: Poly) -> "PForm":
        return cls._raw({(): f}, 0, f.dim)

    @classmethod
    def basic(cls, idx: Iterable[int], dim: int, coeff: Poly | Scalar = 1) -> "PForm":
        """``coeff * dx_{i1} ^ ... ^ dx_{ip}`` for an arbitrary (unsorted) index list."""
        idx = tuple(idx)
        if len(set(idx)) < len(idx):
            return cls.zero(len(idx), dim)
        if not isinstance(coeff, Poly):
            coeff = Poly.const(coeff, dim)
        sign = _sort_sign(idx)
        return cls._raw({tuple(sorted(idx)): coeff * sign}, len(idx), dim)

    @classmethod
    def one_form(cls, coeffs: Sequence[Poly]) -> "PForm":
        dim = coeffs[0].dim
        return cls._raw({(i,): c for i, c in enumerate(coeffs)}, 1, dim)

    # -- accessors -------------------------------------------------------
    @property
    def degree(self) -> int:
        return self._deg

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def components(self) -> dict[Index, Poly]:
        return dict(self._comps)

    def component(self, idx: Iterable[int]) -> Poly:
        return self._comps.get(tuple(idx), Poly.zero(self._dim))

    def items(self) -> Iterator[tuple[Index, Poly]]:
        for idx in sorted(self._comps):
            yield idx, self._comps[idx]

    def is_zero(self) -> bool:
        return not self._comps

    def __bool__(self) -> bool:
        return bool(self._comps)

    def coefficient_degree(self) -> int:
        return max((c.degree() for c in self._comps.values()), default=-1)

    def is_homogeneous(self, k: int | None = None) -> bool:
        degs = set()
        for c in self._comps.values():
            if not c.is_homogeneous():
                return False
            degs.add(c.degree())
        if len(degs) > 1:
            return False
        return k is None or not degs or degs == {k}

    # -- linear structure --------------------------------------------------
    def _check(self, other: "PForm") -> None:
        if self._dim != other._dim or self._deg != other._deg:
            raise ValueError(
                f"form mismatch: degree {self._deg}/{other._deg}, dimension {self._dim}/{other._dim}"
            )

    def __add__(self, other: "PForm") -> "PForm":
        if not isinstance(other, PForm):
            return NotImplemented
        self._check(other)
        out = dict(self._comps)
        for idx, c in other._comps.items():
            out[idx] = out[idx] + c if idx in out else c
        return PForm._raw(out, self._deg, self._dim)

    def __neg__(self) -> "PForm":
        return PForm._raw({i: -c for i, c in self._comps.items()}, self._deg, self._dim)

    def __sub__(self, other: "PForm") -> "PForm":
        if not isinstance(other, PForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, f) -> "PForm":
        """Multiply every component by a scalar or a polynomial."""
        if isinstance(f, (int, Fraction, Poly)):
            return PForm._raw({i: c * f for i, c in self._comps.items()}, self._deg, self._dim)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PForm):
            return NotImplemented
        return self._deg == other._deg and self._dim == other._dim and self._comps == other._comps

    def __hash__(self) -> int:
        return hash((self._deg, self._dim, frozenset(self._comps.items())))

    def map_coefficients(self, fn) -> "PForm":
        return PForm._raw({i: fn(c) for i, c in self._comps.items()}, self._deg, self._dim)

    def __repr__(self) -> str:
        return f"PForm({format_form(self)!r}, degree={self._deg}, dim={self._dim})"

    def __str__(self) -> str:
        return format_form(self)


# -- algebra ------------------------------------------------------------------

def wedge(a: PForm, b: PForm) -> PForm:
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    deg = a.degree + b.degree
    if deg > a.dim:
        raise ValueError(f"wedge degree {deg} exceeds dimension {a.dim}")
    out: dict[Index, Poly] = {}
    for I, f in a._comps.items():
        sI = set(I)
        for J, g in b._comps.items():
            if sI.intersection(J):
                continue
            K = I + J
            sign = _sort_sign(K)
            key = tuple(sorted(K))
            term = f * g * sign
            out[key] = out[key] + term if key in out else term
    return PForm._raw(out, deg, a.dim)


def exterior_d(a: PForm) -> PForm:
    if a.degree >= a.dim:
        raise ValueError(f"d of a top-degree form on R^{a.dim}")
    out: dict[Index, Poly] = {}
    for I, f in a._comps.items():
        for j in range(a.dim):
            if j in I:
                continue
            df = f.diff(j)
            if not df:
                continue
            # dx_j ^ dx_I: move j into position
            pos = sum(1 for i in I if i < j)
            key = I[:pos] + (j,) + I[pos:]
            term = df if pos % 2 == 0 else -df
            out[key] = out[key] + term if key in out else term
    return PForm._raw(out, a.degree + 1, a.dim)


def interior_coordinate(a: PForm, j: int) -> PForm:
    """Contraction with the constant field ``d/dx_{j+1}``."""
    if a.degree == 0:
        raise ValueError("interior product of a 0-form")
    out: dict[Index, Poly] = {}
    for I, f in a._comps.items():
        if j in I:
            m = I.index(j)
            key = I[:m] + I[m + 1:]
            term = f if m % 2 == 0 else -f
            out[key] = out[key] + term if key in out else term
    return PForm._raw(out, a.degree - 1, a.dim)


def interior(a: PForm, field: Sequence[Poly]) -> PForm:
    """Contraction with the polynomial vector field ``sum_j field[j] d/dx_j``."""
    if len(field) != a.dim:
        raise ValueError("vector field has wrong dimension")
    if a.degree == 0:
        raise ValueError("interior product of a 0-form")
    out = PForm.zero(a.degree - 1, a.dim)
    for j, v in enumerate(field):
        if v:
            out = out + interior_coordinate(a, j) * v
    return out


def radial_field(dim: int) -> list[Poly]:
    """Z = sum_j x_j d/dx_j."""
    return [Poly.var(j, dim) for j in range(dim)]


def interior_radial(a: PForm) -> PForm:
    if a.degree == 0:
        raise ValueError("interior product of a 0-form")
    return interior(a, radial_field(a.dim))


def partial(a: PForm, j: int) -> PForm:
    return a.map_coefficients(lambda c: c.diff(j))


def codifferential(a: PForm) -> PForm:
    if a.degree == 0:
        raise ValueError("codifferential of a 0-form")
    out = PForm.zero(a.degree - 1, a.dim)
    for j in range(a.dim):
        out = out - interior_coordinate(partial(a, j), j)
    return out


def hodge_laplacian(a: PForm) -> PForm:
    """``d delta a + delta d a``, checked against the componentwise formula."""
    out = PForm.zero(a.degree, a.dim)
    if a.degree > 0:
        out = out + exterior_d(codifferential(a))
    if a.degree < a.dim:
        out = out + codifferential(exterior_d(a))
    flat = componentwise_laplacian(a)
    if out != flat:
        raise AssertionError("Hodge Laplacian disagrees with componentwise Laplacian")
    return out


def componentwise_laplacian(a: PForm) -> PForm:
    """``-sum_j d^2/dx_j^2`` applied to every component."""
    return a.map_coefficients(lambda c: -c.laplacian())


def complement_sign(I: Index, dim: int) -> tuple[Index, int]:
    J = tuple(j for j in range(dim) if j not in I)
    return J, _sort_sign(I + J)


def hodge_star(a: PForm) -> PForm:
    """Euclidean Hodge star: ``dx_I ^ *dx_I = vol``."""
    out: dict[Index, Poly] = {}
    for I, f in a._comps.items():
        J, s = complement_sign(I, a.dim)
        out[J] = f * s
    return PForm._raw(out, a.dim - a.degree, a.dim)


def radial_one_form(dim: int) -> PForm:
    """rho = sum x_i dx_i (the dual of Z)."""
    return PForm.one_form(radial_field(dim))


def volume_form(dim: int) -> PForm:
    return PForm.basic(range(dim), dim)


def radial_horizontal_projection(a: PForm) -> PForm:
    """``r^2 a - rho ^ i_Z a``; has no radial component and matches ``a`` on S^n tangents."""
    r2 = Poly.r_squared(a.dim)
    if a.degree == 0:
        return a * r2
    return a * r2 - wedge(radial_one_form(a.dim), interior_radial(a))


def pullback_equal_on_sphere(a: PForm, b: PForm) -> bool:
    """Decide ``J*a == J*b`` on the unit sphere exactly."""
    a._check(b)
    g = sphere_quadric(a.dim)
    diff = radial_horizontal_projection(a - b)
    return all(vanishes_on_quadric(c, g) for c in diff._comps.values())


def vanishes_on_sphere(a: PForm) -> bool:
    """Every ambient component of ``a`` vanishes on the unit sphere."""
    g = sphere_quadric(a.dim)
    return all(vanishes_on_quadric(c, g) for c in a._comps.values())


def pointwise_inner(a: PForm, b: PForm) -> Poly:
    a._check(b)
    out = Poly.zero(a.dim)
    for I, f in a._comps.items():
        g = b._comps.get(I)
        if g is not None:
            out = out + f * g
    return out


def evaluate(a: PForm, point: Sequence, vectors: Sequence[Sequence]) -> Fraction:
    """Value of ``a`` at ``point`` on the given tangent vectors (exact)."""
    if len(vectors) != a.degree:
        raise ValueError("need exactly `degree` vectors")
    total = Fraction(0)
    for I, f in a._comps.items():
        minor = [[v[i] for i in I] for v in vectors]
        total += f(point) * _det(minor)
    return total


def _det(m: list[list]) -> Fraction:
    n = len(m)
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        t = Fraction(_sort_sign(perm))
        for i, j in enumerate(perm):
            t *= m[i][j]
            if not t:
                break
        total += t
    return total


# -- monomial bases and coordinates ---------------------------------------------

def exponents(dim: int, k: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree ``k`` in graded-lex order."""
    if k < 0:
        return []
    out = []
    for bars in itertools.combinations(range(k + dim - 1), dim - 1):
        prev = -1
        alpha = []
        for b in bars:
            alpha.append(b - prev - 1)
            prev = b
        alpha.append(k + dim - 1 - prev - 1)
        out.append(tuple(alpha))
    return sorted(out, key=grlex_key, reverse=True)


def form_indices(dim: int, p: int) -> list[Index]:
    return list(itertools.combinations(range(dim), p))


def monomial_forms(dim: int, k: int, p: int) -> list[PForm]:
    """The monomial basis ``x^alpha dx_I`` of homogeneous degree-k p-forms."""
    out = []
    for alpha in exponents(dim, k):
        mono = Poly.monomial(alpha)
        for I in form_indices(dim, p):
            out.append(PForm._raw({I: mono}, p, dim))
    return out


def to_vector(a: PForm) -> dict[tuple[Index, tuple[int, ...]], Fraction]:
    """Sparse coordinates over the monomial-form basis."""
    out = {}
    for I, f in a._comps.items():
        for alpha, c in f._terms.items():
            out[(I, alpha)] = c
    return out


def combine(forms: Sequence[PForm], coeffs: Sequence[Scalar], degree: int, dim: int) -> PForm:
    out: dict[Index, Poly] = {}
    for form, c in zip(forms, coeffs):
        if not c:
            continue
        for I, f in form._comps.items():
            term = f * c
            out[I] = out[I] + term if I in out else term
    return PForm._raw(out, degree, dim)


# -- text format ------------------------------------------------------------------

def format_form(a: PForm) -> str:
    """Render as ``(poly) * dx1^dx3 + ...``; a 0-form prints as ``(poly)``."""
    if a.is_zero():
        return "0"
    parts = []
    for I, f in a.items():
        poly = f"({format_poly(f)})"
        if I:
            parts.append(poly + " * " + "^".join(f"dx{i + 1}" for i in I))
        else:
            parts.append(poly)
    return " + ".join(parts)


_FORM_TERM = re.compile(r"\(([^()]*)\)\s*(?:\*\s*((?:dx\d+)(?:\s*\^\s*dx\d+)*))?")


def parse_form(text: str, degree: int, dim: int) -> PForm:
    """Inverse of :func:`format_form`."""
    s = text.strip()
    if s == "0":
        return PForm.zero(degree, dim)
    out = PForm.zero(degree, dim)
    pos = 0
    first = True
    while pos < len(s):
        if not first:
            m = re.compile(r"\s*\+\s*").match(s, pos)
            if not m:
                raise ValueError(f"expected '+' at position {pos} in {text!r}")
            pos = m.end()
        m = _FORM_TERM.match(s, pos)
        if not m:
            raise ValueError(f"cannot parse form term at position {pos} in {text!r}")
        poly = parse_poly(m.group(1), dim)
        idx: list[int] = []
        if m.group(2):
            idx = [int(t.strip()[2:]) - 1 for t in m.group(2).split("^")]
        if len(idx) != degree:
            raise ValueError(f"term {m.group(0)!r} has degree {len(idx)}, expected {degree}")
        if any(not 0 <= i < dim for i in idx):
            raise ValueError(f"coframe index out of range in {m.group(0)!r}")
        out = out + PForm.basic(idx, dim, poly)
        pos = m.end()
        first = False
    return out
