"""Exact sparse multivariate polynomials over the rationals.

Polynomials live in ``Q[x1, ..., xm]`` where ``m`` is the ambient dimension.
Coefficients are :class:`fractions.Fraction`, so every identity checked with
these objects is exact.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

Rational = Fraction
MultiIndex = tuple[int, ...]
Scalar = Union[int, Fraction]


def grlex_key(alpha: MultiIndex) -> tuple:
    """Sort key for graded-lexicographic order (total degree first)."""
    return (sum(alpha), alpha)


class Poly:
    """Immutable sparse polynomial ``{exponent tuple: Fraction}``.

    Zero coefficients are never stored, so the zero polynomial has no terms.
    """

    __slots__ = ("_terms", "_dim", "_hash")

    def __init__(self, terms: Mapping[MultiIndex, Scalar] | None, dim: int):
        if dim < 1:
            raise ValueError(f"ambient dimension must be positive, got {dim}")
        clean: dict[MultiIndex, Fraction] = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != dim:
                raise ValueError(f"exponent {alpha} has length {len(alpha)}, expected {dim}")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent in {alpha}")
            c = Fraction(c)
            if c:
                clean[alpha] = clean.get(alpha, Fraction(0)) + c
                if not clean[alpha]:
                    del clean[alpha]
        self._terms = clean
        self._dim = dim
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[MultiIndex, Fraction], dim: int) -> "Poly":
        # trusted constructor: caller guarantees normalized terms
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._dim = dim
        obj._hash = None
        return obj

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "Poly":
        return cls._raw({}, dim)

    @classmethod
    def const(cls, c: Scalar, dim: int) -> "Poly":
        c = Fraction(c)
        return cls._raw({(0,) * dim: c} if c else {}, dim)

    @classmethod
    def var(cls, i: int, dim: int) -> "Poly":
        """The coordinate function ``x_{i+1}`` (``i`` is 0-based)."""
        if not 0 <= i < dim:
            raise IndexError(f"variable index {i} out of range for dimension {dim}")
        alpha = [0] * dim
        alpha[i] = 1
        return cls._raw({tuple(alpha): Fraction(1)}, dim)

    @classmethod
    def monomial(cls, alpha: Iterable[int], coeff: Scalar = 1) -> "Poly":
        alpha = tuple(alpha)
        return cls({alpha: coeff}, len(alpha))

    @classmethod
    def r_squared(cls, dim: int) -> "Poly":
        """``x1^2 + ... + xm^2``."""
        terms = {}
        for i in range(dim):
            alpha = [0] * dim
            alpha[i] = 2
            terms[tuple(alpha)] = Fraction(1)
        return cls._raw(terms, dim)

    # -- accessors ------------------------------------------------------
    @property
    def dim(self) -> int:
        return self._dim

    @property
    def terms(self) -> dict[MultiIndex, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[MultiIndex, Fraction]]:
        """Terms in graded-lex order, highest first."""
        for alpha in sorted(self._terms, key=grlex_key, reverse=True):
            yield alpha, self._terms[alpha]

    def coeff(self, alpha: MultiIndex) -> Fraction:
        return self._terms.get(tuple(alpha), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(a) for a in self._terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(a) for a in self._terms), default=-1)

    def is_homogeneous(self, k: int | None = None) -> bool:
        degs = {sum(a) for a in self._terms}
        if not degs:
            return True
        if len(degs) > 1:
            return False
        return k is None or degs == {k}

    def degree_in(self, i: int) -> int:
        return max((a[i] for a in self._terms), default=-1)

    # -- arithmetic -----------------------------------------------------
    def _check(self, other: "Poly") -> None:
        if self._dim != other._dim:
            raise ValueError(f"dimension mismatch: {self._dim} vs {other._dim}")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other, self._dim)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for alpha, c in other._terms.items():
            s = out.get(alpha, 0) + c
            if s:
                out[alpha] = s
            else:
                out.pop(alpha, None)
        return Poly._raw(out, self._dim)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({a: -c for a, c in self._terms.items()}, self._dim)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly.zero(self._dim)
            other = Fraction(other)
            return Poly._raw({a: c * other for a, c in self._terms.items()}, self._dim)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        out: dict[MultiIndex, Fraction] = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                g = tuple(x + y for x, y in zip(a, b))
                out[g] = out.get(g, 0) + ca * cb
        return Poly._raw({g: c for g, c in out.items() if c}, self._dim)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative power")
        out = Poly.const(1, self._dim)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other, self._dim)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._dim == other._dim and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._dim, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and evaluation -----------------------------------------
    def diff(self, i: int) -> "Poly":
        """Partial derivative with respect to ``x_{i+1}``."""
        out = {}
        for a, c in self._terms.items():
            if a[i]:
                b = a[:i] + (a[i] - 1,) + a[i + 1:]
                out[b] = c * a[i]
        return Poly._raw(out, self._dim)

    def laplacian(self) -> "Poly":
        """Analyst's Laplacian ``sum_i d^2/dx_i^2`` (no sign flip)."""
        out = Poly.zero(self._dim)
        for i in range(self._dim):
            out = out + self.diff(i).diff(i)
        return out

    def mul_monomial(self, beta: MultiIndex, c: Scalar = 1) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly.zero(self._dim)
        return Poly._raw(
            {tuple(x + y for x, y in zip(a, beta)): v * c for a, v in self._terms.items()},
            self._dim,
        )

    def __call__(self, point):
        """Evaluate at a point; exact for rational input."""
        if len(point) != self._dim:
            raise ValueError("point has wrong dimension")
        total = 0
        for a, c in self._terms.items():
            t = c
            for x, e in zip(point, a):
                if e:
                    t = t * x**e
            total = total + t
        return total

    def homogeneous_component(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("degree must be non-negative")
        return Poly._raw({a: c for a, c in self._terms.items() if sum(a) == k}, self._dim)

    def homogeneous_components(self) -> dict[int, "Poly"]:
        out: dict[int, dict] = {}
        for a, c in self._terms.items():
            out.setdefault(sum(a), {})[a] = c
        return {k: Poly._raw(v, self._dim) for k, v in sorted(out.items())}

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r}, dim={self._dim})"

    def __str__(self) -> str:
        return format_poly(self)


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    """Ring operation by name (``add``, ``sub`` or ``mul``)."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def homogeneous_component(a: Poly, k: int) -> Poly:
    return a.homogeneous_component(k)


# -- quadric reduction ---------------------------------------------------

def _split_by_pivot(a: Poly, pivot: int) -> dict[int, Poly]:
    """Write ``a = sum_e c_e * x_pivot^e`` with ``c_e`` free of the pivot."""
    parts: dict[int, dict] = {}
    for alpha, c in a._terms.items():
        e = alpha[pivot]
        beta = alpha[:pivot] + (0,) + alpha[pivot + 1:]
        parts.setdefault(e, {})[beta] = c
    return {e: Poly._raw(t, a.dim) for e, t in parts.items()}


def reduce_mod_quadric(a: Poly, g: Poly, pivot: int | None = None) -> Poly:
    """Remainder of ``a`` on division by ``g`` as polynomials in one variable.

    ``g`` must be monic of degree 2 in ``x_pivot`` (0-based index). The result
    has pivot-degree at most 1 and differs from ``a`` by a multiple of ``g``.
    Default pivot is the last variable.
    """
    if a.dim != g.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {g.dim}")
    if pivot is None:
        pivot = g.dim - 1
    gparts = _split_by_pivot(g, pivot)
    if max(gparts, default=-1) != 2 or gparts[2] != Poly.const(1, g.dim):
        raise ValueError("g must be monic quadratic in the pivot variable")
    # x_p^2 == -(g1 * x_p + g0) mod g
    g1 = gparts.get(1, Poly.zero(g.dim))
    g0 = gparts.get(0, Poly.zero(g.dim))
    xp = Poly.var(pivot, g.dim)
    rule = -(g1 * xp + g0)
    parts = _split_by_pivot(a, pivot)
    if not parts:
        return Poly.zero(a.dim)
    # Horner in the pivot variable, reducing after each step
    top = max(parts)
    lo = Poly.zero(a.dim)  # coefficient of x_p^0
    hi = Poly.zero(a.dim)  # coefficient of x_p^1
    for e in range(top, -1, -1):
        # (hi*x + lo) * x = hi*x^2 + lo*x  ->  hi*rule + lo*x
        new = hi * rule + lo * xp
        nparts = _split_by_pivot(new, pivot)
        lo = nparts.get(0, Poly.zero(a.dim)) + parts.get(e, Poly.zero(a.dim))
        hi = nparts.get(1, Poly.zero(a.dim))
    return lo + hi * xp


def vanishes_on_quadric(a: Poly, g: Poly, pivot: int | None = None) -> bool:
    """True iff ``a`` lies in the ideal generated by ``g``.

    For ``g = r^2 - 1`` this is the same as ``a`` vanishing on the unit sphere,
    because ``r^2 - 1`` is irreducible and its real zero set is Zariski dense.
    """
    return reduce_mod_quadric(a, g, pivot).is_zero()


def sphere_quadric(dim: int) -> Poly:
    return Poly.r_squared(dim) - 1


def ellipsoid_quadric(semi_axes: Iterable[Scalar]) -> Poly:
    """``sum (a_m/a_i)^2 x_i^2 - a_m^2`` with ``a_m`` the last semi-axis.

    The scaling by ``a_m^2`` makes the quadric monic in the last variable.
    """
    axes = [Fraction(a) for a in semi_axes]
    if any(a <= 0 for a in axes):
        raise ValueError("semi-axes must be positive")
    dim = len(axes)
    last = axes[-1]
    terms = {}
    for i, a in enumerate(axes):
        alpha = [0] * dim
        alpha[i] = 2
        terms[tuple(alpha)] = (last / a) ** 2
    terms[(0,) * dim] = -last**2
    return Poly(terms, dim)


def rational_sphere_point(t: Iterable[Scalar]) -> tuple[Fraction, ...]:
    """Inverse stereographic projection of ``t`` in Q^m onto S^m in Q^(m+1).

    Projects from the north pole; rational input gives a rational point.
    """
    t = [Fraction(x) for x in t]
    s = sum(x * x for x in t)
    denom = s + 1
    return tuple(2 * x / denom for x in t) + ((s - 1) / denom,)


# -- text format -----------------------------------------------------------

def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(a: Poly) -> str:
    """Render as ``c*x1^a1*x2^a2 + ...`` in graded-lex order."""
    if a.is_zero():
        return "0"
    pieces = []
    for alpha, c in a.items():
        vars_ = [f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(alpha) if e]
        mag = abs(c)
        if vars_:
            body = "*".join(vars_)
            if mag != 1:
                body = f"{_format_coeff(mag)}*{body}"
        else:
            body = _format_coeff(mag)
        pieces.append(("-" if c < 0 else "+", body))
    sign, first = pieces[0]
    out = ("-" if sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


_TERM_SPLIT = re.compile(r"(?<=[^\s*/^(])\s*(?=[+-])")
_FACTOR = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def parse_poly(text: str, dim: int) -> Poly:
    """Parse the format produced by :func:`format_poly`.

    Factors inside a term are joined by ``*``; coefficients may be
    ``p/q`` rationals; variables are ``x1 .. x{dim}``.
    """
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1].strip()
    if not s:
        raise ValueError("empty polynomial")
    out = Poly.zero(dim)
    for raw in _TERM_SPLIT.split(s):
        term = raw.replace(" ", "")
        if not term:
            continue
        sign = 1
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        if not term:
            raise ValueError(f"dangling sign in {text!r}")
        coeff = Fraction(sign)
        alpha = [0] * dim
        for factor in term.split("*"):
            m = _FACTOR.match(factor)
            if m:
                i = int(m.group(1)) - 1
                if not 0 <= i < dim:
                    raise ValueError(f"variable x{i + 1} out of range for dimension {dim}")
                alpha[i] += int(m.group(2) or 1)
            else:
                if "." in factor or "e" in factor.lower():
                    raise ValueError(f"decimal coefficient {factor!r}; use p/q")
                try:
                    coeff *= Fraction(factor)
                except ValueError:
                    raise ValueError(f"bad factor {factor!r} in {text!r}") from None
        out = out + Poly({tuple(alpha): coeff}, dim)
    return out
