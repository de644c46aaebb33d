"""Dirichlet-to-Neumann spectrum of the unit ball in R^(n+1) on p-forms.

The eigenvalues come in two families: co-exact boundary forms with
eigenvalue ``k + p`` and exact boundary forms with eigenvalue
``(k+p-1)(n+2k+1)/(n+2k-1)``. Top degree ``p = n`` also carries the volume
form of the sphere (eigenvalue ``n + 1``); ``p = 0`` is the classical Steklov
spectrum ``0, 1, 2, ...``.

Eigenforms are certified in ambient polynomial coordinates. On the unit
sphere the radial field Z equals minus the inner normal, so the operator
acting on ``J*w`` is ``J*(i_Z d w_hat)`` where ``w_hat`` is the tangential
harmonic extension.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import exactlinalg
from .exterior import (
    PForm,
    exterior_d,
    hodge_laplacian,
    interior_radial,
    pullback_equal_on_sphere,
    radial_one_form,
    to_vector,
    vanishes_on_sphere,
    wedge,
)
from .harmonic import build_Hdoubleprime, check_d_isomorphism, is_member, multiplicity
from .polycore import Poly, reduce_mod_quadric, sphere_quadric

FAMILIES = ("function", "coexact", "exact", "volume")


class VerificationError(AssertionError):
    """An identity that must hold exactly did not."""


@dataclass(frozen=True)
class SpectrumEntry:
    family: str
    n: int
    k: int
    p: int
    eigenvalue: Fraction
    multiplicity: int
    sphere_hodge_eigenvalue: Fraction

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "function" and self.p != 0:
            raise ValueError("function family has p = 0")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")


@dataclass(frozen=True)
class SpectrumLevel:
    """One distinct eigenvalue with the entries that produce it."""

    eigenvalue: Fraction
    multiplicity: int
    entries: tuple[SpectrumEntry, ...]


@dataclass(frozen=True)
class VerifiedEigenpair:
    entry: SpectrumEntry
    boundary_eigenform: PForm
    extension: PForm
    proportionality: Fraction
    checks: dict = field(default_factory=dict, compare=False)

    @property
    def verified(self) -> bool:
        return all(self.checks.values())


# -- closed forms ---------------------------------------------------------------

def nu_function(k: int) -> Fraction:
    if k < 0:
        raise ValueError("k must be non-negative")
    return Fraction(k)


def nu_coexact(n: int, k: int, p: int) -> Fraction:
    valid = k >= 1 and (1 <= p <= n - 1 or (p == n and k == 1))
    if not valid:
        raise ValueError(f"(n, k, p) = ({n}, {k}, {p}) is outside the co-exact family")
    return Fraction(k + p)


def nu_exact(n: int, k: int, p: int) -> Fraction:
    if k < 1 or not 1 <= p <= n:
        raise ValueError(f"(n, k, p) = ({n}, {k}, {p}) is outside the exact family")
    return Fraction((k + p - 1) * (n + 2 * k + 1), n + 2 * k - 1)


def sphere_hodge_eigenvalue(n: int, k: int, p: int, family: str) -> Fraction:
    """Hodge Laplacian eigenvalue on S^n attached to the family and indices."""
    if family == "function":
        if p != 0 or k < 0:
            raise ValueError("function family needs p = 0, k >= 0")
        return Fraction(k * (n + k - 1))
    if family == "coexact":
        if k < 1 or not 1 <= p <= n - 1:
            raise ValueError(f"co-exact family needs k >= 1, 1 <= p <= n-1; got k={k}, p={p}")
        return Fraction((k + p) * (n + k - p - 1))
    if family == "exact":
        if k < 1 or not 1 <= p <= n:
            raise ValueError(f"exact family needs k >= 1, 1 <= p <= n; got k={k}, p={p}")
        return Fraction((k + p - 1) * (n + k - p))
    if family == "volume":
        if p != n or k != 1:
            raise ValueError("volume family is (k, p) = (1, n)")
        return Fraction(0)
    raise ValueError(f"unknown family {family!r}")


def first_eigenvalue(n: int, p: int) -> Fraction:
    """Smallest eigenvalue on p-forms; for p = 0 the smallest nonzero one."""
    if not 0 <= p <= n:
        raise ValueError(f"p must be in 0..{n}")
    if p == 0:
        return Fraction(1)
    if 2 * p <= n + 1:
        return Fraction((n + 3) * p, n + 1)
    return Fraction(p + 1)


# -- enumeration ----------------------------------------------------------------

def spectrum_entries(n: int, p: int, k_max: int) -> list[SpectrumEntry]:
    """Unmerged entries of both families with k <= k_max."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 <= p <= n:
        raise ValueError(f"p must be in 0..{n}")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    out: list[SpectrumEntry] = []
    if p == 0:
        for k in range(k_max + 1):
            out.append(SpectrumEntry("function", n, k, 0, nu_function(k), multiplicity(n, k, 0),
                                     sphere_hodge_eigenvalue(n, k, 0, "function")))
        return out
    if p == n:
        out.append(SpectrumEntry("volume", n, 1, n, nu_coexact(n, 1, n), 1, Fraction(0)))
    else:
        for k in range(1, k_max + 1):
            m = multiplicity(n, k, p)
            if m:
                out.append(SpectrumEntry("coexact", n, k, p, nu_coexact(n, k, p), m,
                                         sphere_hodge_eigenvalue(n, k, p, "coexact")))
    for k in range(1, k_max + 1):
        m = multiplicity(n, k, p - 1)
        if m:
            out.append(SpectrumEntry("exact", n, k, p, nu_exact(n, k, p), m,
                                     sphere_hodge_eigenvalue(n, k, p, "exact")))
    return out


def merge_entries(entries: Iterable[SpectrumEntry]) -> list[SpectrumLevel]:
    groups: dict[Fraction, list[SpectrumEntry]] = {}
    for e in entries:
        groups.setdefault(e.eigenvalue, []).append(e)
    return [
        SpectrumLevel(val, sum(e.multiplicity for e in grp), tuple(grp))
        for val, grp in sorted(groups.items())
    ]


def enumerate_spectrum(n: int, p: int, k_max: int) -> list[SpectrumLevel]:
    """Distinct eigenvalues in ascending order with summed multiplicities."""
    return merge_entries(spectrum_entries(n, p, k_max))


# -- eigenform certification ------------------------------------------------------

def _require(checks: dict, what: str) -> None:
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise VerificationError(f"{what}: failed checks {failed}")


def build_coexact_pair(n: int, k: int, p: int, xi: PForm) -> VerifiedEigenpair:
    """Certify ``J*xi`` as an eigenform with eigenvalue ``k + p`` for ``xi`` in H''(k, p).

    ``xi`` is its own tangential harmonic extension. For ``p = 0`` this is the
    function family and for ``(k, p) = (1, n)`` the volume family.
    """
    if xi.dim != n + 1 or xi.degree != p:
        raise ValueError("form has the wrong degree or dimension")
    member = xi.is_homogeneous(k) and is_member(xi, "Hdoubleprime") and bool(xi)
    if not member:
        raise ValueError("xi is not a nonzero element of H''(k, p)")
    if p == 0:
        family, value = "function", nu_function(k)
    elif p == n:
        if k != 1:
            raise ValueError("H''(k, n) is only nonzero for k = 1")
        family, value = "volume", nu_coexact(n, 1, n)
    else:
        family, value = "coexact", nu_coexact(n, k, p)
    mu = sphere_hodge_eigenvalue(n, k, p, family)
    entry = SpectrumEntry(family, n, k, p, value, multiplicity(n, k, p), mu)
    dxi = exterior_d(xi) if p < n + 1 else PForm.zero(p, n + 1)
    flux = interior_radial(dxi)
    checks = {
        "harmonic": not hodge_laplacian(xi),
        "tangential": p == 0 or not interior_radial(xi),
        "euler": flux == xi * (k + p),
        "eigen": pullback_equal_on_sphere(flux, xi * value),
    }
    _require(checks, f"co-exact pair (n={n}, k={k}, p={p})")
    return VerifiedEigenpair(entry, xi, xi, Fraction(1), checks)


def exact_extension_constants(n: int, k: int, p: int) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients ``(a, b, c)`` of ``a dphi + b r^2 dphi + c rho ^ phi``."""
    return (
        Fraction(n + k - p),
        Fraction(k + p - 1),
        Fraction(-(k + p - 1) * (n + 2 * k - 1)),
    )


def exact_extension_pieces(phi: PForm) -> tuple[PForm, PForm, PForm]:
    """``dphi``, ``r^2 dphi`` and ``rho ^ phi`` for a (p-1)-form ``phi``."""
    dim = phi.dim
    dphi = exterior_d(phi)
    r2 = Poly.r_squared(dim)
    rho_phi = wedge(radial_one_form(dim), phi)
    return dphi, dphi * r2, rho_phi


def solve_extension_constants(phi: PForm) -> list[list[Fraction]]:
    """Kernel of ``(a, b, c) -> (Laplacian, i_Z mod r^2 - 1)`` of the combination.

    Independent of :func:`exact_extension_constants`: the coefficients are
    obtained from the two linear conditions the extension must satisfy.
    """
    pieces = exact_extension_pieces(phi)
    g = sphere_quadric(phi.dim)
    columns = []
    for w in pieces:
        col = {}
        for key, v in to_vector(hodge_laplacian(w)).items():
            col[("lap", key)] = v
        iz = interior_radial(w)
        for idx, c in iz.components.items():
            for alpha, v in reduce_mod_quadric(c, g).terms.items():
                col[("iz", idx, alpha)] = v
        columns.append(col)
    return exactlinalg.nullspace(columns, 3)


def build_exact_pair(n: int, k: int, p: int, phi: PForm) -> VerifiedEigenpair:
    """Certify ``J*dphi`` as an eigenform with the exact-family eigenvalue.

    ``phi`` must lie in H''(k, p-1).
    """
    if k < 1 or not 1 <= p <= n:
        raise ValueError(f"(k, p) = ({k}, {p}) outside the exact family")
    if phi.dim != n + 1 or phi.degree != p - 1:
        raise ValueError("phi has the wrong degree or dimension")
    if not (phi and phi.is_homogeneous(k) and is_member(phi, "Hdoubleprime")):
        raise ValueError("phi is not a nonzero element of H''(k, p-1)")
    a, b, c = exact_extension_constants(n, k, p)
    dphi, r2dphi, rho_phi = exact_extension_pieces(phi)
    ext = dphi * a + r2dphi * b + rho_phi * c
    value = nu_exact(n, k, p)
    scale = a + b
    flux = interior_radial(exterior_d(ext))
    checks = {
        "harmonic": not hodge_laplacian(ext),
        "tangential": vanishes_on_sphere(interior_radial(ext)),
        "restriction": pullback_equal_on_sphere(ext, dphi * scale),
        "eigen": pullback_equal_on_sphere(flux, ext * value),
        "nonzero": not pullback_equal_on_sphere(dphi, PForm.zero(p, n + 1)),
    }
    _require(checks, f"exact pair (n={n}, k={k}, p={p})")
    entry = SpectrumEntry("exact", n, k, p, value, multiplicity(n, k, p - 1),
                          sphere_hodge_eigenvalue(n, k, p, "exact"))
    return VerifiedEigenpair(entry, dphi, ext, scale, checks)


def verify_degree(n: int, p: int, k_max: int) -> list[VerifiedEigenpair]:
    """Certify every basis eigenform of degree p with k <= k_max.

    Raises :class:`VerificationError` on the first failed identity.
    """
    pairs: list[VerifiedEigenpair] = []
    if p == 0:
        ks = range(0, k_max + 1)
    elif p == n:
        ks = [1]
    else:
        ks = range(1, k_max + 1)
    for k in ks:
        for xi in build_Hdoubleprime(n, k, p).basis:
            pairs.append(build_coexact_pair(n, k, p, xi))
    if p >= 1:
        for k in range(1, k_max + 1):
            if not check_d_isomorphism(n, k, p - 1):
                raise VerificationError(f"d is not an isomorphism on H''({k}, {p - 1}), n={n}")
            for phi in build_Hdoubleprime(n, k, p - 1).basis:
                pairs.append(build_exact_pair(n, k, p, phi))
    return pairs


# -- profile identities ---------------------------------------------------------

def _r() -> Poly:
    return Poly.var(0, 1)


def harm2_residuals(n: int, k: int, p: int, P: Poly, Q: Poly) -> tuple[Poly, Poly]:
    """Both equations of the exact-family radial system, moved to one side.

    With ``mu`` the sphere eigenvalue of the primitive ``phi``:

    * ``mu (r P - 2 Q) - r^3 (P' + c P / r)'`` with ``c = n - 2p + 2``,
    * ``mu Q - 2 r P - r^2 Q'' - (n - 2p) r Q'``.
    """
    mu = Fraction((k + p - 1) * (n + k - p))
    r = _r()
    c = n - 2 * p + 2
    dP, ddP = P.diff(0), P.diff(0).diff(0)
    dQ, ddQ = Q.diff(0), Q.diff(0).diff(0)
    # r^3 (P' + c P / r)' = r^3 P'' + c r^2 P' - c r P
    lhs1 = (r * P - Q * 2) * mu
    rhs1 = r**3 * ddP + r**2 * dP * c - r * P * c
    lhs2 = Q * mu - r * P * 2
    rhs2 = r**2 * ddQ + r * dQ * (n - 2 * p)
    return lhs1 - rhs1, lhs2 - rhs2


def harm2_profiles(n: int, k: int, p: int, shift: int = 0) -> tuple[Poly, Poly]:
    """``P = -nu'' r^(k+p+shift)`` and ``Q = alpha r^(k+p+1)``."""
    nu = Fraction(k + p - 1)
    alpha = Fraction(k + p - 1, n + k - p)
    P = Poly.monomial((k + p + shift,), -nu)
    Q = Poly.monomial((k + p + 1,), alpha)
    return P, Q


def verify_harm2_profiles(n: int, k: int, p: int, shift: int = 0) -> bool:
    """Whether the closed-form profiles solve the radial system identically.

    ``shift`` perturbs the exponent of P; any nonzero shift must fail.
    """
    if k < 1 or not 1 <= p <= n:
        raise ValueError(f"(k, p) = ({k}, {p}) outside the exact family")
    P, Q = harm2_profiles(n, k, p, shift)
    e1, e2 = harm2_residuals(n, k, p, P, Q)
    return e1.is_zero() and e2.is_zero()


def profile_eigenvalue(n: int, k: int, p: int) -> Fraction:
    """``(nu'' + alpha (k+p+1)) / (alpha + 1)`` from the profile construction."""
    nu = Fraction(k + p - 1)
    alpha = Fraction(k + p - 1, n + k - p)
    return (nu + alpha * (k + p + 1)) / (alpha + 1)


def duality_first_eigenvalues(n: int) -> list[tuple[int, Fraction, Fraction]]:
    """``(p, nu_1(p), nu_1^D(p) = nu_1(n - p))`` for 1 <= p <= n - 1."""
    return [(p, first_eigenvalue(n, p), first_eigenvalue(n, n - p)) for p in range(1, n)]


def boundary_basis(n: int, p: int, k: int, family: str) -> Sequence[PForm]:
    """Ambient representatives of the boundary eigenforms for one entry."""
    if family in ("coexact", "volume", "function"):
        return build_Hdoubleprime(n, k, p).basis
    if family == "exact":
        return [exterior_d(phi) for phi in build_Hdoubleprime(n, k, p - 1).basis]
    raise ValueError(f"unknown family {family!r}")


__all__ = [
    "SpectrumEntry", "SpectrumLevel", "VerifiedEigenpair", "VerificationError",
    "nu_function", "nu_coexact", "nu_exact", "sphere_hodge_eigenvalue", "first_eigenvalue",
    "spectrum_entries", "merge_entries", "enumerate_spectrum",
    "build_coexact_pair", "build_exact_pair", "exact_extension_constants",
    "solve_extension_constants", "verify_degree", "verify_harm2_profiles",
    "harm2_residuals", "harm2_profiles", "profile_eigenvalue", "duality_first_eigenvalues",
]
