"""Rayleigh-Ritz upper bounds for the first Dirichlet-to-Neumann eigenvalue.

The quotient minimized is

    (int_Omega |dw|^2 + |delta w|^2) / (int_boundary |w|^2)

over polynomial p-forms of degree <= D with no normal component on the
boundary. Domains are the unit ball (everything exact) and axis-aligned
ellipsoids (volume integrals exact, boundary integrals by quadrature).

Also here: exact monomial moments, the isoperimetric bound check, the
averaging identities for parallel forms, and div/curl quotients in R^3.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

import numpy as np
import scipy.linalg

from . import exactlinalg
from .ball import first_eigenvalue
from .exterior import (
    PForm,
    codifferential,
    combine,
    exponents,
    exterior_d,
    form_indices,
    hodge_star,
    interior,
    radial_horizontal_projection,
    to_vector,
)
from .polycore import Poly, ellipsoid_quadric, reduce_mod_quadric, sphere_quadric

RESIDUAL_TOL = 1e-9
EXACT_DIM_LIMIT = 60


# -- moments ----------------------------------------------------------------------

@dataclass(frozen=True)
class MomentValue:
    """``rational * pi^(pi_half_power / 2)``."""

    rational: Fraction
    pi_half_power: int

    def __add__(self, other: "MomentValue") -> "MomentValue":
        if not isinstance(other, MomentValue):
            return NotImplemented
        if not self.rational:
            return other
        if not other.rational:
            return self
        if self.pi_half_power != other.pi_half_power:
            raise ValueError("cannot add moments with different powers of pi")
        return MomentValue(self.rational + other.rational, self.pi_half_power)

    def scale(self, c) -> "MomentValue":
        return MomentValue(self.rational * Fraction(c), self.pi_half_power)

    def __truediv__(self, other: "MomentValue") -> Fraction:
        if self.rational and self.pi_half_power != other.pi_half_power:
            raise ValueError("ratio of moments with different powers of pi")
        return self.rational / other.rational

    def __float__(self) -> float:
        return float(self.rational) * math.pi ** (self.pi_half_power / 2)


def pi_power(dim: int) -> int:
    """Power of sqrt(pi) shared by all nonzero moments in R^dim."""
    return dim if dim % 2 == 0 else dim - 1


def _gamma_half(m2: int) -> tuple[Fraction, int]:
    """Gamma(m2 / 2) as ``(rational, sqrt-pi power)`` for a positive integer m2."""
    if m2 % 2 == 0:
        return Fraction(factorial(m2 // 2 - 1)), 0
    m = (m2 - 1) // 2  # Gamma(m + 1/2) = (2m)! / (4^m m!) sqrt(pi)
    return Fraction(factorial(2 * m), 4**m * factorial(m)), 1


@lru_cache(maxsize=None)
def sphere_monomial_moment(alpha: tuple[int, ...]) -> MomentValue:
    """Integral of ``x^alpha`` over the unit sphere in R^len(alpha)."""
    dim = len(alpha)
    s = pi_power(dim)
    if any(a % 2 for a in alpha):
        return MomentValue(Fraction(0), s)
    num = Fraction(2)
    for a in alpha:
        num *= _gamma_half(a + 1)[0]
    den, _ = _gamma_half(sum(alpha) + dim)
    return MomentValue(num / den, s)


def ball_monomial_moment(alpha: tuple[int, ...]) -> MomentValue:
    """Integral of ``x^alpha`` over the unit ball in R^len(alpha)."""
    m = sphere_monomial_moment(tuple(alpha))
    return MomentValue(m.rational / (sum(alpha) + len(alpha)), m.pi_half_power)


def integrate_sphere(f: Poly) -> MomentValue:
    out = MomentValue(Fraction(0), pi_power(f.dim))
    for alpha, c in f.terms.items():
        out = out + sphere_monomial_moment(alpha).scale(c)
    return out


def integrate_ball(f: Poly) -> MomentValue:
    out = MomentValue(Fraction(0), pi_power(f.dim))
    for alpha, c in f.terms.items():
        out = out + ball_monomial_moment(alpha).scale(c)
    return out


def sphere_area(dim: int) -> MomentValue:
    return sphere_monomial_moment((0,) * dim)


def ball_volume(dim: int) -> MomentValue:
    return ball_monomial_moment((0,) * dim)


# -- sphere quadrature --------------------------------------------------------------

def sphere_quadrature(dim: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Points on S^(dim-1) and weights in hyperspherical angles.

    Gauss-Legendre in the polar angles; the periodic azimuth uses the
    trapezoidal rule with 2m nodes, which is exact for its trigonometric
    polynomials.
    """
    x, w = np.polynomial.legendre.leggauss(m)
    angle_nodes = []
    for j in range(dim - 2):
        angle_nodes.append((np.pi / 2 * (x + 1), np.pi / 2 * w))
    az = np.arange(2 * m) * (np.pi / m)
    angle_nodes.append((az, np.full(2 * m, np.pi / m)))
    grids = np.meshgrid(*[a for a, _ in angle_nodes], indexing="ij")
    wgrids = np.meshgrid(*[b for _, b in angle_nodes], indexing="ij")
    angles = [g.ravel() for g in grids]
    weights = np.prod([g.ravel() for g in wgrids], axis=0)
    pts = np.zeros((angles[0].size, dim))
    prod_sin = np.ones(angles[0].size)
    for j, phi in enumerate(angles[:-1]):
        pts[:, j] = prod_sin * np.cos(phi)
        weights = weights * np.sin(phi) ** (dim - 2 - j)
        prod_sin = prod_sin * np.sin(phi)
    pts[:, dim - 2] = prod_sin * np.cos(angles[-1])
    pts[:, dim - 1] = prod_sin * np.sin(angles[-1])
    return pts, weights


def ellipsoid_surface_rule(semi_axes: Sequence[Fraction], m: int) -> tuple[np.ndarray, np.ndarray]:
    """Points on the ellipsoid and surface-measure weights."""
    a = np.array([float(v) for v in semi_axes])
    u, w = sphere_quadrature(len(a), m)
    jac = np.prod(a) * np.sqrt(np.sum((u / a) ** 2, axis=1))
    return u * a, w * jac


def ellipsoid_area(semi_axes: Sequence[Fraction], tol: float = 1e-10) -> float:
    prev = None
    for m in _refinement_levels():
        _, w = ellipsoid_surface_rule(semi_axes, m)
        val = float(np.sum(w))
        if prev is not None and abs(val - prev) <= tol * abs(val):
            return val
        prev = val
    raise RuntimeError("surface area quadrature did not converge")


def ellipsoid_volume(semi_axes: Sequence[Fraction]) -> float:
    return float(ball_volume(len(semi_axes))) * float(np.prod([float(a) for a in semi_axes]))


def _refinement_levels():
    m = 12
    while m <= 256:
        yield m
        m = int(m * 1.5)


# -- problem setup -------------------------------------------------------------------

@dataclass(frozen=True)
class GalerkinProblem:
    n: int
    p: int
    D: int
    domain: str = "ball"
    semi_axes: tuple[Fraction, ...] | None = None
    constraint: str = "tangential"

    def __post_init__(self):
        if self.D < 1:
            raise ValueError("max degree D must be at least 1")
        if not 0 <= self.p <= self.n:
            raise ValueError(f"p must be in 0..{self.n}")
        if self.domain == "ellipsoid":
            if self.semi_axes is None or len(self.semi_axes) != self.n + 1:
                raise ValueError("ellipsoid needs n+1 semi-axes")
            if any(Fraction(a) <= 0 for a in self.semi_axes):
                raise ValueError("semi-axes must be positive")
            object.__setattr__(self, "semi_axes", tuple(Fraction(a) for a in self.semi_axes))
        elif self.domain != "ball":
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.constraint not in ("tangential", "none"):
            raise ValueError(f"unknown constraint {self.constraint!r}")

    @property
    def dim(self) -> int:
        return self.n + 1

    def quadric(self) -> Poly:
        if self.domain == "ball":
            return sphere_quadric(self.dim)
        return ellipsoid_quadric(self.semi_axes)

    def normal_field(self) -> list[Poly]:
        """A polynomial field proportional to the normal on the boundary."""
        if self.domain == "ball":
            return [Poly.var(i, self.dim) for i in range(self.dim)]
        last = self.semi_axes[-1]
        return [Poly.var(i, self.dim) * (last / a) ** 2 for i, a in enumerate(self.semi_axes)]

    def volume_moment(self, alpha: tuple[int, ...]) -> MomentValue:
        m = ball_monomial_moment(alpha)
        if self.domain == "ball":
            return m
        scale = Fraction(1)
        for a, e in zip(self.semi_axes, alpha):
            scale *= a ** (e + 1)
        return m.scale(scale)


@dataclass
class Assembly:
    problem: GalerkinProblem
    basis: list[PForm]
    A: list[list[Fraction]] | np.ndarray
    B: list[list[Fraction]] | np.ndarray | None
    boundary_null: list[list[Fraction]]
    exact: bool
    pi_stripped: int = 0


@dataclass
class EigResult:
    value: float
    residual: float
    trial_dimension: int
    certificate: str
    exact_value: Fraction | None = None
    details: dict = field(default_factory=dict)


def _raw_forms(dim: int, p: int, D: int) -> list[PForm]:
    out = []
    for k in range(D + 1):
        for alpha in exponents(dim, k):
            mono = Poly.monomial(alpha)
            for I in form_indices(dim, p):
                out.append(PForm({I: mono}, p, dim))
    return out


def _reduced_vector(w: PForm, g: Poly) -> dict:
    out = {}
    for idx, c in w.components.items():
        for alpha, v in reduce_mod_quadric(c, g).terms.items():
            out[(idx, alpha)] = v
    return out


def trial_basis(gp: GalerkinProblem) -> list[PForm]:
    """Forms of degree <= D meeting the boundary constraint exactly."""
    raw = _raw_forms(gp.dim, gp.p, gp.D)
    if gp.p == 0:
        if gp.domain == "ball":
            # mean zero on the sphere
            cols = [{0: integrate_sphere(w.component(())).rational} for w in raw]
            null = exactlinalg.nullspace(cols, len(raw))
            return [combine(raw, v, 0, gp.dim) for v in null]
        return [w for w in raw if w.coefficient_degree() > 0] + [raw[0]]
    if gp.constraint == "none":
        return raw
    g = gp.quadric()
    field_ = gp.normal_field()
    cols = [_reduced_vector(interior(w, field_), g) for w in raw]
    null = exactlinalg.nullspace(cols, len(raw))
    return [combine(raw, v, gp.p, gp.dim) for v in null]


def boundary_null_space(basis: Sequence[PForm], g: Poly) -> list[list[Fraction]]:
    """Coordinates of the trial forms whose every component vanishes on the boundary."""
    cols = [_reduced_vector(w, g) for w in basis]
    return exactlinalg.nullspace(cols, len(basis))


def _vectors(forms: Sequence[PForm]) -> tuple[list[dict], list]:
    vecs = [to_vector(w) for w in forms]
    keys = sorted({k for v in vecs for k in v})
    return vecs, keys


def _gram(forms: Sequence[PForm], moment, exact: bool):
    """``G[i][j] = sum_I int f_{i,I} f_{j,I}`` for the given monomial moment."""
    vecs, keys = _vectors(forms)
    by_index: dict = {}
    for key in keys:
        by_index.setdefault(key[0], []).append(key[1])
    n = len(forms)
    if exact:
        G = [[Fraction(0)] * n for _ in range(n)]
    else:
        G = np.zeros((n, n))
    for I, alphas in by_index.items():
        pos = {a: i for i, a in enumerate(alphas)}
        M = [[moment(tuple(x + y for x, y in zip(a, b))).rational for b in alphas] for a in alphas]
        if exact:
            rows = []
            for v in vecs:
                rows.append({pos[a]: c for (J, a), c in v.items() if J == I})
            for i in range(n):
                if not rows[i]:
                    continue
                # t = M @ row_i
                t = {}
                for a, c in rows[i].items():
                    Ma = M[a]
                    for b in range(len(alphas)):
                        if Ma[b]:
                            t[b] = t.get(b, 0) + c * Ma[b]
                for j in range(i, n):
                    if not rows[j]:
                        continue
                    s = sum((t.get(b, 0) * c for b, c in rows[j].items()), Fraction(0))
                    if s:
                        G[i][j] += s
                        if j != i:
                            G[j][i] += s
        else:
            E = np.zeros((len(alphas), n))
            for j, v in enumerate(vecs):
                for (J, a), c in v.items():
                    if J == I:
                        E[pos[a], j] = float(c)
            Mf = np.array([[float(x) for x in row] for row in M])
            G += E.T @ Mf @ E
    return G


def assemble_problem(gp: GalerkinProblem, exact: bool | None = None) -> Assembly:
    """Stiffness matrix A, boundary mass matrix B and the trial basis.

    The common power of pi is stripped from the exact volume integrals. For
    the ball B is exact as well; for ellipsoids B comes from quadrature (with
    pi restored in A so both are plain floats).
    """
    basis = trial_basis(gp)
    if not basis:
        raise ValueError("empty trial space; increase D")
    if exact is None:
        exact = gp.domain == "ball" and len(basis) <= EXACT_DIM_LIMIT
    if gp.domain != "ball":
        exact = False
    d_forms = [exterior_d(w) if gp.p < gp.dim else PForm.zero(gp.p, gp.dim) for w in basis]
    A = _gram(d_forms, gp.volume_moment, exact)
    if gp.p > 0:
        delta_forms = [codifferential(w) for w in basis]
        A2 = _gram(delta_forms, gp.volume_moment, exact)
        A = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(A, A2)] if exact else A + A2
    null = boundary_null_space(basis, gp.quadric())
    s = pi_power(gp.dim)
    if gp.domain == "ball":
        B = _gram(basis, sphere_monomial_moment, exact)
        asm = Assembly(gp, basis, A, B, null, exact, s)
    else:
        A = np.asarray(A) * math.pi ** (s / 2)
        B = ellipsoid_boundary_matrix(gp, basis)
        asm = Assembly(gp, basis, A, B, null, False, 0)
    _assert_psd(_as_float(asm.A), "stiffness matrix")
    _assert_psd(_as_float(asm.B), "boundary mass matrix")
    return asm


def _as_float(M) -> np.ndarray:
    if isinstance(M, np.ndarray):
        return M.astype(float)
    return np.array([[float(x) for x in row] for row in M])


def _eval_components(basis: Sequence[PForm], pts: np.ndarray, p: int, dim: int) -> np.ndarray:
    """Array (points, basis, components) of component values."""
    idxs = form_indices(dim, p)
    out = np.zeros((pts.shape[0], len(basis), len(idxs)))
    for j, w in enumerate(basis):
        for c, I in enumerate(idxs):
            f = w.component(I)
            if not f:
                continue
            vals = np.zeros(pts.shape[0])
            for alpha, coef in f.terms.items():
                vals += float(coef) * np.prod(pts ** np.array(alpha), axis=1)
            out[:, j, c] = vals
    return out


def ellipsoid_boundary_matrix(gp: GalerkinProblem, basis: Sequence[PForm], tol: float = 1e-10) -> np.ndarray:
    prev = None
    for m in _refinement_levels():
        pts, w = ellipsoid_surface_rule(gp.semi_axes, m)
        F = _eval_components(basis, pts, gp.p, gp.dim)
        B = np.einsum("q,qic,qjc->ij", w, F, F)
        if prev is not None and np.max(np.abs(B - prev)) <= tol * np.max(np.abs(B)):
            return B
        prev = B
    raise RuntimeError("boundary quadrature did not converge")


# -- eigenvalue solve ------------------------------------------------------------------

def _reduce_exact(asm: Assembly):
    """Exact A-orthogonal complement of the boundary-null forms."""
    n = len(asm.basis)
    Z = asm.boundary_null
    A, B = asm.A, asm.B
    if Z:
        # w with z^T A w = 0 for all z in Z
        rows = []
        for z in Z:
            rows.append([sum((z[i] * A[i][j] for i in range(n) if z[i]), Fraction(0)) for j in range(n)])
        W = exactlinalg.nullspace(exactlinalg.dense_columns(rows), n) if rows else None
    else:
        W = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]

    def congruence(M):
        MW = [[sum((M[i][k] * w[k] for k in range(n) if w[k]), Fraction(0)) for i in range(n)] for w in W]
        return [[sum((u[i] * mw[i] for i in range(n) if u[i]), Fraction(0)) for mw in MW] for u in W]

    return congruence(A), congruence(B), W


def _reduce_float(A: np.ndarray, B: np.ndarray, Z):
    n = A.shape[0]
    Zf = np.asarray(Z, dtype=float).reshape(-1, n).T
    if Zf.shape[1] == 0:
        return A, B
    Qz, _ = np.linalg.qr(Zf)
    full, _ = np.linalg.qr(np.hstack([Qz, np.eye(n)]))
    U = full[:, Qz.shape[1]:n]
    Auu = U.T @ A @ U
    Auz = U.T @ A @ Qz
    Azz = Qz.T @ A @ Qz
    As = Auu - Auz @ np.linalg.solve(Azz, Auz.T)
    Bs = U.T @ B @ U
    return (As + As.T) / 2, (Bs + Bs.T) / 2


def _deflate_constant(A: np.ndarray, B: np.ndarray, Z, const_index: int):
    """Restrict to functions with zero boundary mean, i.e. B-orthogonal to the constant."""
    U = scipy.linalg.null_space(B[const_index][None, :])
    Zf = np.asarray(Z, dtype=float).reshape(-1, A.shape[0])
    return U.T @ A @ U, U.T @ B @ U, Zf @ U


def _smallest(As: np.ndarray, Bs: np.ndarray) -> tuple[float, np.ndarray]:
    vals, vecs = scipy.linalg.eigh(As, Bs)
    return float(vals[0]), vecs[:, 0]


def _assert_psd(M: np.ndarray, what: str, rel: float = 1e-8) -> None:
    scale = max(float(np.max(np.abs(M))), 1.0)
    low = float(np.linalg.eigvalsh((M + M.T) / 2)[0])
    if low < -rel * scale:
        raise AssertionError(f"{what} is not positive semidefinite (min eigenvalue {low:.3e})")


def _certify(Ae, Be, value: float, max_den: int = 10_000) -> Fraction | None:
    """Rational ``lam`` with ``A - lam B`` singular and PSD, if one is near ``value``."""
    lam = Fraction(value).limit_denominator(max_den)
    if abs(float(lam) - value) > 1e-8:
        return None
    M = [[a - lam * b for a, b in zip(ra, rb)] for ra, rb in zip(Ae, Be)]
    if exactlinalg.rank_dense(M) == len(M):
        return None
    return lam if exactlinalg.is_psd(M) else None


def smallest_rayleigh(gp: GalerkinProblem | Assembly, certify: bool = True) -> EigResult:
    """Smallest Rayleigh quotient over the trial space (an upper bound for the eigenvalue)."""
    asm = gp if isinstance(gp, Assembly) else assemble_problem(gp)
    prob = asm.problem
    exact_value = None
    if asm.exact:
        Ae, Be, W = _reduce_exact(asm)
        if not W:
            raise ValueError("boundary norm vanishes on the whole trial space")
        As, Bs = _as_float(Ae), _as_float(Be)
        value, u = _smallest(As, Bs)
        if certify:
            exact_value = _certify(Ae, Be, value)
    else:
        A = np.asarray(asm.A, dtype=float)
        B = np.asarray(asm.B, dtype=float)
        Z = [[float(v) for v in z] for z in asm.boundary_null]
        if prob.p == 0 and prob.domain != "ball":
            A, B, Z = _deflate_constant(A, B, Z, len(asm.basis) - 1)
        As, Bs = _reduce_float(A, B, Z)
        if As.shape[0] == 0:
            raise ValueError("boundary norm vanishes on the whole trial space")
        value, u = _smallest(As, Bs)
    residual = float(np.linalg.norm(As @ u - value * (Bs @ u)) / np.linalg.norm(u))
    return EigResult(
        value=float(exact_value) if exact_value is not None else value,
        residual=residual,
        trial_dimension=len(asm.basis),
        certificate="exact-rational-ratio" if exact_value is not None else "floating",
        exact_value=exact_value,
        details={"reduced_dimension": int(As.shape[0]), "boundary_null": len(asm.boundary_null)},
    )


# -- isoperimetric bound -----------------------------------------------------------------

@dataclass
class IsoCheck:
    verdict: str
    galerkin: EigResult
    rhs: float
    rhs_exact: Fraction | None
    margin: float
    closed_form: Fraction | None = None
    equality_margin: Fraction | None = None
    equality_expected: bool | None = None


ISO_TOL = 1e-9


def iso_rhs(gp: GalerkinProblem) -> tuple[float, Fraction | None]:
    """``(p+1)/(n+1) * area/volume``; exact for the ball."""
    factor = Fraction(gp.p + 1, gp.n + 1)
    if gp.domain == "ball":
        ratio = sphere_area(gp.dim) / ball_volume(gp.dim)
        return float(factor * ratio), factor * ratio
    ratio = ellipsoid_area(gp.semi_axes) / ellipsoid_volume(gp.semi_axes)
    return float(factor) * ratio, None


def iso_bound_check(gp: GalerkinProblem) -> IsoCheck:
    """Confirm the isoperimetric upper bound with a Galerkin value.

    Galerkin values bound the eigenvalue from above, so ``galerkin <= rhs``
    confirms the inequality; otherwise the check is inconclusive.
    """
    if not 1 <= gp.p <= gp.n:
        raise ValueError("the isoperimetric bound is stated for 1 <= p <= n")
    res = smallest_rayleigh(gp)
    rhs, rhs_exact = iso_rhs(gp)
    if res.exact_value is not None and rhs_exact is not None:
        margin = float(rhs_exact - res.exact_value)
        confirmed = res.exact_value <= rhs_exact
    else:
        margin = rhs - res.value
        confirmed = margin >= -ISO_TOL
    out = IsoCheck("confirmed" if confirmed else "inconclusive", res, rhs, rhs_exact, margin)
    if gp.domain == "ball":
        out.closed_form = first_eigenvalue(gp.n, gp.p)
        out.equality_margin = rhs_exact - out.closed_form
        out.equality_expected = 2 * gp.p >= gp.n + 1
    return out


def ball_equality_margin(n: int, p: int) -> Fraction:
    """Exact ``(p+1)/(n+1) * area/volume - nu_1`` on the unit ball."""
    ratio = sphere_area(n + 1) / ball_volume(n + 1)
    return Fraction(p + 1, n + 1) * ratio - first_eigenvalue(n, p)


# -- parallel forms ----------------------------------------------------------------------

def _vector_vars(p: int, dim: int) -> list[list[Poly]]:
    nv = p * dim
    return [[Poly.var(i * dim + a, nv) for a in range(dim)] for i in range(p)]


def _det_poly(rows: list[list[Poly]], nv: int) -> Poly:
    out = Poly.zero(nv)
    m = len(rows)
    for perm in itertools.permutations(range(m)):
        sign = 1
        for i in range(m):
            for j in range(i + 1, m):
                if perm[i] > perm[j]:
                    sign = -sign
        t = Poly.const(sign, nv)
        for i, j in enumerate(perm):
            t = t * rows[i][j]
        out = out + t
    return out


def _average_over_spheres(f: Poly, p: int, dim: int) -> Fraction:
    """Integral over (S^n)^p against the product of ``(n+1)/|S^n| dS``."""
    area = sphere_area(dim)
    total = Fraction(0)
    for alpha, c in f.terms.items():
        t = c
        for i in range(p):
            block = alpha[i * dim:(i + 1) * dim]
            t *= Fraction(dim) * (sphere_monomial_moment(block) / area)
            if not t:
                break
        total += t
    return total


def wedge_components(p: int, dim: int) -> dict[tuple[int, ...], Poly]:
    """Components of ``V1 ^ ... ^ Vp`` as polynomials in the vector entries."""
    V = _vector_vars(p, dim)
    nv = p * dim
    return {I: _det_poly([[V[i][a] for a in I] for i in range(p)], nv) for I in form_indices(dim, p)}


def parallel_moment_identities(n: int, p: int, normal: Sequence[Fraction]) -> dict:
    """Average ``|V1^...^Vp|^2`` and ``|i_N(V1^...^Vp)|^2`` over unit vectors.

    ``normal`` must be a rational unit vector. Returns the computed and the
    expected values ``p! C(n+1, p)`` and ``p! C(n, p-1)``.
    """
    if not 1 <= p <= n:
        raise ValueError("need 1 <= p <= n")
    dim = n + 1
    N = [Fraction(x) for x in normal]
    if len(N) != dim or sum(x * x for x in N) != 1:
        raise ValueError("normal must be a rational unit vector in R^(n+1)")
    comps = wedge_components(p, dim)
    nv = p * dim
    full = Poly.zero(nv)
    for f in comps.values():
        full = full + f * f
    contracted = Poly.zero(nv)
    for J in form_indices(dim, p - 1):
        acc = Poly.zero(nv)
        for a in range(dim):
            if a in J or not N[a]:
                continue
            K = tuple(sorted((a,) + J))
            # i_{e_a} dx_K picks a sign from the position of a in K
            sign = -1 if K.index(a) % 2 else 1
            acc = acc + comps[K] * (N[a] * sign)
        contracted = contracted + acc * acc
    got_full = _average_over_spheres(full, p, dim)
    got_normal = _average_over_spheres(contracted, p, dim)
    want_full = factorial(p) * comb(n + 1, p)
    want_normal = factorial(p) * comb(n, p - 1)
    return {
        "full": got_full, "full_expected": Fraction(want_full),
        "normal": got_normal, "normal_expected": Fraction(want_normal),
        "ok": got_full == want_full and got_normal == want_normal,
    }


def parallel_average(X: Sequence[Fraction], Y: Sequence[Fraction]) -> Fraction:
    """Average of ``<V, X><V, Y>`` over unit vectors V against ``(n+1)/|S^n| dS``."""
    dim = len(X)
    V = [Poly.var(a, dim) for a in range(dim)]
    vx = sum((V[a] * Fraction(X[a]) for a in range(dim)), Poly.zero(dim))
    vy = sum((V[a] * Fraction(Y[a]) for a in range(dim)), Poly.zero(dim))
    return _average_over_spheres(vx * vy, 1, dim)


# -- vector fields in R^3 ------------------------------------------------------------------

def divergence(X: Sequence[Poly]) -> Poly:
    return sum((X[i].diff(i) for i in range(3)), Poly.zero(3))


def curl(X: Sequence[Poly]) -> list[Poly]:
    return [
        X[2].diff(1) - X[1].diff(2),
        X[0].diff(2) - X[2].diff(0),
        X[1].diff(0) - X[0].diff(1),
    ]


def vector_field_rayleigh_3d(X: Sequence[Poly], boundary_type: str) -> Fraction:
    """``int_B (div X)^2 + |curl X|^2`` over ``int_S |X|^2`` on the unit ball of R^3.

    ``boundary_type`` is ``"tangent"`` or ``"normal"``; the matching boundary
    condition is checked exactly before integrating.
    """
    if len(X) != 3 or any(f.dim != 3 for f in X):
        raise ValueError("X must have three components in R^3")
    omega = PForm.one_form(list(X))
    g = sphere_quadric(3)
    if boundary_type == "tangent":
        ok = reduce_mod_quadric(sum((X[i] * Poly.var(i, 3) for i in range(3)), Poly.zero(3)), g).is_zero()
    elif boundary_type == "normal":
        proj = radial_horizontal_projection(omega)
        ok = all(reduce_mod_quadric(c, g).is_zero() for c in proj.components.values())
    else:
        raise ValueError(f"boundary_type must be 'tangent' or 'normal', got {boundary_type!r}")
    if not ok:
        raise ValueError(f"X violates the {boundary_type} boundary condition")
    div = divergence(X)
    c = curl(X)
    num = integrate_ball(div * div + sum((f * f for f in c), Poly.zero(3)))
    den = integrate_sphere(sum((f * f for f in X), Poly.zero(3)))
    if not den.rational:
        raise ValueError("X vanishes on the boundary")
    return num / den


def vector_field_form_quotient(X: Sequence[Poly]) -> Fraction:
    """Same quotient through ``|d w|^2 + |delta w|^2`` of the dual 1-form ``w``."""
    omega = PForm.one_form(list(X))
    dw = exterior_d(omega)
    sdw = hodge_star(dw)
    dl = codifferential(omega).component(())
    num = integrate_ball(dl * dl + sum((f * f for f in sdw.components.values()), Poly.zero(3)))
    den = integrate_sphere(sum((f * f for f in X), Poly.zero(3)))
    return num / den
