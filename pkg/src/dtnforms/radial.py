"""Radial ODE for the co-exact family on rotationally symmetric balls.

On ``[0, R] x S^n`` with metric ``dr^2 + theta(r)^2 ds^2`` the extension of a
co-closed sphere eigenform ``xi`` (Hodge eigenvalue ``mu``) is ``Q(r) xi``
with

    Q'' + (n - 2p) (theta'/theta) Q' - mu Q / theta^2 = 0,   Q(R) = 1,

and the Dirichlet-to-Neumann eigenvalue is ``Q'(R)``. The ODE has a regular
singular point at ``r = 0``; the solver starts from a Frobenius series on
``[0, r0]`` and hands over to an adaptive Runge-Kutta integrator.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp

SERIES_TERMS = 40
RTOL = 1e-12
ATOL = 1e-14


class RadialSolveError(RuntimeError):
    pass


def _sin_taylor(m: int) -> list[float]:
    return [0.0 if j % 2 == 0 else (-1) ** (j // 2) / math.factorial(j) for j in range(m)]


def _sinh_taylor(m: int) -> list[float]:
    return [0.0 if j % 2 == 0 else 1.0 / math.factorial(j) for j in range(m)]


@dataclass(frozen=True)
class WarpProfile:
    """Warping function ``theta`` with ``theta(0) = 0`` and ``theta'(0) = 1``.

    ``taylor(m)`` must return the first ``m`` Taylor coefficients of theta at 0.
    """

    kind: str
    theta: Callable[[float], float]
    dtheta: Callable[[float], float]
    ddtheta: Callable[[float], float]
    taylor: Callable[[int], list[float]]
    validity: float = math.inf

    def check_radius(self, R: float) -> None:
        if not 0 < R < self.validity:
            raise ValueError(f"R={R} outside (0, {self.validity}) for the {self.kind} profile")


def euclidean() -> WarpProfile:
    return WarpProfile(
        "euclidean",
        lambda r: r,
        lambda r: np.ones_like(np.asarray(r, dtype=float)) if np.ndim(r) else 1.0,
        lambda r: np.zeros_like(np.asarray(r, dtype=float)) if np.ndim(r) else 0.0,
        lambda m: [0.0, 1.0] + [0.0] * max(m - 2, 0),
    )


def spherical() -> WarpProfile:
    return WarpProfile("spherical", np.sin, np.cos, lambda r: -np.sin(r), _sin_taylor, math.pi)


def hyperbolic() -> WarpProfile:
    return WarpProfile("hyperbolic", np.sinh, np.cosh, np.sinh, _sinh_taylor)


def custom(theta, dtheta, ddtheta, taylor, validity: float = math.inf) -> WarpProfile:
    coeffs = taylor(2)
    if abs(coeffs[0]) > 1e-15 or abs(coeffs[1] - 1) > 1e-15:
        raise ValueError("custom profile needs theta(0) = 0 and theta'(0) = 1")
    return WarpProfile("custom", theta, dtheta, ddtheta, taylor, validity)


PROFILES = {"euclidean": euclidean, "spherical": spherical, "hyperbolic": hyperbolic}


def profile_by_name(name: str) -> WarpProfile:
    try:
        return PROFILES[name]()
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None


@dataclass(frozen=True)
class RadialProblem:
    profile: WarpProfile
    n: int
    p: int
    k: int
    mu: Fraction
    R: float

    @classmethod
    def coexact(cls, profile: WarpProfile, n: int, p: int, k: int, R: float) -> "RadialProblem":
        """Problem for the co-exact family, or the volume family when ``p == n``."""
        if p == n:
            if k != 1:
                raise ValueError("the volume family has k = 1")
            mu = Fraction(0)
        elif 0 <= p <= n - 1 and k >= 1:
            mu = Fraction((k + p) * (n + k - p - 1))
        else:
            raise ValueError(f"(n, p, k) = ({n}, {p}, {k}) has no co-exact eigenvalue")
        return cls(profile, n, p, k, mu, R)


@dataclass
class RadialSolution:
    r: np.ndarray
    Q: np.ndarray
    dQ: np.ndarray
    nu: float
    exponent: float
    r0: float
    diagnostics: dict = field(default_factory=dict)


def indicial_exponent(n: int, p: int, mu: float) -> float:
    """Larger root of ``s(s-1) + (n-2p) s - mu = 0``."""
    b = n - 2 * p - 1
    return (-b + math.sqrt(b * b + 4 * float(mu))) / 2


def frobenius_coefficients(profile: WarpProfile, n: int, p: int, mu: float, terms: int = SERIES_TERMS):
    """Coefficients ``c_m`` with ``Q = sum c_m r^(s+m)``, ``c_0 = 1``."""
    s = indicial_exponent(n, p, mu)
    th = profile.taylor(terms + 2)
    u = np.array(th[1:terms + 1], dtype=float)  # theta = r * u(r)
    A = np.convolve(u, u)[:terms]
    ru_prime = np.arange(terms) * u[:terms]
    B = (n - 2 * p) * np.convolve(u, u + ru_prime)[:terms]
    c = np.zeros(terms)
    c[0] = 1.0
    for m in range(1, terms):
        acc = 0.0
        for i in range(1, m + 1):
            t = s + m - i
            acc += c[m - i] * (t * (t - 1) * A[i] + t * B[i])
        F = (s + m) * (s + m - 1) + (n - 2 * p) * (s + m) - mu
        c[m] = -acc / F
    return s, c


def solve_radial_profile(prob: RadialProblem, samples: int = 201) -> RadialSolution:
    """Regular solution normalized to ``Q(R) = 1`` and ``nu = Q'(R)``."""
    prof = prob.profile
    prof.check_radius(prob.R)
    mu = float(prob.mu)
    if mu < 0:
        raise ValueError("sphere eigenvalue must be non-negative")
    n, p, R = prob.n, prob.p, float(prob.R)
    r0 = min(R / 10, 0.1)
    s, c = frobenius_coefficients(prof, n, p, mu)
    m = np.arange(len(c))
    q0 = np.sum(c * r0**m)  # Q(r0) / r0^s
    dq0 = np.sum(c * (s + m) * r0 ** (m - 1.0))  # Q'(r0) / r0^s
    y0 = [1.0, dq0 / q0]

    def rhs(r, y):
        th = prof.theta(r)
        return [y[1], mu * y[0] / th**2 - (n - 2 * p) * prof.dtheta(r) / th * y[1]]

    grid = np.linspace(r0, R, samples)
    sol = solve_ivp(rhs, (r0, R), y0, method="DOP853", rtol=RTOL, atol=ATOL, t_eval=grid, dense_output=True)
    if not sol.success:
        raise RadialSolveError(f"integrator failed: {sol.message} (nfev={sol.nfev}, r0={r0})")
    QR, dQR = sol.y[0, -1], sol.y[1, -1]
    if not np.isfinite(QR) or QR == 0:
        raise RadialSolveError(f"degenerate value Q(R)={QR}")
    # prepend the series part so the samples cover [0, R]
    rs = np.linspace(0.0, r0, 11)[:-1]
    Qs = np.array([np.sum(c * x ** (s + m)) for x in rs]) / (q0 * r0**s)
    dQs = np.array([np.sum(c * (s + m) * x ** np.maximum(s + m - 1, 0)) if x > 0 else (1.0 if s == 1 else 0.0)
                    for x in rs]) / (q0 * r0**s)
    r_all = np.concatenate([rs, sol.t])
    Q_all = np.concatenate([Qs, sol.y[0]]) / QR
    dQ_all = np.concatenate([dQs, sol.y[1]]) / QR
    return RadialSolution(
        r=r_all, Q=Q_all, dQ=dQ_all, nu=float(dQR / QR), exponent=s, r0=r0,
        diagnostics={"nfev": int(sol.nfev), "series_terms": len(c), "status": int(sol.status)},
    )


def volume_ratio(profile: WarpProfile, n: int, R: float) -> float:
    """``theta(R)^n / int_0^R theta^n``, the boundary-to-volume ratio of B_R."""
    profile.check_radius(R)
    val, err = quad(lambda r: float(profile.theta(r)) ** n, 0.0, R, epsabs=0.0, epsrel=1e-13, limit=200)
    if not np.isfinite(val) or val <= 0 or err > 1e-10 * abs(val):
        raise RadialSolveError(f"quadrature failed: value={val}, error estimate={err}")
    return float(profile.theta(R)) ** n / val


# -- separated Laplacian --------------------------------------------------------

@dataclass(frozen=True)
class RadialFunction:
    """A radial function with its first two derivatives."""

    f: Callable
    df: Callable
    ddf: Callable

    @classmethod
    def power(cls, coeff: float, e: float) -> "RadialFunction":
        return cls(
            lambda r: coeff * r**e,
            lambda r: coeff * e * r ** (e - 1),
            lambda r: coeff * e * (e - 1) * r ** (e - 2),
        )

    @classmethod
    def zero(cls) -> "RadialFunction":
        z = lambda r: 0.0 * r  # noqa: E731
        return cls(z, z, z)


@dataclass(frozen=True)
class Coupling:
    """Sphere data linking the two pieces: ``d eta = a xi`` and ``delta xi = b eta``."""

    d_eta: float = 0.0
    delta_xi: float = 0.0


def separated_laplacian_residual(
    profile: WarpProfile,
    n: int,
    p: int,
    Q: RadialFunction,
    P: RadialFunction,
    mu_xi: float,
    mu_eta: float,
    coupling: Coupling = Coupling(),
    grid: Sequence[float] | None = None,
) -> tuple[float, float]:
    """Max-norms of the ``xi`` and ``dr ^ eta`` coefficients of the Laplacian.

    For ``w = Q xi + P dr ^ eta`` the Laplacian splits as ``c1 xi + dr ^ c2 eta``
    with

        c1 = mu_xi Q / theta^2 - (Q'' + (n-2p) theta'/theta Q') - 2 theta'/theta P a
        c2 = mu_eta P / theta^2 - (P' + (n-2p+2) theta'/theta P)' - 2 Q theta'/theta^3 b

    where ``a, b`` come from ``coupling``.
    """
    r = np.asarray(grid if grid is not None else np.linspace(0.05, 1.0, 200), dtype=float)
    th, dth, ddth = profile.theta(r), profile.dtheta(r), profile.ddtheta(r)
    h = dth / th
    dh = ddth / th - h**2
    q, dq, ddq = Q.f(r), Q.df(r), Q.ddf(r)
    pp, dp, ddp = P.f(r), P.df(r), P.ddf(r)
    c = n - 2 * p + 2
    c1 = mu_xi * q / th**2 - (ddq + (n - 2 * p) * h * dq) - 2 * h * pp * coupling.d_eta
    c2 = mu_eta * pp / th**2 - (ddp + c * (dh * pp + h * dp)) - 2 * q * dth / th**3 * coupling.delta_xi
    return float(np.max(np.abs(c1))), float(np.max(np.abs(c2)))


# -- sweeps -------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    profile: str
    n: int
    p: int
    k: int
    R: float
    nu: float


def sweep(profiles: Iterable[str], ns: Iterable[int], ps: Iterable[int] | None, ks: Iterable[int],
          radii: Iterable[float]) -> list[SweepRow]:
    """Co-exact eigenvalues over a parameter grid, in deterministic order."""
    rows = []
    ks = list(ks)
    radii = list(radii)
    for name in profiles:
        prof = profile_by_name(name)
        for n in ns:
            for p in (range(n + 1) if ps is None else ps):
                if p > n:
                    continue
                for k in ([1] if p == n else ks):
                    for R in radii:
                        sol = solve_radial_profile(RadialProblem.coexact(prof, n, p, k, R))
                        rows.append(SweepRow(name, n, p, k, R, sol.nu))
    return rows


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["profile", "n", "p", "k", "R", "nu"])
    for row in rows:
        w.writerow([row.profile, row.n, row.p, row.k, repr(row.R), repr(row.nu)])
    return buf.getvalue()
