from fractions import Fraction
from itertools import combinations

from hypothesis import HealthCheck, settings, strategies as st

from dtnforms.exterior import PForm
from dtnforms.polycore import Poly

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("default")

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def polys(draw, dim, max_degree=3, max_terms=4):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        alpha = tuple(draw(st.lists(st.integers(0, max_degree), min_size=dim, max_size=dim)))
        if sum(alpha) > max_degree:
            continue
        terms[alpha] = draw(small_fractions)
    return Poly(terms, dim)


@st.composite
def homogeneous_polys(draw, dim, k, max_terms=4):
    from dtnforms.exterior import exponents

    monos = exponents(dim, k)
    chosen = draw(st.lists(st.sampled_from(monos), max_size=max_terms, unique=True))
    return Poly({a: draw(small_fractions) for a in chosen}, dim)


@st.composite
def pforms(draw, dim, degree=None, max_degree=3, homogeneous=None):
    p = draw(st.integers(0, dim)) if degree is None else degree
    comps = {}
    for I in combinations(range(dim), p):
        if draw(st.booleans()):
            if homogeneous is None:
                comps[I] = draw(polys(dim, max_degree))
            else:
                comps[I] = draw(homogeneous_polys(dim, homogeneous))
    return PForm(comps, p, dim)


def tangent_frame(point):
    """Rational tangent vectors at a rational point of the unit sphere."""
    dim = len(point)
    out = []
    for j in range(dim):
        v = [-point[j] * x for x in point]
        v[j] += 1
        out.append(v)
    return out


def as_fraction_list(xs):
    return [Fraction(x) for x in xs]
