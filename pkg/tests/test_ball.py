from fractions import Fraction

import pytest

from dtnforms.ball import (
    SpectrumEntry,
    VerificationError,
    build_coexact_pair,
    build_exact_pair,
    duality_first_eigenvalues,
    enumerate_spectrum,
    exact_extension_constants,
    first_eigenvalue,
    nu_coexact,
    nu_exact,
    nu_function,
    profile_eigenvalue,
    solve_extension_constants,
    sphere_hodge_eigenvalue,
    verify_degree,
    verify_harm2_profiles,
)
from dtnforms.exterior import PForm, exterior_d, interior_radial
from dtnforms.harmonic import build_Hdoubleprime
from dtnforms.polycore import Poly

x = [Poly.var(i, 3) for i in range(3)]
XI_HAT = PForm.one_form([2 - 2 * x[0] ** 2 + x[1] ** 2 + x[2] ** 2, -3 * x[0] * x[1], -3 * x[0] * x[2]])
V_HAT = PForm.basic([1, 2], 3, x[0]) + PForm.basic([0, 1], 3, x[2]) - PForm.basic([0, 2], 3, x[1])


def levels(n, p, k_max):
    return [(lv.eigenvalue, lv.multiplicity) for lv in enumerate_spectrum(n, p, k_max)]


def test_closed_form_examples():
    assert [nu_function(k) for k in (0, 1, 7)] == [0, 1, 7]
    assert nu_coexact(2, 1, 1) == 2
    assert nu_coexact(2, 1, 2) == 3
    assert nu_coexact(4, 3, 2) == 5
    assert nu_exact(2, 1, 1) == Fraction(5, 3)
    assert nu_exact(1, 1, 1) == 2
    assert nu_exact(2, 2, 1) == Fraction(14, 5)
    assert sphere_hodge_eigenvalue(2, 1, 1, "coexact") == 2
    assert sphere_hodge_eigenvalue(2, 1, 2, "volume") == 0
    assert sphere_hodge_eigenvalue(3, 2, 1, "exact") == 8
    with pytest.raises(ValueError):
        nu_coexact(2, 2, 2)
    with pytest.raises(ValueError):
        nu_exact(2, 0, 1)


def test_entry_validation():
    with pytest.raises(ValueError):
        SpectrumEntry("function", 2, 1, 1, Fraction(1), 3, Fraction(2))
    with pytest.raises(ValueError):
        SpectrumEntry("coexact", 2, 1, 1, Fraction(2), 0, Fraction(2))


def test_enumerate_examples():
    assert levels(2, 1, 2) == [(Fraction(5, 3), 3), (2, 3), (Fraction(14, 5), 5), (3, 5)]
    assert levels(2, 2, 1) == [(3, 1), (Fraction(10, 3), 3)]


def test_n1_merged_multiplicity_three():
    # the coexact value at k=1 and the exact value at k=1 coincide (both 2)
    assert levels(1, 1, 1) == [(2, 3)]
    assert nu_exact(1, 2, 1) == 3


def test_first_eigenvalue_examples():
    assert first_eigenvalue(2, 1) == Fraction(5, 3)
    assert first_eigenvalue(2, 2) == 3
    assert first_eigenvalue(3, 2) == 3
    assert first_eigenvalue(2, 0) == 1


@pytest.mark.parametrize("n", range(1, 7))
def test_first_eigenvalue_is_min_of_spectrum(n):
    for p in range(1, n + 1):
        assert first_eigenvalue(n, p) == enumerate_spectrum(n, p, 2)[0].eigenvalue


def test_branch_agreement_odd_n():
    for n in (1, 3, 5, 7):
        p = (n + 1) // 2
        assert Fraction((n + 3) * p, n + 1) == p + 1


def test_coexact_examples():
    xi = PForm.basic([1], 3, x[0]) - PForm.basic([0], 3, x[1])
    pair = build_coexact_pair(2, 1, 1, xi)
    assert pair.entry.eigenvalue == 2 and pair.verified
    vol = build_coexact_pair(2, 1, 2, V_HAT)
    assert vol.entry.family == "volume" and vol.entry.eigenvalue == 3
    with pytest.raises(ValueError):
        build_coexact_pair(2, 1, 1, PForm.basic([0], 3, x[0]))


def test_exact_extension_of_x1_is_known_minimizer():
    phi = PForm.function(x[0])
    pair = build_exact_pair(2, 1, 1, phi)
    assert pair.entry.eigenvalue == Fraction(5, 3)
    assert pair.extension == XI_HAT
    assert pair.proportionality == 3  # J* ext = (n + 2k - 1) J* dphi


def test_exact_pair_scales_linearly():
    phi = PForm.function(x[0])
    a = build_exact_pair(2, 1, 1, phi)
    b = build_exact_pair(2, 1, 1, phi * Fraction(-7, 2))
    assert b.extension == a.extension * Fraction(-7, 2)
    assert b.entry.eigenvalue == a.entry.eigenvalue


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_extension_constants_reproduced_by_linear_solve(n):
    for k in range(1, 4):
        for p in range(1, n + 1):
            for phi in build_Hdoubleprime(n, k, p - 1).basis[:2]:
                kernel = solve_extension_constants(phi)
                assert len(kernel) == 1
                v = kernel[0]
                expected = exact_extension_constants(n, k, p)
                scale = expected[2] / v[2]
                assert [c * scale for c in v] == list(expected)


def test_euler_identity_scan():
    for n in (1, 2, 3):
        for p in range(1, n + 1):
            for k in range(1, 4):
                for xi in build_Hdoubleprime(n, k, p).basis:
                    if p < n + 1:
                        assert interior_radial(exterior_d(xi)) == xi * (k + p)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_completeness_small(n):
    for p in range(0, n + 1):
        pairs = verify_degree(n, p, 3)
        assert all(pair.verified for pair in pairs)
        counted = {}
        for pair in pairs:
            counted[(pair.entry.family, pair.entry.k)] = counted.get((pair.entry.family, pair.entry.k), 0) + 1
        for key, count in counted.items():
            entry = next(e for e in (pp.entry for pp in pairs) if (e.family, e.k) == key)
            assert count == entry.multiplicity


def test_wrong_constants_are_rejected(monkeypatch):
    import dtnforms.ball as ball

    monkeypatch.setattr(ball, "exact_extension_constants", lambda n, k, p: (Fraction(1), Fraction(1), Fraction(-3)))
    with pytest.raises(VerificationError):
        ball.build_exact_pair(2, 1, 1, PForm.function(x[0]))


def test_harm2_profiles():
    assert verify_harm2_profiles(2, 1, 1)
    assert verify_harm2_profiles(3, 2, 2)
    assert not verify_harm2_profiles(2, 1, 1, shift=1)
    for n in range(1, 5):
        for p in range(1, n + 1):
            for k in range(1, 4):
                assert verify_harm2_profiles(n, k, p)
                assert profile_eigenvalue(n, k, p) == nu_exact(n, k, p)


def test_duality_spot_check():
    for n in range(2, 6):
        for p, nu, nu_dual in duality_first_eigenvalues(n):
            assert nu_dual == first_eigenvalue(n, n - p)
    # (n, p) = (2, 1) is self-dual
    assert duality_first_eigenvalues(2) == [(1, Fraction(5, 3), Fraction(5, 3))]
