import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pearcey_wkb.aberth import from_roots, roots_aberth
from pearcey_wkb.errors import DegenerateLeadingCoefficient, ValidationError


def _as_set(roots, expected, tol=1e-9):
    roots = sorted(roots, key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    expected = sorted(expected, key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    return all(abs(a - b) <= tol for a, b in zip(roots, expected))


def test_quadratic_identity_case():
    roots, mult = roots_aberth([1.0, 0.0, 1.0], tol=1e-12)
    assert _as_set(roots, [1j, -1j])
    assert mult == [1, 1]


def test_cube_roots_of_unity():
    # characteristic cubic at (x1, x2) = (-4, 0)
    roots, _ = roots_aberth([-4.0, 0.0, 0.0, 4.0], tol=1e-12)
    w = np.exp(2j * np.pi / 3)
    assert _as_set(roots, [1.0, w, w**2])


def test_triple_root_factorization():
    # -27 h^4 + 18 h^2 - 8 h + 1 = -27 (h - 1/3)^3 (h + 1)
    roots, mult = roots_aberth([1.0, -8.0, 18.0, 0.0, -27.0], tol=1e-12)
    near_third = [r for r, m in zip(roots, mult) if abs(r - 1 / 3) < 1e-3]
    near_minus1 = [r for r, m in zip(roots, mult) if abs(r + 1) < 1e-6]
    assert len(near_third) == 3 and len(near_minus1) == 1
    assert all(m == 3 for r, m in zip(roots, mult) if abs(r - 1 / 3) < 1e-3)


def test_degenerate_leading_coefficient():
    with pytest.raises(DegenerateLeadingCoefficient):
        roots_aberth([1.0, 2.0, 1e-18], tol=1e-12)


def test_invalid_inputs():
    with pytest.raises(ValidationError):
        roots_aberth([], tol=1e-12)
    with pytest.raises(ValidationError):
        roots_aberth([1.0, 1.0], tol=-1.0)
    with pytest.raises(ValidationError):
        roots_aberth([np.nan, 1.0], tol=1e-12)


def test_deterministic_output_order():
    c = [2.0, -3.0, 0.5, 1.0, 0.25]
    r1, _ = roots_aberth(c)
    r2, _ = roots_aberth(c)
    assert np.array_equal(r1, r2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_reconstruction_round_trip(seed, degree):
    rng = np.random.default_rng(seed)
    roots = rng.normal(size=degree) + 1j * rng.normal(size=degree)
    # keep the polynomial well conditioned: push colliding roots apart
    for i in range(degree):
        for j in range(i):
            if abs(roots[i] - roots[j]) < 0.3:
                roots[i] += 0.5 + 0.5j
    lead = 1.0 + 0.5j
    coeffs = from_roots(roots, lead)
    found, _ = roots_aberth(coeffs, tol=1e-13)
    rebuilt = from_roots(sorted(found, key=lambda z: (z.real, z.imag)), lead)
    ordered = from_roots(sorted(roots, key=lambda z: (z.real, z.imag)), lead)
    scale = max(abs(c) for c in ordered)
    assert max(abs(a - b) for a, b in zip(rebuilt, ordered)) <= 1e-8 * scale
