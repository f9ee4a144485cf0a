"""Laplace integrals of the Borel transforms and the defining integral.

``laplace_borel_sum`` evaluates the Borel sum of one WKB solution,

    Psi_ell(eta) = int_{u_ell}^{u_ell + infty} e^(-eta y) psi_ell_B(y) dy,

along the cut ray, removing the inverse-square-root endpoint by the
substitution y = u_ell + w^2.  The integrand near the endpoint uses the
local series; beyond a hand-off radius the sheet continuation takes over.

``pearcey_quadrature`` integrates exp(eta (z^4 + x2 z^2 + x1 z)) along a
piecewise-linear contour joining two valleys of the integrand, giving an
independent oracle for linear combinations of the Borel sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .errors import TailBoundError, ValidationError
from .geometry import PlanePoint
from .borel import SheetField
from .wkb_series import WkbSeriesTable, borel_coeffs

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def gauss_segment(f, a: complex, b: complex, n: int = 32) -> complex:
    """Fixed-order Gauss-Legendre integral of f along the segment a -> b."""
    xs, ws = _gl_nodes(n)
    mid = (a + b) / 2.0
    half = (b - a) / 2.0
    return half * sum(w * f(mid + half * x) for x, w in zip(xs, ws))


def adaptive_segment(f, a: complex, b: complex, tol: float, depth: int = 0) -> complex:
    """Adaptive bisection with a 16- vs 32-node error estimate."""
    coarse = gauss_segment(f, a, b, 16)
    fine = gauss_segment(f, a, b, 32)
    if abs(fine - coarse) <= tol or depth >= 12:
        return fine
    mid = (a + b) / 2.0
    return adaptive_segment(f, a, mid, tol / 2, depth + 1) + adaptive_segment(
        f, mid, b, tol / 2, depth + 1
    )


@dataclass
class LaplaceResult:
    value: complex
    ell: int
    eta: float
    truncation: float  # ray length used
    series_radius: float


def laplace_borel_sum(
    ell: int,
    x: PlanePoint,
    eta: float,
    order: int = 8,
    table: WkbSeriesTable | None = None,
    tol: float = 1e-9,
    tail_log: float = 38.0,
) -> LaplaceResult:
    """Borel sum of one WKB solution by quadrature along the cut ray.

    The ray must not pass near another singularity; otherwise the Borel sum
    is ill-defined (Stokes configuration) and an error is raised.
    """
    if eta <= 0:
        raise ValidationError("eta must be positive real")
    field = SheetField(x)
    ul = field.u_vals[ell - 1]
    length = tail_log / eta
    for m in (1, 2, 3):
        if m == ell:
            continue
        um = field.u_vals[m - 1]
        d = um - ul
        if 0 < d.real < length and abs(d.imag) < 0.05 * field.min_sep:
            raise TailBoundError(
                f"integration ray from u_{ell} passes near u_{m}; Borel sum undefined"
            )

    bct = borel_coeffs(x, ell, order, table=table)
    # hand-off radius: series truncation error ~ (r/min_sep)^(order + 1/2)
    r_series = 0.12 * field.min_sep
    w_mid = sqrt(min(r_series, length / 2))
    w_max = sqrt(length)

    # endpoint piece from the local series (y = u_ell + w^2)
    def f_series(w: complex) -> complex:
        y = ul + w * w
        return np.exp(-eta * y) * bct.eval_series(y) * 2.0 * w

    part1 = adaptive_segment(f_series, 0.0, w_mid, tol * np.exp(-eta * ul.real))

    # far piece by sheet continuation, sampled at quadrature nodes
    part2 = 0j
    if w_max > w_mid:
        a, sheets0 = field.anchor(ell)
        start_y = ul + w_mid**2
        vals = field.track_from(sheets0, [a, start_y])
        npanels = 8
        prev = None
        for _ in range(3):
            total = 0j
            vals_cur = vals
            y_cur = start_y
            edges = np.linspace(w_mid, w_max, npanels + 1)
            for lo, hi in zip(edges[:-1], edges[1:]):
                xs, ws_ = _gl_nodes(24)
                mid = (lo + hi) / 2
                half = (hi - lo) / 2
                wnodes = mid + half * xs
                acc = 0j
                for wn, gw in zip(wnodes, ws_):
                    y = ul + wn * wn
                    vals_cur = field.track_from(vals_cur, [y_cur, y])
                    y_cur = y
                    psi = field.psi_from_sheets(ell, vals_cur)
                    acc += gw * np.exp(-eta * y) * psi * 2.0 * wn
                total += half * acc
            if prev is not None and abs(total - prev) <= tol * max(
                abs(total), np.exp(-eta * ul.real)
            ):
                part2 = total
                break
            prev = total
            part2 = total
            npanels *= 2
    return LaplaceResult(part1 + part2, ell, eta, length, r_series)


# -- defining oscillatory integral ------------------------------------------------


def valley_directions(eta: complex) -> list[complex]:
    """Unit directions of the four valleys of exp(eta z^4) at infinity."""
    base = (pi - np.angle(complex(eta))) / 4.0
    return [np.exp(1j * (base + k * pi / 2)) for k in range(4)]


def _phase(x: PlanePoint, z: complex) -> complex:
    x1, x2 = x.as_tuple()
    return z**4 + x2 * z**2 + x1 * z


def pearcey_quadrature(
    x: PlanePoint,
    eta: complex,
    contour: tuple[int, int],
    tol: float = 1e-10,
    r_cap: float = 60.0,
) -> complex:
    """Integral of exp(eta (z^4 + x2 z^2 + x1 z)) over a valley-pair contour.

    ``contour`` picks the ordered pair of valley indices (0..3); the path
    runs from infinity in valley a through the origin to infinity in valley
    b.  Truncation radius satisfies a 1e-16 tail bound relative to the
    integrand peak, else ``TailBoundError``.
    """
    eta = complex(eta)
    if eta.real <= 0:
        raise ValidationError("need Re eta > 0")
    a, b = contour
    if a == b or not (0 <= a <= 3 and 0 <= b <= 3):
        raise ValidationError("contour must be an ordered pair of distinct valleys 0..3")
    dirs = valley_directions(eta)
    x1, x2 = x.as_tuple()

    # peak estimate: saddle values and the origin
    from .aberth import roots_aberth

    saddles, _ = roots_aberth(np.array([x1, 2 * x2, 0.0, 4.0], dtype=complex))
    peak_log = max(0.0, *((eta * _phase(x, z)).real for z in saddles))
    if peak_log > 600.0:
        raise TailBoundError(
            f"integrand peak exp({peak_log:.1f}) overflows double precision"
        )

    R = 2.0
    while True:
        ok = True
        for d in (dirs[a], dirs[b]):
            z = R * d
            bound = (eta * z**4).real + abs(eta) * (
                abs(x2) * R**2 + abs(x1) * R
            )
            if bound > peak_log - 37.0:
                ok = False
        if ok:
            break
        R *= 1.5
        if R > r_cap:
            raise TailBoundError(
                f"tail bound not achieved at radius cap {r_cap}; "
                f"peak_log={peak_log:.2f}"
            )

    def f(z: complex) -> complex:
        return np.exp(eta * _phase(x, z))

    tol_abs = tol * np.exp(peak_log)
    return adaptive_segment(f, R * dirs[a], 0.0, tol_abs) + adaptive_segment(
        f, 0.0, R * dirs[b], tol_abs
    )


def match_borel_combination(
    value: complex, psis, tol: float = 1e-4
) -> tuple[complex, tuple[int, int, int]]:
    """Identify a valley-pair integral as a signed sum of Borel sums.

    Searches value = phase * sqrt(pi) * sum_l eps_l Psi_l with
    phase in {i, -i} and eps in {-1, 0, 1}; the phase is the fixed
    orientation factor between the defining contour and the Laplace rays.
    Returns (phase, eps) normalized so the first nonzero eps is +1; raises
    if no combination or more than one matches within ``tol`` relative.
    """
    import itertools

    hits = []
    for eps in itertools.product((-1, 0, 1), repeat=3):
        if all(e == 0 for e in eps):
            continue
        first = next(e for e in eps if e != 0)
        if first < 0:
            continue  # dedupe the (eps, phase) -> (-eps, -phase) symmetry
        comb = sqrt(pi) * sum(e * p for e, p in zip(eps, psis))
        for phase in (1j, -1j):
            if abs(value - phase * comb) <= tol * abs(value):
                hits.append((phase, eps))
    if len(hits) != 1:
        raise ValidationError(
            f"expected exactly one matching Borel-sum combination, found {hits}"
        )
    return hits[0]


def pearcey_p1_residual(x: PlanePoint, eta: complex, contour, h: float = 1e-3) -> float:
    """Scaled finite-difference residual of the first defining operator.

    Applies 4 d1 d2 + 2 eta x2 d1 + eta^2 x1 to the contour integral by
    central differences in (x1, x2).
    """
    x1, x2 = x.as_tuple()

    def u(dx1, dx2):
        return pearcey_quadrature(PlanePoint(x1 + dx1, x2 + dx2), eta, contour)

    upp = u(h, h)
    upm = u(h, -h)
    ump = u(-h, h)
    umm = u(-h, -h)
    d12 = (upp - upm - ump + umm) / (4 * h * h)
    d1 = (u(h, 0) - u(-h, 0)) / (2 * h)
    u0 = u(0, 0)
    val = 4 * d12 + 2 * eta * x2 * d1 + eta**2 * x1 * u0
    scale = abs(4 * d12) + abs(2 * eta * x2 * d1) + abs(eta**2 * x1 * u0)
    return abs(val) / max(scale, 1e-300)
