"""Exact WKB series and Borel coefficients.

The two gradient components S^(1) = d(log u)/dx1 and S^(2) = d(log u)/dx2
expand as formal series sum_j S_j^(k) eta^(-j) starting at j = -1, with
S_(-1)^(1) = zeta a characteristic root and S_(-1)^(2) = zeta^2.  The
recurrences

    S_0^(1) = -(1/2) d1 log(6 zeta^2 + x2),
    S_j^(1) = -2/(6 zeta^2 + x2) * ( sum_{j1+j2+j3=j-2} S^(1)S^(1)S^(1)
              + 3 sum_{j1+j2=j-2} S^(1) d1 S^(1) + d1^2 S_{j-2}^(1) ),
    S_j^(2) = sum_{m=0}^{j+1} S_{m-1}^(1) S_{j-m}^(1) + d1 S_{j-1}^(1),

(indices range over -1 <= j_i < j) close over the ring of ``ZetaRational``
elements, so the whole table is exact.

Primitives of the closed 1-form omega = S^(1) dx1 + S^(2) dx2 fixed by the
weighted-homogeneity constraint are

    int omega_j = -(1/(4j)) (3 x1 S_j^(1) + 2 x2 S_j^(2))   (j != 0),
    int omega_0 = -(1/2) log(6 zeta^2 + x2),

and the normalized amplitude ratios f_j/f_0 come from expanding
exp( sum_{j>=1} eta^(-j) int omega_j ), with the closed-form prefactor
f_0 = (6 zeta^2 + x2)^(-1/2) kept out of the series.  The square root's
branch is continued along the labeling path from its reference value

    f_0(1, 0) = -(2^(1/6)/sqrt(3)) e^(-2 pi i ell/3),

the value forced by continuous phase tracking of zeta_ell along the
reference locus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, sqrt, pi

import numpy as np

from . import tracking
from .errors import ValidationError
from .geometry import (
    PlanePoint,
    Provenance,
    char_cubic_coeffs,
    char_roots,
    critical_values,
    default_provenance,
    reference_zetas,
)
from .zeta_ring import ZetaRational


def gamma_half_ratio(j: int) -> Fraction:
    """Gamma(j + 1/2) / Gamma(1/2) as an exact rational."""
    return Fraction(factorial(2 * j), 4**j * factorial(j))


def gamma_half(j: int) -> float:
    """Gamma(j + 1/2) in double precision (sqrt(pi) times exact rational)."""
    return sqrt(pi) * float(gamma_half_ratio(j))


@dataclass
class WkbSeriesTable:
    """Exact series data up to order N.

    Lists are indexed by j + 1 for j = -1 .. N (``s1``, ``s2``, ``prim``)
    and by j for j = 0 .. N (``f``, holding f_j/f_0).  The j = 0 primitive
    is the logarithm -(1/2) log(6 zeta^2 + x2); its slot in ``prim`` is None
    and the log data lives in ``log_multiplier`` / ``log_argument``.
    """

    order: int
    s1: list = field(default_factory=list)
    s2: list = field(default_factory=list)
    prim: list = field(default_factory=list)
    f: list = field(default_factory=list)
    log_multiplier: Fraction = Fraction(-1, 2)
    log_argument: ZetaRational = None

    def s1_at(self, j: int) -> ZetaRational:
        return self.s1[j + 1]

    def s2_at(self, j: int) -> ZetaRational:
        return self.s2[j + 1]

    def prim_at(self, j: int) -> ZetaRational:
        if j == 0:
            raise ValidationError("order-0 primitive is logarithmic; use log fields")
        return self.prim[j + 1]

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "s1": [z.to_json() for z in self.s1],
            "s2": [z.to_json() for z in self.s2],
            "prim": [None if z is None else z.to_json() for z in self.prim],
            "f_over_f0": [z.to_json() for z in self.f],
            "log_multiplier": str(self.log_multiplier),
            "log_argument": self.log_argument.to_json(),
        }


def _denominator() -> ZetaRational:
    return ZetaRational(ZetaRational.denominator_poly())


def build_series(order: int) -> WkbSeriesTable:
    """Build the exact series table through eta^(-order)."""
    if order < 0:
        raise ValidationError("order must be >= 0")
    zeta = ZetaRational.zeta()
    s1 = [zeta]
    d1s1 = [zeta.derive("d1")]

    def S(j):
        return s1[j + 1]

    def dS(j):
        return d1s1[j + 1]

    # closed form for j = 0: -(1/2) d1 log(6 zeta^2 + x2)
    d = _denominator()
    s0 = d.derive("d1") * _div_by_denominator(ZetaRational.const(1), 1) * Fraction(-1, 2)
    s1.append(s0)
    d1s1.append(s0.derive("d1"))

    for j in range(1, order + 1):
        triple = ZetaRational.zero()
        for j1 in range(-1, j):
            for j2 in range(-1, j):
                j3 = j - 2 - j1 - j2
                if -1 <= j3 < j:
                    triple = triple + S(j1) * S(j2) * S(j3)
        pair = ZetaRational.zero()
        for j1 in range(-1, j):
            j2 = j - 2 - j1
            if -1 <= j2 < j:
                pair = pair + S(j1) * dS(j2)
        bracket = triple + pair * 3 + dS(j - 2).derive("d1")
        sj = _div_by_denominator(bracket * Fraction(-2), 1)
        s1.append(sj)
        d1s1.append(sj.derive("d1"))

    s2 = [zeta * zeta]
    for j in range(0, order + 1):
        acc = ZetaRational.zero()
        for m in range(0, j + 2):
            acc = acc + S(m - 1) * S(j - m)
        s2.append(acc + dS(j - 1))

    table = WkbSeriesTable(order=order, s1=s1, s2=s2, log_argument=d)
    primitives(table)
    wkb_f_coeffs(table)
    return table


def _div_by_denominator(z: ZetaRational, k: int) -> ZetaRational:
    return ZetaRational(z.num, z.denom_power + k, z.scalar)


def primitives(table: WkbSeriesTable) -> WkbSeriesTable:
    """Fill in the primitives of omega_j fixed by weighted homogeneity."""
    x1 = ZetaRational.x1()
    x2 = ZetaRational.x2()
    prim = []
    for j in range(-1, table.order + 1):
        if j == 0:
            prim.append(None)
            continue
        val = (x1 * table.s1_at(j) * 3 + x2 * table.s2_at(j) * 2) * Fraction(-1, 4 * j)
        prim.append(val)
    table.prim = prim
    return table


def varpi(table: WkbSeriesTable) -> ZetaRational:
    """Leading primitive (1/4)(3 x1 zeta + 2 x2 zeta^2); u = -varpi."""
    return table.prim_at(-1)


def wkb_f_coeffs(table: WkbSeriesTable, order: int | None = None) -> list[ZetaRational]:
    """Amplitude ratios f_j/f_0 from the exponential of the primitives.

    The series is exp( sum_{j>=1} eta^(-j) int omega_j ) expanded through
    eta^(-order); the prefactor f_0 stays closed-form.
    """
    n = table.order if order is None else order
    if n > table.order:
        raise ValidationError("order exceeds the table")
    a = [ZetaRational.zero()] + [table.prim_at(j) for j in range(1, n + 1)]
    out = [ZetaRational.const(1)] + [ZetaRational.zero()] * n
    power = [ZetaRational.const(1)] + [ZetaRational.zero()] * n
    fact = 1
    for m in range(1, n + 1):
        power = _trunc_mul(power, a, n)
        fact *= m
        inv = Fraction(1, fact)
        for k in range(n + 1):
            out[k] = out[k] + power[k] * inv
    if n == table.order:
        table.f = out
    return out


def _trunc_mul(p, q, n):
    out = [ZetaRational.zero()] * (n + 1)
    for i, pi_ in enumerate(p):
        if pi_.is_zero():
            continue
        for j_ in range(0, n + 1 - i):
            qj = q[j_]
            if qj.is_zero():
                continue
            out[i + j_] = out[i + j_] + pi_ * qj
    return out


def nonlinear_residual_orders(table: WkbSeriesTable) -> dict[int, ZetaRational]:
    """Coefficients of the first gradient equation after substituting the
    truncated series.

    The equation is 4 S^3 + 2 eta^2 x2 S + eta^3 x1 + 12 S d1 S + 4 d1^2 S
    with S the truncated S^(1).  Orders eta^(+3) .. eta^(-(N-2)) must vanish
    exactly; the returned dict maps order index J (coefficient of eta^(-J))
    to the computed coefficient for J = -3 .. N-2.
    """
    n = table.order
    x1 = ZetaRational.x1()
    x2 = ZetaRational.x2()
    s = {j: table.s1_at(j) for j in range(-1, n + 1)}
    ds = {j: v.derive("d1") for j, v in s.items()}
    dds = {j: v.derive("d1") for j, v in ds.items()}
    out = {}
    for J in range(-3, n - 1):
        acc = ZetaRational.zero()
        for j1 in s:
            for j2 in s:
                j3 = J - j1 - j2
                if j3 in s:
                    acc = acc + s[j1] * s[j2] * s[j3] * 4
        if J + 2 in s:
            acc = acc + x2 * s[J + 2] * 2
        if J == -3:
            acc = acc + x1
        for j1 in s:
            j2 = J - j1
            if j2 in ds:
                acc = acc + s[j1] * ds[j2] * 12
        if J in dds:
            acc = acc + dds[J] * 4
        out[J] = acc
    return out


# -- Borel coefficients -----------------------------------------------------------


@dataclass
class BorelCoeffTable:
    """Local expansion data of one Borel transform at its singularity.

    ``coeffs[j]`` multiplies (y - base)^(j - 1/2); entry 0 equals
    f_0 / sqrt(pi) on the continued branch.
    """

    ell: int
    x: PlanePoint
    base: complex
    coeffs: list[complex]

    def eval_series(self, y: complex, nmax: int | None = None) -> complex:
        """Partial sum at y with the principal branch of (y-base)^(-1/2)."""
        w = complex(y) - self.base
        root = 1.0 / np.sqrt(w)
        n = len(self.coeffs) if nmax is None else min(nmax + 1, len(self.coeffs))
        acc = 0j
        wp = 1.0 + 0j
        for j in range(n):
            acc += self.coeffs[j] * wp
            wp *= w
        return acc * root


def reference_f0(ell: int) -> complex:
    """Branch value of (6 zeta_ell^2 + x2)^(-1/2) at the reference point (1,0)."""
    return -(2.0 ** (1.0 / 6.0) / sqrt(3.0)) * np.exp(-2j * np.pi * ell / 3.0)


def f0_branch(x: PlanePoint, ell: int, provenance: Provenance | None = None) -> complex:
    """Continue f_0 = (6 zeta_ell^2 + x2)^(-1/2) along the labeling path."""
    if provenance is None:
        provenance = default_provenance(x)
    # accumulated phase of w = 6 zeta^2 + x2, seeded by the continuous
    # reference convention arg zeta_ell = pi + 2 pi ell / 3
    theta = 2.0 * (np.pi + 2.0 * np.pi * ell / 3.0)
    w_prev = None
    pts = [p.as_tuple() for p in provenance.path]
    ref = reference_zetas(complex(provenance.reference.x1).real)
    vals = ref
    for (a1, a2), (b1, b2) in zip(pts[:-1], pts[1:]):
        def coeffs_fn(t, a1=a1, a2=a2, b1=b1, b2=b2):
            return char_cubic_coeffs(PlanePoint(a1 + (b1 - a1) * t, a2 + (b2 - a2) * t))

        def point_fn(t, a1=a1, b1=b1):
            return a1 + (b1 - a1) * t

        trace = tracking.track_family(coeffs_fn, point_fn, vals)
        # walk the recorded steps, unwrapping the phase of w
        for tau, triple in zip(trace.taus, trace.values):
            x2_here = a2 + (b2 - a2) * tau
            w = 6.0 * triple[ell - 1] ** 2 + x2_here
            if w_prev is None:
                w_prev = w
                continue
            ratio = w / w_prev
            dtheta = np.angle(ratio)
            if abs(dtheta) > 2.5:
                raise ValidationError(
                    "phase step too large while continuing f0; refine the path"
                )
            theta += dtheta
            w_prev = w
        vals = trace.final
    if w_prev is None:  # degenerate single-point path
        w_prev = 6.0 * ref[ell - 1] ** 2 + 0.0
    return abs(w_prev) ** (-0.5) * np.exp(-0.5j * theta)


def borel_coeffs(
    x: PlanePoint,
    ell: int,
    order: int,
    table: WkbSeriesTable | None = None,
    provenance: Provenance | None = None,
) -> BorelCoeffTable:
    """Numeric expansion coefficients of one Borel transform at u_ell."""
    if ell not in (1, 2, 3):
        raise ValidationError("ell must be 1, 2 or 3")
    if table is None or table.order < order:
        table = build_series(order)
    if provenance is None:
        provenance = default_provenance(x)
    zr = char_roots(x, provenance)
    us = critical_values(x, provenance)
    z0 = zr[ell]
    x2 = complex(x.x2)
    f0 = f0_branch(x, ell, provenance)
    sqrt_pi = sqrt(pi)
    coeffs = []
    for j in range(order + 1):
        fj = table.f[j].eval(z0, x2)
        coeffs.append(fj * f0 / (sqrt_pi * float(gamma_half_ratio(j))))
    return BorelCoeffTable(ell=ell, x=x, base=us[ell], coeffs=coeffs)


def scaled_expansion(ell: int, order: int, table: WkbSeriesTable | None = None):
    """Expansion coefficients of the scaled Borel transform at s = p_ell.

    Returns c_0 .. c_order with the (s - p_ell)^(-1/2) prefactor taken out:
    the scaled transform at t = 0 is (s-p_ell)^(-1/2) sum_j c_j (s-p_ell)^j.
    """
    if table is None or table.order < order:
        table = build_series(order)
    z0 = reference_zetas(1.0)[ell - 1]
    f0 = reference_f0(ell)
    sqrt_pi = sqrt(pi)
    out = []
    for j in range(order + 1):
        fj = table.f[j].eval(z0, 0.0)
        out.append(fj * f0 / (sqrt_pi * float(gamma_half_ratio(j))))
    return out
