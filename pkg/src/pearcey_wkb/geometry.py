"""Characteristic roots, Borel singularities and derived loci.

The characteristic cubic of the system is

    4 zeta^3 + 2 x2 zeta + x1 = 0,

whose discriminant zero set T = {27 x1^2 + 8 x2^3 = 0} is the turning-point
locus.  Root labels ell = 1, 2, 3 are fixed by analytic continuation from
the reference locus {x2 = 0, x1 > 0}, where

    zeta_ell(x1, 0) = -(x1/4)^(1/3) e^(2 pi i ell / 3),
    u_ell(x1, 0)    =  p_ell x1^(4/3),   p_ell = (3/4^(4/3)) e^(2 pi i ell/3),

with principal real roots for x1 > 0.  Here u_ell = -(1/4)(3 x1 zeta_ell +
2 x2 zeta_ell^2) are the Borel-plane singularities (minus the critical
values of the phase).

Two derived polynomials are computed by exact elimination rather than
transcription, because their published displays fail quasi-homogeneity
checks (weights 3, 2, 4, 4 for x1, x2, y, F):

* ``singular_locus_cubic`` -- the cubic in y cutting out the Borel
  singularities, obtained as the z-discriminant of z^4 + x2 z^2 + x1 z + y.
* ``stokes_sextic`` -- the degree-6 polynomial in F whose roots at a fixed
  base point are the pairwise differences of critical values; obtained by
  eliminating both cubic roots from the defining relations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import tracking
from .aberth import roots_aberth
from .errors import TurningPointError, ValidationError
from .multipoly import MultiPoly, discriminant, resultant

TURNING_TOL = 1e-12
RESIDUAL_TOL = 1e-10

XYVARS = ("x1", "x2", "y")


@dataclass(frozen=True)
class PlanePoint:
    """Base-plane point (x1, x2)."""

    x1: complex
    x2: complex

    def __post_init__(self):
        if not (np.isfinite(complex(self.x1)) and np.isfinite(complex(self.x2))):
            raise ValidationError("plane point must be finite")

    def as_tuple(self) -> tuple[complex, complex]:
        return (complex(self.x1), complex(self.x2))


@dataclass(frozen=True)
class Provenance:
    """Reference point and continuation path that fix root labels."""

    path: tuple[PlanePoint, ...]
    description: str = ""

    @property
    def reference(self) -> PlanePoint:
        return self.path[0]

    @property
    def target(self) -> PlanePoint:
        return self.path[-1]


@dataclass(frozen=True)
class LabeledRoots3:
    """Three labeled roots (characteristic or Borel-singularity kind).

    ``values[i]`` carries label ell = i + 1.  ``kind`` is ``"zeta"`` for
    characteristic roots and ``"u"`` for Borel singularities.
    """

    values: tuple[complex, complex, complex]
    kind: str
    provenance: Provenance

    def __getitem__(self, ell: int) -> complex:
        if ell not in (1, 2, 3):
            raise ValidationError("label must be 1, 2 or 3")
        return self.values[ell - 1]


@dataclass(frozen=True)
class ScaledCoords:
    """Weighted-scaling chart (s, t) = (y / x1^(4/3), x2 / x1^(2/3))."""

    s: complex
    t: complex
    cube_root_branch: int = 0


def p_ell(ell: int) -> complex:
    """Scaled singularity position p_ell = (3/4^(4/3)) e^(2 pi i ell / 3)."""
    return 3.0 / 4.0 ** (4.0 / 3.0) * np.exp(2j * np.pi * ell / 3.0)


def char_cubic_coeffs(x: PlanePoint) -> np.ndarray:
    """Ascending coefficients of 4 zeta^3 + 2 x2 zeta + x1."""
    x1, x2 = x.as_tuple()
    return np.array([x1, 2 * x2, 0.0, 4.0], dtype=complex)


def turning_discriminant(x: PlanePoint, tol: float = TURNING_TOL):
    """Value of 27 x1^2 + 8 x2^3 and an on-locus flag."""
    x1, x2 = x.as_tuple()
    a = 27 * x1**2
    b = 8 * x2**3
    value = a + b
    on_set = abs(value) <= tol * max(abs(a), abs(b), 1.0)
    return value, on_set


def reference_zetas(x1) -> np.ndarray:
    """Exact labels on the reference locus x2 = 0, x1 > 0."""
    x1 = complex(x1)
    if x1.imag != 0 or x1.real <= 0:
        raise ValidationError("reference locus requires real x1 > 0")
    r = (x1.real / 4.0) ** (1.0 / 3.0)
    return np.array([-r * np.exp(2j * np.pi * ell / 3) for ell in (1, 2, 3)])


def default_provenance(x: PlanePoint, guard: float = 0.08) -> Provenance:
    """Deterministic labeling path from the reference point (1, 0).

    Coordinates move one at a time (x1 leg then x2 leg, or the reverse when
    the target x1 is small); any leg that approaches the turning locus is
    bowed by shifting its closest point in the +i direction of x1.  The leg
    order and the bow side are part of the labeling convention.
    """
    x1, x2 = x.as_tuple()
    if abs(x1) >= 0.1 * max(1.0, abs(x2) ** 1.5):
        raw = [(1.0 + 0j, 0j), (x1, 0j), (x1, x2)]
    else:
        raw = [(1.0 + 0j, 0j), (1.0 + 0j, x2), (x1, x2)]
    pts = [raw[0]]
    for a, b in zip(raw[:-1], raw[1:]):
        if a == b:
            continue
        pts.extend(_bow_leg(a, b, guard, depth=0))
    return Provenance(
        tuple(PlanePoint(*p) for p in pts),
        "reference (1,0); coordinate legs with +i bows around the turning locus",
    )


def _bow_leg(a, b, guard: float, depth: int) -> list:
    """Waypoints from a to b (exclusive of a) bowed off the turning locus."""
    ts = np.linspace(0.0, 1.0, 65)
    s1 = max(abs(a[0]), abs(b[0]))
    s2 = max(abs(a[1]), abs(b[1]))
    denom = max(27 * s1**2, 8 * s2**3, 1.0)
    worst = None
    for t in ts:
        p1 = a[0] + (b[0] - a[0]) * t
        p2 = a[1] + (b[1] - a[1]) * t
        v = 27 * p1**2 + 8 * p2**3
        rel = abs(v) / denom
        if worst is None or rel < worst[0]:
            worst = (rel, t)
    if worst[0] >= guard or depth >= 5:
        if worst[0] < 1e-4:
            raise ValidationError(
                "labeling path cannot avoid the turning locus; pass an explicit provenance"
            )
        return [b]
    t = min(max(worst[1], 0.15), 0.85)
    mid1 = a[0] + (b[0] - a[0]) * t
    mid2 = a[1] + (b[1] - a[1]) * t
    scale = max(1.0, abs(a[0]), abs(b[0]), abs(a[1]), abs(b[1]))
    mid = (mid1 + 0.4j * scale, mid2)
    return _bow_leg(a, mid, guard, depth + 1) + _bow_leg(mid, b, guard, depth + 1)


def _x_path_tracker(provenance: Provenance, start_vals, coeffs_of_point):
    """Track labeled roots along the two-coordinate polyline of a provenance."""
    trace = None
    vals = start_vals
    pts = [p.as_tuple() for p in provenance.path]
    if len(pts) < 2:
        trace = tracking.Trace()
        trace.record(0.0, pts[0][0], np.asarray(start_vals, dtype=complex))
        return trace
    for (a1, a2), (b1, b2) in zip(pts[:-1], pts[1:]):
        def point_fn(t, a1=a1, a2=a2, b1=b1, b2=b2):
            return a1 + (b1 - a1) * t  # diagnostic projection

        def coeffs_fn(t, a1=a1, a2=a2, b1=b1, b2=b2):
            xp = PlanePoint(a1 + (b1 - a1) * t, a2 + (b2 - a2) * t)
            return coeffs_of_point(xp)

        trace = tracking.track_family(coeffs_fn, point_fn, vals, trace=trace)
        vals = trace.final
    return trace


def char_roots(
    x: PlanePoint,
    provenance: Provenance | None = None,
    strict: bool = True,
) -> LabeledRoots3:
    """Labeled characteristic roots zeta_ell(x).

    In strict mode a point on the turning locus is rejected (labels are
    undefined there); merged-root mode (``strict=False``) returns the
    nearest-match labels for plotting purposes.
    """
    _, on_t = turning_discriminant(x)
    if on_t and strict:
        raise TurningPointError("turning point: labels undefined")
    if provenance is None:
        provenance = default_provenance(x)
    ref = provenance.reference
    if ref.x2 != 0 or not (complex(ref.x1).real > 0 and complex(ref.x1).imag == 0):
        raise ValidationError("provenance must start on the reference locus x2=0, x1>0")
    start = reference_zetas(complex(ref.x1).real)
    trace = _x_path_tracker(provenance, start, char_cubic_coeffs)
    vals = trace.final
    resid = [
        abs(np.polyval(char_cubic_coeffs(x)[::-1], z)) for z in vals
    ]
    scale = max(1.0, *(abs(v) for v in char_cubic_coeffs(x)))
    if max(resid) > RESIDUAL_TOL * scale * 10:
        raise TurningPointError("characteristic roots failed residual check")
    return LabeledRoots3(tuple(vals), "zeta", provenance)


def critical_values(
    x: PlanePoint,
    provenance: Provenance | None = None,
    strict: bool = True,
) -> LabeledRoots3:
    """Borel singularities u_ell = -(1/4)(3 x1 zeta_ell + 2 x2 zeta_ell^2)."""
    zr = char_roots(x, provenance, strict)
    x1, x2 = x.as_tuple()
    us = tuple(-(3 * x1 * z + 2 * x2 * z * z) / 4.0 for z in zr.values)
    coeffs = singular_cubic_coeffs(x)
    scale = max(1.0, max(abs(u) for u in us)) ** 3 * max(abs(c) for c in coeffs)
    for u in us:
        r = np.polyval(coeffs[::-1], u)
        if abs(r) > RESIDUAL_TOL * scale * 100:
            raise ValidationError(
                f"critical value {u} fails the singular-locus cubic (residual {abs(r):.2e})"
            )
    return LabeledRoots3(us, "u", zr.provenance)


# -- derived polynomials (cached, computed once) ----------------------------------

import threading

_CACHE: dict[str, MultiPoly] = {}
_CACHE_LOCK = threading.Lock()


def singular_locus_cubic() -> MultiPoly:
    """Cubic in y cutting out the Borel singularities over (x1, x2).

    Derived as the z-discriminant of z^4 + x2 z^2 + x1 z + y; the published
    display of this cubic is not used (two of its printed terms are
    inconsistent with quasi-homogeneity).
    """
    with _CACHE_LOCK:
        if "cubic" in _CACHE:
            return _CACHE["cubic"]
        zvars = ("z",) + XYVARS
        p = MultiPoly(
            zvars,
            {
                (4, 0, 0, 0): 1,
                (2, 0, 1, 0): 1,
                (1, 1, 0, 0): 1,
                (0, 0, 0, 1): 1,
            },
        )
        disc = discriminant(p, "z").drop_variable("z")
        _CACHE["cubic"] = disc
        return disc


def singular_cubic_coeffs(x: PlanePoint) -> np.ndarray:
    """Ascending numeric coefficients in y of the singular-locus cubic."""
    cubic = singular_locus_cubic()
    x1, x2 = x.as_tuple()
    out = []
    for c in cubic.as_univariate("y"):
        out.append(c.eval_numeric({"x1": x1, "x2": x2, "y": 0.0}))
    return np.array(out, dtype=complex)


def stokes_sextic() -> MultiPoly:
    """Degree-6 polynomial in F over (x1, x2) cutting out the Stokes set.

    Derived by eliminating both characteristic roots from

        4 zl^3 + 2 x2 zl + x1 = 0,
        4 zk^3 + 2 x2 zk + x1 = 0,
        F = (1/4)(zl - zk)(3 x1 + 2 x2 (zl + zk)),

    then removing the F^3 factor contributed by the diagonal zl = zk and any
    base-locus content.  The published sextic display is not used (its F^2
    term has the wrong weighted degree and its leading term is off by 2^12).
    """
    with _CACHE_LOCK:
        if "sextic" in _CACHE:
            return _CACHE["sextic"]
        evars = ("zl", "zk", "x1", "x2", "F")
        zl = MultiPoly.var(evars, "zl")
        zk = MultiPoly.var(evars, "zk")
        x1 = MultiPoly.var(evars, "x1")
        x2 = MultiPoly.var(evars, "x2")
        F = MultiPoly.var(evars, "F")
        pl = zl**3 * 4 + x2 * zl * 2 + x1
        pk = zk**3 * 4 + x2 * zk * 2 + x1
        q = (zl - zk) * (x1 * 3 + x2 * (zl + zk) * 2) * Fraction(1, 4) - F
        delta = resultant(pl, q, "zl")
        elim = resultant(pk, delta, "zk").drop_variable("zl").drop_variable("zk")
        # strip the diagonal contribution F^3 and any F-free content
        sextic = elim
        fvar = MultiPoly.var(("x1", "x2", "F"), "F")
        while sextic.degree("F") > 6 and fvar.divides(sextic):
            sextic = sextic.exact_divide(fvar)
        for cand in (
            MultiPoly.var(("x1", "x2", "F"), "x1"),
            MultiPoly.var(("x1", "x2", "F"), "x2"),
            MultiPoly(
                ("x1", "x2", "F"), {(2, 0, 0): 27, (0, 3, 0): 8}
            ),
        ):
            while cand.divides(sextic) and sextic.degree("F") == 6:
                quotient = sextic.exact_divide(cand)
                if quotient.degree("F") != 6:
                    break
                sextic = quotient
        sextic, _ = sextic.primitive()
        lead_f6 = sextic.terms.get((0, 0, 6), Fraction(0))
        if lead_f6 < 0:
            sextic = -sextic
        _CACHE["sextic"] = sextic
        return sextic


def stokes_sextic_coeffs(x: PlanePoint) -> np.ndarray:
    """Ascending numeric coefficients in F of the derived sextic at x."""
    sext = stokes_sextic()
    x1, x2 = x.as_tuple()
    out = []
    for c in sext.as_univariate("F"):
        out.append(c.eval_numeric({"x1": x1, "x2": x2, "F": 0.0}))
    return np.array(out, dtype=complex)


def stokes_sextic_roots(x: PlanePoint, tol: float = 1e-12) -> np.ndarray:
    roots, _ = roots_aberth(stokes_sextic_coeffs(x), tol=tol)
    return roots


# -- scaling chart ------------------------------------------------------------


def cube_root(x1: complex, branch: int = 0) -> complex:
    """Branch ``branch`` of x1^(1/3) (principal root times a cube root of 1)."""
    x1 = complex(x1)
    if x1 == 0:
        raise ValidationError("x1 must be nonzero for the scaling chart")
    r = abs(x1) ** (1.0 / 3.0) * np.exp(1j * np.angle(x1) / 3.0)
    return r * np.exp(2j * np.pi * (branch % 3) / 3.0)


def to_scaled(x: PlanePoint, y: complex, branch: int = 0) -> ScaledCoords:
    c = cube_root(x.x1, branch)
    return ScaledCoords(complex(y) / c**4, complex(x.x2) / c**2, branch % 3)


def from_scaled(coords: ScaledCoords, x1: complex) -> tuple[PlanePoint, complex]:
    c = cube_root(x1, coords.cube_root_branch)
    return PlanePoint(x1, coords.t * c**2), coords.s * c**4


def export_polynomials() -> dict:
    """JSON-ready export of the derived polynomials."""
    return {
        "singular_locus_cubic": singular_locus_cubic().to_json(),
        "stokes_sextic": stokes_sextic().to_json(),
    }
