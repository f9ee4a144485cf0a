"""The degree-4 algebraic function of the Borel plane.

The Laplace-form integrand g(x1, x2, y) = -1/(4z^3 + 2x2 z + x1), with z a
root of z^4 + x2 z^2 + x1 z + y = 0, satisfies the quartic

    A(x1,x2,y) g^4 + B(x1,x2,y) g^2 - 8 x1 g + 1 = 0,
    A = 4 x1^2 x2 (36y - x2^2) + 16 y (x2^2 - 4y)^2 - 27 x1^4,
    B = 2 (-8 x2 y + 2 x2^3 + 9 x1^2),

with zero cubic term (so the four branches sum to 0) and A equal to the
singular-locus cubic in y.  In scaled coordinates s = y/x1^(4/3),
t = x2/x1^(2/3) the function h = x1 g obeys

    (256 s^3 - 128 s^2 t^2 + 16 s t (t^3 + 9) - 4 t^3 - 27) h^4
        + (4 t^3 - 16 s t + 18) h^2 - 8 h + 1 = 0.

Branch labels come in two chart systems:

* origin chart: h1..h4 by the germs at (s, t) = (0, 0),
      h1 = 1/3 + (4/9) e^(-2 pi i/3) s + (2/9) e^(2 pi i/3) t + ...
      h2 = 1/3 + (4/9) e^(+2 pi i/3) s + (2/9) e^(-2 pi i/3) t + ...
      h3 = 1/3 + (4/9) s + (2/9) t + ...,   h4 = -1 - 2 s t - 4 s^3 + ...
* p_ell charts: at s = p_ell (t = 0) the two singular branches carry
      +- (2^(-5/6)/sqrt(3)) e^(-2 pi i ell/3) (p_ell - s)^(-1/2)
  and the two regular branches tend to (4 + i sqrt2)/18 and
  (4 - i sqrt2)/18.  The square root uses the cut along the negative real
  direction from p_ell with (p_ell - s)^(-1/2) = i kappa_ell
  (s - p_ell)^(-1/2), kappa = (-1, +1, +1), principal branch on the right.

Every Borel transform of a WKB solution is the sheet difference

    psi_ell_B = (i / sqrt(pi)) (-1)^(ell-1) (g_ell - g_4),

which this module evaluates, continues along paths, and differentiates
across cuts (discontinuity operators).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from . import tracking
from .errors import (
    ContinuationError,
    CutError,
    ValidationError,
)
from .geometry import (
    XYVARS,
    PlanePoint,
    Provenance,
    critical_values,
    cube_root,
    p_ell,
    singular_cubic_coeffs,
)
from .multipoly import MultiPoly

STVARS = ("s", "t")
T_VALIDITY = 0.2  # |x2 / x1^(2/3)| bound inside which chart results are validated
_GERM_TABLE = None  # lazily built low-order series table for anchor validation
SEED_SCALE = 0.02
RHO_REL = 0.18  # approach radius around a singularity, relative to min separation
THETA_LIFT = 2e-3  # cut-approach angle for one-sided limits (Richardson halves it)


# -- quartic data -----------------------------------------------------------------


def _xy_quartic_polys() -> list[MultiPoly]:
    """Exact coefficient polynomials [c0..c4] of the quartic in g."""
    x1 = MultiPoly.var(XYVARS, "x1")
    x2 = MultiPoly.var(XYVARS, "x2")
    y = MultiPoly.var(XYVARS, "y")
    A = (
        x1**2 * x2 * (y * 36 - x2**2) * 4
        + y * (x2**2 - y * 4) ** 2 * 16
        - x1**4 * 27
    )
    B = (x2 * y * -8 + x2**3 * 2 + x1**2 * 9) * 2
    one = MultiPoly.const(XYVARS, 1)
    return [one, x1 * -8, B, MultiPoly.zero(XYVARS), A]


def _st_quartic_polys() -> list[MultiPoly]:
    s = MultiPoly.var(STVARS, "s")
    t = MultiPoly.var(STVARS, "t")
    lead = (
        s**3 * 256
        - s**2 * t**2 * 128
        + s * t * (t**3 + 9) * 16
        - t**3 * 4
        - MultiPoly.const(STVARS, 27)
    )
    quad = t**3 * 4 - s * t * 16 + MultiPoly.const(STVARS, 18)
    one = MultiPoly.const(STVARS, 1)
    return [one, MultiPoly.const(STVARS, -8), quad, MultiPoly.zero(STVARS), lead]


@dataclass(frozen=True)
class QuarticSpec:
    """Quartic coefficient functions for one chart ('xy' or 'st')."""

    chart: str
    polys: tuple

    def coeffs(self, *point) -> np.ndarray:
        """Ascending numeric coefficients at a chart point."""
        if self.chart == "xy":
            x1, x2, y = (complex(v) for v in point)
            env = {"x1": x1, "x2": x2, "y": y}
        else:
            s, t = (complex(v) for v in point)
            env = {"s": s, "t": t}
        return np.array([p.eval_numeric(env) for p in self.polys], dtype=complex)


_XY_SPEC = None
_ST_SPEC = None


def quartic_spec(chart: str) -> QuarticSpec:
    global _XY_SPEC, _ST_SPEC
    if chart == "xy":
        if _XY_SPEC is None:
            _XY_SPEC = QuarticSpec("xy", tuple(_xy_quartic_polys()))
        return _XY_SPEC
    if chart == "st":
        if _ST_SPEC is None:
            _ST_SPEC = QuarticSpec("st", tuple(_st_quartic_polys()))
        return _ST_SPEC
    raise ValidationError("chart must be 'xy' or 'st'")


def quartic_at(chart: str, point) -> np.ndarray:
    """Numeric quartic coefficients (ascending) at a chart point.

    No normalization: a vanishing leading coefficient is reported as-is.
    """
    return quartic_spec(chart).coeffs(*point)


# -- branch tags and traces ----------------------------------------------------


@dataclass(frozen=True)
class BranchTag:
    """A germ label: origin chart index or (p_ell chart, index)."""

    chart_id: str  # 'origin' | 'p1' | 'p2' | 'p3'
    index: int  # 1..4

    def __post_init__(self):
        if self.chart_id not in ("origin", "p1", "p2", "p3"):
            raise ValidationError(f"unknown chart {self.chart_id}")
        if self.index not in (1, 2, 3, 4):
            raise ValidationError("branch index must be 1..4")

    def germ(self, s: complex, t: complex = 0.0) -> complex:
        """Leading germ approximant of the tagged branch at (s, t).

        Origin tags use the first-order origin expansions; p_ell tags use
        the local constants for the regular pair and the signed inverse
        square root for the singular pair (t is ignored there: the local
        germs are stated on the slice t = 0).
        """
        if self.chart_id == "origin":
            return complex(origin_germs(s, t)[self.index - 1])
        ell = int(self.chart_id[1])
        if self.index == 3:
            return H3_CONST
        if self.index == 4:
            return H4_CONST
        sign = 1.0 if self.index == 1 else -1.0
        return sign * singular_pair_scale(ell) * root_inv_p(ell, s)


@dataclass
class BranchTrace:
    """A tracked path of the four sheets with step diagnostics."""

    chart: str
    trace: tracking.Trace
    permutation: tuple[int, ...] | None = None

    @property
    def final(self) -> np.ndarray:
        return self.trace.final

    @property
    def min_separation(self) -> float:
        return self.trace.min_separation

    def to_csv(self) -> str:
        lines = ["step,tau,point_re,point_im," + ",".join(
            f"h{i}_re,h{i}_im" for i in range(1, 5)
        ) + ",min_sep"]
        for n, (tau, pt, vals) in enumerate(
            zip(self.trace.taus, self.trace.points, self.trace.values)
        ):
            sep = tracking._min_pairwise(np.asarray(vals))
            cells = [str(n), repr(tau), repr(pt.real), repr(pt.imag)]
            for v in vals:
                cells += [repr(v.real), repr(v.imag)]
            cells.append(repr(sep))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def cycle_notation(perm: tuple[int, ...]) -> str:
    """One-line cycle notation (1-based) of a sheet permutation."""
    seen = [False] * len(perm)
    out = []
    for i in range(len(perm)):
        if seen[i] or perm[i] == i:
            seen[i] = True
            continue
        cyc = [i]
        seen[i] = True
        j = perm[i]
        while j != i:
            cyc.append(j)
            seen[j] = True
            j = perm[j]
        out.append("(" + " ".join(str(k + 1) for k in cyc) + ")")
    return "".join(out) if out else "()"


# -- origin chart ---------------------------------------------------------------


def origin_germs(s: complex, t: complex) -> np.ndarray:
    """First-order origin-chart germ values [h1..h4]."""
    w = np.exp(2j * pi / 3)
    s = complex(s)
    t = complex(t)
    return np.array(
        [
            1 / 3 + 4 / 9 * s / w + 2 / 9 * t * w,
            1 / 3 + 4 / 9 * s * w + 2 / 9 * t / w,
            1 / 3 + 4 / 9 * s + 2 / 9 * t,
            -1 - 2 * s * t - 4 * s**3,
        ],
        dtype=complex,
    )


def _seed_point(s: complex, t: complex) -> tuple[complex, complex]:
    scale = max(abs(s), abs(t))
    if scale == 0:
        return 0j, 0j
    f = min(1.0, SEED_SCALE / scale)
    return s * f, t * f


def branches_at_origin(s: complex, t: complex) -> np.ndarray:
    """The four origin-labeled sheet values h1..h4 at (s, t).

    Labels are seeded with the first-order germs near (0, 0) and continued
    radially to the requested point; meeting the discriminant en route
    raises ``ContinuationError`` with the obstruction point.
    """
    s = complex(s)
    t = complex(t)
    if s == 0 and t == 0:
        return np.array([1 / 3, 1 / 3, 1 / 3, -1], dtype=complex)
    s0, t0 = _seed_point(s, t)
    spec = quartic_spec("st")
    if (s0, t0) == (s, t):
        vals = tracking.solve_and_match(
            spec.coeffs(s, t), origin_germs(s, t), guard_ratio=1.2
        )
        return vals
    seeded = tracking.solve_and_match(
        spec.coeffs(s0, t0), origin_germs(s0, t0), guard_ratio=1.2
    )
    trace = tracking.track_family(
        lambda tau: spec.coeffs(s0 + (s - s0) * tau, t0 + (t - t0) * tau),
        lambda tau: s0 + (s - s0) * tau,
        seeded,
    )
    return trace.final


# -- p_ell charts ----------------------------------------------------------------

KAPPA = {1: -1.0, 2: 1.0, 3: 1.0}
H3_CONST = (4 + 1j * sqrt(2)) / 18
H4_CONST = (4 - 1j * sqrt(2)) / 18


def singular_pair_scale(ell: int) -> complex:
    """Coefficient of (p_ell - s)^(-1/2) in the singular germ h1^(ell)."""
    return 2.0 ** (-5.0 / 6.0) / sqrt(3.0) * np.exp(-2j * pi * ell / 3)


def root_inv_p(ell: int, s: complex) -> complex:
    """(p_ell - s)^(-1/2) on the convention cut leftward from p_ell.

    Defined as i * kappa_ell * (s - p_ell)^(-1/2) with the principal square
    root on the right (upper-side boundary values on the cut).
    """
    z = complex(s) - p_ell(ell)
    if z.imag == 0.0:
        z = complex(z.real, 0.0)  # +0 imaginary part: upper-side convention
    return 1j * KAPPA[ell] / np.sqrt(z)


def branches_at_p(ell: int, s: complex, t: complex = 0.0) -> np.ndarray:
    """The four p_ell-chart sheet values [h1^(ell) .. h4^(ell)] at (s, t).

    At t = 0 labels follow the local germs (singular pair by the signed
    square-root germ, regular pair by the constants (4 +- i sqrt2)/18); for
    t != 0 the t = 0 labels are continued in t at fixed s.
    """
    if ell not in (1, 2, 3):
        raise ValidationError("ell must be 1, 2 or 3")
    s = complex(s)
    t = complex(t)
    pl = p_ell(ell)
    if abs(s - pl) < 1e-10:
        raise CutError(
            f"evaluation at the branch point p_{ell}; the local cut starts there"
        )
    spec = quartic_spec("st")
    coeffs = spec.coeffs(s, 0.0)
    from .aberth import roots_aberth

    roots, _ = roots_aberth(coeffs, tol=1e-13)
    order = np.argsort([min(abs(r - H3_CONST), abs(r - H4_CONST)) for r in roots])
    reg = [roots[order[0]], roots[order[1]]]
    sing = [roots[order[2]], roots[order[3]]]
    if abs(reg[0] - H3_CONST) + abs(reg[1] - H4_CONST) > abs(
        reg[0] - H4_CONST
    ) + abs(reg[1] - H3_CONST):
        reg = [reg[1], reg[0]]
    germ_diff = 2.0 * singular_pair_scale(ell) * root_inv_p(ell, s)
    if ((sing[0] - sing[1]) * np.conj(germ_diff)).real < 0:
        sing = [sing[1], sing[0]]
    vals = np.array([sing[0], sing[1], reg[0], reg[1]], dtype=complex)
    if t == 0:
        return vals
    trace = tracking.track_family(
        lambda tau: spec.coeffs(s, t * tau),
        lambda tau: t * tau,
        vals,
    )
    return trace.final


# -- path tracking -----------------------------------------------------------------


def track_s_with_bows(spec, t, vals, s_knots, s_stars, sep_s) -> np.ndarray:
    """Leg-by-leg tracking with detours around sheet-value crossings.

    Two sheets of the quartic can take the same value away from any branch
    point (distinct saddles sharing one value of g).  Such crossings stop
    nearest-match tracking but carry no monodromy, so a small bow around
    them leaves the continuation class unchanged.  The bow is only
    attempted when the obstruction is far from every true branch point
    (positions ``s_stars``, mutual scale ``sep_s``); otherwise the error
    propagates.
    """

    def leg(vals, a, b, depth):
        try:
            tr = tracking.track_family(
                lambda tau: spec.coeffs(a + (b - a) * tau, t),
                lambda tau: a + (b - a) * tau,
                vals,
            )
            return tr.final
        except ContinuationError as err:
            loc = err.location
            if depth >= 4 or loc is None:
                raise
            if min(abs(loc - s) for s in s_stars) < 0.12 * sep_s:
                raise
            perp = 1j * (b - a) / abs(b - a)
            mid = loc + perp * 0.05 * sep_s
            part = leg(vals, a, mid, depth + 1)
            return leg(part, mid, b, depth + 1)

    cur = np.asarray(vals, dtype=complex)
    for a, b in zip(s_knots[:-1], s_knots[1:]):
        if a == b:
            continue
        cur = leg(cur, complex(a), complex(b), 0)
    return cur


def track(start_vals, s_knots, t: complex = 0.0) -> BranchTrace:
    """Continue a labeled 4-tuple along a polyline in s at fixed t.

    The final permutation field is left unset; use
    ``BranchTrace.trace.permutation_from`` against target-chart germs.
    """
    spec = quartic_spec("st")
    tr = tracking.track_polyline(
        lambda s: spec.coeffs(s, t), s_knots, np.asarray(start_vals, dtype=complex)
    )
    return BranchTrace(chart="st", trace=tr)


def monodromy(ell: int, t: complex = 0.0, radius_rel: float = 0.25) -> tuple[int, ...]:
    """Sheet permutation (origin labels) around the branch point near p_ell.

    Tracks a small counterclockwise loop; the result maps starting label i
    (0-based) to the label its continuation matches on return.
    """
    center = _moved_branch_point(ell, t)
    radius = radius_rel * abs(center)
    chat = center / abs(center)
    base = center - radius * chat  # on the origin side of the ray: clear approach
    seed_pt = chat * SEED_SCALE
    start = branches_at_origin(seed_pt, t)
    spec = quartic_spec("st")
    s_stars = [_moved_branch_point(m, t) for m in (1, 2, 3)]
    sep_s = min(
        abs(a - b) for i, a in enumerate(s_stars) for b in s_stars[i + 1 :]
    )
    base_vals = track_s_with_bows(spec, t, start, [seed_pt, base], s_stars, sep_s)
    theta0 = float(np.angle(base - center))
    loop = tracking.circle_knots(center, radius, theta0, theta0 + 2 * pi, n=96)
    looped = track_s_with_bows(spec, t, base_vals, loop, s_stars, sep_s)
    perm = tracking.match_labels(looped, base_vals)
    return tuple(perm)


def _moved_branch_point(ell: int, t: complex) -> complex:
    """Branch point in s near p_ell for small |t| (exact cubic root)."""
    if t == 0:
        return p_ell(ell)
    # branch points solve the singular-locus cubic at x1 = 1, x2 = t
    coeffs = singular_cubic_coeffs(PlanePoint(1.0, complex(t)))
    from .aberth import roots_aberth

    roots, _ = roots_aberth(coeffs, tol=1e-13)
    targets = [p_ell(k) for k in (1, 2, 3)]
    perm = tracking.match_labels(targets, roots, guard_ratio=1.0 + 1e-9)
    return complex(roots[perm[ell - 1]])


# -- psi evaluation ---------------------------------------------------------------


@dataclass
class PsiValue:
    """Evaluation result with chart-validity flag and diagnostics."""

    value: complex
    chart_validated: bool
    sheets: np.ndarray | None = None


class SheetField:
    """Origin-labeled sheets of the quartic over the Borel plane of one x.

    Provides y-plane path continuation; all paths are converted to the
    scaled chart internally.  ``x1_quarter`` is x1^(4/3) on branch 0.

    Each Borel transform also has an *anchor*: the sheet tuple carried to
    the point u_ell + i r directly above its singularity, reached from the
    origin chart along the ray through u_ell and a short arc that stays on
    the principal side of the local square root.  On the standard slit
    plane (cuts from every u_k in the +real direction, local branch fixed
    by 0 <= arg(y - u_ell) < 2 pi) the transform's value equals its local
    series there, so continuing from the anchor realizes the standard
    branch.
    """

    def __init__(self, x: PlanePoint, provenance: Provenance | None = None):
        self.x = x
        self.c = cube_root(x.x1, 0)
        self.x1_quarter = self.c**4
        self.t = complex(x.x2) / self.c**2
        self.us = critical_values(x, provenance)
        self.u_vals = np.array(self.us.values, dtype=complex)
        self.min_sep = min(
            abs(a - b)
            for i, a in enumerate(self.u_vals)
            for b in self.u_vals[i + 1 :]
        )
        self.spec = quartic_spec("st")
        self._anchors: dict[int, tuple[complex, np.ndarray]] = {}
        self._anchor_swaps: dict[int, bool] = {}

    @property
    def chart_validated(self) -> bool:
        return abs(self.t) <= T_VALIDITY

    def s_of_y(self, y: complex) -> complex:
        return complex(y) / self.x1_quarter

    def seed(self, direction: complex) -> tuple[complex, np.ndarray]:
        d = direction / abs(direction) if direction != 0 else 1.0
        s0 = d * SEED_SCALE * min(1.0, abs(self.s_of_y(self.min_sep)))
        t = self.t
        vals = tracking.solve_and_match(
            self.spec.coeffs(s0, t), origin_germs(s0, t), guard_ratio=1.2
        )
        return s0, vals

    def track_y_polyline(self, y_knots) -> np.ndarray:
        """Sheet 4-tuple at the end of a y-plane polyline from the seed."""
        s_knots = [self.s_of_y(y) for y in y_knots]
        s0, vals = self.seed(s_knots[0])
        return self._track_s(vals, [s0] + list(s_knots))

    def track_from(self, vals, y_knots) -> np.ndarray:
        """Continue a known tuple along a y-polyline starting at its point."""
        return self._track_s(vals, [self.s_of_y(y) for y in y_knots])

    def _track_s(self, vals, s_knots) -> np.ndarray:
        s_stars = [u / self.x1_quarter for u in self.u_vals]
        sep_s = self.min_sep / abs(self.x1_quarter)
        return track_s_with_bows(self.spec, self.t, vals, s_knots, s_stars, sep_s)

    def anchor(self, ell: int, radius_rel: float = 0.3) -> tuple[complex, np.ndarray]:
        """Anchor point u_ell + i r and the sheet tuple carried there.

        The tuple is validated against the local series germ of the
        transform (whose branch is carried by the continuously tracked
        square-root prefactor): if the ray-arc arrival landed on the
        opposite side of the local square root, the singular sheet pair is
        swapped.  This keeps the anchor well-defined at configurations
        whose singularities have rotated far from the reference wedge.
        """
        if ell not in self._anchors:
            u = self.u_vals[ell - 1]
            r = radius_rel * self.min_sep
            dhat = u / abs(u)
            a_ray = u - r * dhat
            # angle of the ray arrival, upper-boundary convention
            # (exact-real arrivals count as +pi, never -pi)
            w = -dhat
            if abs(w.imag) <= 1e-12:
                if w.real >= 0:
                    raise ValidationError(
                        "anchor ray arrives along the cut of u_ell; labels degenerate"
                    )
                theta_ray = pi
            else:
                theta_ray = float(np.angle(w))
            arc = tracking.circle_knots(u, r, theta_ray, pi / 2)
            sheets = self.track_y_polyline([a_ray] + arc[1:])
            point = u + 1j * r
            got = self.psi_from_sheets(ell, sheets)
            ref = self._series_germ(ell, point)
            swapped = abs(got + ref) < abs(got - ref)
            if swapped:
                sheets = sheets.copy()
                sheets[ell - 1], sheets[3] = sheets[3], sheets[ell - 1]
                got = -got
            if abs(got - ref) > 0.2 * abs(ref):
                raise ValidationError(
                    f"anchor germ disagrees with the local series "
                    f"({abs(got - ref) / abs(ref):.2e} relative)"
                )
            self._anchors[ell] = (point, sheets)
            self._anchor_swaps[ell] = swapped
        return self._anchors[ell]

    def anchor_swap(self, ell: int) -> bool:
        """Whether the ray-arc arrival needed the singular-pair correction.

        The flag records a 2 pi difference between the representative arc
        and the continuation frame; segment-continuation paths built from
        the raw arcs pick up one sign per flagged endpoint.
        """
        self.anchor(ell)
        return self._anchor_swaps[ell]

    def _series_germ(self, ell: int, y: complex) -> complex:
        from .wkb_series import borel_coeffs, build_series

        global _GERM_TABLE
        if _GERM_TABLE is None:
            _GERM_TABLE = build_series(6)
        bct = borel_coeffs(self.x, ell, 6, table=_GERM_TABLE)
        return bct.eval_series(y)

    def psi_from_sheets(self, ell: int, sheets) -> complex:
        g_ell = sheets[ell - 1] / complex(self.x.x1)
        g4 = sheets[3] / complex(self.x.x1)
        return 1j / sqrt(pi) * (-1) ** (ell - 1) * (g_ell - g4)

    def psi_standard(self, ell: int, y_knots) -> complex:
        """Standard-branch value at the end of a cut-plane polyline.

        The polyline starts at the transform's anchor; the caller is
        responsible for keeping it inside the slit plane.
        """
        a, sheets = self.anchor(ell)
        final = self.track_from(sheets, [a] + list(y_knots))
        return self.psi_from_sheets(ell, final)


def psi_borel_eval(
    ell: int,
    x: PlanePoint,
    y: complex,
    path: list | None = None,
    allow_unvalidated: bool = False,
) -> PsiValue:
    """Evaluate the standard branch of one Borel transform at y.

    The default route runs from the transform's anchor above u_ell to y
    without crossing any of the three cuts; an explicit ``path`` (y-plane
    polyline from the anchor to y) overrides it.
    """
    field = SheetField(x)
    if not field.chart_validated and not allow_unvalidated:
        raise ValidationError(
            f"outside validated chart: |t| = {abs(field.t):.3f} > {T_VALIDITY}"
        )
    a, sheets0 = field.anchor(ell)
    if path is None:
        path = _slit_plane_route(field, a, complex(y))
    sheets = field.track_from(sheets0, [a] + list(path))
    return PsiValue(
        value=field.psi_from_sheets(ell, sheets),
        chart_validated=field.chart_validated,
        sheets=sheets,
    )


def _crosses_cut(a: complex, b: complex, u: complex) -> bool:
    """Does segment a->b cross the horizontal cut {u + sigma, sigma >= 0}?"""
    ai = (a - u).imag
    bi = (b - u).imag
    if ai == bi or ai * bi > 0:
        return False
    tau = ai / (ai - bi)
    re = (a - u).real + tau * ((b - u).real - (a - u).real)
    return re > -1e-14


def _slit_plane_route(field: SheetField, start: complex, y: complex) -> list[complex]:
    """Waypoints from ``start`` to y avoiding the three cuts."""
    us = field.u_vals
    if not any(_crosses_cut(start, y, u) for u in us):
        return [y]
    L = min(u.real for u in us) - field.min_sep
    w1 = complex(L, start.imag)
    w2 = complex(L, y.imag)
    for a, b in ((start, w1), (w1, w2), (w2, y)):
        if any(_crosses_cut(a, b, u) for u in us):
            raise ContinuationError(
                "could not build a cut-avoiding route; supply an explicit path",
                location=y,
            )
    return [w1, w2, y]


def _segment_point_distance(a: complex, b: complex, p: complex) -> float:
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return abs(p - a)
    tau = max(0.0, min(1.0, ((p - a) * d.conjugate()).real / L2))
    return abs(a + tau * d - p)


# -- discontinuities ----------------------------------------------------------------


@dataclass
class DiscontinuityResult:
    value: complex
    hypothesis_ok: bool
    details: str = ""


def discontinuity(
    kind: str,
    ell: int,
    k: int,
    x: PlanePoint,
    y: complex,
    rho_rel: float = RHO_REL,
) -> DiscontinuityResult:
    """Discontinuity of a continued Borel transform across the cut at u_k.

    ``plain``: jump at u_k of the transform labeled ell continued from its
    anchor germ along the segment u_ell -> u_k.  ``tilde``: same after the
    detour through the remaining singularity u_j (segment to u_j, branch
    swap there, segment to u_k).  ``y`` must lie on the cut {u_k + positive
    reals} with |y - u_k| below half the singularity separation; the jump
    f(y) - f(u_k + (y - u_k) e^(2 pi i)) is computed as a Richardson limit
    of one-sided circle approaches at radius |y - u_k|.
    """
    if kind not in ("plain", "tilde"):
        raise ValidationError("kind must be 'plain' or 'tilde'")
    if ell == k or ell not in (1, 2, 3) or k not in (1, 2, 3):
        raise ValidationError("need distinct ell, k in 1..3")
    field = SheetField(x)
    uk = field.u_vals[k - 1]
    ul = field.u_vals[ell - 1]
    sigma = complex(y) - uk
    if not (sigma.real > 0 and abs(sigma.imag) <= 1e-9 * abs(sigma)):
        raise ValidationError("y must lie on the cut from u_k in the +real direction")
    R = sigma.real
    if R > 0.45 * field.min_sep:
        raise ValidationError(
            "y too far from u_k: the jump circle would reach other singularities"
        )

    j = [m for m in (1, 2, 3) if m not in (ell, k)][0]
    mids = [] if kind == "plain" else [j]
    hypothesis_ok = True
    details = []
    if kind == "plain":
        d = _segment_point_distance(ul, uk, field.u_vals[j - 1])
        if d < rho_rel * field.min_sep:
            hypothesis_ok = False
            details.append(f"u_{j} within {d:.2e} of segment u_{ell}u_{k}")

    approach = _ray_chain(field, ell, mids, k, rho_rel)
    a, corrected = field.anchor(ell)
    # the chain is built from the raw representative arcs: undo the anchor
    # correction before transport, restore its sign afterwards
    sign = 1.0
    start = corrected
    if field.anchor_swap(ell):
        start = corrected.copy()
        start[ell - 1], start[3] = start[3], start[ell - 1]
        sign = -sign
    if field.anchor_swap(k):
        sign = -sign
    arrived = field.track_from(start, [a] + approach)
    anchor_k = approach[-1]

    def one_sided(theta: float, winding: bool) -> complex:
        # from u_k's anchor frame descend to the jump circle and sweep to
        # the requested side of the cut
        target = (2 * pi - theta) if winding else theta
        arc = tracking.circle_knots(uk, R, pi / 2, target, n=48)
        final = field.track_from(arrived, [anchor_k, uk + 1j * R] + arc[1:])
        return field.psi_from_sheets(ell, final)

    def delta(theta: float) -> complex:
        return one_sided(theta, False) - one_sided(theta, True)

    d1 = delta(THETA_LIFT)
    d2 = delta(THETA_LIFT / 2)
    value = sign * (2 * d2 - d1)
    return DiscontinuityResult(value, hypothesis_ok, "; ".join(details))


def psi_on_cut(field_or_x, k: int, y: complex) -> complex:
    """Standard on-cut value of one Borel transform at y = u_k + sigma.

    This is the jump of the fourth origin sheet across the cut divided by
    sqrt(pi)/i, the quantity the discontinuity identities are stated
    against; it equals the arg -> 2 pi (k = 1, 3) or arg -> 0 (k = 2)
    boundary value of the local series.
    """
    field = field_or_x if isinstance(field_or_x, SheetField) else SheetField(field_or_x)
    uk = field.u_vals[k - 1]
    sigma = complex(y) - uk
    if not (sigma.real > 0 and abs(sigma.imag) <= 1e-9 * abs(sigma)):
        raise ValidationError("y must lie on the cut from u_k in the +real direction")
    R = sigma.real
    a, sheets0 = field.anchor(k)

    def g4_side(theta: float, winding: bool) -> complex:
        target = (2 * pi - theta) if winding else theta
        arc = tracking.circle_knots(uk, R, pi / 2, target, n=48)
        final = field.track_from(sheets0, [a, uk + 1j * R] + arc[1:])
        return final[3] / complex(field.x.x1)

    def jump(theta: float) -> complex:
        return g4_side(theta, False) - g4_side(theta, True)

    d1 = jump(THETA_LIFT)
    d2 = jump(THETA_LIFT / 2)
    return 1j / sqrt(pi) * (2 * d2 - d1)


def _ray_angle(u: complex) -> float:
    """Continuous arrival angle at u along its own ray from the origin.

    Upper-boundary convention: an arrival along the exact negative real
    direction counts as +pi.
    """
    w = -u / abs(u)
    if abs(w.imag) <= 1e-12:
        if w.real >= 0:
            raise ValidationError("singularity sits on its own cut direction")
        return pi
    return float(np.angle(w))


def _ray_chain(
    field: SheetField, ell: int, mids: list[int], k: int, rho_rel: float
) -> list[complex]:
    """Polyline realizing the segment continuations u_ell -> (mids) -> u_k.

    Straight segments between the singularities are replaced by the
    homotopic route through the origin region (down one ray, across, up the
    next), because every chart germ is anchored on its ray approach.  Each
    intermediate singularity is encircled once counterclockwise (the
    square-root branch swap).  The polyline starts at u_ell's anchor point
    and ends at u_k's anchor point (angle pi/2, anchor radius).
    """
    u = field.u_vals
    r_a = 0.3 * field.min_sep
    r_low = 0.15 * min(abs(v) for v in u)
    chain = [ell] + mids + [k]
    pts: list[complex] = []

    def ray_point(idx: int, radius: float) -> complex:
        here = u[idx - 1]
        return here - radius * here / abs(here)

    # leave u_ell: reverse its anchor arc, then descend its ray
    first = u[ell - 1]
    pts.extend(tracking.circle_knots(first, r_a, pi / 2, _ray_angle(first), n=48))
    pts.append(r_low * first / abs(first))

    for n, idx in enumerate(chain[1:], start=1):
        here = u[idx - 1]
        th_ray = _ray_angle(here)
        # cross near the origin and ascend this ray to the anchor frame
        pts.append(r_low * here / abs(here))
        pts.append(ray_point(idx, r_a))
        pts.extend(tracking.circle_knots(here, r_a, th_ray, pi / 2, n=48)[1:])
        if n < len(chain) - 1:
            # branch swap: one full counterclockwise loop, then back down
            pts.extend(
                tracking.circle_knots(here, r_a, pi / 2, pi / 2 + 2 * pi, n=48)[1:]
            )
            pts.extend(tracking.circle_knots(here, r_a, pi / 2, th_ray, n=48)[1:])
            pts.append(r_low * here / abs(here))
    return pts


# -- holonomic-system residuals ---------------------------------------------------


@dataclass(frozen=True)
class BorelOperatorSpec:
    """One Borel-plane operator as coefficient/derivative-multi-index pairs.

    Multi-indices order the derivatives as (d/dx1, d/dx2, d/dy).
    """

    op_id: int
    table: tuple


def borel_operator(op_id: int) -> BorelOperatorSpec:
    x1 = MultiPoly.var(XYVARS, "x1")
    x2 = MultiPoly.var(XYVARS, "x2")
    y = MultiPoly.var(XYVARS, "y")
    c = lambda v: MultiPoly.const(XYVARS, v)
    tables = {
        1: ((c(4), (1, 1, 0)), (x2 * 2, (1, 0, 1)), (x1, (0, 0, 2))),
        2: (
            (c(4), (0, 2, 0)),
            (x1, (1, 0, 1)),
            (x2 * 2, (0, 1, 1)),
            (c(1), (0, 0, 1)),
        ),
        3: ((c(1), (0, 1, 1)), (c(-1), (2, 0, 0))),
        4: ((x1 * 3, (1, 0, 0)), (x2 * 2, (0, 1, 0)), (y * 4, (0, 0, 1)), (c(3), (0, 0, 0))),
    }
    if op_id not in tables:
        raise ValidationError("op_id must be 1..4")
    return BorelOperatorSpec(op_id, tables[op_id])


_QUARTIC_GVARS = ("x1", "x2", "y", "g")


def _quartic_in_g() -> MultiPoly:
    polys = _xy_quartic_polys()
    g = MultiPoly.var(_QUARTIC_GVARS, "g")
    acc = MultiPoly.zero(_QUARTIC_GVARS)
    for k, p in enumerate(polys):
        acc = acc + p.embed(_QUARTIC_GVARS) * g**k
    return acc


_F_CACHE: dict = {}


def implicit_jet(x: PlanePoint, y: complex, g: complex) -> dict:
    """First and second partials of the quartic branch through (x, y, g).

    Derivatives are exact implicit jets of the defining polynomial, not
    finite differences.  Keys are tuples of variable names, e.g. ("x1",),
    ("x1", "y"); the zeroth jet is under ().
    """
    if "F" not in _F_CACHE:
        F = _quartic_in_g()
        names = ("x1", "x2", "y", "g")
        _F_CACHE["F"] = F
        _F_CACHE["d1"] = {v: F.derivative(v) for v in names}
        _F_CACHE["d2"] = {
            (v, w): _F_CACHE["d1"][v].derivative(w)
            for v in names
            for w in names
        }
    env = {"x1": complex(x.x1), "x2": complex(x.x2), "y": complex(y), "g": complex(g)}
    F = _F_CACHE["F"]
    Fval = F.eval_numeric(env)
    scale = sum(abs(complex(c)) for c in F.terms.values()) or 1.0
    if abs(Fval) > 1e-7 * scale * max(1.0, abs(g)) ** 4:
        raise ValidationError(f"g does not satisfy the quartic (residual {abs(Fval):.2e})")
    d1 = {v: _F_CACHE["d1"][v].eval_numeric(env) for v in ("x1", "x2", "y", "g")}
    if abs(d1["g"]) < 1e-12 * scale:
        raise ValidationError("singular-locus proximity: dF/dg ~ 0")
    jets = {(): complex(g)}
    base = ("x1", "x2", "y")
    for v in base:
        jets[(v,)] = -d1[v] / d1["g"]
    d2 = _F_CACHE["d2"]
    for i, v in enumerate(base):
        for w in base[i:]:
            val = (
                d2[(v, w)].eval_numeric(env)
                + d2[(v, "g")].eval_numeric(env) * jets[(w,)]
                + d2[(w, "g")].eval_numeric(env) * jets[(v,)]
                + d2[("g", "g")].eval_numeric(env) * jets[(v,)] * jets[(w,)]
            )
            jets[(v, w)] = -val / d1["g"]
            jets[(w, v)] = jets[(v, w)]
    return jets


def _derivative_from_jets(jets: dict, multi: tuple[int, int, int]) -> complex:
    names = []
    for name, count in zip(("x1", "x2", "y"), multi):
        names.extend([name] * count)
    if len(names) > 2:
        raise ValidationError("jets available through order 2 only")
    return jets[tuple(names)] if names else jets[()]


def verify_annihilation(
    op_id: int,
    x: PlanePoint,
    y: complex,
    branch: int = 4,
    h: float | None = None,
    g_value: complex | None = None,
) -> float:
    """Scaled residual of one Borel-plane operator applied to a quartic branch.

    ``branch`` picks the origin-chart label used when ``g_value`` is not
    supplied.  The optional step ``h`` switches the derivatives to central
    finite differences (diagnostic cross-check); the default path uses the
    exact implicit jets.
    """
    field = SheetField(x)
    if g_value is None:
        sheets = field.track_y_polyline([complex(y)])
        g_value = sheets[branch - 1] / complex(x.x1)
    op = borel_operator(op_id)
    env = {"x1": complex(x.x1), "x2": complex(x.x2), "y": complex(y)}
    if h is None:
        jets = implicit_jet(x, y, g_value)
        get = lambda multi: _derivative_from_jets(jets, multi)
    else:
        get = _fd_derivative_factory(x, y, g_value, h)
    acc = 0j
    scale = 0.0
    for coeff, multi in op.table:
        c = coeff.eval_numeric(env)
        term = c * get(multi)
        acc += term
        scale += abs(term)
    return abs(acc) / max(scale, 1e-30)


def _fd_derivative_factory(x: PlanePoint, y: complex, g0: complex, h: float):
    """Central finite differences of the branch through g0 (diagnostics)."""

    def branch_value(dx1: float, dx2: float, dy: float) -> complex:
        env_x = PlanePoint(complex(x.x1) + dx1, complex(x.x2) + dx2)
        coeffs = quartic_at("xy", (env_x.x1, env_x.x2, complex(y) + dy))
        z = complex(g0)
        from .tracking import _newton_polish

        return _newton_polish(coeffs, z)

    def get(multi):
        steps = [h, h, h]
        axes = [i for i, m in enumerate(multi) for _ in range(m)]
        if len(axes) == 0:
            return g0
        if len(axes) == 1:
            d = [0.0, 0.0, 0.0]
            d[axes[0]] = steps[axes[0]]
            return (branch_value(*d) - branch_value(*[-v for v in d])) / (
                2 * steps[axes[0]]
            )
        i, j = axes
        di = [0.0, 0.0, 0.0]
        dj = [0.0, 0.0, 0.0]
        di[i] = h
        dj[j] = h
        if i == j:
            return (
                branch_value(*di) - 2 * branch_value(0, 0, 0) + branch_value(*[-v for v in di])
            ) / h**2
        pp = branch_value(di[0] + dj[0], di[1] + dj[1], di[2] + dj[2])
        pm = branch_value(di[0] - dj[0], di[1] - dj[1], di[2] - dj[2])
        mp = branch_value(-di[0] + dj[0], -di[1] + dj[1], -di[2] + dj[2])
        mm = branch_value(-di[0] - dj[0], -di[1] - dj[1], -di[2] - dj[2])
        return (pp - pm - mp + mm) / (4 * h**2)

    return get
