"""Stokes sets, singularity trajectories, and connection matrices.

The Stokes set is the locus where Im(u_j - u_k) = 0 for some pair of Borel
singularities.  Along a path in the base plane this module tracks labeled
singularities (re-solving their cubic at every step, no integration),
detects two kinds of events

* ``stokes_crossing``: a zero of Im(u_j - u_k), located by bisection;
* ``segment_crossing``: the third singularity passes through the open
  segment joining a pair (collinearity with interior projection),

and emits one connection matrix per Stokes crossing.  The matrix acts on
the column (Psi_1, Psi_2, Psi_3) of Borel sums, expressing the sums of the
earlier region through those of the later region:

    Psi_d(before) = Psi_d(after) + (-1)^d Psi_r(after),

where d is the dominant label at the crossing (larger Re of the leading
exponent, i.e. smaller Re u) and r the recessive one.  A crossing whose
pair has odd accumulated segment-crossing parity produces the identity
matrix (no Stokes phenomenon): the detour continuation relevant there has
vanishing discontinuity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tracking
from .aberth import roots_aberth
from .errors import (
    DominanceError,
    LabelMatchError,
    PearceyError,
    ValidationError,
)
from .geometry import (
    PlanePoint,
    Provenance,
    critical_values,
    singular_cubic_coeffs,
    stokes_sextic_coeffs,
)

PAIRS = ((1, 2), (1, 3), (2, 3))
BISECTION_TOL = 1e-10


def stokes_indicator(x: PlanePoint, provenance: Provenance | None = None):
    """The three reals Im(u_j - u_k) for pairs (1,2), (1,3), (2,3)."""
    us = critical_values(x, provenance)
    return tuple(float((us[j] - us[k]).imag) for j, k in PAIRS)


# -- trajectories -----------------------------------------------------------------


@dataclass
class UTrajectories:
    """Labeled Borel-singularity tracks along a base-plane path."""

    path: list[complex]  # x1 values of flattened polyline samples
    taus: list[float]  # global parameter in [0, 1]
    points: list[tuple[complex, complex]]  # (x1, x2) samples
    values: list[np.ndarray]  # three labeled u's per sample

    def at(self, tau: float) -> np.ndarray:
        """Nearest recorded sample at or before tau."""
        idx = int(np.searchsorted(self.taus, tau, side="right")) - 1
        return self.values[max(idx, 0)]


def _u_cubic_coeffs(x1: complex, x2: complex) -> np.ndarray:
    return singular_cubic_coeffs(PlanePoint(x1, x2))


def track_u(
    x_path: list[PlanePoint | tuple],
    provenance: Provenance | None = None,
) -> UTrajectories:
    """Track the labeled u's along a polyline of base points.

    Each accepted step re-solves the singularity cubic and matches labels
    (no numerical integration).  A path passing too near the turning locus
    stops with a ``ContinuationError`` carrying the obstruction point.
    """
    pts = [p.as_tuple() if isinstance(p, PlanePoint) else (complex(p[0]), complex(p[1])) for p in x_path]
    if len(pts) < 2:
        raise ValidationError("path needs at least 2 vertices")
    start = critical_values(PlanePoint(*pts[0]), provenance)
    vals = np.array(start.values, dtype=complex)
    out = UTrajectories([], [], [], [])
    nseg = len(pts) - 1
    for i, ((a1, a2), (b1, b2)) in enumerate(zip(pts[:-1], pts[1:])):
        def coeffs_fn(t, a1=a1, a2=a2, b1=b1, b2=b2):
            return _u_cubic_coeffs(a1 + (b1 - a1) * t, a2 + (b2 - a2) * t)

        def point_fn(t, a1=a1, b1=b1):
            return a1 + (b1 - a1) * t

        trace = tracking.track_family(coeffs_fn, point_fn, vals)
        vals = trace.final
        for tau, tvals in zip(trace.taus, trace.values):
            g = (i + tau) / nseg
            if out.taus and g <= out.taus[-1]:
                continue
            out.taus.append(g)
            out.points.append((a1 + (b1 - a1) * tau, a2 + (b2 - a2) * tau))
            out.path.append(a1 + (b1 - a1) * tau)
            out.values.append(tvals)
    return out


def _x_at(pts, tau: float) -> tuple[complex, complex]:
    nseg = len(pts) - 1
    s = min(int(tau * nseg), nseg - 1)
    local = tau * nseg - s
    (a1, a2), (b1, b2) = pts[s], pts[s + 1]
    return (a1 + (b1 - a1) * local, a2 + (b2 - a2) * local)


def _u_at(pts, tau: float, near_vals: np.ndarray) -> np.ndarray:
    x1, x2 = _x_at(pts, tau)
    roots, _ = roots_aberth(_u_cubic_coeffs(x1, x2), tol=1e-13)
    perm = tracking.match_labels(near_vals, roots, guard_ratio=1.0 + 1e-12)
    return np.array([roots[p] for p in perm])


# -- events ---------------------------------------------------------------------


@dataclass
class StokesEvent:
    """One event along a tracked path.

    ``kind`` is 'stokes_crossing' (Im(u_j - u_k) = 0 for ``pair``) or
    'segment_crossing' (label ``crosser`` passes the open segment of
    ``pair``).  For Stokes crossings ``dominant`` holds the label with the
    larger Re of the leading exponent and ``im_before`` the sign of the
    indicator just before the event.
    """

    kind: str
    tau: float
    x: tuple[complex, complex]
    pair: tuple[int, int]
    crosser: int | None = None
    dominant: int | None = None
    recessive: int | None = None
    im_before: int | None = None

    def to_json(self) -> dict:
        d = {
            "kind": self.kind,
            "tau": self.tau,
            "x1": [self.x[0].real, self.x[0].imag],
            "x2": [self.x[1].real, self.x[1].imag],
            "pair": list(self.pair),
        }
        if self.kind == "segment_crossing":
            d["crosser"] = self.crosser
        else:
            d["dominant"] = self.dominant
            d["recessive"] = self.recessive
            d["im_before"] = self.im_before
        return d


def _indicator(vals: np.ndarray, pair) -> float:
    j, k = pair
    return float((vals[j - 1] - vals[k - 1]).imag)


def _segment_signature(vals: np.ndarray, pair, crosser) -> tuple[float, float]:
    """(signed area, interior projection) of the crosser vs the segment."""
    j, k = pair
    a = vals[j - 1]
    b = vals[k - 1]
    c = vals[crosser - 1]
    d = b - a
    L2 = abs(d) ** 2
    cross = ((c - a) * np.conj(d)).imag
    lam = ((c - a) * np.conj(d)).real / L2 if L2 > 0 else -1.0
    return float(cross), float(lam)


def detect_events(
    x_path: list,
    provenance: Provenance | None = None,
    tol: float = BISECTION_TOL,
) -> tuple[UTrajectories, list[StokesEvent]]:
    """Locate all Stokes and segment crossings along a path, in order."""
    traj = track_u(x_path, provenance)
    pts = [p.as_tuple() if isinstance(p, PlanePoint) else (complex(p[0]), complex(p[1])) for p in x_path]
    events: list[StokesEvent] = []

    for pair in PAIRS:
        series = [_indicator(v, pair) for v in traj.values]
        for n in range(1, len(series)):
            if series[n - 1] == 0.0:
                continue
            if series[n - 1] * series[n] < 0:
                lo, hi = traj.taus[n - 1], traj.taus[n]
                vals = traj.values[n - 1]
                f_lo = series[n - 1]
                while hi - lo > tol:
                    mid = (lo + hi) / 2
                    vmid = _u_at(pts, mid, vals)
                    f_mid = _indicator(vmid, pair)
                    if f_lo * f_mid <= 0:
                        hi = mid
                    else:
                        lo, f_lo, vals = mid, f_mid, vmid
                tau_c = (lo + hi) / 2
                v_c = _u_at(pts, tau_c, vals)
                j, k = pair
                re_uj = v_c[j - 1].real
                re_uk = v_c[k - 1].real
                gap = abs(re_uj - re_uk)
                scale = max(abs(v) for v in v_c)
                if gap < 1e-9 * scale:
                    raise DominanceError(
                        f"dominance undecidable for pair {pair} at tau={tau_c}"
                    )
                dom, rec = (j, k) if re_uj < re_uk else (k, j)
                events.append(
                    StokesEvent(
                        "stokes_crossing",
                        tau_c,
                        _x_at(pts, tau_c),
                        pair,
                        dominant=dom,
                        recessive=rec,
                        im_before=int(np.sign(series[n - 1])),
                    )
                )

        crosser = next(m for m in (1, 2, 3) if m not in pair)
        sig = [_segment_signature(v, pair, crosser) for v in traj.values]
        for n in range(1, len(sig)):
            c0, l0 = sig[n - 1]
            c1, l1 = sig[n]
            if c0 == 0.0 or c0 * c1 >= 0:
                continue
            lo, hi = traj.taus[n - 1], traj.taus[n]
            vals = traj.values[n - 1]
            f_lo = c0
            while hi - lo > tol:
                mid = (lo + hi) / 2
                vmid = _u_at(pts, mid, vals)
                f_mid, _ = _segment_signature(vmid, pair, crosser)
                if f_lo * f_mid <= 0:
                    hi = mid
                else:
                    lo, f_lo, vals = mid, f_mid, vmid
            tau_c = (lo + hi) / 2
            v_c = _u_at(pts, tau_c, vals)
            _, lam = _segment_signature(v_c, pair, crosser)
            if 0.0 < lam < 1.0:
                events.append(
                    StokesEvent(
                        "segment_crossing",
                        tau_c,
                        _x_at(pts, tau_c),
                        pair,
                        crosser=crosser,
                    )
                )

    events.sort(key=lambda e: e.tau)
    return traj, events


# -- connection matrices ------------------------------------------------------------


@dataclass(frozen=True)
class ConnectionMatrix:
    """Integer matrix C with Psi(before) = C Psi(after) across a crossing."""

    entries: tuple  # 3x3 nested tuples of ints

    def __post_init__(self):
        m = np.array(self.entries, dtype=int)
        if m.shape != (3, 3):
            raise ValidationError("connection matrix must be 3x3")
        if round(float(np.linalg.det(m))) != 1:
            raise ValidationError("connection matrix must have determinant 1")
        off = m - np.eye(3, dtype=int)
        if np.count_nonzero(off) > 1:
            raise ValidationError("connection matrix must be an elementary transvection")

    @classmethod
    def identity(cls) -> "ConnectionMatrix":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    @classmethod
    def transvection(cls, dominant: int, recessive: int, sign: int) -> "ConnectionMatrix":
        m = np.eye(3, dtype=int)
        m[dominant - 1, recessive - 1] = sign
        return cls(tuple(tuple(int(v) for v in row) for row in m))

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=int)

    def to_json(self) -> list:
        return [list(r) for r in self.entries]


def connection_walk(
    x_path: list,
    provenance: Provenance | None = None,
) -> list[tuple[StokesEvent, ConnectionMatrix]]:
    """Connection matrices for every Stokes crossing along a path.

    Segment-crossing parity per pair toggles between the plain jump formula
    (elementary transvection with entry (-1)^dominant) and the vanished
    detour formula (identity matrix).
    """
    _, events = detect_events(x_path, provenance)
    parity = {pair: 0 for pair in PAIRS}
    out = []
    for ev in events:
        if ev.kind == "segment_crossing":
            parity[ev.pair] ^= 1
            continue
        if parity[ev.pair] % 2 == 1:
            out.append((ev, ConnectionMatrix.identity()))
        else:
            sign = -1 if ev.dominant % 2 else 1
            out.append((ev, ConnectionMatrix.transvection(ev.dominant, ev.recessive, sign)))
    return out


PAPER_POLYLINE = [
    (0.15, 0.0),
    (0.15, 0.32),
    (0.15, 0.5),
    (0.15, 0.5 + 0.25j),
    (0.15, 0.5 + 0.5j),
    (0.15 + 0.25j, 0.5 + 0.5j),
    (0.15 + 0.37j, 0.5 + 0.5j),
    (0.15 + 0.45j, 0.5 + 0.5j),
    (0.15 + 0.56j, 0.5 + 0.5j),
    (0.15 + 0.69j, 0.5 + 0.5j),
    (0.22 + 0.69j, 0.5 + 0.5j),
    (0.28 + 0.69j, 0.5 + 0.5j),
    (0.45 + 0.69j, 0.5 + 0.5j),
]
"""Named path 'paper-polyline': the thirteen-vertex continuation path whose
five Stokes crossings generate the six-region connection system."""


# -- raster sections ---------------------------------------------------------------


@dataclass
class RasterSection:
    """Signs of the three Stokes indicators over an x1 grid at fixed x2."""

    x2: complex
    window: tuple[float, float, float, float]
    resolution: int
    signs: np.ndarray  # (3, res, res) int8
    near_turning: np.ndarray  # (res, res) bool
    polylines: dict  # pair -> list of polylines [(x1 complex, ...), ...]
    sextic_sign: np.ndarray | None = None
    turning_points: tuple = ()

    def to_csv(self) -> str:
        res = self.resolution
        lines = ["i,j,x1_re,x1_im,sign_12,sign_13,sign_23,near_turning"]
        re0, re1, im0, im1 = self.window
        res_re = np.linspace(re0, re1, res)
        res_im = np.linspace(im0, im1, res)
        for i in range(res):
            for j in range(res):
                lines.append(
                    ",".join(
                        [
                            str(i),
                            str(j),
                            repr(res_re[j]),
                            repr(res_im[i]),
                            str(int(self.signs[0, i, j])),
                            str(int(self.signs[1, i, j])),
                            str(int(self.signs[2, i, j])),
                            str(int(self.near_turning[i, j])),
                        ]
                    )
                )
        return "\n".join(lines) + "\n"


def raster_section(
    x2: complex,
    window: tuple[float, float, float, float],
    resolution: int,
    with_sextic: bool = False,
    near_tol: float = 0.04,
) -> RasterSection:
    """Sample the Stokes indicators on an x1 grid at fixed x2.

    Labels continue row by row (left to right, rows bottom to top); cells
    too close to the turning locus are flagged and their labels are
    best-effort (merged-root mode).  Zero-crossing polylines per pair come
    from sign changes between adjacent cells.
    """
    if resolution < 16:
        raise ValidationError("resolution must be at least 16")
    re0, re1, im0, im1 = (float(v) for v in window)
    xs = np.linspace(re0, re1, resolution)
    ys = np.linspace(im0, im1, resolution)
    signs = np.zeros((3, resolution, resolution), dtype=np.int8)
    near = np.zeros((resolution, resolution), dtype=bool)
    sext = _sextic_layer(x2, xs, ys) if with_sextic else None
    values = np.zeros((resolution, resolution, 3), dtype=complex)

    prev_row_first: np.ndarray | None = None
    for i, yim in enumerate(ys):
        prev: np.ndarray | None = None
        for j, xre in enumerate(xs):
            x1 = complex(xre, yim)
            coeffs = _u_cubic_coeffs(x1, x2)
            roots, _ = roots_aberth(coeffs, tol=1e-12)
            ref = prev if prev is not None else prev_row_first
            if ref is None:
                try:
                    ordered = np.array(critical_values(PlanePoint(x1, x2)).values)
                except PearceyError:
                    ordered = np.array(sorted(roots, key=lambda z: (z.real, z.imag)))
                    near[i, j] = True
            else:
                try:
                    perm = tracking.match_labels(ref, roots, guard_ratio=1.0 + 1e-12)
                    ordered = np.array([roots[p] for p in perm])
                except LabelMatchError:
                    ordered = np.array(sorted(roots, key=lambda z: (z.real, z.imag)))
                    near[i, j] = True
            sep = min(
                abs(ordered[0] - ordered[1]),
                abs(ordered[0] - ordered[2]),
                abs(ordered[1] - ordered[2]),
            )
            if sep < near_tol * max(1e-12, max(abs(v) for v in ordered)):
                near[i, j] = True
            values[i, j] = ordered
            for p, pair in enumerate(PAIRS):
                signs[p, i, j] = int(np.sign(_indicator(ordered, pair))) or 1
            if j == 0:
                prev_row_first = ordered
            prev = ordered

    union, per_pair = _edge_zero_points(values, near, xs, ys)
    tps = _turning_points_in_window(x2, window)
    return RasterSection(
        x2=complex(x2),
        window=(re0, re1, im0, im1),
        resolution=resolution,
        signs=signs,
        near_turning=near,
        polylines={"union": union, **{PAIRS[p]: per_pair[p] for p in range(3)}},
        sextic_sign=sext,
        turning_points=tps,
    )


def _edge_zero_points(values: np.ndarray, near: np.ndarray, xs, ys):
    """Zero-crossing midpoints with edge-local root matching.

    Matching roots only across single cell edges sidesteps the global
    labeling obstruction (monodromy around in-window turning points), so no
    spurious seam crossings appear.  Per-pair attribution uses the stored
    grid labels of the first cell and is best-effort near the turning set.
    """
    n = values.shape[0]
    union: list[complex] = []
    per_pair: list[list[complex]] = [[], [], []]

    def handle_edge(ia, ja, ib, jb, midpoint):
        if near[ia, ja] or near[ib, jb]:
            return
        va = values[ia, ja]
        vb = values[ib, jb]
        try:
            perm = tracking.match_labels(va, vb, guard_ratio=1.0 + 1e-12)
        except LabelMatchError:
            return
        hit = False
        for p, (j, k) in enumerate(PAIRS):
            sa = (va[j - 1] - va[k - 1]).imag
            sb = (vb[perm[j - 1]] - vb[perm[k - 1]]).imag
            if sa == 0.0 or sa * sb < 0:
                per_pair[p].append(midpoint)
                hit = True
        if hit:
            union.append(midpoint)

    for i in range(n):
        for j in range(n - 1):
            handle_edge(i, j, i, j + 1, complex((xs[j] + xs[j + 1]) / 2, ys[i]))
    for i in range(n - 1):
        for j in range(n):
            handle_edge(i, j, i + 1, j, complex(xs[j], (ys[i] + ys[i + 1]) / 2))
    return union, per_pair


def _sextic_layer(x2: complex, xs, ys) -> np.ndarray:
    """min |Im F| over the derived sextic roots, per grid cell.

    Cells are independent (no label continuation), so rows evaluate on a
    thread pool capped by the PEARCEY_THREADS environment variable.
    """
    from concurrent.futures import ThreadPoolExecutor

    from .cli import worker_count

    out = np.zeros((len(ys), len(xs)))

    def row(i):
        yim = ys[i]
        for j, xre in enumerate(xs):
            froots, _ = roots_aberth(
                stokes_sextic_coeffs(PlanePoint(complex(xre, yim), x2)), tol=1e-10
            )
            out[i, j] = min(abs(f.imag) for f in froots)

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(row, range(len(ys))))
    else:
        for i in range(len(ys)):
            row(i)
    return out


def _turning_points_in_window(x2: complex, window) -> tuple:
    """Roots of the turning discriminant in x1 for fixed x2, inside window."""
    x2 = complex(x2)
    disc = -8.0 * x2**3 / 27.0
    r = np.sqrt(complex(disc))
    out = []
    re0, re1, im0, im1 = window
    for cand in (r, -r):
        if re0 <= cand.real <= re1 and im0 <= cand.imag <= im1:
            if not any(abs(cand - o) < 1e-14 for o in out):
                out.append(cand)
    return tuple(out)
