import numpy as np
import pytest

from pearcey_wkb.errors import TurningPointError, ValidationError
from pearcey_wkb.geometry import PlanePoint
from pearcey_wkb.stokes import (
    PAPER_POLYLINE,
    ConnectionMatrix,
    connection_walk,
    detect_events,
    raster_section,
    stokes_indicator,
    track_u,
)

SYSTEMS = [
    ((2, 3), ((1, 0, 0), (0, 1, 0), (0, -1, 1))),
    ((1, 2), ((1, 0, 0), (0, 1, 0), (0, 0, 1))),
    ((1, 3), ((1, 0, -1), (0, 1, 0), (0, 0, 1))),
    ((2, 3), ((1, 0, 0), (0, 1, 0), (0, -1, 1))),
    ((1, 2), ((1, -1, 0), (0, 1, 0), (0, 0, 1))),
]


class TestIndicator:
    def test_reference_values(self):
        vals = stokes_indicator(PlanePoint(4.0, 0.0))
        mags = sorted(abs(v) for v in vals)
        s3 = 3 * np.sqrt(3) / 2
        assert abs(mags[0] - s3) < 1e-9
        assert abs(mags[1] - s3) < 1e-9
        assert abs(mags[2] - 2 * s3) < 1e-9
        assert all(abs(v) > 1e-6 for v in vals)

    def test_on_turning_set_errors(self):
        with pytest.raises(TurningPointError):
            stokes_indicator(PlanePoint(2 * np.sqrt(2), -3.0))

    def test_scaling_homogeneity(self):
        x = PlanePoint(0.8, 0.2 + 0.1j)
        lam = 1.5
        a = stokes_indicator(x)
        b = stokes_indicator(PlanePoint(lam**3 * x.x1, lam**2 * x.x2))
        for u, v in zip(a, b):
            assert abs(v - lam**4 * u) < 1e-9 * max(1.0, abs(v))


class TestTrackU:
    def test_constant_path(self):
        traj = track_u([(0.5, 0.1), (0.5, 0.1)])
        first = traj.values[0]
        last = traj.values[-1]
        assert np.allclose(first, last, atol=1e-12)

    def test_closed_loop_identity(self):
        loop = [
            (0.5, 0.1),
            (0.5 + 0.1j, 0.1),
            (0.5 + 0.1j, 0.15),
            (0.5, 0.1),
        ]
        traj = track_u(loop)
        assert np.allclose(traj.values[0], traj.values[-1], atol=1e-9)

    def test_path_needs_two_vertices(self):
        with pytest.raises(ValidationError):
            track_u([(0.5, 0.1)])


@pytest.fixture(scope="module")
def paper_events():
    return detect_events(PAPER_POLYLINE)


@pytest.fixture(scope="module")
def section0():
    return raster_section(0.0, (-1, 1, -1, 1), 64)


class TestEvents:
    def test_five_stokes_crossings(self, paper_events):
        _, events = paper_events
        stokes = [e for e in events if e.kind == "stokes_crossing"]
        assert len(stokes) == 5

    def test_crossing_locations(self, paper_events):
        # near the 4th, 7th, 8th, 10th and 12th vertices (segment index
        # tau * 12 close to 3, 6, 7, 9, 11)
        _, events = paper_events
        stokes = sorted(
            (e for e in events if e.kind == "stokes_crossing"), key=lambda e: e.tau
        )
        near = [e.tau * 12 for e in stokes]
        vertices = [3, 6, 7, 9, 11]
        for got, want in zip(near, vertices):
            assert abs(got - want) < 1.0

    def test_segment_crossings(self, paper_events):
        _, events = paper_events
        segs = [e for e in events if e.kind == "segment_crossing"]
        assert len(segs) == 2
        assert all(e.pair == (1, 2) and e.crosser == 3 for e in segs)

    def test_subpath_to_vertex5(self):
        _, events = detect_events(PAPER_POLYLINE[:5])
        stokes = [e for e in events if e.kind == "stokes_crossing"]
        assert len(stokes) == 1
        assert stokes[0].pair == (2, 3)
        assert stokes[0].dominant == 3

    def test_subpath_to_vertex7_segment_crossing(self):
        _, events = detect_events(PAPER_POLYLINE[:7])
        segs = [e for e in events if e.kind == "segment_crossing"]
        assert len(segs) == 1
        assert segs[0].pair == (1, 2) and segs[0].crosser == 3

    def test_refinement_invariance(self, paper_events):
        # doubling the sample density of the polyline leaves the event list
        # unchanged (same kinds, same order, same locations)
        refined = []
        pts = [(complex(a), complex(b)) for a, b in PAPER_POLYLINE]
        for (a1, a2), (b1, b2) in zip(pts[:-1], pts[1:]):
            refined.append((a1, a2))
            refined.append(((a1 + b1) / 2, (a2 + b2) / 2))
        refined.append(pts[-1])
        _, ev1 = paper_events
        _, ev2 = detect_events(refined)
        assert [e.kind for e in ev1] == [e.kind for e in ev2]
        assert [e.pair for e in ev1] == [e.pair for e in ev2]
        for a, b in zip(ev1, ev2):
            assert abs(complex(a.x[0]) - complex(b.x[0])) < 1e-6

    def test_reversed_path_mirrors_events(self, paper_events):
        _, fwd = paper_events
        _, rev = detect_events(list(reversed(PAPER_POLYLINE)))
        assert [e.kind for e in fwd] == [e.kind for e in reversed(rev)]
        for a, b in zip(fwd, reversed(rev)):
            assert a.pair == b.pair
            assert abs(a.tau - (1.0 - b.tau)) < 1e-6
            if a.kind == "stokes_crossing":
                assert a.dominant == b.dominant
                assert a.im_before == -b.im_before


class TestConnectionWalk:
    def test_paper_systems(self):
        walk = connection_walk(PAPER_POLYLINE)
        assert len(walk) == 5
        for (ev, mat), (pair, entries) in zip(walk, SYSTEMS):
            assert ev.pair == pair
            assert mat.entries == entries

    def test_all_transvections_det_one(self):
        walk = connection_walk(PAPER_POLYLINE)
        for _, mat in walk:
            m = mat.as_array()
            assert round(float(np.linalg.det(m))) == 1
            assert np.count_nonzero(m - np.eye(3, dtype=int)) <= 1

    def test_matrix_validation(self):
        with pytest.raises(ValidationError):
            ConnectionMatrix(((1, 0, 0), (0, 2, 0), (0, 0, 1)))
        with pytest.raises(ValidationError):
            ConnectionMatrix(((1, 1, 0), (0, 1, 0), (0, 1, 1)))
        inv = ConnectionMatrix.transvection(3, 2, -1)
        assert inv.as_array()[2, 1] == -1


class TestRaster:
    def test_ray_structure_at_x2_zero(self, section0):
        pts = [p for p in section0.polylines["union"] if abs(p) > 0.2]
        assert len(pts) > 100
        res = [(np.angle(p) - np.pi / 8) % (np.pi / 4) for p in pts]
        on = sum(1 for r in res if r < 0.06 or r > np.pi / 4 - 0.06)
        assert on == len(pts)
        # all eight rays are populated
        octants = set(
            int(((np.angle(p) - np.pi / 8) % (2 * np.pi)) // (np.pi / 4))
            for p in pts
        )
        assert len(octants) == 8

    def test_turning_markers(self, section0):
        assert section0.turning_points == (0j,)
        s = raster_section(0.5 + 0.25j, (-1, 1, -1, 1), 24)
        assert len(s.turning_points) == 2
        for tp in s.turning_points:
            v = 27 * tp**2 + 8 * (0.5 + 0.25j) ** 3
            assert abs(v) < 1e-9

    def test_resolution_validation(self):
        with pytest.raises(ValidationError):
            raster_section(0.0, (-1, 1, -1, 1), 8)

    def test_csv_export(self, section0):
        csv = section0.to_csv()
        lines = csv.splitlines()
        assert lines[0].startswith("i,j,")
        assert len(lines) == 1 + 64 * 64


class TestSexticOverlay:
    def test_overlay_agreement(self):
        # the minimum |Im F| over the derived sextic roots is small exactly
        # near the union polylines, one cell away from the turning set
        sec = raster_section(0.25, (-0.8, 0.8, -0.8, 0.8), 48, with_sextic=True)
        xs = np.linspace(-0.8, 0.8, 48)
        cell = xs[1] - xs[0]
        vals = sec.sextic_sign
        # every crossing midpoint sits within one cell of a small-|Im F| cell
        misses = 0
        pts = sec.polylines["union"]
        for p in pts:
            j = int(np.clip(round((p.real + 0.8) / cell), 0, 47))
            i = int(np.clip(round((p.imag + 0.8) / cell), 0, 47))
            block = vals[max(0, i - 1) : i + 2, max(0, j - 1) : j + 2]
            near_t = sec.near_turning[
                max(0, i - 1) : i + 2, max(0, j - 1) : j + 2
            ].any()
            if near_t:
                continue
            if block.min() > 0.5 * cell * 10:
                misses += 1
        assert misses <= max(1, len(pts) // 100)


class TestSexticGeometricAgreement:
    def test_grid_101_sign_change_agreement(self):
        # Im F = 0 for the derived sextic holds exactly where some pair of
        # singularities aligns horizontally: on a 101x101 grid the two
        # edge-crossing indicators must agree on at least 99% of edges away
        # from the turning locus
        from pearcey_wkb.aberth import roots_aberth
        from pearcey_wkb.geometry import stokes_sextic_coeffs
        from pearcey_wkb import tracking as trk

        x2 = 0.25
        n = 101
        xs = np.linspace(-0.8, 0.8, n)
        ys = np.linspace(-0.8, 0.8, n)
        u_vals = np.zeros((n, n, 3), dtype=complex)
        f_vals = np.zeros((n, n, 6), dtype=complex)
        near = np.zeros((n, n), dtype=bool)
        from pearcey_wkb.stokes import _u_cubic_coeffs

        for i, yim in enumerate(ys):
            for j, xre in enumerate(xs):
                x1 = complex(xre, yim)
                ur, _ = roots_aberth(_u_cubic_coeffs(x1, x2), tol=1e-12)
                u_vals[i, j] = ur
                fr, _ = roots_aberth(
                    stokes_sextic_coeffs(PlanePoint(x1, x2)), tol=1e-10
                )
                f_vals[i, j] = fr
                sep = min(
                    abs(ur[0] - ur[1]), abs(ur[0] - ur[2]), abs(ur[1] - ur[2])
                )
                near[i, j] = sep < 0.05 * max(1e-12, max(abs(v) for v in ur))

        def edge_change_u(vals_a, vals_b):
            # a pair of singularities aligns horizontally somewhere on the edge
            try:
                perm = trk.match_labels(vals_a, vals_b, guard_ratio=1.0 + 1e-12)
            except Exception:
                return None
            changed = False
            for p in range(3):
                for q in range(p):
                    sa = (vals_a[p] - vals_a[q]).imag
                    sb = (vals_b[perm[p]] - vals_b[perm[q]]).imag
                    if sa == 0.0 or sa * sb < 0:
                        changed = True
            return changed

        def edge_change_f(vals_a, vals_b):
            # some root of the sextic becomes real somewhere on the edge
            try:
                perm = trk.match_labels(vals_a, vals_b, guard_ratio=1.0 + 1e-12)
            except Exception:
                return None
            changed = False
            for p in range(6):
                sa = vals_a[p].imag
                sb = vals_b[perm[p]].imag
                if sa == 0.0 or sa * sb < 0:
                    changed = True
            return changed

        agree = 0
        total = 0
        for i in range(n):
            for j in range(n - 1):
                pairs_ = [((i, j), (i, j + 1))]
                if i < n - 1:
                    pairs_.append(((i, j), (i + 1, j)))
                for (ia, ja), (ib, jb) in pairs_:
                    if near[ia, ja] or near[ib, jb]:
                        continue
                    a_u = edge_change_u(u_vals[ia, ja], u_vals[ib, jb])
                    a_f = edge_change_f(f_vals[ia, ja], f_vals[ib, jb])
                    if a_u is None or a_f is None:
                        continue
                    total += 1
                    if a_u == a_f:
                        agree += 1
        assert total > 15000
        assert agree / total >= 0.99


class TestTrajectoryAnchoring:
    def test_paper_path_starts_at_reference_positions(self, paper_events):
        from pearcey_wkb.geometry import p_ell

        traj, _ = paper_events
        scale = 0.15 ** (4 / 3)
        for ell in (1, 2, 3):
            assert abs(traj.values[0][ell - 1] - p_ell(ell) * scale) < 1e-10

    def test_trajectories_are_continuous(self, paper_events):
        traj, _ = paper_events
        vals = np.array(traj.values)
        steps = np.abs(np.diff(vals, axis=0)).max(axis=1)
        seps = np.array(
            [
                min(abs(v[0] - v[1]), abs(v[0] - v[2]), abs(v[1] - v[2]))
                for v in traj.values
            ]
        )
        assert (steps < seps[:-1]).all()
