"""Labeled root continuation along paths.

One tracker serves every continuation job in the package: characteristic
roots of the cubic along x-paths, Borel singularities from their cubic, and
the four sheets of the Borel quartic along paths in the base plane.

The step acceptance rule is the collision guard: after Newton-correcting
every tracked value onto the new polynomial, the minimum pairwise separation
of the updated values must exceed ``guard_ratio`` times the largest value
displacement in the step.  Steps halve until the guard holds; running out of
refinement raises ``ContinuationError`` with the obstruction location.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .aberth import poly_eval, roots_aberth
from .errors import ContinuationError, LabelMatchError

GUARD_RATIO = 3.0
RESIDUAL_TOL = 1e-9
MIN_STEP = 1e-11
_NEWTON_ITERS = 12


def match_labels(old_vals, new_vals, guard_ratio: float = GUARD_RATIO):
    """Permutation assigning each old value its nearest new value.

    The assignment must be a bijection and each nearest match must beat the
    runner-up by ``guard_ratio``; ties raise ``LabelMatchError`` rather than
    guessing.
    """
    old_vals = np.asarray(old_vals, dtype=complex)
    new_vals = np.asarray(new_vals, dtype=complex)
    n = old_vals.size
    dist = np.abs(old_vals[:, None] - new_vals[None, :])
    perm = []
    for i in range(n):
        order = np.argsort(dist[i])
        best = int(order[0])
        if n > 1:
            second = int(order[1])
            if dist[i, second] < guard_ratio * dist[i, best]:
                raise LabelMatchError(
                    f"ambiguous match for value {old_vals[i]}: "
                    f"d1={dist[i, best]:.3e}, d2={dist[i, second]:.3e}"
                )
        perm.append(best)
    if len(set(perm)) != n:
        raise LabelMatchError("matching is not a bijection")
    return perm


def _newton_polish(coeffs: np.ndarray, z: complex) -> complex:
    dcoeffs = coeffs[1:] * np.arange(1, coeffs.size)
    for _ in range(_NEWTON_ITERS):
        p = poly_eval(coeffs, z)
        dp = poly_eval(dcoeffs, z)
        if dp == 0:
            break
        step = p / dp
        z = z - step
        if abs(step) < 1e-16 * (1.0 + abs(z)):
            break
    return z


def _residual_scale(coeffs: np.ndarray, z: complex) -> float:
    za = max(1.0, abs(z))
    return float(sum(abs(c) * za**k for k, c in enumerate(coeffs)))


@dataclass
class Trace:
    """Recorded continuation of a fixed number of labeled values.

    ``values[i]`` is the tuple tracked at parameter ``taus[i]`` and base
    point ``points[i]``; ``min_separation`` is the smallest pairwise sheet
    distance seen anywhere along the path.
    """

    taus: list[float] = field(default_factory=list)
    points: list[complex] = field(default_factory=list)
    values: list[np.ndarray] = field(default_factory=list)
    min_separation: float = np.inf

    def record(self, tau, point, vals):
        self.taus.append(float(tau))
        self.points.append(complex(point))
        self.values.append(np.array(vals, dtype=complex))
        if len(vals) > 1:
            sep = _min_pairwise(np.asarray(vals, dtype=complex))
            self.min_separation = min(self.min_separation, sep)

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]

    def permutation_from(self, reference_vals) -> tuple[int, ...]:
        """perm[i] = index in ``reference_vals`` matching final value i."""
        return tuple(match_labels(self.final, reference_vals))


def _min_pairwise(vals: np.ndarray) -> float:
    n = vals.size
    m = np.inf
    for i in range(n):
        for j in range(i + 1, n):
            m = min(m, abs(vals[i] - vals[j]))
    return m


def track_family(
    coeffs_fn,
    point_fn,
    start_vals,
    *,
    residual_tol: float = RESIDUAL_TOL,
    guard_ratio: float = GUARD_RATIO,
    min_step: float = MIN_STEP,
    initial_step: float = 0.125,
    trace: Trace | None = None,
) -> Trace:
    """Continue labeled roots of a polynomial family over tau in [0, 1].

    Parameters
    ----------
    coeffs_fn : callable
        tau -> ascending complex coefficient array of the family member.
    point_fn : callable
        tau -> base-plane point (diagnostics only).
    start_vals : sequence of complex
        Labeled roots at tau = 0; they must satisfy the tau = 0 polynomial.
    """
    vals = np.array(start_vals, dtype=complex)
    c0 = coeffs_fn(0.0)
    for z in vals:
        if abs(poly_eval(c0, z)) > residual_tol * _residual_scale(c0, z) * 10:
            raise ContinuationError(
                f"start value {z} does not satisfy the family at tau=0",
                location=point_fn(0.0),
            )
    if trace is None:
        trace = Trace()
    trace.record(0.0, point_fn(0.0), vals)

    tau = 0.0
    step = initial_step
    while tau < 1.0:
        target = min(1.0, tau + step)
        c = coeffs_fn(target)
        new_vals = np.array([_newton_polish(c, z) for z in vals])
        ok = _accept(c, vals, new_vals, residual_tol, guard_ratio)
        if ok:
            tau = target
            vals = new_vals
            trace.record(tau, point_fn(tau), vals)
            step = min(2 * step, 0.25)
        else:
            step *= 0.5
            if step < min_step:
                raise ContinuationError(
                    "near-discriminant passage: step underflow during tracking",
                    location=point_fn(tau),
                )
    return trace


def _accept(coeffs, old_vals, new_vals, residual_tol, guard_ratio) -> bool:
    if not np.all(np.isfinite(new_vals)):
        return False
    for z in new_vals:
        if abs(poly_eval(coeffs, z)) > residual_tol * _residual_scale(coeffs, z):
            return False
    disp = float(np.max(np.abs(new_vals - old_vals)))
    if len(new_vals) > 1:
        sep = _min_pairwise(new_vals)
        if sep < guard_ratio * disp or sep == 0.0:
            return False
    return True


def track_polyline(coeffs_at_point, knots, start_vals, *, trace=None, **kwargs) -> Trace:
    """Track through a polyline of base points (e.g. in the x- or s-plane).

    ``coeffs_at_point`` maps a base point to ascending coefficients.
    """
    knots = [complex(k) for k in knots]
    if len(knots) < 2:
        raise ContinuationError("path needs at least 2 vertices")
    vals = start_vals
    for a, b in zip(knots[:-1], knots[1:]):
        def point_fn(t, a=a, b=b):
            return a + (b - a) * t

        def coeffs_fn(t, a=a, b=b):
            return coeffs_at_point(a + (b - a) * t)

        trace = track_family(coeffs_fn, point_fn, vals, trace=trace, **kwargs)
        vals = trace.final
    return trace


def circle_knots(center: complex, radius: float, theta0: float, theta1: float, n: int = 48):
    """Polyline approximating an arc; n chords per full turn of angle span."""
    span = theta1 - theta0
    m = max(8, int(abs(span) / (2 * np.pi) * n) + 1)
    return [center + radius * np.exp(1j * (theta0 + span * k / m)) for k in range(m + 1)]


def solve_and_match(coeffs, approx_vals, guard_ratio: float = GUARD_RATIO, tol: float = 1e-12):
    """Solve the polynomial fully and relabel to match approximate values."""
    roots, _ = roots_aberth(coeffs, tol=tol)
    perm = match_labels(approx_vals, roots, guard_ratio=guard_ratio)
    return np.array([roots[p] for p in perm])
