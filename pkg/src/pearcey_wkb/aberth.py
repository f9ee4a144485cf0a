"""Simultaneous polynomial root finding (Aberth-Ehrlich).

Univariate polynomials are plain complex coefficient arrays in ascending
degree order.  The iteration starts from a deterministic placement (scaled
roots of unity with a fixed angular offset) so the output ordering is
reproducible run to run.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateLeadingCoefficient, RootConvergenceError, ValidationError

_MAX_ITERS = 400
_SEED_ANGLE = 0.43  # fixed offset; breaks symmetry locking on real polynomials


def poly_eval(coeffs: np.ndarray, z: complex) -> complex:
    """Horner evaluation, ascending coefficients."""
    acc = 0j
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def poly_eval_many(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(z, dtype=complex)
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def normalize(coeffs, lead_tol: float = 0.0) -> np.ndarray:
    """Trim trailing (high-degree) coefficients below ``lead_tol`` of scale.

    Raises ``DegenerateLeadingCoefficient`` if trimming would drop the
    degree, unless the caller passes ``lead_tol=0`` and the array is already
    clean.
    """
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size == 0 or not np.all(np.isfinite(c)):
        raise ValidationError("polynomial coefficients must be finite and nonempty")
    scale = float(np.max(np.abs(c)))
    if scale == 0.0:
        raise ValidationError("zero polynomial")
    if abs(c[-1]) <= lead_tol * scale:
        raise DegenerateLeadingCoefficient(
            f"leading coefficient {c[-1]:.3e} below tolerance (scale {scale:.3e})"
        )
    return c


def _initial_points(coeffs: np.ndarray) -> np.ndarray:
    n = coeffs.size - 1
    # Fujiwara-type bound on root modulus
    lead = abs(coeffs[-1])
    radius = 1.0 + max(abs(c) / lead for c in coeffs[:-1]) if n else 1.0
    radius = min(radius, 1e8)
    k = np.arange(n)
    return 0.5 * radius * np.exp(1j * (2 * np.pi * k / n + _SEED_ANGLE))


def roots_aberth(coeffs, tol: float = 1e-12) -> tuple[np.ndarray, list[int]]:
    """All complex roots plus multiplicity estimates.

    Parameters
    ----------
    coeffs : array_like
        Ascending complex coefficients, degree >= 1 after normalization.
    tol : float
        Relative residual target: |p(r)| <= tol * sum_k |c_k| max(1,|r|)^k.

    Returns
    -------
    roots : ndarray
        Converged roots in deterministic order.
    multiplicities : list of int
        Cluster-size estimates (single-linkage, radius ~ tol^(1/3)),
        one entry per root.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    c = normalize(coeffs, lead_tol=1e-14)
    n = c.size - 1
    if n < 1:
        raise ValidationError("degree must be at least 1")
    if n == 1:
        roots = np.array([-c[0] / c[1]])
        return roots, [1]

    dcoeffs = c[1:] * np.arange(1, n + 1)
    z = _initial_points(c)
    coeff_abs = np.abs(c)

    def residual_ok(zs):
        pv = np.abs(poly_eval_many(c, zs))
        zs_abs = np.maximum(1.0, np.abs(zs))
        scale = np.zeros(zs.shape)
        for k, a in enumerate(coeff_abs):
            scale += a * zs_abs**k
        return pv <= tol * scale, pv

    for _ in range(_MAX_ITERS):
        ok, _ = residual_ok(z)
        if np.all(ok):
            break
        p = poly_eval_many(c, z)
        dp = poly_eval_many(dcoeffs, z)
        dp = np.where(dp == 0, 1e-300, dp)
        newton = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        sums = inv.sum(axis=1)
        denom = 1.0 - newton * sums
        denom = np.where(np.abs(denom) < 1e-300, 1e-300, denom)
        step = newton / denom
        z = z - np.where(ok, 0.0, step)
    else:
        raise RootConvergenceError(
            f"Aberth iteration did not converge in {_MAX_ITERS} iterations",
            last_iterate=z,
        )

    # Newton polish to machine accuracy (simple roots sharpen even when the
    # residual test above stopped early inside a near-multiple cluster)
    for i in range(n):
        zi = z[i]
        for _ in range(20):
            p = poly_eval(c, zi)
            dp = poly_eval(dcoeffs, zi)
            if dp == 0:
                break
            step = p / dp
            zi -= step
            if abs(step) < 1e-16 * (1.0 + abs(zi)):
                break
        z[i] = zi

    # multiplicity estimate by single-linkage clustering
    radius = max(tol, tol ** (1.0 / 3.0)) * (1.0 + float(np.max(np.abs(z))))
    mult = _cluster_sizes(z, radius)
    return z, mult


def _cluster_sizes(z: np.ndarray, radius: float) -> list[int]:
    n = z.size
    labels = list(range(n))

    def find(i):
        while labels[i] != i:
            labels[i] = labels[labels[i]]
            i = labels[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= radius:
                labels[find(i)] = find(j)
    sizes = {}
    for i in range(n):
        r = find(i)
        sizes[r] = sizes.get(r, 0) + 1
    return [sizes[find(i)] for i in range(n)]


def from_roots(roots, lead: complex = 1.0) -> np.ndarray:
    """Monic-times-lead polynomial with the given roots (ascending coeffs)."""
    c = np.array([complex(lead)])
    for r in roots:
        c = np.convolve(c, np.array([-complex(r), 1.0]))
    return c
