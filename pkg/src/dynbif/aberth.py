"""Ehrlich-Aberth simultaneous iteration.

The evaluator contract is vectorized: eval_fn(z) -> (p, dp) over numpy
arrays; p and dp may share an arbitrary per-point scaling since only the
Newton ratio enters.  The O(n^2) pairwise repulsion sum is the hot loop; it
runs through a numba kernel when numba imports, with a chunked numpy
fallback.
"""

from __future__ import annotations

import numpy as np

from .errors import NoConvergenceError, PreconditionError

try:  # pragma: no cover - exercised implicitly
    import numba

    @numba.njit(parallel=True, fastmath=False, cache=True)
    def _pairwise_sums_numba(z, active):  # pragma: no cover
        n = z.shape[0]
        out = np.zeros(n, dtype=np.complex128)
        for i in numba.prange(n):
            if not active[i]:
                continue
            s = 0.0 + 0.0j
            zi = z[i]
            for j in range(n):
                if j != i:
                    d = zi - z[j]
                    if d != 0:
                        s += 1.0 / d
            out[i] = s
        return out

    HAVE_NUMBA = True
except Exception:  # pragma: no cover
    HAVE_NUMBA = False


def _pairwise_sums_numpy(z: np.ndarray, active: np.ndarray) -> np.ndarray:
    n = len(z)
    out = np.zeros(n, dtype=np.complex128)
    chunk = max(1, int(4e6) // max(n, 1))
    idx = np.nonzero(active)[0]
    for start in range(0, len(idx), chunk):
        ii = idx[start : start + chunk]
        diff = z[ii, None] - z[None, :]
        np.place(diff, diff == 0, 1.0)  # self terms; masked below
        inv = 1.0 / diff
        inv[np.arange(len(ii)), ii] = 0.0
        out[ii] = inv.sum(axis=1)
    return out


def pairwise_sums(z: np.ndarray, active: np.ndarray) -> np.ndarray:
    if HAVE_NUMBA and len(z) > 64:
        return _pairwise_sums_numba(z, active)
    return _pairwise_sums_numpy(z, active)


def initial_points_from_coeffs(coeffs: np.ndarray) -> np.ndarray:
    """Newton-polygon (Bini) initialization: per-root radii from the upper
    convex hull of (k, log|a_k|), points spread on concentric circles with an
    irrational phase offset."""
    a = np.asarray(coeffs, dtype=np.complex128)
    n = len(a) - 1
    if n < 1:
        raise PreconditionError("degree must be >= 1")
    logs = np.full(n + 1, -np.inf)
    nz = np.abs(a) > 0
    logs[nz] = np.log(np.abs(a[nz]))
    # upper convex hull of (k, logs[k])
    hull = [0]
    for k in range(1, n + 1):
        if logs[k] == -np.inf and k != n:
            continue
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            # keep hull upper-convex
            if (logs[j] - logs[i]) * (k - j) <= (logs[k] - logs[j]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    radii = np.empty(n)
    pos = 0
    for seg in range(len(hull) - 1):
        i, j = hull[seg], hull[seg + 1]
        r = np.exp((logs[i] - logs[j]) / (j - i))
        radii[pos : pos + (j - i)] = r
        pos += j - i
    theta = 2.0 * np.pi * np.arange(n) / n + 0.41322
    # small radial stagger avoids symmetric stalls
    stagger = 1.0 + 1e-3 * np.cos(7.1 * np.arange(n))
    return radii * stagger * np.exp(1j * theta)


def initial_points_on_circle(degree: int, radius: float) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(degree) / degree + 0.41322
    stagger = 1.0 + 1e-3 * np.cos(7.1 * np.arange(degree))
    return radius * stagger * np.exp(1j * theta)


def aberth_solve(eval_fn, init: np.ndarray, tol: float, max_iter: int
                 ) -> np.ndarray:
    """Run the Ehrlich-Aberth iteration from ``init``.

    A point freezes once its correction drops below tol * (1 + |z|).  Multiple
    roots converge only linearly and bottom out at the double-precision
    cluster radius (~eps**(1/m)), so the loop also exits when the worst active
    correction has stopped improving at a sub-sqrt(tol) level; the cluster
    post-processing in cpoly then assigns multiplicities.
    """
    z = np.array(init, dtype=np.complex128)
    n = len(z)
    active = np.ones(n, dtype=np.bool_)
    best = np.inf
    stagnant = 0
    for _ in range(max_iter):
        p, dp = eval_fn(z)
        p = np.asarray(p, dtype=np.complex128)
        dp = np.asarray(dp, dtype=np.complex128)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            w = p / dp
        bad = ~np.isfinite(w)
        if np.any(bad):
            w[bad] = 0.02 * (1.0 + np.abs(z[bad]))
        s = pairwise_sums(z, active)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            corr = w / (1.0 - w * s)
        bad = ~np.isfinite(corr)
        if np.any(bad):
            corr[bad] = w[bad]
        # damp absurd steps (far-field points with huge Newton ratios)
        mag = np.abs(corr)
        limit = 0.5 * (1.0 + np.abs(z))
        big = mag > limit
        if np.any(big):
            corr[big] *= limit[big] / mag[big]
        corr[~active] = 0.0
        z = z - corr
        rel = np.abs(corr) / (1.0 + np.abs(z))
        active &= rel > tol
        if not np.any(active):
            return z
        worst = float(np.max(rel[active]))
        if worst < 0.9 * best:
            best = worst
            stagnant = 0
        else:
            stagnant += 1
            if stagnant >= 15 and best < tol**0.5:
                return z
    if np.count_nonzero(active) > max(0, n // 500) and best > tol**0.5:
        raise NoConvergenceError(
            f"{np.count_nonzero(active)} of {n} points unconverged after "
            f"{max_iter} iterations (best correction {best:.2e})"
        )
    return z
