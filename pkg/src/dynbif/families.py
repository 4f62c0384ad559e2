"""Parametrized families and parameter-space solvers.

Families carried: the quadratic polynomials z^2 + c, the critically marked
cubic polynomials z^3/3 - (c/2) z^2 + a^3 (one marked critical point at 0,
one at c), a quadratic rational normal form with prescribed fixed-point
multipliers, and a catalog of one-parameter meromorphic disk families for
degeneration slopes.

Parameter-space solving is black-box throughout: critical-orbit return
polynomials are evaluated by orbit recursion (never expanded in
coefficients), with escape shortcuts so that nothing overflows.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import arith
from .cpoly import roots_blackbox
from .dynamics import RationalMapLift
from .errors import (
    CountMismatchError,
    CountOverflowError,
    DegenerateMapError,
    IncompleteEnumerationWarning,
    NotInComponentError,
    PathLossError,
    PreconditionError,
)

# Degree 2^(n-1) stays under the desk cap of 2*10^4 through n = 14, the
# highest period whose enumeration is certified complete (every count is
# checked against the Moebius divisor count).
QUAD_CENTER_CAP = 14
PCA_BEZOUT_CAP = 2000
ESCAPE = 1e100


# ---------------------------------------------------------------------------
# family catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    """A parametrized family selectable by its CLI id."""

    kind: str  # QuadraticPoly | PcaPoly | QuadRatFixed | MeromorphicDisk
    family_id: str
    parameter_dim: int
    degree: int
    catalog_formula: str | None = None  # MeromorphicDisk only


QUAD = FamilySpec("QuadraticPoly", "quad", 1, 2)
PCA3 = FamilySpec("PcaPoly", "pca3", 2, 3)
QUADRAT = FamilySpec("QuadRatFixed", "quadrat", 2, 2)

DEGEN_CATALOG = {
    "inv_t": FamilySpec("MeromorphicDisk", "degen:inv_t", 1, 2, "1/t"),
    "inv_t2": FamilySpec("MeromorphicDisk", "degen:inv_t2", 1, 2, "1/t^2"),
    "t": FamilySpec("MeromorphicDisk", "degen:t", 1, 2, "t"),
}


def family_from_id(family_id: str) -> FamilySpec:
    if family_id == "quad":
        return QUAD
    if family_id == "pca3":
        return PCA3
    if family_id == "quadrat":
        return QUADRAT
    if family_id.startswith("degen:"):
        key = family_id.split(":", 1)[1]
        if key in DEGEN_CATALOG:
            return DEGEN_CATALOG[key]
    raise PreconditionError(f"unknown family id {family_id!r}")


def degen_parameter(spec: FamilySpec, t: complex) -> complex:
    """The quadratic parameter c(t) of a catalog disk family."""
    if spec.kind != "MeromorphicDisk":
        raise PreconditionError("not a disk family")
    if t == 0:
        raise PreconditionError("t must be nonzero")
    t = complex(t)
    if spec.catalog_formula == "1/t":
        return 1.0 / t
    if spec.catalog_formula == "1/t^2":
        return 1.0 / t**2
    return t


def pca_map(d: int, c, a: complex) -> np.ndarray:
    """Ascending coefficients of the unicritical-normalized polynomial
    z^d/d + sum_{j=2}^{d-1} (-1)^(d-j) sigma_{d-j}(c)/j z^j + a^d, whose
    critical points are exactly {0, c_1, ..., c_{d-2}}."""
    if not (2 <= d <= 6):
        raise PreconditionError("degree must lie in [2, 6]")
    c = tuple(complex(x) for x in np.atleast_1d(np.asarray(c, dtype=complex))) \
        if d > 2 else ()
    if len(c) != d - 2:
        raise PreconditionError(f"need {d - 2} free critical points, got {len(c)}")
    # elementary symmetric polynomials sigma_k(c)
    sig = np.zeros(d - 1, dtype=np.complex128)
    sig[0] = 1.0
    for x in c:
        sig[1:] = sig[1:] + x * sig[:-1].copy()
    coeffs = np.zeros(d + 1, dtype=np.complex128)
    coeffs[d] = 1.0 / d
    for j in range(2, d):
        coeffs[j] = (-1) ** (d - j) * sig[d - j] / j
    coeffs[0] = complex(a) ** d
    return coeffs


def map_at(spec: FamilySpec, params) -> RationalMapLift:
    """The rational-map lift of a family member."""
    p = np.atleast_1d(np.asarray(params, dtype=complex))
    if spec.kind == "QuadraticPoly":
        (c,) = p
        return _poly_lift(np.array([c, 0.0, 1.0], dtype=np.complex128))
    if spec.kind == "PcaPoly":
        c, a = p[:-1], p[-1]
        return _poly_lift(pca_map(spec.degree, c, a))
    if spec.kind == "QuadRatFixed":
        mu1, mu2 = p
        lift, _ = quadrat_fixed_normal_form(mu1, mu2)
        return lift
    if spec.kind == "MeromorphicDisk":
        (t,) = p
        c = degen_parameter(spec, t)
        return _poly_lift(np.array([c, 0.0, 1.0], dtype=np.complex128))
    raise PreconditionError(f"unknown family kind {spec.kind!r}")


def _poly_lift(coeffs: np.ndarray) -> RationalMapLift:
    d = len(coeffs) - 1
    den = np.zeros(d + 1, dtype=np.complex128)
    den[0] = 1.0
    return RationalMapLift(np.asarray(coeffs, dtype=np.complex128), den)


def marked_critical_points(spec: FamilySpec, params) -> list[complex]:
    p = np.atleast_1d(np.asarray(params, dtype=complex))
    if spec.kind in ("QuadraticPoly", "MeromorphicDisk"):
        return [0.0 + 0.0j]
    if spec.kind == "PcaPoly":
        return [0.0 + 0.0j] + [complex(x) for x in p[:-1]]
    raise PreconditionError(f"{spec.kind} has no marked critical points")


def quadrat_fixed_normal_form(mu1: complex, mu2: complex
                              ) -> tuple[RationalMapLift, complex]:
    """Degree-2 rational map z(z + mu1)/(mu2 z + 1) with fixed points 0 and
    infinity of multipliers mu1 and mu2; the third fixed-point multiplier,
    pinned by the holomorphic index relation sum 1/(1 - mu_i) = 1, is
    returned alongside."""
    mu1, mu2 = complex(mu1), complex(mu2)
    if abs(mu1 * mu2 - 1.0) <= 1e-12:
        raise DegenerateMapError("mu1 * mu2 = 1 collapses the normal form")
    num = np.array([0.0, mu1, 1.0], dtype=np.complex128)
    den = np.array([1.0, mu2, 0.0], dtype=np.complex128)
    lift = RationalMapLift(num, den)
    # index relation: 1/(1-mu1) + 1/(1-mu2) + 1/(1-mu3) = 1
    if abs(mu1 - 1.0) <= 1e-14 or abs(mu2 - 1.0) <= 1e-14:
        mu3 = 1.0 + 0.0j  # parabolic partner; index degenerates
    else:
        s = 1.0 - 1.0 / (1.0 - mu1) - 1.0 / (1.0 - mu2)
        mu3 = 1.0 - 1.0 / s if s != 0 else np.inf
    return lift, complex(mu3)


# ---------------------------------------------------------------------------
# power maps: closed-form multiplier spectra
# ---------------------------------------------------------------------------


def power_map_degree(F: RationalMapLift) -> int | None:
    """Degree d if F is affinely alpha * z^d (hence linearly conjugate to
    z^d), else None."""
    num, den = F.num, F.den
    scale = max(np.max(np.abs(num)), np.max(np.abs(den)))
    if abs(den[0]) == 0:
        return None
    if np.max(np.abs(den[1:])) > 1e-15 * scale:
        return None
    if np.max(np.abs(num[:-1])) > 1e-15 * scale or num[-1] == 0:
        return None
    return F.degree


def power_map_spectrum(d: int, n: int) -> list[tuple[complex, int]]:
    """Exact multiplier spectrum of z^d at period n as (multiplier,
    cycle count) pairs: every exact-period-n cycle has multiplier d^n, plus
    the two superattracting fixed points at n = 1."""
    if d < 2 or n < 1:
        raise PreconditionError("need d >= 2, n >= 1")
    if n == 1:
        return [(0.0 + 0.0j, 2), (complex(d), d - 1)]
    d_n = arith.exact_cycle_point_count(d, n)
    return [(complex(d) ** n, d_n // n)]


# ---------------------------------------------------------------------------
# quadratic critical-orbit evaluators
# ---------------------------------------------------------------------------


def quad_center_evaluator(n: int):
    """Vectorized evaluator of the period-n critical-orbit return polynomial
    of z^2 + c: c -> f_c^n(0), with d/dc, degree 2^(n-1).

    Escaped parameters switch to the asymptotic Newton-ratio recursion
    (the ratio halves per remaining step once |z| dwarfs |c| and 1), so the
    returned pair never overflows; it may carry a per-point scaling, which is
    all the root finder needs.
    """

    def eval_fn(c: np.ndarray):
        c = np.asarray(c, dtype=np.complex128)
        z = np.zeros_like(c)
        dz = np.zeros_like(c)
        p = np.empty_like(c)
        dp = np.ones_like(c)
        alive = np.ones(c.shape, dtype=bool)
        for k in range(n):
            dz[alive] = 2.0 * z[alive] * dz[alive] + 1.0
            z[alive] = z[alive] ** 2 + c[alive]
            esc = alive & (np.abs(z) > ESCAPE)
            if np.any(esc):
                # remaining steps only halve the Newton ratio
                p[esc] = (z[esc] / dz[esc]) * 0.5 ** (n - 1 - k)
                dp[esc] = 1.0
                alive &= ~esc
        p[alive] = z[alive]
        dp[alive] = dz[alive]
        return p, dp

    return eval_fn


def _mandel_equipotential(count: int, depth: int) -> np.ndarray:
    """Points on an escape-time level curve hugging the boundary of the
    quadratic connectedness locus: the natural seeding curve, since the
    period-n centers accumulate exactly there."""
    theta = 2.0 * np.pi * np.arange(count) / count + 0.241
    dirs = np.exp(1j * theta)
    anchor = -0.4 + 0.0j
    lo = np.zeros(count)
    hi = np.full(count, 2.8)

    def escapes(c):
        z = np.zeros_like(c)
        out = np.zeros(c.shape, dtype=bool)
        for _ in range(depth):
            z = z * z + c
            out |= np.abs(z) > 4.0
            z[out] = 5.0  # freeze escaped points
        return out

    for _ in range(40):
        mid = 0.5 * (lo + hi)
        esc = escapes(anchor + mid * dirs)
        hi[esc] = mid[esc]
        lo[~esc] = mid[~esc]
    return anchor + hi * dirs


@dataclass(frozen=True)
class CenterPoint:
    """A postcritically finite parameter with its marked periods.

    ``multiplicity`` is the local intersection multiplicity of the defining
    return system (1 at transverse solutions; period-1 markings produce
    non-reduced loci and higher values)."""

    parameter: tuple[complex, ...]
    periods: arith.PeriodTuple
    residuals: tuple[float, ...]
    multiplicity: int = 1


def _quad_exact_period(c: complex, n: int, tol: float = 1e-8) -> int:
    """First return time of the critical point 0 under z^2 + c, scanned up
    to n."""
    z = 0.0 + 0.0j
    for m in range(1, n + 1):
        z = z * z + c
        if abs(z) <= tol:
            return m
    return 0


@lru_cache(maxsize=None)
def _quad_exact_centers(n: int) -> tuple[complex, ...]:
    """Exact-period-n centers of z^2 + c, sorted, certified complete.

    Solves the full critical-orbit return polynomial (all periods dividing
    n) by the black-box simultaneous iteration.  For n >= 10 the solve is
    seeded with the union of all lower-period centers plus jittered padding:
    the centers of all periods together equidistribute like the bifurcation
    measure, which is exactly where the period-n centers live, so the sweep
    count stays flat with the degree.  Exact periods are assigned by orbit
    tests and every per-period count is certified against the Moebius
    divisor count, raising COUNT_MISMATCH on any discrepancy.
    """
    if n == 1:
        return (0.0 + 0.0j,)
    degree = 2 ** (n - 1)
    if n < 10:
        init = _mandel_equipotential(degree, depth=n + 20)
    else:
        lower = np.concatenate(
            [np.asarray(_quad_exact_centers(m)) for m in range(1, n)])
        rng = np.random.default_rng(1000 + n)
        pad = degree - len(lower)
        extra = (lower[rng.choice(len(lower), size=pad)]
                 + 1e-4 * (rng.standard_normal(pad)
                           + 1j * rng.standard_normal(pad)))
        init = np.concatenate([lower, extra])
    rs = roots_blackbox(quad_center_evaluator(n), degree, 1e-12,
                        max_iter=3000, init=init)
    if np.any(rs.multiplicities > 1):
        raise CountOverflowError(
            "duplicate clusters among centers resist separation")
    roots = _polish_centers(rs.roots, n)
    counts: dict[int, list[complex]] = {}
    for c in roots:
        m = _quad_exact_period(complex(c), n)
        if m == 0 or n % m != 0:
            raise CountMismatchError(
                f"root {c} has no divisor period up to {n}")
        counts.setdefault(m, []).append(complex(c))
    for m in arith.divisors(n):
        expected = arith.affine_cycle_point_count(2, m) // 2
        got = len(counts.get(m, ()))
        if got != expected:
            raise CountMismatchError(
                f"period {m}: found {got} centers, expected {expected}")
    return tuple(sorted(counts[n], key=lambda z: (z.real, z.imag)))


def centers_1d(spec: FamilySpec, n: int, tol: float = 1e-12
               ) -> list[CenterPoint]:
    """All parameters of a one-parameter family where the marked critical
    point has exact period n, certified complete against the Moebius divisor
    count."""
    if spec.kind != "QuadraticPoly":
        raise PreconditionError("center enumeration supports the quadratic "
                                "family in one parameter")
    if n < 1 or n > QUAD_CENTER_CAP:
        raise PreconditionError(f"period must lie in [1, {QUAD_CENTER_CAP}]")
    out = []
    for c in _quad_exact_centers(n):
        z = 0.0 + 0.0j
        for _ in range(n):
            z = z * z + c
        out.append(CenterPoint((c,), arith.PeriodTuple((n,)), (abs(z),)))
    return out


def _polish_centers(roots: np.ndarray, n: int) -> np.ndarray:
    """A couple of plain Newton sweeps; the simultaneous phase may hand over
    points at ~10x its tolerance."""
    ev = quad_center_evaluator(n)
    z = roots.copy()
    for _ in range(3):
        p, dp = ev(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = p / dp
        step[~np.isfinite(step)] = 0.0
        z = z - step
    return z


# ---------------------------------------------------------------------------
# cubic (c, a) center systems
# ---------------------------------------------------------------------------


def _pca3_orbit(c, a, z0, n):
    """Orbit of z0 under z^3/3 - (c/2) z^2 + a^3 with forward-mode
    derivatives in (c, a); all arrays broadcast."""
    z = np.asarray(z0, dtype=np.complex128) + np.zeros_like(c)
    dzc = np.zeros_like(z)
    dza = np.zeros_like(z)
    for _ in range(n):
        z2 = z * z
        new = z2 * z / 3.0 - 0.5 * c * z2 + a**3
        dnew_c = (z2 - c * z) * dzc - 0.5 * z2
        dnew_a = (z2 - c * z) * dza + 3.0 * a**2
        z, dzc, dza = new, dnew_c, dnew_a
    return z, dzc, dza


def _pca3_orbit_from_c(c, a, n):
    """Orbit of the free critical point z0 = c itself (d z0/dc = 1)."""
    z = c.copy()
    dzc = np.ones_like(c)
    dza = np.zeros_like(c)
    for _ in range(n):
        z2 = z * z
        new = z2 * z / 3.0 - 0.5 * c * z2 + a**3
        dnew_c = (z2 - c * z) * dzc - 0.5 * z2
        dnew_a = (z2 - c * z) * dza + 3.0 * a**2
        z, dzc, dza = new, dnew_c, dnew_a
    return z, dzc, dza


def _pca3_center_system(c, a, n0, n1):
    """Residuals and exact Jacobian of the two-critical-orbit return system
    (P^n0(0), P^n1(c)) at parameters (c, a), vectorized."""
    g0, g0c, g0a = _pca3_orbit(c, a, 0.0 + 0.0j, n0)
    z1, z1c, z1a = _pca3_orbit_from_c(c, a, n1)
    # the free critical point c must return to itself
    return (g0, z1 - c), ((g0c, g0a), (z1c - 1.0, z1a))


def _pca3_exact_period(c: complex, a: complex, z0: complex, n: int,
                       tol: float = 1e-8) -> int:
    z = complex(z0)
    for m in range(1, n + 1):
        z = z**3 / 3.0 - 0.5 * c * z * z + a**3
        if abs(z - z0) <= tol:
            return m
    return 0


def centers_2d(spec: FamilySpec, n0: int, n1: int, tol: float = 1e-12,
               seeds_per_root: int = 60, seed: int = 0) -> list[CenterPoint]:
    """All (c, a) where critical point 0 has exact period n0 and critical
    point c has exact period n1, for the marked cubic family.

    Grid-seeded damped Newton on the two return equations with exact
    forward-mode Jacobians; solutions deduped at radius 10*tol and certified
    against the Bezout count D_n0 * D_n1 (an IncompleteEnumerationWarning is
    issued when seeding falls short, with the deficit in the message).
    """
    if spec.kind != "PcaPoly" or spec.degree != 3:
        raise PreconditionError("two-parameter centers support the marked "
                                "cubic family")
    if n0 < 1 or n1 < 1:
        raise PreconditionError("periods must be >= 1")
    bezout = (arith.affine_cycle_point_count(3, n0)
              * arith.affine_cycle_point_count(3, n1))
    if bezout > PCA_BEZOUT_CAP:
        raise PreconditionError(
            f"Bezout count {bezout} exceeds the desk cap {PCA_BEZOUT_CAP}")
    total_target = sum(
        arith.affine_cycle_point_count(3, m0)
        * arith.affine_cycle_point_count(3, m1)
        for m0 in arith.divisors(n0) for m1 in arith.divisors(n1))
    dedup: list[np.ndarray] = []
    for round_id in range(5):
        rng = np.random.default_rng(seed + 7919 * round_id)
        n_seeds = seeds_per_root * total_target * (1 + round_id)
        # parameters of interest sit in a bounded bidisk (the connectedness
        # locus of the family is compact); seed generously around it
        spread = 2.2 + 0.6 * round_id
        c = spread * (rng.standard_normal(n_seeds)
                      + 1j * rng.standard_normal(n_seeds))
        a = (0.73 * spread) * (rng.standard_normal(n_seeds)
                               + 1j * rng.standard_normal(n_seeds))
        for _ in range(120):
            (g0, g1), ((g0c, g0a), (g1c, g1a)) = \
                _pca3_center_system(c, a, n0, n1)
            det = g0c * g1a - g0a * g1c
            with np.errstate(divide="ignore", invalid="ignore"):
                step_c = (g0 * g1a - g1 * g0a) / det
                step_a = (g1 * g0c - g0 * g1c) / det
            bad = ~(np.isfinite(step_c) & np.isfinite(step_a))
            step_c[bad] = 0.0
            step_a[bad] = 0.0
            # damp long steps to keep seeds from being flung out
            mag = np.sqrt(np.abs(step_c) ** 2 + np.abs(step_a) ** 2)
            damp = np.minimum(1.0, 1.0 / np.maximum(mag, 1e-30))
            c = c - step_c * damp
            a = a - step_a * damp
        (g0, g1), _ = _pca3_center_system(c, a, n0, n1)
        res = np.abs(g0) + np.abs(g1)
        ok = np.isfinite(res) & (res < 1e-8)
        sols = np.stack([c[ok], a[ok]], axis=1)
        before = len(dedup)
        for s in sols:
            if all(np.linalg.norm(s - t) > 10.0 * max(tol, 1e-10)
                   for t in dedup):
                dedup.append(s)
        if round_id > 0 and len(dedup) == before:
            break  # a fresh larger seeding found nothing new
    out = []
    for s in dedup:
        cc, aa = complex(s[0]), complex(s[1])
        m0 = _pca3_exact_period(cc, aa, 0.0, n0)
        m1 = _pca3_exact_period(cc, aa, cc, n1)
        if m0 != n0 or m1 != n1:
            continue  # a divisor-period solution of the full return system
        (g0, g1), _ = _pca3_center_system(
            np.array([cc]), np.array([aa]), n0, n1)
        out.append(CenterPoint((cc, aa), arith.PeriodTuple((n0, n1)),
                               (float(abs(g0[0])), float(abs(g1[0])))))
    # assign local intersection multiplicities by a perturbation
    # local-degree count, then certify the multiplicity total against the
    # Bezout number of the exact-period divisors
    out = _assign_multiplicities(out, n0, n1, seed)
    expected = _expected_exact_pairs(n0, n1)
    total = sum(s.multiplicity for s in out)
    if total < expected:
        warnings.warn(
            f"found multiplicity total {total} of {expected} exact-period "
            f"solutions; increase seeds_per_root",
            IncompleteEnumerationWarning)
    if total > expected:
        raise CountOverflowError(
            f"multiplicity total {total} exceeds the exact-period Bezout "
            f"count {expected}")
    out.sort(key=lambda p: (p.parameter[0].real, p.parameter[0].imag,
                            p.parameter[1].real, p.parameter[1].imag))
    return out


def _assign_multiplicities(sols: list[CenterPoint], n0: int, n1: int,
                           seed: int) -> list[CenterPoint]:
    """Local intersection multiplicity at each solution: the number of
    nearby solutions of a generically perturbed system (the local degree of
    the return map), counted within a ball kept clear of the neighbors."""
    if not sols:
        return sols
    params = np.array([[s.parameter[0], s.parameter[1]] for s in sols])
    rng = np.random.default_rng(seed + 1)
    eps0 = 1e-9 * np.exp(0.73j)
    eps1 = 1e-9 * np.exp(2.11j)
    out = []
    for i, s in enumerate(sols):
        p0 = params[i]
        gaps = [np.linalg.norm(p0 - params[j]) for j in range(len(sols))
                if j != i]
        ball = min([3e-2] + [0.45 * g for g in gaps])
        n_seed = 48
        c = p0[0] + 0.5 * ball * (rng.standard_normal(n_seed)
                                  + 1j * rng.standard_normal(n_seed))
        a = p0[1] + 0.5 * ball * (rng.standard_normal(n_seed)
                                  + 1j * rng.standard_normal(n_seed))
        for _ in range(80):
            (g0, g1), ((g0c, g0a), (g1c, g1a)) = \
                _pca3_center_system(c, a, n0, n1)
            g0 = g0 - eps0
            g1 = g1 - eps1
            det = g0c * g1a - g0a * g1c
            with np.errstate(divide="ignore", invalid="ignore"):
                sc = (g0 * g1a - g1 * g0a) / det
                sa = (g1 * g0c - g0 * g1c) / det
            bad = ~(np.isfinite(sc) & np.isfinite(sa))
            sc[bad] = 0.0
            sa[bad] = 0.0
            c = c - sc
            a = a - sa
        (g0, g1), _ = _pca3_center_system(c, a, n0, n1)
        res = np.abs(g0 - eps0) + np.abs(g1 - eps1)
        near = (np.isfinite(res) & (res < 1e-10)
                & (np.abs(c - p0[0]) + np.abs(a - p0[1]) < ball))
        pts: list[complex] = []
        for cc, aa in zip(c[near], a[near]):
            key = (complex(cc), complex(aa))
            if all(abs(key[0] - u) + abs(key[1] - v) > 1e-5 for u, v in pts):
                pts.append(key)
        out.append(CenterPoint(s.parameter, s.periods, s.residuals,
                               multiplicity=max(1, len(pts))))
    return out


def _expected_exact_pairs(n0: int, n1: int) -> int:
    """Number of (c, a) with exact periods (n0, n1): the product of the
    exact-period divisor degrees D_n (the curve of parameters where a marked
    critical point has exact period n has degree D_n)."""
    return (arith.affine_cycle_point_count(3, n0)
            * arith.affine_cycle_point_count(3, n1))


# ---------------------------------------------------------------------------
# multiplier continuation
# ---------------------------------------------------------------------------


def _quad_cycle_system(c, z, p, w):
    """Residual and Jacobian of (f_c^p(z) - z, multiplier - w) for z^2 + c,
    with exact forward-mode derivatives."""
    zk = z
    dz_z = 1.0 + 0.0j
    dz_c = 0.0 + 0.0j
    lam = 1.0 + 0.0j
    dlam_z = 0.0 + 0.0j
    dlam_c = 0.0 + 0.0j
    for _ in range(p):
        dlam_z = dlam_z * 2.0 * zk + lam * 2.0 * dz_z
        dlam_c = dlam_c * 2.0 * zk + lam * 2.0 * dz_c
        lam = lam * 2.0 * zk
        new = zk * zk + c
        dz_z = 2.0 * zk * dz_z
        dz_c = 2.0 * zk * dz_c + 1.0
        zk = new
    g = np.array([zk - z, lam - w])
    J = np.array([[dz_c, dz_z - 1.0], [dlam_c, dlam_z]])
    return g, J


def multiplier_continuation(spec: FamilySpec, center: CenterPoint,
                            target_w, steps: int = 20,
                            tol: float = 1e-12):
    """Parameter in the hyperbolic component of ``center`` where the marked
    attracting cycles have the prescribed multipliers.

    Predictor-corrector in the path variable s (multiplier targets s*w for
    s from 0 to 1) with Newton correction on the cycle-and-parameter
    augmented system; step halving down to 1e-4 before PATH_LOSS, and
    NOT_IN_COMPONENT when the continued cycle changes exact period.
    """
    w = np.atleast_1d(np.asarray(target_w, dtype=complex))
    if np.any(np.abs(w) > 0.95):
        raise PreconditionError("multiplier targets must satisfy |w| <= 0.95")
    if max(center.residuals) > 1e-8:
        raise PreconditionError("center residuals too large")
    if spec.kind == "QuadraticPoly":
        if len(w) != 1:
            raise PreconditionError("quadratic family carries one cycle")
        return _continue_quad(center, complex(w[0]), steps, tol)
    if spec.kind == "PcaPoly" and spec.degree == 3:
        if len(w) != 2:
            raise PreconditionError("marked cubic family carries two cycles")
        return _continue_pca3(center, complex(w[0]), complex(w[1]), steps, tol)
    raise PreconditionError(f"continuation not supported for {spec.kind}")


def _newton_2x2(g, J):
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    if det == 0 or not np.isfinite(det):
        return None
    return np.array([(g[0] * J[1, 1] - g[1] * J[0, 1]) / det,
                     (g[1] * J[0, 0] - g[0] * J[1, 0]) / det])


def _continue_quad(center: CenterPoint, w: complex, steps: int, tol: float
                   ) -> complex:
    p = center.periods.periods[0]
    c = complex(center.parameter[0])
    z = 0.0 + 0.0j  # the critical point lies on the superattracting cycle
    s = 0.0
    ds = 1.0 / steps
    while s < 1.0 - 1e-15:
        s_next = min(1.0, s + ds)
        c_try, z_try = c, z
        ok = False
        for _ in range(60):
            g, J = _quad_cycle_system(c_try, z_try, p, s_next * w)
            step = _newton_2x2(g, J)
            if step is None or not np.all(np.isfinite(step)):
                break
            c_try, z_try = c_try - step[0], z_try - step[1]
            if np.max(np.abs(step)) < tol * (1.0 + abs(c_try) + abs(z_try)):
                ok = True
                break
        if ok:
            c, z, s = c_try, z_try, s_next
        else:
            ds *= 0.5
            if ds < 1e-4:
                raise PathLossError(
                    f"Newton diverged at s = {s:.6f} with minimal step")
    # exact-period recheck: the cycle must not have collapsed
    zz = z
    for m in range(1, p):
        zz = zz * zz + c
        if abs(zz - z) <= 1e-8:
            raise NotInComponentError(
                f"continued cycle closed early at step {m} < {p}")
    # the critical point must be attracted by the continued cycle
    cycle = []
    zz = z
    for _ in range(p):
        cycle.append(zz)
        zz = zz * zz + c
    orbit = 0.0 + 0.0j
    for _ in range(600 * p):
        orbit = orbit * orbit + c
        if not (abs(orbit) < 1e12):
            raise NotInComponentError("critical orbit escaped")
    if min(abs(orbit - u) for u in cycle) > 1e-6:
        raise NotInComponentError("critical point not attracted by the "
                                  "continued cycle")
    return c


def _pca3_cycle_block(c, a, z, p, w):
    """Residuals (P^p(z) - z, multiplier - w) and the row of derivatives
    with respect to (c, a, z)."""
    zk = z
    d_z, d_c, d_a = 1.0 + 0j, 0.0 + 0j, 0.0 + 0j
    lam, l_z, l_c, l_a = 1.0 + 0j, 0.0 + 0j, 0.0 + 0j, 0.0 + 0j
    for _ in range(p):
        fp = zk * zk - c * zk  # P'(z) = z^2 - c z
        fpp_z = 2.0 * zk - c
        l_z = l_z * fp + lam * (fpp_z * d_z)
        l_c = l_c * fp + lam * (fpp_z * d_c - zk)
        l_a = l_a * fp + lam * (fpp_z * d_a)
        lam = lam * fp
        z2 = zk * zk
        new = z2 * zk / 3.0 - 0.5 * c * z2 + a**3
        nd_z = fp * d_z
        nd_c = fp * d_c - 0.5 * z2
        nd_a = fp * d_a + 3.0 * a**2
        zk, d_z, d_c, d_a = new, nd_z, nd_c, nd_a
    return ((zk - z, (d_c, d_a, d_z - 1.0)),
            (lam - w, (l_c, l_a, l_z)))


def _pca3_attracted_to(c: complex, a: complex, z_start: complex,
                       cycle_rep: complex, p: int, tol: float = 1e-6
                       ) -> bool:
    """Whether the forward orbit of ``z_start`` converges to the period-p
    cycle through ``cycle_rep``."""
    cycle = []
    z = complex(cycle_rep)
    for _ in range(p):
        cycle.append(z)
        z = z**3 / 3.0 - 0.5 * c * z * z + a**3
    z = complex(z_start)
    for _ in range(600 * p):
        z = z**3 / 3.0 - 0.5 * c * z * z + a**3
        if not (abs(z) < 1e12):
            return False
    return min(abs(z - u) for u in cycle) <= tol


def _continue_pca3(center: CenterPoint, w0: complex, w1: complex,
                   steps: int, tol: float) -> tuple[complex, complex]:
    """One full predictor-corrector pass per step count; the in-component
    landing check in the caller decides whether to escalate."""
    n0, n1 = center.periods.periods
    c = complex(center.parameter[0])
    a = complex(center.parameter[1])
    z0, z1 = 0.0 + 0.0j, c  # critical points start on their cycles
    for attempt in range(3):
        try:
            x = _pca3_follow(c, a, z0, z1, n0, n1, w0, w1,
                             steps * 4**attempt, tol)
        except (PathLossError, NotInComponentError):
            if attempt == 2:
                raise
            continue
        cc, aa = complex(x[0]), complex(x[1])
        # the marked critical points must be attracted by the continued
        # cycles, or the path jumped to a different solution sheet
        if (_pca3_attracted_to(cc, aa, 0.0, complex(x[2]), n0)
                and _pca3_attracted_to(cc, aa, cc, complex(x[3]), n1)):
            return cc, aa
    raise NotInComponentError(
        "continuation landed outside the component (critical points are "
        "not attracted by the continued cycles)")


def _pca3_follow(c, a, z0, z1, n0, n1, w0, w1, steps, tol):
    s = 0.0
    ds = 1.0 / steps
    x = np.array([c, a, z0, z1], dtype=complex)
    # at centers with a superattracting fixed critical point the multiplier
    # map has a cube-root branch point (the map depends on a only through
    # a^3), leaving the Jacobian singular; step off the branch point before
    # path following and let the final recheck confirm the landing
    retries = 0
    while s < 1.0 - 1e-15:
        s_next = min(1.0, s + ds)
        y = x.copy()
        ok = False
        for _ in range(60):
            (r0, (r0c, r0a, r0z)), (m0, (m0c, m0a, m0z)) = \
                _pca3_cycle_block(y[0], y[1], y[2], n0, s_next * w0)
            (r1, (r1c, r1a, r1z)), (m1, (m1c, m1a, m1z)) = \
                _pca3_cycle_block(y[0], y[1], y[3], n1, s_next * w1)
            g = np.array([r0, r1, m0, m1])
            if np.max(np.abs(g)) < tol * (1.0 + np.max(np.abs(y))):
                ok = True
                break
            J = np.array([[r0c, r0a, r0z, 0.0],
                          [r1c, r1a, 0.0, r1z],
                          [m0c, m0a, m0z, 0.0],
                          [m1c, m1a, 0.0, m1z]], dtype=complex)
            step, *_ = np.linalg.lstsq(J, g, rcond=None)
            if not np.all(np.isfinite(step)):
                break
            y = y - step
            if np.max(np.abs(y)) > 1e6:
                break
        if ok:
            x, s = y, s_next
        else:
            ds *= 0.5
            if ds < 1e-4:
                if s == 0.0 and retries < 6:
                    retries += 1
                    phase = np.exp(2j * np.pi * retries / 7.0)
                    x = np.array([c, a + 2e-2 * phase, z0 + 1e-2 * phase,
                                  z1], dtype=complex)
                    ds = 1.0 / steps
                    continue
                raise PathLossError(
                    f"Newton diverged at s = {s:.6f} with minimal step")
    cc, aa = complex(x[0]), complex(x[1])
    for z, p in ((complex(x[2]), n0), (complex(x[3]), n1)):
        zz = z
        for m in range(1, p):
            zz = zz**3 / 3.0 - 0.5 * cc * zz * zz + aa**3
            if abs(zz - z) <= 1e-8:
                raise NotInComponentError(
                    f"continued cycle closed early at step {m} < {p}")
    return x


def quad_cycle_multiplier(c: complex, p: int) -> complex:
    """Multiplier of the attracting period-p cycle of z^2 + c found from the
    critical orbit (the critical point converges to it)."""
    z = 0.0 + 0.0j
    for _ in range(400 * p):
        for _ in range(p):
            z = z * z + c
    lam = 1.0 + 0.0j
    zz = z
    for _ in range(p):
        lam *= 2.0 * zz
        zz = zz * zz + c
    return complex(lam)


def pca3_cycle_multiplier(c: complex, a: complex, z0: complex, p: int
                          ) -> complex:
    z = complex(z0)
    for _ in range(400 * p):
        for _ in range(p):
            z = z**3 / 3.0 - 0.5 * c * z * z + a**3
    lam = 1.0 + 0.0j
    zz = z
    for _ in range(p):
        lam *= zz * zz - c * zz
        zz = zz**3 / 3.0 - 0.5 * c * zz * zz + a**3
    return complex(lam)


# ---------------------------------------------------------------------------
# component counting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComponentCount:
    N: int
    marked_solutions: int
    stab: int
    deficiency: float
    merged_solutions: int
    merged_fraction: float
    bezout: int


def component_count(spec: FamilySpec, periods: arith.PeriodTuple,
                    tol: float = 1e-12) -> ComponentCount:
    """Distinct hyperbolic components whose attracting cycles have the given
    exact periods, with the normalized counting deficiency
    1 - stab * N / ((d-1)! * prod d_(n_j)).

    For the marked cubic family the deficiency is, when enumeration is
    complete, exactly the fraction of marked solutions whose two cycles
    merge into one orbit; both numbers are reported.
    """
    stab = arith.stab_count(periods)
    if spec.kind == "QuadraticPoly":
        (n,) = periods.periods
        centers = centers_1d(spec, n, tol)
        N = len(centers)
        # critically marked normalization of the degree-2 polynomial family:
        # each z^2 + c parameter corresponds to two marked parameters
        d_tuple = arith.exact_cycle_point_count(2, n) if n >= 2 \
            else arith.affine_cycle_point_count(2, 1)
        deficiency = 1.0 - (stab * 2 * N) / d_tuple
        return ComponentCount(N=N, marked_solutions=N, stab=stab,
                              deficiency=deficiency, merged_solutions=0,
                              merged_fraction=0.0, bezout=d_tuple)
    if spec.kind != "PcaPoly" or len(periods.periods) != 2:
        raise PreconditionError("counting supports quad and the marked "
                                "cubic family")
    n0, n1 = periods.periods
    markings = [(n0, n1)] if n0 == n1 else [(n0, n1), (n1, n0)]
    all_sols: list[tuple[CenterPoint, tuple[int, int]]] = []
    for m0, m1 in markings:
        for s in centers_2d(spec, m0, m1, tol):
            all_sols.append((s, (m0, m1)))
    both = 2 if n0 == n1 else 1  # one run of the system covers both markings
    marked_total = sum(s.multiplicity for s, _ in all_sols) * both
    merged = 0
    good_params: list[tuple[complex, complex]] = []
    for s, _ in all_sols:
        c, a = s.parameter
        if _pca3_cycles_merged(c, a, s.periods.periods):
            merged += s.multiplicity
        else:
            good_params.append((c, a))
    merged_marked = merged * both
    # distinct components: good centers deduped across markings
    N = 0
    seen: list[tuple[complex, complex]] = []
    for c, a in good_params:
        if all(abs(c - c2) + abs(a - a2) > 1e-8 for c2, a2 in seen):
            seen.append((c, a))
            N += 1
    d_tuple = (arith.exact_cycle_point_count(3, n0)
               * arith.exact_cycle_point_count(3, n1))
    denom = 2 * d_tuple  # (d-1)! = 2
    deficiency = 1.0 - (stab * N) / denom
    return ComponentCount(
        N=N, marked_solutions=marked_total, stab=stab, deficiency=deficiency,
        merged_solutions=merged_marked,
        merged_fraction=merged_marked / denom,
        bezout=(arith.affine_cycle_point_count(3, n0)
                * arith.affine_cycle_point_count(3, n1)) * len(markings))


def _pca3_cycles_merged(c: complex, a: complex, periods: tuple[int, ...],
                        tol: float = 1e-8) -> bool:
    """Whether the two marked critical orbits lie on one periodic orbit."""
    n0, n1 = periods
    orbit0 = []
    z = 0.0 + 0.0j
    for _ in range(n0):
        orbit0.append(z)
        z = z**3 / 3.0 - 0.5 * c * z * z + a**3
    z = complex(c)
    for _ in range(n1):
        if any(abs(z - u) <= tol for u in orbit0):
            return True
        z = z**3 / 3.0 - 0.5 * c * z * z + a**3
    return False
