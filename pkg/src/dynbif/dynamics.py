"""Rational maps on the sphere via homogeneous lifts.

A degree-d map is a pair of degree-d homogeneous forms in (z0, z1); forms are
stored as complex vectors of length m+1 indexed by z0-degree, so the affine
chart z1 = 1 reads the vector directly as an ascending univariate polynomial.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import arith
from .cpoly import ComplexPolynomial, _sylvester_matrix, roots_blackbox
from .errors import (
    DegenerateMapError,
    OrbitMismatchError,
    ParabolicContaminationError,
    PreconditionError,
)

DESK_DEGREE_CAP = 20_000
NEUTRAL_TOL = 1e-8
SUPERATTRACTING_TOL = 1e-10
PARABOLIC_ROOT_OF_UNITY_TOL = 1e-6

# fixed unitary used when the default chart puts periodic points near infinity
_ROTATION = np.array(
    [[0.8071066 + 0.11j, -0.57 + 0.1j], [0.57 + 0.1j, 0.8071066 - 0.11j]],
    dtype=np.complex128,
)
_ROTATION /= np.sqrt(np.abs(np.linalg.det(_ROTATION)))


# ---------------------------------------------------------------------------
# homogeneous forms
# ---------------------------------------------------------------------------


def form_eval(coeffs: np.ndarray, z0, z1):
    """Evaluate sum_k c_k z0^k z1^(m-k), Horner in whichever chart keeps the
    ratio inside the unit disk."""
    c = np.asarray(coeffs, dtype=np.complex128)
    m = len(c) - 1
    z0 = np.asarray(z0, dtype=np.complex128)
    z1 = np.asarray(z1, dtype=np.complex128)
    scalar = z0.ndim == 0
    z0, z1 = np.atleast_1d(z0), np.atleast_1d(z1)
    out = np.empty_like(z0)
    lo = np.abs(z0) <= np.abs(z1)
    if np.any(lo):
        t = z0[lo] / z1[lo]
        acc = np.full_like(t, c[m])
        for k in range(m - 1, -1, -1):
            acc = acc * t + c[k]
        out[lo] = acc * z1[lo] ** m
    hi = ~lo
    if np.any(hi):
        t = z1[hi] / z0[hi]
        acc = np.full_like(t, c[0])
        for k in range(1, m + 1):
            acc = acc * t + c[k]
        out[hi] = acc * z0[hi] ** m
    return complex(out[0]) if scalar else out


def form_partial(coeffs: np.ndarray, var: int) -> np.ndarray:
    """Coefficient vector of the partial derivative with respect to z0
    (var=0) or z1 (var=1)."""
    c = np.asarray(coeffs, dtype=np.complex128)
    m = len(c) - 1
    if m == 0:
        return np.zeros(1, dtype=np.complex128)
    if var == 0:
        return c[1:] * np.arange(1, m + 1)
    return c[:-1] * (m - np.arange(m))


def _form_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)


def compose_forms(outer_num: np.ndarray, outer_den: np.ndarray,
                  inner_num: np.ndarray, inner_den: np.ndarray
                  ) -> tuple[np.ndarray, np.ndarray]:
    """Substitute the inner pair (degree m forms) into the outer pair
    (degree d forms); results are degree d*m forms."""
    d = len(outer_num) - 1
    apow = [np.ones(1, dtype=np.complex128)]
    bpow = [np.ones(1, dtype=np.complex128)]
    for _ in range(d):
        apow.append(_form_mul(apow[-1], inner_num))
        bpow.append(_form_mul(bpow[-1], inner_den))
    m = len(inner_num) - 1
    out_n = np.zeros(d * m + 1, dtype=np.complex128)
    out_d = np.zeros(d * m + 1, dtype=np.complex128)
    for k in range(d + 1):
        if outer_num[k] != 0 or outer_den[k] != 0:
            term = _form_mul(apow[k], bpow[d - k])
            pad = np.zeros(d * m + 1, dtype=np.complex128)
            pad[: len(term)] = term
            out_n += outer_num[k] * pad
            out_d += outer_den[k] * pad
    return out_n, out_d


# ---------------------------------------------------------------------------
# resultant
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=32)
def _resultant_normalizer(d: int) -> complex:
    a = np.zeros(d + 1, dtype=np.complex128)
    a[d] = 1.0  # z0^d
    b = np.zeros(d + 1, dtype=np.complex128)
    b[0] = 1.0  # z1^d
    return complex(np.linalg.det(_sylvester_matrix(a, b)))


def homogeneous_resultant(num: np.ndarray, den: np.ndarray) -> complex:
    """Resultant of two degree-d forms, normalized so the monomial pair
    (z0^d, z1^d) has resultant 1."""
    num = np.asarray(num, dtype=np.complex128)
    den = np.asarray(den, dtype=np.complex128)
    if len(num) != len(den) or len(num) < 2:
        raise PreconditionError("lift components must share a degree >= 1")
    d = len(num) - 1
    det = complex(np.linalg.det(_sylvester_matrix(num, den)))
    return det / _resultant_normalizer(d)


# ---------------------------------------------------------------------------
# points on the sphere
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpherePoint:
    """Point of the projective line as a unit vector (z0, z1)."""

    vec: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=np.complex128)
        if v.shape != (2,) or not np.all(np.isfinite(v)):
            raise PreconditionError("sphere point needs a finite pair")
        norm = np.linalg.norm(v)
        if norm == 0:
            raise PreconditionError("zero vector does not project")
        object.__setattr__(self, "vec", v / norm)

    @staticmethod
    def from_affine(z: complex) -> "SpherePoint":
        return SpherePoint(np.array([z, 1.0], dtype=np.complex128))

    @staticmethod
    def infinity() -> "SpherePoint":
        return SpherePoint(np.array([1.0, 0.0], dtype=np.complex128))

    @property
    def is_infinity(self) -> bool:
        return abs(self.vec[1]) == 0.0

    def affine(self) -> complex:
        if self.vec[1] == 0:
            raise PreconditionError("point at infinity has no affine value")
        return complex(self.vec[0] / self.vec[1])


def chordal_distance(z: SpherePoint, w: SpherePoint) -> float:
    """Chordal metric normalized to diameter 1: |z ^ w| on unit vectors."""
    return float(abs(z.vec[0] * w.vec[1] - z.vec[1] * w.vec[0]))


# ---------------------------------------------------------------------------
# the lift
# ---------------------------------------------------------------------------


class Stability(Enum):
    SUPERATTRACTING = "superattracting"
    ATTRACTING = "attracting"
    NEUTRAL = "neutral"
    REPELLING = "repelling"


def classify_multiplier(mult: complex) -> Stability:
    mod = abs(mult)
    if mod <= SUPERATTRACTING_TOL:
        return Stability.SUPERATTRACTING
    if abs(mod - 1.0) <= NEUTRAL_TOL:
        return Stability.NEUTRAL
    if mod < 1.0:
        return Stability.ATTRACTING
    return Stability.REPELLING


@dataclass(frozen=True)
class PeriodicCycle:
    exact_period: int
    points: tuple[SpherePoint, ...]
    multiplier: complex

    @property
    def stability(self) -> Stability:
        return classify_multiplier(self.multiplier)


@dataclass(frozen=True)
class RationalMapLift:
    """Non-degenerate pair of degree-d homogeneous forms."""

    num: np.ndarray
    den: np.ndarray
    resultant: complex = field(init=False)

    def __post_init__(self):
        num = np.asarray(self.num, dtype=np.complex128)
        den = np.asarray(self.den, dtype=np.complex128)
        if len(num) != len(den) or len(num) < 3:
            raise PreconditionError("lift needs two equal-length forms, degree >= 2")
        if not (np.all(np.isfinite(num)) and np.all(np.isfinite(den))):
            raise PreconditionError("lift coefficients must be finite")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        res = homogeneous_resultant(num, den)
        scale = max(np.max(np.abs(num)), np.max(np.abs(den)))
        if abs(res) < 1e-30 * scale ** (2 * self.degree):
            raise DegenerateMapError(
                f"resultant {abs(res):.3e} vanishes relative to scale")
        object.__setattr__(self, "resultant", res)

    @property
    def degree(self) -> int:
        return len(self.num) - 1

    # -- evaluation -------------------------------------------------------
    def apply_vector(self, v: np.ndarray) -> np.ndarray:
        return np.array(
            [form_eval(self.num, v[0], v[1]), form_eval(self.den, v[0], v[1])],
            dtype=np.complex128,
        )

    def apply(self, p: SpherePoint) -> SpherePoint:
        return SpherePoint(self.apply_vector(p.vec))

    def orbit(self, p: SpherePoint, steps: int) -> list[SpherePoint]:
        out = [p]
        for _ in range(steps):
            out.append(self.apply(out[-1]))
        return out

    # -- affine chart -----------------------------------------------------
    def affine_num(self) -> ComplexPolynomial:
        return ComplexPolynomial(self.num)

    def affine_den(self) -> ComplexPolynomial:
        return ComplexPolynomial(self.den)

    def affine_derivative(self, z: complex) -> complex:
        """(p'q - pq')/q^2 in the z1 = 1 chart."""
        p, q = self.affine_num(), self.affine_den()
        dp, dq = p.derivative(), q.derivative()
        qz = q(z)
        return (dp(z) * qz - p(z) * dq(z)) / qz**2

    # -- derived lifts ----------------------------------------------------
    def scaled(self, alpha: complex) -> "RationalMapLift":
        return RationalMapLift(self.num * alpha, self.den * alpha)

    def conjugate(self, m: np.ndarray) -> "RationalMapLift":
        """Lift of M^-1 o f o M for an invertible 2x2 matrix M."""
        m = np.asarray(m, dtype=np.complex128)
        inner_n = np.array([m[0, 1], m[0, 0]], dtype=np.complex128)
        inner_d = np.array([m[1, 1], m[1, 0]], dtype=np.complex128)
        fn, fd = compose_forms(self.num, self.den, inner_n, inner_d)
        inv = np.linalg.inv(m)
        return RationalMapLift(inv[0, 0] * fn + inv[0, 1] * fd,
                               inv[1, 0] * fn + inv[1, 1] * fd)


def lift_resultant(F: RationalMapLift) -> complex:
    return F.resultant


def chordal_derivative(F: RationalMapLift, z: SpherePoint) -> float:
    """Expansion rate in the chordal metric:
    (1/d) |det DF(p)| ||p||^2 / ||F(p)||^2 at a unit representative."""
    p = z.vec
    j00 = form_eval(form_partial(F.num, 0), p[0], p[1])
    j01 = form_eval(form_partial(F.num, 1), p[0], p[1])
    j10 = form_eval(form_partial(F.den, 0), p[0], p[1])
    j11 = form_eval(form_partial(F.den, 1), p[0], p[1])
    det = j00 * j11 - j01 * j10
    fp = F.apply_vector(p)
    n2 = float(np.abs(fp[0]) ** 2 + np.abs(fp[1]) ** 2)
    return float(abs(det)) / (F.degree * n2)


def _sphere_grid(n: int) -> list[SpherePoint]:
    pts = []
    for theta in np.linspace(0.0, np.pi, n):
        c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
        for phi in np.linspace(0.0, 2.0 * np.pi, n, endpoint=False):
            pts.append(SpherePoint(np.array([c, s * np.exp(1j * phi)])))
    return pts


def lipschitz_square_bound(F: RationalMapLift, grid_n: int = 48,
                           refine_steps: int = 60) -> float:
    """Numeric sup of (f#)^2 by grid maximization plus local ascent.
    Lower bound only."""
    if grid_n < 16:
        raise PreconditionError("grid_n must be >= 16")

    def val(theta, phi):
        c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
        pt = SpherePoint(np.array([c, s * np.exp(1j * phi)]))
        return chordal_derivative(F, pt)

    best = (0.0, 0.0, -1.0)
    for theta in np.linspace(0.0, np.pi, grid_n):
        for phi in np.linspace(0.0, 2.0 * np.pi, grid_n, endpoint=False):
            v = val(theta, phi)
            if v > best[2]:
                best = (theta, phi, v)
    theta, phi, v = best
    step = np.pi / grid_n
    for _ in range(refine_steps):
        improved = False
        for dt, dp in ((step, 0), (-step, 0), (0, step), (0, -step)):
            t2 = min(max(theta + dt, 0.0), np.pi)
            v2 = val(t2, phi + dp)
            if v2 > v:
                theta, phi, v = t2, phi + dp, v2
                improved = True
        if not improved:
            step *= 0.5
            if step < 1e-9:
                break
    return v * v


# ---------------------------------------------------------------------------
# iterates and dynatomic polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _ScaledIterate:
    num: np.ndarray
    den: np.ndarray
    log_scale: float  # true iterate = exp(log_scale) * (num, den)


def lift_iterates(F: RationalMapLift, n: int) -> list[_ScaledIterate]:
    """F^1 .. F^n with per-step max-modulus rescaling (scalar tracked)."""
    out = [_ScaledIterate(F.num.copy(), F.den.copy(), 0.0)]
    d = F.degree
    for _ in range(1, n):
        prev = out[-1]
        num, den = compose_forms(F.num, F.den, prev.num, prev.den)
        log_scale = d * prev.log_scale
        scale = max(np.max(np.abs(num)), np.max(np.abs(den)))
        if scale > 0:
            num = num / scale
            den = den / scale
            log_scale += np.log(scale)
        out.append(_ScaledIterate(num, den, log_scale))
    return out


def _check_dynatomic_caps(F: RationalMapLift, n: int) -> None:
    if n < 1:
        raise PreconditionError("period must be >= 1")
    if F.degree**n > DESK_DEGREE_CAP:
        raise PreconditionError(
            f"d^n = {F.degree**n} exceeds the desk cap {DESK_DEGREE_CAP}")


def infinity_exact_period(F: RationalMapLift, n: int, tol: float = 1e-9
                          ) -> int | None:
    """Exact period of the point at infinity if it is periodic with period
    <= n, else None."""
    start = SpherePoint.infinity()
    current = start
    for m in range(1, n + 1):
        current = F.apply(current)
        if chordal_distance(current, start) <= tol:
            return m
    return None


def dynatomic_polynomial(F: RationalMapLift, n: int
                         ) -> tuple[ComplexPolynomial, int]:
    """Affine chart (z1 = 1) of the degree-d_n dynatomic form, together with
    the number of its roots at infinity.

    Built as the Moebius-alternating product of the fixed-point forms
    F^k ^ id over k | n, with the negative-exponent factors removed by exact
    division.  The root count at infinity is decided structurally from the
    orbit of infinity, because for larger n the coefficient spread of the
    affine chart swamps its (often tiny) leading coefficients and makes the
    numerical degree meaningless.
    """
    _check_dynatomic_caps(F, n)
    iterates = lift_iterates(F, n)
    wedges: dict[int, ComplexPolynomial] = {}
    for k in arith.divisors(n):
        it = iterates[k - 1]
        w = np.zeros(len(it.num) + 1, dtype=np.complex128)
        w[: len(it.num)] += it.num  # num * z1 keeps z0-degrees
        w[1:] -= it.den  # den * z0 shifts z0-degrees up
        wedges[k] = ComplexPolynomial(w)
    numer = ComplexPolynomial(np.ones(1))
    denom = ComplexPolynomial(np.ones(1))
    for k, w in wedges.items():
        if arith.moebius(n // k) == 1:
            numer = numer * w
        elif arith.moebius(n // k) == -1:
            denom = denom * w
    phi = numer.exact_divide(denom)
    d_n = arith.exact_cycle_point_count(F.degree, n)
    inf_count = infinity_root_count(F, n)
    if phi.degree > d_n - inf_count:
        raise OrbitMismatchError(
            f"dynatomic degree {phi.degree} exceeds expected {d_n - inf_count}")
    return phi, inf_count


def infinity_root_count(F: RationalMapLift, n: int) -> int:
    """Number of period-n dynatomic roots at infinity (0 or 1 away from
    parabolic degeneracy), decided from the orbit of infinity."""
    m = infinity_exact_period(F, n)
    if m == n:
        return 1
    if m is not None and n % m == 0:
        mult = cycle_multiplier(F, F.orbit(SpherePoint.infinity(), m - 1))
        if abs(mult ** (n // m) - 1.0) <= PARABOLIC_ROOT_OF_UNITY_TOL:
            raise ParabolicContaminationError(
                f"infinity is a parabolic period-{m} point contaminating the "
                f"period-{n} dynatomic root set")
    return 0


def period_wedge_evaluator(F: RationalMapLift, n: int):
    """Black-box evaluator for the full period-n fixed-point locus.

    Returns eval_fn(z) -> (p, dp) evaluating the wedge of F^n against the
    identity in the affine chart (a degree d^n + 1 polynomial whose roots are
    all points of period dividing n), with a shared per-point rescaling.
    Orbits and their z-derivatives run on unit sphere representatives, so the
    evaluation stays stable where any coefficient expansion is hopelessly
    ill-conditioned.
    """
    dn0 = form_partial(F.num, 0)
    dn1 = form_partial(F.num, 1)
    dd0 = form_partial(F.den, 0)
    dd1 = form_partial(F.den, 1)

    def eval_fn(z: np.ndarray):
        z = np.asarray(z, dtype=np.complex128)
        v0 = z.copy()
        v1 = np.ones_like(z)
        u0 = np.ones_like(z)
        u1 = np.zeros_like(z)
        for _ in range(n):
            w0 = form_eval(F.num, v0, v1)
            w1 = form_eval(F.den, v0, v1)
            j00 = form_eval(dn0, v0, v1)
            j01 = form_eval(dn1, v0, v1)
            j10 = form_eval(dd0, v0, v1)
            j11 = form_eval(dd1, v0, v1)
            t0 = j00 * u0 + j01 * u1
            t1 = j10 * u0 + j11 * u1
            s = np.maximum(np.abs(w0), np.abs(w1))
            s[s == 0] = 1.0
            v0, v1 = w0 / s, w1 / s
            u0, u1 = t0 / s, t1 / s
        return v0 - v1 * z, u0 - u1 * z - v1

    return eval_fn


def backward_cloud(F: RationalMapLift, count: int, seed: int = 0,
                   burn_in: int = 24) -> np.ndarray:
    """Points spread over the Julia set by breadth-first random backward
    iteration; the cloud equidistributes like the periodic points and makes
    an excellent root-finder initialization for the period-n locus.

    Returned as affine values; branches that wander to infinity are replaced
    by large finite stand-ins."""
    rng = np.random.default_rng(seed)
    d = F.degree
    pts = np.array([0.3 + 0.2j], dtype=np.complex128)
    num = F.num
    den = F.den
    for _ in range(burn_in):
        # batched fiber polynomials num(w) - y*den(w) solved by companion
        # eigenvalues; degree can drop when y passes through the image of
        # infinity, so guard the leading coefficient
        coeffs = num[None, :] - pts[:, None] * den[None, :]
        lead = coeffs[:, -1]
        small = np.abs(lead) < 1e-12 * np.max(np.abs(coeffs), axis=1)
        if np.any(small):
            coeffs[small, -1] = 1e-6 * np.max(np.abs(coeffs[small]), axis=-1)
        comp = np.zeros((len(pts), d, d), dtype=np.complex128)
        comp[:, 1:, :-1] = np.eye(d - 1)
        comp[:, :, -1] = -coeffs[:, :-1] / coeffs[:, -1:]
        pre = np.linalg.eigvals(comp).reshape(-1)
        pre = pre[np.isfinite(pre)]
        big = np.abs(pre) > 1e8
        if np.any(big):
            pre[big] = 1e8 * pre[big] / np.abs(pre[big])
        if len(pre) > count:
            pre = rng.choice(pre, size=count, replace=False)
        pts = pre
    if len(pts) < count:
        # pad with jittered copies; repulsion separates them immediately
        extra = rng.choice(pts, size=count - len(pts), replace=True)
        extra = extra + 1e-6 * (rng.standard_normal(len(extra))
                                + 1j * rng.standard_normal(len(extra)))
        pts = np.concatenate([pts, extra])
    return pts


@dataclass(frozen=True)
class CycleExtraction:
    cycles: tuple[PeriodicCycle, ...]
    contaminated: tuple[PeriodicCycle, ...]  # lower-period parabolic orbits

    @property
    def multiplier_spectrum(self) -> list[tuple[complex, int]]:
        """Distinct (multiplier, cycle count) pairs of the exact-period list."""
        spec: dict[complex, int] = {}
        for c in self.cycles:
            key = complex(np.round(c.multiplier.real, 9),
                          np.round(c.multiplier.imag, 9))
            spec[key] = spec.get(key, 0) + 1
        return sorted(spec.items(), key=lambda kv: (kv[0].real, kv[0].imag))


def cycle_multiplier(F: RationalMapLift, points: list[SpherePoint]) -> complex:
    """Chain-rule product of one-step derivatives along an orbit, rotating
    the chart when the orbit passes near infinity."""
    if any(abs(p.vec[1]) < 1e-3 for p in points):
        G = F.conjugate(_ROTATION)
        inv = np.linalg.inv(_ROTATION)
        pts = [SpherePoint(inv @ p.vec) for p in points]
        return cycle_multiplier(G, pts)
    mult = 1.0 + 0.0j
    for p in points:
        mult *= F.affine_derivative(p.affine())
    return complex(mult)


def exact_cycles(F: RationalMapLift, n: int, tol: float = 1e-10
                 ) -> CycleExtraction:
    """All exact-period-n cycles of F.

    Solves the full period-n fixed-point locus (every point of period
    dividing n) through the orbit-based black-box evaluator, groups roots
    into orbits and keeps the orbits of exact period n.  Lower-period orbits
    whose multiplier is an (n/m)-th root of unity sit inside the period-n
    dynatomic divisor (parabolic contamination); they are returned separately
    and excluded from the exact-period list.
    """
    _check_dynatomic_caps(F, n)
    if F.degree**n + 1 > DESK_DEGREE_CAP + 1:
        raise PreconditionError(
            f"d^n + 1 = {F.degree**n + 1} exceeds the desk cap")
    m_inf = infinity_exact_period(F, n)
    has_inf = m_inf is not None and n % m_inf == 0
    target_deg = F.degree**n + 1 - (1 if has_inf else 0)
    # the backward-orbit cloud already sits on the closure of the periodic
    # points, so the simultaneous iteration starts essentially converged;
    # coefficient-based seeding is hopeless at these degrees
    init = backward_cloud(F, target_deg)
    solver_tol = max(tol * 1e-2, 1e-14)
    evaluator = period_wedge_evaluator(F, n)
    rs = roots_blackbox(evaluator, target_deg, solver_tol, max_iter=3000,
                        init=init)
    points = [SpherePoint.from_affine(z) for z in rs.roots]
    mults = list(rs.multiplicities)
    # a multiple-root cluster keeps Newton ratio ~ cluster radius, while two
    # solver points stacked on one simple root evaluate to ratio ~ machine
    # epsilon: demote those to multiplicity 1 (the orbit walk below recovers
    # any root left uncovered)
    for i, p in enumerate(points):
        if mults[i] > 1 and not p.is_infinity:
            z = np.atleast_1d(p.affine())
            v, dv = evaluator(z)
            ratio = abs(complex(v[0] / dv[0])) if dv[0] != 0 else np.inf
            if ratio <= 100.0 * solver_tol * (1.0 + abs(z[0])):
                mults[i] = 1
    if has_inf:
        points.append(SpherePoint.infinity())
        mults.append(1)
    match_tol = max(10.0 * tol, 5.0 * rs.cluster_radius)

    def polish(z0: complex) -> complex | None:
        z = np.atleast_1d(complex(z0))
        for _ in range(50):
            v, dv = evaluator(z)
            if dv[0] == 0 or not np.isfinite(dv[0]):
                return None
            step = v[0] / dv[0]
            z = z - step
            if abs(step) <= 1e-14 * (1.0 + abs(z[0])):
                return complex(z[0])
        return None
    vecs = np.array([p.vec for p in points])  # (N, 2)
    assigned = np.zeros(len(points), dtype=bool)
    cycles: list[PeriodicCycle] = []
    contaminated: list[PeriodicCycle] = []
    for start in range(len(points)):
        if start >= len(assigned) or assigned[start]:
            continue
        orbit_idx = [start]
        assigned[start] = True
        current = points[start]
        period = None
        for step in range(1, n + 1):
            current = F.apply(current)
            # nearest known periodic point in chordal distance
            cd = np.abs(current.vec[0] * vecs[:, 1] - current.vec[1] * vecs[:, 0])
            j = int(np.argmin(cd))
            if cd[j] > match_tol:
                # the image of a root is a root: a miss means the solver left
                # this one uncovered (a duplicate landed elsewhere); polish it
                # in and carry on
                healed = None
                if not current.is_infinity:
                    healed = polish(current.affine())
                if healed is None:
                    raise OrbitMismatchError(
                        f"orbit left the root set (distance {cd[j]:.3e})")
                points.append(SpherePoint.from_affine(healed))
                mults.append(1)
                vecs = np.vstack([vecs, points[-1].vec[None, :]])
                assigned = np.append(assigned, False)
                cd = np.append(cd, 0.0)
                j = len(points) - 1
            if j == start:
                period = step
                break
            if assigned[j] and j not in orbit_idx:
                raise OrbitMismatchError("orbit collision between root groups")
            if not assigned[j]:
                orbit_idx.append(j)
                assigned[j] = True
        if period is None or n % period != 0:
            raise OrbitMismatchError("orbit period does not divide n")
        orbit_points = [points[i] for i in orbit_idx]
        mult_p = cycle_multiplier(F, orbit_points)
        cyc = PeriodicCycle(period, tuple(orbit_points), mult_p)
        if period == n:
            # root multiplicity > 1 only at parabolic exact-n cycles, where
            # the dynatomic divisor counts them with that multiplicity
            for _ in range(int(min(mults[i] for i in orbit_idx))):
                cycles.append(cyc)
        elif abs(mult_p ** (n // period) - 1.0) <= PARABOLIC_ROOT_OF_UNITY_TOL:
            contaminated.append(cyc)
        # other lower-period orbits belong to smaller dynatomic divisors only
    if not contaminated:
        d_n = arith.exact_cycle_point_count(F.degree, n)
        found = n * len(cycles)
        if found != d_n:
            raise OrbitMismatchError(
                f"found {found} exact-period-{n} points, expected {d_n}")
    return CycleExtraction(tuple(cycles), tuple(contaminated))


def multiplier_polynomial(F: RationalMapLift, n: int, tol: float = 1e-10
                          ) -> ComplexPolynomial:
    """Polynomial in w with one factor (multiplier - w) per exact-period-n
    cycle; degree d_n / n.  The n-th-root ambiguity of per-point multiplier
    roots is avoided by the one-factor-per-cycle convention."""
    ext = exact_cycles(F, n, tol)
    if ext.contaminated:
        raise ParabolicContaminationError(
            f"{len(ext.contaminated)} lower-period parabolic orbits in the "
            f"dynatomic root set")
    out = ComplexPolynomial(np.ones(1))
    for cyc in ext.cycles:
        out = out * ComplexPolynomial(
            np.array([cyc.multiplier, -1.0], dtype=np.complex128))
    return out
