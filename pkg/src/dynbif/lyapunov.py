"""Lyapunov exponents of rational maps.

Three independent routes to the same number:

* periodic averages over exact-period multiplier spectra (the estimator whose
  convergence this package studies),
* escape-rate Green's functions, giving the closed form
  L = log d + sum over critical points of the Green value (polynomials only),
* backward-orbit Monte Carlo sampling of the maximal measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import arith
from .dynamics import (
    PeriodicCycle,
    RationalMapLift,
    SpherePoint,
    chordal_derivative,
    exact_cycles,
)
from .errors import (
    ExceptionalStartError,
    IllConditionedError,
    NoConvergenceError,
    ParabolicContaminationError,
    PreconditionError,
)

GREEN_TOL = 1e-14
ESCAPE_RADIUS = 1e150


# ---------------------------------------------------------------------------
# Green's functions
# ---------------------------------------------------------------------------


def normalization_shift(F: RationalMapLift) -> float:
    """-log|Res(F)| / (2 d (d - 1)): the additive constant making the
    homogeneous escape potential of a lift independent of the chosen lift.

    Scaling the lift by alpha adds log|alpha| / (d - 1) to the potential and
    multiplies the resultant by alpha**(2d), so the combination
    G + shift is scaling-invariant."""
    d = F.degree
    return -float(np.log(abs(F.resultant))) / (2.0 * d * (d - 1))


def green_value(F: RationalMapLift, z: SpherePoint, max_iter: int = 600,
                tol: float = GREEN_TOL) -> float:
    """Homogeneous potential g_F at a unit representative,
    lim d^-k log ||F^k(p)||, by the per-step normalized escape sum
    sum_k u(p_k) / d^(k+1) with u(p) = log ||F(p)|| on unit p."""
    if max_iter < 1:
        raise PreconditionError("max_iter must be >= 1")
    d = F.degree
    v = z.vec.copy()
    total = 0.0
    comp = 0.0
    weight = 1.0 / d
    # |log ||F(unit)||| is bounded by the coefficient scale, so the tail after
    # k steps is bounded by that scale times the remaining geometric weight
    bound = np.log1p(float(max(np.max(np.abs(F.num)), np.max(np.abs(F.den))))
                     * (d + 1))
    for _ in range(max_iter):
        w = F.apply_vector(v)
        nrm = float(np.linalg.norm(w))
        if not np.isfinite(nrm) or nrm == 0.0:
            raise NoConvergenceError("escape sum hit a non-finite norm")
        term = weight * np.log(nrm)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        v = w / nrm
        weight /= d
        if bound * weight * d / (d - 1) < tol:
            return total
    raise NoConvergenceError(f"escape sum tail above {tol} after {max_iter} steps")


@dataclass(frozen=True)
class GreenData:
    """The homogeneous potential of a lift as a callable, with the constant
    shifting it to the lift-independent normalization."""

    lift: RationalMapLift
    iterations: int = 600
    tol: float = GREEN_TOL
    normalization_shift: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "normalization_shift",
                           normalization_shift(self.lift))

    def __call__(self, z: SpherePoint) -> float:
        return green_value(self.lift, z, self.iterations, self.tol)

    def normalized(self, z: SpherePoint) -> float:
        return self(z) + self.normalization_shift


def green_normalized(F: RationalMapLift, z: SpherePoint,
                     tol: float = GREEN_TOL) -> float:
    """Lift-independent potential g_F - log|Res| / (2d(d-1))."""
    return green_value(F, z, tol=tol) + normalization_shift(F)


def polynomial_green(coeffs: np.ndarray, z: complex, max_iter: int = 2000
                     ) -> float:
    """Escape-rate Green's function of an affine polynomial at z: the limit of
    d^-k log+ |p^k(z)|.  Returns 0.0 for bounded orbits."""
    c = np.asarray(coeffs, dtype=np.complex128)
    d = len(c) - 1
    if d < 2 or c[-1] == 0:
        raise PreconditionError("polynomial must have degree >= 2")
    w = complex(z)
    for k in range(max_iter):
        if abs(w) > ESCAPE_RADIUS:
            # far out, log|p(w)| = d log|w| + log|a_d| + O(1/|w|); summing the
            # geometric corrections gives machine precision immediately
            # float(d) ** -k underflows gracefully to 0.0 for huge k
            return (np.log(abs(w))
                    + np.log(abs(c[-1])) / (d - 1)) * float(d) ** (-k)
        acc = c[d]
        for j in range(d - 1, -1, -1):
            acc = acc * w + c[j]
        w = acc
    return 0.0


def lyap_poly_closed_form(coeffs: np.ndarray) -> float:
    """Closed form for affine polynomials: log d plus the escape-rate Green
    values at the finite critical points (with multiplicity)."""
    c = np.asarray(coeffs, dtype=np.complex128)
    d = len(c) - 1
    if d < 2 or c[-1] == 0:
        raise PreconditionError("polynomial must have degree >= 2")
    deriv = c[1:] * np.arange(1, d + 1)
    crits = np.roots(deriv[::-1])
    total = float(np.log(d))
    for z in crits:
        total += polynomial_green(c, complex(z))
    return total


# ---------------------------------------------------------------------------
# periodic estimator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LyapunovEstimate:
    value: float
    period: int
    radius: float
    cycle_count: int
    degree: int
    floored_cycles: int


def _check_radius(r: float) -> None:
    if not (0.0 < r <= 1.0):
        raise PreconditionError("multiplier floor r must lie in (0, 1]")


def lyap_from_spectrum(spectrum, degree: int, period: int, r: float = 1.0
                       ) -> LyapunovEstimate:
    """Periodic average from an aggregated multiplier spectrum.

    ``spectrum`` is a list of PeriodicCycle or of (multiplier, cycle-count)
    pairs covering all exact-period-``period`` cycles.  Every point of a cycle
    shares the cycle multiplier, so
    L_n^r = (1/(n d_n)) * sum over points of log max(|mult|, r)
    collapses to (1/d_n) * sum over cycles.
    """
    _check_radius(r)
    spec: list[tuple[complex, int]] = []
    for item in spectrum:
        if isinstance(item, PeriodicCycle):
            spec.append((item.multiplier, 1))
        else:
            mult, count = item
            if (not isinstance(count, (int, np.integer))) or count < 1:
                raise PreconditionError("spectrum counts must be positive ints")
            spec.append((complex(mult), int(count)))
    d_n = arith.exact_cycle_point_count(degree, period)
    n_cycles = sum(c for _, c in spec)
    if n_cycles * period != d_n:
        raise PreconditionError(
            f"{n_cycles} cycles of period {period} cover "
            f"{n_cycles * period} points, expected d_n = {d_n}")
    total = 0.0
    floored = 0
    for mult, count in spec:
        m = abs(mult)
        if m < r:
            m = r
            floored += count
        total += count * np.log(m)
    return LyapunovEstimate(
        value=float(total / d_n), period=period, radius=r,
        cycle_count=n_cycles, degree=degree, floored_cycles=floored)


def lyap_periodic(F: RationalMapLift, n: int, r: float = 1.0,
                  tol: float = 1e-10) -> LyapunovEstimate:
    """Truncated periodic estimator of the Lyapunov exponent,
    L_n^r = (1/(n d_n)) sum over exact-period-n points of
    log max(|(f^n)'|, r)."""
    _check_radius(r)
    ext = exact_cycles(F, n, tol)
    if ext.contaminated:
        raise ParabolicContaminationError(
            f"{len(ext.contaminated)} lower-period parabolic orbits make the "
            f"period-{n} spectrum ill defined")
    return lyap_from_spectrum(list(ext.cycles), F.degree, n, r)


@dataclass(frozen=True)
class ConvergenceRow:
    period: int
    value: float
    error: float
    normalized_error: float


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]
    reference: float
    violation: bool  # some normalized error exceeds 100x the median


def convergence_report(F: RationalMapLift, n_range, r: float = 1.0,
                       reference: float | None = None,
                       tol: float = 1e-10) -> ConvergenceReport:
    """Estimator errors against an oracle reference over a period range, with
    the rate normalization error * d^n / sigma_2(n) of the known error bound;
    flags blow-up when a normalized error exceeds 100x the median."""
    periods = sorted(n_range)
    if reference is None:
        raise PreconditionError("convergence report needs an oracle reference")
    rows = []
    for n in periods:
        est = lyap_periodic(F, n, r, tol)
        err = abs(est.value - reference)
        rows.append(ConvergenceRow(
            period=n, value=est.value, error=err,
            normalized_error=err * F.degree**n / arith.sigma(2, n)))
    med = float(np.median([row.normalized_error for row in rows]))
    violation = any(row.normalized_error > 100.0 * med for row in rows)
    return ConvergenceReport(tuple(rows), float(reference), violation)


# ---------------------------------------------------------------------------
# backward Monte Carlo oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    stderr: float
    samples: int


def _pullback_one(F: RationalMapLift, z: SpherePoint, rng) -> SpherePoint:
    """One uniformly random preimage of z under F."""
    a, b = z.vec
    form = b * F.num - a * F.den
    lead = float(np.max(np.abs(form)))
    if lead == 0:
        raise ExceptionalStartError("fiber polynomial vanished identically")
    form = form / lead
    deg = len(form) - 1
    while deg > 0 and abs(form[deg]) < 1e-13:
        deg -= 1
    finite = np.roots(form[deg::-1]) if deg >= 1 else np.empty(0)
    pres = [SpherePoint.from_affine(w) for w in finite]
    pres.extend(SpherePoint.infinity() for _ in range(F.degree - deg))
    return pres[rng.integers(len(pres))]


def lyap_oracle_backward(F: RationalMapLift, samples: int = 400,
                         depth: int = 60, seed: int = 0) -> MonteCarloEstimate:
    """Monte Carlo estimate of L(f) = integral of log f# against the maximal
    measure: average log chordal_derivative over the endpoints of independent
    random inverse-orbit branches.

    A start whose inverse images collapse to a single point (an exceptional
    point) raises EXCEPTIONAL_START; retry with another seed.
    """
    if samples < 100:
        raise PreconditionError("samples must be >= 100")
    if depth < 20:
        raise PreconditionError("depth must be >= 20")
    rng = np.random.default_rng(seed)
    vals = []
    for _ in range(samples):
        z = SpherePoint(np.array([rng.normal() + 1j * rng.normal(),
                                  rng.normal() + 1j * rng.normal()]))
        collapse = 0
        for _ in range(depth):
            w = _pullback_one(F, z, rng)
            if chordal_distance_safe(w, z) < 1e-13:
                collapse += 1
                if collapse >= 5:
                    raise ExceptionalStartError(
                        "inverse orbit collapsed onto a fixed exceptional point")
            else:
                collapse = 0
            z = w
        fs = chordal_derivative(F, z)
        if fs > 0:
            vals.append(float(np.log(fs)))
    value = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / np.sqrt(len(vals)))
    return MonteCarloEstimate(value=value, stderr=stderr, samples=len(vals))


def chordal_distance_safe(z: SpherePoint, w: SpherePoint) -> float:
    return float(abs(z.vec[0] * w.vec[1] - z.vec[1] * w.vec[0]))


# ---------------------------------------------------------------------------
# degeneration slopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float
    samples: int


def degeneration_slope(lyap_of_t, t_samples) -> SlopeFit:
    """Least-squares slope of L(f_t) against log(1/|t|): the leading
    degeneration rate of the Lyapunov exponent along the family.

    Raises ILL_CONDITIONED when the fit residual exceeds 10% of the fitted
    value range (the family is not in its asymptotic regime)."""
    ts = [complex(t) for t in t_samples]
    if len(ts) < 3:
        raise PreconditionError("need at least 3 parameters for a slope fit")
    if any(t == 0 for t in ts):
        raise PreconditionError("parameters must be nonzero")
    radii = sorted(abs(t) for t in ts)
    if radii[-1] / radii[0] < 1e3:
        raise PreconditionError("|t| samples must span at least 3 decades")
    xs = np.array([np.log(1.0 / abs(t)) for t in ts])
    ys = np.array([float(lyap_of_t(t)) for t in ts])
    A = np.stack([xs, np.ones_like(xs)], axis=1)
    coef, res, *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = float(np.sqrt(res[0] / len(ts))) if len(res) else 0.0
    spread = float(np.max(ys) - np.min(ys))
    if spread > 0 and resid > 0.1 * spread:
        raise IllConditionedError(
            f"regression residual {resid:.3e} exceeds 10% of the fitted "
            f"range {spread:.3e}")
    return SlopeFit(slope=float(coef[0]), intercept=float(coef[1]),
                    residual=resid, samples=len(ts))
