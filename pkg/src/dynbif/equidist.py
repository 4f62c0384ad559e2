"""Discretized bifurcation-measure objects.

Atomic measures on parameter space: center measures (one atom per
hyperbolic-component center, arithmetically normalized weights) and
circle-averaged measures supported on multiplier level curves (one atom per
continued parameter).  Moments and grid-binned total-variation distances
serve as the desk-scale observables; convergence toward the bifurcation
measure is tested as a Cauchy property against the highest enumerable
period, never against a materialized limit object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import arith, families
from .errors import EmptyMeasureError, PathLossError, PreconditionError

#: window containing the quadratic connectedness locus
QUAD_WINDOW = ((-2.1, 0.6), (-1.3, 1.3))
DEFAULT_RESOLUTION = (64, 64)


@dataclass(frozen=True)
class AtomicMeasure:
    """A finite positive atomic measure on parameter space."""

    atoms: tuple[tuple[tuple[complex, ...], float], ...]
    total_mass: float

    def __post_init__(self):
        s = 0.0
        for params, w in self.atoms:
            if not (w > 0) or not math.isfinite(w):
                raise PreconditionError("weights must be positive and finite")
            if any(not (math.isfinite(p.real) and math.isfinite(p.imag))
                   for p in params):
                raise PreconditionError("atom parameters must be finite")
            s += w
        if abs(s - self.total_mass) > 1e-12 * max(1.0, abs(s)):
            raise PreconditionError("total_mass must equal the weight sum")

    @staticmethod
    def from_atoms(atoms) -> "AtomicMeasure":
        atoms = tuple((tuple(complex(p) for p in params), float(w))
                      for params, w in atoms)
        return AtomicMeasure(atoms, sum(w for _, w in atoms))


def center_measure(spec: families.FamilySpec,
                   periods: arith.PeriodTuple) -> AtomicMeasure:
    """Atomic measure on the hyperbolic-component centers with weight
    stab / d_(n) per center (polynomial normalization divides additionally
    by (d-1)!)."""
    stab = arith.stab_count(periods)
    d_prod = 1
    for n in periods.periods:
        d_prod *= arith.exact_cycle_point_count(spec.degree, n)
    norm = math.factorial(spec.degree - 1) * d_prod
    w = stab / norm
    if spec.kind == "QuadraticPoly":
        (n,) = periods.periods
        centers = families.centers_1d(spec, n)
    elif spec.kind == "PcaPoly":
        n0, n1 = periods.periods
        markings = [(n0, n1)] if n0 == n1 else [(n0, n1), (n1, n0)]
        centers = []
        for m0, m1 in markings:
            centers.extend(families.centers_2d(spec, m0, m1))
    else:
        raise PreconditionError(f"no center measure for {spec.kind}")
    atoms = [(c.parameter, w * c.multiplicity) for c in centers]
    return AtomicMeasure.from_atoms(atoms)


@dataclass(frozen=True)
class CircleMeasure:
    """Circle-averaged multiplier-level-curve measure with the count of
    atoms dropped to continuation path loss."""

    measure: AtomicMeasure
    path_loss_deficit: int


def pern_circle_measure(spec: families.FamilySpec, n: int, rho: float,
                        thetas: int) -> CircleMeasure:
    """Atoms at the parameters where the period-n cycle has multiplier
    rho * e^(i theta_k), theta_k uniform, one per component center and
    angle, each of weight 1/(d_n * thetas).

    Every atom re-verifies its multiplier via an independent critical-orbit
    computation to 1e-10; atoms whose continuation path is lost are dropped
    and tallied in the deficit.
    """
    if spec.kind != "QuadraticPoly":
        raise PreconditionError("level-curve measures support one-parameter "
                                "families")
    if not (0.0 <= rho < 1.0):
        raise PreconditionError("rho must lie in [0, 1)")
    if thetas < 8 and not (rho == 0.0 and thetas == 1):
        raise PreconditionError("need thetas >= 8")
    centers = families.centers_1d(spec, n)
    d_n = arith.exact_cycle_point_count(spec.degree, n)
    w = 1.0 / (d_n * thetas)
    atoms = []
    deficit = 0
    for center in centers:
        for k in range(thetas):
            target = rho * np.exp(2j * np.pi * k / thetas)
            try:
                c = families.multiplier_continuation(spec, center,
                                                     (target,))
            except PathLossError:
                deficit += 1
                continue
            if rho > 0:
                lam = families.quad_cycle_multiplier(c, n)
                if abs(lam - target) > 1e-10:
                    deficit += 1
                    continue
            atoms.append(((c,), w))
    if not atoms:
        raise EmptyMeasureError("all continuation paths were lost")
    return CircleMeasure(AtomicMeasure.from_atoms(atoms), deficit)


def moment(m: AtomicMeasure, k: int, coordinate: int = 0) -> complex:
    """Normalized k-th moment of one parameter coordinate."""
    if k < 0:
        raise PreconditionError("moment order must be >= 0")
    if not m.atoms or m.total_mass <= 0:
        raise EmptyMeasureError("moment of an empty measure")
    s = 0.0 + 0.0j
    for params, w in m.atoms:
        s += w * params[coordinate] ** k
    return s / m.total_mass


@dataclass(frozen=True)
class GridDensity:
    """Binned mass of an atomic measure over a rectangular window.

    ``bins[iy, ix]`` holds the mass in the cell; row 0 is the top of the
    window (largest imaginary part), matching image conventions.
    """

    window: tuple[tuple[float, float], tuple[float, float]]
    resolution: tuple[int, int]
    bins: np.ndarray = field(repr=False)

    @staticmethod
    def from_measure(m: AtomicMeasure,
                     window=QUAD_WINDOW,
                     resolution=DEFAULT_RESOLUTION,
                     coordinate: int = 0) -> "GridDensity":
        (x0, x1), (y0, y1) = window
        nx, ny = resolution
        if not (x1 > x0 and y1 > y0 and nx >= 1 and ny >= 1):
            raise PreconditionError("window must be nondegenerate")
        xs = np.array([p[coordinate].real for p, _ in m.atoms])
        ys = np.array([p[coordinate].imag for p, _ in m.atoms])
        ws = np.array([w for _, w in m.atoms])
        inside = (xs >= x0) & (xs <= x1) & (ys >= y0) & (ys <= y1)
        ix = np.clip(((xs[inside] - x0) / (x1 - x0) * nx).astype(int),
                     0, nx - 1)
        iy = np.clip(((y1 - ys[inside]) / (y1 - y0) * ny).astype(int),
                     0, ny - 1)
        bins = np.zeros((ny, nx))
        np.add.at(bins, (iy, ix), ws[inside])
        return GridDensity(window, (nx, ny), bins)

    @property
    def mass(self) -> float:
        return float(self.bins.sum())


def binned_distance(m1: AtomicMeasure, m2: AtomicMeasure,
                    window=QUAD_WINDOW,
                    resolution=DEFAULT_RESOLUTION) -> float:
    """Total-variation distance between the two measures seen through the
    grid: half the L1 distance of the mass-normalized bin vectors."""
    g1 = GridDensity.from_measure(m1, window, resolution)
    g2 = GridDensity.from_measure(m2, window, resolution)
    if g1.mass <= 0 or g2.mass <= 0:
        raise EmptyMeasureError("a measure has no mass inside the window")
    return float(0.5 * np.abs(g1.bins / g1.mass
                              - g2.bins / g2.mass).sum())


@dataclass(frozen=True)
class EquidistRow:
    n: int
    moment_errors: tuple[float, ...]  # orders 1..k_moments
    grid_distance: float


@dataclass(frozen=True)
class EquidistReport:
    rows: tuple[EquidistRow, ...]
    reference_n: int
    k_moments: int
    #: per moment order, True when the error sequence decreases within
    #: factor-2 slack (each value at most twice the running minimum)
    moment_trend_ok: tuple[bool, ...]
    grid_trend_ok: bool


def _decreasing_with_slack(values, slack: float = 2.0) -> bool:
    running = math.inf
    for v in values:
        if v > slack * running:
            return False
        running = min(running, v)
    return True


def equidist_report(spec: families.FamilySpec, n_range, k_moments: int,
                    reference_n: int) -> EquidistReport:
    """Moment and grid-TV convergence of the center measures toward the
    highest-period reference measure, with trend flags."""
    ns = sorted(set(int(n) for n in n_range))
    if not ns:
        raise PreconditionError("empty period range")
    if reference_n <= max(ns):
        raise PreconditionError("reference period must exceed the range")
    if k_moments < 1:
        raise PreconditionError("need at least one moment order")
    ref = center_measure(spec, arith.PeriodTuple((reference_n,)))
    ref_moments = [moment(ref, k) for k in range(1, k_moments + 1)]
    rows = []
    for n in ns:
        mu = center_measure(spec, arith.PeriodTuple((n,)))
        errs = tuple(abs(moment(mu, k) - ref_moments[k - 1])
                     for k in range(1, k_moments + 1))
        rows.append(EquidistRow(n, errs, binned_distance(mu, ref)))
    trends = tuple(
        _decreasing_with_slack([r.moment_errors[k] for r in rows])
        for k in range(k_moments))
    grid_ok = _decreasing_with_slack([r.grid_distance for r in rows])
    return EquidistReport(tuple(rows), reference_n, k_moments, trends,
                          grid_ok)
