"""Computable core of quantitative bifurcation theory for rational maps.

Submodules: ``arith`` (divisor-sum counting and the bifurcation-mass
series), ``cpoly``/``aberth`` (black-box simultaneous root finding),
``dynamics`` (lifts, dynatomic polynomials, exact-period cycles and
multiplier spectra), ``lyapunov`` (periodic-point estimators, Green
functions, degeneration slopes), ``families`` (parametrized families,
center enumeration, continuation, component counting), ``equidist``
(atomic bifurcation-measure diagnostics) and ``cli``.
"""

from . import arith, cpoly, dynamics, equidist, families, lyapunov
from .arith import MarkedPeriodTuple, PeriodTuple, m2_mass_series
from .dynamics import (
    PeriodicCycle,
    RationalMapLift,
    SpherePoint,
    Stability,
    dynatomic_polynomial,
    exact_cycles,
    multiplier_polynomial,
)
from .equidist import (
    AtomicMeasure,
    GridDensity,
    binned_distance,
    center_measure,
    equidist_report,
    moment,
    pern_circle_measure,
)
from .families import (
    CenterPoint,
    ComponentCount,
    FamilySpec,
    centers_1d,
    centers_2d,
    component_count,
    family_from_id,
    map_at,
    multiplier_continuation,
    quadrat_fixed_normal_form,
)
from .lyapunov import (
    GreenData,
    LyapunovEstimate,
    convergence_report,
    degeneration_slope,
    green_value,
    lyap_from_spectrum,
    lyap_oracle_backward,
    lyap_periodic,
    lyap_poly_closed_form,
)

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure", "CenterPoint", "ComponentCount", "FamilySpec",
    "GreenData", "GridDensity", "LyapunovEstimate", "MarkedPeriodTuple",
    "PeriodTuple", "PeriodicCycle", "RationalMapLift", "SpherePoint",
    "Stability", "arith", "binned_distance", "center_measure", "centers_1d",
    "centers_2d", "component_count", "convergence_report", "cpoly",
    "degeneration_slope", "dynamics", "dynatomic_polynomial", "equidist",
    "equidist_report", "exact_cycles", "families", "family_from_id",
    "green_value", "lyap_from_spectrum", "lyap_oracle_backward",
    "lyap_periodic", "lyap_poly_closed_form", "lyapunov", "m2_mass_series",
    "map_at", "moment", "multiplier_continuation", "multiplier_polynomial",
    "pern_circle_measure", "quadrat_fixed_normal_form",
]
