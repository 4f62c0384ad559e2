"""Shared fixtures and map builders for the test suite."""

import numpy as np
import pytest

from dynbif.dynamics import RationalMapLift
from dynbif.families import QUAD, map_at


def quad_lift(c: complex) -> RationalMapLift:
    """Lift of z^2 + c."""
    return map_at(QUAD, [c])


def power_lift(d: int) -> RationalMapLift:
    """Lift of z^d."""
    num = np.zeros(d + 1, dtype=complex)
    num[-1] = 1.0
    den = np.zeros(d + 1, dtype=complex)
    den[0] = 1.0
    return RationalMapLift(num, den)


def random_quadratic_rational(rng) -> RationalMapLift:
    """A random non-degenerate degree-2 rational map."""
    for _ in range(50):
        num = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        den = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        try:
            return RationalMapLift(num, den)
        except Exception:
            continue
    raise RuntimeError("could not draw a non-degenerate quadratic map")


@pytest.fixture
def rng():
    return np.random.default_rng(7)
