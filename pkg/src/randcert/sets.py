"""Correlation sets for the timed prepare-and-measure scenario.

A preparation box takes an input x in {0, 1} that only controls *when* the
box is triggered (the second input waits an extra delay dt), and a measurement
box returns a sign b in {-1, +1}.  The observed statistics are summarised by
the two biases C_x = P(+1|x) - P(-1|x).

Everything in this module depends on the devices only through the single
dimensionless budget

    u = E * dt        (hbar = 1),

where E upper-bounds the energy standard deviation of the average prepared
state.  Two sets of correlation pairs (C0, C1) matter:

* the quantum set: pairs reachable by any states/measurement whose two
  preparations are related by unitary evolution for time dt under the energy
  budget.  It is the region where the state overlap inequality

      (sqrt(1+C0)*sqrt(1+C1) + sqrt(1-C0)*sqrt(1-C1)) / 2  >=  gamma(u)

  holds, with gamma(u) = cos(u) for u < pi/2 and 0 afterwards (the speed
  limit on how distinguishable the two preparations can become);

* the classical max-average set: pairs explainable by mixtures of
  deterministic strategies that satisfy the energy budget only on average.
  It is the wedge |C0 - C1| <= min(2, 4u/pi).

Randomness can be certified exactly for quantum points outside the wedge.
The boundary of the quantum set consists of the two corner points (1,1),
(-1,-1) and two cosine arcs, parametrised here by `boundary_point`.

All functions are pure and operate on plain floats; `Correlation` and
`EnergyTimeBudget` are small validated records used at API boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

HALF_PI = 0.5 * math.pi

__all__ = [
    "HALF_PI",
    "Correlation",
    "EnergyTimeBudget",
    "BoundaryCurve",
    "InfeasibleInputError",
    "gamma",
    "quantum_overlap_lhs",
    "quantum_contains",
    "classical_contains",
    "classical_wedge_width",
    "boundary_point",
    "h_bin",
    "entropy_H",
]


class InfeasibleInputError(ValueError):
    """Raised when a correlation pair lies outside the quantum set for its budget."""


@dataclass(frozen=True)
class Correlation:
    """A pair of outcome biases, each in [-1, 1]."""

    c0: float
    c1: float

    def __post_init__(self):
        for name, v in (("c0", self.c0), ("c1", self.c1)):
            if not math.isfinite(v) or abs(v) > 1.0:
                raise ValueError(f"{name} must be a finite bias in [-1, 1], got {v!r}")

    def astuple(self) -> tuple[float, float]:
        return (self.c0, self.c1)


@dataclass(frozen=True)
class EnergyTimeBudget:
    """The dimensionless product u = E * dt (hbar = 1) that fixes both sets.

    Values above pi/2 are legal but trivial: the wedge covers the whole
    square, so nothing can be certified (`is_trivial`).
    """

    u: float

    def __post_init__(self):
        if not math.isfinite(self.u) or self.u < 0.0:
            raise ValueError(f"budget u must be finite and >= 0, got {self.u!r}")

    @classmethod
    def from_energy_time(cls, energy: float, dt: float = 1.0) -> "EnergyTimeBudget":
        """Build the budget from a (E, dt) pair; only the product matters."""
        return cls(float(energy) * float(dt))

    @property
    def is_trivial(self) -> bool:
        return self.u > HALF_PI


class BoundaryCurve(Enum):
    """Selector for the two cosine arcs bounding the quantum set."""

    ONE = 1   # C1 = cos(2(s - u')), s in [u', pi/2]; hits C1 = 1 at s = u'
    TWO = 2   # C1 = cos(2(s + u')), s in [0, pi/2 - u']; hits C0 = 1 at s = 0


def _as_u(budget) -> float:
    """Accept EnergyTimeBudget or a bare float u."""
    if isinstance(budget, EnergyTimeBudget):
        return budget.u
    u = float(budget)
    if not math.isfinite(u) or u < 0.0:
        raise ValueError(f"budget u must be finite and >= 0, got {budget!r}")
    return u


def _as_pair(c) -> tuple[float, float]:
    """Accept Correlation or a (c0, c1) pair."""
    if isinstance(c, Correlation):
        return c.c0, c.c1
    c0, c1 = float(c[0]), float(c[1])
    if abs(c0) > 1.0 or abs(c1) > 1.0 or not (math.isfinite(c0) and math.isfinite(c1)):
        raise ValueError(f"correlation must lie in [-1,1]^2, got {c!r}")
    return c0, c1


def gamma(budget) -> float:
    """Smallest reachable overlap between the two time-displaced preparations.

    cos(u) while u < pi/2; zero beyond (the states may become orthogonal).
    """
    u = _as_u(budget)
    return math.cos(u) if u < HALF_PI else 0.0


def quantum_overlap_lhs(c) -> float:
    """Left-hand side of the overlap inequality at a correlation pair.

    Equals (sqrt(1+C0)sqrt(1+C1) + sqrt(1-C0)sqrt(1-C1)) / 2, in [0, 1].
    """
    c0, c1 = _as_pair(c)
    return 0.5 * (
        math.sqrt(1.0 + c0) * math.sqrt(1.0 + c1)
        + math.sqrt(1.0 - c0) * math.sqrt(1.0 - c1)
    )


def quantum_contains(c, budget, tol: float = 1e-12) -> bool:
    """Membership in the quantum set, with slack `tol` for the square roots."""
    if tol < 0.0:
        raise ValueError("tol must be >= 0")
    return quantum_overlap_lhs(c) >= gamma(budget) - tol


def classical_wedge_width(budget) -> float:
    """Width of the classical wedge: min(2, 4u/pi)."""
    return min(2.0, 4.0 * _as_u(budget) / math.pi)


def classical_contains(c, budget) -> bool:
    """Membership in the classical max-average wedge |C0 - C1| <= min(2, 4u/pi).

    A plain linear inequality; compared exactly, no tolerance.
    """
    c0, c1 = _as_pair(c)
    return abs(c0 - c1) <= classical_wedge_width(budget)


def boundary_point(budget, which: BoundaryCurve, s: float) -> tuple[float, float]:
    """Point on one of the two arcs bounding the quantum set for budget u'.

    Curve ONE: (2cos^2 s - 1, 2cos^2(s - u') - 1) for s in [u', pi/2].
    Curve TWO: (2cos^2 s - 1, 2cos^2(s + u') - 1) for s in [0, pi/2 - u'].

    Every returned point saturates the overlap inequality:
    quantum_overlap_lhs(point) == gamma(u') up to roundoff.
    """
    u = _as_u(budget)
    slack = 1e-12
    if which is BoundaryCurve.ONE:
        lo, hi = u, HALF_PI
        other = s - u
    elif which is BoundaryCurve.TWO:
        lo, hi = 0.0, HALF_PI - u
        other = s + u
    else:
        raise TypeError(f"which must be a BoundaryCurve, got {which!r}")
    if not (lo - slack <= s <= hi + slack):
        raise ValueError(
            f"curve parameter s={s!r} outside [{lo!r}, {hi!r}] for {which.name}"
        )
    cs = math.cos(s)
    co = math.cos(other)
    return (2.0 * cs * cs - 1.0, 2.0 * co * co - 1.0)


def h_bin(c: float) -> float:
    """Binary entropy of an outcome with bias c, in bits.

    h(c) = -sum_b ((1+bc)/2) log2((1+bc)/2), with 0 log 0 = 0 so that
    h(+-1) = 0 exactly.
    """
    if not math.isfinite(c) or abs(c) > 1.0:
        raise ValueError(f"bias must lie in [-1, 1], got {c!r}")
    p = 0.5 * (1.0 + c)
    q = 0.5 * (1.0 - c)
    out = 0.0
    if p > 0.0:
        out -= p * math.log2(p)
    if q > 0.0:
        out -= q * math.log2(q)
    return out


def entropy_H(c) -> float:
    """Output entropy of a correlation pair under uniform inputs:
    H = (h_bin(C0) + h_bin(C1)) / 2."""
    c0, c1 = _as_pair(c)
    return 0.5 * (h_bin(c0) + h_bin(c1))
