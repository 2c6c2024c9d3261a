"""Single-mode coherent-state realisation of the timed prepare-and-measure test.

The preparation emits |alpha> with alpha = i*xi (xi >= 0) in a harmonic mode
of frequency omega; the input x=1 waits an extra dt, which rotates the state
in phase space by omega*dt.  The measurement reads off the sign of the q
quadrature.  Gaussian statistics give the bias in closed form:

    C(t) = erf(sqrt(2) * Re(alpha * e^{-i omega t})) = erf(sqrt(2) xi sin(omega t)),

so the observed pair is (C0, C1) = (0, erf(sqrt(2) xi sin(omega dt))).  The
energy standard deviation of a coherent state is hbar*omega*|alpha|, hence an
assumed budget E*dt is honest whenever xi*omega*dt <= E*dt.

Non-zero randomness is certifiable iff the pair leaves the classical wedge:
|C1| > 4*(E dt)/pi with E dt < pi/2 (and the budget honest); `region_mask`
maps that region over the (omega*dt, E*dt) plane for a given xi.

erf is implemented in-repo (rational minimax approximations of W. J. Cody's
erf/erfc scheme, double-precision coefficient set) so that outputs are
bit-stable across platforms; absolute error is far below 1e-12 on |x| <= 6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .sets import HALF_PI

__all__ = [
    "CoherentPoint",
    "erf",
    "coherent_correlations",
    "correlation_at_phase",
    "nonzero_randomness_condition",
    "region_mask",
    "coherent_certify",
]


@dataclass(frozen=True)
class CoherentPoint:
    """Operating point of the coherent-state implementation.

    xi:       coherent amplitude |alpha| (state alpha = i*xi), >= 0
    omega_dt: phase omega*dt accumulated during the delay, radians, >= 0
    e_dt:     assumed energy-time budget E*dt (hbar = 1), >= 0

    The regime claims of `nonzero_randomness_condition` require the budget to
    be honest: xi*omega_dt <= e_dt (`is_physical`).
    """

    xi: float
    omega_dt: float
    e_dt: float

    def __post_init__(self):
        for name, v in (("xi", self.xi), ("omega_dt", self.omega_dt), ("e_dt", self.e_dt)):
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")

    @property
    def is_physical(self) -> bool:
        return self.xi * self.omega_dt <= self.e_dt


# ----------------------------------------------------------------------
# Error function: Cody-style rational minimax approximations.
#
# Three regimes, matching the classical SPECFUN layout:
#   |x| <= 0.46875          erf(x)  = x * R1(x^2)
#   0.46875 < |x| <= 4      erfc(x) = exp(-x^2) * R2(|x|)
#   |x| > 4                 erfc(x) = exp(-x^2)/|x| * (1/sqrt(pi) + R3(1/x^2)/x^2)
# with erf(x) = 1 - erfc(x) and the exact odd reflection erf(-x) = -erf(x).
# Coefficients are the double-precision set; max relative error ~6e-19.
# ----------------------------------------------------------------------

_ERF_A = (
    3.16112374387056560e00,
    1.13864154151050156e02,
    3.77485237685302021e02,
    3.20937758913846947e03,
    1.85777706184603153e-1,
)
_ERF_B = (
    2.36012909523441209e01,
    2.44024637934444173e02,
    1.28261652607737228e03,
    2.84423683343917062e03,
)
_ERF_C = (
    5.64188496988670089e-1,
    8.88314979438837594e00,
    6.61191906371416295e01,
    2.98635138197400131e02,
    8.81952221241769090e02,
    1.71204761263407058e03,
    2.05107837782607147e03,
    1.23033935479799725e03,
    2.15311535474403846e-8,
)
_ERF_D = (
    1.57449261107098347e01,
    1.17693950891312499e02,
    5.37181101862009858e02,
    1.62138957456669019e03,
    3.29079923573345963e03,
    4.36261909014324716e03,
    3.43936767414372164e03,
    1.23033935480374942e03,
)
_ERF_P = (
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
)
_ERF_Q = (
    2.56852019228982242e00,
    1.87295284992346047e00,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
)

_ONE_OVER_SQRT_PI = 5.6418958354775628695e-1


def _erfc_scaled_core(y: float) -> float:
    """erfc(y) for y > 0.46875, via the two large-argument branches."""
    if y <= 4.0:
        num = _ERF_C[8] * y
        den = y
        for i in range(7):
            num = (num + _ERF_C[i]) * y
            den = (den + _ERF_D[i]) * y
        ratio = (num + _ERF_C[7]) / (den + _ERF_D[7])
    else:
        z = 1.0 / (y * y)
        num = _ERF_P[5] * z
        den = z
        for i in range(4):
            num = (num + _ERF_P[i]) * z
            den = (den + _ERF_Q[i]) * z
        r = z * (num + _ERF_P[4]) / (den + _ERF_Q[4])
        ratio = (_ONE_OVER_SQRT_PI - r) / y
    # split exp(-y^2) to keep the argument of exp small and accurate
    ysq = math.floor(y * 16.0) / 16.0
    tail = (y - ysq) * (y + ysq)
    return math.exp(-ysq * ysq) * math.exp(-tail) * ratio


def erf(x: float) -> float:
    """Error function, odd by construction, |error| << 1e-12 on |x| <= 6."""
    x = float(x)
    if math.isnan(x):
        return x
    y = abs(x)
    if y <= 0.46875:
        z = y * y if y > 1.11e-16 else 0.0
        num = _ERF_A[4] * z
        den = z
        for i in range(3):
            num = (num + _ERF_A[i]) * z
            den = (den + _ERF_B[i]) * z
        return x * (num + _ERF_A[3]) / (den + _ERF_B[3])
    if y >= 26.5:
        out = 1.0
    else:
        out = 1.0 - _erfc_scaled_core(y)
    return out if x > 0.0 else -out


def correlation_at_phase(xi: float, phase: float) -> float:
    """Quadrature-sign bias of |i*xi> rotated by `phase`:
    erf(sqrt(2) * Re(i xi e^{-i phase})) = erf(sqrt(2) xi sin(phase))."""
    return erf(math.sqrt(2.0) * float(xi) * math.sin(float(phase)))


def coherent_correlations(p: CoherentPoint) -> tuple[float, float]:
    """Observed pair (C0, C1) = (0, erf(sqrt(2) xi sin(omega dt)))."""
    return (0.0, correlation_at_phase(p.xi, p.omega_dt))


def nonzero_randomness_condition(p: CoherentPoint) -> bool:
    """True iff the operating point certifiably leaves the classical wedge:
    e_dt < pi/2, the budget is honest (xi*omega_dt <= e_dt), and
    |C1| > 4*e_dt/pi (strict)."""
    if not p.e_dt < HALF_PI:
        return False
    if not p.is_physical:
        return False
    c1 = correlation_at_phase(p.xi, p.omega_dt)
    return abs(c1) > 4.0 * p.e_dt / math.pi


def region_mask(xi, omega_dt_grid, e_dt_grid):
    """Cellwise certifiability of `nonzero_randomness_condition` over a grid.

    Returns (mask, constraint_line): mask[i, j] is the condition at
    (omega_dt_grid[i], e_dt_grid[j]); constraint_line[i] = xi*omega_dt_grid[i]
    is the minimal honest budget at each phase (the dashed budget line).
    """
    import numpy as np

    om = np.asarray(omega_dt_grid, dtype=float)
    ed = np.asarray(e_dt_grid, dtype=float)
    if om.ndim != 1 or ed.ndim != 1:
        raise ValueError("grids must be one-dimensional")
    mask = np.zeros((om.size, ed.size), dtype=bool)
    for i, w in enumerate(om):
        for j, e in enumerate(ed):
            mask[i, j] = nonzero_randomness_condition(CoherentPoint(xi, w, e))
    return mask, xi * om


def coherent_certify(p: CoherentPoint, params=None, threads=None):
    """Certified entropy bound for the coherent operating point: run the dual
    certifier on (coherent_correlations(p), e_dt).  Raises InfeasibleInputError
    if the pair falls outside the quantum set for that budget."""
    from .dual import certify

    return certify(coherent_correlations(p), p.e_dt, params=params, threads=threads)
