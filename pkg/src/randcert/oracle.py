"""Independent brute-force cross-checks for the dual certifier.

Three unrelated tools live here, all deliberately simple:

* `primal_upper_bound`: an explicit feasible ensemble search.  Any ensemble
  of quantum-reachable points whose weighted correlations and budgets match
  the observation upper-bounds the adversarial entropy, so the dual bound
  must stay below every value found here.  The search solves the 4x4 linear
  matching system exactly for every 4-subset of a small candidate pool
  (deterministic vertices, boundary samples, and the observed point itself).

* `two_level_probabilities`: a two-level amplitude simulation showing the
  boundary arcs are physically reachable: equal superposition of energies
  {0, 2u}, free evolution for the delay, projective measurement onto a
  rotated copy of the initial state.  Must reproduce the closed forms
  (cos^2 tau, cos^2(tau -+ u)) to near machine precision.

* `stddev_concavity_check`: numeric check that the energy standard deviation
  is concave under mixing, the fact that forces adversarial ensembles to
  respect the budget only on average.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .sets import (
    HALF_PI,
    BoundaryCurve,
    Correlation,
    EnergyTimeBudget,
    InfeasibleInputError,
    _as_pair,
    _as_u,
    boundary_point,
    entropy_H,
    quantum_contains,
)

__all__ = [
    "Ensemble",
    "TwoLevelModel",
    "ensemble_feasible",
    "primal_upper_bound",
    "best_feasible_ensemble",
    "two_level_probabilities",
    "stddev_concavity_check",
]

_WEIGHT_CLAMP = 1e-12


@dataclass(frozen=True)
class Ensemble:
    """A finite mixture of (weight, correlation, budget) components.

    Weights are nonnegative and sum to 1 within 1e-12; every component
    correlation lies inside the quantum set for its own budget (tol 1e-9).
    """

    components: tuple[tuple[float, Correlation, EnergyTimeBudget], ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("ensemble needs at least one component")
        total = 0.0
        for w, c, b in self.components:
            if not math.isfinite(w) or w < 0.0:
                raise ValueError(f"weights must be >= 0, got {w!r}")
            if not quantum_contains(c, b, tol=1e-9):
                raise ValueError(
                    f"component {c} is outside the quantum set for u={b.u!r}"
                )
            total += w
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1 within 1e-12, got {total!r}")

    def mean_correlation(self) -> tuple[float, float]:
        m0 = sum(w * c.c0 for w, c, _ in self.components)
        m1 = sum(w * c.c1 for w, c, _ in self.components)
        return (m0, m1)

    def mean_budget(self) -> float:
        return sum(w * b.u for w, _, b in self.components)

    def mean_entropy(self) -> float:
        return sum(w * entropy_H(c) for w, c, _ in self.components)


def ensemble_feasible(e: Ensemble, c, budget, tol: float = 1e-9) -> bool:
    """True iff the ensemble reproduces (c, u): weighted correlations match
    both coordinates within tol, weighted budgets match u within tol, and
    every member is quantum-reachable for its own budget (same tol)."""
    c0, c1 = _as_pair(c)
    u = _as_u(budget)
    m0, m1 = e.mean_correlation()
    if abs(m0 - c0) > tol or abs(m1 - c1) > tol:
        return False
    if abs(e.mean_budget() - u) > tol:
        return False
    return all(quantum_contains(ci, bi, tol=tol) for _, ci, bi in e.components)


# ----------------------------------------------------------------------
# Primal upper bound from explicit 4-component ensembles
# ----------------------------------------------------------------------


def _candidate_pool(c0: float, c1: float, u: float, pool_size: int, seed: int):
    """Candidate (C0, C1, budget) triples: the four deterministic vertices
    (diagonal ones at budget 0, anti-diagonal at pi/2), boundary samples on a
    small (u', s, curve) grid, the observed point itself, and, if pool_size
    leaves room, seeded random boundary samples."""
    pool: list[tuple[float, float, float]] = [
        (1.0, 1.0, 0.0),
        (-1.0, -1.0, 0.0),
        (1.0, -1.0, HALF_PI),
        (-1.0, 1.0, HALF_PI),
    ]
    u_upper = min(2.0 * u, HALF_PI)
    uvals = []
    for cand in (0.25 * u, 0.5 * u, u, u_upper, HALF_PI):
        if cand not in uvals:
            uvals.append(cand)
    n_s = max(2, (pool_size - len(pool)) // (2 * len(uvals)))
    for up in uvals:
        for curve in (BoundaryCurve.ONE, BoundaryCurve.TWO):
            lo, hi = (up, HALF_PI) if curve is BoundaryCurve.ONE else (0.0, HALF_PI - up)
            for i in range(n_s):
                s = lo + (hi - lo) * i / (n_s - 1)
                p0, p1 = boundary_point(up, curve, s)
                pool.append((p0, p1, up))
    rng = np.random.default_rng(seed)
    while len(pool) < pool_size:
        up = rng.uniform(0.0, HALF_PI)
        s = rng.uniform(0.0, HALF_PI - up)
        p0, p1 = boundary_point(up, BoundaryCurve.TWO, s)
        pool.append((p0, p1, up))
    pool = pool[: pool_size]
    pool.append((c0, c1, u))  # the singleton ensemble is always feasible
    seen = set()
    out = []
    for triple in pool:
        if triple not in seen:
            seen.add(triple)
            out.append(triple)
    return out


def best_feasible_ensemble(c, budget, pool_size: int = 64, seed: int = 0):
    """Search all 4-subsets of the candidate pool for exactly matching
    ensembles; return (lowest mean entropy, best Ensemble).  Returns
    (math.inf, None) if no subset matches, which never happens for quantum
    inputs since the pool contains the observed point itself."""
    c0, c1 = _as_pair(c)
    u = _as_u(budget)
    if not quantum_contains((c0, c1), u, tol=1e-9):
        raise InfeasibleInputError(
            f"correlation ({c0:.17g}, {c1:.17g}) is outside the quantum set for u={u:.17g}"
        )
    pool = _candidate_pool(c0, c1, u, pool_size, seed)
    n = len(pool)
    pc0 = np.array([p[0] for p in pool])
    pc1 = np.array([p[1] for p in pool])
    pu = np.array([p[2] for p in pool])
    ph = np.array([entropy_H((p[0], p[1])) for p in pool])
    b = np.array([1.0, c0, c1, u])

    idx = np.array(list(itertools.combinations(range(n), 4)), dtype=np.int64)
    best_val = math.inf
    best_subset = None
    best_weights = None
    chunk = 200_000
    for lo in range(0, idx.shape[0], chunk):
        sub = idx[lo : lo + chunk]
        a = np.empty((sub.shape[0], 4, 4))
        a[:, 0, :] = 1.0
        a[:, 1, :] = pc0[sub]
        a[:, 2, :] = pc1[sub]
        a[:, 3, :] = pu[sub]
        dets = np.linalg.det(a)
        solvable = np.abs(dets) > 1e-12
        if not solvable.any():
            continue
        asel = a[solvable]
        rhs = np.broadcast_to(b[:, None], (asel.shape[0], 4, 1)).copy()
        p = np.linalg.solve(asel, rhs)[:, :, 0]
        ok = (p >= -_WEIGHT_CLAMP).all(axis=1)
        p = np.clip(p[ok], 0.0, None)
        if p.size == 0:
            continue
        p /= p.sum(axis=1, keepdims=True)
        rows = sub[solvable][ok]
        # exact-match guard: ill-conditioned solves are dropped, not trusted
        resid = np.stack(
            [
                np.abs(p.sum(axis=1) - 1.0),
                np.abs((p * pc0[rows]).sum(axis=1) - c0),
                np.abs((p * pc1[rows]).sum(axis=1) - c1),
                np.abs((p * pu[rows]).sum(axis=1) - u),
            ]
        ).max(axis=0)
        good = resid <= 1e-9
        if not good.any():
            continue
        vals = (p[good] * ph[rows[good]]).sum(axis=1)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val = float(vals[k])
            best_subset = rows[good][k]
            best_weights = p[good][k]
    if best_subset is None:
        return math.inf, None
    comps = tuple(
        (float(w), Correlation(pc0[i], pc1[i]), EnergyTimeBudget(float(pu[i])))
        for w, i in zip(best_weights, best_subset)
    )
    return best_val, Ensemble(comps)


def primal_upper_bound(c, budget, pool_size: int = 64, seed: int = 0) -> float:
    """Upper bound on the adversarial entropy at (c, u) from the best exactly
    matching 4-component ensemble found in the candidate pool."""
    val, _ = best_feasible_ensemble(c, budget, pool_size=pool_size, seed=seed)
    return val


# ----------------------------------------------------------------------
# Two-level realisation of the boundary arcs
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class TwoLevelModel:
    """Equal superposition of energies {0, 2u} probed at arc parameter tau.

    tau lives in the selected curve's parameter interval: [u, pi/2] for
    curve ONE, [0, pi/2 - u] for curve TWO.
    """

    u: float
    tau: float
    which: BoundaryCurve

    def __post_init__(self):
        u = self.u
        if not math.isfinite(u) or u < 0.0:
            raise ValueError(f"u must be finite and >= 0, got {u!r}")
        slack = 1e-12
        if self.which is BoundaryCurve.ONE:
            lo, hi = u, HALF_PI
        elif self.which is BoundaryCurve.TWO:
            lo, hi = 0.0, HALF_PI - u
        else:
            raise TypeError(f"which must be a BoundaryCurve, got {self.which!r}")
        if not (lo - slack <= self.tau <= hi + slack):
            raise ValueError(
                f"tau={self.tau!r} outside [{lo!r}, {hi!r}] for {self.which.name}"
            )


def two_level_probabilities(m: TwoLevelModel, delta_t: float = 1.0):
    """Simulate the two-level model with explicit complex amplitudes.

    State (1, 1)/sqrt(2) over energy levels (0, 2u/delta_t); the input x=1
    preparation is the free evolution for delta_t, so the levels pick up
    relative phase 2u.  The measurement projects onto the initial state
    rotated by relative phase 2*tau, clockwise for curve ONE and
    counter-clockwise for curve TWO.  Returns (P(+1|0), P(+1|1)), equal to
    (cos^2 tau, cos^2(tau - u)) on curve ONE and (cos^2 tau, cos^2(tau + u))
    on curve TWO up to roundoff.
    """
    gap = 2.0 * m.u / float(delta_t)
    psi0 = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    evolve = np.array([1.0, np.exp(-1j * gap * delta_t)])  # exp(-i E_k dt)
    psi1 = evolve * psi0
    sign = 1.0 if m.which is BoundaryCurve.ONE else -1.0
    meas = np.array([1.0, np.exp(-1j * sign * 2.0 * m.tau)]) * psi0
    p0 = abs(np.vdot(meas, psi0)) ** 2
    p1 = abs(np.vdot(meas, psi1)) ** 2
    return float(p0), float(p1)


# ----------------------------------------------------------------------
# Concavity of the energy standard deviation
# ----------------------------------------------------------------------


def _validate_dist(dist) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(dist, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
        raise ValueError("each distribution must be a nonempty list of (energy, prob)")
    e, p = arr[:, 0], arr[:, 1]
    if (p < 0.0).any() or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("distribution probabilities must be >= 0 and sum to 1")
    return e, p


def _stddev(e: np.ndarray, p: np.ndarray) -> float:
    mean = float(p @ e)
    var = float(p @ (e * e)) - mean * mean
    return math.sqrt(max(var, 0.0))


def stddev_concavity_check(dists, weights, tol: float = 1e-12) -> bool:
    """True iff the energy spread of the weighted mixture is at least the
    weighted average of the component spreads (within tol)."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size != len(dists):
        raise ValueError("weights must match the number of distributions")
    if (w < 0.0).any() or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be >= 0 and sum to 1")
    parts = [_validate_dist(d) for d in dists]
    avg = sum(wi * _stddev(e, p) for wi, (e, p) in zip(w, parts))
    mix_e = np.concatenate([e for e, _ in parts])
    mix_p = np.concatenate([wi * p for wi, (_, p) in zip(w, parts)])
    return _stddev(mix_e, mix_p) >= avg - tol
