"""Certified lower bounds on the extractable entropy via a discretised dual.

The adversarial value at an observed pair C = (C0, C1) with budget u is the
least average output entropy over hidden-variable ensembles that reproduce
(C, u) while every member stays inside the quantum set for its own budget.
Each dual vector t = (t1, t2, t3) yields the lower bound

    D(t) = inner(t) + t1*C0 + t2*C1 + t3*u,

where inner(t) is the worst slack of the affine underestimator over the whole
feasible region.  We evaluate inner(t) on finite grids and subtract explicit
corrections so the computed value never exceeds the continuous infimum:

* energy grid   eps_j = (pi/2) j/(L*N), j = 1..L*N, penalty |t3|*(pi/2)/(L*N);
* per energy, the minimum over the quantum set is attained on its extreme
  points: the two corners (evaluated exactly) and the two boundary arcs,
  sampled at S+1 evenly spaced parameters and lowered by
  delta = (pi/2 - eps)(1 + 2|t1| + 2|t2|)/S, a bound on how far a sample
  minimum can sit above the true arc minimum.

`certify` maximises D over a restricted dual grid: t1 in [0, L], t2 in
[-t1, 0], t3 in [-L, 0] with step 1/M (there is always a maximiser of this
form once the input is mapped to the canonical sector C0 >= 0, |C1| <= C0),
plus two sound prunings of vectors whose dual value is provably negative.
The result, clamped at zero, is a rigorous lower bound on the adversarial
entropy for every choice of the four grid parameters; finer grids only
tighten it.

Both endpoint grids (k = 0..S) are included in the arc sampling.  The
correction term is sized for the sparser one-endpoint convention, so keeping
both endpoints can only strengthen the bound.

Certification is exact in the real arithmetic of the discretised formulas;
64-bit rounding is not interval-tracked.  A `safety_margin` can be
subtracted from the raw dual value by callers who want headroom for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple, Optional

import numpy as np

from . import _kernels
from .sets import (
    HALF_PI,
    BoundaryCurve,
    Correlation,
    EnergyTimeBudget,
    InfeasibleInputError,
    _as_pair,
    _as_u,
    boundary_point,
    classical_contains,
    entropy_H,
    gamma,
    h_bin,
    quantum_contains,
    quantum_overlap_lhs,
)

__all__ = [
    "DualVector",
    "DiscretizationParams",
    "SymmetryMap",
    "CertifiedBound",
    "SweepResult",
    "canonicalize",
    "t_grid",
    "delta_correction",
    "inner_min",
    "dual_value",
    "certify",
    "diagonal_sweep",
    "set_threads",
]


class DualVector(NamedTuple):
    """Multipliers for the C0, C1 and energy constraints (dt = 1 units)."""

    t1: float
    t2: float
    t3: float


@dataclass(frozen=True)
class DiscretizationParams:
    """Grid sizes of the dual evaluation.

    L: half-width of the multiplier cube [-L, L]^3 (integer)
    M: multiplier grid density, step 1/M
    N: energy grid density, L*N points on (0, pi/2]
    S: samples per boundary arc (k = 0..S)
    """

    L: int = 20
    M: int = 5
    N: int = 5000
    S: int = 5000

    def __post_init__(self):
        for name in ("L", "M", "N", "S"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")


class SymmetryMap(Enum):
    """The four exact symmetries of the problem on correlation pairs."""

    IDENTITY = "identity"
    SWAP = "swap"
    NEGATE = "negate"
    SWAP_NEGATE = "swap_negate"


_SYMMETRY_ORDER = (
    (SymmetryMap.IDENTITY, lambda c0, c1: (c0, c1)),
    (SymmetryMap.SWAP, lambda c0, c1: (c1, c0)),
    (SymmetryMap.NEGATE, lambda c0, c1: (-c0, -c1)),
    (SymmetryMap.SWAP_NEGATE, lambda c0, c1: (-c1, -c0)),
)


@dataclass(frozen=True)
class CertifiedBound:
    """Result of `certify`: h_cert = max(0, h_dual_raw) is the certified
    lower bound (bits) on the adversarial entropy at the input point."""

    h_cert: float
    h_dual_raw: float
    best_t: DualVector
    params: DiscretizationParams
    input: tuple[Correlation, EnergyTimeBudget]
    canonical_input: Correlation
    symmetry_applied: SymmetryMap
    trivial_regime: bool = False


@dataclass(frozen=True)
class SweepResult:
    """Certified bounds on a square correlation grid for one budget.

    values[i, j] is the bound at (coords[i], coords[j]); NaN marks cells
    outside the quantum set.
    """

    coords: np.ndarray
    values: np.ndarray
    u: float
    params: DiscretizationParams


_MAX_THREADS: Optional[int] = None


def set_threads(threads: Optional[int]) -> None:
    """Pin the numba thread count for subsequent kernel calls.

    None keeps the current setting.  Values are clamped to the maximum the
    runtime was launched with; results are identical for every setting.
    """
    global _MAX_THREADS
    if threads is None:
        return
    import numba

    if _MAX_THREADS is None:
        _MAX_THREADS = numba.get_num_threads()
    if threads < 1:
        raise ValueError("threads must be >= 1")
    numba.set_num_threads(min(int(threads), _MAX_THREADS))


def canonicalize(c) -> tuple[tuple[float, float], SymmetryMap]:
    """Map a pair into the sector C0 >= 0, |C1| <= C0 by one of the four
    symmetries; ties prefer identity, then swap, then negate, then both."""
    c0, c1 = _as_pair(c)
    for sym, f in _SYMMETRY_ORDER:
        a, b = f(c0, c1)
        if a >= 0.0 and abs(b) <= a:
            return (a, b), sym
    raise AssertionError("unreachable: one symmetry image always lies in the sector")


def delta_correction(t, u_prime, S: int) -> float:
    """Arc-sampling correction (pi/2 - u')(1 + 2|t1| + 2|t2|)/S."""
    u = _as_u(u_prime)
    if not 0.0 <= u <= HALF_PI + 1e-12:
        raise ValueError(f"u_prime must lie in [0, pi/2], got {u!r}")
    if S < 1:
        raise ValueError("S must be >= 1")
    t1, t2 = t[0], t[1]
    return (HALF_PI - u) * (1.0 + 2.0 * abs(t1) + 2.0 * abs(t2)) / S


# ----------------------------------------------------------------------
# Restricted dual grid and its sound prunings
# ----------------------------------------------------------------------


def _t3_abs_bound(t1: float, t2_abs: float, c0: float, c1: float, u: float,
                  h0: float, h1: float) -> float:
    """Largest |t3| a maximiser can carry at a canonical-sector point: any
    larger value makes the dual objective provably negative."""
    return min((h1 + (c0 - c1) * t1) / u, (h0 + (c0 - c1) * t2_abs) / u)


def _boundary_probes(c0: float, c1: float, u: float, count: int = 8):
    """Fixed probe points on the lower boundary arc with C0' > C0, C1' < C1.

    Each probe (C0', C1', H') forbids dual pairs with
    t1 (C0'-C0) + |t2| (C1-C1') > H'; any finite probe set prunes soundly.
    """
    if u <= 0.0 or u >= HALF_PI:
        return []
    probes = []
    for i in range(1, count + 1):
        s = i * (HALF_PI - u) / (count + 1)
        p0, p1 = boundary_point(u, BoundaryCurve.TWO, s)
        if p0 > c0 and p1 < c1:
            probes.append((p0, p1, entropy_H((p0, p1))))
    return probes


def _pair_pruned(t1: float, t2_abs: float, probes, c0: float, c1: float) -> bool:
    for p0, p1, hp in probes:
        if t1 * (p0 - c0) + t2_abs * (c1 - p1) > hp:
            return True
    return False


def t_grid(L: int, M: int, prune_ctx=None) -> Iterator[DualVector]:
    """Yield the restricted dual grid: t1 = i/M in [0, L], t2 in [-t1, 0],
    t3 in [-L, 0], all on the step-1/M lattice.

    With a pruning context (canonical (C0, C1), u), vectors that provably
    cannot maximise the dual at that point are skipped: |t3| is capped by
    min{(h(C1) + (C0-C1) t1)/u, (h(C0) + (C0-C1)|t2|)/u} (only for u > 0),
    and pairs violating a fixed set of boundary-probe inequalities are
    dropped entirely.
    """
    if L < 1 or M < 1:
        raise ValueError("L and M must be >= 1")
    c0 = c1 = u = None
    probes = []
    h0 = h1 = 0.0
    if prune_ctx is not None:
        (c0, c1), u = _as_pair(prune_ctx[0]), _as_u(prune_ctx[1])
        h0, h1 = h_bin(c0), h_bin(c1)
        probes = _boundary_probes(c0, c1, u)
    lm = L * M
    for i1 in range(lm + 1):
        t1 = i1 / M
        for i2 in range(i1 + 1):
            t2_abs = i2 / M
            t2 = -t2_abs + 0.0  # avoid -0.0
            if probes and _pair_pruned(t1, t2_abs, probes, c0, c1):
                continue
            bound = math.inf
            if prune_ctx is not None and u > 0.0:
                bound = _t3_abs_bound(t1, t2_abs, c0, c1, u, h0, h1)
            for i3 in range(lm + 1):
                x3 = i3 / M
                if x3 > bound:
                    break
                yield DualVector(t1, t2, -x3 + 0.0)


# ----------------------------------------------------------------------
# Inner minimisation and dual value for a single vector
# ----------------------------------------------------------------------

_ROW_CHUNK = 65536


def inner_min(t, L: int, N: int, S: int, threads: Optional[int] = None) -> float:
    """Discretised inner minimum for dual vector t.

    Minimum over the energy grid of: the two corner values +-(t1+t2) - t3*eps
    and the sampled minima of both boundary arcs lowered by the sampling
    correction.  Guaranteed not to exceed the continuous infimum of the
    underestimator slack.
    """
    if L < 1 or N < 1 or S < 1:
        raise ValueError("L, N, S must be >= 1")
    set_threads(threads)
    t1, t2, t3 = float(t[0]), float(t[1]), float(t[2])
    ln = L * N
    kappa = (1.0 + 2.0 * abs(t1) + 2.0 * abs(t2)) / S
    base = abs(t1) + abs(t2)
    best = math.inf
    buf = np.empty(min(ln, _ROW_CHUNK))
    j = 1
    while j <= ln:
        j_end = min(j + _ROW_CHUNK, ln + 1)
        _kernels.inner_min_rows(t1, t2, t3, ln, S, j, j_end, buf[: j_end - j])
        chunk_min = float(buf[: j_end - j].min())
        if chunk_min < best:
            best = chunk_min
        if t3 <= 0.0 and j_end <= ln:
            # all later rows have eps >= eps_next; every candidate there is at
            # least -base - kappa*(pi/2 - eps) + |t3|*eps, increasing in eps
            eps_next = HALF_PI * j_end / ln
            floor_next = -base - kappa * (HALF_PI - eps_next) + abs(t3) * eps_next
            if floor_next >= best:
                break
        j = j_end
    return best


def _dual_objective(inner: float, t1: float, t2: float, t3: float,
                    c0: float, c1: float, u: float, ln: int) -> float:
    return inner - abs(t3) * (HALF_PI / ln) + t1 * c0 + t2 * c1 + t3 * u


def dual_value(t, c, budget, params: DiscretizationParams,
               threads: Optional[int] = None, _inner: Optional[float] = None) -> float:
    """Certified dual objective at an observed point:
    inner_min(t) - |t3|(pi/2)/(L N) + t1 C0 + t2 C1 + t3 u.

    By weak duality this never exceeds the adversarial entropy at (c, u),
    whatever t is.  `_inner` lets callers reuse a precomputed inner_min.
    """
    c0, c1 = _as_pair(c)
    u = _as_u(budget)
    t1, t2, t3 = float(t[0]), float(t[1]), float(t[2])
    inner = inner_min(t, params.L, params.N, params.S, threads=threads) \
        if _inner is None else _inner
    return _dual_objective(inner, t1, t2, t3, c0, c1, u, params.L * params.N)


# ----------------------------------------------------------------------
# Full grid maximisation
# ----------------------------------------------------------------------


def _maximize_dual(c0: float, c1: float, u: float, params: DiscretizationParams):
    """Maximise the dual objective at the canonical point (c0, c1, u) over the
    restricted pruned grid.  Returns (best value, best DualVector), ties
    broken toward the lexicographically smallest vector."""
    L, M, N, S = params.L, params.M, params.N, params.S
    ln = L * N
    lm = L * M
    half = S // 2 + 1

    h0, h1 = h_bin(c0), h_bin(c1)
    probes = _boundary_probes(c0, c1, u)
    x3vals = np.array([i / M for i in range(lm + 1)])

    # pairs grouped by the alpha index a = i1 - i2 (t1 = i1/M, t2 = -i2/M);
    # within a group beta = (i1 + i2)/M is ascending, as the hull walk needs
    t1s, t2abss, n3s, group_start, group_alpha = [], [], [], [0], []
    for a in range(lm + 1):
        for i2 in range(lm - a + 1):
            i1 = a + i2
            t1 = i1 / M
            t2_abs = i2 / M
            if probes and _pair_pruned(t1, t2_abs, probes, c0, c1):
                continue
            if u > 0.0:
                bound = _t3_abs_bound(t1, t2_abs, c0, c1, u, h0, h1)
                n3 = int(np.searchsorted(x3vals, bound, side="right"))
            else:
                n3 = lm + 1
            t1s.append(t1)
            t2abss.append(t2_abs)
            n3s.append(n3)
        group_start.append(len(t1s))
        group_alpha.append(a / M)

    t1arr = np.array(t1s)
    t2abs = np.array(t2abss)
    n3 = np.array(n3s, dtype=np.int64)
    betas = t1arr + t2abs           # |t1 - t2|
    kappas = (1.0 + 2.0 * np.abs(t1arr) + 2.0 * np.abs(-t2abs)) / S
    npairs = t1arr.size

    acc = np.full((npairs, lm + 1), np.inf)
    rows = max(1, min(ln, (8 << 20) // (24 * half)))
    eps_buf = np.empty(rows)
    pab = np.empty((rows, half))
    qab = np.empty((rows, half))
    wab = np.empty((rows, half))
    gs = np.array(group_start, dtype=np.int64)
    ga = np.array(group_alpha)

    j = 1
    while j <= ln:
        nrows = min(rows, ln - j + 1)
        _kernels.build_tables(j, ln, S, nrows, eps_buf, pab, qab, wab)
        _kernels.scan_pairs(
            eps_buf, pab, qab, wab, nrows, half,
            gs, ga, betas, kappas, n3, x3vals, acc,
        )
        j += nrows

    # dual objective, same operation order as dual_value()
    pen = HALF_PI / ln
    best_val = -math.inf
    best_t = None
    for p in range(npairs):
        t1 = float(t1arr[p])
        t2 = float(-t2abs[p]) + 0.0
        row = acc[p, : n3[p]]
        vals = row - x3vals[: n3[p]] * pen + t1 * c0 + t2 * c1 + (-x3vals[: n3[p]]) * u
        for i in np.flatnonzero(vals >= best_val):
            tvec = DualVector(t1, t2, float(-x3vals[i]) + 0.0)
            v = float(vals[i])
            if v > best_val or (v == best_val and tvec < best_t):
                best_val = v
                best_t = tvec
    return best_val, best_t


def certify(c, budget, params: Optional[DiscretizationParams] = None,
            threads: Optional[int] = None, safety_margin: float = 0.0) -> CertifiedBound:
    """Certified lower bound on the adversarial entropy at (c, u).

    The input must lie inside the quantum set for its budget (tolerance
    1e-9), otherwise InfeasibleInputError is raised.  The pair is first
    mapped to the canonical sector (the bound is symmetry-invariant), then
    the dual objective is maximised over the restricted grid.  Deterministic:
    among maximising grid vectors the lexicographically smallest is reported,
    independent of thread count.
    """
    if params is None:
        params = DiscretizationParams()
    c0, c1 = _as_pair(c)
    u = _as_u(budget)
    if not quantum_contains((c0, c1), u, tol=1e-9):
        raise InfeasibleInputError(
            f"correlation ({c0:.17g}, {c1:.17g}) is outside the quantum set for "
            f"u={u:.17g}: overlap lhs {quantum_overlap_lhs((c0, c1)):.12g} "
            f"< gamma {gamma(u):.12g}"
        )
    set_threads(threads)
    (cc0, cc1), sym = canonicalize((c0, c1))
    trivial = u >= HALF_PI
    if trivial:
        # the wedge covers the whole square: nothing is certifiable and the
        # true adversarial entropy is 0, so report the exact dual optimum
        raw, best_t = 0.0, DualVector(0.0, 0.0, 0.0)
    else:
        raw, best_t = _maximize_dual(cc0, cc1, u, params)
    raw -= safety_margin
    return CertifiedBound(
        h_cert=max(0.0, raw),
        h_dual_raw=raw,
        best_t=best_t,
        params=params,
        input=(Correlation(c0, c1), EnergyTimeBudget(u)),
        canonical_input=Correlation(cc0, cc1),
        symmetry_applied=sym,
        trivial_regime=trivial,
    )


def diagonal_sweep(budget, grid_n: int, params: Optional[DiscretizationParams] = None,
                   threads: Optional[int] = None) -> SweepResult:
    """Certified bounds over the full (C0, C1) grid from midpoints only.

    The bound at the centre (d/2, -d/2) of each line C0 - C1 = d lower-bounds
    the bound everywhere on that line inside the quantum set, so one certify
    call per distinct grid difference d fills the whole grid.  Cells outside
    the quantum set are NaN; cells in the classical wedge are exactly 0.
    """
    if params is None:
        params = DiscretizationParams()
    u = _as_u(budget)
    if grid_n < 3 or grid_n % 2 == 0:
        raise ValueError(f"grid_n must be an odd integer >= 3, got {grid_n!r}")
    set_threads(threads)
    n1 = grid_n - 1
    coords = np.array([-1.0 + 2.0 * i / n1 for i in range(grid_n)])
    values = np.full((grid_n, grid_n), np.nan)
    cache: dict[int, float] = {}
    for i in range(grid_n):
        for j in range(grid_n):
            cell = (float(coords[i]), float(coords[j]))
            if not quantum_contains(cell, u):
                continue
            if classical_contains(cell, u):
                values[i, j] = 0.0
                continue
            m = abs(i - j)
            if m not in cache:
                d_half = m / n1
                cache[m] = certify((d_half, -d_half), u, params=params).h_cert
            values[i, j] = cache[m]
    return SweepResult(coords=coords, values=values, u=u, params=params)
