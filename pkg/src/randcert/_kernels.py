"""Compiled inner loops for the discretised dual bound.

The inner minimisation for a dual vector t = (t1, t2, t3) runs over an energy
grid eps_j = (pi/2) * j / (L*N), j = 1..L*N, and for each eps over the two
boundary arcs of the quantum set sampled at steps Delta/S
(Delta = pi/2 - eps, k = 0..S, both endpoints included).  Writing a curve
sample as theta = 2s -+ eps, the two arcs together contribute candidates

    f = W(theta) - t1*C0 - t2*C1 - t3*eps,

and the pairwise minimum over the two arcs collapses to

    f = W - alpha*P - beta*Q - t3*eps,
    P = (C0+C1)/2 = cos(theta) cos(eps),   alpha = t1 + t2,
    Q = |C0-C1|/2 = sin(theta) sin(eps),   beta  = |t1 - t2|,
    W = (h(C0) + h(C1)) / 2.

Two exact reductions keep this fast:

* mirror pairing: theta and pi - theta give identical (W, Q) and opposite P,
  so the minimum over the full arc equals a scan over half the samples with
  |alpha| * |P| — the tables below store only k = 0..S//2;
* in the full grid maximisation, pairs sharing alpha differ only in the
  coefficient beta >= 0 of -Q, so per energy row and alpha we build the lower
  convex hull of the points (Q_k, W_k - alpha*P_k) once and read the minima
  for all beta off the hull with a monotone pointer (Q_k is increasing on
  the half range, so the points arrive pre-sorted).

Corner candidates -+(t1+t2) - t3*eps enter as -|alpha| - t3*eps, and the
curve minimum is lowered by the sampling correction
delta = (pi/2 - eps) * (1 + 2|t1| + 2|t2|) / S before the comparison, so
every value produced here is a certified lower bound of the continuous
inner minimum.

All loops are deterministic: parallelism is over independent energy rows or
independent alpha groups, merged with exact (order-free) float mins.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

HALF_PI = 0.5 * math.pi
_LN2 = math.log(2.0)


@njit(cache=True, inline="always")
def _hbin(c):
    p = 0.5 * (1.0 + c)
    q = 0.5 * (1.0 - c)
    s = 0.0
    if p > 0.0:
        s -= p * math.log(p)
    if q > 0.0:
        s -= q * math.log(q)
    return s / _LN2


@njit(cache=True, parallel=True)
def build_tables(j0, ln, s_count, nrows, eps_out, pab, qab, wab):
    """Fill half-range sample tables for energy rows j0 .. j0+nrows-1
    (1-based row index j, eps_j = (pi/2) * j / ln).

    pab/qab/wab: (nrows, S//2+1) sample values |P|, Q, W.
    """
    half = s_count // 2 + 1
    for r in prange(nrows):
        j = j0 + r
        eps = HALF_PI * j / ln
        eps_out[r] = eps
        delta = HALF_PI - eps
        step = 2.0 * delta / s_count
        # rotation recurrence for cos/sin of 2v and 2v + 2eps, v = k*delta/S
        ca, sa = 1.0, 0.0
        cb = math.cos(2.0 * eps)
        sb = math.sin(2.0 * eps)
        cstep = math.cos(step)
        sstep = math.sin(step)
        for k in range(half):
            a = ca  # C0-coordinate cos(2v)
            b = cb  # C1-coordinate cos(2v + 2eps)
            pab[r, k] = 0.5 * abs(a + b)
            qab[r, k] = 0.5 * abs(a - b)
            wab[r, k] = 0.5 * (_hbin(a) + _hbin(b))
            ca, sa = ca * cstep - sa * sstep, sa * cstep + ca * sstep
            cb, sb = cb * cstep - sb * sstep, sb * cstep + cb * sstep


@njit(cache=True, parallel=True)
def scan_pairs(
    eps_arr,
    pab,
    qab,
    wab,
    nrows,
    half,
    group_start,
    group_alpha,
    pair_beta,
    pair_kappa,
    pair_n3,
    x3vals,
    acc,
):
    """Accumulate, for every dual pair p and allowed |t3| index i,
    acc[p, i] = min over processed energy rows of (mtilde + x3vals[i]*eps),
    mtilde = min(curve_min - delta_correction, -alpha).

    Pairs are grouped by alpha = t1 + t2 (group g covers pair indices
    group_start[g] .. group_start[g+1]-1, with beta ascending inside the
    group); each (row, group) builds one lower hull of (Q, W - alpha*P).
    """
    ngroups = group_start.shape[0] - 1
    for g in prange(ngroups):
        p0 = group_start[g]
        p1 = group_start[g + 1]
        if p1 <= p0:
            continue
        al = group_alpha[g]
        y = np.empty(half)
        hull = np.empty(half, dtype=np.int64)
        for r in range(nrows):
            eps = eps_arr[r]
            dcorr = HALF_PI - eps
            for k in range(half):
                y[k] = wab[r, k] - al * pab[r, k]
            # lower convex hull over (Q, y); Q is ascending in k
            hn = 0
            for k in range(half):
                qk = qab[r, k]
                yk = y[k]
                while hn >= 2:
                    i1 = hull[hn - 1]
                    i2 = hull[hn - 2]
                    # pop while the middle point is not strictly below
                    # the chord from hull[hn-2] to (qk, yk)
                    if (qab[r, i1] - qab[r, i2]) * (yk - y[i2]) - (
                        y[i1] - y[i2]
                    ) * (qk - qab[r, i2]) <= 0.0:
                        hn -= 1
                    else:
                        break
                hull[hn] = k
                hn += 1
            w = 0
            for p in range(p0, p1):
                be = pair_beta[p]
                cur = y[hull[w]] - be * qab[r, hull[w]]
                while w + 1 < hn:
                    nxt = y[hull[w + 1]] - be * qab[r, hull[w + 1]]
                    if nxt <= cur:
                        w += 1
                        cur = nxt
                    else:
                        break
                m = cur - dcorr * pair_kappa[p]
                if -al < m:
                    m = -al
                for i in range(pair_n3[p]):
                    cand = m + x3vals[i] * eps
                    if cand < acc[p, i]:
                        acc[p, i] = cand


@njit(cache=True, parallel=True)
def inner_min_rows(t1, t2, t3, ln, s_count, j0, j1, out):
    """Per-row inner minimum for a single dual vector: out[j - j0] holds
    min over that energy row (corners and both sampled arcs, with the
    sampling correction applied) for rows j0 <= j < j1 (1-based)."""
    al = abs(t1 + t2)
    be = abs(t1 - t2)
    ka = (1.0 + 2.0 * abs(t1) + 2.0 * abs(t2)) / s_count
    half = s_count // 2 + 1
    for idx in prange(j1 - j0):
        j = j0 + idx
        eps = HALF_PI * j / ln
        delta = HALF_PI - eps
        step = 2.0 * delta / s_count
        ca, sa = 1.0, 0.0
        cb = math.cos(2.0 * eps)
        sb = math.sin(2.0 * eps)
        cstep = math.cos(step)
        sstep = math.sin(step)
        m = np.inf
        for k in range(half):
            a = ca
            b = cb
            pa = 0.5 * abs(a + b)
            qa = 0.5 * abs(a - b)
            vlb = -al * pa - be * qa  # entropy part is >= 0
            if vlb < m:
                v = vlb + 0.5 * (_hbin(a) + _hbin(b))
                if v < m:
                    m = v
            ca, sa = ca * cstep - sa * sstep, sa * cstep + ca * sstep
            cb, sb = cb * cstep - sb * sstep, sb * cstep + cb * sstep
        m -= delta * ka
        corner = -al
        if corner < m:
            m = corner
        out[idx] = m - t3 * eps
