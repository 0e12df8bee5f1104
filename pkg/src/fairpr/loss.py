"""Fairness losses over group scores, their analytic gradients on the sparse
pattern, and the smoothness bound that yields a safe step size."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import FairnessTarget, GroupAssignment, PageRankConfig, TransitionMatrix
from .pagerank import group_scores, neumann_y, pagerank_power


@dataclass(frozen=True)
class SparseGradient:
    """Gradient entries on the optimizable pattern (sink rows excluded)."""

    n: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    def max_abs(self) -> float:
        return float(np.abs(self.values).max()) if len(self.values) else 0.0


def loss_from_scores(scores: np.ndarray, phi: np.ndarray) -> float:
    """(1/K) sum_k (score_k - phi_k)^2."""
    d = np.asarray(scores, float) - np.asarray(phi, float)
    return float(np.mean(d * d))


def loss_fair(
    P: TransitionMatrix,
    cfg: PageRankConfig,
    groups: GroupAssignment,
    target: FairnessTarget,
    t1: int = 100,
    tol: float = 1e-12,
) -> float:
    """Mean squared gap between group scores and their targets."""
    p = pagerank_power(P, cfg, t1=t1, tol=tol)
    return loss_from_scores(group_scores(p, groups), target.phi)


def loss_group_adapted(
    P: TransitionMatrix,
    gamma: float,
    groups: GroupAssignment,
    target: FairnessTarget,
    t1: int = 100,
    tol: float = 1e-12,
) -> float:
    """Average of the fairness loss over walks restarted inside each group.

    (1/K^2) sum_l sum_k (score_k under restart-in-l - phi_k)^2.
    """
    K = groups.K
    total = 0.0
    for ell in range(K):
        cfg = PageRankConfig.group_restart(groups, ell, gamma)
        p = pagerank_power(P, cfg, t1=t1, tol=tol)
        d = group_scores(p, groups) - target.phi
        total += float(d @ d)
    return total / (K * K)


def _optimizable_entries(P: TransitionMatrix):
    """(entry selector, rows, cols) for stored entries outside sink rows."""
    entry_rows = P.entry_rows()
    keep = np.flatnonzero(~P.sink_mask[entry_rows])
    return keep, entry_rows[keep], P.indices[keep]


def grad_fair(
    P: TransitionMatrix,
    cfg: PageRankConfig,
    groups: GroupAssignment,
    target: FairnessTarget,
    t1: int = 100,
    t2: int = 50,
    tol: float = 1e-12,
) -> SparseGradient:
    """Entry (i,j): (2(1-gamma)/K) sum_k (score_k - phi_k) p[i] y_k[j],
    materialized only on the optimizable pattern."""
    gamma = cfg.gamma
    p = pagerank_power(P, cfg, t1=t1, tol=tol)
    resid = group_scores(p, groups) - target.phi
    _, rows, cols = _optimizable_entries(P)
    prow = p[rows]
    values = np.zeros(len(rows))
    c0 = 2.0 * (1.0 - gamma) / groups.K
    for k in range(groups.K):
        if resid[k] == 0.0:
            continue
        y = neumann_y(P, groups.indicator(k), gamma, t2)
        values += (c0 * resid[k]) * prow * y[cols]
    return SparseGradient(P.n, rows, cols, values)


def grad_group_adapted(
    P: TransitionMatrix,
    gamma: float,
    groups: GroupAssignment,
    target: FairnessTarget,
    t1: int = 100,
    t2: int = 50,
    tol: float = 1e-12,
) -> SparseGradient:
    """Entry (i,j): (2(1-gamma)/K^2) sum_k sum_l (score_k(p_l) - phi_k) p_l[i] y_k[j]."""
    K = groups.K
    _, rows, cols = _optimizable_entries(P)
    values = np.zeros(len(rows))
    c0 = 2.0 * (1.0 - gamma) / (K * K)
    ycols = [neumann_y(P, groups.indicator(k), gamma, t2)[cols] for k in range(K)]
    for ell in range(K):
        cfg = PageRankConfig.group_restart(groups, ell, gamma)
        p = pagerank_power(P, cfg, t1=t1, tol=tol)
        resid = group_scores(p, groups) - target.phi
        prow = p[rows]
        for k in range(K):
            if resid[k] == 0.0:
                continue
            values += (c0 * resid[k]) * prow * ycols[k]
    return SparseGradient(P.n, rows, cols, values)


def lipschitz_bound(n: int, K: int, gamma: float) -> float:
    """Smoothness constant C = (2(1-gamma)^2/(K gamma^2)) (n + sqrt(n) + sqrt(Kn)).

    Any constant step size in (0, 2/C] gives monotone descent to a
    stationary point.
    """
    if n < 1 or K < 1:
        raise ValueError("n and K must be >= 1")
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must be in (0,1)")
    lead = 2.0 * (1.0 - gamma) ** 2 / (K * gamma * gamma)
    return lead * (n + math.sqrt(n) + math.sqrt(K * n))
