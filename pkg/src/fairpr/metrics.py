"""Outcome measures: relative matrix change and rank-correlation summaries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .graph import GroupAssignment, TransitionMatrix


class UndefinedCoefficientError(ValueError):
    """Rank correlation has no defined value for this input."""


@dataclass(frozen=True)
class MetricBundle:
    loss: float
    loss_group_adapted: float
    delta_p: float
    rho_bar: float
    rho_tilde: float | None  # None when no vertex has a defined coefficient


def spearman(r1: np.ndarray, r2: np.ndarray) -> float:
    """Pearson correlation of average ranks; ties share their mean rank."""
    a = np.asarray(r1, dtype=float)
    b = np.asarray(r2, dtype=float)
    if a.shape != b.shape:
        raise ValueError("vectors must have equal length")
    if a.size < 2:
        raise UndefinedCoefficientError("need at least 2 values for a rank correlation")
    ra = rankdata(a, method="average")
    rb = rankdata(b, method="average")
    ca = ra - ra.mean()
    cb = rb - rb.mean()
    denom = float(np.sqrt((ca @ ca) * (cb @ cb)))
    if denom == 0.0:
        raise UndefinedCoefficientError("zero rank variance")
    return float((ca @ cb) / denom)


def delta_p(P_new: TransitionMatrix, P_old: TransitionMatrix) -> float:
    """||P_new - P_old||_F / ||P_old||_F over the union of the two patterns."""
    if P_new.n != P_old.n:
        raise ValueError("matrices must have the same dimension")
    diff = P_new.to_csr() - P_old.to_csr()
    num = float(np.sqrt((diff.data**2).sum()))
    den = float(np.sqrt((P_old.data**2).sum()))
    return num / den


def rho_bar(p_old: np.ndarray, p_new: np.ndarray, groups: GroupAssignment) -> float:
    """Group-size-weighted mean of within-group Spearman coefficients.

    Size-1 groups contribute 1 (their trivial ranking is unchanged). A
    degenerate group whose scores are all tied contributes 1 when both
    vectors are tied, else 0; skipping would silently change the weights.
    """
    if len(p_old) != groups.n or len(p_new) != groups.n:
        raise ValueError("score vectors must match the label count")
    n = groups.n
    total = 0.0
    for k in range(groups.K):
        idx = groups.members(k)
        if len(idx) == 1:
            rho = 1.0
        else:
            a, b = p_old[idx], p_new[idx]
            a_const = a.max() == a.min()
            b_const = b.max() == b.min()
            if a_const or b_const:
                rho = 1.0 if (a_const and b_const) else 0.0
            else:
                rho = spearman(a, b)
        total += (len(idx) / n) * rho
    return total


def _union_row(tm: TransitionMatrix, i: int, cols_u: np.ndarray) -> np.ndarray:
    cols, vals = tm.row(i)
    out = np.zeros(len(cols_u))
    out[np.searchsorted(cols_u, cols)] = vals
    return out


def rho_tilde(P_old: TransitionMatrix, P_new: TransitionMatrix) -> float:
    """Mean Spearman coefficient of each vertex's out-weight ranking.

    Per non-sink vertex, old and new weights are compared over the union of
    the two row patterns (absent entries count as zero). Vertices with
    fewer than 2 union entries are skipped; a vertex whose weights are all
    tied on both sides contributes 1, tied on exactly one side it is
    skipped as undefined.
    """
    if P_new.n != P_old.n:
        raise ValueError("matrices must have the same dimension")
    coeffs = []
    for i in range(P_old.n):
        if P_old.sink_mask[i]:
            continue
        cols_u = np.union1d(P_old.row(i)[0], P_new.row(i)[0])
        if len(cols_u) < 2:
            continue
        a = _union_row(P_old, i, cols_u)
        b = _union_row(P_new, i, cols_u)
        a_const = a.max() == a.min()
        b_const = b.max() == b.min()
        if a_const and b_const:
            coeffs.append(1.0)
        elif a_const or b_const:
            continue
        else:
            coeffs.append(spearman(a, b))
    if not coeffs:
        raise UndefinedCoefficientError("no vertex with a defined out-weight rank correlation")
    return float(np.mean(coeffs))
