"""Exact Euclidean projections of row weights onto the probability simplex,
and onto its intersection with per-entry box bounds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import TransitionMatrix

# Inputs already feasible within this slack pass through unchanged, which
# makes the projections exactly idempotent.
FEAS_TOL = 1e-13


class InfeasibleBoxError(ValueError):
    """Box bounds admit no point of the simplex."""


@dataclass(frozen=True)
class BoxBounds:
    """Per-entry interval [lower_i, upper_i] intersected with the simplex."""

    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def from_reference(cls, reference: np.ndarray, delta: float, epsilon: float) -> "BoxBounds":
        """lower = max(0, (1-delta) r - eps), upper = min(1, (1+delta) r + eps)."""
        r = np.asarray(reference, float)
        if delta < 0 or epsilon < 0:
            raise ValueError("modification bounds must be nonnegative")
        return cls(
            np.maximum(0.0, (1.0 - delta) * r - epsilon),
            np.minimum(1.0, (1.0 + delta) * r + epsilon),
        )

    def validate(self) -> None:
        lo_sum = float(self.lower.sum())
        up_sum = float(self.upper.sum())
        if (self.lower > self.upper).any():
            raise InfeasibleBoxError("some lower bound exceeds its upper bound")
        if lo_sum > 1.0 + FEAS_TOL or up_sum < 1.0 - FEAS_TOL:
            raise InfeasibleBoxError(
                f"box excludes the simplex: sum(lower) = {lo_sum!r}, sum(upper) = {up_sum!r}"
            )


def project_simplex(s: np.ndarray) -> np.ndarray:
    """Nearest point of the probability simplex under Euclidean distance.

    Sorted-threshold method: with entries sorted descending, take
    k = max{k : 1 + k s_k > sum_{j<=k} s_j}, tau = (sum_{j<=k} s_j - 1)/k,
    and return max(0, s - tau).
    """
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        raise ValueError("cannot project an empty vector")
    if not np.isfinite(s).all():
        raise ValueError("cannot project a vector with non-finite entries")
    if s.min() >= 0.0 and abs(s.sum() - 1.0) <= FEAS_TOL:
        return s.copy()
    work = s
    if s.max() > 1e8:
        # the projection is invariant under uniform shifts; recenter so the
        # threshold test 1 + k s_k > cumsum keeps floating-point headroom
        work = s - (s.max() - 1.0)
    u = np.sort(work, kind="stable")[::-1]
    css = np.cumsum(u)
    j = np.arange(1, s.size + 1)
    k = int(np.flatnonzero(1.0 + j * u > css)[-1]) + 1
    tau = (css[k - 1] - 1.0) / k
    return np.maximum(work - tau, 0.0)


def _solve_dual(s: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> float:
    """Root of h(lam) = sum clip(s + lam, lower, upper) - 1 by a breakpoint sweep.

    The 2N breakpoints lower-s and upper-s are swept in ascending order,
    lower breakpoints first at exact ties; Active counts entries whose
    clipped value currently moves with lam, Total tracks h(lam) + 1.
    """
    d = s.size
    bp = np.concatenate([lower - s, upper - s])
    kind = np.concatenate([np.zeros(d, dtype=np.int64), np.ones(d, dtype=np.int64)])
    order = np.lexsort((kind, bp))
    vals = bp[order]
    kinds = kind[order]
    active = 1
    total = float(lower.sum())
    for i in range(1, 2 * d):
        total += active * (vals[i] - vals[i - 1])
        if total >= 1.0:
            if active > 0:
                return float(vals[i] + (1.0 - total) / active)
            return float(vals[i])
        if kinds[i] == 0:
            active += 1
        else:
            active -= 1
        assert active >= 0
    # Total == sum(upper) < 1 only by the feasibility slack; saturate upward.
    return float(vals[-1])


def project_simplex_box(s: np.ndarray, bounds: BoxBounds) -> np.ndarray:
    """Nearest point of simplex-intersect-box: clip(s + lam*, lower, upper)."""
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        raise ValueError("cannot project an empty vector")
    lower, upper = bounds.lower, bounds.upper
    if s.size != lower.size or s.size != upper.size:
        raise ValueError("bounds length does not match vector length")
    bounds.validate()
    inside = (s >= lower).all() and (s <= upper).all()
    if inside and abs(s.sum() - 1.0) <= FEAS_TOL:
        return s.copy()
    lam = _solve_dual(s, lower, upper)
    return np.clip(s + lam, lower, upper)


def project_matrix(
    P_hat: TransitionMatrix,
    P_orig: TransitionMatrix,
    delta: float | None = None,
    epsilon: float | None = None,
) -> TransitionMatrix:
    """Project every non-sink row of P_hat back onto its feasible set.

    Without bounds each row lands on the simplex; with (delta, epsilon) the
    box is built from P_orig's row, so revised entries stay within the
    allowed relative/absolute modification of the original weights.
    Sink rows pass through untouched.
    """
    if (delta is None) != (epsilon is None):
        raise ValueError("delta and epsilon must be given together")
    if not P_hat.pattern_equals(P_orig):
        raise ValueError("candidate and reference matrices must share their pattern")
    restricted = delta is not None
    out = P_hat.data.copy()
    for i in range(P_hat.n):
        if P_hat.sink_mask[i]:
            continue
        lo, hi = P_hat.indptr[i], P_hat.indptr[i + 1]
        s = P_hat.data[lo:hi]
        if restricted:
            box = BoxBounds.from_reference(P_orig.data[lo:hi], delta, epsilon)
            try:
                out[lo:hi] = project_simplex_box(s, box)
            except InfeasibleBoxError as exc:
                raise InfeasibleBoxError(f"row {i}: {exc}") from None
        else:
            out[lo:hi] = project_simplex(s)
    return TransitionMatrix(
        P_hat.n, P_hat.indptr.copy(), P_hat.indices.copy(), out, P_hat.sink_mask.copy()
    )
