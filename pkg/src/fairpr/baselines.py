"""Reference reweighting methods: FairWalk (any K) and the two locally fair
two-group schemes, one neighborhood-based and one residual-based."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import FairnessTarget, GroupAssignment, TransitionMatrix


class UnsupportedGroupCountError(ValueError):
    """Method is defined for two groups only."""


@dataclass(frozen=True)
class BaselineResult:
    matrix: TransitionMatrix
    method: str
    pattern_extended: bool = False


def _from_rows(n, row_cols, row_vals, sink_mask) -> TransitionMatrix:
    counts = np.asarray([len(c) for c in row_cols], dtype=np.int64)
    indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    indices = np.concatenate(row_cols) if indptr[-1] else np.empty(0, np.int64)
    data = np.concatenate(row_vals) if indptr[-1] else np.empty(0, float)
    tm = TransitionMatrix(n, indptr, indices.astype(np.int64), data, sink_mask)
    tm.validate()
    return tm


def fairwalk(P: TransitionMatrix, groups: GroupAssignment, target: FairnessTarget) -> BaselineResult:
    """Rescale each row so the mass entering each reachable group is
    proportional to its target share; weights within a group keep their
    relative sizes. The pattern is preserved; sink rows pass through."""
    phi = target.phi
    labels = groups.labels
    out = P.data.copy()
    for i in range(P.n):
        if P.sink_mask[i]:
            continue
        lo, hi = P.indptr[i], P.indptr[i + 1]
        cols = P.indices[lo:hi]
        w = P.data[lo:hi]
        gcols = labels[cols]
        mass = np.bincount(gcols, weights=w, minlength=groups.K)
        reach_phi = float(phi[mass > 0].sum())
        if reach_phi == 0.0:
            continue
        out[lo:hi] = phi[gcols] * w / (mass[gcols] * reach_phi)
    tm = TransitionMatrix(P.n, P.indptr.copy(), P.indices.copy(), out, P.sink_mask.copy())
    tm.validate()
    return BaselineResult(tm, "fairwalk", pattern_extended=False)


def _require_two_groups(groups: GroupAssignment, method: str) -> None:
    if groups.K != 2:
        raise UnsupportedGroupCountError(f"{method} supports exactly 2 groups, got K = {groups.K}")


def lfpr_n(P: TransitionMatrix, groups: GroupAssignment, target: FairnessTarget) -> BaselineResult:
    """Every vertex splits share phi_k uniformly over its out-neighbors in
    group k; with no such neighbor the share spreads over all of group k,
    extending the pattern."""
    _require_two_groups(groups, "lfpr_n")
    phi = target.phi
    labels = groups.labels
    sizes = groups.group_sizes
    members = [groups.members(k) for k in range(2)]
    row_cols, row_vals = [], []
    extended = False
    acc = np.zeros(P.n)
    for i in range(P.n):
        acc[:] = 0.0
        if P.sink_mask[i]:
            cols = np.empty(0, np.int64)
        else:
            cols = P.indices[P.indptr[i] : P.indptr[i + 1]]
        gcols = labels[cols]
        for k in range(2):
            into_k = cols[gcols == k]
            if len(into_k):
                acc[into_k] += phi[k] / len(into_k)
            else:
                acc[members[k]] += phi[k] / sizes[k]
                if not P.sink_mask[i]:
                    extended = True
        nz = np.flatnonzero(acc)
        row_cols.append(nz)
        row_vals.append(acc[nz].copy())
    tm = _from_rows(P.n, row_cols, row_vals, P.sink_mask.copy())
    return BaselineResult(tm, "lfpr_n", pattern_extended=extended)


def lfpr_u(P: TransitionMatrix, groups: GroupAssignment, target: FairnessTarget) -> BaselineResult:
    """Uniform edge weights capped at the over-represented group's share;
    each row's leftover share for its under-represented group spreads
    uniformly over that whole group (the residual term)."""
    _require_two_groups(groups, "lfpr_u")
    phi1 = float(target.phi[0])
    labels = groups.labels
    sizes = groups.group_sizes
    members = [groups.members(k) for k in range(2)]
    row_cols, row_vals = [], []
    extended = False
    acc = np.zeros(P.n)
    for i in range(P.n):
        acc[:] = 0.0
        if P.sink_mask[i]:
            # no edges: both shares route through the uniform spread
            acc[members[0]] += phi1 / sizes[0]
            acc[members[1]] += (1.0 - phi1) / sizes[1]
        else:
            cols = P.indices[P.indptr[i] : P.indptr[i + 1]]
            outdeg = len(cols)
            out1 = int((labels[cols] == 0).sum())
            out2 = outdeg - out1
            if out1 < phi1 * outdeg:
                # group 0 under-represented; edges carry group 1's full share
                base = (1.0 - phi1) / out2
                acc[cols] += base
                resid = phi1 - base * out1
                acc[members[0]] += resid / sizes[0]
                extended = extended or out1 < sizes[0]
            elif out2 < (1.0 - phi1) * outdeg:
                base = phi1 / out1
                acc[cols] += base
                resid = (1.0 - phi1) - base * out2
                acc[members[1]] += resid / sizes[1]
                extended = extended or out2 < sizes[1]
            else:
                # neighbor fractions already match the target exactly
                acc[cols] += 1.0 / outdeg
        nz = np.flatnonzero(acc)
        row_cols.append(nz)
        row_vals.append(acc[nz].copy())
    tm = _from_rows(P.n, row_cols, row_vals, P.sink_mask.copy())
    return BaselineResult(tm, "lfpr_u", pattern_extended=extended)
