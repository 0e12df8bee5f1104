import numpy as np
import pytest

from fairpr import (
    PageRankConfig,
    TransitionMatrix,
    UndefinedCoefficientError,
    build_transition,
    delta_p,
    lfpr_n,
    load_graph,
    load_labels,
    rho_bar,
    rho_tilde,
    spearman,
    FairnessTarget,
)


def test_spearman_identity_and_reversal():
    assert spearman([1.0, 2.0, 5.0], [1.0, 2.0, 5.0]) == 1.0
    assert spearman([1.0, 2.0, 5.0], [5.0, 2.0, 1.0]) == -1.0


def test_spearman_classical_fixture():
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == 0.8


def test_spearman_symmetric_and_monotone_invariant():
    rng = np.random.default_rng(11)
    for _ in range(50):
        a = rng.normal(0, 1, 12)
        b = rng.normal(0, 1, 12)
        assert spearman(a, b) == pytest.approx(spearman(b, a), abs=1e-15)
        assert spearman(np.exp(a), b) == pytest.approx(spearman(a, b), abs=1e-12)


def test_spearman_ties_average():
    # ties share average ranks; the coefficient still reflects agreement
    assert spearman([1, 1, 2], [1, 1, 2]) == 1.0


def test_spearman_errors():
    with pytest.raises(UndefinedCoefficientError):
        spearman([1.0], [2.0])
    with pytest.raises(UndefinedCoefficientError):
        spearman([3.0, 3.0, 3.0], [1.0, 2.0, 3.0])


def test_delta_p_zero_and_hand_value():
    A = TransitionMatrix.from_dense([[0, 1], [1, 0]])
    assert delta_p(A, A) == 0.0
    B = TransitionMatrix.from_dense([[0, 1], [0.5, 0.5]])
    assert abs(delta_p(B, A) - 0.5) <= 1e-12


def test_delta_p_scaling_linearity():
    A = TransitionMatrix.from_dense([[0.5, 0.5], [0.5, 0.5]])
    B1 = TransitionMatrix.from_dense([[0.55, 0.45], [0.5, 0.5]])
    B2 = TransitionMatrix.from_dense([[0.6, 0.4], [0.5, 0.5]])
    assert abs(delta_p(B2, A) - 2 * delta_p(B1, A)) <= 1e-12


def test_delta_p_triangle_sanity():
    A = TransitionMatrix.from_dense([[0.5, 0.5], [0.5, 0.5]])
    B = TransitionMatrix.from_dense([[0.7, 0.3], [0.5, 0.5]])
    C = TransitionMatrix.from_dense([[0.9, 0.1], [0.4, 0.6]])
    gap = np.linalg.norm(B.to_dense() - C.to_dense()) / np.linalg.norm(A.to_dense())
    assert delta_p(C, A) <= delta_p(B, A) + gap + 1e-12


def test_delta_p_pattern_union():
    # extended pattern contributes through the union of entries
    A = TransitionMatrix.from_dense([[0, 1], [1, 0]])
    B = TransitionMatrix.from_dense([[0.5, 0.5], [1, 0]])
    expect = np.linalg.norm(B.to_dense() - A.to_dense()) / np.linalg.norm(A.to_dense())
    assert abs(delta_p(B, A) - expect) <= 1e-14


def test_rho_bar_identity_and_scaling():
    groups = load_labels("0 0\n1 0\n2 1\n3 1\n4 1", 5)
    p = np.array([0.3, 0.1, 0.2, 0.25, 0.15])
    assert rho_bar(p, p.copy(), groups) == 1.0
    scaled = p.copy()
    scaled[groups.members(0)] *= 3.0
    scaled[groups.members(1)] *= 0.25
    assert rho_bar(p, scaled, groups) == 1.0


def test_rho_bar_singleton_contributes_one():
    groups = load_labels("0 0\n1 1\n2 1", 3)
    p_old = np.array([0.2, 0.5, 0.3])
    p_new = np.array([0.2, 0.3, 0.5])  # group 1 reversed, group 0 singleton
    expect = (1 / 3) * 1.0 + (2 / 3) * (-1.0)
    assert rho_bar(p_old, p_new, groups) == pytest.approx(expect, abs=1e-15)


def test_rho_bar_weighting():
    groups = load_labels("0 0\n1 0\n2 0\n3 1\n4 1", 5)
    p_old = np.array([0.1, 0.2, 0.3, 0.15, 0.25])
    p_new = np.array([0.1, 0.2, 0.3, 0.25, 0.15])  # group 1 reversed
    assert rho_bar(p_old, p_new, groups) == pytest.approx(0.6 * 1.0 + 0.4 * -1.0, abs=1e-15)


def test_rho_tilde_identity_and_reversal():
    A = TransitionMatrix.from_dense([[0.7, 0.3], [0.5, 0.5]])
    assert rho_tilde(A, A) == 1.0  # varied row 1.0; tied row counts as preserved
    B = TransitionMatrix.from_dense([[0.3, 0.7], [0.5, 0.5]])
    assert rho_tilde(B, A) == pytest.approx((-1.0 + 1.0) / 2, abs=1e-15)


def test_rho_tilde_skips_thin_and_sink_rows():
    g = load_graph("0 1\n0 2\n1 0\n0 3")  # vertices 2,3 sinks; vertex 1 single edge
    cfg = PageRankConfig.uniform(4)
    P = build_transition(g, cfg)
    Q = P.copy()
    lo, hi = Q.indptr[0], Q.indptr[1]
    Q.data[lo:hi] = [0.5, 0.3, 0.2]
    # only row 0 is eligible: old uniform vs new varied -> one-sided tie, skipped
    with pytest.raises(UndefinedCoefficientError):
        rho_tilde(P, Q)


def test_rho_tilde_union_of_patterns():
    # lfpr output extends patterns; old entries off-pattern count as zero
    g = load_graph("0 1\n0 2\n1 0\n2 0\n2 1")
    groups = load_labels("0 0\n1 0\n2 1", 3)
    P = build_transition(g, PageRankConfig.uniform(3))
    M = lfpr_n(P, groups, FairnessTarget(phi=[0.5, 0.5])).matrix
    value = rho_tilde(P, M)
    assert -1.0 <= value <= 1.0


def test_rho_tilde_no_eligible_vertex():
    A = TransitionMatrix.from_dense([[0, 1], [1, 0]])
    B = TransitionMatrix.from_dense([[0, 1], [1, 0]])
    with pytest.raises(UndefinedCoefficientError):
        rho_tilde(A, B)  # single-entry rows only
