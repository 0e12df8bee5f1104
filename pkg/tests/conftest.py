"""Shared builders for the test suite. Everything is seeded: the suite is
deterministic end to end."""

from pathlib import Path

import numpy as np
import pytest

from fairpr import (
    FairnessTarget,
    PageRankConfig,
    build_transition,
    load_graph,
    load_labels,
)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def karate():
    """(graph, groups, cfg, P) for the 34-vertex club graph, gamma = 0.15."""
    g = load_graph((DATA_DIR / "karate_edges.txt").read_text(), undirected=True)
    groups = load_labels((DATA_DIR / "karate_labels.txt").read_text(), g.n)
    cfg = PageRankConfig.uniform(g.n, 0.15)
    return g, groups, cfg, build_transition(g, cfg)


def edge_text(edges) -> str:
    return "\n".join(f"{a} {b}" for a, b in sorted(edges))


def label_text(labels) -> str:
    return "\n".join(f"{i} {l}" for i, l in enumerate(labels))


def random_instance(rng, n, K, extra_factor=3, gamma=0.15):
    """Random digraph on a cycle backbone (no sinks, well connected)."""
    edges = {(i, (i + 1) % n) for i in range(n)}
    for _ in range(extra_factor * n):
        edges.add((int(rng.integers(n)), int(rng.integers(n))))
    g = load_graph(edge_text(edges))
    labels = rng.integers(0, K, size=n)
    labels[:K] = np.arange(K)
    groups = load_labels(label_text(labels), n)
    cfg = PageRankConfig.uniform(n, gamma)
    return g, groups, cfg, build_transition(g, cfg)


def random_sinky_instance(rng, n, K, gamma=0.15):
    """Random digraph that may contain sink vertices."""
    edges = set()
    for i in range(n):
        for _ in range(int(rng.integers(0, 4))):
            edges.add((i, int(rng.integers(n))))
    edges.add((0, n - 1))  # pin the vertex count
    g = load_graph(edge_text(edges))
    labels = rng.integers(0, K, size=g.n)
    labels[:K] = np.arange(K)
    groups = load_labels(label_text(labels), g.n)
    cfg = PageRankConfig.uniform(g.n, gamma)
    return g, groups, cfg, build_transition(g, cfg)


def random_target(rng, K) -> FairnessTarget:
    return FairnessTarget(phi=rng.dirichlet(np.ones(K)))


def mind_like_instance(seed=7, n=250, minority=0.25, homophily=0.3, gamma=0.15):
    """Two-group digraph echoing a news-impression graph: around five
    out-edges per vertex, a 1:3 group split, weak mixing bias."""
    rng = np.random.default_rng(seed)
    n0 = int(round(minority * n))
    labels = np.array([0] * n0 + [1] * (n - n0))
    edges = set()
    for i in range(n):
        for _ in range(int(rng.integers(3, 8))):
            if rng.random() < homophily:
                pool = np.flatnonzero(labels == labels[i])
            else:
                pool = np.arange(n)
            j = int(pool[rng.integers(len(pool))])
            if j != i:
                edges.add((i, j))
    g = load_graph(edge_text(edges))
    groups = load_labels(label_text(labels[: g.n]), g.n)
    cfg = PageRankConfig.uniform(g.n, gamma)
    return g, groups, cfg, build_transition(g, cfg)
