"""Homophily indices over graphs and weighted representations.

All indices are restricted to annotated nodes: a pair with an unannotated
endpoint never enters a numerator or denominator. Label agreement between two
nodes is 1/0 for single-label sets; multi-label sets score each pair by the
Jaccard share |L(u) n L(v)| / |L(u) u L(v)| (the anchor-normalized
|L(u) n L(v)| / |L(u)| variant is available via agreement="anchor").
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, asdict

import numpy as np
import scipy.sparse as sp

from .graph import Graph, LabelSet
from .representations import MatrixRepresentation

__all__ = [
    "HomophilyReport",
    "edge_homophily",
    "node_homophily",
    "weighted_edge_homophily",
    "weighted_node_homophily",
    "gsi",
    "multilabel_share",
    "homophily_report",
]


def multilabel_share(u_labels, v_labels, agreement: str = "jaccard") -> float:
    """Label agreement of two non-empty label sets, in [0, 1]."""
    u_labels, v_labels = frozenset(u_labels), frozenset(v_labels)
    if not u_labels or not v_labels:
        raise ValueError("label share needs non-empty sets; skip unannotated nodes")
    inter = len(u_labels & v_labels)
    if agreement == "jaccard":
        return inter / len(u_labels | v_labels)
    if agreement == "anchor":
        return inter / len(u_labels)
    raise ValueError(f"unknown agreement mode {agreement!r}")


def _label_state(labels: LabelSet, n: int):
    """(annotated bool mask, single-label int array or None, label set list)."""
    keys = labels.labels_of.keys()
    if any(not isinstance(k, (int, np.integer)) for k in keys):
        raise ValueError("labels must be aligned to the graph (aligned_to)")
    ann = np.zeros(n, dtype=bool)
    sets: list = [None] * n
    for i, labs in labels.labels_of.items():
        ann[i] = True
        sets[i] = labs
    single = None
    if labels.kind == "single":
        single = np.full(n, -1, dtype=np.int64)
        for i, labs in labels.labels_of.items():
            single[i] = next(iter(labs))
    return ann, single, sets


def _edge_arrays(m) -> tuple[np.ndarray, np.ndarray, np.ndarray, int, bool]:
    """(u, v, w) with u < v over the support, node count, and binary flag."""
    if isinstance(m, Graph):
        u, v = m.edges[:, 0], m.edges[:, 1]
        return u, v, np.ones(len(u)), m.n, True
    mat = m.matrix if isinstance(m, MatrixRepresentation) else np.asarray(m, dtype=float)
    if sp.issparse(mat):
        mat = np.asarray(mat.todense(), dtype=float)
    rows, cols = np.nonzero(np.triu(mat, k=1))
    w = mat[rows, cols]
    binary = bool(np.isin(np.unique(mat), (0.0, 1.0)).all())
    return rows, cols, w, mat.shape[0], binary


def _pair_shares(u, v, single, sets, agreement) -> np.ndarray:
    if single is not None:
        return (single[u] == single[v]).astype(float)
    return np.array(
        [multilabel_share(sets[a], sets[b], agreement) for a, b in zip(u, v)]
    )


def _annotated_pairs(m, labels, agreement):
    u, v, w, n, _ = _edge_arrays(m)
    ann, single, sets = _label_state(labels, n)
    keep = ann[u] & ann[v]
    u, v, w = u[keep], v[keep], w[keep]
    if len(u) == 0:
        raise ValueError("no edges between annotated nodes")
    return u, v, w, n, single, sets, _pair_shares(u, v, single, sets, agreement)


def edge_homophily(m, labels: LabelSet, agreement: str = "jaccard") -> float:
    """Mean label agreement over annotated-endpoint edges of the support."""
    *_, shares = _annotated_pairs(m, labels, agreement)
    return float(shares.mean())


def weighted_edge_homophily(m, labels: LabelSet, agreement: str = "jaccard") -> float:
    """Agreement-weighted edge mass / total edge mass over annotated pairs."""
    _, _, w, *_, shares = _annotated_pairs(m, labels, agreement)
    total = w.sum()
    if total == 0:
        raise ValueError("all annotated pair weights are zero")
    return float((w * shares).sum() / total)


def _per_node_shares(m, labels, agreement, weighted: bool) -> np.ndarray:
    u, v, w, n, single, sets, shares = _annotated_pairs(m, labels, agreement)
    mass = w if weighted else np.ones_like(w)
    num = np.zeros(n)
    den = np.zeros(n)
    np.add.at(num, u, mass * shares)
    np.add.at(num, v, mass * shares)
    np.add.at(den, u, mass)
    np.add.at(den, v, mass)
    ann, _, _ = _label_state(labels, n)
    with_nbrs = ann & (den > 0)
    if not with_nbrs.any():
        raise ValueError("no annotated node has an annotated neighbor")
    return num[with_nbrs] / den[with_nbrs]


def node_homophily(m, labels: LabelSet, agreement: str = "jaccard") -> float:
    """Average per-node fraction of annotated neighbors sharing the label.

    Annotated nodes without annotated neighbors are skipped, not counted 0.
    """
    return float(_per_node_shares(m, labels, agreement, weighted=False).mean())


def weighted_node_homophily(m, labels: LabelSet, agreement: str = "jaccard") -> float:
    return float(_per_node_shares(m, labels, agreement, weighted=True).mean())


def gsi(m, labels: LabelSet, agreement: str = "jaccard") -> float:
    """Geometric separability: fraction of nodes agreeing with their nearest
    annotated neighbor.

    Weighted matrices take nearest = largest weight; a plain graph or a 0/1
    matrix takes nearest = smallest Euclidean distance between adjacency rows
    (structural signature). Ties resolve to the smallest node id. Nodes whose
    row is all zero (or carries no weight to any annotated candidate) are
    skipped.
    """
    if isinstance(m, Graph):
        mat = m.adjacency_dense()
        binary = True
    else:
        mat = m.matrix if isinstance(m, MatrixRepresentation) else np.asarray(m, dtype=float)
        if sp.issparse(mat):
            mat = np.asarray(mat.todense(), dtype=float)
        binary = bool(np.isin(np.unique(mat), (0.0, 1.0)).all())
    n = mat.shape[0]
    ann, single, sets = _label_state(labels, n)
    ids = np.flatnonzero(ann)
    if len(ids) < 2:
        raise ValueError("GSI needs at least 2 annotated nodes")
    if binary:
        rows = mat[ids]  # full structural rows, candidates restricted below
        sq = (rows * rows).sum(axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (rows @ rows.T)
        np.fill_diagonal(d2, np.inf)
        evaluated = sq > 0
        if not evaluated.any():
            raise ValueError("all rows are zero")
        nn = np.argmin(d2, axis=1)  # first minimum = smallest id
    else:
        wsub = mat[np.ix_(ids, ids)]
        np.fill_diagonal(wsub, -1.0)  # self never wins
        best = wsub.max(axis=1)
        evaluated = best > 0
        if not evaluated.any():
            raise ValueError("all rows are zero")
        nn = np.argmax(wsub, axis=1)  # first maximum = smallest id
    u = ids[evaluated]
    v = ids[nn[evaluated]]
    shares = _pair_shares(u, v, single, sets, agreement)
    return float(shares.mean())


@dataclass(frozen=True)
class HomophilyReport:
    representation_name: str
    h_edge: float
    h_node: float
    h_edge_weighted: float
    h_node_weighted: float
    gsi: float
    annotated_node_count: int

    def to_dict(self) -> dict:
        return asdict(self)


def homophily_report(
    m, labels: LabelSet, name: str | None = None, agreement: str = "jaccard"
) -> HomophilyReport:
    """All five indices for one (network, representation) pair."""
    if name is None:
        name = m.name if isinstance(m, MatrixRepresentation) else "adjacency(G0)"
    n = m.n if hasattr(m, "n") else np.asarray(m).shape[0]
    ann_count = sum(
        1 for k in labels.labels_of if isinstance(k, (int, np.integer)) and k < n
    )
    return HomophilyReport(
        representation_name=name,
        h_edge=edge_homophily(m, labels, agreement),
        h_node=node_homophily(m, labels, agreement),
        h_edge_weighted=weighted_edge_homophily(m, labels, agreement),
        h_node_weighted=weighted_node_homophily(m, labels, agreement),
        gsi=gsi(m, labels, agreement),
        annotated_node_count=ann_count,
    )
