"""Downstream evaluation: cosine label prediction and module discovery.

Two tasks operate on an embedding matrix. Single-label prediction scores
every (anchor, candidate) pair by cosine similarity and reports a weighted
one-vs-rest AUROC. Multi-label module discovery clusters the embedding with
a deterministic k-means, tests every (cluster, annotation) pair for
over-representation with the hypergeometric upper tail, corrects all tests
as one Benjamini-Hochberg family, and reports coverage statistics.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import lgamma, sqrt

import numpy as np

from .separability import tied_ranks

__all__ = [
    "EnrichmentResult",
    "EnrichmentTest",
    "cosine_auroc",
    "kmeans_clusters",
    "default_cluster_count",
    "hypergeom_p",
    "bh_correct",
    "module_discovery",
]

ENRICHMENT_ALPHA = 0.05
_KMEANS_MAX_ITER = 300
_KMEANS_SHIFT_TOL = 1e-6


def _cosine_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    return x / np.where(norms < 1e-12, 1.0, norms)  # zero vectors stay zero


def cosine_auroc(embeddings: np.ndarray, labels) -> float:
    """Class-size-weighted one-vs-rest AUROC of cosine pair scores.

    For each class c, anchors range over members of c and candidates over
    all other nodes; a pair is positive iff the candidate is also in c.
    Per-class AUROC uses the rank statistic with average ties, so all-tied
    scores give exactly 0.5. Classes of size 1 are skipped with a warning.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    y = labels.single_array(len(x))
    classes = np.unique(y[y >= 0])
    if len(classes) < 2:
        raise ValueError("cosine AUROC needs at least 2 classes")
    xn = _cosine_rows(x)
    aurocs, weights = [], []
    for c in classes:
        members = np.flatnonzero(y == c)
        if len(members) < 2:
            warnings.warn(f"class {c} has a single member, skipped", stacklevel=2)
            continue
        sims = xn[members] @ xn.T  # (|c|, n)
        keep = np.ones_like(sims, dtype=bool)
        keep[np.arange(len(members)), members] = False  # drop (u, u)
        pos = np.broadcast_to(y[None, :] == c, sims.shape)[keep]
        scores = sims[keep]
        n_pos = int(pos.sum())
        n_neg = len(scores) - n_pos
        ranks, _ = tied_ranks(scores)
        auroc = (ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
        aurocs.append(auroc)
        weights.append(len(members))
    if not aurocs:
        raise ValueError("no class with at least 2 members")
    return float(np.average(aurocs, weights=weights))


def default_cluster_count(n: int) -> int:
    return max(2, round(sqrt(n / 2.0)))


def kmeans_clusters(embeddings: np.ndarray, k: int | None = None) -> np.ndarray:
    """Deterministic Lloyd k-means; returns the cluster index per node.

    Seeding is farthest-first starting from node 0, so reruns are
    bit-identical. An emptied cluster is re-seeded at the point farthest
    from its currently assigned centroid.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    n = len(x)
    if k is None:
        k = default_cluster_count(n)
    if not 2 <= k <= n:
        raise ValueError(f"need n >= k >= 2, got n={n}, k={k}")

    centers = np.empty((k, x.shape[1]))
    centers[0] = x[0]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        centers[j] = x[int(np.argmax(d2))]  # ties -> smallest id
        d2 = np.minimum(d2, ((x - centers[j]) ** 2).sum(axis=1))

    assign = np.zeros(n, dtype=np.int64)
    for _ in range(_KMEANS_MAX_ITER):
        dist = _sq_distances(x, centers)
        assign = np.argmin(dist, axis=1)
        new_centers = centers.copy()
        for j in range(k):
            mask = assign == j
            if mask.any():
                new_centers[j] = x[mask].mean(axis=0)
        empties = [j for j in range(k) if not (assign == j).any()]
        if empties:
            own = dist[np.arange(n), assign]
            order = np.argsort(-own, kind="stable")
            for slot, j in enumerate(empties):
                i = int(order[slot])
                new_centers[j] = x[i]
                assign[i] = j
        shift = float(np.max(np.linalg.norm(new_centers - centers, axis=1)))
        centers = new_centers
        if shift < _KMEANS_SHIFT_TOL:
            break
    return np.argmin(_sq_distances(x, centers), axis=1)


def _sq_distances(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    xx = (x * x).sum(axis=1)[:, None]
    cc = (centers * centers).sum(axis=1)[None, :]
    return np.maximum(xx - 2.0 * (x @ centers.T) + cc, 0.0)


def _log_choose(a: int, b: int) -> float:
    return lgamma(a + 1) - lgamma(b + 1) - lgamma(a - b + 1)


def hypergeom_p(N: int, X: int, M: int, K: int) -> float:
    """Upper tail P[hits >= X] drawing N of M items of which K are marked.

    Log-domain binomials keep the sum stable for large parameters.
    """
    if not (0 <= X <= min(N, K) and 0 <= N <= M and 0 <= K <= M):
        raise ValueError(f"invalid hypergeometric bounds N={N} X={X} M={M} K={K}")
    lo = max(X, N + K - M)
    hi = min(N, K)
    if lo <= max(0, N + K - M):
        return 1.0  # tail covers the whole support
    log_denom = _log_choose(M, N)
    terms = [
        _log_choose(K, i) + _log_choose(M - K, N - i) - log_denom
        for i in range(lo, hi + 1)
    ]
    peak = max(terms)
    total = peak + np.log(sum(np.exp(t - peak) for t in terms))
    return float(min(1.0, np.exp(total)))


def bh_correct(pvalues) -> list[float]:
    """Benjamini-Hochberg step-up adjustment, input order preserved.

    The step-up runs in exact rational arithmetic so hand-checked values
    come out bit-for-bit (the rank factor m/i is not float-representable).
    """
    p = [float(v) for v in pvalues]
    if not p:
        return []
    if any(v < 0 or v > 1 for v in p):
        raise ValueError("p-values must lie in [0, 1]")
    m = len(p)
    order = sorted(range(m), key=lambda i: p[i])
    adj = [Fraction(p[i]) * m / (r + 1) for r, i in enumerate(order)]
    for r in range(m - 2, -1, -1):
        adj[r] = min(adj[r], adj[r + 1])
    one = Fraction(1)
    out = [0.0] * m
    for r, i in enumerate(order):
        out[i] = float(min(adj[r], one))
    return out


@dataclass(frozen=True)
class EnrichmentTest:
    cluster: int
    annotation: int
    raw_p: float
    adjusted_p: float

    @property
    def enriched(self) -> bool:
        return self.adjusted_p <= ENRICHMENT_ALPHA


@dataclass(frozen=True)
class EnrichmentResult:
    clusters: np.ndarray
    tests: tuple[EnrichmentTest, ...]
    gene_coverage: float
    functional_coverage: float
    enriched_cluster_fraction: float
    annotation_names: tuple[str, ...] = field(default=())

    def enriched_by_cluster(self) -> dict[int, list[EnrichmentTest]]:
        out: dict[int, list[EnrichmentTest]] = {}
        for t in self.tests:
            if t.enriched:
                out.setdefault(t.cluster, []).append(t)
        return out

    def to_dict(self) -> dict:
        return {
            "clusters": [int(c) for c in self.clusters],
            "tests": [
                {
                    "cluster": t.cluster,
                    "annotation": t.annotation,
                    "annotation_name": (
                        self.annotation_names[t.annotation]
                        if t.annotation < len(self.annotation_names)
                        else str(t.annotation)
                    ),
                    "raw_p": t.raw_p,
                    "adjusted_p": t.adjusted_p,
                    "enriched": t.enriched,
                }
                for t in self.tests
            ],
            "gene_coverage": self.gene_coverage,
            "functional_coverage": self.functional_coverage,
            "enriched_cluster_fraction": self.enriched_cluster_fraction,
        }


def module_discovery(
    embeddings: np.ndarray, annotations, k: int | None = None
) -> EnrichmentResult:
    """Cluster the embedding and test clusters for annotation enrichment.

    Annotations covering fewer than 2 network nodes are dropped before
    testing; a node is "annotated" if it keeps at least one annotation, and
    all counts (N, X, M, K) range over annotated nodes only. Every
    (cluster, annotation) pair with at least one annotated cluster member
    forms one test; the whole run is a single BH family. Gene coverage is
    the fraction of annotated nodes with one of their own annotations
    enriched in their cluster; functional coverage is the fraction of
    tested annotations enriched somewhere.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    n = len(x)
    memb = annotations.membership_matrix(n)
    support = memb.sum(axis=0)
    kept = np.flatnonzero(support >= 2)
    dropped = int((support > 0).sum() - len(kept))
    if dropped:
        warnings.warn(
            f"{dropped} annotation(s) with <2 annotated nodes dropped", stacklevel=2
        )
    memb = memb[:, kept] if len(kept) < memb.shape[1] else memb
    annotated = memb.any(axis=1)
    if not annotated.any():
        raise ValueError("no annotations")

    clusters = kmeans_clusters(x, k=k)
    m_total = int(annotated.sum())
    k_per_ann = memb[annotated].sum(axis=0)  # hits in network

    raw: list[tuple[int, int, float]] = []
    for c in np.unique(clusters):
        in_cluster = clusters == c
        n_ann = int((in_cluster & annotated).sum())
        if n_ann == 0:
            continue
        x_per_ann = memb[in_cluster & annotated].sum(axis=0)
        for j in range(memb.shape[1]):
            p = hypergeom_p(n_ann, int(x_per_ann[j]), m_total, int(k_per_ann[j]))
            raw.append((int(c), j, p))

    adjusted = bh_correct([p for _, _, p in raw])
    tests = tuple(
        EnrichmentTest(cluster=c, annotation=int(kept[j]), raw_p=p, adjusted_p=q)
        for (c, j, p), q in zip(raw, adjusted)
    )

    enriched_in_cluster: dict[int, set[int]] = {}
    for (c, j, _), q in zip(raw, adjusted):
        if q <= ENRICHMENT_ALPHA:
            enriched_in_cluster.setdefault(c, set()).add(j)

    covered = 0
    for i in np.flatnonzero(annotated):
        own = set(np.flatnonzero(memb[i]))
        if own & enriched_in_cluster.get(int(clusters[i]), set()):
            covered += 1
    gene_cov = covered / m_total

    enriched_anywhere = set().union(*enriched_in_cluster.values()) if enriched_in_cluster else set()
    func_cov = len(enriched_anywhere) / memb.shape[1]

    tested_clusters = {c for c, _, _ in raw}
    frac = (
        len(enriched_in_cluster) / len(tested_clusters) if tested_clusters else 0.0
    )
    return EnrichmentResult(
        clusters=clusters,
        tests=tests,
        gene_coverage=float(gene_cov),
        functional_coverage=float(func_cov),
        enriched_cluster_fraction=float(frac),
        annotation_names=tuple(annotations.label_names),
    )
