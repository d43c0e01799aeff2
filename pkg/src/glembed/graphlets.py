"""Graphlet census: orbit counts (GDV), graphlet adjacencies, GDV similarity.

Graphlets G0..G8 are the nine connected 2-4-node graphs. Their node positions
form orbits 0..14; orbits {3, 12, 13, 14} are derivable from the others, so
GDV comparisons use the 11 non-redundant orbits {0,1,2,4,5,6,7,8,9,10,11}.

Graphlet id / orbit layout (degree inside the graphlet decides the orbit):

    G0 edge          orbit 0
    G1 path on 3     orbits 1 (ends), 2 (middle)
    G2 triangle      orbit 3
    G3 path on 4     orbits 4 (ends), 5 (middles)
    G4 star          orbits 6 (leaves), 7 (center)
    G5 4-cycle       orbit 8
    G6 tailed tri.   orbits 9 (tail), 10 (base pair), 11 (attachment)
    G7 diamond       orbits 12 (degree-2 pair), 13 (degree-3 pair)
    G8 4-clique      orbit 14

The 2-3-node layer is computed in closed form from A and A^2; the 4-node layer
enumerates each connected induced subgraph exactly once (smallest-id rooting
with exclusive-neighborhood extension) and classifies instances by their 6-bit
edge mask. Counts are exact int64.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .graph import Graph
from .representations import MatrixRepresentation

__all__ = [
    "Gdv",
    "GraphletAdjacency",
    "OrbitWeights",
    "GraphletCensus",
    "graphlet_census",
    "count_orbits",
    "graphlet_adjacency",
    "graphlet_coverage",
    "gdv_distance",
    "gdv_similarity_matrix",
]

NON_REDUNDANT = (0, 1, 2, 4, 5, 6, 7, 8, 9, 10, 11)

# orbits belonging to each graphlet, for coverage queries
ORBITS_OF_GRAPHLET = (
    (0,), (1, 2), (3,), (4, 5), (6, 7), (8,), (9, 10, 11), (12, 13), (14,),
)

# pair slots of a sorted 4-tuple, bit i of a mask = slot i is an edge
_PAIR_IDX = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _mask_tables() -> tuple[np.ndarray, np.ndarray]:
    """graphlet id and per-position orbit for each of the 64 edge masks."""
    gk = np.full(64, -1, dtype=np.int8)
    orb = np.full((64, 4), -1, dtype=np.int8)
    for mask in range(64):
        adj = np.zeros((4, 4), dtype=bool)
        for bit, (i, j) in enumerate(_PAIR_IDX):
            if mask >> bit & 1:
                adj[i, j] = adj[j, i] = True
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in range(4):
                if adj[x, y] and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) < 4:
            continue
        deg = adj.sum(axis=1)
        e = int(deg.sum()) // 2
        sdeg = tuple(sorted(deg))
        if e == 3 and sdeg == (1, 1, 2, 2):
            g, by_deg = 3, {1: 4, 2: 5}
        elif e == 3 and sdeg == (1, 1, 1, 3):
            g, by_deg = 4, {1: 6, 3: 7}
        elif e == 4 and sdeg == (2, 2, 2, 2):
            g, by_deg = 5, {2: 8}
        elif e == 4 and sdeg == (1, 2, 2, 3):
            g, by_deg = 6, {1: 9, 2: 10, 3: 11}
        elif e == 5:
            g, by_deg = 7, {2: 12, 3: 13}
        else:  # e == 6
            g, by_deg = 8, {3: 14}
        gk[mask] = g
        orb[mask] = [by_deg[int(d)] for d in deg]
    return gk, orb


_GRAPHLET4, _ORBIT4 = _mask_tables()


@dataclass(frozen=True)
class OrbitWeights:
    """Positive weights for the 11 non-redundant orbits.

    The default follows the log-scaled dependency weighting
    w_i = 1 - log(o_i) / log(73), with o_i the number of orbits the count of
    orbit i depends on in the 73-orbit dependency hierarchy. Uniform weights
    are handy for hand-checked oracles: OrbitWeights.uniform().
    """

    w: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.w, dtype=np.float64)
        if arr.shape != (11,) or (arr <= 0).any():
            raise ValueError("orbit weights must be 11 positive reals")
        object.__setattr__(self, "w", arr)

    # dependency counts of orbits 0..14; the non-redundant subset is used
    _O_FULL = (1, 2, 2, 2, 3, 4, 3, 3, 4, 3, 4, 4, 4, 4, 3)

    @classmethod
    def default(cls) -> "OrbitWeights":
        o = np.array([cls._O_FULL[i] for i in NON_REDUNDANT], dtype=np.float64)
        return cls(w=1.0 - np.log(o) / np.log(73.0))

    @classmethod
    def uniform(cls) -> "OrbitWeights":
        return cls(w=np.ones(11))


@dataclass(frozen=True)
class Gdv:
    """Per-node orbit counts for orbits 0..14."""

    counts: np.ndarray  # (n, 15) int64

    @property
    def n(self) -> int:
        return self.counts.shape[0]

    @cached_property
    def nonredundant(self) -> np.ndarray:
        """(n, 11) view on the non-redundant orbits."""
        return self.counts[:, NON_REDUNDANT]


@dataclass(frozen=True)
class GraphletAdjacency:
    """Pair co-occurrence counts for one graphlet.

    counts[u, v] = number of induced G_k instances containing both u and v
    (every one of the C(4,2) pairs of an instance counts, adjacent inside the
    instance or not). Symmetric, zero diagonal.
    """

    graphlet_id: int
    counts: sp.csr_matrix

    @cached_property
    def binarized(self) -> sp.csr_matrix:
        b = self.counts.copy()
        b.data = np.ones_like(b.data)
        return b

    @property
    def nnz_pairs(self) -> int:
        return self.counts.nnz // 2


@dataclass(frozen=True)
class GraphletCensus:
    """One enumeration pass worth of results.

    max_size 3 fills orbits 0..3 and graphlets 0..2 only; the 4-node entries
    stay zero/None. pair_counts is indexed by graphlet id.
    """

    max_size: int
    orbits: np.ndarray
    pair_counts: tuple


def _three_node_layer(g: Graph) -> tuple[np.ndarray, list[sp.csr_matrix]]:
    """Closed-form orbits 0..3 and pair counts for G0..G2.

    With CN = A^2 (common neighbors) and t_e the per-edge triangle count:
    A_1(u,v) = d_u + d_v - 2 - 2 t_uv on edges, CN(u,v) off edges;
    A_2 = A o A^2.
    """
    a = g._csr
    deg = g.degrees
    a2 = (a @ a).tocsr()
    tri_pair = a.multiply(a2).tocsr()  # triangles through each edge
    tri_pair.eliminate_zeros()

    orbits = np.zeros((g.n, 15), dtype=np.int64)
    orbit3 = np.asarray(tri_pair.sum(axis=1)).ravel().astype(np.int64) // 2
    orbits[:, 0] = deg
    orbits[:, 3] = orbit3
    orbits[:, 2] = deg * (deg - 1) // 2 - orbit3
    orbits[:, 1] = a.dot(deg) - deg - 2 * orbit3

    a2_nodiag = (a2 - sp.diags(a2.diagonal(), dtype=np.int64)).tocsr()
    cn_off_edges = (a2_nodiag - a2_nodiag.multiply(a)).tocsr()
    deg_sum_on_edges = (a.multiply(deg[:, None]) + a.multiply(deg[None, :])).tocsr()
    a1 = (deg_sum_on_edges - 2 * a - 2 * tri_pair + cn_off_edges).tocsr()
    a1.eliminate_zeros()
    a1 = a1.astype(np.int64)
    return orbits, [a.astype(np.int64).copy(), a1, tri_pair.astype(np.int64)]


class _PairAcc:
    """Accumulates (u, v) pair hits (u < v) and merges into one symmetric CSR."""

    _MERGE_AT = 4_000_000

    def __init__(self, n: int):
        self.n = n
        self._us: list[np.ndarray] = []
        self._vs: list[np.ndarray] = []
        self._buffered = 0
        self._merged: sp.csr_matrix | None = None

    def add(self, u: np.ndarray, v: np.ndarray) -> None:
        self._us.append(u)
        self._vs.append(v)
        self._buffered += u.size
        if self._buffered >= self._MERGE_AT:
            self._merge()

    def _merge(self) -> None:
        if not self._us:
            return
        u = np.concatenate(self._us)
        v = np.concatenate(self._vs)
        upper = sp.coo_matrix(
            (np.ones(u.size, dtype=np.int64), (u, v)), shape=(self.n, self.n)
        ).tocsr()
        self._merged = upper if self._merged is None else self._merged + upper
        self._us, self._vs, self._buffered = [], [], 0

    def result(self) -> sp.csr_matrix:
        self._merge()
        upper = self._merged
        if upper is None:
            upper = sp.csr_matrix((self.n, self.n), dtype=np.int64)
        return (upper + upper.T).tocsr()


_CHUNK = 1 << 15


def _census_level4(g: Graph, orbits: np.ndarray, accs: dict[int, _PairAcc]) -> None:
    """Enumerate connected induced 4-node subgraphs once each and accumulate.

    Rooted at the smallest member; candidate extensions are exclusive
    neighbors (> root, not adjacent to the current subgraph), so no instance
    is visited twice.
    """
    n = g.n
    adj = g.adjacency_lists
    lists = [a.tolist() for a in adj]
    nsets = [set(l) for l in lists]
    dense: np.ndarray | None = None
    if n <= 8192:
        dense = np.zeros((n, n), dtype=bool)
        dense[g.edges[:, 0], g.edges[:, 1]] = True
        dense |= dense.T

    quads: list[tuple[int, int, int, int]] = []
    masks: list[int] = []  # only used on the set fallback path

    def flush() -> None:
        nonlocal quads, masks
        if not quads:
            return
        q = np.array(quads, dtype=np.int64)
        if dense is not None:
            m = np.zeros(len(q), dtype=np.int64)
            for bit, (i, j) in enumerate(_PAIR_IDX):
                m |= dense[q[:, i], q[:, j]].astype(np.int64) << bit
        else:
            m = np.array(masks, dtype=np.int64)
        np.add.at(orbits, (q.ravel(), _ORBIT4[m].ravel()), 1)
        gids = _GRAPHLET4[m]
        for k, acc in accs.items():
            rows = q[gids == k]
            if rows.size:
                for i, j in _PAIR_IDX:
                    acc.add(rows[:, i], rows[:, j])
        quads, masks = [], []

    need_masks = dense is None
    for root in range(n):
        nb_root = nsets[root]
        ext1 = [u for u in lists[root] if u > root]
        for i1, w1 in enumerate(ext1):
            sub_nbrs = nb_root | nsets[w1]
            excl1 = [u for u in lists[w1] if u > root and u not in nb_root]
            ext2 = ext1[i1 + 1 :] + excl1
            for i2, w2 in enumerate(ext2):
                excl2 = [u for u in lists[w2] if u > root and u not in sub_nbrs]
                ext3 = ext2[i2 + 1 :] + excl2
                for w3 in ext3:
                    b, c, d = sorted((w1, w2, w3))
                    quads.append((root, b, c, d))
                    if need_masks:
                        m = 0
                        if b in nb_root:
                            m |= 1
                        if c in nb_root:
                            m |= 2
                        if d in nb_root:
                            m |= 4
                        sb = nsets[b]
                        if c in sb:
                            m |= 8
                        if d in sb:
                            m |= 16
                        if d in nsets[c]:
                            m |= 32
                        masks.append(m)
        if len(quads) >= _CHUNK:
            flush()
    flush()


def _build_census(g: Graph, max_size: int) -> GraphletCensus:
    if max_size not in (3, 4):
        raise ValueError("max_size must be 3 or 4")
    orbits, pair3 = _three_node_layer(g)
    pair: list = pair3 + [None] * 6
    if max_size == 4:
        accs = {k: _PairAcc(g.n) for k in range(3, 9)}
        _census_level4(g, orbits, accs)
        for k, acc in accs.items():
            pair[k] = acc.result()
    return GraphletCensus(max_size=max_size, orbits=orbits, pair_counts=tuple(pair))


_cache: dict[int, GraphletCensus] = {}


def graphlet_census(g: Graph, max_size: int = 4) -> GraphletCensus:
    """Cached census; a size-3 census is upgraded in place when 4 is needed."""
    got = _cache.get(id(g))
    if got is not None and got.max_size >= max_size:
        return got
    census = _build_census(g, max_size)
    if got is None:
        weakref.finalize(g, _cache.pop, id(g), None)
    _cache[id(g)] = census
    return census


def count_orbits(g: Graph) -> Gdv:
    """Exact orbit counts for all 15 orbits, every node."""
    return Gdv(counts=graphlet_census(g, max_size=4).orbits.copy())


def graphlet_adjacency(g: Graph, k: int) -> GraphletAdjacency:
    """Pair co-occurrence counts for graphlet G_k (0 <= k <= 8).

    G0..G2 need only the closed-form layer; higher graphlets trigger the
    4-node enumeration.
    """
    if not 0 <= k <= 8:
        raise ValueError(f"graphlet id {k} outside 0..8")
    census = graphlet_census(g, max_size=3 if k <= 2 else 4)
    return GraphletAdjacency(graphlet_id=k, counts=census.pair_counts[k])


def graphlet_coverage(g: Graph, k: int) -> float:
    """Percent of nodes touched by at least one G_k instance."""
    if not 0 <= k <= 8:
        raise ValueError(f"graphlet id {k} outside 0..8")
    census = graphlet_census(g, max_size=3 if k <= 2 else 4)
    touched = census.orbits[:, list(ORBITS_OF_GRAPHLET[k])].sum(axis=1) > 0
    return 100.0 * float(touched.sum()) / g.n


def gdv_distance(x, y, weights: OrbitWeights | None = None) -> float:
    """Weighted log-scaled distance between two 11-entry GDV rows.

    Dist_i = w_i |log(x_i + 1) - log(y_i + 1)| / log(max(x_i, y_i) + 2),
    summed over the non-redundant orbits.
    """
    w = (weights or OrbitWeights.default()).w
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != (11,) or y.shape != (11,):
        raise ValueError("expected 11-entry non-redundant GDV rows")
    num = np.abs(np.log1p(x) - np.log1p(y))
    den = np.log(np.maximum(x, y) + 2.0)
    return float(np.sum(w * num / den))


def gdv_similarity_matrix(
    gdv: Gdv, weights: OrbitWeights | None = None
) -> MatrixRepresentation:
    """Dense symmetric GDV similarity, 1 - sum(Dist_i) / sum(w_i), in [0, 1].

    The diagonal is zeroed so the matrix follows the adjacency convention
    expected by the random-walk formulas.
    """
    w = (weights or OrbitWeights.default()).w
    x = gdv.nonredundant.astype(np.float64)
    n = gdv.n
    lg = np.log1p(x)
    acc = np.zeros((n, n), dtype=np.float64)
    for o in range(11):
        num = np.abs(lg[:, o, None] - lg[None, :, o])
        den = np.log(np.maximum(x[:, o, None], x[None, :, o]) + 2.0)
        acc += (w[o] / den) * num
    sim = 1.0 - acc / w.sum()
    np.fill_diagonal(sim, 0.0)
    return MatrixRepresentation(name="gdvsim", matrix=sim, params={})


def dump_gdv_tsv(gdv: Gdv, g: Graph, path: str) -> None:
    """node token + 15 orbit counts per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node\t" + "\t".join(f"orbit{i}" for i in range(15)) + "\n")
        for i in range(g.n):
            row = "\t".join(str(c) for c in gdv.counts[i])
            fh.write(f"{g.names[i]}\t{row}\n")


def dump_graphlet_adjacency_tsv(ga: GraphletAdjacency, g: Graph, path: str) -> None:
    """Coordinate dump (u, v, count), upper triangle only."""
    coo = ga.counts.tocoo()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("u\tv\tcount\n")
        order = np.lexsort((coo.col, coo.row))
        for idx in order:
            u, v, c = int(coo.row[idx]), int(coo.col[idx]), int(coo.data[idx])
            if u < v:
                fh.write(f"{g.names[u]}\t{g.names[v]}\t{c}\n")
