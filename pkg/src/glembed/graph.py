"""Graph and label-set loading, normalization, and largest-component extraction.

Networks are undirected simple graphs with contiguous internal ids assigned by
first appearance in the input file. External node tokens are kept so that every
downstream artifact can be reported in the input's own vocabulary.
"""
from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Graph",
    "LabelSet",
    "load_edge_list",
    "save_edge_list",
    "load_labels",
    "largest_connected_component",
]


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph.

    Attributes
    ----------
    n : int
        Node count; internal ids are 0..n-1.
    edges : np.ndarray
        (m, 2) int64 array, one row per edge with u < v, lexicographically
        sorted. No self-loops, no duplicates.
    names : tuple of str
        External token of each internal id, in first-appearance order.

    Equality compares the externally-named structure (same node tokens, same
    token-level edge set), which is what survives a save/load round trip.
    Hashing stays identity-based; caches key on object identity.
    """

    n: int
    edges: np.ndarray
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.n <= 0:
            raise ValueError("empty graph")
        if len(self.names) != self.n:
            raise ValueError("names length does not match node count")
        e = self.edges
        if e.size and (e[:, 0] >= e[:, 1]).any():
            raise ValueError("edges must be stored as (u, v) with u < v")
        if e.size and (e.min() < 0 or e.max() >= self.n):
            raise ValueError("edge endpoint out of range")

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    @cached_property
    def name_to_id(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=np.int64)
        np.add.at(d, self.edges.ravel(), 1)
        return d

    @cached_property
    def _csr(self) -> sp.csr_matrix:
        u, v = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * self.m, dtype=np.int64)
        a = sp.coo_matrix(
            (data, (np.concatenate([u, v]), np.concatenate([v, u]))),
            shape=(self.n, self.n),
        )
        return a.tocsr()

    def adjacency(self) -> sp.csr_matrix:
        """0/1 adjacency as int64 CSR (copy; the cached one stays frozen)."""
        return self._csr.copy()

    def adjacency_dense(self) -> np.ndarray:
        return np.asarray(self._csr.todense(), dtype=np.float64)

    @cached_property
    def adjacency_lists(self) -> list[np.ndarray]:
        """Sorted neighbor array per node."""
        indptr, indices = self._csr.indptr, self._csr.indices
        return [indices[indptr[i] : indptr[i + 1]] for i in range(self.n)]

    @cached_property
    def _external_edges(self) -> frozenset[tuple[str, str]]:
        pairs = []
        for u, v in self.edges:
            a, b = self.names[u], self.names[v]
            pairs.append((a, b) if a <= b else (b, a))
        return frozenset(pairs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and set(self.names) == set(other.names)
            and self._external_edges == other._external_edges
        )

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def _from_edge_tokens(token_pairs: list[tuple[str, str]]) -> Graph:
    """Build a Graph from external token pairs, first-appearance id order.

    Self-loop tokens still register their node (a `x x` line is how an
    isolated node survives edge-list serialization).
    """
    ids: dict[str, int] = {}
    seen: set[tuple[int, int]] = set()
    dup = loops = 0
    rows: list[tuple[int, int]] = []
    for a, b in token_pairs:
        for tok in (a, b):
            if tok not in ids:
                ids[tok] = len(ids)
        if a == b:
            loops += 1
            continue
        u, v = ids[a], ids[b]
        key = (u, v) if u < v else (v, u)
        if key in seen:
            dup += 1
            continue
        seen.add(key)
        rows.append(key)
    if not ids:
        raise ValueError("empty graph: no nodes found")
    if dup or loops:
        warnings.warn(
            f"dropped {dup} duplicate edge(s) and {loops} self-loop(s)",
            stacklevel=3,
        )
    edges = np.array(sorted(rows), dtype=np.int64).reshape(-1, 2)
    names = tuple(ids)  # dict preserves insertion order
    return Graph(n=len(ids), edges=edges, names=names)


def load_edge_list(path: str) -> Graph:
    """Parse a two-column edge list (tab or space separated, '#' comments)."""
    pairs: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            toks = line.split()
            if len(toks) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected two node tokens, got {len(toks)}"
                )
            pairs.append((toks[0], toks[1]))
    return _from_edge_tokens(pairs)


def save_edge_list(g: Graph, path: str) -> None:
    """Write one `u v` line per edge; isolated nodes become `x x` lines."""
    deg = g.degrees
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in g.edges:
            fh.write(f"{g.names[u]} {g.names[v]}\n")
        for i in np.flatnonzero(deg == 0):
            fh.write(f"{g.names[i]} {g.names[i]}\n")


@dataclass(frozen=True, eq=False)
class LabelSet:
    """Node annotations, single- or multi-label.

    `labels_of` maps node keys to non-empty frozensets of label ids. Keys are
    external tokens as loaded from file; `aligned_to` resolves them to internal
    ids of a particular graph. Nodes absent from the map are unannotated.
    """

    kind: str  # "single" | "multi"
    labels_of: dict
    label_names: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("single", "multi"):
            raise ValueError(f"unknown label kind {self.kind!r}")
        if self.kind == "single":
            bad = [k for k, s in self.labels_of.items() if len(s) != 1]
            if bad:
                raise ValueError(f"single-label set with multiple labels for {bad[0]!r}")

    @property
    def n_labels(self) -> int:
        return len(self.label_names)

    def aligned_to(self, g: Graph) -> "LabelSet":
        """Re-key by internal node id; unknown tokens are dropped with a warning."""
        out: dict[int, frozenset[int]] = {}
        unknown = 0
        lookup = g.name_to_id
        for tok, labs in self.labels_of.items():
            if isinstance(tok, (int, np.integer)):
                raise ValueError("label set already aligned")
            i = lookup.get(tok)
            if i is None:
                unknown += 1
                continue
            out[i] = labs
        if unknown:
            warnings.warn(
                f"{unknown} labeled token(s) absent from the graph", stacklevel=2
            )
        return LabelSet(kind=self.kind, labels_of=out, label_names=self.label_names)

    def single_array(self, n: int) -> np.ndarray:
        """Aligned single-label view: int array with -1 for unannotated nodes."""
        if self.kind != "single":
            raise ValueError("single_array requires a single-label set")
        arr = np.full(n, -1, dtype=np.int64)
        for i, labs in self.labels_of.items():
            arr[i] = next(iter(labs))
        return arr

    def membership_matrix(self, n: int) -> np.ndarray:
        """Aligned boolean (n, n_labels) membership matrix."""
        mat = np.zeros((n, self.n_labels), dtype=bool)
        for i, labs in self.labels_of.items():
            mat[i, list(labs)] = True
        return mat

    def restricted_to(self, keys) -> "LabelSet":
        keep = set(keys)
        return LabelSet(
            kind=self.kind,
            labels_of={k: v for k, v in self.labels_of.items() if k in keep},
            label_names=self.label_names,
        )


def load_labels(path: str, kind: str = "single") -> LabelSet:
    """Parse a TAB-separated `node<TAB>label` file.

    Multi-label files repeat the node token, one line per annotation. A
    repeated node in a single-label file is an error.
    """
    label_ids: dict[str, int] = {}
    assign: dict[str, set[int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            toks = line.split("\t")
            if len(toks) != 2 or not toks[0] or not toks[1]:
                raise ValueError(f"{path}:{lineno}: expected node<TAB>label")
            node, lab = toks[0].strip(), toks[1].strip()
            if lab not in label_ids:
                label_ids[lab] = len(label_ids)
            lid = label_ids[lab]
            if node in assign:
                if kind == "single":
                    raise ValueError(f"duplicate label for node {node!r}")
                assign[node].add(lid)
            else:
                assign[node] = {lid}
    return LabelSet(
        kind=kind,
        labels_of={k: frozenset(v) for k, v in assign.items()},
        label_names=tuple(label_ids),
    )


def connected_components(g: Graph) -> list[list[int]]:
    """Components as internal-id lists, largest first.

    Equal-size ties are ordered by the smallest external token of the
    component (lexicographic), so extraction is deterministic.
    """
    seen = np.zeros(g.n, dtype=bool)
    nbrs = g.adjacency_lists
    comps: list[list[int]] = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in nbrs[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.append(y)
                    queue.append(y)
        comps.append(comp)
    comps.sort(key=lambda c: (-len(c), min(g.names[i] for i in c)))
    return comps


def largest_connected_component(
    g: Graph, labels: LabelSet | None = None
) -> tuple[Graph, LabelSet | None]:
    """Induced subgraph on the largest component, ids relabeled contiguously.

    Survivor ids keep their relative order, so first-appearance semantics are
    preserved. An aligned LabelSet is remapped; a token-keyed one is restricted
    by token.
    """
    comps = connected_components(g)
    keep = sorted(comps[0])
    old_to_new = {old: new for new, old in enumerate(keep)}
    mask = np.isin(g.edges[:, 0], keep)  # edges are induced: u in comp => v in comp
    sub = g.edges[mask]
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    new_edges = remap[sub]
    new_edges.sort(axis=1)
    order = np.lexsort((new_edges[:, 1], new_edges[:, 0]))
    sub_g = Graph(
        n=len(keep),
        edges=new_edges[order],
        names=tuple(g.names[i] for i in keep),
    )
    if labels is None:
        return sub_g, None
    aligned_keys = all(isinstance(k, (int, np.integer)) for k in labels.labels_of)
    if labels.labels_of and aligned_keys:
        new_labels = LabelSet(
            kind=labels.kind,
            labels_of={
                old_to_new[k]: v
                for k, v in labels.labels_of.items()
                if k in old_to_new
            },
            label_names=labels.label_names,
        )
    else:
        new_labels = labels.restricted_to({g.names[i] for i in keep})
    return sub_g, new_labels
