"""Random partition graphs and the homophily-vs-separability sweep.

The generator draws one uniform variate per unordered node pair in row-major
order (u < v) from numpy's PCG64 stream, so a seed pins the edge set
bit-for-bit and the draw order is simple enough to reproduce outside Python.
"""
from __future__ import annotations

import json
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .factorization import factorize
from .graph import Graph, LabelSet
from .homophily import edge_homophily, gsi, node_homophily
from .representations import (
    MatrixRepresentation,
    adjacency_representation,
    deepwalk_matrix,
    line_matrix,
)
from .separability import kfold_f1, pearson

__all__ = [
    "PartitionSpec",
    "random_partition_graph",
    "SweepRow",
    "SweepResult",
    "sweep",
    "correlate_sweep",
    "equal_community_sizes",
    "SWEEP_REPRESENTATIONS",
]

SWEEP_REPRESENTATIONS = ("adjacency", "line", "deepwalk")


@dataclass(frozen=True)
class PartitionSpec:
    community_sizes: tuple[int, ...]
    p_in: float
    p_out: float
    seed: int = 0

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.community_sizes)
        object.__setattr__(self, "community_sizes", sizes)
        if not sizes or any(s <= 0 for s in sizes):
            raise ValueError("community sizes must be positive")
        for name in ("p_in", "p_out"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.p_in == 0.0 and self.p_out == 0.0:
            raise ValueError("p_in and p_out cannot both be zero")

    @property
    def n(self) -> int:
        return sum(self.community_sizes)


def equal_community_sizes(n: int, communities: int) -> tuple[int, ...]:
    """n split as evenly as possible; the remainder goes to the first groups."""
    base, rem = divmod(n, communities)
    return tuple(base + (1 if i < rem else 0) for i in range(communities))


def random_partition_graph(spec: PartitionSpec) -> tuple[Graph, LabelSet]:
    """Sample the partition model; labels are community ids keyed by token."""
    n = spec.n
    comm = np.repeat(np.arange(len(spec.community_sizes)), spec.community_sizes)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    us, vs = [], []
    for u in range(n - 1):
        draws = rng.random(n - 1 - u)
        probs = np.where(comm[u + 1 :] == comm[u], spec.p_in, spec.p_out)
        hits = np.flatnonzero(draws < probs)
        if len(hits):
            us.append(np.full(len(hits), u, dtype=np.int64))
            vs.append(hits.astype(np.int64) + u + 1)
    if not us:
        raise ValueError("resulting graph has no edges")
    edges = np.stack(
        [np.concatenate(us), np.concatenate(vs)], axis=1
    )
    names = tuple(str(i) for i in range(n))
    g = Graph(n=n, edges=edges, names=names)
    labels = LabelSet(
        kind="single",
        labels_of={str(i): frozenset([int(comm[i])]) for i in range(n)},
        label_names=tuple(f"community{j}" for j in range(len(spec.community_sizes))),
    )
    return g, labels


@dataclass(frozen=True)
class SweepRow:
    p_in: float
    p_out: float
    representation: str
    h_node: float
    h_edge: float
    gsi: float
    f1_linear: float

    def tsv(self) -> str:
        return "\t".join(
            [
                f"{self.p_in:g}",
                f"{self.p_out:g}",
                self.representation,
                f"{self.h_node:.6f}",
                f"{self.h_edge:.6f}",
                f"{self.gsi:.6f}",
                f"{self.f1_linear:.6f}",
            ]
        )


_TSV_HEADER = "p_in\tp_out\trepresentation\th_node\th_edge\tgsi\tf1_linear"


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    skipped: tuple[tuple[float, float, str], ...]

    def to_tsv(self) -> str:
        lines = [_TSV_HEADER]
        lines += [r.tsv() for r in self.rows]
        return "\n".join(lines) + "\n"

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=np.float64)


def _cell_matrices(g: Graph, walk_length: int) -> list[MatrixRepresentation]:
    return [
        adjacency_representation(g, 0),
        line_matrix(g),
        deepwalk_matrix(g, walk_length=walk_length),
    ]


def sweep(
    p_in_values,
    p_out_values,
    n: int = 300,
    communities: int = 5,
    d: int = 32,
    walk_length: int = 10,
    seed: int = 0,
    seeds_per_cell: int = 1,
    folds: int = 10,
    progress: bool = False,
) -> SweepResult:
    """One row per (grid cell, representation): homophily indices of the
    representation matrix plus linear 10-fold F1 of its factorized embedding.

    The (0, 0) cell and cells whose sampled graph has no edges are skipped
    and recorded. Cell seeds are drawn deterministically from `seed` by cell
    index so adding grid points does not shuffle earlier cells.
    """
    sizes = equal_community_sizes(n, communities)
    rows: list[SweepRow] = []
    skipped: list[tuple[float, float, str]] = []
    cell_idx = 0
    for p_in in p_in_values:
        for p_out in p_out_values:
            for rep_seed in range(seeds_per_cell):
                cell_idx += 1
                if p_in == 0.0 and p_out == 0.0:
                    skipped.append((p_in, p_out, "both probabilities zero"))
                    continue
                spec = PartitionSpec(
                    community_sizes=sizes,
                    p_in=p_in,
                    p_out=p_out,
                    seed=seed * 1_000_003 + cell_idx,
                )
                t0 = time.perf_counter()
                try:
                    g, labels = random_partition_graph(spec)
                except ValueError as exc:
                    skipped.append((p_in, p_out, str(exc)))
                    continue
                aligned = labels.aligned_to(g)
                for rep in _cell_matrices(g, walk_length):
                    try:
                        rows.append(
                            _sweep_row(p_in, p_out, rep, g, aligned, d, folds)
                        )
                    except ValueError as exc:
                        skipped.append(
                            (p_in, p_out, f"{rep.name}: {exc}")
                        )
                if progress:
                    dt = time.perf_counter() - t0
                    print(
                        f"cell p_in={p_in:g} p_out={p_out:g} done in {dt:.1f}s",
                        flush=True,
                    )
    return SweepResult(rows=tuple(rows), skipped=tuple(skipped))


def _sweep_row(
    p_in: float,
    p_out: float,
    rep: MatrixRepresentation,
    g: Graph,
    labels: LabelSet,
    d: int,
    folds: int,
) -> SweepRow:
    mat = rep.matrix
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        h_n = node_homophily(mat, labels)
        h_e = edge_homophily(mat, labels)
        s = gsi(mat, labels)
        space = factorize(mat, d=d)
        f1 = kfold_f1(
            space.embedding(), labels, g.names, classifier="linear", k=folds
        ).mean_f1
    return SweepRow(
        p_in=float(p_in),
        p_out=float(p_out),
        representation=rep.name,
        h_node=h_n,
        h_edge=h_e,
        gsi=s,
        f1_linear=f1,
    )


@dataclass(frozen=True)
class SweepCorrelations:
    n_rows: int
    correlations: dict = field(default_factory=dict)  # index -> (r, p)

    def to_json(self) -> str:
        payload = {
            "n_rows": self.n_rows,
            "correlations": {
                k: {"r": r, "p": p} for k, (r, p) in sorted(self.correlations.items())
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def correlate_sweep(result: SweepResult) -> SweepCorrelations:
    """Pearson r and p of each homophily index against linear F1."""
    if len(result.rows) < 3:
        raise ValueError("need at least 3 sweep rows")
    f1 = result.column("f1_linear")
    out = {}
    for name in ("h_node", "h_edge", "gsi"):
        out[name] = pearson(result.column(name), f1)
    return SweepCorrelations(n_rows=len(result.rows), correlations=out)
