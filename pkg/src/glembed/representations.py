"""Closed-form matrix representations of a network.

Every representation is a non-negative square node x node matrix. The
random-walk family follows the factorized objectives, with the negative
sampling constant fixed at b = 1 so the constant term vanishes:

    LINE(u, v)     = max(0, log( vol(A) A_uv / (D_uu D_vv) ))
    DeepWalk(T)    = max(0, log( vol(A) (1/T) sum_{r=1..T} (D^-1 A)^r D^-1 ))

GPMI applies the LINE form to a graphlet adjacency's raw counts; DeepGraphlets
applies the DeepWalk form to its binarized counts; GDV-PPMI applies DeepWalk
to the GDV-similarity matrix. Natural log throughout (a base change rescales
every entry by one constant).
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = [
    "MatrixRepresentation",
    "DENSE_NODE_LIMIT",
    "adjacency_representation",
    "line_matrix",
    "deepwalk_matrix",
    "gpmi_matrix",
    "deepgraphlet_matrix",
    "gdv_ppmi_matrix",
    "export_representation_tsv",
]

# desk-scale guard: representations are materialized dense
DENSE_NODE_LIMIT = 20_000

DEFAULT_WALK_LENGTH = 10


@dataclass(frozen=True)
class MatrixRepresentation:
    """Named non-negative square matrix plus the parameters that built it."""

    name: str
    matrix: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("representation matrix must be square")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _as_dense(a) -> np.ndarray:
    """Accept Graph / sparse / dense / MatrixRepresentation, return float64 dense."""
    if isinstance(a, MatrixRepresentation):
        a = a.matrix
    if hasattr(a, "adjacency_dense"):  # Graph
        a = a.adjacency_dense()
    if sp.issparse(a):
        if a.shape[0] > DENSE_NODE_LIMIT:
            raise ValueError(
                f"refusing dense build for n={a.shape[0]} (limit {DENSE_NODE_LIMIT})"
            )
        a = np.asarray(a.todense())
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if a.shape[0] > DENSE_NODE_LIMIT:
        raise ValueError(
            f"refusing dense build for n={a.shape[0]} (limit {DENSE_NODE_LIMIT})"
        )
    return a


def _check_input(w: np.ndarray) -> np.ndarray:
    if (w < 0).any():
        raise ValueError("input matrix must be non-negative")
    if np.abs(np.diagonal(w)).max(initial=0.0) != 0.0:
        raise ValueError("input matrix must have a zero diagonal")
    asym = np.abs(w - w.T).max()
    if asym > 1e-10 * max(1.0, np.abs(w).max()):
        raise ValueError("input matrix must be symmetric")
    deg = w.sum(axis=1)
    if deg.sum() == 0:
        raise ValueError("zero-degree for all nodes: input matrix is empty")
    n_zero = int((deg == 0).sum())
    if n_zero:
        warnings.warn(
            f"{n_zero} zero-degree node(s); their representation rows are zero",
            stacklevel=3,
        )
    return deg


def _positive_log(m: np.ndarray) -> np.ndarray:
    """max(0, log(m)) with log evaluated only on positive entries."""
    out = np.zeros_like(m)
    mask = m > 0
    out[mask] = np.log(m[mask])
    np.maximum(out, 0.0, out=out)
    return out


def _pmi_entries(w: np.ndarray, deg: np.ndarray) -> np.ndarray:
    vol = deg.sum()
    out = np.zeros_like(w)
    mask = w > 0
    denom = np.outer(deg, deg)
    out[mask] = np.log(vol * w[mask] / denom[mask])
    np.maximum(out, 0.0, out=out)
    return out


def line_matrix(a) -> MatrixRepresentation:
    """Pointwise mutual information of a weighted symmetric matrix, floored at 0."""
    w = _as_dense(a)
    deg = _check_input(w)
    return MatrixRepresentation(name="line", matrix=_pmi_entries(w, deg), params={"b": 1})


def deepwalk_matrix(a, walk_length: int = DEFAULT_WALK_LENGTH) -> MatrixRepresentation:
    """Random-walk averaged PMI with walk length T, floored at 0.

    Matrix powers accumulate by repeated multiplication, never an explicit
    dense T-th power, so memory stays at a few n x n buffers.
    """
    if walk_length < 1:
        raise ValueError("walk length must be >= 1")
    w = _as_dense(a)
    deg = _check_input(w)
    vol = deg.sum()
    inv = np.where(deg > 0, 1.0 / np.where(deg > 0, deg, 1.0), 0.0)
    p = w * inv[:, None]
    acc = p.copy()
    cur = p
    for _ in range(walk_length - 1):
        cur = cur @ p
        acc += cur
    m = (vol / walk_length) * acc * inv[None, :]
    return MatrixRepresentation(
        name="deepwalk", matrix=_positive_log(m), params={"T": walk_length, "b": 1}
    )


def adjacency_representation(source, graphlet_id: int = 0) -> MatrixRepresentation:
    """A graphlet adjacency (or the plain adjacency, G0) as a representation."""
    if hasattr(source, "graphlet_id"):  # GraphletAdjacency
        graphlet_id = source.graphlet_id
        w = _as_dense(source.counts)
    else:
        w = _as_dense(source)
    return MatrixRepresentation(
        name=f"adjacency(G{graphlet_id})", matrix=w, params={"graphlet": graphlet_id}
    )


def gpmi_matrix(ga) -> MatrixRepresentation:
    """LINE-form PMI over a graphlet adjacency's instance counts."""
    w = _as_dense(ga.counts)
    if not w.any():
        raise ValueError("empty graphlet adjacency")
    deg = _check_input(w)
    return MatrixRepresentation(
        name=f"gpmi(G{ga.graphlet_id})",
        matrix=_pmi_entries(w, deg),
        params={"graphlet": ga.graphlet_id, "b": 1},
    )


def deepgraphlet_matrix(ga, walk_length: int = DEFAULT_WALK_LENGTH) -> MatrixRepresentation:
    """DeepWalk form over the binarized graphlet adjacency."""
    b = _as_dense(ga.binarized)
    if not b.any():
        raise ValueError("empty graphlet adjacency")
    rep = deepwalk_matrix(b, walk_length=walk_length)
    return MatrixRepresentation(
        name=f"deepgraphlet(G{ga.graphlet_id})",
        matrix=rep.matrix,
        params={"graphlet": ga.graphlet_id, "T": walk_length, "b": 1},
    )


def gdv_ppmi_matrix(
    sim: MatrixRepresentation, walk_length: int = DEFAULT_WALK_LENGTH
) -> MatrixRepresentation:
    """DeepWalk form over the GDV-similarity matrix."""
    rep = deepwalk_matrix(sim.matrix, walk_length=walk_length)
    return MatrixRepresentation(
        name="gdv-ppmi", matrix=rep.matrix, params={"T": walk_length, "b": 1}
    )


def export_representation_tsv(rep: MatrixRepresentation, path: str, names=None) -> None:
    """Coordinate dump `u v value` with a JSON header line carrying provenance."""
    header = json.dumps({"name": rep.name, "params": rep.params}, sort_keys=True)
    m = rep.matrix
    rows, cols = np.nonzero(m)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {header}\n")
        for u, v in zip(rows, cols):
            if u <= v:
                tu = names[u] if names is not None else u
                tv = names[v] if names is not None else v
                fh.write(f"{tu}\t{tv}\t{m[u, v]:.12g}\n")
