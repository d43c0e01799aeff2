"""Convert raw planetoid-format citation files into edge/label TSVs.

Expects the eight `ind.<name>.{graph,test.index,ally,ty}` files in a source
directory (default /tmp/planetoid) and writes `<name>.edges` and
`<name>.labels` into data/. The graph pickle maps node id -> neighbor list;
label rows cover training+validation nodes (`ally`, ids 0..len-1) and test
nodes (`ty`, ids listed in `test.index`, in file order). Ids in neither
block stay unannotated. Duplicate and self-loop entries in the neighbor
lists are dropped.

Usage: python3 scripts/prepare_citation_data.py [source_dir] [out_dir]
"""
from __future__ import annotations

import pickle
import sys
from pathlib import Path

import numpy as np

NETWORKS = ("cora", "citeseer")


def load_raw(src: Path, name: str):
    with open(src / f"ind.{name}.graph", "rb") as fh:
        graph = pickle.load(fh, encoding="latin1")
    with open(src / f"ind.{name}.ally", "rb") as fh:
        ally = pickle.load(fh, encoding="latin1")
    with open(src / f"ind.{name}.ty", "rb") as fh:
        ty = pickle.load(fh, encoding="latin1")
    test_index = np.loadtxt(src / f"ind.{name}.test.index", dtype=np.int64)
    return graph, np.asarray(ally), np.asarray(ty), test_index


def convert(src: Path, out: Path, name: str) -> None:
    graph, ally, ty, test_index = load_raw(src, name)
    n = max(graph) + 1

    edges = set()
    for u, nbrs in graph.items():
        for v in nbrs:
            if u == v:
                continue
            edges.add((min(u, v), max(u, v)))

    out.mkdir(parents=True, exist_ok=True)
    with open(out / f"{name}.edges", "w", encoding="utf-8") as fh:
        for u, v in sorted(edges):
            fh.write(f"{u}\t{v}\n")

    labels = {}
    for i in range(len(ally)):
        row = ally[i]
        if row.any():
            labels[i] = int(np.argmax(row))
    for pos, node in enumerate(test_index):
        row = ty[pos]
        if row.any():
            labels[int(node)] = int(np.argmax(row))

    with open(out / f"{name}.labels", "w", encoding="utf-8") as fh:
        for i in sorted(labels):
            fh.write(f"{i}\tclass{labels[i]}\n")

    print(
        f"{name}: {n} nodes, {len(edges)} edges, "
        f"{len(labels)} annotated ({n - len(labels)} unannotated)"
    )


def main() -> int:
    src = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("/tmp/planetoid")
    out = Path(sys.argv[2]) if len(sys.argv) > 2 else Path(__file__).resolve().parents[1] / "data"
    for name in NETWORKS:
        convert(src, out, name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
