import json

import numpy as np
import pytest

from glembed.graph import Graph
from glembed.graphlets import count_orbits, gdv_similarity_matrix, graphlet_adjacency
from glembed.representations import (
    DENSE_NODE_LIMIT,
    adjacency_representation,
    deepgraphlet_matrix,
    deepwalk_matrix,
    export_representation_tsv,
    gdv_ppmi_matrix,
    gpmi_matrix,
    line_matrix,
)
from conftest import graph_from
from oracles import deepwalk_oracle, random_graph


def test_line_single_edge():
    g = graph_from(("a", "b"))
    m = line_matrix(g).matrix
    assert m[0, 1] == pytest.approx(np.log(2.0), abs=1e-15)
    assert m[0, 0] == 0.0 and m[1, 1] == 0.0


def test_line_triangle(triangle):
    m = line_matrix(triangle).matrix
    off = m[~np.eye(3, dtype=bool)]
    assert np.allclose(off, np.log(1.5), atol=1e-15)


def test_line_star():
    g = graph_from(("c", "l1"), ("c", "l2"), ("c", "l3"))
    m = line_matrix(g).matrix
    assert m[0, 1] == pytest.approx(np.log(2.0), abs=1e-15)
    assert m[1, 2] == 0.0  # leaves never co-occur


def test_deepwalk_path3_t2_all_zero(path3):
    m = deepwalk_matrix(path3, walk_length=2).matrix
    assert (m == 0.0).all()


def test_deepwalk_t1_equals_line(rng):
    g = random_graph(20, 0.3, rng)
    a = deepwalk_matrix(g, walk_length=1).matrix
    b = line_matrix(g).matrix
    assert np.allclose(a, b, atol=1e-12)


def test_deepwalk_matches_dense_oracle(rng):
    g = random_graph(15, 0.35, rng)
    got = deepwalk_matrix(g, walk_length=4).matrix
    want = deepwalk_oracle(g.adjacency_dense(), 4)
    assert np.allclose(got, want, atol=1e-10)


def test_gpmi_g0_equals_line(rng):
    g = random_graph(18, 0.3, rng)
    rep = gpmi_matrix(graphlet_adjacency(g, 0))
    assert rep.name == "gpmi(G0)"
    assert (rep.matrix == line_matrix(g).matrix).all()


def test_deepgraphlet_g0_equals_deepwalk(rng):
    g = random_graph(18, 0.3, rng)
    rep = deepgraphlet_matrix(graphlet_adjacency(g, 0), walk_length=5)
    assert rep.name == "deepgraphlet(G0)"
    assert (rep.matrix == deepwalk_matrix(g, walk_length=5).matrix).all()


def test_scale_invariance(rng):
    g = random_graph(16, 0.3, rng)
    a = g.adjacency_dense()
    assert np.allclose(line_matrix(a).matrix, line_matrix(3.0 * a).matrix, atol=1e-12)
    assert np.allclose(
        deepwalk_matrix(a, 3).matrix, deepwalk_matrix(3.0 * a, 3).matrix, atol=1e-12
    )


def test_outputs_symmetric_nonnegative(rng):
    g = random_graph(20, 0.25, rng)
    for rep in (line_matrix(g), deepwalk_matrix(g, 5)):
        m = rep.matrix
        assert (m >= 0).all()
        assert np.abs(m - m.T).max() < 1e-10


def test_gdv_ppmi_on_triangle(triangle):
    sim = gdv_similarity_matrix(count_orbits(triangle))
    rep = gdv_ppmi_matrix(sim, walk_length=3)
    assert rep.name == "gdv-ppmi"
    want = deepwalk_matrix(triangle, walk_length=3).matrix
    assert np.allclose(rep.matrix, want, atol=1e-12)


def test_adjacency_representation_names(triangle):
    assert adjacency_representation(triangle, 0).name == "adjacency(G0)"
    assert adjacency_representation(graphlet_adjacency(triangle, 2)).name == "adjacency(G2)"


def test_empty_graphlet_adjacency_rejected(path3):
    with pytest.raises(ValueError, match="empty graphlet adjacency"):
        gpmi_matrix(graphlet_adjacency(path3, 2))
    with pytest.raises(ValueError, match="empty graphlet adjacency"):
        deepgraphlet_matrix(graphlet_adjacency(path3, 2))


def test_input_validation():
    with pytest.raises(ValueError, match="zero-degree for all"):
        line_matrix(np.zeros((3, 3)))
    with pytest.raises(ValueError, match="non-negative"):
        line_matrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    with pytest.raises(ValueError, match="zero diagonal"):
        line_matrix(np.array([[1.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(ValueError, match="symmetric"):
        line_matrix(np.array([[0.0, 2.0], [1.0, 0.0]]))
    with pytest.raises(ValueError, match="walk length"):
        deepwalk_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]), walk_length=0)
    with pytest.raises(ValueError, match="square"):
        line_matrix(np.zeros((2, 3)))


def test_zero_degree_rows_warn_and_stay_zero():
    w = np.zeros((3, 3))
    w[0, 1] = w[1, 0] = 1.0
    with pytest.warns(UserWarning, match="1 zero-degree node"):
        m = line_matrix(w).matrix
    assert (m[2] == 0.0).all() and (m[:, 2] == 0.0).all()


def test_dense_limit_guard():
    import scipy.sparse as sp

    big = sp.csr_matrix((DENSE_NODE_LIMIT + 1, DENSE_NODE_LIMIT + 1))
    with pytest.raises(ValueError, match="refusing dense"):
        line_matrix(big)


def test_export_tsv(tmp_path, triangle):
    rep = line_matrix(triangle)
    path = tmp_path / "rep.tsv"
    export_representation_tsv(rep, str(path), names=triangle.names)
    lines = path.read_text().splitlines()
    header = json.loads(lines[0][2:])
    assert header["name"] == "line"
    body = [ln.split("\t") for ln in lines[1:]]
    assert [b[:2] for b in body] == [["a", "b"], ["a", "c"], ["b", "c"]]
    assert float(body[0][2]) == pytest.approx(np.log(1.5), abs=1e-12)
