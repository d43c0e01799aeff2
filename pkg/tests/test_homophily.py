import numpy as np
import pytest

from glembed.graph import LabelSet
from glembed.homophily import (
    edge_homophily,
    gsi,
    homophily_report,
    multilabel_share,
    node_homophily,
    weighted_edge_homophily,
    weighted_node_homophily,
)
from glembed.representations import line_matrix
from conftest import graph_from, labels_from


def int_labels(assign: dict, names=("X", "Y"), kind="single") -> LabelSet:
    mapping = {
        i: frozenset(labs if isinstance(labs, (set, frozenset, tuple, list)) else [labs])
        for i, labs in assign.items()
    }
    return LabelSet(kind=kind, labels_of=mapping, label_names=tuple(names))


def test_all_same_label_is_one(triangle):
    labs = labels_from(a="X", b="X", c="X").aligned_to(triangle)
    assert edge_homophily(triangle, labs) == 1.0
    assert node_homophily(triangle, labs) == 1.0
    assert gsi(triangle, labs) == 1.0


def test_star_with_distinct_center_is_zero():
    g = graph_from(("c", "l1"), ("c", "l2"), ("c", "l3"))
    labs = labels_from(c="hub", l1="leaf", l2="leaf", l3="leaf").aligned_to(g)
    assert edge_homophily(g, labs) == 0.0
    assert node_homophily(g, labs) == 0.0


def test_complete_bipartite_is_zero():
    g = graph_from(("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2"))
    labs = labels_from(a1="A", a2="A", b1="B", b2="B").aligned_to(g)
    assert edge_homophily(g, labs) == 0.0


def test_weighted_edge_three_to_one():
    w = np.zeros((3, 3))
    w[0, 1] = w[1, 0] = 3.0  # same-label pair
    w[1, 2] = w[2, 1] = 1.0  # cross pair
    labs = int_labels({0: 0, 1: 0, 2: 1})
    assert weighted_edge_homophily(w, labs) == pytest.approx(0.75)
    assert edge_homophily(w, labs) == pytest.approx(0.5)
    assert weighted_node_homophily(w, labs) == pytest.approx((1.0 + 0.75 + 0.0) / 3)


def test_gsi_weighted_hand_case():
    # 0,1 -> X; 2,3 -> Y; nearest neighbors 1,0,1,2: three of four agree
    w = np.zeros((4, 4))
    w[0, 1] = w[1, 0] = 5.0
    w[1, 2] = w[2, 1] = 4.0
    w[2, 3] = w[3, 2] = 1.0
    labs = int_labels({0: 0, 1: 0, 2: 1, 3: 1})
    assert gsi(w, labs) == pytest.approx(0.75)


def test_gsi_structural_path4(path4):
    # nearest structural rows pair ends with middles across the label split
    labs = labels_from(a="X", b="X", c="Y", d="Y").aligned_to(path4)
    assert gsi(path4, labs) == 0.0


def test_gsi_scale_invariant(rng):
    w = rng.random((6, 6))
    w = np.triu(w, 1) + np.triu(w, 1).T
    labs = int_labels({i: i % 2 for i in range(6)})
    assert gsi(w, labs) == gsi(7.5 * w, labs)


def test_multilabel_jaccard_and_anchor():
    g = graph_from(("a", "b"))
    labs = labels_from(kind="multi", a=["L1", "L2"], b=["L2", "L3"]).aligned_to(g)
    assert edge_homophily(g, labs) == pytest.approx(1 / 3)
    assert edge_homophily(g, labs, agreement="anchor") == pytest.approx(1 / 2)
    assert multilabel_share({1, 2}, {2, 3}) == pytest.approx(1 / 3)
    assert multilabel_share({1, 2}, {2, 3}, agreement="anchor") == 0.5


def test_label_name_permutation_invariant(triangle):
    a = labels_from(a="X", b="X", c="Y").aligned_to(triangle)
    b = labels_from(a="Y", b="Y", c="X").aligned_to(triangle)
    assert edge_homophily(triangle, a) == edge_homophily(triangle, b)
    assert node_homophily(triangle, a) == node_homophily(triangle, b)
    assert gsi(triangle, a) == gsi(triangle, b)


def test_uniform_weights_match_unweighted(rng):
    from oracles import random_graph

    g = random_graph(12, 0.4, rng)
    labs = int_labels({i: i % 3 for i in range(12)}, names=("A", "B", "C"))
    assert weighted_edge_homophily(g, labs) == edge_homophily(g, labs)
    assert weighted_node_homophily(g, labs) == node_homophily(g, labs)


def test_unannotated_nodes_excluded(path3):
    labs = labels_from(a="X", b="X").aligned_to(path3)  # c unannotated
    assert edge_homophily(path3, labs) == 1.0
    assert node_homophily(path3, labs) == 1.0


def test_no_annotated_edges_raises(path3):
    labs = labels_from(a="X", c="X").aligned_to(path3)  # only non-adjacent pair
    with pytest.raises(ValueError, match="no edges between annotated"):
        edge_homophily(path3, labs)


def test_gsi_needs_two_annotated(triangle):
    labs = labels_from(a="X").aligned_to(triangle)
    with pytest.raises(ValueError, match="at least 2 annotated"):
        gsi(triangle, labs)


def test_share_validation():
    with pytest.raises(ValueError, match="non-empty"):
        multilabel_share(set(), {1})
    with pytest.raises(ValueError, match="unknown agreement"):
        multilabel_share({1}, {1}, agreement="dice")


def test_unaligned_labels_rejected(triangle):
    labs = labels_from(a="X", b="X", c="Y")  # token keys, never aligned
    with pytest.raises(ValueError, match="aligned"):
        edge_homophily(triangle, labs)


def test_report_fields(triangle):
    labs = labels_from(a="X", b="X", c="Y").aligned_to(triangle)
    rep = line_matrix(triangle)
    r = homophily_report(rep, labs)
    assert r.representation_name == "line"
    assert r.annotated_node_count == 3
    d = r.to_dict()
    for key in ("h_edge", "h_node", "h_edge_weighted", "h_node_weighted", "gsi"):
        assert 0.0 <= d[key] <= 1.0
