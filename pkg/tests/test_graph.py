import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from glembed.graph import (
    Graph,
    connected_components,
    largest_connected_component,
    load_edge_list,
    load_labels,
    save_edge_list,
)
from conftest import graph_from, labels_from


def test_load_dedupes_and_orders(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("a b\nb c\na b\n")
    with pytest.warns(UserWarning, match="1 duplicate"):
        g = load_edge_list(str(p))
    assert g.n == 3
    assert [tuple(e) for e in g.edges] == [(0, 1), (1, 2)]
    assert g.names == ("a", "b", "c")


def test_load_drops_self_loop(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("a a\n")
    with pytest.warns(UserWarning, match="self-loop"):
        g = load_edge_list(str(p))
    assert g.n == 1 and g.m == 0


def test_load_malformed_line_reports_lineno(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("a b\nx y z\n")
    with pytest.raises(ValueError, match=":2"):
        load_edge_list(str(p))


def test_load_empty_graph_errors(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("# only comments\n")
    with pytest.raises(ValueError, match="empty graph"):
        load_edge_list(str(p))


def test_comments_and_separators(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("# header\na\tb\nb c\n")
    g = load_edge_list(str(p))
    assert g.m == 2


def test_ids_contiguous_and_edge_bounds():
    g = graph_from(("x", "y"), ("y", "z"), ("z", "w"))
    assert list(range(g.n)) == sorted(g.name_to_id.values())
    assert (g.edges[:, 0] != g.edges[:, 1]).all()
    assert g.edges.max() < g.n


def test_roundtrip_with_isolated_node(tmp_path):
    with pytest.warns(UserWarning, match="self-loop"):
        g = graph_from(("a", "b"), ("c", "c"))  # c isolated
    path = tmp_path / "out.edges"
    save_edge_list(g, str(path))
    with pytest.warns(UserWarning):
        g2 = load_edge_list(str(path))
    assert g2 == g


def test_adjacency_matches_edges(triangle):
    a = triangle.adjacency_dense()
    assert a.sum() == 2 * triangle.m
    assert (a == a.T).all()
    assert (np.diag(a) == 0).all()


def test_lcc_picks_largest():
    g = graph_from(
        ("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"),  # size 5
        ("x", "y"), ("y", "z"),  # size 3
    )
    sub, _ = largest_connected_component(g)
    assert sub.n == 5 and set(sub.names) == {"a", "b", "c", "d", "e"}


def test_lcc_identity_on_connected(path4):
    sub, _ = largest_connected_component(path4)
    assert sub == path4
    assert sub.m == path4.m


def test_lcc_tie_breaks_by_smallest_external_name():
    g = graph_from(("b", "c"), ("a", "d"))  # two 2-node components
    comps = connected_components(g)
    assert {g.names[i] for i in comps[0]} == {"a", "d"}


def test_lcc_restricts_labels():
    g = graph_from(("a", "b"), ("b", "c"), ("x", "y"), ("y", "z"), ("x", "z"), ("a", "c"))
    labels = labels_from(a="t1", b="t1", c="t1")
    sub, kept = largest_connected_component(g, labels)
    assert sub.n == 3
    assert len(kept.labels_of) == 3


def test_load_labels_single_and_multi(tmp_path):
    p = tmp_path / "l.labels"
    p.write_text("a\tx\nb\tx\nc\ty\n")
    ls = load_labels(str(p))
    assert ls.kind == "single" and len(ls.labels_of) == 3 and ls.n_labels == 2

    p2 = tmp_path / "m.labels"
    p2.write_text("a\tx\na\ty\n")
    ms = load_labels(str(p2), kind="multi")
    assert ms.labels_of["a"] == frozenset({0, 1})


def test_load_labels_duplicate_single_errors(tmp_path):
    p = tmp_path / "l.labels"
    p.write_text("a\tx\na\ty\n")
    with pytest.raises(ValueError, match="duplicate label for node 'a'"):
        load_labels(str(p))


def test_align_warns_on_unknown_token(path3):
    ls = labels_from(a="x", q="y")
    with pytest.warns(UserWarning, match="absent"):
        aligned = ls.aligned_to(path3)
    assert set(aligned.labels_of) == {0}


def test_single_array_and_membership(path3):
    ls = labels_from(a="x", c="y").aligned_to(path3)
    arr = ls.single_array(path3.n)
    assert arr.tolist() == [0, -1, 1]
    ms = labels_from(kind="multi", a=["x", "y"]).aligned_to(path3)
    memb = ms.membership_matrix(path3.n)
    assert memb[0].tolist() == [True, True] and not memb[1:].any()


@st.composite
def random_edge_files(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    pairs = draw(
        st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=n - 1),
                st.integers(min_value=0, max_value=n - 1),
            ),
            min_size=1,
            max_size=30,
        )
    )
    return [(f"n{u}", f"v{v}") for u, v in pairs]


@settings(max_examples=60, deadline=None)
@given(random_edge_files())
def test_roundtrip_property(tmp_path_factory, pairs):
    import warnings as w

    with w.catch_warnings():
        w.simplefilter("ignore")
        g = graph_from(*pairs)
        tmp = tmp_path_factory.mktemp("rt") / "g.edges"
        save_edge_list(g, str(tmp))
        g2 = load_edge_list(str(tmp))
    assert g2 == g
    assert (g2.edges[:, 0] < g2.edges[:, 1]).all()
