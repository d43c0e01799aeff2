import numpy as np
import pytest

from glembed.graph import Graph, LabelSet, _from_edge_tokens


def graph_from(*pairs) -> Graph:
    """Graph from ('a','b') token pairs, first-appearance ids."""
    return _from_edge_tokens([tuple(p) for p in pairs])


def labels_from(kind: str = "single", **tok_labels) -> LabelSet:
    """LabelSet from token -> label-name (or iterable of names)."""
    names: list[str] = []
    mapping = {}
    for tok, labs in tok_labels.items():
        if isinstance(labs, str):
            labs = [labs]
        ids = []
        for lab in labs:
            if lab not in names:
                names.append(lab)
            ids.append(names.index(lab))
        mapping[tok] = frozenset(ids)
    return LabelSet(kind=kind, labels_of=mapping, label_names=tuple(names))


@pytest.fixture
def triangle() -> Graph:
    return graph_from(("a", "b"), ("b", "c"), ("a", "c"))


@pytest.fixture
def path3() -> Graph:
    return graph_from(("a", "b"), ("b", "c"))


@pytest.fixture
def path4() -> Graph:
    return graph_from(("a", "b"), ("b", "c"), ("c", "d"))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
