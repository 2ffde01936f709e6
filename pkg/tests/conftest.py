from importlib.resources import files

import pytest

from smalehom.graph_core import Graph
from smalehom.sft import SFT, BlockCode, identity_code

DATA = files("smalehom") / "data"


def data_path(name: str) -> str:
    return str(DATA / name)


@pytest.fixture
def H():
    return SFT(Graph.from_edges([("a", "v", "v"), ("b", "v", "v")]), "H")


@pytest.fixture
def G():
    return SFT(Graph.from_edges([
        ("a1", "v1", "v1"), ("b1", "v1", "v2"), ("a2", "v2", "v2"), ("b2", "v2", "v1"),
    ]), "G")


@pytest.fixture
def pi(G, H):
    return BlockCode(G, H, {("a1",): "a", ("a2",): "a", ("b1",): "b", ("b2",): "b"})


@pytest.fixture
def idH(H):
    return identity_code(H)


@pytest.fixture
def idG(G):
    return identity_code(G)
