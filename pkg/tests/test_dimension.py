import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smalehom.dimension import (
    KINDS,
    LimitElement,
    LimitGroup,
    LimitHom,
    dimension_group,
    elem_equal,
    hom_add,
    hom_compose,
    hom_equal,
    hom_identity,
    hom_is_zero,
    hom_scale,
    hom_sub,
    hom_zero,
    induced_map,
    rationalized,
)
from smalehom.errors import CapExceeded, HypothesisFailure
from smalehom.linalg import IntMatrix
from smalehom.random_instances import composable_covers
from smalehom.sft import BlockCode, compose, shift_code


@pytest.fixture
def xor(H):
    """y_k = x_k + x_{k+1} mod 2, a 2-to-1 code needing a 2-block window."""
    rule = {("a", "a"): "a", ("a", "b"): "b", ("b", "a"): "b", ("b", "b"): "a"}
    return BlockCode(H, H, rule, 0, 1)


def test_groups_of_examples(G, H):
    assert dimension_group(H, "s") == LimitGroup(1, IntMatrix([[2]]))
    assert dimension_group(G, "s").connecting.tolist() == [[1, 1], [1, 1]]
    assert dimension_group(G, "u").rational_dim == 1
    assert dimension_group(H, "u").rational_dim == 1


def test_transpose_used_on_stable_side():
    from smalehom.graph_core import Graph
    from smalehom.sft import SFT

    s = SFT(Graph.from_edges([("x", "p", "q"), ("y", "q", "q"), ("z", "q", "p"), ("w", "p", "q")]))
    # A[w][v] counts edges v -> w
    a = [[0, 1], [2, 1]]
    assert dimension_group(s, "u").connecting.tolist() == a
    assert dimension_group(s, "s").connecting.tolist() == [list(r) for r in zip(*a)]


def test_limit_elements(G, H):
    dG, dH = dimension_group(G), dimension_group(H)
    assert elem_equal(dG, LimitElement((1, -1)), LimitElement((0, 0)))
    assert elem_equal(dH, LimitElement((1,), 0), LimitElement((2,), 1))
    assert not elem_equal(dH, LimitElement((1,), 0), LimitElement((1,), 1))


def test_induced_maps_of_pi(pi):
    assert induced_map(pi, "s").matrix.tolist() == [[1, 1]]
    assert induced_map(pi, "s_star").matrix.tolist() == [[1], [1]]
    assert induced_map(pi, "u").matrix.tolist() == [[1, 1]]
    assert induced_map(pi, "u_star").matrix.tolist() == [[1], [1]]


def test_variance_of_kinds(pi):
    for k in KINDS:
        f = induced_map(pi, k)
        if k in ("s", "u"):
            assert f.source.rank == 2 and f.target.rank == 1
        else:
            assert f.source.rank == 1 and f.target.rank == 2


def test_composites_on_examples(pi):
    s, s_star = induced_map(pi, "s"), induced_map(pi, "s_star")
    on_H = hom_compose(s, s_star)
    on_G = hom_compose(s_star, s)
    assert hom_equal(on_H, hom_scale(hom_identity(on_H.source), 2))
    assert not hom_equal(on_H, hom_identity(on_H.source))
    # e1 - e2 dies in the limit, so [[1,1],[1,1]] is multiplication by 2
    assert hom_equal(on_G, hom_scale(hom_identity(on_G.source), 2))


def test_hom_arithmetic(pi):
    f = induced_map(pi, "s")
    assert hom_is_zero(hom_sub(f, f))
    assert hom_equal(hom_add(f, f), hom_scale(f, 2))
    assert hom_is_zero(hom_zero(f.source, f.target))


def test_level_shift_alignment(H):
    g = dimension_group(H)
    f = LimitHom(g, g, IntMatrix([[1]]), 0)
    h = LimitHom(g, g, IntMatrix([[2]]), 1)
    assert hom_equal(f, h)
    assert f.aligned(2) == IntMatrix([[4]])
    with pytest.raises(ValueError):
        h.aligned(0)


def test_intertwining_is_checked(G, H):
    with pytest.raises(HypothesisFailure):
        LimitHom(dimension_group(G), dimension_group(H), IntMatrix([[1, 0]]), 0)


def test_shift_acts_by_inverse_connecting_map(G, H):
    assert rationalized(induced_map(shift_code(H), "s")).tolist() == [[Fraction(1, 2)]]
    assert rationalized(induced_map(shift_code(G), "s")).tolist() == [[Fraction(1, 2)]]
    assert rationalized(induced_map(shift_code(H), "u")).tolist() == [[2]]


def test_recoding_cap(xor):
    with pytest.raises(CapExceeded):
        induced_map(xor, "s", recoding_cap=1)
    f = induced_map(xor, "s", recoding_cap=2)
    assert f.matrix.tolist() == [[2]] and f.level_shift == 1


def test_precondition_checked(H, G):
    from smalehom.graph_core import Graph
    from smalehom.sft import SFT

    C = SFT(Graph.from_edges([("ap", "p", "p"), ("bp", "q", "p"), ("aq", "p", "q"), ("bq", "p", "q")]))
    c = BlockCode(C, H, {("ap",): "a", ("bp",): "b", ("aq",): "a", ("bq",): "b"})
    induced_map(c, "s")
    with pytest.raises(HypothesisFailure):
        induced_map(c, "u")
    with pytest.raises(HypothesisFailure):
        induced_map(c, "s_star")


def _functorial(c1, c2, kind):
    f = induced_map(compose(c2, c1), kind)
    g1, g2 = induced_map(c1, kind), induced_map(c2, kind)
    return hom_equal(f, hom_compose(g2, g1) if kind in ("s", "u") else hom_compose(g1, g2))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_functoriality_s_side(seed):
    c1, c2 = composable_covers(random.Random(seed), left=True)
    assert _functorial(c1, c2, "s")
    assert _functorial(c1, c2, "u_star")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_functoriality_u_side(seed):
    c1, c2 = composable_covers(random.Random(seed), left=False)
    assert _functorial(c1, c2, "u")
    assert _functorial(c1, c2, "s_star")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_rationalized_respects_composition(seed):
    c1, c2 = composable_covers(random.Random(seed), left=True)
    f = rationalized(induced_map(compose(c2, c1), "s"))
    g = rationalized(induced_map(c2, "s")) @ rationalized(induced_map(c1, "s"))
    assert f.entries == g.entries
