import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smalehom.complexes import PairMorphism, SUPair
from smalehom.dimension import hom_equal, hom_identity, hom_scale
from smalehom.errors import HypothesisFailure
from smalehom.random_instances import random_cover, random_square
from smalehom.sft import fibre_count, is_conjugacy, is_surjective, periodic_points
from smalehom.verify import (
    SquareDiagram,
    automorphism_suite,
    build_pullback_cube,
    build_sigma_cube,
    check_square,
    completed_square,
    construct_compatible_pairs,
    dimension_composites,
    verify_pullback_identity,
    verify_theta_naturality,
)


@pytest.fixture
def square1(pi, idH):
    return SquareDiagram(pi, pi, idH, idH)


@pytest.fixture
def square2(pi, idG):
    return SquareDiagram(idG, idG, pi, pi)


def test_square_must_commute(pi, idG, idH):
    from smalehom.sft import shift_code

    with pytest.raises(HypothesisFailure):
        SquareDiagram(pi, shift_code(pi.source), idH, pi)


def test_check_square_on_degree_two_square(square1):
    r = check_square(square1)
    assert r.hypotheses["eta1 s-bijective"] is True
    assert r.hypotheses["eta2 × eta1 conjugacy"] is False
    assert r.conclusion["degree"] == 2
    assert r.conclusion["singleton_fibre_criterion"] == "inconclusive"


def test_check_square_on_completed_square(pi, idH):
    r = check_square(completed_square(idH, pi))
    assert r.passed
    assert r.conclusion["degree"] == 1
    assert r.conclusion["singleton_fibre_criterion"] == "conjugacy"


def test_degree_two_square_composites(square1):
    left, right, notes = dimension_composites(square1, "s")
    assert notes == {}
    assert hom_equal(left, hom_scale(hom_identity(left.source), 2))
    assert hom_equal(right, hom_identity(right.source))
    assert not hom_equal(left, right)


def test_double_cover_square_composites(square2):
    left, right, _ = dimension_composites(square2, "s")
    assert hom_equal(left, hom_identity(left.source))
    # [[1,1],[1,1]] is multiplication by 2 in the limit
    assert hom_equal(right, hom_scale(hom_identity(right.source), 2))


@pytest.mark.parametrize("level", ["dimension", "homology"])
def test_counterexamples_fail_at_both_levels(square1, square2, level):
    for sq in (square1, square2):
        r = verify_pullback_identity(sq, level)
        assert not r.passed
        assert r.conclusion["holds"] is False
        assert set(r.to_json()) == {"hypotheses", "conclusion", "witnesses"}


def test_homology_level_values(square1, square2):
    r1 = verify_pullback_identity(square1, "homology")
    assert r1.conclusion["degrees"]["0"]["left"] == [["2"]]
    assert r1.conclusion["degrees"]["0"]["right"] == [["1"]]
    r2 = verify_pullback_identity(square2, "homology")
    assert r2.conclusion["degrees"]["0"]["left"] == [["1"]]
    assert r2.conclusion["degrees"]["0"]["right"] == [["2"]]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_completed_squares_satisfy_identity(seed):
    d = random_square(random.Random(seed))
    assert verify_pullback_identity(d, "dimension").passed


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10**6))
def test_completed_squares_satisfy_identity_on_homology(seed):
    rng = random.Random(seed)
    d = random_square(rng)
    base = d.Sigma0
    seeds = {"Y0": random_cover(rng, base, True, max_vertices=4, tag="Y0"),
             "Z0": random_cover(rng, base, False, max_vertices=4, tag="Z0")}
    assert verify_pullback_identity(d, "homology", L_cap=2, M_cap=2, seeds=seeds).passed


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_onto_product_map_is_constant_to_one(seed):
    d = random_square(random.Random(seed))
    r = check_square(d)
    p = d.product_map()
    if r.conclusion["onto"] and r.conclusion["degree"] is not None:
        counts = {fibre_count(p, x.left_cycle) for n in range(1, 7) for x in periodic_points(p.target, n)}
        assert counts == {r.conclusion["degree"]}


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_singleton_fibre_implies_conjugacy(seed):
    d = random_square(random.Random(seed))
    r = check_square(d)
    if r.conclusion.get("singleton_fibre_criterion") == "conjugacy":
        p = d.product_map()
        assert is_surjective(p) and is_conjugacy(p)


def test_cube_lemma_checks(pi, idH):
    rng = random.Random(3)
    d = completed_square(idH, pi)
    cube = build_pullback_cube(d, Y0=random_cover(rng, d.Sigma0, True, max_vertices=3))
    assert all(v is True for v in cube.lemma_checks.values())
    assert build_sigma_cube(cube).passed


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_cube_lemmas_on_random_squares(seed):
    d = random_square(random.Random(seed))
    cube = build_pullback_cube(d)
    assert all(v is True for v in cube.lemma_checks.values())


def test_cube_rejects_bad_seed(pi, idH, H):
    from smalehom.graph_core import Graph
    from smalehom.sft import SFT, BlockCode

    C = SFT(Graph.from_edges([("ap", "p", "p"), ("bp", "q", "p"), ("aq", "p", "q"), ("bq", "p", "q")]))
    left_only = BlockCode(C, H, {("ap",): "a", ("bp",): "b", ("aq",): "a", ("bq",): "b"})
    with pytest.raises(HypothesisFailure):
        build_pullback_cube(completed_square(idH, pi), Z0=left_only)


def test_theta_not_constructible_for_pi_pairs(G, H, pi, idH, idG):
    t1 = PairMorphism(SUPair.trivial(G), SUPair(idH, pi), pi, pi, idG)
    t2 = PairMorphism(SUPair.trivial(G), SUPair.trivial(H), pi, pi, pi)
    r = verify_theta_naturality(t1, t2)
    assert r.conclusion == {"holds": False, "theta_prime": "not constructible"}
    assert r.witnesses == [{"t1": "product map π_u × η_Z not onto"}]


def test_theta_naturality_on_constructed_pairs(pi):
    ta = construct_compatible_pairs(pi, "s")
    tb = construct_compatible_pairs(pi, "s", pi)
    assert verify_theta_naturality(ta, tb).passed
    assert verify_theta_naturality(ta, ta).passed


def test_construct_compatible_pairs_u_direction(pi):
    t = construct_compatible_pairs(pi, "u")
    t.source.validate()
    t.target.validate()


def test_automorphism_suite_traces(H, pi, idH):
    r = automorphism_suite(SUPair(idH, pi))
    assert r.passed
    table = r.witnesses[0]["trace_table"]
    assert [row["periodic_points"] for row in table] == [2, 4, 8]
    assert [row["traces"]["0"] for row in table] == ["1/2", "1/4", "1/8"]
