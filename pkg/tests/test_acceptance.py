"""Acceptance criteria, one test each, with their time limits.

Every test prints one PASS/FAIL line (with the elapsed time) straight to
the terminal, so the lines show up in ``pytest -v`` output too.
"""

import random
import time

import pytest

from smalehom.complexes import DoubleComplex, PairMorphism, SUPair, homology, induced_on_homology
from smalehom.dimension import dimension_group, hom_compose, hom_equal, hom_identity, hom_scale, induced_map
from smalehom.errors import HypothesisFailure
from smalehom.linalg import Lattice
from smalehom.random_instances import brute_force_injective, code_corpus, composable_covers, random_cover, random_square
from smalehom.sft import (
    compose,
    degree,
    is_conjugacy,
    is_injective,
    is_left_covering,
    is_right_covering,
    is_s_bijective,
    is_u_bijective,
)
from smalehom.verify import SquareDiagram, verify_pullback_identity, verify_theta_naturality

BUILT: list = []


@pytest.fixture(scope="module", autouse=True)
def record_complexes():
    """Keep every double complex built while this module runs (criterion 8)."""
    original = DoubleComplex.__init__

    def init(self, *args, **kwargs):
        original(self, *args, **kwargs)
        BUILT.append(self)

    mp = pytest.MonkeyPatch()
    mp.setattr(DoubleComplex, "__init__", init)
    yield
    mp.undo()


def _report(capsys, n, ok, elapsed, limit, detail=""):
    status = "PASS" if ok and elapsed < limit else "FAIL"
    with capsys.disabled():
        print(f"\ncriterion {n:2d}: {status}  {elapsed:7.2f}s (limit {limit}s)  {detail}")
    assert ok, detail
    assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"


def _timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def test_criterion_01_first_square(capsys, pi, idH):
    def run():
        s, s_star = induced_map(pi, "s"), induced_map(pi, "s_star")
        ids, ids_star = induced_map(idH, "s"), induced_map(idH, "s_star")
        left = hom_compose(s, s_star)
        right = hom_compose(ids_star, ids)
        one = hom_identity(left.source)
        return (
            hom_equal(left, hom_scale(one, 2))
            and hom_equal(right, one)
            and not hom_equal(left, right)
            and left.matrix.tolist() == [[2]]
        )

    ok, dt = _timed(run)
    _report(capsys, 1, ok, dt, 1, "pi^s o pi^s* = x2, id^s* o id^s = id")


def test_criterion_02_second_square(capsys, pi, idG):
    def run():
        left = hom_compose(induced_map(pi, "s_star"), induced_map(pi, "s"))
        ident = hom_compose(induced_map(idG, "s"), induced_map(idG, "s_star"))
        one = hom_identity(left.source)
        # [v1] = [v2] in the limit, so [[1,1],[1,1]] acts as 2
        return hom_equal(left, hom_scale(one, 2)) and hom_equal(ident, one) and not hom_equal(left, ident)

    ok, dt = _timed(run)
    _report(capsys, 2, ok, dt, 1, "pi^s* o pi^s = x2 on D^s(G)")


def test_criterion_03_pi_decisions(capsys, pi):
    def run():
        return (
            degree(pi) == 2
            and is_conjugacy(pi) is False
            and is_s_bijective(pi) is True
            and is_u_bijective(pi) is True
            and is_left_covering(pi.hom)
            and is_right_covering(pi.hom)
        )

    ok, dt = _timed(run)
    _report(capsys, 3, ok, dt, 1, "degree 2, not a conjugacy, s/u-bijective, covering both ways")


def test_criterion_04_trivial_pair(capsys, H):
    def run():
        h = homology(SUPair.trivial(H), "s")
        oracle = dimension_group(H, "s")
        g0 = h.groups[0]
        return (
            g0.presentation == oracle
            and g0.dim_q == 1
            and all(g.dim_q == 0 for N, g in h.groups.items() if N != 0)
            and all(g.torsion == [] and g.torsion_stable for g in h.groups.values())
        )

    ok, dt = _timed(run)
    _report(capsys, 4, ok, dt, 5, "H_0 = (Z, x2), other degrees zero")


def test_criterion_05_pair_independence(capsys, H, pi, idH):
    def run():
        a = homology(SUPair.trivial(H), "s")
        b = homology(SUPair(pi, idH), "s")
        degrees = set(a.groups) | set(b.groups)
        return all(a.dim_q(N) == b.dim_q(N) for N in degrees), sorted(degrees)

    (ok, degrees), dt = _timed(run)
    _report(capsys, 5, ok, dt, 30, f"dimQ agree in degrees {degrees}")


def test_criterion_06_property_suite(capsys):
    def run():
        rng = random.Random(2024)
        dim_ok = hom_ok = 0
        failures = []
        for k in range(24):
            d = random_square(rng, max_vertices=6)
            sizes = [len(s.graph.vertices) for s in (d.Sigma, d.Sigma0, d.Sigma1, d.Sigma2)]
            assert max(sizes) <= 6
            if verify_pullback_identity(d, "dimension").passed:
                dim_ok += 1
            else:
                failures.append(("dimension", k))
            if k < 8:
                seeds = {"Y0": random_cover(rng, d.Sigma0, True, max_vertices=4, tag="Y0"),
                         "Z0": random_cover(rng, d.Sigma0, False, max_vertices=4, tag="Z0")}
                if verify_pullback_identity(d, "homology", L_cap=2, M_cap=2, seeds=seeds).passed:
                    hom_ok += 1
                else:
                    failures.append(("homology", k))
        return dim_ok, hom_ok, failures

    (dim_ok, hom_ok, failures), dt = _timed(run)
    ok = dim_ok >= 20 and hom_ok >= 5 and not failures
    _report(capsys, 6, ok, dt, 300, f"{dim_ok} squares at dimension level, {hom_ok} at homology level")


def test_criterion_07_functoriality(capsys):
    def run():
        rng = random.Random(7)
        checked = {k: 0 for k in ("s", "u", "s_star", "u_star")}
        bad = []
        for _ in range(20):
            for left, kinds in ((True, ("s", "u_star")), (False, ("u", "s_star"))):
                c1, c2 = composable_covers(rng, left)
                for kind in kinds:
                    f = induced_map(compose(c2, c1), kind)
                    g1, g2 = induced_map(c1, kind), induced_map(c2, kind)
                    g = hom_compose(g2, g1) if kind in ("s", "u") else hom_compose(g1, g2)
                    if hom_equal(f, g):
                        checked[kind] += 1
                    else:
                        bad.append(kind)
        return checked, bad

    (checked, bad), dt = _timed(run)
    ok = not bad and all(v >= 20 for v in checked.values())
    _report(capsys, 7, ok, dt, 60, f"pairs per kind {checked}")


def _d_squared_zero(dc) -> bool:
    for N in dc.degrees:
        if dc.total_rank(N - 2) == 0 or dc.total_rank(N) == 0:
            continue
        dd = dc.total_boundary(N - 1) @ dc.total_boundary(N)
        rel = Lattice(dc.total_rank(N - 2), dc.total_relations(N - 2))
        if not all(rel.contains(col) for col in dd.columns()):
            return False
    return True


def test_criterion_08_d_squared(capsys, H, pi, idH):
    # d∘d is computed in the reduced groups, where the relations W are zero
    def run():
        if not BUILT:
            # run on its own: rebuild the complexes criteria 4 and 5 use
            for pair in (SUPair.trivial(H), SUPair(pi, idH)):
                homology(pair, "s")
        complexes = list(BUILT)
        return len(complexes), sum(not _d_squared_zero(dc) for dc in complexes)

    (count, failures), dt = _timed(run)
    ok = count > 0 and failures == 0
    _report(capsys, 8, ok, dt, 60, f"{count} complexes from criteria 4-6, {failures} failures")


def test_criterion_09_refusal_and_theta(capsys, G, H, pi, idH, idG):
    def run():
        refused = None
        try:
            induced_on_homology(PairMorphism(SUPair(idH, pi), SUPair.trivial(H), idH, idH, pi), "s")
        except HypothesisFailure as exc:
            refused = exc.name
        t1 = PairMorphism(SUPair.trivial(G), SUPair(idH, pi), pi, pi, idG)
        t2 = PairMorphism(SUPair.trivial(G), SUPair.trivial(H), pi, pi, pi)
        r = verify_theta_naturality(t1, t2)
        return refused, r.conclusion.get("theta_prime")

    (refused, theta_prime), dt = _timed(run)
    ok = refused == "product map π_u × η_Z not 1-to-1" and theta_prime == "not constructible"
    _report(capsys, 9, ok, dt, 30, f"refused: {refused!r}; theta': {theta_prime}")


def test_criterion_10_injectivity_oracle(capsys):
    def run():
        corpus = code_corpus(seed=0, size=60)
        for c in corpus:
            for s in (c.source, c.target):
                assert len(s.graph.vertices) <= 3 and len(s.graph.edges) <= 6
        disagreements = sum(is_injective(c) != brute_force_injective(c) for c in corpus)
        return len(corpus), disagreements

    (n, disagreements), dt = _timed(run)
    _report(capsys, 10, disagreements == 0 and n >= 50, dt, 120, f"{n} codes, {disagreements} disagreements")


def test_first_square_via_report(pi, idH):
    # the same counterexample through the report interface
    r = verify_pullback_identity(SquareDiagram(pi, pi, idH, idH), "dimension")
    assert r.conclusion["s"]["left"] == [["2"]] and r.conclusion["s"]["right"] == [["1"]]
