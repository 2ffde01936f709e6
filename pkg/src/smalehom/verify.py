"""Mechanical checks of the functoriality results on concrete diagrams.

Every report has the shape ``{"hypotheses": {...}, "conclusion": {...},
"witnesses": [...]}``; ``Report.passed`` says whether all hypotheses hold
and the conclusion was confirmed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .complexes import (
    DEFAULT_L_CAP,
    DEFAULT_M_CAP,
    DoubleComplex,
    HomologyResult,
    PairMorphism,
    PairSigma,
    SUPair,
    build_sigma,
    chain_map,
    check_product_conjugacy,
    homology_of_complex,
    induced_on_homology,
    sigma_map,
)
from .dimension import (
    DEFAULT_RECODING_CAP,
    LimitHom,
    RationalMap,
    hom_compose,
    hom_equal,
    induced_map,
    rationalized,
)
from .errors import HypothesisFailure, NotConstantToOne
from .graph_core import adjacency_matrix
from .linalg import rational_inverse
from .sft import (
    SFT,
    BlockCode,
    MultiFibre,
    code_equal,
    compose,
    degree,
    fibre_count,
    identity_code,
    is_conjugacy,
    is_injective,
    is_s_bijective,
    is_surjective,
    is_u_bijective,
    periodic_points,
    shift_code,
)

DEFAULT_PERIOD_CAP = 6

TripleData = PairMorphism


@dataclass
class Report:
    hypotheses: dict = field(default_factory=dict)
    conclusion: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)

    @property
    def hypotheses_hold(self) -> bool:
        return all(v is True for v in self.hypotheses.values())

    @property
    def passed(self) -> bool:
        return self.hypotheses_hold and self.conclusion.get("holds") is True

    def to_json(self) -> dict:
        return {"hypotheses": self.hypotheses, "conclusion": self.conclusion, "witnesses": self.witnesses}


def _verdict(test: Callable[[BlockCode], bool], c: BlockCode):
    """A decision procedure's answer, or the name of the failed precondition."""
    try:
        return test(c)
    except HypothesisFailure as exc:
        return exc.name


def _qstr(m: RationalMap) -> list[list[str]]:
    return [[str(x) for x in row] for row in m.tolist()]


# ---------------------------------------------------------------------------
# Squares


@dataclass(frozen=True, eq=False)
class SquareDiagram:
    """``Sigma --eta1--> Sigma1 --pi1--> Sigma0`` and ``Sigma --eta2--> Sigma2 --pi2--> Sigma0``."""

    eta1: BlockCode
    eta2: BlockCode
    pi1: BlockCode
    pi2: BlockCode

    def __post_init__(self) -> None:
        if self.eta1.source != self.eta2.source:
            raise HypothesisFailure("square commutes", "eta1 and eta2 have different sources")
        if self.eta1.target != self.pi1.source or self.eta2.target != self.pi2.source:
            raise HypothesisFailure("square commutes", "maps are not composable")
        if self.pi1.target != self.pi2.target:
            raise HypothesisFailure("square commutes", "pi1 and pi2 have different targets")
        if not code_equal(compose(self.pi1, self.eta1), compose(self.pi2, self.eta2)):
            raise HypothesisFailure("square commutes", "pi1∘eta1 ≠ pi2∘eta2")

    @property
    def Sigma(self) -> SFT:
        return self.eta1.source

    @property
    def Sigma1(self) -> SFT:
        return self.eta1.target

    @property
    def Sigma2(self) -> SFT:
        return self.eta2.target

    @property
    def Sigma0(self) -> SFT:
        return self.pi1.target

    def product_map(self) -> BlockCode:
        """``eta2 × eta1`` into the fibre product of ``pi2`` and ``pi1``."""
        return MultiFibre([self.pi2, self.pi1]).lift([self.eta2, self.eta1])


def completed_square(pi1: BlockCode, pi2: BlockCode) -> SquareDiagram:
    """The square with Sigma replaced by the fibre product of ``pi2`` and ``pi1``."""
    mf = MultiFibre([pi2, pi1])
    return SquareDiagram(mf.projection(1), mf.projection(0), pi1, pi2)


def _singleton_fibre(p: BlockCode, period_cap: int):
    for n in range(1, period_cap + 1):
        for x in periodic_points(p.target, n):
            word = x.left_cycle
            if fibre_count(p, word) == 1:
                return list(word)
    return None


def check_square(d: SquareDiagram, period_cap: int = DEFAULT_PERIOD_CAP) -> Report:
    """Hypotheses of the pullback identity and the status of ``eta2 × eta1``."""
    r = Report()
    r.hypotheses["commutes"] = True
    r.hypotheses["eta1 s-bijective"] = _verdict(is_s_bijective, d.eta1)
    r.hypotheses["pi2 s-bijective"] = _verdict(is_s_bijective, d.pi2)
    r.hypotheses["eta2 u-bijective"] = _verdict(is_u_bijective, d.eta2)
    r.hypotheses["pi1 u-bijective"] = _verdict(is_u_bijective, d.pi1)
    p = d.product_map()
    onto = is_surjective(p)
    conj = onto and is_injective(p)
    r.hypotheses["eta2 × eta1 conjugacy"] = conj
    r.conclusion["onto"] = onto
    r.conclusion["conjugacy"] = conj
    r.conclusion["degree"] = None
    if onto:
        try:
            r.conclusion["degree"] = degree(p)
        except (HypothesisFailure, NotConstantToOne) as exc:
            r.witnesses.append({"degree": str(exc)})
        single = _singleton_fibre(p, period_cap)
        if single is not None:
            r.conclusion["singleton_fibre_criterion"] = "conjugacy"
            r.witnesses.append({"singleton_fibre_over": single})
        else:
            r.conclusion["singleton_fibre_criterion"] = "inconclusive"
    r.conclusion["holds"] = conj
    return r


# ---------------------------------------------------------------------------
# The pullback identity on dimension groups


def _safe_induced(c: BlockCode, kind: str, cap: int, notes: dict, label: str) -> LimitHom:
    try:
        return induced_map(c, kind, cap, check=True)
    except HypothesisFailure as exc:
        notes[label] = exc.name
        return induced_map(c, kind, cap, check=False)


def dimension_composites(d: SquareDiagram, side: str = "s", recoding_cap: int = DEFAULT_RECODING_CAP):
    """Both sides of the pullback identity on D^s (or D^u), plus hypothesis notes."""
    notes: dict = {}
    if side == "s":
        left = hom_compose(
            _safe_induced(d.eta1, "s", recoding_cap, notes, "eta1^s"),
            _safe_induced(d.eta2, "s_star", recoding_cap, notes, "eta2^s*"),
        )
        right = hom_compose(
            _safe_induced(d.pi1, "s_star", recoding_cap, notes, "pi1^s*"),
            _safe_induced(d.pi2, "s", recoding_cap, notes, "pi2^s"),
        )
    else:
        left = hom_compose(
            _safe_induced(d.eta2, "u", recoding_cap, notes, "eta2^u"),
            _safe_induced(d.eta1, "u_star", recoding_cap, notes, "eta1^u*"),
        )
        right = hom_compose(
            _safe_induced(d.pi2, "u_star", recoding_cap, notes, "pi2^u*"),
            _safe_induced(d.pi1, "u", recoding_cap, notes, "pi1^u"),
        )
    return left, right, notes


def verify_pullback_identity(
    d: SquareDiagram,
    level: str = "dimension",
    recoding_cap: int = DEFAULT_RECODING_CAP,
    L_cap: int = DEFAULT_L_CAP,
    M_cap: int = DEFAULT_M_CAP,
    period_cap: int = DEFAULT_PERIOD_CAP,
    seeds: dict | None = None,
) -> Report:
    """Compare ``eta1^s∘eta2^s*`` with ``pi1^s*∘pi2^s`` (and the u-side mirror).

    Runs even when the hypotheses fail, so that counterexamples show the
    two composites side by side.  ``seeds`` are passed to
    :func:`build_pullback_cube` for the homology level.
    """
    if level not in ("dimension", "homology"):
        raise ValueError("level must be 'dimension' or 'homology'")
    sq = check_square(d, period_cap)
    r = Report(hypotheses=dict(sq.hypotheses), witnesses=list(sq.witnesses))
    holds = True
    if level == "dimension":
        for side in ("s", "u"):
            left, right, notes = dimension_composites(d, side, recoding_cap)
            same = hom_equal(left, right)
            holds = holds and same
            r.conclusion[side] = {
                "holds": same,
                "left": _qstr(rationalized(left)),
                "right": _qstr(rationalized(right)),
                "left_matrix": left.to_json(),
                "right_matrix": right.to_json(),
            }
            if notes:
                r.witnesses.append({f"{side}-side induced-map preconditions": notes})
    else:
        cube = build_pullback_cube(d, recoding_cap=recoding_cap, **(seeds or {}))
        hc = cube.homology_composites(L_cap, M_cap, recoding_cap)
        per = {}
        for N in sorted(hc["left"]):
            left, right = hc["left"][N], hc["right"][N]
            same = left.entries == right.entries
            holds = holds and same
            per[str(N)] = {"holds": same, "left": _qstr(left), "right": _qstr(right)}
        r.conclusion["degrees"] = per
        r.conclusion["truncated"] = hc["truncated"]
    r.conclusion["holds"] = holds
    return r


# ---------------------------------------------------------------------------
# The pullback cube


@dataclass(eq=False)
class PullbackCube:
    """Pairs over the four corners of a square and the morphisms between them."""

    square: SquareDiagram
    rho: SUPair
    rho0: SUPair
    rho1: SUPair
    rho2: SUPair
    eta1: PairMorphism
    eta2: PairMorphism
    pi1: PairMorphism
    pi2: PairMorphism
    lemma_checks: dict

    def homology_composites(self, L_cap: int = DEFAULT_L_CAP, M_cap: int = DEFAULT_M_CAP,
                            recoding_cap: int = DEFAULT_RECODING_CAP) -> dict:
        """Per-degree ``eta1^s∘eta2^s*`` and ``pi1^s*∘pi2^s`` from H(rho2) to H(rho1)."""
        sig = {k: build_sigma(p, L_cap, M_cap, recoding_cap)
               for k, p in (("rho", self.rho), ("rho0", self.rho0), ("rho1", self.rho1), ("rho2", self.rho2))}
        hom = {k: homology_of_complex(DoubleComplex(s, recoding_cap)) for k, s in sig.items()}
        e1 = _pair_chain(sig["rho"], sig["rho1"], hom["rho"], hom["rho1"], self.eta1, "s", recoding_cap)
        e2 = _pair_chain(sig["rho"], sig["rho2"], hom["rho"], hom["rho2"], self.eta2, "s_star", recoding_cap)
        p1 = _pair_chain(sig["rho1"], sig["rho0"], hom["rho1"], hom["rho0"], self.pi1, "s_star", recoding_cap)
        p2 = _pair_chain(sig["rho2"], sig["rho0"], hom["rho2"], hom["rho0"], self.pi2, "s", recoding_cap)
        left, right = {}, {}
        degrees = set(hom["rho1"].complex.degrees) | set(hom["rho2"].complex.degrees)
        for N in sorted(degrees):
            left[N] = e1.on_homology(N) @ e2.on_homology(N)
            right[N] = p1.on_homology(N) @ p2.on_homology(N)
        truncated = any(h.truncated for h in hom.values())
        return {"left": left, "right": right, "truncated": truncated, "homology": hom}


def _pair_chain(sc_src: PairSigma, sc_tgt: PairSigma, h_src: HomologyResult, h_tgt: HomologyResult,
                eta: PairMorphism, kind: str, recoding_cap: int):
    cell_maps = {}
    for c in sc_src.cells():
        if c not in h_tgt.complex.cells:
            continue
        code = sigma_map(sc_src, sc_tgt, *c, eta.eta_Y, eta.eta_Z)
        cell_maps[c] = induced_map(code, kind, recoding_cap, check=False)
    if kind in ("s", "u"):
        return chain_map(h_src, h_tgt, cell_maps)
    return chain_map(h_tgt, h_src, cell_maps)


def build_pullback_cube(
    d: SquareDiagram,
    Y0: BlockCode | None = None,
    Z0: BlockCode | None = None,
    Y2_seed: BlockCode | None = None,
    Z1_seed: BlockCode | None = None,
    recoding_cap: int = DEFAULT_RECODING_CAP,
) -> PullbackCube:
    """Pairs over Sigma0, Sigma1, Sigma2 and Sigma compatible with the square.

    ``Y0`` (s-bijective) and ``Z0`` (u-bijective) map onto Sigma0;
    ``Y2_seed`` maps s-bijectively onto Sigma2 and ``Z1_seed``
    u-bijectively onto Sigma1.  All default to identities.  The top
    spaces are iterated fibre products, e.g. Y is the set of
    ``(y0, y~2, x)`` with matching images.
    """
    X0, X1, X2 = d.Sigma0, d.Sigma1, d.Sigma2
    Y0 = Y0 or identity_code(X0)
    Z0 = Z0 or identity_code(X0)
    Y2_seed = Y2_seed or identity_code(X2)
    Z1_seed = Z1_seed or identity_code(X1)
    for code, test, name in ((Y0, is_s_bijective, "Y0 seed s-bijective"), (Z0, is_u_bijective, "Z0 seed u-bijective"),
                             (Y2_seed, is_s_bijective, "Y2 seed s-bijective"),
                             (Z1_seed, is_u_bijective, "Z1 seed u-bijective")):
        if _verdict(test, code) is not True:
            raise HypothesisFailure(name)

    # Y side
    fy1 = MultiFibre([Y0, d.pi1], "Y1")
    rho1_Y, piY1 = fy1.projection(1), fy1.projection(0)
    fy2 = MultiFibre([Y0, compose(d.pi2, Y2_seed)], "Y2")
    rho2_Y, piY2 = compose(Y2_seed, fy2.projection(1)), fy2.projection(0)
    fw = MultiFibre([Y2_seed, d.eta2], "W")
    w_to_x0 = compose(d.pi2, compose(d.eta2, fw.projection(1)))
    fy = MultiFibre([Y0, w_to_x0], "Y")
    y_y0 = fy.projection(0)
    y_w = fy.projection(1)
    y_ytil = compose(fw.projection(0), y_w)
    y_x = compose(fw.projection(1), y_w)
    etaY2 = fy2.lift([y_y0, y_ytil])
    etaY1 = fy1.lift([y_y0, compose(d.eta1, y_x)])

    # Z side
    fz2 = MultiFibre([Z0, d.pi2], "Z2")
    rho2_Z, piZ2 = fz2.projection(1), fz2.projection(0)
    fz1 = MultiFibre([Z0, compose(d.pi1, Z1_seed)], "Z1")
    rho1_Z, piZ1 = compose(Z1_seed, fz1.projection(1)), fz1.projection(0)
    fv = MultiFibre([Z1_seed, d.eta1], "V")
    v_to_x0 = compose(d.pi1, compose(d.eta1, fv.projection(1)))
    fz = MultiFibre([Z0, v_to_x0], "Z")
    z_z0 = fz.projection(0)
    z_v = fz.projection(1)
    z_ztil = compose(fv.projection(0), z_v)
    z_x = compose(fv.projection(1), z_v)
    etaZ1 = fz1.lift([z_z0, z_ztil])
    etaZ2 = fz2.lift([z_z0, compose(d.eta2, z_x)])

    rho = SUPair(y_x, z_x, "rho")
    rho0 = SUPair(Y0, Z0, "rho0")
    rho1 = SUPair(rho1_Y, rho1_Z, "rho1")
    rho2 = SUPair(rho2_Y, rho2_Z, "rho2")
    checks = {
        "Y1 -> X1 s-bijective": _verdict(is_s_bijective, rho1_Y),
        "Y1 -> Y0 u-bijective": _verdict(is_u_bijective, piY1),
        "Y2 -> X2 s-bijective": _verdict(is_s_bijective, rho2_Y),
        "Y2 -> Y0 s-bijective": _verdict(is_s_bijective, piY2),
        "Y -> X s-bijective": _verdict(is_s_bijective, y_x),
        "Y -> Y1 s-bijective": _verdict(is_s_bijective, etaY1),
        "Y -> Y2 u-bijective": _verdict(is_u_bijective, etaY2),
        "Z2 -> X2 u-bijective": _verdict(is_u_bijective, rho2_Z),
        "Z2 -> Z0 s-bijective": _verdict(is_s_bijective, piZ2),
        "Z1 -> X1 u-bijective": _verdict(is_u_bijective, rho1_Z),
        "Z1 -> Z0 u-bijective": _verdict(is_u_bijective, piZ1),
        "Z -> X u-bijective": _verdict(is_u_bijective, z_x),
        "Z -> Z1 s-bijective": _verdict(is_s_bijective, etaZ1),
        "Z -> Z2 u-bijective": _verdict(is_u_bijective, etaZ2),
    }
    return PullbackCube(
        d, rho, rho0, rho1, rho2,
        PairMorphism(rho, rho1, d.eta1, etaY1, etaZ1),
        PairMorphism(rho, rho2, d.eta2, etaY2, etaZ2),
        PairMorphism(rho1, rho0, d.pi1, piY1, piZ1),
        PairMorphism(rho2, rho0, d.pi2, piY2, piZ2),
        checks,
    )


def build_sigma_cube(cube: PullbackCube, L_cap: int = 1, M_cap: int = 1,
                     recoding_cap: int = DEFAULT_RECODING_CAP) -> Report:
    """Check that each grid cell of the cube forms a square whose product map is a conjugacy."""
    sig = {k: build_sigma(p, L_cap, M_cap, recoding_cap)
           for k, p in (("rho", cube.rho), ("rho0", cube.rho0), ("rho1", cube.rho1), ("rho2", cube.rho2))}
    r = Report()
    r.hypotheses.update({k: v for k, v in cube.lemma_checks.items()})
    cells = {}
    ok = True
    for c in sig["rho"].cells():
        if any(c not in s.cells() for s in sig.values()):
            continue
        if sig["rho"].sft(*c).is_empty:
            r.witnesses.append({"cell": list(c), "note": "empty grid cell; passes vacuously"})
            continue
        e1 = sigma_map(sig["rho"], sig["rho1"], *c, cube.eta1.eta_Y, cube.eta1.eta_Z)
        e2 = sigma_map(sig["rho"], sig["rho2"], *c, cube.eta2.eta_Y, cube.eta2.eta_Z)
        p1 = sigma_map(sig["rho1"], sig["rho0"], *c, cube.pi1.eta_Y, cube.pi1.eta_Z)
        p2 = sigma_map(sig["rho2"], sig["rho0"], *c, cube.pi2.eta_Y, cube.pi2.eta_Z)
        sq = check_square(SquareDiagram(e1, e2, p1, p2))
        cells[f"{c[0]},{c[1]}"] = sq.to_json()
        good = sq.hypotheses_hold and sq.conclusion["conjugacy"]
        if not good:
            failed = [k for k, v in sq.hypotheses.items() if v is not True]
            r.witnesses.append({"cell": list(c), "failed": failed})
        ok = ok and good
    r.conclusion = {"holds": ok, "cells": cells}
    return r


# ---------------------------------------------------------------------------
# Compatible pairs and naturality of the comparison isomorphism


def construct_compatible_pairs(eta_X: BlockCode, direction: str = "s", seed: BlockCode | None = None) -> PairMorphism:
    """A morphism of pairs over ``eta_X`` satisfying the hypothesis of its case.

    Direction ``s``: Y = Y' = X with ``pi_s = id``, ``pi'_s = eta_X``;
    ``seed`` is ``pi'_u`` (default the identity of X'), and Z is the fibre
    product of ``seed`` and ``eta_X``.  Direction ``u`` is the mirror image.
    """
    if direction not in ("s", "u"):
        raise ValueError("direction must be 's' or 'u'")
    test = is_s_bijective if direction == "s" else is_u_bijective
    if _verdict(test, eta_X) is not True:
        raise HypothesisFailure(f"eta_X is {direction}-bijective")
    X, Xp = eta_X.source, eta_X.target
    seed = seed or identity_code(Xp)
    idX = identity_code(X)
    mf = MultiFibre([seed, eta_X])
    p1, p2 = mf.projection(0), mf.projection(1)
    if direction == "s":
        src = SUPair(idX, p2)
        tgt = SUPair(eta_X, seed)
        t = PairMorphism(src, tgt, eta_X, idX, p1)
        check_product_conjugacy(src.pi_u, t.eta_Z, eta_X, tgt.pi_u, "π_u × η_Z")
    else:
        src = SUPair(p2, idX)
        tgt = SUPair(seed, eta_X)
        t = PairMorphism(src, tgt, eta_X, p1, idX)
        check_product_conjugacy(src.pi_s, t.eta_Y, eta_X, tgt.pi_s, "π_s × η_Y")
    return t


def _theta(a: SUPair, b: SUPair, L_cap: int, M_cap: int, recoding_cap: int) -> dict:
    """Comparison map H(a) → H(b) for pairs sharing the Y leg, through the fibre product of the Z legs."""
    if a.pi_s is not b.pi_s and not code_equal(a.pi_s, b.pi_s):
        raise HypothesisFailure("pairs share pi_s")
    mf = MultiFibre([a.pi_u, b.pi_u], "Zhat")
    p1, p2 = mf.projection(0), mf.projection(1)
    hat = SUPair(a.pi_s, compose(a.pi_u, p1), "hat")
    idX, idY = identity_code(a.X), identity_code(a.Y)
    phi1 = induced_on_homology(PairMorphism(hat, a, idX, idY, p1), "u", L_cap, M_cap, recoding_cap)
    phi2 = induced_on_homology(PairMorphism(hat, b, idX, idY, p2), "u", L_cap, M_cap, recoding_cap)
    out = {}
    for N, f1 in phi1.maps.items():
        f2 = phi2.maps[N]
        if f2.rows != f2.cols:
            raise HypothesisFailure("comparison map is an isomorphism", f"degree {N}")
        if f2.rows == 0:
            out[N] = RationalMap(0, f1.cols, ())
            continue
        inv = rational_inverse(f2.tolist())
        out[N] = RationalMap(f2.cols, f2.rows, tuple(tuple(r) for r in inv)) @ f1
    return out


def verify_theta_naturality(
    t1: PairMorphism,
    t2: PairMorphism,
    L_cap: int = DEFAULT_L_CAP,
    M_cap: int = DEFAULT_M_CAP,
    recoding_cap: int = DEFAULT_RECODING_CAP,
) -> Report:
    """Check ``Theta' ∘ eta^s = eta~^s ∘ Theta`` on rationalized homology.

    Theta compares the source pairs of ``t1`` and ``t2`` and Theta' their
    target pairs; both must share the Y leg.
    """
    r = Report()
    if not code_equal(t1.eta_X, t2.eta_X):
        r.hypotheses["triples share eta_X"] = False
        r.conclusion = {"holds": False, "theta": "not constructed"}
        return r
    r.hypotheses["triples share eta_X"] = True
    for label, t in (("t1", t1), ("t2", t2)):
        try:
            check_product_conjugacy(t.source.pi_u, t.eta_Z, t.eta_X, t.target.pi_u, "π_u × η_Z")
            r.hypotheses[f"{label}: π_u × η_Z conjugacy"] = True
        except HypothesisFailure as exc:
            r.hypotheses[f"{label}: π_u × η_Z conjugacy"] = False
            r.witnesses.append({label: exc.name})
    if not r.hypotheses_hold:
        r.conclusion = {"holds": False, "theta_prime": "not constructible"}
        return r
    eta = induced_on_homology(t1, "s", L_cap, M_cap, recoding_cap).maps
    eta_t = induced_on_homology(t2, "s", L_cap, M_cap, recoding_cap).maps
    theta = _theta(t1.source, t2.source, L_cap, M_cap, recoding_cap)
    theta_p = _theta(t1.target, t2.target, L_cap, M_cap, recoding_cap)
    holds = True
    per = {}
    for N in sorted(set(eta) | set(theta_p)):
        if N not in eta or N not in theta_p or N not in theta or N not in eta_t:
            continue
        lhs = theta_p[N] @ eta[N]
        rhs = eta_t[N] @ theta[N]
        same = lhs.entries == rhs.entries
        holds = holds and same
        per[str(N)] = {"holds": same, "left": _qstr(lhs), "right": _qstr(rhs)}
    r.conclusion = {"holds": holds, "degrees": per}
    return r


# ---------------------------------------------------------------------------
# Automorphisms


def _power(c: BlockCode, n: int) -> BlockCode:
    out = identity_code(c.source)
    for _ in range(n):
        out = compose(c, out)
    return out


def shift_triple(pair: SUPair) -> PairMorphism:
    return PairMorphism(pair, pair, shift_code(pair.X), shift_code(pair.Y), shift_code(pair.Z))


def automorphism_suite(
    pair: SUPair,
    alpha: PairMorphism | None = None,
    n_max: int = 3,
    L_cap: int = DEFAULT_L_CAP,
    M_cap: int = DEFAULT_M_CAP,
    recoding_cap: int = DEFAULT_RECODING_CAP,
) -> Report:
    """Conjugacy checks for an automorphism triple and ``(alpha^n)^s = (alpha^s)^n``.

    With the default shift triple, traces of the induced maps on each
    degree are listed next to the periodic point counts ``tr(A^n)``.
    """
    alpha = alpha or shift_triple(pair)
    r = Report()
    for name, c in (("alpha_X", alpha.eta_X), ("alpha_Y", alpha.eta_Y), ("alpha_Z", alpha.eta_Z)):
        r.hypotheses[f"{name} conjugacy"] = is_conjugacy(c)
    for label, args in (("π_u × α_Z", (pair.pi_u, alpha.eta_Z, alpha.eta_X, pair.pi_u)),
                        ("π_s × α_Y", (pair.pi_s, alpha.eta_Y, alpha.eta_X, pair.pi_s))):
        try:
            check_product_conjugacy(*args, label)
            r.hypotheses[f"{label} conjugacy"] = True
        except HypothesisFailure:
            r.hypotheses[f"{label} conjugacy"] = False
    if not r.hypotheses_hold:
        r.conclusion = {"holds": False}
        return r
    base = induced_on_homology(alpha, "s", L_cap, M_cap, recoding_cap).maps
    holds = True
    table = []
    a = adjacency_matrix(pair.X.graph)
    for n in range(1, n_max + 1):
        an = PairMorphism(pair, pair, _power(alpha.eta_X, n), _power(alpha.eta_Y, n), _power(alpha.eta_Z, n))
        maps = induced_on_homology(an, "s", L_cap, M_cap, recoding_cap).maps
        row = {"n": n, "periodic_points": _trace(a.power(n)), "traces": {}}
        for N, f in maps.items():
            same = f.entries == base[N].power(n).entries
            holds = holds and same
            row["traces"][str(N)] = str(f.trace())
        table.append(row)
    r.conclusion = {"holds": holds, "powers_checked": n_max}
    r.witnesses.append({"trace_table": table})
    return r


def _trace(m) -> int:
    return sum(m[i, i] for i in range(m.rows))
