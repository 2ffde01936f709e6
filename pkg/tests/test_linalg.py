from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from smalehom.linalg import (
    IntMatrix,
    Lattice,
    integer_kernel,
    rational_inverse,
    rational_nullspace,
    rational_rank,
    smith_invariants,
    smith_normal_form,
    unimodular_inverse,
)

small = st.integers(-6, 6)


@st.composite
def int_matrices(draw, max_dim=4):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    return IntMatrix([[draw(small) for _ in range(c)] for _ in range(r)], c)


def _sympy_invariants(m: IntMatrix) -> list[int]:
    d = sympy_snf(Matrix(m.tolist()), domain=ZZ)
    out = [abs(int(d[i, i])) for i in range(min(d.shape))]
    return [x for x in out if x]


def test_snf_known_example():
    m = IntMatrix([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert smith_invariants(m) == [2, 6, 12]


def test_snf_of_zero_and_identity():
    assert smith_invariants(IntMatrix.zeros(2, 3)) == []
    assert smith_invariants(IntMatrix.identity(3)) == [1, 1, 1]


@settings(max_examples=150, deadline=None)
@given(int_matrices())
def test_snf_matches_sympy(m):
    assert smith_invariants(m) == _sympy_invariants(m)


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_snf_transform_is_exact(m):
    D, U, V = smith_normal_form(m)
    assert U @ m @ V == D
    diag = [D[i, i] for i in range(min(D.shape)) if D[i, i]]
    assert all(b % a == 0 for a, b in zip(diag, diag[1:]))
    for i in range(D.rows):
        for j in range(D.cols):
            if i != j:
                assert D[i, j] == 0


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_rank_matches_sympy(m):
    assert rational_rank(m.tolist(), m.cols) == Matrix(m.tolist()).rank()


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_integer_kernel(m):
    ker = integer_kernel(m.tolist(), m.cols)
    assert len(ker) == m.cols - Matrix(m.tolist()).rank()
    for v in ker:
        assert m.apply(v) == [0] * m.rows


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_rational_nullspace(m):
    ns = rational_nullspace(m.tolist(), m.cols)
    assert len(ns) == m.cols - Matrix(m.tolist()).rank()
    for v in ns:
        assert all(sum(Fraction(a) * b for a, b in zip(row, v)) == 0 for row in m.tolist())


def test_unimodular_inverse():
    u = IntMatrix([[2, 1], [1, 1]])
    assert u @ unimodular_inverse(u) == IntMatrix.identity(2)


def test_rational_inverse():
    a = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
    inv = rational_inverse(a)
    assert inv == [[1, -1], [-1, 2]]


def test_lattice_membership_and_join():
    lat = Lattice(2, [[2, 0], [0, 3]])
    assert lat.contains([4, -3])
    assert not lat.contains([1, 0])
    assert lat.coordinates([2, 3]) is not None
    assert lat.join([[1, 0]]) == Lattice(2, [[1, 0], [0, 3]])


@settings(max_examples=80, deadline=None)
@given(st.lists(st.lists(small, min_size=3, max_size=3), max_size=4))
def test_lattice_contains_its_generators(gens):
    lat = Lattice(3, gens)
    for g in gens:
        assert lat.contains(g)
    assert lat.rank == Matrix(gens).rank() if gens else lat.rank == 0
