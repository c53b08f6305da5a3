import pytest

from conftest import FIXTURES, alg, pres
from gored.algebra import (
    Bimodule, BasedAlgebra, algebra_basis, corner_algebra, quotient_map, recover_presentation,
    triangular_algebra,
)
from gored.modules import regular
from gored.presentation import format_poly, quotient_by_arrow


@pytest.mark.parametrize("name", FIXTURES)
def test_structure_constants_valid(name):
    A = alg(name)
    A.validate()
    assert A.dim == pres(name).dimension
    layers = A.loewy_layers()
    assert layers[0] == A.dim - A.n_vertices and layers[-1] == 0
    assert all(a > b for a, b in zip(layers, layers[1:]))


@pytest.mark.parametrize("name", FIXTURES)
def test_opposite_is_involution(name):
    A = alg(name)
    Aop = A.opposite()
    Aop.validate()
    assert Aop.opposite() is A
    for (i, j), prod in A.mult.items():
        assert Aop.mult.get((j, i)) == prod


@pytest.mark.parametrize("name", FIXTURES)
def test_corner_dimensions_add_up(name):
    A = alg(name)
    n = A.n_vertices
    for v in range(n):
        e = (v,)
        rest = tuple(w for w in range(n) if w != v)
        inside = len([b for b in range(A.dim) if A.grade[b] in {(s, t) for s in e for t in e}])
        mixed = len([b for b in range(A.dim)
                     if (A.grade[b][0] in e) != (A.grade[b][1] in e)])
        outside = A.dim - inside - mixed
        assert A.corner(e).dim == inside
        if rest:
            assert A.corner(rest).dim == outside


@pytest.mark.parametrize("name", FIXTURES)
def test_corner_at_all_vertices_is_whole_algebra(name):
    A = alg(name)
    C = A.corner(tuple(range(A.n_vertices)))
    assert C.dim == A.dim
    assert C.mult == A.mult


@pytest.mark.parametrize("name", FIXTURES)
def test_recover_presentation_round_trip(name):
    A = alg(name)
    B = algebra_basis(recover_presentation(A))
    assert B.dim == A.dim
    assert B.loewy_layers() == A.loewy_layers()
    assert {k: len(v) for k, v in B.by_grade.items()} == {k: len(v) for k, v in A.by_grade.items()}


def _relations(p):
    return sorted(format_poly(p.quiver, p.field, r) for r in p.relations)


def test_ex46_corner_presentation():
    C = alg("ex46").corner((0, 3))
    p = recover_presentation(C)
    assert C.dim == 5
    assert {(a.label, p.quiver.vertices[a.source], p.quiver.vertices[a.target])
            for a in p.quiver.arrows} == {("δ_γ", "1", "4"), ("ε", "4", "4")}
    assert _relations(p) == ["ε*ε"]


def test_ex47B_corner_presentation():
    A = alg("ex47B")
    p = recover_presentation(A.corner((A.vertex("2"), A.vertex("4"))))
    assert sorted(a.label for a in p.quiver.arrows) == ["α", "δ"]
    assert _relations(p) == ["α*α*α", "δ*α"]
    assert p.quiver == pres("ex47C").quiver


def test_corner_algebra_bimodules():
    A = alg("ex46")
    C, eA, Ae = corner_algebra(A, (0, 3))
    assert C.dim == 5
    # eA has the rows of A starting at the kept vertices
    assert eA.n == len([b for b in range(A.dim) if A.grade[b][0] in (0, 3)])
    assert Ae.n == len([b for b in range(A.dim) if A.grade[b][1] in (0, 3)])


def test_local_and_vertices():
    assert alg("loop-x3").is_local()
    assert not alg("ex46").is_local()
    assert alg("ex46").vertex("4") == 3
    with pytest.raises(Exception):
        alg("ex46").vertex("9")


def test_quotient_map_is_multiplicative():
    p = pres("ex48")
    A = alg("ex48")
    B = algebra_basis(quotient_by_arrow(p, "f2"))
    q = quotient_map(A, B, "f2")
    for (i, j), prod in A.mult.items():
        lhs = {}
        for k, c in prod.items():
            for m, d in q[k].items():
                lhs[m] = lhs.get(m, 0) + c * d
        rhs = B.product(q[i], q[j])
        assert {k: v for k, v in lhs.items() if v} == {k: v for k, v in rhs.items() if v}


def test_triangular_algebra():
    A = alg("loop-x2")
    # k[x]/x^2 is commutative, so left and right actions on itself agree
    R = regular(A)
    acts = {b: R.action(b) for b in range(A.dim)}
    T = triangular_algebra(A, A, Bimodule(R.n, acts, acts))
    T.validate()
    assert T.dim == 2 + 2 + 2
    assert T.n_vertices == 2
    assert T.triangular_parts[0] is A


def test_invalid_structure_constants_rejected():
    with pytest.raises(Exception):
        BasedAlgebra(alg("loop-x2").field, ["e", "x"], {(0, 0): {0: 1}, (1, 1): {1: 1}},
                     [0], ["1"], [(0, 0), (0, 0)])
