import random

import pytest

from conftest import FIXTURES, alg
from gored.exactfield import ExactMatrix, PrimeField
from gored.modules import (
    ModuleError, Module, ShortExactSequence, cokernel, corner_module, direct_sum, dual,
    dump_module, evaluation_map, hom_dim, image, injective, is_isomorphic, kernel,
    module_from_arrows, parse_module, projective, projective_cover, radical, random_base_change,
    random_module, regular, simple, star_dual, syzygy, top, top_dims,
)
from gored.presentation import ParseError, parse_presentation
from gored.algebra import algebra_basis


def _randoms(name, count, seed=0):
    A = alg(name)
    rng = random.Random(seed)
    return [random_module(A, rng) for _ in range(count)]


@pytest.mark.parametrize("name", FIXTURES)
def test_hom_from_projective_is_vertex_component(name):
    A = alg(name)
    mods = [simple(A, v) for v in range(A.n_vertices)] + _randoms(name, 15)
    for M in mods:
        M.validate()
        for v in range(A.n_vertices):
            assert hom_dim(projective(A, v), M) == M.dims[v]


@pytest.mark.parametrize("name", FIXTURES)
def test_regular_is_sum_of_projectives(name):
    A = alg(name)
    R = regular(A)
    assert R.n == A.dim
    assert R.dims == direct_sum([projective(A, v) for v in range(A.n_vertices)], A).dims


def test_projective_dims_ex46():
    A = alg("ex46")
    # from the basis listing: paths starting at each vertex
    assert [projective(A, v).n for v in range(4)] == [6, 3, 3, 2]
    assert projective(A, 0).dims == (1, 2, 1, 2)


def test_kernel_cokernel_sequences():
    A = alg("ex47")
    rng = random.Random(5)
    for _ in range(20):
        M = random_module(A, rng)
        P, eps = projective_cover(M)
        K, inc = kernel(eps)
        C, proj = cokernel(inc)
        assert ShortExactSequence(K, P, C, inc, proj).verify()
        I, _ = image(eps)
        assert I.n == M.n
        assert top_dims(P) == top_dims(M)


def test_syzygy_sits_in_radical():
    for M in _randoms("ex46", 20, seed=2):
        P, eps = projective_cover(M)
        K, inc = kernel(eps)
        _, to_top = top(P)
        # minimal cover: the kernel maps to zero in top(P)
        assert (to_top @ inc).is_zero()
        assert syzygy(M).dims == K.dims
        assert radical(P)[0].n >= K.n


@pytest.mark.parametrize("name", ["ex46", "ex47C", "loop-x3"])
def test_dual_is_duality_on_hom(name):
    mods = _randoms(name, 6, seed=9)
    for M in mods:
        for N in mods:
            assert hom_dim(M, N) == hom_dim(dual(N), dual(M))
        assert dual(dual(M)).dims == M.dims


def test_injective_is_dual_projective():
    A = alg("ex46")
    for v in range(4):
        assert injective(A, v).n == projective(A.opposite(), v).n


def test_isomorphism_certificates():
    A = alg("ex47")
    rng = random.Random(1)
    for _ in range(10):
        M = random_module(A, rng)
        N, g = random_base_change(M, rng)
        res = is_isomorphic(M, N, seed=4)
        assert res.status == "yes"
        res.morphism.validate()
        assert res.morphism.is_iso()
    S = [simple(A, v) for v in range(A.n_vertices)]
    assert is_isomorphic(S[0], S[1]).status == "no"
    assert is_isomorphic(S[0], direct_sum([S[0]], A)).status == "yes"


def test_iso_exhaustive_over_prime_field():
    text = "field GF(3)\nvertex 1\narrow x: 1 -> 1\nrelation x*x*x\n"
    A = algebra_basis(parse_presentation(text))
    J2 = module_from_arrows(A, [2], {"x": [[0, 0], [1, 0]]})
    S2 = module_from_arrows(A, [2], {"x": [[0, 0], [0, 0]]})
    assert A.field == PrimeField(3)
    assert is_isomorphic(J2, S2).status == "no"
    assert is_isomorphic(J2, module_from_arrows(A, [2], {"x": [[0, 0], [2, 0]]})).status == "yes"


def test_relations_checked_on_load():
    A = alg("loop-x2")
    with pytest.raises(ModuleError):
        module_from_arrows(A, [2], {"x": [[1, 0], [0, 1]]})
    with pytest.raises(ModuleError):
        module_from_arrows(A, [2], {"x": [[0, 1]]})


def test_invalid_blocks_rejected():
    A = alg("loop-x3")
    # x acting by 1 violates x^3 = 0
    bad = {b: ExactMatrix.identity(A.field, 1) for b in A.radical}
    with pytest.raises(ModuleError):
        Module(A, [1], bad)


def test_module_file_round_trip():
    A = alg("ex46")
    for M in _randoms("ex46", 5, seed=8):
        text = dump_module(M, "ex46.alg")
        _, N = parse_module(text, algebra=A)
        assert N.dims == M.dims
        assert all(N.block(b) == M.block(b) for b in A.radical)


def test_module_file_parse_errors():
    A = alg("ex46")
    with pytest.raises(ModuleError):
        parse_module("dim 9 = 1\n", algebra=A)
    with pytest.raises(ParseError):
        parse_module("dim 1 = 1\nnonsense\n", algebra=A)


def test_star_dual_of_S4():
    A = alg("ex46")
    S4 = simple(A, 3)
    D = star_dual(S4)
    D.validate()
    assert D.algebra is A.opposite()
    # from the basis listing, every P(v) has a one-dimensional socle, sitting at vertex 4
    assert D.dims == (1, 1, 1, 1)
    assert evaluation_map(S4).is_iso()


def test_star_dual_of_projective_is_projective():
    A = alg("ex47")
    for v in range(A.n_vertices):
        D = star_dual(projective(A, v))
        assert D.n == projective(A.opposite(), v).n
        assert evaluation_map(projective(A, v)).is_iso()


@pytest.mark.parametrize("name", ["ex46", "ex47C"])
def test_corner_module_dimension(name):
    A = alg(name)
    C = A.corner((0,))
    for M in _randoms(name, 8, seed=3):
        assert corner_module(M, C).n == M.dims[0]
