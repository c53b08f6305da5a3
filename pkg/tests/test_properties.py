"""Seeded property suites over a shared corpus of 1000 random modules."""

import random
from functools import lru_cache

import pytest

from conftest import FIXTURES, alg, pres
from gored.gproj import gproj_test
from gored.homology import ext_dim, perp_test, resolution
from gored.modules import (
    ShortExactSequence, cokernel, corner_module, corner_morphism, dual, hom_space, image, kernel,
    projective_cover, random_base_change, random_module, syzygy,
)
from gored.reduction import Config, apply_step

CORPUS_SIZE = 1000
BOUND = 20

# corners admitted by a reduction step on the fixture, by vertex label
CORNERS = {"ex46": ["1", "4"], "ex47": ["1", "2", "4"], "ex47B": ["2", "4"]}


@lru_cache(maxsize=None)
def corpus():
    """Deterministic list of (fixture, module, partner) triples."""
    out = []
    for i in range(CORPUS_SIZE):
        name = FIXTURES[i % len(FIXTURES)]
        A = alg(name)
        rng = random.Random(1000 + i)
        M = random_module(A, rng, max_mult=2, max_relations=3)
        N = random_module(A, rng, max_mult=1, max_relations=2)
        out.append((name, M, N))
    return out


def test_corpus_shape():
    mods = corpus()
    assert len(mods) == CORPUS_SIZE
    assert {name for name, _, _ in mods} == set(FIXTURES)
    for _, M, N in mods:
        M.validate()
        N.validate()


def test_dimension_shift():
    for _, M, N in corpus():
        OM = syzygy(M)
        for j in range(1, 4):
            assert ext_dim(M, N, j + 1) == ext_dim(OM, N, j)


def test_ext_duality_oracle():
    """Resolution side over A against the dual side over the opposite algebra."""
    for i, (_, M, N) in enumerate(corpus()):
        jmax = 6 if i % 5 == 0 else 3
        DM, DN = dual(M), dual(N)
        for j in range(jmax + 1):
            assert ext_dim(M, N, j) == ext_dim(DN, DM, j)


def test_rank_nullity_on_random_maps():
    for i, (_, M, N) in enumerate(corpus()):
        H = hom_space(M, N)
        if H.dim == 0:
            continue
        rng = random.Random(i)
        phi = H.combination([rng.randint(-3, 3) for _ in range(H.dim)])
        phi.validate()
        K, _ = kernel(phi)
        I, _ = image(phi)
        C, _ = cokernel(phi)
        assert K.n + I.n == M.n
        assert I.n + C.n == N.n
        assert I.n == phi.rank()


def _corner(name):
    A = alg(name)
    return A.corner(tuple(A.vertex(v) for v in CORNERS[name]))


def test_corner_functor_is_exact():
    for i, (name, M, N) in enumerate(corpus()):
        if name not in CORNERS:
            continue
        C = _corner(name)
        sequences = []
        P, eps = projective_cover(M)
        K, inc = kernel(eps)
        sequences.append((inc, eps))
        H = hom_space(M, N)
        if H.dim:
            rng = random.Random(i)
            phi = H.combination([rng.randint(-3, 3) for _ in range(H.dim)])
            Kp, kinc = kernel(phi)
            Ip, _ = image(phi)
            _, proj = cokernel(kinc)
            sequences.append((kinc, proj))
        for f, g in sequences:
            ef, eg = corner_morphism(f, C), corner_morphism(g, C)
            assert ShortExactSequence(ef.source, ef.target, eg.target, ef, eg).verify()


@lru_cache(maxsize=None)
def _t_obs(name):
    """Observed degree recorded by the admitted corner step on the fixture."""
    _, step, _ = apply_step(pres(name), "IdempotentReduction", {"keep": CORNERS[name]},
                            Config(bound=BOUND))
    assert step.applied
    return step.t_obs


def test_corner_syzygy_keeps_perpendicularity():
    """Perpendicularity is never refuted after the corner functor and t_obs syzygies."""
    seen = 0
    for name, M, _ in corpus():
        if name not in CORNERS:
            continue
        if not perp_test(M, BOUND).yes:
            continue
        seen += 1
        X = syzygy(corner_module(M, _corner(name)), _t_obs(name))
        assert not perp_test(X, BOUND).no
    assert seen > 0


def test_corner_syzygy_keeps_gproj():
    """Certified Gproj modules are never refuted after the same construction."""
    seen = 0
    for name, M, _ in corpus():
        if name not in CORNERS:
            continue
        if not gproj_test(M, BOUND).certified:
            continue
        seen += 1
        X = syzygy(corner_module(M, _corner(name)), _t_obs(name))
        assert gproj_test(X, BOUND).kind != "not_gproj"
    assert seen > 0


def test_betti_invariance_under_base_change():
    for i, (_, M, _) in enumerate(corpus()):
        if i % 4:
            continue
        N, _ = random_base_change(M, random.Random(i))
        assert resolution(M).betti_numbers(3) == resolution(N).betti_numbers(3)


@pytest.mark.parametrize("name", sorted(CORNERS))
def test_corner_t_obs_small(name):
    assert _t_obs(name) <= 6
