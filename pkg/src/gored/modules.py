"""Finite-dimensional left modules over a ``BasedAlgebra``.

A module is stored vertex by vertex: ``dims[v]`` is the dimension of ``e_v M``
and every radical basis element ``b`` of grade ``(t, s)`` acts by a
``dims[t] x dims[s]`` block. Idempotents act as the identity on their own
component, so they are never stored. Flat coordinates list the vertex
components in vertex order.
"""

from __future__ import annotations

import ast
import itertools
import random
import re
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Sequence

from .algebra import BasedAlgebra, algebra_basis
from .exactfield import Echelon, ExactMatrix, PrimeField
from .presentation import (
    ParseError, Path, Presentation, load_presentation, poly_terms,
)


class ModuleError(ValueError):
    pass


class AlgebraMismatch(ModuleError):
    pass


def _same_algebra(A: BasedAlgebra, B: BasedAlgebra) -> None:
    if A is not B and A != B:
        raise AlgebraMismatch("modules live over different algebras")


def _zeros(f, r, c):
    return ExactMatrix.zeros(f, r, c)


class Module:
    def __init__(self, algebra: BasedAlgebra, dims: Sequence[int], blocks: dict | None = None,
                 check: bool = True, name: str | None = None):
        self.algebra = algebra
        self.field = algebra.field
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != algebra.n_vertices or any(d < 0 for d in self.dims):
            raise ModuleError("dimension vector does not match the vertices")
        self.offsets = []
        acc = 0
        for d in self.dims:
            self.offsets.append(acc)
            acc += d
        self.n = acc
        self.name = name
        self.blocks: dict[int, ExactMatrix] = {}
        for b, m in (blocks or {}).items():
            t, s = algebra.grade[b]
            if b in algebra.idempotents:
                continue
            if m.shape != (self.dims[t], self.dims[s]):
                raise ModuleError(f"block for {algebra.labels[b]} has shape {m.shape}, "
                                  f"expected {(self.dims[t], self.dims[s])}")
            if self.dims[t] and self.dims[s] and not m.is_zero():
                self.blocks[b] = m
        if check:
            self.validate()

    def __repr__(self):
        tag = f" {self.name}" if self.name else ""
        return f"Module{tag}(dims={list(self.dims)})"

    @property
    def dimvec(self) -> tuple[int, ...]:
        return self.dims

    def is_zero(self) -> bool:
        return self.n == 0

    def block(self, b: int) -> ExactMatrix:
        m = self.blocks.get(b)
        if m is not None:
            return m
        t, s = self.algebra.grade[b]
        if b in self.algebra.idempotents:
            return ExactMatrix.identity(self.field, self.dims[t])
        return _zeros(self.field, self.dims[t], self.dims[s])

    def element_block(self, elem: dict, t: int, s: int) -> ExactMatrix:
        """Block of an algebra element supported in grade ``(t, s)``."""
        f = self.field
        out = [[0] * self.dims[s] for _ in range(self.dims[t])]
        for b, c in elem.items():
            if self.algebra.grade[b] != (t, s):
                raise ModuleError("element not homogeneous")
            m = self.block(b)
            for i in range(m.nrows):
                row, src = out[i], m.rows[i]
                for j, x in enumerate(src):
                    if x:
                        row[j] = f.norm(row[j] + c * x)
        return ExactMatrix._raw(f, self.dims[t], self.dims[s], out)

    def action(self, b: int) -> ExactMatrix:
        """Full ``n x n`` matrix of basis element ``b``."""
        t, s = self.algebra.grade[b]
        m = self.block(b)
        out = [[0] * self.n for _ in range(self.n)]
        ot, os_ = self.offsets[t], self.offsets[s]
        for i in range(m.nrows):
            for j in range(m.ncols):
                out[ot + i][os_ + j] = m.rows[i][j]
        return ExactMatrix._raw(self.field, self.n, self.n, out)

    def validate(self) -> None:
        A = self.algebra
        f = self.field
        for g in A.generators:
            tg, sg = A.grade[g]
            G = self.block(g)
            for b in A.radical:
                tb, sb = A.grade[b]
                if tb != sg or not self.dims[sb] or not self.dims[tg]:
                    continue
                lhs = G @ self.block(b)
                prod = A.basis_product(g, b)
                rhs = self.element_block(prod, tg, sb) if prod else _zeros(f, self.dims[tg], self.dims[sb])
                if lhs != rhs:
                    raise ModuleError(
                        f"action fails on {A.labels[g]} * {A.labels[b]}")

    # flat <-> per-vertex helpers
    def split(self, vec: Sequence) -> list[list]:
        return [list(vec[o:o + d]) for o, d in zip(self.offsets, self.dims)]

    def join(self, parts: Sequence[Sequence]) -> list:
        out = []
        for p in parts:
            out.extend(p)
        return out


def _flat_block(M: Module, blocks: Sequence[ExactMatrix], N: Module) -> ExactMatrix:
    out = [[0] * M.n for _ in range(N.n)]
    for v, m in enumerate(blocks):
        on, om = N.offsets[v], M.offsets[v]
        for i in range(m.nrows):
            for j in range(m.ncols):
                out[on + i][om + j] = m.rows[i][j]
    return ExactMatrix._raw(M.field, N.n, M.n, out)


class Morphism:
    """A module map given by one block ``dims_N[v] x dims_M[v]`` per vertex."""

    def __init__(self, source: Module, target: Module, blocks: Sequence[ExactMatrix],
                 check: bool = True):
        _same_algebra(source.algebra, target.algebra)
        self.source = source
        self.target = target
        self.blocks = list(blocks)
        if len(self.blocks) != len(source.dims):
            raise ModuleError("one block per vertex required")
        for v, m in enumerate(self.blocks):
            if m.shape != (target.dims[v], source.dims[v]):
                raise ModuleError("morphism block has the wrong shape")
        if check:
            self.validate()

    def __repr__(self):
        return f"Morphism({self.source!r} -> {self.target!r})"

    def validate(self) -> None:
        M, N = self.source, self.target
        A = M.algebra
        for g in A.generators:
            t, s = A.grade[g]
            if N.block(g) @ self.blocks[s] != self.blocks[t] @ M.block(g):
                raise ModuleError(f"map does not commute with {A.labels[g]}")

    @property
    def matrix(self) -> ExactMatrix:
        return _flat_block(self.source, self.blocks, self.target)

    def __matmul__(self, other: "Morphism") -> "Morphism":
        if other.target.dims != self.source.dims:
            raise ModuleError("morphisms not composable")
        return Morphism(other.source, self.target,
                        [a @ b for a, b in zip(self.blocks, other.blocks)], check=False)

    def __add__(self, other):
        return Morphism(self.source, self.target,
                        [a + b for a, b in zip(self.blocks, other.blocks)], check=False)

    def scale(self, c):
        return Morphism(self.source, self.target, [a.scale(c) for a in self.blocks], check=False)

    def rank(self) -> int:
        return sum(m.rank() for m in self.blocks)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.blocks)

    def is_injective(self) -> bool:
        return self.rank() == self.source.n

    def is_surjective(self) -> bool:
        return self.rank() == self.target.n

    def is_iso(self) -> bool:
        return self.source.dims == self.target.dims and self.is_injective()

    def inverse(self) -> "Morphism | None":
        if self.source.dims != self.target.dims:
            return None
        inv = []
        for m in self.blocks:
            x = m.inverse()
            if x is None:
                return None
            inv.append(x)
        return Morphism(self.target, self.source, inv, check=False)


def identity(M: Module) -> Morphism:
    return Morphism(M, M, [ExactMatrix.identity(M.field, d) for d in M.dims], check=False)


def zero_map(M: Module, N: Module) -> Morphism:
    return Morphism(M, N, [_zeros(M.field, N.dims[v], M.dims[v]) for v in range(len(M.dims))],
                    check=False)


@dataclass
class ShortExactSequence:
    left: Module
    middle: Module
    right: Module
    inc: Morphism
    proj: Morphism

    def verify(self) -> bool:
        if not self.inc.is_injective() or not self.proj.is_surjective():
            return False
        if not (self.proj @ self.inc).is_zero():
            return False
        return self.left.n + self.right.n == self.middle.n


# -- graded subspaces

class _Sub:
    """Per-vertex subspace bases with a 1 at a distinguished position in each vector."""

    def __init__(self, field, dims, bases, pivots):
        self.field = field
        self.dims = dims
        self.bases = bases      # bases[v]: list of dense vectors of length dims[v]
        self.pivots = pivots    # pivots[v][j]: position where bases[v][j] is 1, others 0

    @property
    def sub_dims(self):
        return [len(b) for b in self.bases]

    def coords(self, v, vec):
        return [vec[p] for p in self.pivots[v]]

    def contains(self, v, vec) -> bool:
        f = self.field
        c = self.coords(v, vec)
        for i in range(self.dims[v]):
            acc = 0
            for cj, bj in zip(c, self.bases[v]):
                if cj and bj[i]:
                    acc += cj * bj[i]
            if f.norm(acc - vec[i]) != 0:
                return False
        return True

    def residue(self, v, vec):
        """Reduce ``vec`` modulo the subspace (rows are in reduced echelon form)."""
        f = self.field
        out = list(vec)
        for p, b in zip(self.pivots[v], self.bases[v]):
            a = out[p]
            if a:
                for i, x in enumerate(b):
                    if x:
                        out[i] = f.norm(out[i] - a * x)
        return out

    def complement(self, v):
        piv = set(self.pivots[v])
        return [i for i in range(self.dims[v]) if i not in piv]


def _span(field, n, vectors) -> tuple[list, list]:
    ech = Echelon(field)
    for vec in vectors:
        ech.add({i: x for i, x in enumerate(vec) if x})
    basis, piv = [], []
    for p in sorted(ech.rows):
        row = ech.rows[p]
        basis.append([row.get(i, 0) for i in range(n)])
        piv.append(p)
    return basis, piv


def _null(m: ExactMatrix) -> tuple[list, list]:
    ech = Echelon(m.field)
    for r in m.rows:
        ech.add({i: x for i, x in enumerate(r) if x})
    free = [c for c in range(m.ncols) if c not in ech.rows]
    vecs = ech.kernel(m.ncols)
    return [[v.get(i, 0) for i in range(m.ncols)] for v in vecs], free


def _sub_module(M: Module, sub: _Sub, check: bool = False) -> tuple[Module, Morphism]:
    A = M.algebra
    f = M.field
    dims = sub.sub_dims
    blocks = {}
    for b in A.radical:
        t, s = A.grade[b]
        if not dims[t] or not dims[s]:
            continue
        B = M.block(b)
        cols = []
        for u in sub.bases[s]:
            w = B.apply(u)
            if check and not sub.contains(t, w):
                raise ModuleError("subspace is not a submodule")
            cols.append(sub.coords(t, w))
        blocks[b] = ExactMatrix.from_columns(f, dims[t], cols)
    K = Module(A, dims, blocks, check=False)
    inc = Morphism(K, M, [ExactMatrix.from_columns(f, M.dims[v], sub.bases[v])
                          if dims[v] else _zeros(f, M.dims[v], 0)
                          for v in range(len(dims))], check=False)
    return K, inc


def _quotient_module(M: Module, sub: _Sub) -> tuple[Module, Morphism]:
    A = M.algebra
    f = M.field
    comp = [sub.complement(v) for v in range(len(M.dims))]
    dims = [len(c) for c in comp]
    blocks = {}
    for b in A.radical:
        t, s = A.grade[b]
        if not dims[t] or not dims[s]:
            continue
        B = M.block(b)
        cols = []
        for i in comp[s]:
            w = [row[i] for row in B.rows]
            r = sub.residue(t, w)
            cols.append([r[k] for k in comp[t]])
        blocks[b] = ExactMatrix.from_columns(f, dims[t], cols)
    Q = Module(A, dims, blocks, check=False)
    pblocks = []
    for v in range(len(dims)):
        rows = []
        for k in comp[v]:
            row = [0] * M.dims[v]
            row[k] = 1
            for p, bvec in zip(sub.pivots[v], sub.bases[v]):
                if bvec[k]:
                    row[p] = f.norm(row[p] - bvec[k])
            rows.append(row)
        pblocks.append(ExactMatrix._raw(f, dims[v], M.dims[v], rows))
    return Q, Morphism(M, Q, pblocks, check=False)


def kernel(phi: Morphism) -> tuple[Module, Morphism]:
    M = phi.source
    bases, pivots = [], []
    for m in phi.blocks:
        b, p = _null(m)
        bases.append(b)
        pivots.append(p)
    return _sub_module(M, _Sub(M.field, M.dims, bases, pivots))


def _image_sub(phi: Morphism) -> _Sub:
    N = phi.target
    bases, pivots = [], []
    for v, m in enumerate(phi.blocks):
        b, p = _span(N.field, N.dims[v], m.columns())
        bases.append(b)
        pivots.append(p)
    return _Sub(N.field, N.dims, bases, pivots)


def image(phi: Morphism) -> tuple[Module, Morphism]:
    return _sub_module(phi.target, _image_sub(phi))


def cokernel(phi: Morphism) -> tuple[Module, Morphism]:
    return _quotient_module(phi.target, _image_sub(phi))


def _radical_sub(M: Module) -> _Sub:
    A = M.algebra
    cols: list[list] = [[] for _ in M.dims]
    for g in A.generators:
        t, s = A.grade[g]
        if M.dims[t] and M.dims[s]:
            cols[t].extend(M.block(g).columns())
    bases, pivots = [], []
    for v, d in enumerate(M.dims):
        b, p = _span(M.field, d, cols[v])
        bases.append(b)
        pivots.append(p)
    return _Sub(M.field, M.dims, bases, pivots)


def radical(M: Module) -> tuple[Module, Morphism]:
    return _sub_module(M, _radical_sub(M))


def top(M: Module) -> tuple[Module, Morphism]:
    return _quotient_module(M, _radical_sub(M))


def top_dims(M: Module) -> tuple[int, ...]:
    sub = _radical_sub(M)
    return tuple(d - len(b) for d, b in zip(M.dims, sub.bases))


def radical_layers(M: Module) -> list[tuple[int, ...]]:
    """Dimension vectors of rad^k M for k = 0, 1, ... until zero."""
    out = [M.dims]
    cur = M
    while cur.n:
        cur, _ = radical(cur)
        out.append(cur.dims)
        if len(out) > M.n + 2:
            break
    return out


# -- constructors

def _proj_layout(A: BasedAlgebra, v: int):
    cache = A.__dict__.setdefault("_proj_layout", {})
    if v not in cache:
        comp = [[] for _ in range(A.n_vertices)]
        for b in range(A.dim):
            t, s = A.grade[b]
            if s == v:
                comp[t].append(b)
        pos = {b: (A.grade[b][0], i) for t in range(A.n_vertices) for i, b in enumerate(comp[t])}
        cache[v] = (comp, pos)
    return cache[v]


def _check_vertex(A: BasedAlgebra, i) -> int:
    if isinstance(i, str):
        return A.vertex(i)
    if not isinstance(i, int) or not 0 <= i < A.n_vertices:
        raise ModuleError(f"bad vertex index {i!r}")
    return i


def projective(A: BasedAlgebra, i) -> Module:
    """``A e_i`` with the left regular action."""
    v = _check_vertex(A, i)
    cache = A.__dict__.setdefault("_projectives", {})
    if v in cache:
        return cache[v]
    f = A.field
    comp, pos = _proj_layout(A, v)
    dims = [len(c) for c in comp]
    blocks = {}
    for a in A.radical:
        t, s = A.grade[a]
        if not dims[t] or not dims[s]:
            continue
        rows = [[0] * dims[s] for _ in range(dims[t])]
        for j, b in enumerate(comp[s]):
            for k, c in A.basis_product(a, b).items():
                rows[pos[k][1]][j] = c
        blocks[a] = ExactMatrix._raw(f, dims[t], dims[s], rows)
    P = Module(A, dims, blocks, check=False, name=f"P({A.vertex_labels[v]})")
    P.projective_vertex = v
    cache[v] = P
    return P


def simple(A: BasedAlgebra, i) -> Module:
    v = _check_vertex(A, i)
    dims = [0] * A.n_vertices
    dims[v] = 1
    return Module(A, dims, {}, check=False, name=f"S({A.vertex_labels[v]})")


def dual(M: Module) -> Module:
    """``Hom_k(M, k)`` as a left module over the opposite algebra."""
    Aop = M.algebra.opposite()
    D = Module(Aop, M.dims, {b: m.T for b, m in M.blocks.items()}, check=False,
               name=f"D{M.name}" if M.name else None)
    return D


def injective(A: BasedAlgebra, i) -> Module:
    v = _check_vertex(A, i)
    I = dual(projective(A.opposite(), v))
    I.name = f"I({A.vertex_labels[v]})"
    return I


def direct_sum(mods: Sequence[Module], algebra: BasedAlgebra | None = None) -> Module:
    if not mods:
        if algebra is None:
            raise ModuleError("empty direct sum needs an algebra")
        return Module(algebra, [0] * algebra.n_vertices, {}, check=False)
    A = mods[0].algebra
    for m in mods[1:]:
        _same_algebra(A, m.algebra)
    f = A.field
    nv = A.n_vertices
    dims = [sum(m.dims[v] for m in mods) for v in range(nv)]
    blocks = {}
    for b in A.radical:
        t, s = A.grade[b]
        if not dims[t] or not dims[s]:
            continue
        rows = [[0] * dims[s] for _ in range(dims[t])]
        rt = cs = 0
        nonzero = False
        for m in mods:
            blk = m.blocks.get(b)
            if blk is not None:
                nonzero = True
                for i in range(blk.nrows):
                    rows[rt + i][cs:cs + blk.ncols] = blk.rows[i]
            rt += m.dims[t]
            cs += m.dims[s]
        if nonzero:
            blocks[b] = ExactMatrix._raw(f, dims[t], dims[s], rows)
    return Module(A, dims, blocks, check=False)


def summand_maps(mods: Sequence[Module], S: Module) -> tuple[list[Morphism], list[Morphism]]:
    """Inclusions and projections for ``S = direct_sum(mods)``."""
    f = S.field
    incs, projs = [], []
    offs = [0] * len(S.dims)
    for m in mods:
        ib, pb = [], []
        for v, d in enumerate(m.dims):
            I = [[0] * d for _ in range(S.dims[v])]
            P = [[0] * S.dims[v] for _ in range(d)]
            for k in range(d):
                I[offs[v] + k][k] = 1
                P[k][offs[v] + k] = 1
            ib.append(ExactMatrix._raw(f, S.dims[v], d, I))
            pb.append(ExactMatrix._raw(f, d, S.dims[v], P))
            offs[v] += d
        incs.append(Morphism(m, S, ib, check=False))
        projs.append(Morphism(S, m, pb, check=False))
    return incs, projs


def regular(A: BasedAlgebra) -> Module:
    """``A`` as a left module over itself."""
    cache = A.__dict__
    if "_regular" not in cache:
        R = direct_sum([projective(A, v) for v in range(A.n_vertices)])
        R.name = "A"
        cache["_regular"] = R
    return cache["_regular"]


def zero_module(A: BasedAlgebra) -> Module:
    return Module(A, [0] * A.n_vertices, {}, check=False, name="0")


# -- Hom spaces

class HomSpace:
    """Basis of Hom_A(M, N) with coordinates read off at fixed free entries."""

    def __init__(self, M: Module, N: Module):
        _same_algebra(M.algebra, N.algebra)
        self.source, self.target = M, N
        A = M.algebra
        f = M.field
        nv = len(M.dims)
        # unknown (v, i, j) is entry i, j of the block at vertex v
        self.offsets = []
        acc = 0
        for v in range(nv):
            self.offsets.append(acc)
            acc += N.dims[v] * M.dims[v]
        nvars = acc

        def var(v, i, j):
            return self.offsets[v] + i * M.dims[v] + j

        ech = Echelon(f)
        for g in A.generators:
            t, s = A.grade[g]
            if not N.dims[t] or not M.dims[s]:
                continue
            Ng, Mg = N.blocks.get(g), M.blocks.get(g)
            # (N(g) f_s - f_t M(g))[i][j] = 0
            for i in range(N.dims[t]):
                for j in range(M.dims[s]):
                    eq: dict = {}
                    if Ng is not None:
                        for k, x in enumerate(Ng.rows[i]):
                            if x:
                                key = var(s, k, j)
                                eq[key] = eq.get(key, 0) + x
                    if Mg is not None:
                        for k in range(M.dims[t]):
                            x = Mg.rows[k][j]
                            if x:
                                key = var(t, i, k)
                                eq[key] = eq.get(key, 0) - x
                    eq = {k: f.norm(x) for k, x in eq.items() if f.norm(x) != 0}
                    if eq:
                        ech.add(eq)
        self.free = [c for c in range(nvars) if c not in ech.rows]
        self._vectors = ech.kernel(nvars)
        self.nvars = nvars
        self._basis = None

    def __len__(self):
        return len(self.free)

    @property
    def dim(self) -> int:
        return len(self.free)

    def _to_morphism(self, vec: dict) -> Morphism:
        M, N = self.source, self.target
        f = M.field
        blocks = []
        for v in range(len(M.dims)):
            rows = [[0] * M.dims[v] for _ in range(N.dims[v])]
            base = self.offsets[v]
            for i in range(N.dims[v]):
                for j in range(M.dims[v]):
                    x = vec.get(base + i * M.dims[v] + j)
                    if x:
                        rows[i][j] = x
            blocks.append(ExactMatrix._raw(f, N.dims[v], M.dims[v], rows))
        return Morphism(M, N, blocks, check=False)

    @property
    def basis(self) -> list[Morphism]:
        if self._basis is None:
            self._basis = [self._to_morphism(v) for v in self._vectors]
        return self._basis

    def combination(self, coeffs: Sequence) -> Morphism:
        f = self.source.field
        acc: dict = {}
        for c, vec in zip(coeffs, self._vectors):
            if c:
                for k, x in vec.items():
                    acc[k] = f.norm(acc.get(k, 0) + c * x)
        return self._to_morphism(acc)

    def flatten(self, phi: Morphism) -> dict:
        out = {}
        for v, m in enumerate(phi.blocks):
            base = self.offsets[v]
            for i in range(m.nrows):
                for j, x in enumerate(m.rows[i]):
                    if x:
                        out[base + i * m.ncols + j] = x
        return out

    def coords(self, phi: Morphism) -> list:
        flat = self.flatten(phi)
        return [flat.get(c, 0) for c in self.free]


def hom_space(M: Module, N: Module) -> HomSpace:
    return HomSpace(M, N)


def hom_basis(M: Module, N: Module) -> list[Morphism]:
    return HomSpace(M, N).basis


def hom_dim(M: Module, N: Module) -> int:
    return HomSpace(M, N).dim


# -- isomorphism

@dataclass
class IsoResult:
    status: str                      # "yes", "no" or "unknown"
    morphism: Morphism | None = None
    reason: str = ""

    def __bool__(self):
        return self.status == "yes"


def _invariants(M: Module):
    return (M.dims, top_dims(M), tuple(radical_layers(M)))


def is_isomorphic(M: Module, N: Module, seed: int = 0, tries: int = 64,
                  budget: int = 4096) -> IsoResult:
    _same_algebra(M.algebra, N.algebra)
    if M.dims != N.dims:
        return IsoResult("no", reason="dimension vectors differ")
    if M.n == 0:
        return IsoResult("yes", identity(M), "zero modules")
    if _invariants(M) != _invariants(N):
        return IsoResult("no", reason="radical layers differ")
    H = HomSpace(M, N)
    if H.dim == 0:
        return IsoResult("no", reason="no nonzero maps")
    if hom_dim(N, M) != H.dim or hom_dim(M, M) != H.dim:
        return IsoResult("no", reason="hom dimensions differ")
    f = M.field
    basis = H.basis
    for phi in basis:
        if phi.is_iso():
            return IsoResult("yes", phi, "basis element")
    if isinstance(f, PrimeField) and f.p ** H.dim <= budget:
        for coeffs in itertools.product(range(f.p), repeat=H.dim):
            if not any(coeffs):
                continue
            phi = H.combination(coeffs)
            if phi.is_iso():
                return IsoResult("yes", phi, "exhaustive search")
        return IsoResult("no", reason="exhaustive search found no isomorphism")
    if H.dim == 1:
        return IsoResult("no", reason="one-dimensional hom space without isomorphism")
    rng = random.Random(seed)
    for _ in range(tries):
        if isinstance(f, PrimeField):
            coeffs = [rng.randrange(f.p) for _ in range(H.dim)]
        else:
            coeffs = [rng.randint(-50, 50) for _ in range(H.dim)]
        phi = H.combination(coeffs)
        if phi.is_iso():
            return IsoResult("yes", phi, "random search")
    return IsoResult("unknown", reason=f"no isomorphism among {tries} random maps")


# -- covers and syzygies

def top_generators(M: Module) -> list[tuple[int, list]]:
    """Vectors ``(v, x)`` with ``x`` in ``e_v M`` lifting a basis of the top."""
    sub = _radical_sub(M)
    gens = []
    for v in range(len(M.dims)):
        for k in sub.complement(v):
            x = [0] * M.dims[v]
            x[k] = 1
            gens.append((v, x))
    return gens


def cover_from_generators(M: Module, gens: Sequence[tuple[int, list]]) -> tuple[Module, Morphism]:
    A = M.algebra
    f = M.field
    projs = [projective(A, v) for v, _ in gens]
    P = direct_sum(projs, A)
    blocks = []
    for t in range(A.n_vertices):
        cols = []
        for (v, x), Pv in zip(gens, projs):
            comp, _ = _proj_layout(A, v)
            for b in comp[t]:
                if b in A.idempotents:
                    cols.append(list(x))
                else:
                    cols.append(M.block(b).apply(x))
        blocks.append(ExactMatrix.from_columns(f, M.dims[t], cols) if cols
                      else _zeros(f, M.dims[t], 0))
    return P, Morphism(P, M, blocks, check=False)


def projective_cover(M: Module) -> tuple[Module, Morphism]:
    return cover_from_generators(M, top_generators(M))


def syzygy(M: Module, k: int = 1) -> Module:
    if k < 0:
        raise ModuleError("syzygy degree must be nonnegative")
    for _ in range(k):
        if M.n == 0:
            break
        _, pi = projective_cover(M)
        M, _ = kernel(pi)
    return M


# -- dualities into the regular module

def right_multiplication(A: BasedAlgebra, a: int) -> Morphism:
    """``P(t) -> P(s), x -> x a`` for a basis element ``a`` of grade ``(t, s)``."""
    cache = A.__dict__.setdefault("_rmult", {})
    if a in cache:
        return cache[a]
    f = A.field
    t, s = A.grade[a]
    Pt, Ps = projective(A, t), projective(A, s)
    ct, _ = _proj_layout(A, t)
    _, ps = _proj_layout(A, s)
    blocks = []
    for u in range(A.n_vertices):
        rows = [[0] * Pt.dims[u] for _ in range(Ps.dims[u])]
        for j, b in enumerate(ct[u]):
            for k, c in A.basis_product(b, a).items():
                rows[ps[k][1]][j] = c
        blocks.append(ExactMatrix._raw(f, Ps.dims[u], Pt.dims[u], rows))
    phi = Morphism(Pt, Ps, blocks, check=False)
    cache[a] = phi
    return phi


def _star_data(M: Module):
    cache = M.__dict__
    if "_star" in cache:
        return cache["_star"]
    A = M.algebra
    f = M.field
    Aop = A.opposite()
    spaces = [HomSpace(M, projective(A, v)) for v in range(A.n_vertices)]
    dims = [H.dim for H in spaces]
    blocks = {}
    for a in A.radical:
        t, s = A.grade[a]
        # over the opposite algebra a maps the t-component to the s-component
        if not dims[t] or not dims[s]:
            continue
        R = right_multiplication(A, a)
        cols = [spaces[s].coords(R @ phi) for phi in spaces[t].basis]
        blocks[a] = ExactMatrix.from_columns(f, dims[s], cols)
    S = Module(Aop, dims, blocks, check=False,
               name=f"{M.name}*" if M.name else None)
    cache["_star"] = (S, spaces)
    return S, spaces


def star_dual(M: Module) -> Module:
    """``Hom_A(M, A)`` as a left module over the opposite algebra."""
    return _star_data(M)[0]


def star_dual_morphism(phi: Morphism) -> Morphism:
    """``phi* : N* -> M*`` for ``phi : M -> N``, by precomposition."""
    M, N = phi.source, phi.target
    Ms, hm = _star_data(M)
    Ns, hn = _star_data(N)
    f = M.field
    blocks = []
    for v in range(len(M.dims)):
        cols = [hm[v].coords(psi @ phi) for psi in hn[v].basis]
        blocks.append(ExactMatrix.from_columns(f, Ms.dims[v], cols) if cols
                      else _zeros(f, Ms.dims[v], 0))
    return Morphism(Ns, Ms, blocks, check=False)


def evaluation_map(M: Module) -> Morphism:
    """The canonical map ``M -> M**``."""
    A = M.algebra
    f = M.field
    Ms, spaces = _star_data(M)
    Mss, spaces2 = _star_data(Ms)
    if Mss.algebra is not A:
        Mss = Module(A, Mss.dims, Mss.blocks, check=False)
    blocks = []
    for v in range(A.n_vertices):
        H2 = spaces2[v]          # Hom_{A^op}(M*, P_op(v))
        Pop = H2.target
        cols = []
        for k in range(M.dims[v]):
            m = [0] * M.dims[v]
            m[k] = 1
            eb = []
            for w in range(A.n_vertices):
                vecs = [phi.blocks[v].apply(m) for phi in spaces[w].basis]
                eb.append(ExactMatrix.from_columns(f, Pop.dims[w], vecs) if vecs
                          else _zeros(f, Pop.dims[w], 0))
            ev = Morphism(Ms, Pop, eb, check=False)
            cols.append(H2.coords(ev))
        blocks.append(ExactMatrix.from_columns(f, Mss.dims[v], cols) if cols
                      else _zeros(f, Mss.dims[v], 0))
    return Morphism(M, Mss, blocks, check=False)


# -- change of algebra

def restrict_along_quotient(N: Module, A: BasedAlgebra, qmap: dict[int, dict]) -> Module:
    """View a module over ``B`` as a module over ``A`` through ``A -> B``.

    ``qmap[i]`` is the image of the i-th basis element of ``A`` in ``B``.
    """
    B = N.algebra
    f = A.field
    if A.n_vertices != B.n_vertices or f != B.field:
        raise ModuleError("surjection does not preserve the vertices")
    for v in range(A.n_vertices):
        if qmap.get(A.idempotents[v]) != {B.idempotents[v]: 1}:
            raise ModuleError("surjection must send idempotents to idempotents")
    blocks = {}
    for a in A.radical:
        t, s = A.grade[a]
        img = qmap.get(a, {})
        if any(B.grade[b] != (t, s) for b in img):
            raise ModuleError("surjection does not respect the grading")
        if img and N.dims[t] and N.dims[s]:
            blocks[a] = N.element_block(img, t, s)
    return Module(A, N.dims, blocks, check=True, name=N.name)


def corner_module(M: Module, C: BasedAlgebra) -> Module:
    """``eM`` as a module over the corner algebra ``C = eAe``."""
    if getattr(C, "parent", None) is None:
        raise ModuleError("not a corner algebra")
    _same_algebra(M.algebra, C.parent)
    verts = C.parent_vertices
    blocks = {}
    for new, old in enumerate(C.parent_basis):
        if old in M.blocks:
            blocks[new] = M.blocks[old]
    return Module(C, [M.dims[v] for v in verts], blocks, check=False,
                  name=f"e{M.name}" if M.name else None)


def corner_morphism(phi: Morphism, C: BasedAlgebra) -> Morphism:
    verts = C.parent_vertices
    return Morphism(corner_module(phi.source, C), corner_module(phi.target, C),
                    [phi.blocks[v] for v in verts], check=False)


def corner_bimodules(A: BasedAlgebra, verts: tuple) -> tuple[Module, Module]:
    """``eA`` over ``eAe`` and ``Ae`` over ``(A^op)e(A^op)``."""
    C = A.corner(verts)
    Cop = A.opposite().corner(verts)
    eA = corner_module(regular(A), C)
    Ae = corner_module(regular(A.opposite()), Cop)
    eA.name, Ae.name = "eA", "Ae"
    return eA, Ae


# -- random modules

def random_module(A: BasedAlgebra, rng: random.Random, max_mult: int = 2,
                  max_relations: int = 3) -> Module:
    """A random quotient of a random sum of indecomposable projectives."""
    f = A.field
    nv = A.n_vertices
    mult = [rng.randint(0, max_mult) for _ in range(nv)]
    if not any(mult):
        mult[rng.randrange(nv)] = 1
    summands = [v for v in range(nv) for _ in range(mult[v])]
    P = direct_sum([projective(A, v) for v in summands], A)
    gens = []
    for _ in range(rng.randint(0, max_relations)):
        v = rng.randrange(nv)
        if P.dims[v]:
            gens.append((v, [f.random_element(rng) if rng.random() < 0.6 else 0
                             for _ in range(P.dims[v])]))
    if not gens:
        return P
    Q, phi = cover_from_generators(P, gens)
    M, _ = cokernel(phi)
    return M


def random_base_change(M: Module, rng: random.Random) -> tuple[Module, Morphism]:
    """An isomorphic copy of ``M`` and the isomorphism ``M -> copy``."""
    f = M.field
    gs, ginv = [], []
    for d in M.dims:
        while True:
            g = ExactMatrix(f, d, d, [[f.random_element(rng) for _ in range(d)] for _ in range(d)])
            gi = g.inverse()
            if gi is not None:
                break
        gs.append(g)
        ginv.append(gi)
    A = M.algebra
    blocks = {b: gs[A.grade[b][0]] @ m @ ginv[A.grade[b][1]] for b, m in M.blocks.items()}
    N = Module(A, M.dims, blocks, check=False)
    return N, Morphism(M, N, gs, check=False)


# -- module files

_MATRIX = re.compile(r"matrix\s+(\S+)\s*=\s*(.*)$")
_DIM = re.compile(r"dim\s+(\S+)\s*=\s*(\d+)$")


def _arrow_blocks(A: BasedAlgebra, pres: Presentation, dims, mats) -> dict:
    """Blocks for every normal path from arrow matrices, after checking relations."""
    f = A.field
    q = pres.quiver

    def path_matrix(word, src):
        t = q.arrows[word[0]].target if word else src
        m = ExactMatrix.identity(f, dims[src])
        for ai in reversed(word):
            m = mats[ai] @ m
        return m, t

    for rel in pres.relations:
        acc = None
        for path, c in poly_terms(rel):
            m, _ = path_matrix(path.word, path.source)
            m = m.scale(c)
            acc = m if acc is None else acc + m
        if acc is not None and not acc.is_zero():
            raise ModuleError("arrow matrices do not satisfy the relations")
    blocks = {}
    for b in A.radical:
        path = A.paths[b]
        blocks[b], _ = path_matrix(path.word, path.source)
    return blocks


def module_from_arrows(A: BasedAlgebra, dims: dict | Sequence, mats: dict) -> Module:
    """Build a module from a dimension vector and one matrix per arrow label."""
    pres = getattr(A, "presentation", None)
    if pres is None:
        raise ModuleError("arrow matrices need an algebra built from a presentation")
    q = pres.quiver
    if isinstance(dims, dict):
        dv = [int(dims.get(lab, 0)) for lab in q.vertices]
    else:
        dv = list(dims)
    f = A.field
    arr = {}
    for ai, a in enumerate(q.arrows):
        m = mats.get(a.label)
        if m is None:
            m = _zeros(f, dv[a.target], dv[a.source])
        elif not isinstance(m, ExactMatrix):
            rows = [list(r) for r in m]
            if dv[a.source] == 0:
                rows = [[] for _ in range(dv[a.target])]
            if len(rows) != dv[a.target] or any(len(r) != dv[a.source] for r in rows):
                raise ModuleError(f"matrix of {a.label} must be {dv[a.target]}x{dv[a.source]}")
            m = ExactMatrix(f, dv[a.target], dv[a.source], rows)
        if m.shape != (dv[a.target], dv[a.source]):
            raise ModuleError(f"matrix of {a.label} must be {dv[a.target]}x{dv[a.source]}")
        arr[ai] = m
    unknown = set(mats) - {a.label for a in q.arrows}
    if unknown:
        raise ModuleError(f"unknown arrow {sorted(unknown)[0]!r}")
    return Module(A, dv, _arrow_blocks(A, pres, dv, arr))


def _parse_matrix(text: str, field):
    # quote fractions so that literal_eval keeps them exact
    try:
        data = ast.literal_eval(re.sub(r"(-?\d+/\d+)", r"'\1'", text))
    except (ValueError, SyntaxError):
        raise ModuleError(f"bad matrix literal {text!r}") from None
    return [[field(x) for x in row] for row in data]


def parse_module(text: str, base_dir: str | None = None, algebra: BasedAlgebra | None = None):
    """Parse a module file; returns ``(algebra, module)``."""
    dims: dict = {}
    mats: dict = {}
    alg_file = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("algebra"):
            alg_file = line.split(None, 1)[1].strip() if len(line.split(None, 1)) > 1 else None
            continue
        m = _DIM.match(line)
        if m:
            dims[m.group(1)] = int(m.group(2))
            continue
        m = _MATRIX.match(line)
        if m:
            mats[m.group(1)] = m.group(2)
            continue
        raise ParseError(f"unrecognised line: {line}", lineno, 1)
    if algebra is None:
        if alg_file is None:
            raise ModuleError("module file does not name an algebra")
        path = FsPath(base_dir or ".") / alg_file
        algebra = algebra_basis(load_presentation(path))
    f = algebra.field
    parsed = {lab: _parse_matrix(txt, f) for lab, txt in mats.items()}
    pres = algebra.presentation
    for lab in dims:
        if lab not in pres.quiver.vertices:
            raise ModuleError(f"unknown vertex {lab!r}")
    return algebra, module_from_arrows(algebra, dims, parsed)


def load_module(path, algebra: BasedAlgebra | None = None):
    p = FsPath(path)
    return parse_module(p.read_text(), str(p.parent), algebra)


def dump_module(M: Module, algebra_file: str = "algebra.alg") -> str:
    A = M.algebra
    pres = getattr(A, "presentation", None)
    if pres is None:
        raise ModuleError("only modules over presented algebras can be written")
    lines = [f"algebra {algebra_file}"]
    for v, lab in enumerate(pres.quiver.vertices):
        lines.append(f"dim {lab} = {M.dims[v]}")
    index = {p: i for i, p in enumerate(A.paths)}
    for a in pres.quiver.arrows:
        ai = pres.quiver.arrow_index(a.label)
        b = index[Path(a.source, a.target, (ai,))]
        m = M.block(b)
        body = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in m.rows)
        lines.append(f"matrix {a.label} = [{body}]")
    return "\n".join(lines) + "\n"


__all__ = [
    "Module", "Morphism", "ShortExactSequence", "ModuleError", "AlgebraMismatch", "HomSpace",
    "IsoResult", "simple", "projective", "injective", "regular", "direct_sum", "summand_maps",
    "dual", "star_dual", "star_dual_morphism", "evaluation_map", "hom_basis", "hom_dim",
    "hom_space", "kernel", "cokernel", "image", "radical", "top", "top_dims", "projective_cover",
    "cover_from_generators", "syzygy", "is_isomorphic", "restrict_along_quotient",
    "corner_module", "corner_morphism", "corner_bimodules", "random_module",
    "random_base_change", "module_from_arrows", "parse_module", "load_module", "dump_module",
    "identity", "zero_map", "zero_module", "right_multiplication", "radical_layers",
    "top_generators",
]
