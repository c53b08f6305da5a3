"""Finite-dimensional basic algebras given by a basis and structure constants.

Every ``BasedAlgebra`` has a basis split into primitive orthogonal idempotents
(one per vertex) and radical elements, and every basis element ``b`` lives in a
single corner ``e_t b e_s`` (its *grade* ``(t, s)``: source ``s``, target
``t``). Left modules are graded by the same vertices.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .exactfield import Echelon, ExactMatrix, Field
from .presentation import (
    Path, Presentation, Quiver, minimal_relation_space, poly_add,
    path_label,
)


class AlgebraError(ValueError):
    pass


class NotBasic(AlgebraError):
    pass


class BasedAlgebra:
    def __init__(self, field: Field, labels: Sequence[str], mult: dict,
                 idempotents: Sequence[int], vertex_labels: Sequence[str],
                 grade: Sequence[tuple[int, int]], degrees: Sequence[int] | None = None,
                 paths: Sequence[Path] | None = None, check: bool = True):
        self.field = field
        self.labels = list(labels)
        # mult[(i, j)] = {k: c} for b_i * b_j; missing keys are zero products
        self.mult = {k: dict(v) for k, v in mult.items() if v}
        self.idempotents = list(idempotents)
        self.vertex_labels = list(vertex_labels)
        self.grade = [tuple(g) for g in grade]
        self.degrees = list(degrees) if degrees is not None else [
            0 if i in set(self.idempotents) else 1 for i in range(len(self.labels))]
        self.paths = list(paths) if paths is not None else None
        self._opposite: BasedAlgebra | None = None
        self._corners: dict = {}
        if check:
            self.validate()

    # -- basic data

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def n_vertices(self) -> int:
        return len(self.idempotents)

    @cached_property
    def radical(self) -> list[int]:
        idem = set(self.idempotents)
        return [i for i in range(self.dim) if i not in idem]

    @cached_property
    def by_grade(self) -> dict[tuple[int, int], list[int]]:
        out: dict = {}
        for i, g in enumerate(self.grade):
            out.setdefault(g, []).append(i)
        return out

    def graded(self, t: int, s: int) -> list[int]:
        return self.by_grade.get((t, s), [])

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(repr((str(self.field), self.labels, self.idempotents, self.vertex_labels,
                       self.grade)).encode())
        h.update(repr(sorted((k, sorted(v.items())) for k, v in self.mult.items())).encode())
        return h.hexdigest()

    def __eq__(self, other):
        return isinstance(other, BasedAlgebra) and self.fingerprint == other.fingerprint

    def __hash__(self):
        return hash(self.fingerprint)

    def __repr__(self):
        return f"BasedAlgebra(dim={self.dim}, vertices={self.vertex_labels})"

    def vertex(self, label) -> int:
        if isinstance(label, int) and not isinstance(label, bool) and str(label) not in self.vertex_labels:
            return label
        try:
            return self.vertex_labels.index(str(label))
        except ValueError:
            raise AlgebraError(f"unknown vertex {label!r}") from None

    # -- arithmetic

    def product(self, x: dict, y: dict) -> dict:
        f = self.field
        out: dict = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.mult.get((i, j), {}).items():
                    v = f.norm(out.get(k, 0) + a * b * c)
                    if v:
                        out[k] = v
                    else:
                        out.pop(k, None)
        return out

    def basis_product(self, i: int, j: int) -> dict:
        return self.mult.get((i, j), {})

    # -- validation

    def validate(self) -> None:
        n = self.dim
        if len(self.grade) != n:
            raise AlgebraError("grade list does not match basis")
        idem = self.idempotents
        if len(self.vertex_labels) != len(idem):
            raise AlgebraError("one vertex label per idempotent required")
        for v, e in enumerate(idem):
            if self.grade[e] != (v, v):
                raise AlgebraError(f"idempotent {self.labels[e]} is not graded at its own vertex")
        for (i, j), prod in self.mult.items():
            ti, si = self.grade[i]
            tj, sj = self.grade[j]
            if si != tj:
                raise AlgebraError(f"nonzero product of non-composable {self.labels[i]}, {self.labels[j]}")
            for k in prod:
                if self.grade[k] != (ti, sj):
                    raise AlgebraError("structure constants do not respect the vertex grading")
        for v, e in enumerate(idem):
            for b in range(n):
                t, s = self.grade[b]
                want_l = {b: 1} if t == v else {}
                want_r = {b: 1} if s == v else {}
                if self.basis_product(e, b) != want_l or self.basis_product(b, e) != want_r:
                    raise AlgebraError(f"{self.labels[e]} does not act as an idempotent on {self.labels[b]}")
        rad = set(self.radical)
        for (i, j), prod in self.mult.items():
            if (i in rad or j in rad) and any(k not in rad for k in prod):
                raise NotBasic("non-idempotent basis elements do not span an ideal")
        # associativity on composable triples
        for (i, j), ij in self.mult.items():
            _, sj = self.grade[j]
            for k in range(n):
                if self.grade[k][0] != sj:
                    continue
                left = self.product(ij, {k: 1})
                right = self.product({i: 1}, self.basis_product(j, k))
                if left != right:
                    raise AlgebraError(
                        f"multiplication not associative on ({self.labels[i]}, {self.labels[j]}, {self.labels[k]})")
        if self.loewy_layers()[-1] != 0:
            raise NotBasic("radical span is not nilpotent")

    # -- radical structure

    def loewy_layers(self) -> list[int]:
        """dim rad^k for k = 1, 2, ... ending with 0 (or a stuck nonzero value)."""
        f = self.field
        rad = self.radical
        current = [{i: 1} for i in rad]
        dims = [len(current)]
        for _ in range(self.dim + 1):
            if not current:
                break
            ech = Echelon(f)
            nxt = []
            for x in current:
                for r in rad:
                    y = self.product(x, {r: 1})
                    if y and ech.add(y):
                        nxt.append(y)
            if len(nxt) == len(current):
                dims.append(len(nxt))
                break
            current = nxt
            dims.append(len(nxt))
        return dims

    @cached_property
    def generators(self) -> list[int]:
        """Radical basis elements whose classes form a basis of rad/rad^2."""
        f = self.field
        rad = self.radical
        ech = Echelon(f)
        for i in rad:
            for j in rad:
                p = self.basis_product(i, j)
                if p:
                    ech.add(p)
        gens = []
        for i in rad:
            if ech.add({i: 1}):
                gens.append(i)
        return gens

    def is_local(self) -> bool:
        return self.n_vertices == 1

    # -- derived algebras

    def opposite(self) -> "BasedAlgebra":
        if self._opposite is None:
            mult = {(j, i): v for (i, j), v in self.mult.items()}
            grade = [(s, t) for t, s in self.grade]
            op = BasedAlgebra(self.field, self.labels, mult, self.idempotents,
                              self.vertex_labels, grade, self.degrees, self.paths, check=False)
            op._opposite = self
            self._opposite = op
        return self._opposite

    def corner(self, vertices: Sequence[int]) -> "BasedAlgebra":
        key = tuple(sorted(set(vertices)))
        if key not in self._corners:
            self._corners[key] = _corner(self, key)
        return self._corners[key]


def algebra_basis(p: Presentation) -> BasedAlgebra:
    """Basis of normal-form paths with concatenate-then-normalize products."""
    paths = p.normal_paths
    index = {q: i for i, q in enumerate(paths)}
    rs = p.rewriting
    f = p.field
    mult: dict = {}
    for i, a in enumerate(paths):
        for j, b in enumerate(paths):
            if b.target != a.source:
                continue
            if not a.word:
                mult[(i, j)] = {j: 1}
                continue
            if not b.word:
                mult[(i, j)] = {i: 1}
                continue
            ab = Path(b.source, a.target, a.word + b.word)
            nf = rs.normal_form_path(ab)
            if nf:
                mult[(i, j)] = {index[q]: c for q, c in nf.items()}
    idem = [index[Path(v, v)] for v in range(len(p.quiver.vertices))]
    labels = [path_label(p.quiver, q) for q in paths]
    grade = [(q.target, q.source) for q in paths]
    degrees = [len(q.word) for q in paths]
    A = BasedAlgebra(f, labels, mult, idem, p.quiver.vertices, grade, degrees, paths)
    A.presentation = p
    return A


def _corner(A: BasedAlgebra, verts: tuple) -> BasedAlgebra:
    if not verts:
        raise AlgebraError("empty idempotent")
    vpos = {v: k for k, v in enumerate(verts)}
    keep = [i for i in range(A.dim) if A.grade[i][0] in vpos and A.grade[i][1] in vpos]
    new = {old: k for k, old in enumerate(keep)}
    mult = {}
    for (i, j), prod in A.mult.items():
        if i in new and j in new:
            mult[(new[i], new[j])] = {new[k]: c for k, c in prod.items()}
    idem = [new[A.idempotents[v]] for v in verts]
    grade = [(vpos[A.grade[i][0]], vpos[A.grade[i][1]]) for i in keep]
    paths = [A.paths[i] for i in keep] if A.paths is not None else None
    C = BasedAlgebra(A.field, [A.labels[i] for i in keep], mult, idem,
                     [A.vertex_labels[v] for v in verts], grade,
                     [A.degrees[i] for i in keep], paths)
    C.parent = A
    C.parent_vertices = verts
    C.parent_basis = keep
    return C


def idempotent_vertices(A: BasedAlgebra, labels: Sequence) -> tuple[int, ...]:
    """Vertex indices of an idempotent given by vertex labels."""
    verts = tuple(sorted({A.vertex(lab) for lab in labels}))
    if not verts:
        raise AlgebraError("empty idempotent")
    return verts


def corner_algebra(A: BasedAlgebra, vertices: Sequence[int]):
    """``(eAe, eA, Ae)`` with eA a left eAe-module and Ae a left (eAe)^op-module."""
    from .modules import corner_bimodules
    C = A.corner(vertices)
    eA, Ae = corner_bimodules(A, tuple(sorted(set(vertices))))
    return C, eA, Ae


def opposite(A: BasedAlgebra) -> BasedAlgebra:
    return A.opposite()


@dataclass
class Bimodule:
    """An A-B-bimodule on a fixed basis.

    ``left[a]`` is the matrix of ``m -> a*m`` and ``right[b]`` the matrix of
    ``m -> m*b`` (columns are images of basis vectors), for basis indices of A
    and B respectively. Missing entries act as zero.
    """

    dim: int
    left: dict
    right: dict


def triangular_algebra(A: BasedAlgebra, B: BasedAlgebra, M: Bimodule) -> BasedAlgebra:
    """The algebra of matrices ``[[a, m], [0, b]]``.

    Basis: A's basis, then M's, then B's. Raises AlgebraError when the actions
    are not compatible (the result fails the associativity check).
    """
    f = A.field
    if B.field != f:
        raise AlgebraError("A and B over different fields")
    n = M.dim

    def mat(d, key):
        m = d.get(key)
        return m if m is not None else ExactMatrix.zeros(f, n, n)

    # grading of M's basis vectors from the idempotent actions
    mgrade = []
    for k in range(n):
        ts = [v for v, e in enumerate(A.idempotents) if mat(M.left, e).rows[k][k] == 1]
        ss = [w for w, e in enumerate(B.idempotents) if mat(M.right, e).rows[k][k] == 1]
        if len(ts) != 1 or len(ss) != 1:
            raise AlgebraError("bimodule basis must be adapted to the idempotents")
        mgrade.append((ts[0], A.n_vertices + ss[0]))
    oa, om, ob = 0, A.dim, A.dim + n
    mult: dict = {}
    for (i, j), prod in A.mult.items():
        mult[(oa + i, oa + j)] = {oa + k: c for k, c in prod.items()}
    for (i, j), prod in B.mult.items():
        mult[(ob + i, ob + j)] = {ob + k: c for k, c in prod.items()}
    for a in range(A.dim):
        L = mat(M.left, a)
        for k in range(n):
            col = {om + r: L.rows[r][k] for r in range(n) if L.rows[r][k] != 0}
            if col:
                mult[(oa + a, om + k)] = col
    for b in range(B.dim):
        R = mat(M.right, b)
        for k in range(n):
            col = {om + r: R.rows[r][k] for r in range(n) if R.rows[r][k] != 0}
            if col:
                mult[(om + k, ob + b)] = col
    labels = _unique([f"A:{x}" for x in A.labels] + [f"M:{k}" for k in range(n)]
                     + [f"B:{x}" for x in B.labels])
    vlabels = _unique(list(A.vertex_labels) + list(B.vertex_labels))
    grade = list(A.grade) + mgrade + [(t + A.n_vertices, s + A.n_vertices) for t, s in B.grade]
    idem = [oa + e for e in A.idempotents] + [ob + e for e in B.idempotents]
    degrees = list(A.degrees) + [1] * n + list(B.degrees)
    try:
        T = BasedAlgebra(f, labels, mult, idem, vlabels, grade, degrees)
    except NotBasic:
        raise
    except AlgebraError as exc:
        raise AlgebraError(f"incompatible bimodule actions: {exc}") from None
    T.triangular_parts = (A, B, M)
    return T


def _unique(labels: list[str]) -> list[str]:
    seen = set()
    out = []
    for lab in labels:
        while lab in seen:
            lab = lab + "'"
        seen.add(lab)
        out.append(lab)
    return out


def _arrow_label(text: str) -> str:
    lab = re.sub(r"[^\w'.]", "_", text.replace("*", "_"))
    if not lab or not re.match(r"[^\W\d]", lab):
        lab = "a" + lab
    return lab


def recover_presentation(A: BasedAlgebra) -> Presentation:
    """Gabriel quiver and minimal relations of a basic algebra.

    Arrows are radical basis elements spanning rad/rad^2; relations are the
    kernel of the induced map from the path algebra, reduced to a minimal set.
    """
    f = A.field
    if A.loewy_layers()[-1] != 0:
        raise NotBasic("radical not nilpotent")
    gens = A.generators
    labels = _unique([_arrow_label(A.labels[g]) for g in gens])
    quiver = Quiver(A.vertex_labels,
                    [(lab, A.vertex_labels[A.grade[g][1]], A.vertex_labels[A.grade[g][0]])
                     for lab, g in zip(labels, gens)])
    arrows = quiver.arrows
    image: dict[Path, dict] = {}
    std_basis = _StandardBasis(f)
    frontier = []
    for v in range(A.n_vertices):
        q = Path(v, v)
        image[q] = {A.idempotents[v]: 1}
        std_basis.add(q, image[q])
        frontier.append(q)
    # a path is standard when its image is independent of the images of
    # smaller paths; non-standard paths with standard proper subpaths give
    # the reduced relations
    tips: set = set()
    relations: list[dict] = []
    rounds = 0
    while frontier:
        rounds += 1
        if rounds > A.dim + 2:
            raise NotBasic("path images do not stabilise")
        candidates = []
        for q in frontier:
            for ai, a in enumerate(arrows):
                if a.source != q.target:
                    continue
                w = (ai,) + q.word
                if _all_subwords_standard(w, tips):
                    candidates.append((Path(q.source, a.target, w), q))
        candidates.sort(key=lambda pq: pq[0].key)
        nxt = []
        for p, q in candidates:
            img = A.product({gens[p.word[0]]: 1}, image[q])
            image[p] = img
            coeffs = std_basis.express(img)
            if coeffs is None:
                std_basis.add(p, img)
                nxt.append(p)
                continue
            rel = {p: 1}
            for r, c in coeffs.items():
                poly_add(rel, r, -c, f)
            if any(len(r.word) < 2 for r in rel):
                raise NotBasic("recovered relation leaves J^2")
            tips.add(p.word)
            relations.append(rel)
        frontier = nxt
    if std_basis.rank != A.dim:
        raise NotBasic("quiver paths do not span the algebra")
    pres = Presentation(quiver, f, relations)
    return Presentation(quiver, f, minimal_relation_space(pres))


def _all_subwords_standard(w: tuple, tips: set) -> bool:
    # only subwords through the new leading arrow can be new tips
    return not any(w[:k] in tips for k in range(2, len(w)))


class _StandardBasis:
    """Images of standard paths in echelon form, remembering which path each row came from."""

    def __init__(self, field):
        self.field = field
        self.ech = Echelon(field)
        self.track: dict[int, dict] = {}  # pivot -> combination of paths
        self.rank = 0

    def _reduce(self, vec):
        f = self.field
        v = {k: x for k, x in vec.items() if x}
        combo: dict = {}
        for piv in sorted(self.ech.rows):
            a = v.get(piv)
            if not a:
                continue
            for k, x in self.ech.rows[piv].items():
                y = f.norm(v.get(k, 0) - a * x)
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
            for q, c in self.track[piv].items():
                poly_add(combo, q, a * c, f)
        return v, combo

    def express(self, vec):
        rest, combo = self._reduce(vec)
        return None if rest else combo

    def add(self, path, vec):
        f = self.field
        rest, combo = self._reduce(vec)
        if not rest:
            return False
        # rest = vec - sum combo * rows; new row = rest / lead
        piv = min(rest)
        inv = f.inv(rest[piv])
        row = {k: f.norm(x * inv) for k, x in rest.items()}
        tr = {path: inv}
        for q, c in combo.items():
            poly_add(tr, q, -c * inv, f)
        for p2, r2 in self.ech.rows.items():
            a = r2.get(piv)
            if a:
                for k, x in row.items():
                    y = f.norm(r2.get(k, 0) - a * x)
                    if y:
                        r2[k] = y
                    else:
                        r2.pop(k, None)
                for q, c in tr.items():
                    poly_add(self.track[p2], q, -a * c, f)
        self.ech.rows[piv] = row
        self.track[piv] = tr
        self.rank += 1
        return True


def quotient_map(A: BasedAlgebra, B: BasedAlgebra, arrow: str) -> dict[int, dict]:
    """Basis images for the surjection A -> A/<arrow> when both come from presentations."""
    pa, pb = A.presentation, B.presentation
    ai = pa.quiver.arrow_index(arrow)
    remap = {}
    for old, a in enumerate(pa.quiver.arrows):
        if old != ai:
            remap[old] = pb.quiver.arrow_index(a.label)
    index_b = {q: i for i, q in enumerate(B.paths)}
    out = {}
    for i, q in enumerate(A.paths):
        if ai in q.word:
            out[i] = {}
            continue
        qb = Path(q.source, q.target, tuple(remap[x] for x in q.word))
        nf = pb.rewriting.normal_form_path(qb)
        out[i] = {index_b[r]: c for r, c in nf.items()}
    return out
