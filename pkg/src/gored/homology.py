"""Minimal projective resolutions, Ext dimensions and bounded homological dimensions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .exactfield import Echelon
from .modules import (
    Module, Morphism, _proj_layout, dual, is_isomorphic, kernel, regular,
    top_generators, cover_from_generators, radical_layers, top_dims,
)

DEFAULT_BOUND = 20
DEFAULT_MAX_DIM = 5000


@dataclass
class PeriodicityCertificate:
    """A verified isomorphism from the a-th to the b-th syzygy."""

    a: int
    b: int
    iso: Morphism

    @property
    def period(self) -> int:
        return self.b - self.a

    def verify(self) -> bool:
        try:
            self.iso.validate()
        except ValueError:
            return False
        return self.iso.is_iso()

    def to_dict(self):
        return {"from": self.a, "to": self.b, "period": self.period}

    def __str__(self):
        return f"Omega^{self.a} ~ Omega^{self.b}"


@dataclass
class DimVerdict:
    kind: str                 # "finite", "infinite" or "at_least"
    value: int
    bound: int
    certificate: PeriodicityCertificate | None = None
    note: str = ""

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def is_infinite(self) -> bool:
        return self.kind == "infinite"

    @property
    def certified(self) -> bool:
        return self.kind in ("finite", "infinite")

    def __str__(self):
        if self.kind == "finite":
            return f"Finite({self.value})"
        if self.kind == "infinite":
            return f"InfiniteCertified(period {self.certificate.period})" if self.certificate \
                else "InfiniteCertified"
        return f"AtLeast({self.value})"

    def to_dict(self):
        d = {"verdict": self.kind, "value": self.value, "bound": self.bound, "text": str(self)}
        if self.certificate is not None:
            d["certificate"] = self.certificate.to_dict()
        if self.note:
            d["note"] = self.note
        return d


def finite(d: int, bound: int, note: str = "") -> DimVerdict:
    return DimVerdict("finite", d, bound, note=note)


def combine(verdicts: Sequence[DimVerdict], bound: int) -> DimVerdict:
    """Verdict for a direct sum from the verdicts of its summands."""
    if not verdicts:
        return finite(0, bound, "zero module")
    for v in verdicts:
        if v.kind == "infinite":
            return DimVerdict("infinite", v.value, bound, v.certificate, v.note)
    if all(v.kind == "finite" for v in verdicts):
        return finite(max(v.value for v in verdicts), bound)
    return DimVerdict("at_least", max(v.value for v in verdicts), bound)


class Resolution:
    """Minimal projective resolution computed on demand.

    ``syzygies[k]`` is the k-th syzygy (``syzygies[0]`` is the module itself),
    ``generators[k]`` lists ``(vertex, vector)`` lifts of a basis of its top,
    and ``inclusions[k]`` embeds ``syzygies[k]`` into the (k-1)-th term.
    """

    def __init__(self, M: Module, max_dim: int = DEFAULT_MAX_DIM, seed: int = 0):
        self.module = M
        self.algebra = M.algebra
        self.max_dim = max_dim
        self.seed = seed
        self.syzygies: list[Module] = [M]
        self.generators: list[list] = []
        self.terms: list[Module] = []
        self.covers: list[Morphism] = []
        self.inclusions: list[Morphism | None] = [None]
        self.length: int | None = 0 if M.n == 0 else None
        self.certificate: PeriodicityCertificate | None = None
        self.iso_unknown = False
        self.overflow = False
        self._invariants: list = []
        self._ext_cache: dict = {}

    @property
    def terminated(self) -> bool:
        return self.length is not None

    @property
    def computed(self) -> int:
        return len(self.terms)

    def betti(self, k: int) -> tuple[int, ...]:
        self.ensure(k)
        out = [0] * self.algebra.n_vertices
        if k < len(self.generators):
            for v, _ in self.generators[k]:
                out[v] += 1
        return tuple(out)

    def betti_numbers(self, n: int) -> list[tuple[int, ...]]:
        return [self.betti(k) for k in range(n + 1)]

    def step(self) -> bool:
        """Compute one more term; return False when nothing more can be done."""
        if self.terminated or self.overflow:
            return False
        k = len(self.terms)
        X = self.syzygies[k]
        gens = top_generators(X)
        P, pi = cover_from_generators(X, gens)
        K, inc = kernel(pi)
        self.generators.append(gens)
        self.terms.append(P)
        self.covers.append(pi)
        self.syzygies.append(K)
        self.inclusions.append(inc)
        if K.n == 0:
            self.length = k
        elif K.n > self.max_dim:
            self.overflow = True
        elif self.certificate is None:
            self._look_for_period(k + 1)
        return True

    def _invariant(self, i):
        while len(self._invariants) <= i:
            X = self.syzygies[len(self._invariants)]
            self._invariants.append((X.dims, top_dims(X), tuple(radical_layers(X))))
        return self._invariants[i]

    def _look_for_period(self, b: int) -> None:
        Xb = self.syzygies[b]
        for a in range(b):
            Xa = self.syzygies[a]
            if Xa.n == 0 or Xa.dims != Xb.dims:
                continue
            if self._invariant(a) != self._invariant(b):
                continue
            res = is_isomorphic(Xa, Xb, seed=self.seed + 7919 * b + a)
            if res.status == "yes":
                cert = PeriodicityCertificate(a, b, res.morphism)
                if cert.verify():
                    self.certificate = cert
                    return
            elif res.status == "unknown":
                self.iso_unknown = True

    def ensure(self, n: int) -> None:
        """Make terms 0..n available unless the resolution stops earlier."""
        while len(self.terms) <= n and self.step():
            pass

    def has_term(self, k: int) -> bool:
        self.ensure(k)
        return k < len(self.terms)

    def reaches(self, k: int) -> bool:
        """True when term k is known, either computed or known to be zero."""
        self.ensure(k)
        return k < len(self.terms) or (self.terminated and k > self.length)

    # -- Hom(P_., N)

    def _cochain_dim(self, k: int, N: Module) -> int:
        if k >= len(self.generators):
            return 0
        return sum(N.dims[v] for v, _ in self.generators[k])

    def _coboundary_rank(self, k: int, N: Module) -> int:
        """Rank of Hom(P_k, N) -> Hom(P_{k+1}, N)."""
        key = (id(N), k)
        hit = self._ext_cache.get(key)
        if hit is not None and hit[0] is N:
            return hit[1]
        self.ensure(k + 1)
        if k + 1 >= len(self.generators):
            r = 0
        else:
            r = self._build_rank(k, N)
        self._ext_cache[key] = (N, r)
        return r

    def _build_rank(self, k: int, N: Module) -> int:
        A = self.algebra
        f = A.field
        src = self.generators[k]
        dst = self.generators[k + 1]
        inc = self.inclusions[k + 1]
        # column offsets of C^k = sum over generators of N_v
        col_off = []
        acc = 0
        for v, _ in src:
            col_off.append(acc)
            acc += N.dims[v]
        ech = Echelon(f)
        for w, x in dst:
            img = inc.blocks[w].apply(x)      # d(gamma) in P_k at vertex w
            rows = [dict() for _ in range(N.dims[w])]
            pos = 0
            for j, (v, _) in enumerate(src):
                comp, _ = _proj_layout(A, v)
                seg = comp[w]
                elem = {b: c for b, c in zip(seg, img[pos:pos + len(seg)]) if c}
                pos += len(seg)
                if not elem or not N.dims[v]:
                    continue
                blk = N.element_block(elem, w, v)
                for i in range(N.dims[w]):
                    r = rows[i]
                    for jj, c in enumerate(blk.rows[i]):
                        if c:
                            r[col_off[j] + jj] = c
            for r in rows:
                if r:
                    ech.add(r)
        return ech.rank

    def ext_dim(self, N: Module, j: int) -> int:
        if j < 0:
            raise ValueError("Ext degree must be nonnegative")
        if self.module.algebra is not N.algebra and self.module.algebra != N.algebra:
            raise ValueError("modules over different algebras")
        self.ensure(j + 1)
        if self.overflow and j + 1 >= len(self.terms) and not self.terminated:
            raise ResolutionOverflow(f"syzygy dimension exceeds {self.max_dim}")
        c = self._cochain_dim(j, N)
        if c == 0:
            return 0
        r_out = self._coboundary_rank(j, N)
        r_in = self._coboundary_rank(j - 1, N) if j > 0 else 0
        return c - r_out - r_in


class ResolutionOverflow(RuntimeError):
    pass


def resolution(M: Module, max_dim: int = DEFAULT_MAX_DIM) -> Resolution:
    cache = M.__dict__.setdefault("_resolutions", {})
    res = cache.get(max_dim)
    if res is None:
        res = cache[max_dim] = Resolution(M, max_dim)
    return res


def min_resolution(M: Module, n: int, max_dim: int = DEFAULT_MAX_DIM) -> Resolution:
    if n < 0:
        raise ValueError("length must be nonnegative")
    res = resolution(M, max_dim)
    res.ensure(n)
    return res


def ext_dim(M: Module, N: Module, j: int) -> int:
    return resolution(M).ext_dim(N, j)


def ext_row(M: Module, N: Module, jmax: int) -> list[int]:
    res = resolution(M)
    return [res.ext_dim(N, j) for j in range(jmax + 1)]


def pd_bounded(M: Module, bound: int = DEFAULT_BOUND, max_dim: int = DEFAULT_MAX_DIM) -> DimVerdict:
    if bound < 1:
        raise ValueError("bound must be at least 1")
    res = resolution(M, max_dim)
    while True:
        if res.terminated and res.length <= bound:
            return finite(res.length, bound)
        if res.certificate is not None:
            return DimVerdict("infinite", res.certificate.b, bound, res.certificate)
        if len(res.terms) > bound or not res.step():
            break
    note = "syzygy too large" if res.overflow else ""
    if res.iso_unknown:
        note = (note + "; " if note else "") + "isomorphism search inconclusive"
    # Omega^k is nonzero for every computed k below the end of the resolution
    known = res.length if res.terminated else len(res.terms)
    return DimVerdict("at_least", min(known, bound + 1), bound, note=note)


def id_bounded(M: Module, bound: int = DEFAULT_BOUND, max_dim: int = DEFAULT_MAX_DIM) -> DimVerdict:
    """Injective dimension, computed as pd of the dual over the opposite algebra."""
    return pd_bounded(dual(M), bound, max_dim)


@dataclass
class PerpVerdict:
    kind: str                 # "yes", "no" or "up_to_bound"
    bound: int
    witness: int | None = None
    certificate: PeriodicityCertificate | None = None
    checked: list = field(default_factory=list)
    note: str = ""

    @property
    def yes(self) -> bool:
        return self.kind == "yes"

    @property
    def no(self) -> bool:
        return self.kind == "no"

    def __str__(self):
        if self.kind == "yes":
            how = f" via {self.certificate}" if self.certificate else ""
            return f"CertifiedYes{how}"
        if self.kind == "no":
            return f"CertifiedNo(Ext^{self.witness} != 0)"
        return f"UpToBound({self.bound})"

    def to_dict(self):
        d = {"verdict": self.kind, "bound": self.bound, "text": str(self)}
        if self.witness is not None:
            d["witness"] = self.witness
        if self.certificate is not None:
            d["certificate"] = self.certificate.to_dict()
        return d


def perp_test(M: Module, bound: int = DEFAULT_BOUND, max_dim: int = DEFAULT_MAX_DIM) -> PerpVerdict:
    """Is Ext^j(M, A) = 0 for every j > 0?"""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    A = regular(M.algebra)
    res = resolution(M, max_dim)
    checked = []
    for j in range(1, bound + 1):
        res.ensure(j + 1)
        if res.terminated and j > res.length:
            return PerpVerdict("yes", bound, checked=checked, note=f"pd {res.length}")
        cert = res.certificate
        if cert is not None and j > cert.b:
            return PerpVerdict("yes", bound, certificate=cert, checked=checked)
        if res.overflow and not res.reaches(j + 1):
            return PerpVerdict("up_to_bound", bound, checked=checked, note="syzygy too large")
        e = res.ext_dim(A, j)
        checked.append(e)
        if e:
            return PerpVerdict("no", bound, witness=j, checked=checked)
    cert = res.certificate
    if cert is not None and cert.b <= bound:
        return PerpVerdict("yes", bound, certificate=cert, checked=checked)
    if res.terminated and res.length <= bound:
        return PerpVerdict("yes", bound, checked=checked, note=f"pd {res.length}")
    return PerpVerdict("up_to_bound", bound, checked=checked)


__all__ = [
    "DEFAULT_BOUND", "PeriodicityCertificate", "DimVerdict", "PerpVerdict", "Resolution",
    "ResolutionOverflow", "resolution", "min_resolution", "ext_dim", "ext_row", "pd_bounded",
    "id_bounded", "perp_test", "combine", "finite",
]
