"""Gorenstein projectivity through the totally reflexive criterion.

A module ``M`` is certified when ``Ext^j(M, A) = 0`` and ``Ext^j(M*, A) = 0``
for all ``j > 0`` (each backed by a finite resolution or a periodicity
certificate) and the evaluation map ``M -> M**`` is invertible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .homology import DEFAULT_BOUND, PerpVerdict, perp_test, resolution
from .modules import (
    Module, Morphism, evaluation_map, star_dual, star_dual_morphism,
)


class NotCertified(ValueError):
    pass


@dataclass
class GprojVerdict:
    kind: str                    # "gproj", "not_gproj" or "undetermined"
    bound: int
    perp: PerpVerdict | None = None
    perp_dual: PerpVerdict | None = None
    evaluation_iso: bool | None = None
    witness: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.kind == "gproj"

    def __str__(self):
        if self.kind == "gproj":
            return "CertifiedGproj"
        if self.kind == "not_gproj":
            w = self.witness
            if w.get("reason") == "evaluation":
                return "CertifiedNotGproj(M -> M** not invertible)"
            return f"CertifiedNotGproj(Ext^{w['degree']}({w['module']}, A) != 0)"
        return f"Undetermined(bound {self.bound})"

    def to_dict(self):
        d = {"verdict": self.kind, "bound": self.bound, "text": str(self),
             "evaluation_iso": self.evaluation_iso}
        if self.perp is not None:
            d["perp"] = self.perp.to_dict()
        if self.perp_dual is not None:
            d["perp_dual"] = self.perp_dual.to_dict()
        if self.witness:
            d["witness"] = dict(self.witness)
        return d

    def reverify(self, M: Module) -> bool:
        """Recompute the certificates from scratch and compare."""
        again = gproj_test(M, self.bound)
        return again.kind == self.kind


def gproj_test(M: Module, bound: int = DEFAULT_BOUND) -> GprojVerdict:
    if bound < 1:
        raise ValueError("bound must be at least 1")
    a = perp_test(M, bound)
    Ms = star_dual(M)
    b = perp_test(Ms, bound)
    ev = evaluation_map(M)
    ev_iso = ev.is_iso()
    if a.no:
        return GprojVerdict("not_gproj", bound, a, b, ev_iso,
                            {"reason": "ext", "module": "M", "degree": a.witness})
    if b.no:
        return GprojVerdict("not_gproj", bound, a, b, ev_iso,
                            {"reason": "ext", "module": "M*", "degree": b.witness})
    if not ev_iso:
        return GprojVerdict("not_gproj", bound, a, b, ev_iso, {"reason": "evaluation"})
    if a.yes and b.yes:
        return GprojVerdict("gproj", bound, a, b, ev_iso)
    return GprojVerdict("undetermined", bound, a, b, ev_iso)


# -- complete resolutions

@dataclass
class CompleteResolution:
    """A window ``P_n -> ... -> P_0 -> Q_0* -> ... -> Q_n*`` of a totally acyclic complex.

    ``terms`` runs left to right and ``maps[i]`` goes from ``terms[i]`` to
    ``terms[i + 1]``; ``cut`` is the index of ``P_0`` so that ``M`` is the
    image of ``maps[cut]``.
    """

    module: Module
    terms: list
    maps: list
    cut: int
    left: object
    right: object

    def exact_at(self, i: int) -> bool:
        d_in, d_out = self.maps[i - 1], self.maps[i]
        if not (d_out @ d_in).is_zero():
            return False
        return d_in.rank() + d_out.rank() == self.terms[i].n

    def is_exact(self) -> bool:
        return all(self.exact_at(i) for i in range(1, len(self.terms) - 1))

    def dual_is_exact(self) -> bool:
        """Exactness after applying Hom(-, A) to every map."""
        duals = [star_dual_morphism(m) for m in self.maps]
        for i in range(1, len(self.terms) - 1):
            d_in = duals[i]          # T_{i+1}* -> T_i*
            d_out = duals[i - 1]     # T_i* -> T_{i-1}*
            if not (d_out @ d_in).is_zero():
                return False
            if d_in.rank() + d_out.rank() != d_in.target.n:
                return False
        return True

    def recovers_module(self) -> bool:
        """dim of the image at the cut equals dim M."""
        return self.maps[self.cut].rank() == self.module.n


def _resolution_maps(M: Module, n: int) -> tuple[list[Module], list[Morphism], Morphism]:
    """Terms P_0..P_n, differentials P_{k+1} -> P_k and the cover P_0 -> M."""
    res = resolution(M)
    res.ensure(n)
    terms = res.terms[: n + 1]
    diffs = []
    for k in range(1, len(terms)):
        # P_k -> Omega^k -> P_{k-1}
        diffs.append(res.inclusions[k] @ res.covers[k])
    return terms, diffs, res.covers[0]


def complete_resolution(M: Module, bound: int = 4, verdict: GprojVerdict | None = None
                        ) -> CompleteResolution:
    if verdict is None:
        verdict = gproj_test(M, max(bound, 1))
    if not verdict.certified:
        raise NotCertified(f"module is not certified Gorenstein projective: {verdict}")
    P, dP, eps = _resolution_maps(M, bound)
    Ms = star_dual(M)
    Q, dQ, eps_s = _resolution_maps(Ms, bound)
    ev = evaluation_map(M)
    # 0 -> M -> M** -> Q_0* -> Q_1* -> ...
    eta = star_dual_morphism(eps_s)
    Qs = [star_dual(q) for q in Q]
    dQs = [star_dual_morphism(d) for d in dQ]        # Q_k* -> Q_{k+1}*
    mid = eta @ ev @ eps
    terms = list(reversed(P)) + Qs
    maps = list(reversed(dP)) + [mid] + dQs
    cut = len(P) - 1
    return CompleteResolution(M, terms, maps, cut, (P, dP), (Qs, dQs))


def perp_and_gproj_batch(modules: Sequence[Module], bound: int = DEFAULT_BOUND,
                         names: Sequence[str] | None = None) -> list[dict]:
    if not modules:
        return []
    A = modules[0].algebra
    for m in modules:
        if m.algebra is not A and m.algebra != A:
            raise ValueError("batch modules must share an algebra")
    rows = []
    for i, m in enumerate(modules):
        name = names[i] if names else (m.name or f"M{i}")
        p = perp_test(m, bound)
        g = gproj_test(m, bound)
        rows.append({"index": i, "module": name, "dims": list(m.dims),
                     "projective": _is_projective(m),
                     "perp": str(p), "gproj": str(g), "perp_verdict": p, "gproj_verdict": g})
    return rows


def _is_projective(M: Module) -> bool:
    res = resolution(M)
    res.ensure(0)
    return M.n == 0 or (res.terminated and res.length == 0)


__all__ = ["GprojVerdict", "gproj_test", "complete_resolution", "CompleteResolution",
           "perp_and_gproj_batch", "NotCertified"]
