"""Reduction of bound quiver algebras by arrow removal and idempotent corners.

Each applied step records the side conditions it verified, the observed Ext
agreement degree ``t_obs`` for corner steps, and the equivalences and
conjecture transfers it licenses. Those equivalences are claims with
citations, never computed objects.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import BasedAlgebra, algebra_basis, recover_presentation
from .homology import (
    DEFAULT_BOUND, DimVerdict, combine, ext_dim, id_bounded, pd_bounded,
)
from .modules import Module, corner_module, projective, simple
from .presentation import (
    Presentation, arrow_occurs_in_every_min_genset, parse_presentation, quotient_by_arrow,
    relation_endpoints, serialize_presentation,
)

# where each kind of claim comes from; these strings appear verbatim in reports
CITATIONS = {
    "ArrowRemoval": "Corollary 4.1",
    "IdempotentReduction": "Corollary 4.2",
    "VertexRemoval": "Corollary 4.3",
    "TriangularCornerA": "Corollary 4.4",
    "TriangularCornerB": "Corollary 4.5",
    "pd": "Theorem 3.1",
    "gorenstein": "Theorem 3.2",
    "GSC": "Theorem 3.3",
    "singular": "Theorem 3.4",
    "gproj": "Theorem 3.8",
    "ARC": "Theorem 3.9",
    "GPC": "Theorem 3.9",
}

CONJECTURES = ("GSC", "ARC", "GPC")
CONJECTURE_NAMES = {
    "GSC": "Gorenstein symmetry conjecture",
    "ARC": "Auslander-Reiten conjecture",
    "GPC": "Gorenstein projective conjecture",
}
CORNER_KINDS = ("VertexRemoval", "IdempotentReduction", "TriangularCornerA", "TriangularCornerB")
TRACE_FORMAT = "gored-trace/1"


class SideConditionNotCertified(RuntimeError):
    pass


class FalsificationAlarm(RuntimeError):
    pass


def digest(p: Presentation) -> str:
    return hashlib.sha256(serialize_presentation(p).encode()).hexdigest()


# -- candidates

def arrow_candidates(p: Presentation) -> list[str]:
    """Arrows missing from some minimal generating set of the relations."""
    return [a.label for a in p.quiver.arrows
            if not arrow_occurs_in_every_min_genset(p, a.label)]


def vertex_candidates(p: Presentation) -> list[str]:
    """Vertices at which no minimal relation starts or ends."""
    used = relation_endpoints(p)
    return [v for i, v in enumerate(p.quiver.vertices) if i not in used]


# -- side conditions

def global_dimension(A: BasedAlgebra, bound: int = DEFAULT_BOUND) -> DimVerdict:
    return combine([pd_bounded(simple(A, v), bound) for v in range(A.n_vertices)], bound)


def gorenstein_test(A: BasedAlgebra, bound: int = DEFAULT_BOUND) -> "GorensteinVerdict":
    """``id_A A`` and ``id_{A^op} A``, summand by summand."""
    left = combine([id_bounded(projective(A, v), bound) for v in range(A.n_vertices)], bound)
    Aop = A.opposite()
    right = combine([id_bounded(projective(Aop, v), bound) for v in range(A.n_vertices)], bound)
    return GorensteinVerdict(left, right)


@dataclass
class GorensteinVerdict:
    left: DimVerdict
    right: DimVerdict

    @property
    def is_gorenstein(self) -> bool | None:
        """True, False, or None when undecided."""
        if self.left.is_finite and self.right.is_finite:
            return True
        if self.left.is_infinite or self.right.is_infinite:
            return False
        return None

    @property
    def self_injective(self) -> bool:
        return (self.left.is_finite and self.right.is_finite
                and self.left.value == 0 and self.right.value == 0)

    def __iter__(self):
        return iter((self.left, self.right))

    def __str__(self):
        tag = {True: "Gorenstein", False: "not Gorenstein", None: "undetermined"}[self.is_gorenstein]
        return f"{tag} (id_A A: {self.left}, id A_A: {self.right})"

    def to_dict(self):
        return {"id_left": self.left.to_dict(), "id_right": self.right.to_dict(),
                "gorenstein": self.is_gorenstein, "self_injective": self.self_injective}


@dataclass
class IdempotentConditions:
    pd_eA: DimVerdict
    id_top: DimVerdict
    pd_Ae: DimVerdict
    pd_top: DimVerdict

    @property
    def pair_12(self) -> bool:
        return self.pd_eA.is_finite and self.id_top.is_finite

    @property
    def pair_34(self) -> bool:
        return self.pd_Ae.is_finite and self.pd_top.is_finite

    @property
    def admitted(self) -> bool:
        return self.pair_12 or self.pair_34

    def verdicts(self) -> list[DimVerdict]:
        return [self.pd_eA, self.id_top, self.pd_Ae, self.pd_top]

    def to_dict(self):
        return {
            "1_pd_eAe(eA)": self.pd_eA.to_dict(),
            "2_id_A(top(A/AeA))": self.id_top.to_dict(),
            "3_pd_(eAe)op(Ae)": self.pd_Ae.to_dict(),
            "4_pd_A(top(A/AeA))": self.pd_top.to_dict(),
            "admitted_by": ("(1,2)" if self.pair_12 else "") + ("(3,4)" if self.pair_34 else ""),
        }


def idempotent_conditions(A: BasedAlgebra, vertices: Sequence[int],
                          bound: int = DEFAULT_BOUND) -> IdempotentConditions:
    verts = tuple(sorted(set(vertices)))
    C = A.corner(verts)
    Cop = A.opposite().corner(verts)
    # eA and Ae split along the projectives of A and A^op
    eA = [corner_module(projective(A, v), C) for v in range(A.n_vertices)]
    Ae = [corner_module(projective(A.opposite(), v), Cop) for v in range(A.n_vertices)]
    rest = [v for v in range(A.n_vertices) if v not in verts]
    tops = [simple(A, v) for v in rest]
    return IdempotentConditions(
        combine([pd_bounded(m, bound) for m in eA if m.n], bound),
        combine([id_bounded(s, bound) for s in tops], bound),
        combine([pd_bounded(m, bound) for m in Ae if m.n], bound),
        combine([pd_bounded(s, bound) for s in tops], bound),
    )


# -- Ext tails along e(-)

@dataclass
class EHIReport:
    vertices: tuple
    jmax: int
    rows: list
    t_obs: int
    alarm: bool

    def to_dict(self):
        return {"vertices": list(self.vertices), "jmax": self.jmax, "t_obs": self.t_obs,
                "alarm": self.alarm, "rows": self.rows}


def ehi_sample_check(A: BasedAlgebra, vertices: Sequence[int], jmax: int = 12,
                     samples: Sequence[Module] | None = None,
                     names: Sequence[str] | None = None) -> EHIReport:
    """Compare Ext over A with Ext over eAe along M -> eM on sampled pairs."""
    verts = tuple(sorted(set(vertices)))
    C = A.corner(verts)
    if samples is None:
        samples = [simple(A, v) for v in verts]
        names = [f"S{A.vertex_labels[v]}" for v in verts]
    if names is None:
        names = [m.name or f"M{i}" for i, m in enumerate(samples)]
    corners = [corner_module(m, C) for m in samples]
    rows = []
    disagree = set()
    for i, X in enumerate(samples):
        for k, Y in enumerate(samples):
            left = [ext_dim(X, Y, j) for j in range(jmax + 1)]
            right = [ext_dim(corners[i], corners[k], j) for j in range(jmax + 1)]
            rows.append({"X": names[i], "Y": names[k], "A": left, "eAe": right})
            disagree.update(j for j in range(jmax + 1) if left[j] != right[j])
    t_obs = max(disagree) if disagree else 0
    return EHIReport(verts, jmax, rows, t_obs, alarm=bool(disagree) and t_obs >= jmax)


def step_samples(A: BasedAlgebra) -> tuple[list[Module], list[str]]:
    """Samples for a step's t_obs: every simple and every indecomposable projective.

    Simples off e vanish under the corner functor and projectives on e map to
    the summands of eAe, so both can disagree in degrees the simples on e miss.
    """
    labels = A.vertex_labels
    mods = [simple(A, v) for v in range(A.n_vertices)]
    mods += [projective(A, v) for v in range(A.n_vertices)]
    names = [f"S{x}" for x in labels] + [f"P{x}" for x in labels]
    return mods, names


# -- steps and traces

@dataclass
class ReductionStep:
    kind: str
    params: dict
    source: str = ""
    target: str = ""
    description: str = ""
    side_conditions: dict = field(default_factory=dict)
    t_obs: int | None = None
    ehi: dict | None = None
    gorenstein: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    applied: bool = False
    core: str = ""
    reason: str = ""

    def to_dict(self):
        return {
            "kind": self.kind, "params": self.params, "source": self.source,
            "target": self.target, "description": self.description,
            "side_conditions": self.side_conditions, "t_obs": self.t_obs, "ehi": self.ehi,
            "gorenstein": self.gorenstein, "assertions": self.assertions,
            "applied": self.applied, "core": self.core, "reason": self.reason,
            "citation": CITATIONS[self.kind],
        }

    @classmethod
    def from_dict(cls, d):
        keys = ("kind", "params", "source", "target", "description", "side_conditions",
                "t_obs", "ehi", "gorenstein", "assertions", "applied", "core", "reason")
        return cls(**{k: d[k] for k in keys if k in d})


def _claims(kind: str, src: str, tgt: str) -> list[dict]:
    step = CITATIONS[kind]
    out = [
        {"claim": f"D_sg({src}) ≃ D_sg({tgt})", "cite": [step, CITATIONS["singular"]]},
        {"claim": f"Gproj-stable({src}) ≃ Gproj-stable({tgt})", "cite": [step, CITATIONS["gproj"]]},
        {"claim": f"D_def({src}) ≃ D_def({tgt})", "cite": [step, CITATIONS["gproj"]]},
        {"claim": f"{src} Gorenstein ⇔ {tgt} Gorenstein", "cite": [step, CITATIONS["gorenstein"]]},
    ]
    for c in CONJECTURES:
        out.append({"claim": f"{c}({src}) ⇔ {c}({tgt})", "cite": [step, CITATIONS[c]]})
    return out


def _name(k: int) -> str:
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    return letters[k] if k < len(letters) else f"A{k}"


def _vertex_indices(p: Presentation, labels) -> list[int]:
    out = []
    for lab in labels:
        try:
            out.append(p.quiver.vertex_index(str(lab)))
        except (KeyError, ValueError):
            raise SideConditionNotCertified(f"unknown vertex {lab!r}") from None
    return sorted(set(out))


def execute(p: Presentation, kind: str, params: dict) -> Presentation:
    """Carry out a step without checking anything (used by replay)."""
    if kind == "ArrowRemoval":
        return quotient_by_arrow(p, params["arrow"])
    keep = _vertex_indices(p, params["keep"])
    C = algebra_basis(p).corner(keep)
    return recover_presentation(C)


@dataclass
class Config:
    bound: int = DEFAULT_BOUND
    jmax: int = 12
    seed: int = 0
    strategy: str = "vertices-first"
    check_gorenstein: bool = True

    def to_dict(self):
        return {"bound": self.bound, "jmax": self.jmax, "seed": self.seed,
                "strategy": self.strategy, "check_gorenstein": self.check_gorenstein}


def apply_step(p: Presentation, kind: str, params: dict, config: Config | None = None,
               source: str = "A", target: str = "B",
               gorenstein_source: GorensteinVerdict | None = None
               ) -> tuple[Presentation, ReductionStep, GorensteinVerdict | None]:
    """Verify side conditions and perform one step.

    Raises ``SideConditionNotCertified`` (leaving ``p`` untouched) when the
    conditions are not certified, and ``FalsificationAlarm`` when a check
    contradicts a theorem.
    """
    config = config or Config()
    bound = config.bound
    step = ReductionStep(kind, dict(params), source, target)
    A = algebra_basis(p)
    if kind == "ArrowRemoval":
        label = params["arrow"]
        if label not in [a.label for a in p.quiver.arrows]:
            raise SideConditionNotCertified(f"unknown arrow {label!r}")
        avoidable = not arrow_occurs_in_every_min_genset(p, label)
        step.side_conditions = {"arrow_avoids_some_minimal_generating_set": avoidable}
        if not avoidable:
            raise SideConditionNotCertified(f"{label} occurs in every minimal generating set")
        q = quotient_by_arrow(p, label)
        step.description = f"{target} = {source}/<{label}>"
    elif kind in CORNER_KINDS:
        keep = _vertex_indices(p, params["keep"])
        if not keep:
            raise SideConditionNotCertified("empty idempotent")
        conds = idempotent_conditions(A, keep, bound)
        step.side_conditions = conds.to_dict()
        if kind.startswith("Triangular"):
            step.side_conditions.update(params.get("triangular_conditions", {}))
        if not conds.admitted:
            if kind == "VertexRemoval" and any(v.is_infinite for v in conds.verdicts()) \
                    and not any(v.kind == "at_least" for v in conds.verdicts()):
                raise FalsificationAlarm("vertex removal side conditions certified infinite")
            raise SideConditionNotCertified("no admitting pair of side conditions")
        samples, names = step_samples(A)
        ehi = ehi_sample_check(A, keep, config.jmax, samples, names)
        step.ehi = ehi.to_dict()
        step.t_obs = ehi.t_obs
        if ehi.alarm:
            raise FalsificationAlarm(f"Ext tails disagree up to degree {config.jmax}")
        q = recover_presentation(A.corner(keep))
        labels = "+".join(f"e{p.quiver.vertices[v]}" for v in keep)
        step.description = f"{target} = e{source}e with e = {labels}"
    else:
        raise ValueError(f"unknown step kind {kind!r}")
    if config.check_gorenstein:
        g_src = gorenstein_source or gorenstein_test(A, bound)
        g_tgt = gorenstein_test(algebra_basis(q), bound)
        step.gorenstein = {"source": g_src.to_dict(), "target": g_tgt.to_dict()}
        if g_src.is_gorenstein is not None and g_tgt.is_gorenstein is not None \
                and g_src.is_gorenstein != g_tgt.is_gorenstein:
            raise FalsificationAlarm("Gorensteinness changed across a reduction step")
    else:
        g_tgt = None
    step.applied = True
    step.assertions = _claims(kind, source, target)
    step.core = serialize_presentation(q)
    return q, step, g_tgt


class ReductionTrace:
    def __init__(self, data: dict):
        self.data = data

    @property
    def steps(self) -> list[ReductionStep]:
        return [ReductionStep.from_dict(s) for s in self.data["steps"]]

    @property
    def rejected(self) -> list[dict]:
        return self.data["rejected"]

    @property
    def core(self) -> Presentation:
        return parse_presentation(self.data["core"]["algebra"])

    @property
    def initial(self) -> Presentation:
        return parse_presentation(self.data["input"]["algebra"])

    @property
    def summary(self) -> dict:
        return self.data["summary"]

    @property
    def assertions(self) -> list:
        return self.data["assertions"]

    @property
    def alarms(self) -> list:
        return self.data["alarms"]

    @property
    def exit_code(self) -> int:
        return self.data["exit_code"]

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReductionTrace":
        data = json.loads(text)
        if data.get("format") != TRACE_FORMAT:
            raise ValueError("not a reduction trace")
        return cls(data)

    def __eq__(self, other):
        return isinstance(other, ReductionTrace) and self.to_json() == other.to_json()

    def replay(self) -> Presentation:
        p = self.initial
        for s in self.data["steps"]:
            p = execute(p, s["kind"], s["params"])
            if serialize_presentation(p) != s["core"]:
                raise ValueError(f"replay diverged at step {s['target']}")
        return p

    def verify_replay(self) -> bool:
        try:
            return serialize_presentation(self.replay()) == self.data["core"]["algebra"]
        except ValueError:
            return False


def _core_classes(p: Presentation, A: BasedAlgebra) -> list[str]:
    out = []
    if p.is_monomial():
        out.append("monomial")
    layers = A.loewy_layers()
    if len(layers) <= 2 or layers[1] == 0:
        out.append("radical-square-zero")
    if A.n_vertices == 1:
        out.append("local")
        if len(layers) <= 3 or layers[2] == 0:
            out.append("local-radical-cube-zero")
    return out


def _known_good(classes: Sequence[str], gorenstein: bool | None) -> dict[str, str]:
    """Conjectures known to hold for the given classes, with the class as reason."""
    out: dict[str, str] = {}
    for c in classes:
        if c == "monomial":
            for k in CONJECTURES:
                out.setdefault(k, "monomial algebra")
        elif c == "radical-square-zero":
            out.setdefault("ARC", "radical square zero")
            out.setdefault("GPC", "radical square zero")
        elif c == "local-radical-cube-zero":
            out.setdefault("ARC", "local with radical cube zero")
            out.setdefault("GPC", "local with radical cube zero")
    if gorenstein:
        out.setdefault("GSC", "certified Gorenstein")
    return out


def reduce(p: Presentation, strategy: str = "vertices-first", bound: int = DEFAULT_BOUND,
           idempotents: Sequence[Sequence[str]] = (), jmax: int = 12, seed: int = 0,
           check_gorenstein: bool = True) -> ReductionTrace:
    """Greedy reduction loop.

    With ``vertices-first`` every round removes all vertex candidates at once
    until none remain, then applies pending user idempotents, then removes one
    arrow candidate (declaration order) and starts over. ``arrows-first``
    removes arrow candidates before looking at vertices.
    """
    if strategy not in ("vertices-first", "arrows-first"):
        raise ValueError(f"unknown strategy {strategy!r}")
    config = Config(bound, jmax, seed, strategy, check_gorenstein)
    state = p
    steps: list[ReductionStep] = []
    rejected: list[dict] = []
    alarms: list[str] = []
    pending = [list(map(str, e)) for e in idempotents]
    g_state = None
    k = 0
    tried_arrows: set = set()
    tried_vertices: set = set()

    def attempt(kind, params):
        nonlocal state, g_state, k
        try:
            q, step, g = apply_step(state, kind, params, config, _name(k), _name(k + 1), g_state)
        except SideConditionNotCertified as exc:
            rejected.append({"kind": kind, "params": params, "at": _name(k), "reason": str(exc)})
            return False
        except FalsificationAlarm as exc:
            alarms.append(f"{kind} {params}: {exc}")
            return False
        steps.append(step)
        state, g_state = q, g
        k += 1
        return True

    def vertex_round():
        cands = vertex_candidates(state)
        key = (serialize_presentation(state), tuple(cands))
        if not cands or key in tried_vertices:
            return False
        tried_vertices.add(key)
        verts = state.quiver.vertices
        if len(cands) == len(verts):
            cands = cands[1:]
            if not cands:
                return False
        keep = [v for v in verts if v not in cands]
        return attempt("VertexRemoval", {"remove": cands, "keep": keep})

    def arrow_round():
        for a in arrow_candidates(state):
            key = (serialize_presentation(state), a)
            if key in tried_arrows:
                continue
            tried_arrows.add(key)
            if attempt("ArrowRemoval", {"arrow": a}):
                return True
        return False

    def user_round():
        while pending:
            e = pending.pop(0)
            keep = [v for v in state.quiver.vertices if v in e]
            if sorted(keep) == sorted(state.quiver.vertices):
                rejected.append({"kind": "IdempotentReduction", "params": {"keep": e},
                                 "at": _name(k), "reason": "idempotent is the identity"})
                continue
            if not keep:
                rejected.append({"kind": "IdempotentReduction", "params": {"keep": e},
                                 "at": _name(k), "reason": "no remaining vertex in e"})
                continue
            if attempt("IdempotentReduction", {"keep": keep}):
                return True
        return False

    while True:
        if strategy == "vertices-first":
            if vertex_round() or user_round() or arrow_round():
                continue
        else:
            if arrow_round() or vertex_round() or user_round():
                continue
        break

    A = algebra_basis(state)
    g_core = g_state if g_state is not None else gorenstein_test(A, bound)
    classes = _core_classes(state, A)
    core_name = _name(k)
    summary = {
        "steps_applied": len(steps),
        "core_self_injective": g_core.self_injective,
        "core_gorenstein": g_core.to_dict(),
        "core_classes": classes,
        "core_dimension": state.dimension,
    }
    assertions = []
    if steps:
        src_cites = sorted({CITATIONS[s.kind] for s in steps})
        assertions += [
            {"claim": f"Gproj-stable(A) ≃ Gproj-stable({core_name})",
             "cite": src_cites + [CITATIONS["gproj"]]},
            {"claim": f"D_def(A) ≃ D_def({core_name})", "cite": src_cites + [CITATIONS["gproj"]]},
            {"claim": f"D_sg(A) ≃ D_sg({core_name})", "cite": src_cites + [CITATIONS["singular"]]},
            {"claim": f"A Gorenstein ⇔ {core_name} Gorenstein",
             "cite": src_cites + [CITATIONS["gorenstein"]]},
        ]
    if g_core.is_gorenstein:
        assertions.append({"claim": f"D_def({core_name}) ≃ 0", "cite": ["gorenstein_test"]})
        if steps:
            assertions.append({"claim": "D_def(A) ≃ 0", "cite": ["gorenstein_test", "transfer"]})
    if g_core.self_injective:
        assertions.append({"claim": f"Gproj-stable({core_name}) = mod-stable({core_name})",
                           "cite": ["self-injective"]})
    summary["input_gorenstein_by_transfer"] = g_core.is_gorenstein
    undecided = [s for s in steps for g in s.gorenstein.values() if g["gorenstein"] is None]
    if alarms:
        code = 3
    elif rejected and any(r["kind"] == "IdempotentReduction" for r in rejected):
        code = 2
    elif g_core.is_gorenstein is None or undecided:
        code = 2
    else:
        code = 0
    data = {
        "format": TRACE_FORMAT,
        "config": config.to_dict(),
        "input": {"name": "A", "algebra": serialize_presentation(p), "digest": digest(p)},
        "steps": [s.to_dict() for s in steps],
        "rejected": rejected,
        "core": {"name": core_name, "algebra": serialize_presentation(state),
                 "digest": digest(state)},
        "summary": summary,
        "assertions": assertions,
        "alarms": alarms,
        "exit_code": code,
    }
    return ReductionTrace(data)


def conjecture_report(trace: ReductionTrace) -> dict:
    steps = trace.data["steps"]
    core = trace.data["core"]["name"]
    classes = trace.summary.get("core_classes", [])
    gor = trace.summary.get("core_gorenstein", {}).get("gorenstein")
    conditional = []
    for c in CONJECTURES:
        cites = []
        for s in steps:
            for ref in (CITATIONS[s["kind"]], CITATIONS[c]):
                if ref not in cites:
                    cites.append(ref)
        conditional.append({
            "conjecture": c,
            "statement": f"A satisfies {c} iff {core} satisfies {c}",
            "citations": cites,
            "tautology": not steps,
        })
    unconditional = []
    for c, why in sorted(_known_good(classes, gor).items()):
        stmt = f"{c} holds for {core} ({why})"
        if steps:
            stmt += ", hence for A"
        unconditional.append({"conjecture": c, "statement": stmt, "reason": why,
                              "citations": conditional[CONJECTURES.index(c)]["citations"]})
    lines = []
    for row in conditional:
        cite = ", ".join(row["citations"]) if row["citations"] else "no steps"
        lines.append(f"{row['statement']}  [{cite}]")
    for row in unconditional:
        lines.append(row["statement"])
    descr = [s["description"] for s in steps]
    return {"conditional": conditional, "unconditional": unconditional,
            "steps": descr, "text": "\n".join(lines)}


# -- triangular matrix algebras

def triangular_conditions(T: BasedAlgebra, side: str, bound: int = DEFAULT_BOUND) -> dict:
    """Conditions for reducing ``T = [[A, M], [0, B]]`` to its A or B corner."""
    A, B, _ = T.triangular_parts
    nA = A.n_vertices
    if side == "A":
        gl = global_dimension(B, bound)
        C = T.corner(tuple(range(nA)))
        mods = [corner_module(projective(T, v), C) for v in range(nA, T.n_vertices)]
        pdM = combine([pd_bounded(m, bound) for m in mods if m.n], bound)
        ok = gl.is_finite and pdM.is_finite
        return {"gl.dim B": gl.to_dict(), "pd_A M": pdM.to_dict(), "admitted": ok}
    if side == "B":
        gl = global_dimension(A, bound)
        Top = T.opposite()
        C = Top.corner(tuple(range(nA, T.n_vertices)))
        mods = [corner_module(projective(Top, v), C) for v in range(nA)]
        pdM = combine([pd_bounded(m, bound) for m in mods if m.n], bound)
        ok = gl.is_finite and pdM.is_finite
        return {"gl.dim A": gl.to_dict(), "pd_Bop M": pdM.to_dict(), "admitted": ok}
    raise ValueError("side must be 'A' or 'B'")


def reduce_triangular(T: BasedAlgebra, side: str, bound: int = DEFAULT_BOUND,
                      jmax: int = 12) -> ReductionTrace:
    """One corner step from a triangular matrix algebra to A or B."""
    A, B, _ = T.triangular_parts
    p = recover_presentation(T)
    nA = A.n_vertices
    verts = range(nA) if side == "A" else range(nA, T.n_vertices)
    keep = [T.vertex_labels[v] for v in verts]
    conds = triangular_conditions(T, side, bound)
    kind = "TriangularCornerA" if side == "A" else "TriangularCornerB"
    config = Config(bound, jmax)
    steps, rejected, alarms = [], [], []
    state = p
    if conds["admitted"]:
        try:
            state, step, _ = apply_step(p, kind, {"keep": keep, "triangular_conditions": conds},
                                        config, "T", _name(1 if side == "A" else 2))
            steps.append(step)
        except SideConditionNotCertified as exc:
            rejected.append({"kind": kind, "params": {"keep": keep}, "at": "T", "reason": str(exc)})
        except FalsificationAlarm as exc:
            alarms.append(str(exc))
    else:
        rejected.append({"kind": kind, "params": {"keep": keep}, "at": "T",
                         "reason": "triangular side conditions not certified"})
    g = gorenstein_test(algebra_basis(state), bound)
    data = {
        "format": TRACE_FORMAT,
        "config": config.to_dict(),
        "input": {"name": "T", "algebra": serialize_presentation(p), "digest": digest(p)},
        "steps": [s.to_dict() for s in steps],
        "rejected": rejected,
        "core": {"name": steps[-1].target if steps else "T",
                 "algebra": serialize_presentation(state), "digest": digest(state)},
        "summary": {"steps_applied": len(steps), "core_self_injective": g.self_injective,
                    "core_gorenstein": g.to_dict(),
                    "core_classes": _core_classes(state, algebra_basis(state)),
                    "core_dimension": state.dimension,
                    "triangular_conditions": conds},
        "assertions": [],
        "alarms": alarms,
        "exit_code": 3 if alarms else (0 if steps else 2),
    }
    return ReductionTrace(data)


__all__ = [
    "CITATIONS", "arrow_candidates", "vertex_candidates", "idempotent_conditions",
    "IdempotentConditions", "gorenstein_test", "GorensteinVerdict", "global_dimension",
    "ehi_sample_check", "step_samples", "EHIReport", "ReductionStep", "ReductionTrace", "apply_step", "execute",
    "reduce", "conjecture_report", "SideConditionNotCertified", "FalsificationAlarm",
    "triangular_conditions", "reduce_triangular", "digest", "Config",
]
