"""Bound quiver presentations: quivers, paths, relations and rewriting.

Paths compose right to left: the word ``b*a`` means "first ``a``, then ``b``".
Words are stored in written order, so ``word[-1]`` is the first arrow applied.
Paths are ordered by length, then lexicographically on the written word with
arrows ranked by declaration order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Sequence

from .exactfield import QQ, Echelon, Field, parse_field


class PresentationError(ValueError):
    pass


class ParseError(PresentationError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class NotAdmissibleRelation(PresentationError):
    pass


class NonParallelRelation(PresentationError):
    pass


class UnknownArrow(PresentationError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class CompletionOverflow(PresentationError):
    pass


class NotAdmissibleUpToCap(PresentationError):
    pass


@dataclass(frozen=True)
class Arrow:
    label: str
    source: int
    target: int


class Quiver:
    def __init__(self, vertices: Sequence[str], arrows: Sequence[tuple[str, str, str]]):
        self.vertices = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise PresentationError("duplicate vertex label")
        self._vindex = {v: i for i, v in enumerate(self.vertices)}
        self.arrows: list[Arrow] = []
        for label, s, t in arrows:
            if s not in self._vindex or t not in self._vindex:
                raise PresentationError(f"arrow {label} has an undeclared endpoint")
            self.arrows.append(Arrow(label, self._vindex[s], self._vindex[t]))
        labels = [a.label for a in self.arrows]
        if len(set(labels)) != len(labels):
            raise PresentationError("duplicate arrow label")
        self._aindex = {a.label: i for i, a in enumerate(self.arrows)}

    def vertex_index(self, label: str) -> int:
        try:
            return self._vindex[label]
        except KeyError:
            raise PresentationError(f"unknown vertex {label!r}") from None

    def arrow_index(self, label: str) -> int:
        try:
            return self._aindex[label]
        except KeyError:
            raise UnknownArrow(f"unknown arrow {label!r}") from None

    def __eq__(self, other):
        return (isinstance(other, Quiver) and self.vertices == other.vertices
                and self.arrows == other.arrows)

    def __repr__(self):
        return f"Quiver({len(self.vertices)} vertices, {len(self.arrows)} arrows)"


@dataclass(frozen=True)
class Path:
    source: int
    target: int
    word: tuple = ()

    def __len__(self):
        return len(self.word)

    @property
    def key(self):
        # trivial paths sort before everything else, by vertex
        return (len(self.word), self.word, self.source)

    def __lt__(self, other):
        return self.key < other.key

    def __gt__(self, other):
        return self.key > other.key


def compose(p: Path, q: Path) -> Path | None:
    """``p*q`` (q first), or None when q does not end where p starts."""
    if q.target != p.source:
        return None
    return Path(q.source, p.target, p.word + q.word)


def path_from_word(quiver: Quiver, word: Sequence[int]) -> Path:
    arrs = quiver.arrows
    for i in range(len(word) - 1):
        if arrs[word[i + 1]].target != arrs[word[i]].source:
            raise PresentationError("arrows do not compose")
    return Path(arrs[word[-1]].source, arrs[word[0]].target, tuple(word))


def path_label(quiver: Quiver, p: Path) -> str:
    if not p.word:
        return f"e_{quiver.vertices[p.source]}"
    return "*".join(quiver.arrows[i].label for i in p.word)


# PathPoly: dict {Path: nonzero scalar}. Helpers below keep that invariant.

def poly_add(acc: dict, p: Path, c, field: Field) -> None:
    v = field.norm(acc.get(p, 0) + c)
    if v == 0:
        acc.pop(p, None)
    else:
        acc[p] = v


def poly_tip(poly: dict) -> Path:
    return max(poly, key=lambda p: p.key)


def poly_terms(poly: dict) -> list[tuple[Path, object]]:
    return sorted(poly.items(), key=lambda t: t[0].key, reverse=True)


def poly_is_parallel(poly: dict) -> bool:
    ends = {(p.source, p.target) for p in poly}
    return len(ends) <= 1


@dataclass
class Rule:
    tip: Path
    tail: dict  # tip rewrites to tail

    def poly(self, field: Field) -> dict:
        out = {self.tip: 1}
        for p, c in self.tail.items():
            poly_add(out, p, -c, field)
        return out


class ReductionSystem:
    """Rewrite rules ``tip -> tail`` for a path-algebra ideal."""

    def __init__(self, quiver: Quiver, field: Field, rules: list[Rule], degree_cap: int):
        self.quiver = quiver
        self.field = field
        self.rules = rules
        self.degree_cap = degree_cap
        self._by_word = {r.tip.word: r for r in rules}
        self._lengths = sorted({len(r.tip.word) for r in rules})
        self._nf_cache: dict[Path, dict] = {}

    def find_tip(self, word: tuple):
        n = len(word)
        for L in self._lengths:
            if L > n:
                break
            for i in range(n - L + 1):
                r = self._by_word.get(word[i:i + L])
                if r is not None:
                    return r, i
        return None

    def is_normal(self, p: Path) -> bool:
        return self.find_tip(p.word) is None

    def normal_form_path(self, p: Path) -> dict:
        hit = self._nf_cache.get(p)
        if hit is None:
            hit = self.normal_form({p: 1})
            self._nf_cache[p] = hit
        return hit

    def normal_form(self, poly: dict) -> dict:
        f = self.field
        work = dict(poly)
        result: dict = {}
        while work:
            p = poly_tip(work)
            c = work.pop(p)
            found = self.find_tip(p.word)
            if found is None:
                result[p] = c
                continue
            rule, i = found
            left = p.word[:i]
            right = p.word[i + len(rule.tip.word):]
            for q, d in rule.tail.items():
                if left or right:
                    w = left + q.word + right
                    src = p.source
                    tgt = p.target
                    new = Path(src, tgt, w)
                else:
                    new = q
                poly_add(work, new, c * d, f)
        return result

    def __len__(self):
        return len(self.rules)


def _make_rule(poly: dict, field: Field) -> Rule:
    tip = poly_tip(poly)
    lc = poly[tip]
    tail = {}
    for p, c in poly.items():
        if p != tip:
            tail[p] = field.norm(-field.div(c, lc))
    return Rule(tip, tail)


def _overlaps(s: tuple, t: tuple):
    """Lengths k with s ending in the first k letters of t (proper overlaps)."""
    for k in range(1, min(len(s), len(t))):
        if s[-k:] == t[:k]:
            yield k


def complete_rewrite_system(quiver: Quiver, field: Field, relations: Sequence[dict],
                            degree_cap: int) -> ReductionSystem:
    """Buchberger-style completion for the two-sided ideal of a path algebra.

    Raises CompletionOverflow if a rule with tip longer than ``degree_cap``
    would be needed.
    """
    rules: list[Rule] = []
    checked: set = set()

    def system():
        return ReductionSystem(quiver, field, rules, degree_cap)

    def insert(poly: dict) -> bool:
        nonlocal rules
        nf = system().normal_form(poly)
        if not nf:
            return False
        rule = _make_rule(nf, field)
        if len(rule.tip.word) > degree_cap:
            raise CompletionOverflow(
                f"completion needs a rule of length {len(rule.tip.word)} > cap {degree_cap}")
        displaced = [r for r in rules if _contains(r.tip.word, rule.tip.word)]
        rules = [r for r in rules if not _contains(r.tip.word, rule.tip.word)]
        rules.append(rule)
        rules.sort(key=lambda r: r.tip.key)
        # tails must stay normal after adding a rule
        sysm = system()
        for r in rules:
            r.tail = sysm.normal_form(r.tail)
        for r in displaced:
            insert(r.poly(field))
        return True

    for rel in sorted(relations, key=lambda r: poly_tip(r).key):
        insert(rel)

    while True:
        candidates = []
        for i, r1 in enumerate(rules):
            for j, r2 in enumerate(rules):
                for k in _overlaps(r1.tip.word, r2.tip.word):
                    w_len = len(r1.tip.word) + len(r2.tip.word) - k
                    key = (r1.tip.word, tuple(sorted(r1.tail.items(), key=lambda t: t[0].key)),
                           r2.tip.word, tuple(sorted(r2.tail.items(), key=lambda t: t[0].key)), k)
                    if key in checked:
                        continue
                    candidates.append((w_len, i, j, k, key))
        if not candidates:
            break
        candidates.sort(key=lambda c: c[:4])
        progressed = False
        for w_len, i, j, k, key in candidates:
            r1, r2 = rules[i], rules[j]
            checked.add(key)
            s_poly = _s_polynomial(r1, r2, k, field)
            if insert(s_poly):
                progressed = True
                break
        if not progressed:
            break
    return ReductionSystem(quiver, field, rules, degree_cap)


def _contains(word: tuple, sub: tuple) -> bool:
    n, m = len(word), len(sub)
    return any(word[i:i + m] == sub for i in range(n - m + 1))


def _s_polynomial(r1: Rule, r2: Rule, k: int, field: Field) -> dict:
    s, t = r1.tip, r2.tip
    right = t.word[k:]
    left = s.word[:len(s.word) - k]
    src, tgt = t.source, s.target
    out: dict = {}
    # rewrite the leading copy of s, then the trailing copy of t
    for q, c in r1.tail.items():
        poly_add(out, Path(src, tgt, q.word + right), c, field)
    for q, c in r2.tail.items():
        poly_add(out, Path(src, tgt, left + q.word), -c, field)
    return out


# ---------------------------------------------------------------- file format

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<label>[^\W\d][\w'.]*)|(?P<op>[-+*^]))",
                    re.UNICODE)


def _tokenize(expr: str, line: int, col0: int):
    pos = 0
    out = []
    while pos < len(expr):
        if expr[pos:].strip() == "":
            break
        m = _TOKEN.match(expr, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {expr[pos:].strip()[0]!r}", line,
                             col0 + pos + (len(expr[pos:]) - len(expr[pos:].lstrip())) + 1)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), col0 + start + 1))
        pos = m.end()
    return out


def parse_relation(expr: str, quiver: Quiver, field: Field, line: int = 0, col0: int = 0) -> dict:
    """Parse ``[coeff*]arrow*arrow... (+|-) ...`` into a PathPoly."""
    toks = _tokenize(expr, line, col0)
    if not toks:
        raise ParseError("empty relation", line, col0 + 1)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None, col0 + len(expr) + 1)

    terms = []
    sign = 1
    while True:
        while peek()[0] == "op" and peek()[1] in "+-":
            if peek()[1] == "-":
                sign = -sign
            pos += 1
        kind, val, col = peek()
        if kind is None:
            raise ParseError("relation ends unexpectedly", line, col)
        coeffs, word = [], []
        while True:
            kind, val, fcol = peek()
            if kind == "num":
                coeffs.append(val)
                pos += 1
            elif kind == "label":
                if val not in quiver._aindex:
                    raise UnknownArrow(f"line {line}, column {fcol}: unknown arrow {val!r}")
                pos += 1
                reps = 1
                if peek()[1] == "^":
                    pos += 1
                    k2, v2, c2 = peek()
                    if k2 != "num" or "/" in v2 or int(v2) < 1:
                        raise ParseError("exponent must be a positive integer", line, c2)
                    reps = int(v2)
                    pos += 1
                word.extend([quiver._aindex[val]] * reps)
            else:
                raise ParseError(f"expected a coefficient or arrow, got {val!r}", line, fcol)
            if peek()[1] == "*":
                pos += 1
                continue
            break
        terms.append((sign, coeffs, word, col))
        sign = 1
        kind, val, col = peek()
        if kind is None:
            break
        if not (kind == "op" and val in "+-"):
            raise ParseError(f"expected '+' or '-', got {val!r}", line, col)

    poly: dict = {}
    for sign, coeffs, word, col in terms:
        c = field(sign)
        for x in coeffs:
            c = field.norm(c * field(x))
        if len(word) < 2:
            raise NotAdmissibleRelation(
                f"line {line}, column {col}: relation term of length {len(word)}; "
                "relations must lie in J^2")
        try:
            p = path_from_word(quiver, word)
        except PresentationError:
            raise ParseError("arrows in term do not compose (paths are written right to left)",
                             line, col) from None
        poly_add(poly, p, c, field)
    if not poly_is_parallel(poly):
        raise NonParallelRelation(f"line {line}: relation terms are not parallel paths")
    return poly


def format_poly(quiver: Quiver, field: Field, poly: dict) -> str:
    parts = []
    for p, c in poly_terms(poly):
        s = field.format(c)
        neg = s.startswith("-")
        mag = s[1:] if neg else s
        body = path_label(quiver, p)
        term = body if mag == "1" else f"{mag}*{body}"
        if not parts:
            parts.append(("-" if neg else "") + term)
        else:
            parts.append(("- " if neg else "+ ") + term)
    return " ".join(parts) if parts else "0"


@dataclass
class Presentation:
    quiver: Quiver
    field: Field = QQ
    relations: list = dc_field(default_factory=list)
    degree_cap: int | None = None

    def __post_init__(self):
        for rel in self.relations:
            if not rel:
                raise NotAdmissibleRelation("zero relation")
            if any(len(p.word) < 2 for p in rel):
                raise NotAdmissibleRelation("relation term of length < 2; relations must lie in J^2")
            if not poly_is_parallel(rel):
                raise NonParallelRelation("relation terms are not parallel paths")

    @property
    def vertices(self):
        return self.quiver.vertices

    @property
    def arrows(self):
        return self.quiver.arrows

    def default_cap(self) -> int:
        longest = max((len(p.word) for r in self.relations for p in r), default=0)
        return max(10, 3 * longest)

    @cached_property
    def rewriting(self) -> ReductionSystem:
        cap = self.degree_cap or self.default_cap()
        return complete_rewrite_system(self.quiver, self.field, self.relations, cap)

    @cached_property
    def nilpotency(self) -> int:
        return check_admissible(self)

    @cached_property
    def normal_paths(self) -> list[Path]:
        return normal_form_paths(self)

    @property
    def dimension(self) -> int:
        return len(self.normal_paths)

    def is_monomial(self) -> bool:
        return all(len(r.tail) == 0 for r in self.rewriting.rules)

    def serialize(self) -> str:
        return serialize_presentation(self)

    def __eq__(self, other):
        return isinstance(other, Presentation) and self.serialize() == other.serialize()


def parse_presentation(text: str, field: Field | None = None) -> Presentation:
    """Parse the ``.alg`` text format.

    ``field`` overrides the file's ``field`` line when given.
    """
    file_field: Field | None = None
    vertices: list[str] = []
    arrows: list[tuple[str, str, str]] = []
    rel_lines: list[tuple[int, int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        key, _, rest = stripped.partition(" ")
        rest_col = indent + len(key) + 2
        rest = rest.strip()
        if key == "field":
            try:
                file_field = parse_field(rest)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, rest_col) from None
        elif key == "vertex":
            for lab in rest.replace(",", " ").split():
                vertices.append(lab)
        elif key == "arrow":
            m = re.fullmatch(r"(\S+?)\s*:\s*(\S+)\s*->\s*(\S+)", rest)
            if not m:
                raise ParseError("expected 'arrow <label>: <source> -> <target>'", lineno, rest_col)
            label, s, t = m.groups()
            if not re.fullmatch(r"[^\W\d][\w'.]*", label):
                raise ParseError(f"invalid arrow label {label!r}", lineno, rest_col)
            if s not in vertices or t not in vertices:
                bad = s if s not in vertices else t
                raise ParseError(f"undeclared vertex {bad!r}", lineno, rest_col)
            arrows.append((label, s, t))
        elif key == "relation":
            rel_lines.append((lineno, indent + len(key) + 1, line[indent + len(key):]))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno, indent + 1)
    if not vertices:
        raise ParseError("no vertices declared", 1, 1)
    try:
        quiver = Quiver(vertices, arrows)
    except PresentationError as exc:
        raise ParseError(str(exc)) from None
    fld = field or file_field or QQ
    relations = []
    for lineno, col0, expr in rel_lines:
        poly = parse_relation(expr, quiver, fld, lineno, col0)
        if poly:
            relations.append(poly)
    return Presentation(quiver, fld, relations)


def serialize_presentation(p: Presentation) -> str:
    lines = [f"field {p.field}"]
    for v in p.quiver.vertices:
        lines.append(f"vertex {v}")
    for a in p.quiver.arrows:
        lines.append(f"arrow {a.label}: {p.quiver.vertices[a.source]} -> {p.quiver.vertices[a.target]}")
    for rel in p.relations:
        lines.append(f"relation {format_poly(p.quiver, p.field, rel)}")
    return "\n".join(lines) + "\n"


def load_presentation(path, field: Field | None = None) -> Presentation:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read(), field)


# ---------------------------------------------------------------- admissibility

def check_admissible(p: Presentation, cap: int | None = None) -> int:
    """Smallest N with every path of length N in the ideal (J^N inside I)."""
    rs = p.rewriting
    cap = cap if cap is not None else rs.degree_cap
    f = p.field
    arrows = p.quiver.arrows
    # layer holds a basis of J^n + I / I in normal-form coordinates
    layer = [{Path(v, v): 1} for v in range(len(p.quiver.vertices))]
    n = 0
    while layer:
        if n >= cap:
            raise NotAdmissibleUpToCap(f"paths of length {cap} survive; ideal not admissible up to cap")
        n += 1
        ech = Echelon(f)
        index: dict[Path, int] = {}
        nxt = []
        for vec in layer:
            for ai, a in enumerate(arrows):
                prod: dict = {}
                for q, c in vec.items():
                    if q.target != a.source:
                        continue
                    pq = Path(q.source, a.target, (ai,) + q.word)
                    for r, d in rs.normal_form_path(pq).items():
                        poly_add(prod, r, c * d, f)
                if not prod:
                    continue
                sparse = {}
                for r, c in prod.items():
                    if r not in index:
                        index[r] = len(index)
                    sparse[index[r]] = c
                if ech.add(sparse):
                    nxt.append(prod)
        layer = nxt
    return n


def normal_form_paths(p: Presentation) -> list[Path]:
    """Normal-form paths (the basis of kQ/I), sorted in path order."""
    N = p.nilpotency
    rs = p.rewriting
    arrows = p.quiver.arrows
    out = [Path(v, v) for v in range(len(p.quiver.vertices))]
    frontier = list(out)
    length = 0
    while frontier:
        length += 1
        if length >= N:
            break
        nxt = []
        for q in frontier:
            for ai, a in enumerate(arrows):
                if a.source != q.target:
                    continue
                w = Path(q.source, a.target, (ai,) + q.word)
                if rs.is_normal(w):
                    nxt.append(w)
        out.extend(nxt)
        frontier = nxt
    return sorted(out, key=lambda x: x.key)


def all_paths(quiver: Quiver, max_len: int) -> list[Path]:
    out = [Path(v, v) for v in range(len(quiver.vertices))]
    frontier = list(out)
    for _ in range(max_len):
        nxt = []
        for q in frontier:
            for ai, a in enumerate(quiver.arrows):
                if a.source == q.target:
                    nxt.append(Path(q.source, a.target, (ai,) + q.word))
        out.extend(nxt)
        frontier = nxt
    return sorted(out, key=lambda x: x.key)


# ---------------------------------------------------------------- minimal relations

class _RelationSpace:
    """Linear algebra for I/(JI+IJ) inside the truncation kQ/J^(N+1)."""

    def __init__(self, p: Presentation):
        self.p = p
        f = p.field
        N = p.nilpotency
        rs = p.rewriting
        self.paths = all_paths(p.quiver, N)
        self.col = {q: i for i, q in enumerate(self.paths)}
        self.ideal = []  # basis of I mod J^(N+1), as sparse vectors
        for q in self.paths:
            if rs.is_normal(q):
                continue
            vec = {q: 1}
            for r, c in rs.normal_form_path(q).items():
                poly_add(vec, r, -c, f)
            self.ideal.append(vec)
        self.ji_ij = Echelon(f)
        for vec in self.ideal:
            for ai, a in enumerate(p.quiver.arrows):
                left: dict = {}
                right: dict = {}
                for q, c in vec.items():
                    if len(q.word) + 1 > N:
                        continue
                    if q.target == a.source:
                        poly_add(left, Path(q.source, a.target, (ai,) + q.word), c, f)
                    if a.target == q.source:
                        poly_add(right, Path(a.source, q.target, q.word + (ai,)), c, f)
                if left:
                    self.ji_ij.add(self.vector(left))
                if right:
                    self.ji_ij.add(self.vector(right))

    def vector(self, poly: dict, order=None) -> dict:
        out = {}
        for q, c in poly.items():
            if q in self.col:
                k = self.col[q] if order is None else order[self.col[q]]
                out[k] = c
        return out

    def minimal_relations(self) -> list[dict]:
        ech = Echelon(self.p.field)
        ech.rows = {k: dict(v) for k, v in self.ji_ij.rows.items()}
        kept = []
        for rel in self.p.relations:
            if ech.add(self.vector(rel)):
                kept.append(rel)
        return kept

    def quotient_dim(self) -> int:
        full = Echelon(self.p.field)
        for vec in self.ideal:
            full.add(self.vector(vec))
        return full.rank - self.ji_ij.rank

    def avoiding_dim(self, arrow: int) -> int:
        f = self.p.field
        bad = [i for i, q in enumerate(self.paths) if arrow in q.word]
        good = [i for i, q in enumerate(self.paths) if arrow not in q.word]
        order = {c: k for k, c in enumerate(bad + good)}
        ech = Echelon(f)
        for vec in self.ideal:
            ech.add(self.vector(vec, order))
        nb = len(bad)
        inv = {k: c for c, k in order.items()}
        avoid = [{inv[k]: x for k, x in row.items()} for piv, row in ech.rows.items() if piv >= nb]
        mod = Echelon(f)
        mod.rows = {k: dict(v) for k, v in self.ji_ij.rows.items()}
        base = mod.rank
        for v in avoid:
            mod.add(v)
        return mod.rank - base


def minimal_relation_space(p: Presentation) -> list[dict]:
    """Representatives of a basis of I/(JI+IJ), chosen greedily from the relation list."""
    return _RelationSpace(p).minimal_relations()


def arrow_occurs_in_every_min_genset(p: Presentation, arrow: str) -> bool:
    """True when no minimal generating set of the ideal avoids ``arrow``."""
    ai = p.quiver.arrow_index(arrow)
    space = _RelationSpace(p)
    return space.avoiding_dim(ai) < space.quotient_dim()


def quotient_by_arrow(p: Presentation, arrow: str) -> Presentation:
    ai = p.quiver.arrow_index(arrow)
    q = p.quiver
    keep = [i for i in range(len(q.arrows)) if i != ai]
    remap = {old: new for new, old in enumerate(keep)}
    quiver = Quiver(q.vertices, [(q.arrows[i].label, q.vertices[q.arrows[i].source],
                                  q.vertices[q.arrows[i].target]) for i in keep])
    relations = []
    for rel in p.relations:
        new = {}
        for path, c in rel.items():
            if ai in path.word:
                continue
            new[Path(path.source, path.target, tuple(remap[x] for x in path.word))] = c
        if new:
            relations.append(new)
    return Presentation(quiver, p.field, relations, p.degree_cap)


def relation_endpoints(p: Presentation) -> set[int]:
    """Vertices where some minimal relation starts or ends."""
    out = set()
    for rel in minimal_relation_space(p):
        q = next(iter(rel))
        out.add(q.source)
        out.add(q.target)
    return out
