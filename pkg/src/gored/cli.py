"""Command line front end: ``gored check|reduce|gproj|ext|gorenstein``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

from .algebra import algebra_basis
from .exactfield import parse_field
from .gproj import gproj_test
from .homology import DEFAULT_BOUND, ext_dim
from .modules import ModuleError, load_module, simple
from .presentation import (
    PresentationError, format_poly, parse_presentation, path_label,
)
from .reduction import conjecture_report, gorenstein_test, reduce

EXIT_OK, EXIT_INPUT, EXIT_UNDETERMINED, EXIT_ALARM = 0, 1, 2, 3


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("gored") / "data" / name))


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    cand = fixture_path(p.name)
    if cand.exists():
        return cand
    raise FileNotFoundError(path)


def _load(args):
    field = parse_field(args.field) if args.field else None
    path = _resolve(args.algebra)
    return parse_presentation(path.read_text(), field=field), path


def _config(args) -> dict:
    return {"bound": args.bound, "field": args.field or "from file", "seed": args.seed,
            "format": args.format}


def _emit(args, data: dict, human: list[str]) -> None:
    if args.format == "structured":
        sys.stdout.write(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write("\n".join(human) + "\n")


def _header(args) -> str:
    return f"# bound={args.bound} seed={args.seed} field={args.field or 'from file'}"


class _ModuleSpec(argparse.Action):
    """Collect ``--simple`` and ``--module`` in command line order."""

    def __call__(self, parser, namespace, values, option_string=None):
        items = list(getattr(namespace, self.dest, None) or [])
        kind = "simple" if option_string == "--simple" else "module"
        items.append((kind, values))
        setattr(namespace, self.dest, items)


def _modules(args, A):
    out = []
    for kind, val in args.modules or []:
        if kind == "simple":
            out.append((f"S{val}", simple(A, A.vertex(val))))
        else:
            _, M = load_module(_resolve(val), algebra=A)
            out.append((Path(val).name, M))
    return out


# -- commands

def cmd_check(args) -> int:
    p, path = _load(args)
    N = p.nilpotency
    basis = [path_label(p.quiver, q) for q in p.normal_paths]
    rules = [f"{path_label(p.quiver, r.tip)} -> {_fmt_tail(p, r)}" for r in p.rewriting.rules]
    data = {"config": _config(args), "file": path.name, "field": str(p.field),
            "vertices": list(p.quiver.vertices), "arrows": [a.label for a in p.quiver.arrows],
            "rules": rules, "nilpotency": N, "dimension": p.dimension, "basis": basis}
    human = [_header(args), f"algebra {path.name} over {p.field}",
             f"vertices: {' '.join(p.quiver.vertices)}",
             f"arrows: {' '.join(a.label for a in p.quiver.arrows)}",
             "rewriting rules:"] + [f"  {r}" for r in rules] + [
             f"admissible: J^{N} lies in I", f"dimension {p.dimension}",
             "basis: " + " ".join(basis)]
    _emit(args, data, human)
    return EXIT_OK


def _fmt_tail(p, rule) -> str:
    return format_poly(p.quiver, p.field, rule.tail) if rule.tail else "0"


def cmd_reduce(args) -> int:
    p, _ = _load(args)
    idem = []
    for spec in args.idempotent or []:
        idem.append([v.strip() for v in spec.split(",") if v.strip()])
    trace = reduce(p, strategy=args.strategy, bound=args.bound, idempotents=idem,
                   jmax=args.jmax, seed=args.seed)
    report = conjecture_report(trace)
    data = dict(trace.data)
    data["conjecture_report"] = {k: v for k, v in report.items() if k != "text"}
    data["seed"] = args.seed
    human = [_header(args)]
    for s in trace.data["steps"]:
        human.append(f"step {s['source']} -> {s['target']}: {s['kind']} {_params(s)} "
                     f"[{s['citation']}]")
        human.append(f"  {s['description']}")
        for key, val in sorted(s["side_conditions"].items()):
            human.append(f"  {key}: {val['text'] if isinstance(val, dict) and 'text' in val else val}")
        if s["t_obs"] is not None:
            human.append(f"  Ext tails agree above t_obs = {s['t_obs']}")
        for a in s["assertions"]:
            human.append(f"  asserts {a['claim']}  ({', '.join(a['cite'])})")
    for r in trace.rejected:
        human.append(f"rejected {r['kind']} {r['params']} at {r['at']}: {r['reason']}")
    for a in trace.alarms:
        human.append(f"FALSIFICATION ALARM: {a}")
    summ = trace.summary
    core = trace.data["core"]["name"]
    human.append(f"core {core} (dimension {summ['core_dimension']}):")
    human += ["  " + line for line in trace.data["core"]["algebra"].strip().splitlines()]
    if summ["core_self_injective"]:
        human.append("summary: core self-injective, hence Gorenstein")
    else:
        g = summ["core_gorenstein"]
        tag = {True: "Gorenstein", False: "not Gorenstein", None: "undetermined"}[g["gorenstein"]]
        human.append(f"summary: core {tag} (id {g['id_left']['text']}, {g['id_right']['text']})")
    for a in trace.assertions:
        human.append(f"asserts {a['claim']}  ({', '.join(a['cite'])})")
    human.append(report["text"])
    human.append(f"exit code {trace.exit_code}")
    _emit(args, data, human)
    return trace.exit_code


def _params(s) -> str:
    p = s["params"]
    if "arrow" in p:
        return p["arrow"]
    if "remove" in p:
        return "{" + ",".join(p["remove"]) + "}"
    return "e=" + "+".join(f"e{v}" for v in p["keep"])


def cmd_gproj(args) -> int:
    p, _ = _load(args)
    A = algebra_basis(p)
    mods = _modules(args, A)
    if not mods:
        raise ModuleError("give a module with --simple or --module")
    rows, human, code = [], [_header(args)], EXIT_OK
    for name, M in mods:
        v = gproj_test(M, args.bound)
        rows.append({"module": name, "dims": list(M.dims), **v.to_dict()})
        human.append(f"{name}: {v}")
        if v.perp is not None:
            human.append(f"  Ext^>0(M, A): {v.perp}")
            human.append(f"  Ext^>0(M*, A): {v.perp_dual}")
            human.append(f"  M -> M** invertible: {v.evaluation_iso}")
        if v.kind == "undetermined":
            code = EXIT_UNDETERMINED
    _emit(args, {"config": _config(args), "results": rows}, human)
    return code


def cmd_ext(args) -> int:
    p, _ = _load(args)
    A = algebra_basis(p)
    mods = _modules(args, A)
    if len(mods) != 2:
        raise ModuleError("ext needs exactly two modules (M then N)")
    (nm, M), (nn, N) = mods
    row = [ext_dim(M, N, j) for j in range(args.jmax + 1)]
    data = {"config": _config(args), "M": nm, "N": nn, "jmax": args.jmax, "ext": row}
    human = [_header(args), f"dim Ext^j({nm}, {nn}) for j = 0..{args.jmax}:",
             " ".join(str(x) for x in row)]
    _emit(args, data, human)
    return EXIT_OK


def cmd_gorenstein(args) -> int:
    p, _ = _load(args)
    g = gorenstein_test(algebra_basis(p), args.bound)
    data = {"config": _config(args), **g.to_dict()}
    human = [_header(args), str(g)]
    if g.is_gorenstein:
        human.append(f"Gorenstein, ({g.left.value},{g.right.value})")
    _emit(args, data, human)
    return EXIT_OK if g.is_gorenstein is not None else EXIT_UNDETERMINED


def _bound_default() -> int:
    env = os.environ.get("GORED_BOUND")
    if env:
        try:
            val = int(env)
        except ValueError:
            raise SystemExit(f"GORED_BOUND must be an integer, got {env!r}")
        if val < 1:
            raise SystemExit("GORED_BOUND must be positive")
        return val
    return DEFAULT_BOUND


def _positive(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return val


def _nonneg(text: str) -> int:
    val = int(text)
    if val < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return val


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code, keeping 2 for undetermined verdicts."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--bound", type=_positive, default=_bound_default(),
                        help="depth bound for resolutions (default 20 or $GORED_BOUND)")
    common.add_argument("--field", help="Q or GFp, overriding the algebra file")
    common.add_argument("--seed", type=int, default=0,
                        help="seed recorded in the output for replay")
    common.add_argument("--format", choices=["human", "structured"], default="human",
                        help="structured prints JSON with sorted keys")

    parser = _Parser(prog="gored", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="parse and describe an algebra")
    p.add_argument("algebra")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", parents=[common], help="run the reduction pipeline")
    p.add_argument("algebra")
    p.add_argument("--idempotent", action="append",
                   help="comma separated vertex labels of a corner to reduce to")
    p.add_argument("--jmax", type=_nonneg, default=12,
                   help="highest Ext degree compared on corner steps")
    p.add_argument("--strategy", choices=["vertices-first", "arrows-first"],
                   default="vertices-first")
    p.set_defaults(func=cmd_reduce)

    for name, func, hlp in [("gproj", cmd_gproj, "Gorenstein projectivity verdicts"),
                            ("ext", cmd_ext, "table of Ext dimensions")]:
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("algebra")
        p.add_argument("--simple", dest="modules", action=_ModuleSpec, metavar="VERTEX",
                       help="simple module at a vertex label")
        p.add_argument("--module", dest="modules", action=_ModuleSpec, metavar="FILE",
                       help="module file")
        if name == "ext":
            p.add_argument("--jmax", type=_nonneg, default=6, help="highest Ext degree")
        p.set_defaults(func=func)

    p = sub.add_parser("gorenstein", parents=[common], help="injective dimensions of A")
    p.add_argument("algebra")
    p.set_defaults(func=cmd_gorenstein)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PresentationError, ModuleError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
