"""Command line entry point.

Exit codes: 0 pass, 1 property failure, 2 usage or parse error, 3 unknown
(a search budget ran out before a verdict). Text goes to standard output as
tab-separated lines; ``--report`` writes the structured document and
``--figure`` renders suite outcomes with matplotlib.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

from .concrete import default_universe, ladder, make_transportable
from .core import FAIL, PASS, STRUCTURAL, UNKNOWN, BudgetExceeded, Verdict, validate_category
from .dsl import DSLError, Workspace, parse, print_workspace
from .limits import equifier, inserter, product, pseudopullback, pullback
from .signatures import DEFAULT_SIGMA_BUDGET, classify_aec, enumerate_sigma, sigma_atoms

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3
SCHEMA_ID = "piecat-report/1"
BUDGET_ENV = "PIECAT_BUDGET"
LIMITS = ("product", "inserter", "equifier", "pullback", "pseudopullback")


class UsageError(Exception):
    pass


def corpus_dir() -> Path:
    return Path(str(resources.files("piecat") / "corpus"))


def resolve_source(target: str) -> Path:
    """A path to a workspace file, or the stem of a bundled corpus file."""
    p = Path(target)
    if p.is_file():
        return p
    bundled = corpus_dir() / f"{target}.cat"
    if bundled.is_file():
        return bundled
    raise UsageError(f"no workspace file or bundled corpus entry named {target!r}")


def load(target: str) -> Workspace:
    return parse(resolve_source(target).read_text(encoding="utf-8"))


def default_budget(fallback: float) -> float:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return fallback
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{BUDGET_ENV} must be a number, got {raw!r}")


def pick_category(ws: Workspace, name: str | None, concrete: bool) -> str:
    pool = list(ws.concretes) if concrete else list(ws.categories)
    if name is not None:
        if name not in ws.categories:
            raise UsageError(f"unknown category {name!r}")
        if concrete and name not in ws.concretes:
            raise UsageError(f"category {name!r} has no concrete structure")
        return name
    if len(pool) == 1:
        return pool[0]
    raise UsageError(f"choose one of {sorted(pool)} with --name")


def parse_universe(args, k) -> tuple[str, ...]:
    if args.universe is not None:
        return tuple(x for x in args.universe.split(",") if x)
    return default_universe(k, args.fresh)


def status_of(verdicts: list[Verdict]) -> str:
    if any(v.status in (FAIL, STRUCTURAL) for v in verdicts):
        return FAIL
    if any(v.status == UNKNOWN for v in verdicts):
        return UNKNOWN
    return PASS


def exit_for(status: str) -> int:
    return {PASS: EXIT_PASS, FAIL: EXIT_FAIL, UNKNOWN: EXIT_UNKNOWN}.get(status, EXIT_USAGE)


def emit_verdicts(verdicts: list[Verdict]) -> None:
    print("check\tstatus\treason")
    for v in verdicts:
        print(f"{v.check}\t{v.status}\t{v.reason}")


# -------------------------------------------------------------- commands


def cmd_check(args) -> dict:
    ws = load(args.source)
    has_concrete = bool(ws.concretes)
    name = pick_category(ws, args.name, concrete=has_concrete)
    if name in ws.concretes:
        k = ws.concrete(name)
        universe = parse_universe(args, k)
        verdicts = ladder(k, universe)
    else:
        verdicts = [validate_category(ws.categories[name])]
    emit_verdicts(verdicts)
    return {"target": name, "status": status_of(verdicts), "verdicts": [v.to_dict() for v in verdicts]}


def cmd_classify(args) -> dict:
    ws = load(args.source)
    name = pick_category(ws, args.name, concrete=True)
    k = ws.concrete(name)
    base = ladder(k)
    if not all(base[:2]):
        emit_verdicts(base)
        return {"target": name, "status": FAIL, "verdicts": [v.to_dict() for v in base]}
    universe = tuple(args.universe.split(",")) if args.universe else None
    rep = classify_aec(k, args.max_arity, universe)
    verdicts = list(rep.rungs)
    emit_verdicts(verdicts)
    print(f"# {rep.note}")
    return {"target": name, "status": status_of(verdicts), "verdicts": [v.to_dict() for v in verdicts]}


def cmd_sigma(args) -> dict:
    ws = load(args.source)
    name = pick_category(ws, args.name, concrete=True)
    k = ws.concrete(name)
    budget = args.budget if args.budget is not None else int(default_budget(DEFAULT_SIGMA_BUDGET))
    try:
        sig = sigma_atoms(k, args.max_arity) if args.atoms else enumerate_sigma(k, args.max_arity, budget)
    except BudgetExceeded as exc:
        print(f"sigma\t{UNKNOWN}\t{exc}")
        return {"target": name, "status": UNKNOWN, "message": str(exc)}
    out = Workspace()
    out.add_concrete(k, name)
    out.signatures[f"Sigma_{name}"] = (name, sig)
    text = print_workspace(out)
    outputs = {}
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        outputs["workspace"] = args.output
        print(f"sigma\t{PASS}\t{len(sig)} symbols written to {args.output}")
    else:
        sys.stdout.write(text)
    return {
        "target": name,
        "status": PASS,
        "signature": [{"name": r.name, "arity": r.arity} for r in sig],
        "outputs": outputs,
    }


def cmd_limit(args) -> dict:
    ws = load(args.source)
    out = Workspace()
    kind, names = args.kind, args.args
    if kind == "product":
        names = names or sorted(ws.concretes)
        for n in names:
            pick_category(ws, n, concrete=True)
        res = product([ws.concrete(n) for n in names], args.result)
        out.add_concrete(res.concrete, res.cat.name)
        label = res.cat.name
    elif kind == "inserter":
        if len(names) != 2:
            raise UsageError("inserter needs two functor names")
        f, g = (ws.functors.get(n) for n in names)
        if f is None or g is None:
            raise UsageError(f"unknown functor among {names}")
        src = ws.category_name(f.source)
        u = ws.concretes.get(src)
        try:
            res = inserter(f, g, u, args.result or f"Ins_{names[0]}_{names[1]}")
        except ValueError as exc:
            raise UsageError(str(exc))
        if res.u is not None:
            out.add_concrete(res.concrete, res.cat.name)
        else:
            out.categories[res.cat.name] = res.cat
        label = res.cat.name
    elif kind == "equifier":
        if len(names) != 2:
            raise UsageError("equifier needs two transformation names")
        phi, psi = (ws.nats.get(n) for n in names)
        if phi is None or psi is None:
            raise UsageError(f"unknown transformation among {names}")
        src = ws.category_name(phi.source.source)
        try:
            res = equifier(phi, psi, ws.concretes.get(src), args.result or f"Eq_{names[0]}_{names[1]}")
        except ValueError as exc:
            raise UsageError(str(exc))
        if res.u is not None:
            out.add_concrete(res.concrete, res.cat.name)
        else:
            out.categories[res.cat.name] = res.cat
        label = res.cat.name
    else:
        if len(names) != 2:
            raise UsageError(f"{kind} needs two concrete category names")
        for n in names:
            pick_category(ws, n, concrete=True)
        build = pullback if kind == "pullback" else pseudopullback
        res_k = build(ws.concrete(names[0]), ws.concrete(names[1]), args.result)
        out.add_concrete(res_k, res_k.cat.name)
        label = res_k.cat.name
    text = print_workspace(out)
    outputs = {}
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        outputs["workspace"] = args.output
        print(f"{kind}\t{PASS}\t{label} written to {args.output}")
    else:
        sys.stdout.write(text)
    return {"target": label, "status": PASS, "outputs": outputs}


def cmd_transport(args) -> dict:
    ws = load(args.source)
    name = pick_category(ws, args.name, concrete=True)
    k = ws.concrete(name)
    universe = tuple(args.universe.split(",")) if args.universe else default_universe(k)
    try:
        t = make_transportable(k, universe)
    except ValueError as exc:
        raise UsageError(str(exc))
    out = Workspace()
    out.add_concrete(t, name)
    text = print_workspace(out)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"transport\t{PASS}\t{len(t.cat.objects)} objects written to {args.output}")
        return {"target": name, "status": PASS, "outputs": {"workspace": args.output}}
    sys.stdout.write(text)
    return {"target": name, "status": PASS}


def _suite_outputs(report, args) -> dict:
    from .plotting import suite_figure

    outputs = {}
    if args.figure:
        outputs["figure"] = suite_figure(report, args.figure)
    print("suite\tstatus\tattempted\tpassed\tfailed\tskipped\tseconds")
    print(
        f"{report.suite}\t{report.status}\t{report.attempted}\t{report.passed}\t"
        f"{report.failed}\t{report.skipped}\t{report.wall_time:.2f}"
    )
    for r in report.failures()[: args.show]:
        print(f"# instance {r.index} seed {r.seed} [{r.kind}]: {r.reason}")
    for note in report.notes:
        print(f"# {note}")
    return outputs


def cmd_verify(args) -> dict:
    from .harness.suites import SUITES

    budget = args.budget
    if budget is None and os.environ.get(BUDGET_ENV):
        budget = default_budget(0.0)
    report = SUITES[args.suite](args.n, args.seed, budget=budget)
    outputs = _suite_outputs(report, args)
    status = report.status
    if report.partial and status == PASS:
        status = UNKNOWN
    return {"target": args.suite, "status": status, "suite": report.to_dict(), "outputs": outputs}


def cmd_search29(args) -> dict:
    from .harness.search import search_problem29

    budget = args.budget if args.budget is not None else default_budget(600.0)
    report = search_problem29(args.n, args.seed, budget, args.out)
    outputs = _suite_outputs(report, args)
    if args.out:
        outputs["candidates"] = str(args.out)
    return {"target": "search29", "status": report.status, "suite": report.to_dict(), "outputs": outputs}


def cmd_recheck29(args) -> dict:
    from .harness.search import recheck29

    v = recheck29(resolve_source(args.source).read_text(encoding="utf-8"))
    emit_verdicts([v])
    return {"target": args.source, "status": status_of([v]), "verdicts": [v.to_dict()]}


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="piecat", description="Finite concrete categories and PIE-limits")
    parser.add_argument("--report", metavar="PATH", help="write the structured JSON report here")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p):
        p.add_argument("source", help="workspace file, or the name of a bundled corpus file")
        p.add_argument("--name", help="category to use when the file declares several")

    p = sub.add_parser("check", help="run the concreteness ladder on a category")
    source(p)
    p.add_argument("--universe", help="comma-separated element universe for transportability")
    p.add_argument("--fresh", type=int, default=0, help="fresh elements added to the carrier union (default 0)")

    p = sub.add_parser("classify", help="AEC ladder: faithful, coherent, concrete monos, iso-full, replete")
    source(p)
    p.add_argument("--max-arity", type=int, default=2)
    p.add_argument("--universe", help="comma-separated universe for repleteness (default: carrier union)")

    p = sub.add_parser("sigma", help="emit the maximal signature of a concrete category")
    source(p)
    p.add_argument("--max-arity", type=int, default=2)
    p.add_argument("--budget", type=int, help="maximum number of symbols before giving up")
    p.add_argument("--atoms", action="store_true", help="emit only the atomic symbols")
    p.add_argument("-o", "--output")

    p = sub.add_parser("limit", help="build a PIE-limit or (pseudo)pullback as a workspace")
    p.add_argument("kind", choices=LIMITS)
    p.add_argument("source")
    p.add_argument("args", nargs="*", help="categories, functors or transformations, by name")
    p.add_argument("--result", help="name of the constructed category")
    p.add_argument("-o", "--output")

    p = sub.add_parser("transport", help="close a concrete category under renaming into a universe")
    source(p)
    p.add_argument("--universe")
    p.add_argument("-o", "--output")

    from .harness.suites import SUITES

    p = sub.add_parser("verify", help="run a closure-property suite on generated instances")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=float, help=f"time budget in seconds (default from ${BUDGET_ENV})")
    p.add_argument("--figure", metavar="PNG")
    p.add_argument("--show", type=int, default=5, help="failures to print")

    p = sub.add_parser("search29", help="hunt for inserters that are not iso-full")
    p.add_argument("--budget", type=float, help=f"seconds (default 600 or ${BUDGET_ENV})")
    p.add_argument("--n", type=int, default=100_000, help="instance cap")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="directory for candidate workspace files")
    p.add_argument("--figure", metavar="PNG")
    p.add_argument("--show", type=int, default=5)

    p = sub.add_parser("recheck29", help="re-verify a search29 candidate file")
    p.add_argument("source")
    return parser


COMMANDS = {
    "check": cmd_check,
    "classify": cmd_classify,
    "sigma": cmd_sigma,
    "limit": cmd_limit,
    "transport": cmd_transport,
    "verify": cmd_verify,
    "search29": cmd_search29,
    "recheck29": cmd_recheck29,
}


def write_report(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    doc = {"schema": SCHEMA_ID, "command": args.command}
    try:
        doc.update(COMMANDS[args.command](args))
        code = exit_for(doc["status"])
    except DSLError as exc:
        print(f"error\t{exc}", file=sys.stderr)
        doc.update(status="error", message=str(exc))
        code = EXIT_USAGE
    except (UsageError, KeyError, OSError) as exc:
        print(f"error\t{exc}", file=sys.stderr)
        doc.update(status="error", message=str(exc))
        code = EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"unknown\t{exc}", file=sys.stderr)
        doc.update(status=UNKNOWN, message=str(exc))
        code = EXIT_UNKNOWN
    doc["exit_code"] = code
    if args.report:
        write_report(args.report, doc)
    return code


if __name__ == "__main__":
    sys.exit(main())
