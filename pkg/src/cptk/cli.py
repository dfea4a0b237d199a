"""Command-line entry point.

Reports are JSON on stdout (or --out), a one-line human summary goes to
stderr.  Exit codes: 0 certified or success, 2 usage or malformed input,
3 precondition refuted, 4 inconclusive at the given bounds, 5 invariant
violation.  Runs are reproducible byte for byte for a fixed config; every
report embeds the bounds it used.

File formats (all JSON):
  language file   {"alphabet": "ab", "expr": <expression>}
  problem file    {"alphabet": "ab", "condition": <expression>|null,
                   "components": [<expression>, ...]}
  family file     {"alphabet": "ab", "builtin": "regular"|"finite"|"length"}
                  or {"alphabet": "ab", "list": [<expression>, ...],
                      "closure": ["u","co",...], "flags": {...}}
  expressions     {"finite": [...]}, {"dfa": {...}}, {"predicate": "name"},
                  {"op": "union"|"intersect", "args": [...]},
                  {"op": "complement", "arg": ...},
                  {"op": "leftmark", "symbol": "a", "arg": ...},
                  {"op": "leftquotient", "word": "ab", "arg": ...}
  traces          JSON lines, one object per step:
                  {"n", "word", "action", "cancelled", "card", ...}
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .classify import (ProblemPrecondition, PartitionCertificate, load_conditional,
                       load_problem, solve, solve_conditional)
from .cohesion import check_ccohesive, check_ccore, check_cohesive, check_core
from .constructions import example_26, ziegler_problem
from .families import LAW_IDS, check_law, family_from_json
from .hardcore import (hardcore_run, trace_from_jsonl, trace_to_jsonl, verify_trace)
from .langs import EMPTY, expr_from_json, expr_to_json
from .words import Alphabet, words_up_to

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_INCONCLUSIVE = 4
EXIT_VIOLATION = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(EXIT_USAGE, f"{path}: no such file")
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_USAGE,
                       f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")


def _load_language(path: str):
    data = _read_json(path)
    try:
        alphabet = Alphabet.parse(data["alphabet"], data.get("order"))
        expr = expr_from_json(data["expr"], alphabet.size)
    except (KeyError, ValueError) as exc:
        raise CliError(EXIT_USAGE, f"{path}: {exc}")
    return alphabet, expr


def _load_family(path: str):
    try:
        return family_from_json(_read_json(path))
    except (KeyError, ValueError) as exc:
        raise CliError(EXIT_USAGE, f"{path}: {exc}")


def _load_problem_file(path: str, horizon: int):
    data = _read_json(path)
    try:
        alphabet = Alphabet.parse(data["alphabet"], data.get("order"))
        comps = [expr_from_json(c, alphabet.size) for c in data["components"]]
        condition = data.get("condition")
        cond_expr = None if condition is None else expr_from_json(condition, alphabet.size)
    except (KeyError, ValueError) as exc:
        raise CliError(EXIT_USAGE, f"{path}: {exc}")
    try:
        if cond_expr is None:
            return alphabet, load_problem(comps, alphabet, horizon), None
        cond = load_conditional(cond_expr, comps, alphabet, horizon)
        return alphabet, cond.problem, cond
    except ProblemPrecondition as exc:
        raise CliError(EXIT_PRECONDITION, f"{path}: {exc}")


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _summary(line: str) -> None:
    print(line, file=sys.stderr)


def _config_echo(args, **extra) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func",) and v is not None}
    cfg.update(extra)
    return cfg


# ---------------------------------------------------------------------------
# subcommands


def cmd_lex(args) -> int:
    alphabet = Alphabet.parse(args.alphabet, args.order)
    for w in words_up_to(alphabet, args.count):
        print(w)
    return EXIT_OK


def cmd_laws(args) -> int:
    family = _load_family(args.family)
    law_ids = LAW_IDS if args.law == "all" else (args.law,)
    reports = [check_law(law, family, args.samples, args.horizon, args.seed)
               for law in law_ids]
    bad = sum(r["disagreements"] for r in reports)
    _emit({"config": _config_echo(args), "reports": reports}, args)
    for r in reports:
        _summary(f"{r['law']:<28} samples={r['samples']:<4} "
                 f"agreements={r['agreements']:<4} disagreements={r['disagreements']}")
    return EXIT_OK if bad == 0 else EXIT_VIOLATION


def cmd_solve(args) -> int:
    family = _load_family(args.family)
    _, problem, cond = _load_problem_file(args.problem, args.horizon)
    if cond is None:
        result = solve(problem, family, args.index_bound, args.horizon)
    else:
        result = solve_conditional(cond, family, args.index_bound, args.horizon)
    report = {"config": _config_echo(args), **result.to_json()}
    _emit(report, args)
    if isinstance(result, PartitionCertificate):
        _summary(f"certified ({result.status}) with indices {result.indices}")
        return EXIT_OK
    _summary(f"not found below index bound {args.index_bound} / horizon {args.horizon}")
    return EXIT_INCONCLUSIVE


def cmd_cohesive(args) -> int:
    family = _load_family(args.family)
    alphabet, target = _load_language(args.target)
    if str(alphabet) != str(family.alphabet):
        raise CliError(EXIT_USAGE, "target and family alphabets differ")
    if args.condition:
        _, region = _load_language(args.condition)
        verdict = check_ccohesive(target, region, family, args.index_bound,
                                  args.horizon)
    else:
        verdict = check_cohesive(target, family, args.index_bound, args.horizon)
    _emit({"config": _config_echo(args), **verdict.to_json()}, args)
    if verdict.is_refuted:
        _summary(f"refuted by pair ({verdict.witness.i}, {verdict.witness.j})"
                 f" exact={verdict.exact}")
        return EXIT_OK
    _summary("consistent up to the given bounds")
    return EXIT_INCONCLUSIVE


def cmd_ccore(args) -> int:
    family = _load_family(args.family)
    _, problem, cond = _load_problem_file(args.problem, args.horizon)
    if cond is None:
        report = check_core(problem, family, args.index_bound, args.horizon,
                            subset_samples=args.samples, seed=args.seed)
        status = report["core_status"]
    else:
        report = check_ccore(cond, family, args.index_bound, args.horizon)
        status = report["ccore_status"]
    _emit({"config": _config_echo(args), **report}, args)
    _summary(status)
    return EXIT_OK if status == "refuted" else EXIT_INCONCLUSIVE


def cmd_hardcore(args) -> int:
    family = _load_family(args.family)
    if args.condition:
        cond_alphabet, condition = _load_language(args.condition)
    else:
        cond_alphabet, condition = family.alphabet, EMPTY
    alphabet, target = _load_language(args.target)
    if str(alphabet) != str(family.alphabet) or str(cond_alphabet) != str(alphabet):
        raise CliError(EXIT_USAGE, "family, condition and target alphabets differ")
    state, trace = hardcore_run(family, condition, target, alphabet, args.steps)
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(trace_to_jsonl(trace))
    report = {
        "config": _config_echo(args),
        "steps": args.steps,
        "accepted": list(state.accepted),
        "card": state.card,
        "cancelled": sorted(state.cancelled),
    }
    _emit(report, args)
    _summary(f"accepted {state.card} words, cancelled {len(state.cancelled)} indices")
    return EXIT_OK


def cmd_verify_trace(args) -> int:
    family = _load_family(args.family)
    if args.condition:
        _, condition = _load_language(args.condition)
    else:
        condition = EMPTY
    alphabet, target = _load_language(args.target)
    try:
        with open(args.trace) as fh:
            trace = trace_from_jsonl(fh.read())
    except FileNotFoundError:
        raise CliError(EXIT_USAGE, f"{args.trace}: no such file")
    except ValueError as exc:
        raise CliError(EXIT_USAGE, f"{args.trace}: {exc}")
    report = verify_trace(trace, family, condition, target, alphabet)
    _emit({"config": _config_echo(args), **report}, args)
    if report["ok"]:
        _summary(f"trace verified over {report['steps']} steps")
        return EXIT_OK
    _summary(f"{len(report['violations'])} invariant violation(s)")
    return EXIT_VIOLATION


def cmd_make(args) -> int:
    alphabet, base = _load_language(args.base)
    try:
        if args.kind == "ziegler":
            problem = ziegler_problem(base, alphabet, args.horizon)
            data = {"alphabet": str(alphabet), "condition": None,
                    "components": [expr_to_json(c) for c in problem.components]}
            flags = problem.check.flags
        else:
            cond = example_26(base, alphabet, args.horizon)
            data = {"alphabet": str(alphabet),
                    "condition": expr_to_json(cond.condition),
                    "components": [expr_to_json(c) for c in cond.problem.components]}
            flags = cond.problem.check.flags
    except (ProblemPrecondition, ValueError) as exc:
        raise CliError(EXIT_PRECONDITION, str(exc))
    for flag in flags:
        _summary(f"note: {flag}")
    _emit({"config": _config_echo(args), **data}, args)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cptk",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_bounds(p, steps=False):
        p.add_argument("--index-bound", type=int, default=500,
                       help="family indices scanned (default 500)")
        p.add_argument("--horizon", type=int, default=300,
                       help="last word rank checked on windows (default 300)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for sampling harnesses (default 0)")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        if steps:
            p.add_argument("--steps", type=int, default=256,
                           help="words processed by the loop (default 256)")

    p = sub.add_parser("lex", help="print the first N words in order")
    p.add_argument("--alphabet", required=True)
    p.add_argument("--order", help="explicit symbol order override")
    p.add_argument("--count", type=int, default=16)
    p.set_defaults(func=cmd_lex)

    p = sub.add_parser("laws", help="spot-check closure-algebra identities")
    p.add_argument("--family", required=True)
    p.add_argument("--law", default="all", choices=("all",) + LAW_IDS)
    p.add_argument("--samples", type=int, default=50)
    add_bounds(p)
    p.set_defaults(func=cmd_laws)

    p = sub.add_parser("solve", help="search for a partition certificate")
    p.add_argument("--problem", required=True)
    p.add_argument("--family", required=True)
    add_bounds(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("cohesive", help="scan for a splitting witness")
    p.add_argument("--target", required=True, help="language file to test")
    p.add_argument("--family", required=True)
    p.add_argument("--condition", help="restrict witnesses inside this language")
    add_bounds(p)
    p.set_defaults(func=cmd_cohesive)

    p = sub.add_parser("ccore", help="core / conditional-core status report")
    p.add_argument("--problem", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--samples", type=int, default=4,
                   help="sliced subproblems sampled (default 4)")
    add_bounds(p)
    p.set_defaults(func=cmd_ccore)

    p = sub.add_parser("hardcore", help="run the diagonalization loop")
    p.add_argument("--family", required=True)
    p.add_argument("--condition", help="language file (default: empty language)")
    p.add_argument("--target", required=True, help="language file")
    p.add_argument("--trace", help="write the JSONL trace here")
    add_bounds(p, steps=True)
    p.set_defaults(func=cmd_hardcore)

    p = sub.add_parser("verify-trace", help="replay a trace and check invariants")
    p.add_argument("--trace", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--condition")
    p.add_argument("--target", required=True)
    add_bounds(p)
    p.set_defaults(func=cmd_verify_trace)

    p = sub.add_parser("make", help="emit a generated problem file")
    p.add_argument("kind", choices=("ziegler", "example26"))
    p.add_argument("--base", required=True, help="base language file")
    add_bounds(p)
    p.set_defaults(func=cmd_make)

    return parser


def _apply_thread_cap() -> None:
    cap = os.environ.get("CPTK_THREADS")
    if not cap:
        return
    try:
        n = max(1, int(cap))
    except ValueError:
        return
    try:
        import numba

        numba.set_num_threads(min(n, numba.get_num_threads()))
    except ImportError:
        pass


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ProblemPrecondition as exc:
        print(f"precondition refuted: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
