"""Command-line front end.

Exit codes: 0 granted, 1 denied, 2 unregulated, 3 inconsistent (also used by
check-consistency), 10 resource cap exceeded, 64 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import __version__
from .agreements import in_fragment_q1
from .engine import Query, answer, answer_tractable
from .environment import EMPTY_ENVIRONMENT, check_consistent, parse_environment
from .fol import ResourceLimitExceeded, render_sexpr
from .gen import random_query, random_token_soup
from .oracle import oracle_verdict
from .parser import (
    DslParseError,
    parse_agreements,
    parse_query,
    pretty,
    pretty_query,
)
from .reduction import parse_dimacs, reduce_cnf
from .translate import SeqInterpretation, translate_agreement

EXIT_CAP = 10
EXIT_INPUT = 64


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_agreements(paths) -> tuple:
    agreements = []
    for path in paths:
        agreements.extend(parse_agreements(_read(path)))
    return tuple(agreements)


def _load_env(path):
    if path is None:
        return EMPTY_ENVIRONMENT
    return parse_environment(_read(path))


def _seq_mode(name: str) -> SeqInterpretation:
    return SeqInterpretation(name)


def cmd_parse(args) -> int:
    for path in args.files:
        for agr in parse_agreements(_read(path)):
            print(pretty(agr))
    return 0


def cmd_translate(args) -> int:
    mode = _seq_mode(args.seq_mode)
    for path in args.files:
        for agr in parse_agreements(_read(path)):
            print(render_sexpr(translate_agreement(agr, mode)))
    return 0


def cmd_query(args) -> int:
    agreements = _load_agreements(args.files)
    env = _load_env(args.env)
    subject, action, asset = parse_query(args.query)
    q = Query(agreements, subject, action, asset, env)
    verdict = answer(
        q,
        mode=_seq_mode(args.seq_mode),
        chain_strict=not args.inseq_nonstrict,
        force_general=args.force_general,
        max_assignments=args.max_assignments,
    )
    if args.json:
        payload = {
            "verdict": verdict.kind.value,
            "phrase": verdict.phrase,
            "exit_code": verdict.exit_code,
            "path": verdict.path,
            "query": pretty_query(subject, action, asset),
        }
        if args.explain:
            payload["detail"] = verdict.detail
        print(json.dumps(payload))
    else:
        print(verdict.phrase)
        if args.explain and verdict.detail:
            print(f"  via {verdict.path} path: {verdict.detail}")
    return verdict.exit_code


def cmd_check_consistency(args) -> int:
    env = parse_environment(_read(args.env))
    ok = check_consistent(env)
    if args.json:
        print(json.dumps({"consistent": ok}))
    else:
        print("consistent" if ok else "inconsistent")
    return 0 if ok else 3


def cmd_reduce_3sat(args) -> int:
    phi = parse_dimacs(_read(args.cnf))
    q = reduce_cnf(phi)
    base = Path(args.out) if args.out else Path(args.cnf).with_suffix("")
    agr_path = base.with_suffix(".odrl")
    query_path = base.with_suffix(".query")
    agr_path.write_text("".join(pretty(a) + "\n" for a in q.agreements), encoding="utf-8")
    query_path.write_text(pretty_query(q.subject, q.action, q.asset) + "\n", encoding="utf-8")
    print(f"wrote {agr_path} and {query_path}")
    return 0


def cmd_oracle_check(args) -> int:
    rng = random.Random(args.seed)
    print(f"seed: {args.seed}")
    mode = SeqInterpretation.OVERLAPPING
    for i in range(args.count):
        q = random_query(rng, allow_not_ps=args.allow_not_ps)
        q1 = in_fragment_q1(q.agreements)
        try:
            general = answer(q, force_general=True)
            reference = oracle_verdict(q)
            verdicts = {"general": general.kind, "oracle": reference.kind}
            if q1:
                verdicts["tractable"] = answer_tractable(q).kind
        except ResourceLimitExceeded:
            continue
        if len(set(verdicts.values())) != 1:
            print(f"divergence at case {i}: " + ", ".join(f"{k}={v.value}" for k, v in verdicts.items()))
            for agr in q.agreements:
                print(pretty(agr))
            from .environment import format_environment

            sys.stdout.write(format_environment(q.env))
            print(pretty_query(q.subject, q.action, q.asset))
            return 1
    print(f"{args.count} cases, all paths agree")
    return 0


def cmd_fuzz(args) -> int:
    from .gen import random_agreement
    from .parser import parse_agreement

    rng = random.Random(args.seed)
    print(f"seed: {args.seed}")
    for i in range(args.count):
        agr = random_agreement(rng, 1, allow_not_ps=rng.random() < 0.3)
        text = pretty(agr)
        reparsed = parse_agreement(text)
        if reparsed != agr:
            print(f"round-trip failure at case {i}:\n{text}")
            return 1
        if pretty(reparsed) != text:
            print(f"printer not a fixpoint at case {i}:\n{text}")
            return 1
    for i in range(args.count):
        soup = random_token_soup(rng)
        try:
            parse_agreements(soup)
        except DslParseError:
            pass
        except Exception as exc:  # noqa: BLE001 - the property under test
            print(f"parser crash on case {i}: {exc!r}\ninput: {soup!r}")
            return 1
    print(f"{args.count} round-trips and {args.count} token soups, no failures")
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="odrleval",
        description="Evaluate rights-expression agreements: parse, translate to "
        "first-order logic, and answer permission queries.",
    )
    top.add_argument("--version", action="version", version=f"odrleval {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse agreement files and print the canonical form")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("translate", help="print the first-order translation as s-expressions")
    p.add_argument("files", nargs="+")
    p.add_argument("--seq-mode", choices=("overlapping", "consecutive"), default="overlapping")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("query", help='answer `may <subject> <action> <asset>`')
    p.add_argument("files", nargs="+", help="agreement files (.odrl)")
    p.add_argument("query", help='query text, e.g. "may Alice play latestJingle"')
    p.add_argument("--env", help="environment file (.env); empty environment if omitted")
    p.add_argument("--seq-mode", choices=("overlapping", "consecutive"), default="overlapping")
    p.add_argument(
        "--inseq-nonstrict",
        action="store_true",
        help="let successive inSeq steps share a timestamp (published recursion)",
    )
    p.add_argument("--force-general", action="store_true", help="bypass the tractable path")
    p.add_argument("--explain", action="store_true", help="print verdict provenance")
    p.add_argument("--json", action="store_true")
    p.add_argument("--max-assignments", type=int, default=2**20)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("check-consistency", help="check an environment file for count clashes")
    p.add_argument("env")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check_consistency)

    p = sub.add_parser(
        "reduce-3sat", help="turn a DIMACS 3-CNF into an agreement file plus query file"
    )
    p.add_argument("cnf")
    p.add_argument("-o", "--out", help="output base path (defaults to the input stem)")
    p.set_defaults(func=cmd_reduce_3sat)

    p = sub.add_parser(
        "oracle-check", help="differentially compare tractable, general, and oracle paths"
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--allow-not-ps", action="store_true", help="include not[ps] prerequisites")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("fuzz", help="round-trip and robustness fuzzing of the parser")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=500)
    p.set_defaults(func=cmd_fuzz)

    return top


def main(argv=None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except DslParseError as exc:
        for diag in exc.diagnostics:
            print(diag, file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitExceeded as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def run_main() -> None:
    sys.exit(main())
