"""Command-line front end: ``cug parse|judge|explain|bench``.

Exit codes: 0 success (a parse was found / every judgment passed),
1 no parse or a failed judgment, 2 usage, grammar or resource errors.
Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .engine import DepthLimitExceeded
from .fragments import FRAGMENTS, load_fragment, parse_corpus
from .grammar import GrammarError, parse_grammar
from .parser import UnknownWord, logical_form, parse


class CliError(Exception):
    pass


def _load(args):
    """(program, corpus or None) from --grammar/--corpus or --fragment."""
    if getattr(args, "grammar", None):
        path = Path(args.grammar)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise CliError(f"cannot read grammar: {e}") from None
        program = parse_grammar(text).program()
        corpus = None
        if getattr(args, "corpus", None):
            try:
                corpus = parse_corpus(Path(args.corpus).read_text(encoding="utf-8"))
            except OSError as e:
                raise CliError(f"cannot read corpus: {e}") from None
        return program, corpus
    if getattr(args, "fragment", None):
        frag = load_fragment(args.fragment)
        return frag.program, frag.corpus
    raise CliError("one of --grammar or --fragment is required")


def cmd_parse(args) -> int:
    program, _ = _load(args)
    result = parse(args.sentence, program, strategy=args.strategy,
                   max_solutions=args.max_solutions)
    if args.json:
        print(result.to_json())
    else:
        print(f"{result.sentence}: {result.derivation_count} derivation(s), "
              f"{len(result.readings)} reading(s)")
        if result.readings:
            print(result.text())
        if result.residuals_forced:
            print("note: residual constraints were forced", file=sys.stderr)
    return 0 if result.grammatical else 1


def _check(entry, result) -> list[str]:
    problems = []
    if result.grammatical != entry.grammatical:
        problems.append(f"grammatical={result.grammatical}")
    if entry.derivations is not None and result.derivation_count != entry.derivations:
        problems.append(f"derivations={result.derivation_count} (want {entry.derivations})")
    if entry.readings is not None and len(result.readings) != entry.readings:
        problems.append(f"readings={len(result.readings)} (want {entry.readings})")
    return problems


def _signature(result):
    return sorted((d.key(), logical_form(d)) for d in result.derivations)


def cmd_judge(args) -> int:
    program, corpus = _load(args)
    if corpus is None:
        raise CliError("judge needs a corpus (--fragment, or --grammar with --corpus)")
    strategies = ["sr", "forest"] if args.strategy == "both" else [args.strategy]
    all_ok = True
    rows = []
    for entry in corpus:
        results = {st: parse(list(entry.tokens), program, strategy=st) for st in strategies}
        problems = []
        for st, res in results.items():
            problems.extend(f"{st}: {p}" for p in _check(entry, res))
        if len(results) == 2:
            if _signature(results["sr"]) != _signature(results["forest"]):
                problems.append("strategies disagree")
        ok = not problems
        all_ok &= ok
        rows.append({
            "sentence": entry.sentence, "src": entry.source,
            "expected": entry.grammatical, "pass": ok, "problems": problems,
            "derivations": {st: r.derivation_count for st, r in results.items()},
            "readings": {st: len(r.readings) for st, r in results.items()},
        })
        if not args.json:
            status = "PASS" if ok else "FAIL"
            counts = ", ".join(f"{st} {r.derivation_count}d/{len(r.readings)}r"
                               for st, r in results.items())
            sign = "+" if entry.grammatical else "-"
            line = f"{status} {entry.source or '-':>5} {sign} {entry.sentence}  [{counts}]"
            if problems:
                line += "  " + "; ".join(problems)
            print(line)
    if args.json:
        print(json.dumps({"pass": all_ok, "entries": rows}))
    else:
        passed = sum(r["pass"] for r in rows)
        print(f"{passed}/{len(rows)} passed")
    return 0 if all_ok else 1


def cmd_explain(args) -> int:
    program, _ = _load(args)
    result = parse(args.sentence, program, max_solutions=1, log=True)
    for kind, detail in result.events:
        print(f"{kind:8} {detail}")
    if result.grammatical:
        print(f"accepted: {result.readings[0].text}")
    else:
        print("no accepted parse")
    return 0 if result.grammatical else 1


def cmd_bench(args) -> int:
    if args.repeat < 1:
        raise CliError("--repeat must be at least 1")
    program, corpus = _load(args)
    if corpus is None:
        raise CliError("bench needs a corpus")
    strategies = ["sr", "forest"] if program.backbone else ["sr"]
    totals = dict.fromkeys(strategies, 0.0)
    print(f"{'sentence':50}" + "".join(f" {st + ' ms':>10}" for st in strategies))
    for entry in corpus:
        row = f"{entry.sentence[:50]:50}"
        for st in strategies:
            t0 = time.perf_counter()
            for _ in range(args.repeat):
                parse(list(entry.tokens), program, strategy=st)
            ms = (time.perf_counter() - t0) * 1000
            totals[st] += ms
            row += f" {ms:10.1f}"
        print(row)
    print(f"{'total':50}" + "".join(f" {totals[st]:10.1f}" for st in strategies))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cug", description="Categorial unification grammar parser")
    sub = ap.add_subparsers(dest="command", required=True)

    def source(p, corpus=False):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--grammar", help="grammar file")
        g.add_argument("--fragment", choices=FRAGMENTS, help="bundled fragment")
        if corpus:
            p.add_argument("--corpus", help="corpus file (with --grammar)")

    p = sub.add_parser("parse", help="parse one sentence")
    source(p)
    p.add_argument("--strategy", choices=["sr", "forest"], default="sr")
    p.add_argument("--json", action="store_true")
    p.add_argument("--max-solutions", type=int)
    p.add_argument("sentence")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("judge", help="run a judgment corpus")
    source(p, corpus=True)
    p.add_argument("--strategy", choices=["sr", "forest", "both"], default="sr")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_judge)

    p = sub.add_parser("explain", help="show the constraint/derivation event log")
    source(p)
    p.add_argument("sentence")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("bench", help="time both strategies on a corpus")
    source(p, corpus=True)
    p.add_argument("--repeat", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (CliError, GrammarError, UnknownWord, DepthLimitExceeded, ValueError) as e:
        print(f"cug: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
