#!/usr/bin/env python3
"""
gpcf - Game Semantics for PCF, Main CLI Entry Point

Runs PCF programs operationally, through their game-semantic denotations and
by repeated decomposition; reads strategies back as evaluation trees,
compares terms observationally and checks the algebraic laws of the model.

Usage:
    python gpcf.py <command> [options] ...

Examples:
    # Evaluate with the reduction semantics
    python gpcf.py run --backend op programs/fact4.pcf

    # Read the identity back at depth 2
    python gpcf.py readback --depth 2 programs/id.pcf

    # Look for a context separating two terms
    python gpcf.py compare --depth 1 programs/const0.pcf programs/if0x.pcf
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from src.combinators import get_pairing, parse_expression
from src.config import Config
from src.decomposition import decomposition_tree, eta_k, run_decomposed
from src.denotation import OPENING, denote, play_game
from src.errors import GpcfError, PcfTypeError
from src.game_core import (
    Ans,
    Move,
    R,
    format_position,
    game_to_text,
    move_to_json,
    position_key,
)
from src.observation import (
    VerdictKind,
    adequacy_check,
    load_corpus,
    load_functions,
    obs_compare,
    replay_witness,
)
from src.pcf_lang import (
    Answer,
    Lam,
    N,
    Term,
    eval_op,
    fet_to_text,
    parse,
    term_to_text,
    type_to_text,
    typecheck,
)
from src.report_generator import ReportGenerator
from src.strategy import traces
from pipeline.run_log import log_run, summarize_runs
from pipeline.suites import CORPUS_SUITES, SUITES

logger = logging.getLogger(__name__)

ROOT = Path(__file__).parent
ADEQUACY_CORPUS = ROOT / "corpus" / "adequacy.jsonl"
FUNCTION_CORPUS = ROOT / "corpus" / "functions.jsonl"

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


def read_program(path: str) -> Term:
    """Parse a UTF-8 program file"""
    return parse(Path(path).read_text(encoding="utf-8"))


def binder_names(t: Term) -> List[str]:
    """Names of the leading lambdas of a term"""
    names = []
    while isinstance(t, Lam):
        names.append(t.name)
        t = t.body
    return names


def emit(config: Config, data: Dict, text: str) -> None:
    if config.output_format == "json":
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        print(text)


def outcome_text(outcome) -> str:
    if isinstance(outcome, Answer):
        return str(outcome.n)
    reason = "out of fuel" if outcome.fuel_exhausted else "stuck"
    return f"unresolved ({reason} after {outcome.steps} steps)"


def require_ground(t: Term) -> None:
    ty = typecheck([], t)
    if ty != N:
        raise PcfTypeError(f"Expected a program of type N, got {type_to_text(ty)}")


# ============================================
# SUBCOMMANDS
# ============================================

def cmd_parse(args, config: Config) -> int:
    t = read_program(args.file)
    emit(config, {"term": term_to_text(t)}, term_to_text(t))
    return EXIT_OK


def cmd_check(args, config: Config) -> int:
    t = read_program(args.file)
    ty = type_to_text(typecheck([], t))
    emit(config, {"term": term_to_text(t), "type": ty}, ty)
    return EXIT_OK


def cmd_run(args, config: Config) -> int:
    t = read_program(args.file)
    require_ground(t)
    start = time.time()
    extra: Dict = {}
    if args.backend == "op":
        outcome = eval_op(t, config.eval_fuel)
    elif args.backend == "game":
        run = play_game(t, config.fuel(), config.bounds(), get_pairing(config.pairing))
        outcome = run.outcome
        extra = {"y_depth": run.y_depth, "diagnostics": run.diagnostics.to_dict()}
    else:
        outcome = run_decomposed(t, config.fuel(), bounds=config.bounds(), pairing=get_pairing(config.pairing))
    elapsed = time.time() - start
    logger.debug(f"{args.backend} backend finished in {elapsed:.2f}s")
    emit(config, {"backend": args.backend, "outcome": outcome.to_dict(), **extra}, outcome_text(outcome))
    return EXIT_OK if isinstance(outcome, Answer) else EXIT_NEGATIVE


def _maximal(positions) -> List:
    prefixes = {s[:i] for s in positions for i in range(len(s))}
    return sorted((s for s in positions if s not in prefixes), key=position_key)


def cmd_trace(args, config: Config) -> int:
    if Path(args.target).is_file():
        t = read_program(args.target)
        require_ground(t)
        log: List[str] = []
        run = play_game(t, config.fuel(), config.bounds(), get_pairing(config.pairing), log=log)
        play = [OPENING]
        if isinstance(run.outcome, Answer):
            play.append(Move((R,), Ans(run.outcome.n)))
        text = format_position(play)
        if args.exchanges:
            text += "\n\n" + "\n".join(log)
        emit(
            config,
            {
                "play": [move_to_json(m) for m in play],
                "outcome": run.outcome.to_dict(),
                "y_depth": run.y_depth,
                "exchanges": log if args.exchanges else len(log),
            },
            text,
        )
        return EXIT_OK if isinstance(run.outcome, Answer) else EXIT_NEGATIVE
    sigma = parse_expression(args.target, config.engine())
    plays = _maximal(traces(sigma, config.bounds()))
    emit(
        config,
        {"game": game_to_text(sigma.game), "positions": [[move_to_json(m) for m in s] for s in plays]},
        "\n\n".join(format_position(s) for s in plays) if plays else "(no moves)",
    )
    return EXIT_OK


def _render_tree(node: Dict, indent: int = 0) -> List[str]:
    pad = "  " * indent
    if node["kind"] == "bottom":
        return [f"{pad}⊥"]
    if node["kind"] == "truncated":
        return [f"{pad}…"]
    if node["kind"] == "const":
        return [f"{pad}{node['n']}"]
    lines = [f"{pad}case {node['head']} (variable {node['position']})"]
    for j, arg in enumerate(node["args"], 1):
        lines.append(f"{pad}  arg {j}:")
        lines.extend(_render_tree(arg, indent + 2))
    for n, answer in node["answers"].items():
        lines.append(f"{pad}  {n} ↦")
        lines.extend(_render_tree(answer, indent + 2))
    return lines


def cmd_decompose(args, config: Config) -> int:
    t = read_program(args.file)
    typecheck([], t)
    tree = decomposition_tree(denote([], t, config.fuel()), config.depth, (), binder_names(t))
    emit(config, tree, "\n".join(_render_tree(tree)))
    return EXIT_OK


def cmd_readback(args, config: Config) -> int:
    t = read_program(args.file)
    ty = typecheck([], t)
    depth = config.depth
    tree = eta_k(depth, denote([], t, config.fuel()), (), binder_names(t))
    text = fet_to_text(tree, (), ty)
    emit(config, {"depth": depth, "type": type_to_text(ty), "readback": text}, text)
    return EXIT_OK


def cmd_compare(args, config: Config) -> int:
    m, n = read_program(args.left), read_program(args.right)
    depth = config.depth
    verdicts = {}
    for direction, (a, b) in (("M ≤ N", (m, n)), ("N ≤ M", (n, m))):
        verdict = obs_compare(a, b, depth, config.eval_fuel, config.bounds(), limit=args.limit)
        if verdict.kind == VerdictKind.NOT_LEQ and not replay_witness(a, b, verdict, config.eval_fuel):
            logger.warning(f"✗ witness for {direction} did not replay")
        verdicts[direction] = verdict.to_dict()

    lines = []
    for direction, verdict in verdicts.items():
        line = f"{direction}: {verdict['verdict']} ({verdict['checked']} contexts)"
        if verdict["witness"] is not None:
            line += f"\n  witness: [.] {verdict['witness']}"
        lines.append(line)
    emit(config, {"left": term_to_text(m), "right": term_to_text(n), "verdicts": verdicts}, "\n".join(lines))

    if args.report:
        ReportGenerator(args.report).generate_comparison_report(
            term_to_text(m), term_to_text(n), verdicts, f"compare_{Path(args.left).stem}_{Path(args.right).stem}"
        )
    negative = any(v["verdict"] == VerdictKind.NOT_LEQ.value for v in verdicts.values())
    return EXIT_NEGATIVE if negative else EXIT_OK


def cmd_adequacy(args, config: Config) -> int:
    entries = load_corpus(args.corpus, include_slow=not args.skip_slow)
    logger.info(f"\n{'='*80}")
    logger.info(f"ADEQUACY: {len(entries)} programs from {args.corpus}")
    logger.info(f"{'='*80}\n")
    start = time.time()
    report = adequacy_check(entries, config.fuel(), config.bounds(), config.eval_fuel)
    elapsed = time.time() - start
    data = report.to_dict()
    summary = data["summary"]
    log_run("adequacy", summary["total"], summary["mismatch"], sum(r.steps for r in report.results), elapsed,
            log_file=config.run_log)

    lines = [f"{'✓' if report.ok else '✗'} {summary['pass']} pass, {summary['consistent']} consistent, "
             f"{summary['mismatch']} mismatch ({elapsed:.1f}s)"]
    for r in report.mismatches:
        lines.append(f"  ✗ {r.entry.name}: op={outcome_text(r.operational)} game={outcome_text(r.game)}")
    emit(config, data, "\n".join(lines))
    if args.report:
        ReportGenerator(args.report).generate_adequacy_report(data)
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def cmd_laws(args, config: Config) -> int:
    names = args.suite or list(SUITES)
    functions = load_functions(args.functions) if CORPUS_SUITES & set(names) else []
    logger.info(f"\n{'='*80}")
    logger.info(f"LAW SUITES: {', '.join(names)} (seed {args.seed}, {args.cases} cases)")
    logger.info(f"{'='*80}\n")

    results = []
    start = time.time()
    for name in names:
        suite_cls = SUITES[name]
        suite = suite_cls(functions=functions) if name in CORPUS_SUITES else suite_cls()
        rng = np.random.default_rng(args.seed)
        result = suite.run(rng, args.cases, args.seed)
        log_run(name, result.cases, len({f.split(':')[0] for f in result.failures}), 0, result.elapsed,
                seed=args.seed, log_file=config.run_log)
        if args.report:
            suite.save_result(result, Path(args.report))
        results.append(result)
    total_time = time.time() - start

    data = {"seed": args.seed, "cases": args.cases, "suites": [r.to_dict() for r in results]}
    lines = []
    for r in results:
        lines.append(f"{'✓' if r.passed else '✗'} {r.suite}: {len(r.failures)} failures in {r.cases} cases ({r.elapsed:.1f}s)")
        lines.extend(f"    {failure}" for failure in r.failures[:10])
    emit(config, data, "\n".join(lines))
    if args.report:
        ReportGenerator(args.report).generate_law_report([r.to_dict() for r in results], total_time)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NEGATIVE


def cmd_runs(args, config: Config) -> int:
    summary = summarize_runs(config.run_log)
    lines = [f"{summary['runs']} runs, {summary['elapsed']:.1f}s in total"]
    for suite, totals in sorted(summary["by_suite"].items()):
        marker = "✓" if not totals["failures"] else "✗"
        lines.append(f"  {marker} {suite}: {totals['runs']} runs, {totals['cases']} cases, {totals['failures']} failing")
    emit(config, summary, "\n".join(lines))
    return EXIT_OK


# ============================================
# ARGUMENTS
# ============================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help='Machine-readable output')
    common.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    common.add_argument('--fuel', type=int, default=None, help='Unfolding depth for Y (default: 32)')
    common.add_argument('--steps', type=int, default=None, help='Exchange budget per run (default: 100000)')
    common.add_argument('--max-nat', type=int, default=None, help='Largest numeral explored (default: 8)')
    common.add_argument('--max-index', type=int, default=None, help='Largest copy index explored (default: 8)')
    common.add_argument('--max-len', type=int, default=None, help='Longest position explored (default: 64)')
    common.add_argument('--eval-fuel', type=int, default=None, help='Reduction steps for eval_op (default: 1000000)')
    common.add_argument('--pairing', choices=['cantor', 'gamma'], default=None, help='Index pairing (default: gamma)')
    common.add_argument('--audit', action='store_true', help='Assert legality of every explored position')

    parser = argparse.ArgumentParser(
        description='Executable game semantics for PCF',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Run a program three ways
  python gpcf.py run --backend op programs/fact4.pcf
  python gpcf.py run --backend game programs/fact4.pcf
  python gpcf.py run --backend decomp programs/fact4.pcf

  # Print the play of a program, or the plays of a combinator expression
  python gpcf.py trace programs/fact4.pcf
  python gpcf.py trace --max-nat 2 --max-len 6 "compose(promote(der(N)), der(N))"

  # Readback and decomposition
  python gpcf.py readback --depth 2 programs/id.pcf
  python gpcf.py decompose --depth 2 programs/if0x.pcf

  # Observational comparison (exit 1 when a context separates)
  python gpcf.py compare --depth 1 programs/const0.pcf programs/if0x.pcf

  # Adequacy corpus and law suites, with markdown reports
  python gpcf.py adequacy --report output/
  python gpcf.py laws --seed 7 --cases 50 --suite category --suite comonad
  python gpcf.py runs

Settings also come from GPCF_* variables in .env; flags override them.
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('parse', parents=[common], help='Parse and pretty-print a program')
    p.add_argument('file')
    p.set_defaults(handler=cmd_parse)

    p = sub.add_parser('check', parents=[common], help='Print the type of a closed program')
    p.add_argument('file')
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser('run', parents=[common], help='Evaluate a closed program of type N')
    p.add_argument('--backend', choices=['op', 'game', 'decomp'], default='op')
    p.add_argument('file')
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser('trace', parents=[common], help='Print plays of a program or combinator expression')
    p.add_argument('--exchanges', action='store_true', help='Also print the internal exchanges of a program run')
    p.add_argument('target', help='Program file or combinator expression')
    p.set_defaults(handler=cmd_trace)

    p = sub.add_parser('decompose', parents=[common], help='Print the decomposition tree of a denotation')
    p.add_argument('--depth', type=int, default=None)
    p.add_argument('file')
    p.set_defaults(handler=cmd_decompose)

    p = sub.add_parser('readback', parents=[common], help='Read a denotation back as a PCFc term')
    p.add_argument('--depth', type=int, default=None)
    p.add_argument('file')
    p.set_defaults(handler=cmd_readback)

    p = sub.add_parser('compare', parents=[common], help='Compare two closed terms observationally')
    p.add_argument('--depth', type=int, default=None)
    p.add_argument('--limit', type=int, default=None, help='Stop after this many contexts per direction')
    p.add_argument('--report', default=None, help='Directory for a markdown report')
    p.add_argument('left')
    p.add_argument('right')
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser('adequacy', parents=[common], help='Run the adequacy corpus on both semantics')
    p.add_argument('--corpus', default=str(ADEQUACY_CORPUS))
    p.add_argument('--skip-slow', action='store_true', help='Leave out entries marked slow')
    p.add_argument('--report', default=None, help='Directory for a markdown report')
    p.set_defaults(handler=cmd_adequacy)

    p = sub.add_parser('laws', parents=[common], help='Run the law suites')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--cases', type=int, default=50)
    p.add_argument('--suite', action='append', choices=sorted(SUITES), help='Suite to run (repeatable; default: all)')
    p.add_argument('--functions', default=str(FUNCTION_CORPUS), help='Function corpus for the decomposition suites')
    p.add_argument('--report', default=None, help='Directory for JSON results and a markdown report')
    p.set_defaults(handler=cmd_laws)

    p = sub.add_parser('runs', parents=[common], help='Summarize the run ledger')
    p.set_defaults(handler=cmd_runs)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        level = logging.DEBUG
    elif args.command in ('laws', 'adequacy'):
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s', force=True)

    try:
        config = Config.from_env(
            y_depth=args.fuel,
            max_steps=args.steps,
            max_nat=args.max_nat,
            max_index=args.max_index,
            max_len=args.max_len,
            eval_fuel=args.eval_fuel,
            pairing=args.pairing,
            depth=getattr(args, 'depth', None),
            output_format='json' if args.json else None,
            audit=True if args.audit else None,
        )
        config.apply()
        return args.handler(args, config)
    except (GpcfError, OSError, ValueError) as e:
        print(f"✗ {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
