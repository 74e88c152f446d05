"""Command-line interface: ``lllkit check|solve|enumerate|experiment``.

Exit codes: 0 success, 2 criterion unsatisfied, 3 cap exceeded,
4 parse or model error.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
from fractions import Fraction

from . import shearer
from .derandomize import solve_deterministic
from .errors import CapExceeded, CriterionUnsatisfied, InvalidModel, ParseError, UnsupportedDistribution
from .events import assignment_dict, load_model
from .harness import EXPERIMENTS, FAMILIES, ExperimentSpec, run_experiment
from .parallel import run_parallel
from .sequential import RULES, run_sequential
from .table import ResamplingTable, default_column_cap
from .wdenum import choose_cap, enumerate_wds, run_wdenum

EXIT_OK = 0
EXIT_CRITERION = 2
EXIT_CAP = 3
EXIT_MODEL = 4

ENGINES = ("seq", "par", "wdenum", "det")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lllkit", description="Algorithmic Lovász Local Lemma toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="print the exact criterion report of a model")
    p.add_argument("model")
    p.add_argument("--scale", type=_rational, default=Fraction(1))

    p = sub.add_parser("solve", help="find an assignment avoiding every bad event")
    p.add_argument("model")
    p.add_argument("--engine", choices=ENGINES, default="seq")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=_rational, default=None, help="declared slack")
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("--rule", choices=RULES, default=RULES[0], help="sequential selection rule")
    p.add_argument("--force", action="store_true", help="run even if the criterion check fails")
    p.add_argument("--s-cap", type=int, default=None, help="WD family cap (default 100000, or 1000 per point for det)")
    p.add_argument("--K", type=int, default=None, help="WD size cap")
    p.add_argument("--q", type=int, default=None, help="field size (det engine)")
    p.add_argument("--k", type=int, default=2, help="independence of the sample space (det engine)")
    p.add_argument("--dump-gamma", metavar="FILE", default=None, help="write the single-sink WDs as JSON (wdenum)")

    p = sub.add_parser("enumerate", help="dump the single-sink WDs compatible with a seeded table")
    p.add_argument("model")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, required=True, help="maximum WD size K")
    p.add_argument("--s-cap", type=int, default=100_000)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment and write CSV")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--family", choices=FAMILIES, default="tiny_a")
    p.add_argument("--model", default=None)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--width", type=int, default=3)
    p.add_argument("--eps", type=_rational, default=None)
    p.add_argument("--r", type=int, default=10, help="size threshold for the WD tail count")
    p.add_argument("--timing", action="store_true", help="add a runtime column (not reproducible)")
    return ap


def _err(msg: str) -> None:
    print(f"lllkit: {msg}", file=_sys.stderr)


def _gate(sys, eps) -> bool:
    """Criterion check before a randomized solve."""
    if sys.m == 0:
        return True
    if sys.m <= shearer.DEFAULT_CAP:
        return shearer.check_shearer(sys, 1 + (eps or 0))
    if eps is None:
        raise CriterionUnsatisfied(f"{sys.m} events is too many for the exact check; declare --eps")
    return shearer.check_symmetric(sys, eps)


def _slack_hint(sys, eps) -> Fraction:
    if eps is not None:
        return min(Fraction(eps), Fraction(999, 1000))
    if sys.m == 0 or sys.m > shearer.DEFAULT_CAP:
        return Fraction(1, 4)
    try:
        ms = shearer.max_slack(sys)
    except CriterionUnsatisfied:
        # only reachable under --force
        return Fraction(1, 4)
    if ms == shearer.UNBOUNDED:
        return Fraction(1, 2)
    return min(max(ms, Fraction(1, 100)), Fraction(999, 1000))


def cmd_check(args) -> int:
    sys = load_model(args.model)
    rep = shearer.report(sys, scale=args.scale)
    print(rep.to_json(sys))
    return EXIT_OK if rep.satisfied.get("shearer") else EXIT_CRITERION


def cmd_solve(args) -> int:
    sys = load_model(args.model)
    if args.engine != "det" and not args.force and not _gate(sys, args.eps):
        _err("criterion check failed; rerun with --force to attempt anyway")
        return EXIT_CRITERION
    gamma_out = None
    if args.engine == "seq":
        eps = _slack_hint(sys, args.eps)
        table = ResamplingTable(sys, args.seed, max_column=max(default_column_cap(sys.n, eps), args.max_steps + 1))
        x, _, stats = run_sequential(sys, table, rule=args.rule, max_steps=args.max_steps, seed=args.seed)
    elif args.engine == "par":
        x, _, stats = run_parallel(sys, ResamplingTable(sys, args.seed), seed=args.seed, max_rounds=args.max_steps)
    elif args.engine == "wdenum":
        eps = _slack_hint(sys, args.eps)
        s_cap = args.s_cap or 100_000
        x, stats = run_wdenum(sys, args.seed, eps, s_cap=s_cap, K=args.K)
        if args.dump_gamma:
            K = args.K if args.K is not None else choose_cap(sys.n, eps)
            table = ResamplingTable(sys, args.seed, max_column=max(default_column_cap(sys.n, eps), 2 * K + 2))
            gamma_out = enumerate_wds(sys, table, K, s_cap)[1]
    else:
        eps = None if args.force else args.eps
        x, stats = solve_deterministic(sys, K=args.K, s_cap=args.s_cap or 1_000, k=args.k, q=args.q, epsilon=eps, return_stats=True)
    true = sorted(sys.events[b].id for b in sys.true_events(x))
    doc = {
        "engine": args.engine,
        "assignment": {str(k): v for k, v in assignment_dict(sys, x).items()},
        "true_events": true,
        "stats": stats.to_dict(timing=False),
    }
    print(json.dumps(doc, indent=2))
    if gamma_out is not None:
        with open(args.dump_gamma, "w") as fh:
            json.dump([G.to_dict() for G in gamma_out], fh)
    if true:
        _err(f"assignment leaves {len(true)} bad events true")
        return EXIT_CRITERION
    return EXIT_OK


def cmd_enumerate(args) -> int:
    sys = load_model(args.model)
    table = ResamplingTable(sys, args.seed, max_column=max(default_column_cap(sys.n, Fraction(1, 4)), 2 * args.cap + 2))
    _, gamma = enumerate_wds(sys, table, args.cap, args.s_cap)
    print(json.dumps([G.to_dict() for G in gamma], indent=2))
    return EXIT_OK


def cmd_experiment(args) -> int:
    spec = ExperimentSpec(
        name=args.name,
        family=args.family,
        n=args.n,
        width=args.width,
        model=args.model,
        epsilon=args.eps,
        trials=args.trials,
        seed=args.seed,
        out=args.out,
        r=args.r,
        timing=args.timing,
    )
    text, summary = run_experiment(spec)
    if not args.out:
        _sys.stdout.write(text)
    print(json.dumps(summary, indent=2), file=_sys.stderr if not args.out else _sys.stdout)
    return EXIT_OK


COMMANDS = {"check": cmd_check, "solve": cmd_solve, "enumerate": cmd_enumerate, "experiment": cmd_experiment}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CriterionUnsatisfied as exc:
        _err(f"criterion unsatisfied: {exc}")
        return EXIT_CRITERION
    except CapExceeded as exc:
        _err(f"cap exceeded: {exc}")
        return EXIT_CAP
    except (ParseError, InvalidModel, UnsupportedDistribution, OSError, ValueError) as exc:
        _err(f"model error: {exc}")
        return EXIT_MODEL


if __name__ == "__main__":
    _sys.exit(main())
