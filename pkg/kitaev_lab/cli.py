"""
Command-line front end: `python -m kitaev_lab <subcommand> ...`.

CSV goes to stdout (or --out), logs go to stderr. Exit codes: 0 success,
2 usage or validation error, 1 computation error.
"""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError

from kitaev_lab import __version__
from kitaev_lab.bounds import (
    bound_doubled,
    bound_tripled,
    cost_kitaev_closed,
    is_doubled_shape,
    is_kitaev_shape,
    is_tripled_shape,
    tripled_ratio_table,
)
from kitaev_lab.cost import make_report, optimum_cost
from kitaev_lab.errors import ConfigurationError, KitaevLabError, UsageError
from kitaev_lab.loss import evaluate
from kitaev_lab.profile import compute_profile
from kitaev_lab.report import csv_text, report_fig2, report_fig3
from kitaev_lab.schemas import (
    REPETITION_TIERS,
    Alphabet,
    LossConfig,
    LossMode,
    MultiplicityVector,
    SearchConfig,
    SimConfig,
)
from kitaev_lab.search import find_qubit_minimizers, run_search
from kitaev_lab.settings import Settings, load_settings, set_settings
from kitaev_lab.simulator import simulate

logger = logging.getLogger("kitaev_lab")

EXIT_OK, EXIT_COMPUTATION, EXIT_USAGE = 0, 1, 2


class _ArgumentParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so run() owns the exit code."""

    def error(self, message: str) -> None:
        raise UsageError(message)


def _vector(text: str) -> MultiplicityVector:
    try:
        return MultiplicityVector.parse(text)
    except ValidationError as e:
        raise argparse.ArgumentTypeError(f"invalid vector {text!r}: {e.errors()[0]['msg']}") from e
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid vector {text!r}: {e}") from e


def _eta_list(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid eta list {text!r}") from e


# ============= Subcommands =============

def cmd_profile(args: argparse.Namespace, settings: Settings) -> str:
    p = compute_profile(args.m)
    return csv_text(("n", "J"), ((n, c) for n, c in enumerate(p.counts)))


def cmd_cost(args: argparse.Namespace, settings: Settings) -> str:
    r = make_report(args.m)
    return csv_text(("m", "N", "M", "cost", "ratio"), [(r.vector.to_csv_field(), r.n_total, r.m_count, r.cost, r.optimum_ratio)])


def cmd_bounds(args: argparse.Namespace, settings: Settings) -> str:
    if args.n_max < 1:
        raise UsageError("--n-max must be >= 1")
    rows = []
    for n in range(1, args.n_max + 1):
        rows.append(
            (
                n,
                optimum_cost(n),
                cost_kitaev_closed(n) if is_kitaev_shape(n) else None,
                bound_doubled(n) if is_doubled_shape(n) else None,
                bound_tripled(n) if is_tripled_shape(n) else None,
            )
        )
    return csv_text(("n", "optimum", "kitaev", "bound_m2", "bound_m3"), rows)


def cmd_lossy(args: argparse.Namespace, settings: Settings) -> str:
    config = LossConfig(eta=args.eta, mode=LossMode(args.mode))
    cost, resources = evaluate(args.m, config)
    return csv_text(("m", "eta", "mode", "cost", "resources"), [(args.m.to_csv_field(), args.eta, args.mode, cost, resources)])


def cmd_search(args: argparse.Namespace, settings: Settings) -> str:
    cfg = SearchConfig(
        n_min=args.n_min,
        n_max=args.n_max,
        alphabet=Alphabet(args.alphabet),
        min_repetitions=args.min_reps,
        m_max=args.m_max if args.m_max is not None else settings.search_max_qubits,
        strategy=args.strategy,
        repetition_tiers=REPETITION_TIERS if args.tiered_reps else (),
        exhaustive_limit=settings.exhaustive_limit,
    )
    result = run_search(cfg, eta=args.eta, threads=settings.threads)
    return csv_text(
        ("n", "best_m", "cost", "ratio"),
        ((e.n_key, e.vector.to_csv_field(), e.cost, e.ratio) for e in result.entries),
    )


def cmd_verify_shor(args: argparse.Namespace, settings: Settings) -> str:
    report = find_qubit_minimizers(args.m_count, args.cap)
    status = "PASS" if report.passed else "FAIL"
    minimizers = " ".join(v.to_csv_field() for v in report.minimizers)
    return csv_text(
        ("status", "M", "cap", "minimizer", "cost", "evaluated", "pruned"),
        [(status, report.m_count, report.entry_cap, minimizers, report.min_cost, report.evaluated, report.pruned)],
    )


def cmd_simulate(args: argparse.Namespace, settings: Settings) -> str:
    seed = args.seed if args.seed is not None else settings.seed
    cfg = SimConfig(vector=args.m, true_phase=args.phi, samples=args.samples, rng_seed=seed)
    result = simulate(cfg, threads=settings.threads, shards=settings.sim_shards)
    return csv_text(
        ("m", "phi", "samples", "seed", "mean", "std_error", "analytic"),
        [(args.m.to_csv_field(), args.phi, args.samples, seed, result.mean_cost, result.std_error, result.analytic)],
    )


def _figure_output(report, fmt: str) -> str:
    return report.to_svg() if fmt == "svg" else report.to_csv()


def cmd_report_fig2(args: argparse.Namespace, settings: Settings) -> str:
    return _figure_output(report_fig2(args.n_max, threads=settings.threads), args.format)


def cmd_report_fig3(args: argparse.Namespace, settings: Settings) -> str:
    return _figure_output(report_fig3(args.eta, args.n_max, threads=settings.threads), args.format)


def cmd_tripled_ratio(args: argparse.Namespace, settings: Settings) -> str:
    if args.m_max < 3:
        raise UsageError("--m-max must be >= 3")
    rows = tripled_ratio_table(args.m_max)
    return csv_text(("M", "N", "cost", "optimum", "ratio"), ((r["M"], r["N"], r["cost"], r["optimum"], r["ratio"]) for r in rows))


COMMANDS: Dict[str, Callable[[argparse.Namespace, Settings], str]] = {
    "profile": cmd_profile,
    "cost": cmd_cost,
    "bounds": cmd_bounds,
    "lossy": cmd_lossy,
    "search": cmd_search,
    "verify-shor": cmd_verify_shor,
    "simulate": cmd_simulate,
    "report-fig2": cmd_report_fig2,
    "report-fig3": cmd_report_fig3,
    "tripled-ratio": cmd_tripled_ratio,
}


# ============= Parser =============

def build_parser(defaults: Settings) -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    common = _ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--threads", type=int, default=None, help=f"worker processes (KPL_THREADS, now {defaults.threads})")
    common.add_argument("--seed", type=int, default=None, help=f"Monte Carlo seed (KPL_SEED, now {defaults.seed})")
    common.add_argument("--log-level", default=None, help=f"logging level (KPL_LOG_LEVEL, now {defaults.log_level})")

    parser = _ArgumentParser(prog="kitaev_lab", description="Generalized Kitaev phase-estimation costs.", formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("profile", parents=[common], formatter_class=fmt, help="multiplicity profile J(n)")
    p.add_argument("--m", type=_vector, required=True, help="vector, e.g. 1,2,4")

    p = sub.add_parser("cost", parents=[common], formatter_class=fmt, help="optimal cost of a vector")
    p.add_argument("--m", type=_vector, required=True)

    p = sub.add_parser("bounds", parents=[common], formatter_class=fmt, help="closed forms for N = 1..n_max")
    p.add_argument("--n-max", type=int, required=True)

    p = sub.add_parser("lossy", parents=[common], formatter_class=fmt, help="cost under photon loss")
    p.add_argument("--m", type=_vector, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--mode", choices=[m.value for m in LossMode], default=LossMode.EXACT.value)

    p = sub.add_parser("search", parents=[common], formatter_class=fmt, help="best vector per N")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--alphabet", choices=[a.value for a in Alphabet], default=Alphabet.POWERS_OF_TWO.value)
    p.add_argument("--min-reps", type=int, default=1)
    p.add_argument("--m-max", type=int, default=None, help="max vector length (KPL_SEARCH_MAX_QUBITS)")
    p.add_argument("--strategy", choices=["constrained", "exhaustive"], default="constrained")
    p.add_argument("--tiered-reps", action="store_true", help="require 2 repetitions from M=21 and 3 from M=26")
    p.add_argument("--eta", type=float, default=1.0, help="transmission; < 1 keys results by adjusted resources")

    p = sub.add_parser("verify-shor", parents=[common], formatter_class=fmt, help="qubit-count optimality of m1")
    p.add_argument("--m-count", type=int, required=True)
    p.add_argument("--cap", type=int, default=None, help="largest entry (default 2^M)")

    p = sub.add_parser("simulate", parents=[common], formatter_class=fmt, help="Monte Carlo cost estimate")
    p.add_argument("--m", type=_vector, required=True)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=100_000)

    for name, help_text in (("report-fig2", "cost versus N figure"), ("report-fig3", "lossy figure")):
        p = sub.add_parser(name, parents=[common], formatter_class=fmt, help=help_text)
        p.add_argument("--n-max", type=int, required=True)
        p.add_argument("--format", choices=["csv", "svg"], default="csv")
        if name == "report-fig3":
            p.add_argument("--eta", type=_eta_list, default=[0.9, 0.5], help="comma-separated transmissions")

    p = sub.add_parser("tripled-ratio", parents=[common], formatter_class=fmt, help="m3 cost / optimum by M")
    p.add_argument("--m-max", type=int, required=True)
    return parser


def _configure_logging(level: str) -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(level.upper())
    logger.propagate = False
    return handler


def _one_line(e: Exception) -> str:
    if isinstance(e, ValidationError):
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        return f"{where}: {first['msg']}" if where else first["msg"]
    return str(e)


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    handler = None
    try:
        defaults = load_settings()
        args = build_parser(defaults).parse_args(argv)
        settings = load_settings(threads=args.threads, seed=args.seed, log_level=args.log_level)
        if not isinstance(logging.getLevelName(settings.log_level.upper()), int):
            raise ConfigurationError(f"unknown log level {settings.log_level!r}")
        handler = _configure_logging(settings.log_level)
        set_settings(settings)
        output = COMMANDS[args.command](args, settings)
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)
    except (UsageError, ConfigurationError, ValidationError) as e:
        print(f"error: {_one_line(e)}", file=sys.stderr)
        return EXIT_USAGE
    except (KitaevLabError, ArithmeticError) as e:
        print(f"error: {_one_line(e)}", file=sys.stderr)
        return EXIT_COMPUTATION
    except ValueError as e:
        print(f"error: {_one_line(e)}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        set_settings(None)
        if handler is not None:
            logger.removeHandler(handler)
            logger.setLevel(logging.NOTSET)
            logger.propagate = True

    if args.out:
        with open(args.out, "w") as f:
            f.write(output)
    else:
        sys.stdout.write(output)
    return EXIT_OK
