"""Command-line interface.

Subcommands operate on the JSON interchange files and print numeric results
with 12 significant digits.  Library errors map to distinct exit codes
(see ``--help``); demo reports write delimited output and a rendered figure
next to the JSON file.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import errors, jsonio
from .distributions import (
    check_cm_condition,
    lower_bound_family,
    span_dimension,
)
from .errors import CertificationFailed, CmAuctionError
from .experiments import distinguisher_curve, surplus_gap
from .linalg import DEFAULT_CAP, rank
from .mechanisms import (
    _stacked_conddist,
    sample_bound,
    sample_search,
    solve_lotteries,
)
from .verify import exact_certify, monte_carlo

DEFAULT_TOL = 1e-9
TOL_ENV_VAR = "CMAUCTION_TOL"

_ERROR_CLASSES = [
    errors.ParseError,
    errors.NegativeMass,
    errors.WrongLength,
    errors.NotNormalized,
    errors.ZeroMarginal,
    errors.HeterogeneousTypeSpaces,
    errors.BadEps,
    errors.BadH,
    errors.InfeasibleSizes,
    errors.DimensionOverflow,
    errors.NoSolution,
    errors.CmViolation,
    errors.ProfileOutOfSupport,
    errors.UnsupportedBidderCount,
    errors.AllZeroLikelihood,
    errors.CertificationFailed,
]


def fmt(x: float) -> str:
    return f"{x:.12g}"


@dataclass
class RunConfig:
    """Parsed invocation: one command plus its inputs and knobs."""

    command: str
    family: str | None = None
    dist: str | None = None
    auction: str | None = None
    out: str | None = None
    m: int | None = None
    member: int = 0
    tol: float = DEFAULT_TOL
    cap: int = DEFAULT_CAP
    seed: int = 0
    trials: int = 5000
    h: int = 2
    eps: float = 0.1
    counts: tuple[int, ...] = (0, 1, 10, 100, 1000, 10000)
    h_list: tuple[int, ...] = (2, 4, 8, 16, 32, 64)
    k: int = 3
    r: int = 2
    size: int = 3


def _default_tol() -> float:
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError:
        raise errors.ParseError(f"{TOL_ENV_VAR}={raw!r} is not a number") from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    exit_doc = "\n".join(
        f"  {cls.exit_code:>2}  {cls.__name__}" for cls in _ERROR_CLASSES
    )
    parser = argparse.ArgumentParser(
        prog="cmauction",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="exit codes:\n   0  success\n   1  unexpected error\n" + exit_doc,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, **flags):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--tol", type=float, default=None, help="numerical tolerance")
        p.add_argument(
            "--cap", type=int, default=DEFAULT_CAP, help="entry-count cap"
        )
        for flag, kwargs in flags.items():
            p.add_argument(flag, **kwargs)
        return p

    add(
        "check-cm",
        "per-bidder linear-independence verdicts for one distribution",
        **{"--dist": dict(required=True, help="distribution JSON")},
    )
    add(
        "span",
        "dimension spanned by a family's probability vectors",
        **{"--family": dict(required=True, help="family JSON")},
    )
    add(
        "bound",
        "worst-case sufficient sample count (k - span + 1)",
        **{"--family": dict(required=True, help="family JSON")},
    )
    add(
        "search",
        "smallest sample count with full stacked rank",
        **{"--family": dict(required=True, help="family JSON")},
    )
    add(
        "build",
        "solve lottery schedules and write the auction JSON",
        **{
            "--family": dict(required=True, help="family JSON"),
            "--m": dict(type=int, default=None, help="sample count (default: search)"),
            "--out": dict(required=True, help="auction JSON to write"),
        },
    )
    add(
        "certify",
        "exact certification report; nonzero exit on any failed verdict",
        **{
            "--auction": dict(required=True, help="auction JSON"),
            "--family": dict(required=True, help="family JSON"),
            "--out": dict(default=None, help="report JSON to write"),
        },
    )
    add(
        "simulate",
        "seeded Monte-Carlo cross-check of revenue and utilities",
        **{
            "--auction": dict(required=True, help="auction JSON"),
            "--family": dict(required=True, help="family JSON"),
            "--member": dict(type=int, default=0, help="member index to simulate"),
            "--trials": dict(type=int, default=100000),
            "--seed": dict(type=int, default=0),
            "--out": dict(default=None, help="result JSON to write"),
        },
    )
    add(
        "demo-coin",
        "distinguisher error-rate curve on the coin pair",
        **{
            "--h": dict(type=int, default=2),
            "--eps": dict(type=float, default=0.1),
            "--counts": dict(type=_int_list, default=(0, 1, 10, 100, 1000, 10000)),
            "--trials": dict(type=int, default=5000),
            "--seed": dict(type=int, default=0),
            "--out": dict(default=None, help="curve JSON (CSV and PNG land beside it)"),
        },
    )
    add(
        "demo-gap",
        "full surplus vs. lookahead revenue across value ranges",
        **{
            "--h-list": dict(type=_int_list, default=(2, 4, 8, 16, 32, 64)),
            "--eps": dict(type=float, default=0.1),
            "--out": dict(default=None, help="gap JSON (CSV and PNG land beside it)"),
        },
    )
    add(
        "demo-lb",
        "worst-case family: stacked ranks just below and at the bound",
        **{
            "--k": dict(type=int, default=3),
            "--r": dict(type=int, default=2),
            "--size": dict(type=int, default=3, help="per-bidder grid size"),
            "--seed": dict(type=int, default=0),
        },
    )
    return parser


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    tol = args.tol if args.tol is not None else _default_tol()
    if tol <= 0:
        raise errors.ParseError("tolerance must be positive")
    if args.cap < 1:
        raise errors.ParseError("cap must be at least 1")
    cfg = RunConfig(command=args.command, tol=tol, cap=args.cap)
    for name in (
        "family", "dist", "auction", "out", "m", "member", "seed",
        "trials", "h", "eps", "counts", "h_list", "k", "r", "size",
    ):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    return cfg


def _with_suffix(out: str, suffix: str) -> Path:
    return Path(out).with_suffix(suffix)


def _cmd_check_cm(cfg: RunConfig) -> int:
    d = jsonio.load_distribution(cfg.dist)
    verdicts = check_cm_condition(d, cfg.tol)
    for i, ok in enumerate(verdicts):
        print(f"bidder {i}: {'independent' if ok else 'DEPENDENT'}")
    print(f"cm_condition: {'ok' if all(verdicts) else 'violated'}")
    return 0


def _cmd_span(cfg: RunConfig) -> int:
    print(span_dimension(jsonio.load_family(cfg.family), cfg.tol))
    return 0


def _cmd_bound(cfg: RunConfig) -> int:
    print(sample_bound(jsonio.load_family(cfg.family), cfg.tol))
    return 0


def _cmd_search(cfg: RunConfig) -> int:
    print(sample_search(jsonio.load_family(cfg.family), cfg.tol, cfg.cap))
    return 0


def _cmd_build(cfg: RunConfig) -> int:
    fam = jsonio.load_family(cfg.family)
    m = cfg.m if cfg.m is not None else sample_search(fam, cfg.tol, cfg.cap)
    auction = solve_lotteries(fam, m, tol=cfg.tol, cap=cfg.cap)
    jsonio.save_auction(auction, cfg.out)
    print(f"m: {m}")
    print("residuals: " + " ".join(fmt(r) for r in auction.residuals))
    print(f"wrote {cfg.out}")
    return 0


def _cmd_certify(cfg: RunConfig) -> int:
    fam = jsonio.load_family(cfg.family)
    auction = jsonio.load_auction(cfg.auction, fam)
    reports = exact_certify(auction, tol=cfg.tol, cap=cfg.cap)
    if cfg.out:
        jsonio.write_json(jsonio.reports_to_dict(reports), cfg.out)
    ok = True
    for rep in reports:
        verdicts = (rep.dsic_ok, rep.interim_ir_ok, rep.full_surplus_ok)
        ok = ok and all(verdicts)
        print(
            f"{rep.label}: revenue={fmt(rep.revenue)} surplus={fmt(rep.surplus)} "
            f"max|interim|={fmt(rep.max_abs_interim_utility)} "
            f"dsic={rep.dsic_ok} interim_ir={rep.interim_ir_ok} "
            f"full_surplus={rep.full_surplus_ok}"
        )
    if not ok:
        raise CertificationFailed("at least one certification verdict failed")
    return 0


def _cmd_simulate(cfg: RunConfig) -> int:
    fam = jsonio.load_family(cfg.family)
    auction = jsonio.load_auction(cfg.auction, fam)
    result = monte_carlo(auction, cfg.member, cfg.trials, cfg.seed)
    if cfg.out:
        jsonio.write_json(jsonio.simulation_to_dict(result), cfg.out)
    print(
        f"revenue: {fmt(result.mean_revenue)} +- {fmt(result.revenue_stderr)} "
        f"({result.trials} trials, seed {result.seed})"
    )
    for i, (u, s) in enumerate(zip(result.mean_utilities, result.utility_stderr)):
        print(f"bidder {i} utility: {fmt(u)} +- {fmt(s)}")
    return 0


def _cmd_demo_coin(cfg: RunConfig) -> int:
    curve = distinguisher_curve(cfg.h, cfg.eps, cfg.counts, cfg.trials, cfg.seed)
    print("samples  error_rate")
    for m, rate in zip(curve.sample_counts, curve.error_rates):
        print(f"{m:>7}  {fmt(rate)}")
    if cfg.out:
        jsonio.write_json(jsonio.curve_to_dict(curve), cfg.out)
        csv_path = _with_suffix(cfg.out, ".csv")
        csv_path.write_text(jsonio.curve_to_csv(curve))
        from .plotting import save_curve_figure

        fig_path = _with_suffix(cfg.out, ".png")
        save_curve_figure(curve, fig_path)
        print(f"wrote {cfg.out}, {csv_path}, {fig_path}")
    return 0


def _cmd_demo_gap(cfg: RunConfig) -> int:
    reports = [surplus_gap(h, cfg.eps) for h in cfg.h_list]
    print("h       surplus      lookahead    bound        ratio")
    for rep in reports:
        print(
            f"{rep.h:<7} {fmt(rep.full_surplus):<12} "
            f"{fmt(rep.lookahead_revenue):<12} {fmt(rep.revenue_bound):<12} "
            f"{fmt(rep.ratio)}"
        )
    if cfg.out:
        jsonio.write_json(jsonio.gaps_to_dict(reports), cfg.out)
        csv_path = _with_suffix(cfg.out, ".csv")
        csv_path.write_text(jsonio.gaps_to_csv(reports))
        from .plotting import save_gap_figure

        fig_path = _with_suffix(cfg.out, ".png")
        save_gap_figure(reports, fig_path)
        print(f"wrote {cfg.out}, {csv_path}, {fig_path}")
    return 0


def _cmd_demo_lb(cfg: RunConfig) -> int:
    fam = lower_bound_family(
        cfg.k, cfg.r, (cfg.size, cfg.size), seed=cfg.seed, tol=cfg.tol
    )
    k, r = cfg.k, cfg.r
    print(f"k={k} span={span_dimension(fam, cfg.tol)} bound={sample_bound(fam)}")
    for m in (k - r, k - r + 1):
        ranks = []
        for i in range(fam.type_space.n_bidders):
            mat = _stacked_conddist(fam, i, m, cfg.cap)
            full = len(fam.type_space.values[i]) * k
            ranks.append(f"bidder{i}: {rank(mat, cfg.tol)}/{full}")
        print(f"m={m}  " + "  ".join(ranks))
    return 0


_HANDLERS = {
    "check-cm": _cmd_check_cm,
    "span": _cmd_span,
    "bound": _cmd_bound,
    "search": _cmd_search,
    "build": _cmd_build,
    "certify": _cmd_certify,
    "simulate": _cmd_simulate,
    "demo-coin": _cmd_demo_coin,
    "demo-gap": _cmd_demo_gap,
    "demo-lb": _cmd_demo_lb,
}


def dispatch(cfg: RunConfig) -> int:
    return _HANDLERS[cfg.command](cfg)


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        return dispatch(cfg)
    except CmAuctionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
