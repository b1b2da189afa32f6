"""Stable JSON interchange formats.

All files carry ``"format": 1``.  Probability vectors are row-major over
the profile grid with the last bidder varying fastest, and they round-trip
bitwise: json serializes floats via repr, which Python parses back to the
identical double.

distribution: ``{"format": 1, "type_spaces": [[v, ...], ...], "probs": [p, ...]}``
family:       ``{"format": 1, "members": [<distribution>, ...], "labels": [...]}``
auction:      ``{"format": 1, "m": int, "residuals": [...],
                 "lotteries": [{"bidder": i, "charges": [...]}, ...]}``
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .distributions import DistributionFamily, JointDistribution, TypeSpace
from .errors import ParseError
from .experiments import DistinguisherCurve, GapReport
from .mechanisms import LotterySchedule, SampleAuction
from .verify import CertificationReport, SimulationResult

FORMAT_VERSION = 1


def _check_format(obj, what: str) -> None:
    if not isinstance(obj, dict):
        raise ParseError(f"{what}: expected a JSON object")
    version = obj.get("format", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ParseError(f"{what}: unsupported format version {version!r}")


def write_json(obj, path) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text)


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from exc


def distribution_to_dict(d: JointDistribution) -> dict:
    return {
        "format": FORMAT_VERSION,
        "type_spaces": [list(grid) for grid in d.type_space.values],
        "probs": [float(p) for p in d.probs],
    }


def distribution_from_dict(obj) -> JointDistribution:
    _check_format(obj, "distribution")
    try:
        grids = obj["type_spaces"]
        probs = obj["probs"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"distribution: missing field {exc}") from exc
    if not isinstance(grids, list) or not isinstance(probs, list):
        raise ParseError("distribution: type_spaces and probs must be arrays")
    try:
        ts = TypeSpace(tuple(tuple(g) for g in grids))
    except (ValueError, TypeError) as exc:
        raise ParseError(f"distribution: bad type_spaces ({exc})") from exc
    return JointDistribution(ts, np.asarray(probs, dtype=float))


def family_to_dict(fam: DistributionFamily) -> dict:
    return {
        "format": FORMAT_VERSION,
        "members": [distribution_to_dict(d) for d in fam],
        "labels": [fam.label(j) for j in range(len(fam))],
    }


def family_from_dict(obj) -> DistributionFamily:
    _check_format(obj, "family")
    members = obj.get("members")
    if not isinstance(members, list) or not members:
        raise ParseError("family: members must be a non-empty array")
    dists = tuple(distribution_from_dict(m) for m in members)
    labels = obj.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != len(dists):
            raise ParseError("family: labels must match members in length")
        labels = tuple(str(x) for x in labels)
    return DistributionFamily(dists, labels=labels)


def save_distribution(d: JointDistribution, path) -> None:
    write_json(distribution_to_dict(d), path)


def load_distribution(path) -> JointDistribution:
    return distribution_from_dict(read_json(path))


def save_family(fam: DistributionFamily, path) -> None:
    write_json(family_to_dict(fam), path)


def load_family(path) -> DistributionFamily:
    return family_from_dict(read_json(path))


def auction_to_dict(auction: SampleAuction) -> dict:
    return {
        "format": FORMAT_VERSION,
        "m": auction.m,
        "residuals": [float(r) for r in auction.residuals],
        "lotteries": [
            {"bidder": lot.bidder, "charges": [float(c) for c in lot.charges]}
            for lot in auction.lotteries
        ],
    }


def auction_from_dict(obj, family: DistributionFamily) -> SampleAuction:
    _check_format(obj, "auction")
    try:
        m = int(obj["m"])
        residuals = tuple(float(r) for r in obj["residuals"])
        lotteries = obj["lotteries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"auction: malformed field ({exc})") from exc
    ts = family.type_space
    if len(lotteries) != ts.n_bidders:
        raise ParseError(
            f"auction: {len(lotteries)} lotteries for {ts.n_bidders} bidders"
        )
    schedules = []
    for want, entry in enumerate(sorted(lotteries, key=lambda e: e.get("bidder", -1))):
        try:
            bidder = int(entry["bidder"])
            charges = np.asarray(entry["charges"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"auction: malformed lottery entry ({exc})") from exc
        if bidder != want:
            raise ParseError(f"auction: lottery bidder indices must be 0..{ts.n_bidders - 1}")
        expected = ts.num_profiles // ts.sizes[bidder] * ts.num_profiles**m
        if charges.size != expected:
            raise ParseError(
                f"auction: bidder {bidder} has {charges.size} charges, "
                f"expected {expected}"
            )
        schedules.append(LotterySchedule(bidder=bidder, m=m, charges=charges))
    return SampleAuction(
        family=family, m=m, lotteries=tuple(schedules), residuals=residuals
    )


def save_auction(auction: SampleAuction, path) -> None:
    write_json(auction_to_dict(auction), path)


def load_auction(path, family: DistributionFamily) -> SampleAuction:
    return auction_from_dict(read_json(path), family)


def report_to_dict(report: CertificationReport) -> dict:
    return {
        "member": report.member,
        "label": report.label,
        "revenue": report.revenue,
        "surplus": report.surplus,
        "interim_utilities": [
            [[value, utility] for value, utility in sorted(per.items())]
            for per in report.interim_utilities
        ],
        "max_abs_interim_utility": report.max_abs_interim_utility,
        "dsic_ok": report.dsic_ok,
        "interim_ir_ok": report.interim_ir_ok,
        "full_surplus_ok": report.full_surplus_ok,
    }


def reports_to_dict(reports) -> dict:
    return {
        "format": FORMAT_VERSION,
        "reports": [report_to_dict(r) for r in reports],
        "all_ok": all(
            r.dsic_ok and r.interim_ir_ok and r.full_surplus_ok for r in reports
        ),
    }


def simulation_to_dict(result: SimulationResult) -> dict:
    return {
        "format": FORMAT_VERSION,
        "trials": result.trials,
        "seed": result.seed,
        "mean_revenue": result.mean_revenue,
        "revenue_stderr": result.revenue_stderr,
        "mean_utilities": [float(u) for u in result.mean_utilities],
        "utility_stderr": [float(s) for s in result.utility_stderr],
    }


def curve_to_dict(curve: DistinguisherCurve) -> dict:
    return {
        "format": FORMAT_VERSION,
        "h": curve.h,
        "eps": curve.eps,
        "sample_counts": list(curve.sample_counts),
        "error_rates": list(curve.error_rates),
        "trials": curve.trials,
        "seed": curve.seed,
    }


def curve_to_csv(curve: DistinguisherCurve) -> str:
    lines = ["samples,error_rate"]
    for m, rate in zip(curve.sample_counts, curve.error_rates):
        lines.append(f"{m},{rate!r}")
    return "\n".join(lines) + "\n"


def gap_to_dict(report: GapReport) -> dict:
    return {
        "h": report.h,
        "eps": report.eps,
        "full_surplus": report.full_surplus,
        "lookahead_revenue": report.lookahead_revenue,
        "revenue_bound": report.revenue_bound,
        "ratio": report.ratio,
    }


def gaps_to_dict(reports) -> dict:
    return {"format": FORMAT_VERSION, "gaps": [gap_to_dict(r) for r in reports]}


def gaps_to_csv(reports) -> str:
    lines = ["h,eps,full_surplus,lookahead_revenue,revenue_bound,ratio"]
    for r in reports:
        lines.append(
            f"{r.h},{r.eps!r},{r.full_surplus!r},{r.lookahead_revenue!r},"
            f"{r.revenue_bound!r},{r.ratio!r}"
        )
    return "\n".join(lines) + "\n"
