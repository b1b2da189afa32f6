"""Exact and Monte-Carlo certification of constructed mechanisms.

Everything that decides a verdict is closed-form enumeration over the
finite support; simulation exists only as a statistical cross-check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import JointDistribution
from .linalg import DEFAULT_CAP, _check_cap, kronecker_power
from .mechanisms import SampleAuction, lookahead_outcome, second_price

CERT_TOL = 1e-8
DSIC_TOL = 1e-9


@dataclass(frozen=True)
class CertificationReport:
    """Exact verdicts for one candidate distribution.

    ``interim_utilities`` maps bidder -> {own value: expected utility};
    values whose marginal probability is zero are omitted (no conditional
    exists there).
    """

    member: int
    label: str
    revenue: float
    surplus: float
    interim_utilities: tuple[dict, ...]
    max_abs_interim_utility: float
    dsic_ok: bool
    interim_ir_ok: bool
    full_surplus_ok: bool


def _sample_tuples(ts, m):
    return itertools.product(ts.profiles(), repeat=m)


def _expected_charges(auction: SampleAuction, member: int) -> list[np.ndarray]:
    """Per bidder: expected lottery charge as a function of the opponents' profile."""
    d = auction.family.members[member]
    weights = kronecker_power(d.probs, auction.m)
    return [
        lot.charges.reshape(-1, weights.size) @ weights
        for lot in auction.lotteries
    ]


def exact_certify(
    auction: SampleAuction, tol: float = CERT_TOL, cap: int = DEFAULT_CAP
) -> list[CertificationReport]:
    """Closed-form revenue, surplus and interim utilities under each member."""
    fam = auction.family
    ts = fam.type_space
    _check_cap(ts.num_profiles ** (auction.m + 1), cap, "certification enumeration")
    dsic = check_dsic(auction, tol=DSIC_TOL, cap=cap)

    sp = [second_price(p) for p in ts.profiles()]
    sp_revenue = np.array([o.payment.sum() for o in sp])
    maxima = np.array([max(p) for p in ts.profiles()])

    reports = []
    for j, d in enumerate(fam):
        echarge = _expected_charges(auction, j)
        lottery_revenue = sum(
            float(d.probs[ts.profile_index(p)] * echarge[i][ts.opponent_index(p, i)])
            for p in ts.profiles()
            for i in range(ts.n_bidders)
        )
        revenue = float(d.probs @ sp_revenue) + lottery_revenue
        surplus = float(d.probs @ maxima)

        interim: list[dict] = []
        worst = 0.0
        for i in range(ts.n_bidders):
            marg = d.marginal(i)
            per_value = {}
            for vi, v in enumerate(ts.values[i]):
                if marg[vi] <= 0.0:
                    continue
                cond = np.take(d.as_array(), vi, axis=i).ravel() / marg[vi]
                u = 0.0
                for oi, opp in enumerate(ts.opponent_profiles(i)):
                    prof = list(opp)
                    prof.insert(i, v)
                    out = sp[ts.profile_index(prof)]
                    u += cond[oi] * (
                        v * out.allocation[i] - out.payment[i] - echarge[i][oi]
                    )
                per_value[v] = u
                worst = max(worst, abs(u))
            interim.append(per_value)

        reports.append(
            CertificationReport(
                member=j,
                label=fam.label(j),
                revenue=revenue,
                surplus=surplus,
                interim_utilities=tuple(interim),
                max_abs_interim_utility=worst,
                dsic_ok=dsic,
                interim_ir_ok=all(
                    u >= -tol for per in interim for u in per.values()
                ),
                full_surplus_ok=abs(revenue - surplus) <= tol,
            )
        )
    return reports


def check_dsic(auction, tol: float = DSIC_TOL, cap: int = DEFAULT_CAP) -> bool:
    """Exhaustive deviation check over profiles, misreports and sample tuples.

    ``auction`` needs ``family``, ``m`` and ``outcome(profile, samples)``;
    any payment rule with that surface can be checked, not just solved
    sample auctions.
    """
    ts = auction.family.type_space
    _check_cap(ts.num_profiles ** (auction.m + 1), cap, "deviation enumeration")
    for samples in _sample_tuples(ts, auction.m):
        for profile in ts.profiles():
            truthful = auction.outcome(profile, samples)
            for i in range(ts.n_bidders):
                v = profile[i]
                u_true = v * truthful.allocation[i] - truthful.payment[i]
                for dev in ts.values[i]:
                    if dev == v:
                        continue
                    lied = list(profile)
                    lied[i] = dev
                    out = auction.outcome(lied, samples)
                    if v * out.allocation[i] - out.payment[i] > u_true + tol:
                        return False
    return True


def check_expost_ir(subject, tol: float = DSIC_TOL, cap: int = DEFAULT_CAP) -> bool:
    """Is truthful utility >= -tol at every realization?

    Accepts a sample auction (checked over profiles x sample tuples) or a
    two-bidder joint distribution, which is checked as the lookahead
    auction over its support.
    """
    if isinstance(subject, JointDistribution):
        ts = subject.type_space
        for profile in ts.profiles():
            if subject.prob(profile) <= 0.0:
                continue
            out = lookahead_outcome(subject, profile)
            if (out.utility(profile) < -tol).any():
                return False
        return True

    ts = subject.family.type_space
    _check_cap(ts.num_profiles ** (subject.m + 1), cap, "ex post IR enumeration")
    for samples in _sample_tuples(ts, subject.m):
        for profile in ts.profiles():
            out = subject.outcome(profile, samples)
            if (out.utility(profile) < -tol).any():
                return False
    return True


@dataclass(frozen=True)
class SimulationResult:
    """Seeded Monte-Carlo estimates with standard errors."""

    trials: int
    seed: int
    mean_revenue: float
    revenue_stderr: float
    mean_utilities: np.ndarray = field(repr=False)
    utility_stderr: np.ndarray = field(repr=False)


def monte_carlo(
    auction: SampleAuction, member: int, trials: int, seed: int
) -> SimulationResult:
    """Simulate the auction under one candidate distribution.

    Profiles and samples are drawn with numpy's seeded PCG64 generator;
    results are bit-reproducible for a fixed (seed, trials) pair.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    fam = auction.family
    ts = fam.type_space
    d = fam.members[member]
    n = ts.n_bidders
    num = ts.num_profiles

    profiles = list(ts.profiles())
    sp = [second_price(p) for p in profiles]
    sp_revenue = np.array([o.payment.sum() for o in sp])
    sp_utility = np.array([o.utility(p) for o, p in zip(sp, profiles)])  # (num, n)
    opp_index = np.array(
        [[ts.opponent_index(p, i) for i in range(n)] for p in profiles]
    )

    rng = np.random.default_rng(seed)
    draws = rng.choice(num, size=(trials, 1 + auction.m), p=d.probs)
    prof = draws[:, 0]
    radix = draws[:, 1:] @ (num ** np.arange(auction.m - 1, -1, -1)) if auction.m else 0

    revenue = sp_revenue[prof].astype(float)
    utilities = sp_utility[prof].astype(float)  # (trials, n)
    for i, lot in enumerate(auction.lotteries):
        idx = opp_index[prof, i] * num**auction.m + radix
        charge = lot.charges[idx]
        revenue += charge
        utilities[:, i] -= charge

    def stderr(x):
        if trials == 1:
            return np.zeros(x.shape[1:]) if x.ndim > 1 else 0.0
        return x.std(axis=0, ddof=1) / math.sqrt(trials)

    return SimulationResult(
        trials=trials,
        seed=seed,
        mean_revenue=float(revenue.mean()),
        revenue_stderr=float(stderr(revenue)),
        mean_utilities=utilities.mean(axis=0),
        utility_stderr=np.asarray(stderr(utilities)),
    )
