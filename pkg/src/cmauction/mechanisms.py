"""Auction constructions.

The core object is the sample-augmented surplus-extraction auction: a second
price auction followed by per-bidder lottery charges that depend on the
opponents' bids and on m independently drawn value profiles, never on the
bidder's own bid.  Charges are solved from the linear system that equates
each bidder's expected lottery payment with her expected second-price
utility, simultaneously under every candidate distribution.

Also here: the two-bidder lookahead auction, used as the revenue benchmark
in the negative results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import DistributionFamily, JointDistribution, conditional
from .errors import (
    CmViolation,
    NoSolution,
    ProfileOutOfSupport,
    UnsupportedBidderCount,
)
from .linalg import (
    DEFAULT_CAP,
    RANK_TOL,
    RESIDUAL_TOL,
    _check_cap,
    kronecker,
    kronecker_power,
    min_norm_solve,
    rank,
)


@dataclass(frozen=True)
class AuctionOutcome:
    """Per-bidder allocation probabilities and payments (negative = paid out)."""

    allocation: np.ndarray
    payment: np.ndarray

    def utility(self, values) -> np.ndarray:
        return np.asarray(values, dtype=float) * self.allocation - self.payment


def second_price(profile) -> AuctionOutcome:
    """Second price auction; ties go to the lowest-index bidder."""
    vals = np.asarray(profile, dtype=float)
    if vals.size < 2:
        raise UnsupportedBidderCount("an auction needs at least two bidders")
    winner = int(np.argmax(vals))
    allocation = np.zeros(vals.size)
    payment = np.zeros(vals.size)
    allocation[winner] = 1.0
    payment[winner] = np.delete(vals, winner).max()
    return AuctionOutcome(allocation=allocation, payment=payment)


@dataclass(frozen=True)
class InterimUtilityTable:
    """Expected second-price utility per own value and candidate distribution."""

    bidder: int
    values: tuple[float, ...]
    utilities: np.ndarray = field(repr=False)  # shape (|T_i|, k)


def _second_price_utility(bidder: int, value, opponents) -> float:
    profile = list(opponents)
    profile.insert(bidder, value)
    out = second_price(profile)
    return float(value * out.allocation[bidder] - out.payment[bidder])


def vcg_interim_utilities(fam: DistributionFamily, bidder: int) -> InterimUtilityTable:
    """Exact enumeration of E[second-price utility | own value], per member."""
    ts = fam.type_space
    grid = ts.values[bidder]
    util = np.array(
        [
            _second_price_utility(bidder, v, opp)
            for v in grid
            for opp in ts.opponent_profiles(bidder)
        ]
    ).reshape(len(grid), -1)
    table = np.empty((len(grid), len(fam)))
    for j, d in enumerate(fam):
        for vi, v in enumerate(grid):
            table[vi, j] = float(conditional(d, bidder, v).probs @ util[vi])
    return InterimUtilityTable(bidder=bidder, values=grid, utilities=table)


def build_conddist(
    fam: DistributionFamily,
    bidder: int,
    value,
    member: int,
    m: int,
    cap: int = DEFAULT_CAP,
) -> np.ndarray:
    """Joint distribution of (opponents' profile, m sample profiles) given
    the bidder's own value, under one candidate distribution.

    Samples are independent draws of full profiles, so the vector is the
    Kronecker product of the conditional with the m-th Kronecker power of
    the member's probability vector; indices run row-major with the
    opponents' profile slowest and the last sample fastest.
    """
    d = fam.members[member]
    cond = conditional(d, bidder, value).probs
    _check_cap(cond.size * d.probs.size**m, cap, "conditional-sample vector")
    return kronecker(cond, kronecker_power(d.probs, m, cap=cap), cap=cap)


def _require_cm(fam: DistributionFamily, tol: float) -> None:
    from .distributions import check_cm_condition

    for j, d in enumerate(fam):
        verdict = check_cm_condition(d, tol)
        if not all(verdict):
            bad = [i for i, ok in enumerate(verdict) if not ok]
            raise CmViolation(
                f"family member {j} violates the CM condition for bidder(s) {bad}"
            )


def _stacked_conddist(
    fam: DistributionFamily, bidder: int, m: int, cap: int
) -> np.ndarray:
    """Rows (v, j), v slowest: the vectors whose independence enables solving."""
    ts = fam.type_space
    rows = [
        build_conddist(fam, bidder, v, j, m, cap=cap)
        for v in ts.values[bidder]
        for j in range(len(fam))
    ]
    return np.vstack(rows)


def sample_bound(fam: DistributionFamily, tol: float = RANK_TOL) -> int:
    """Worst-case sufficient sample count: k - span_dimension + 1."""
    from .distributions import span_dimension

    return len(fam) - span_dimension(fam, tol) + 1


def sample_search(
    fam: DistributionFamily, tol: float = RANK_TOL, cap: int = DEFAULT_CAP
) -> int:
    """Smallest m at which the stacked vectors reach full rank for every bidder.

    The worst-case bound is tight but not instance-tight (a single
    CM-satisfying member needs m=0 while the bound says 1), so this searches
    upward from zero.
    """
    _require_cm(fam, tol)
    ts = fam.type_space
    k = len(fam)
    for m in range(sample_bound(fam, tol) + 1):
        full = all(
            rank(_stacked_conddist(fam, i, m, cap), tol) == len(ts.values[i]) * k
            for i in range(ts.n_bidders)
        )
        if full:
            return m
    raise NoSolution(
        "no sample count up to the worst-case bound achieves full rank; "
        "the family is numerically degenerate at the given tolerance"
    )


@dataclass(frozen=True)
class LotterySchedule:
    """Charges for one bidder, indexed by (opponents' profile, samples).

    The flat index is opponents-profile-major: entry
    ``opp_index * |T|^m + sum_t profile_index(s_t) * |T|^(m-1-t)``.
    """

    bidder: int
    m: int
    charges: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.charges, dtype=float)
        c.flags.writeable = False
        object.__setattr__(self, "charges", c)


@dataclass(frozen=True)
class SampleAuction:
    """Second-price core plus solved lottery schedules for m samples."""

    family: DistributionFamily
    m: int
    lotteries: tuple[LotterySchedule, ...]
    residuals: tuple[float, ...]

    def __post_init__(self):
        if any(lot.m != self.m for lot in self.lotteries):
            raise ValueError("all lottery schedules must share the auction's m")

    def charge_index(self, profile, samples, bidder: int) -> int:
        ts = self.family.type_space
        idx = ts.opponent_index(profile, bidder)
        for s in samples:
            idx = idx * ts.num_profiles + ts.profile_index(s)
        return idx

    def outcome(self, profile, samples) -> AuctionOutcome:
        return run_sample_auction(self, profile, samples)


def solve_lotteries(
    fam: DistributionFamily,
    m: int,
    tol: float = RESIDUAL_TOL,
    cap: int = DEFAULT_CAP,
) -> SampleAuction:
    """Solve every bidder's lottery system at sample count m.

    For bidder i the equations say: conditional on each own value and under
    each candidate distribution, the expected lottery charge equals the
    expected second-price utility.  The minimum-norm solution is the
    canonical representative of the (generally underdetermined) solution
    set; an irreducible residual means m is below the needed count.
    """
    _require_cm(fam, RANK_TOL)
    ts = fam.type_space
    lotteries = []
    residuals = []
    for i in range(ts.n_bidders):
        system = _stacked_conddist(fam, i, m, cap)
        gamma = vcg_interim_utilities(fam, i).utilities.ravel()  # (v, j), v slow
        outcome = min_norm_solve(system, gamma, tol=tol)
        if not outcome.ok:
            raise NoSolution(
                f"lottery system for bidder {i} at m={m} is inconsistent "
                f"(residual {outcome.residual:.6g}); more samples are needed",
                bidder=i,
                residual=outcome.residual,
            )
        lotteries.append(LotterySchedule(bidder=i, m=m, charges=outcome.solution))
        residuals.append(outcome.residual)
    return SampleAuction(
        family=fam, m=m, lotteries=tuple(lotteries), residuals=tuple(residuals)
    )


def zero_auction(fam: DistributionFamily, m: int = 0) -> SampleAuction:
    """Pure second price dressed as a sample auction (all charges zero)."""
    ts = fam.type_space
    lotteries = tuple(
        LotterySchedule(
            bidder=i,
            m=m,
            charges=np.zeros(
                math.prod(ts.opponent_sizes(i)) * ts.num_profiles**m
            ),
        )
        for i in range(ts.n_bidders)
    )
    return SampleAuction(
        family=fam, m=m, lotteries=lotteries, residuals=(0.0,) * ts.n_bidders
    )


def run_sample_auction(
    auction: SampleAuction, profile, samples=()
) -> AuctionOutcome:
    """Second price outcome plus each bidder's lottery charge."""
    ts = auction.family.type_space
    if len(samples) != auction.m:
        raise ValueError(f"expected {auction.m} samples, got {len(samples)}")
    if not ts.contains(profile):
        raise ProfileOutOfSupport(f"profile {profile!r} outside the type space")
    for s in samples:
        if not ts.contains(s):
            raise ProfileOutOfSupport(f"sample {s!r} outside the type space")
    base = second_price(profile)
    payment = base.payment.copy()
    for i, lot in enumerate(auction.lotteries):
        payment[i] += lot.charges[auction.charge_index(profile, samples, i)]
    return AuctionOutcome(allocation=base.allocation, payment=payment)


# ---------------------------------------------------------------------------
# Two-bidder lookahead auction
# ---------------------------------------------------------------------------

PRICE_TIE_REL_TOL = 1e-12


def _posted_price(prices: np.ndarray, masses: np.ndarray, floor: float):
    """Revenue-optimal posted price over grid values >= floor.

    Returns (price, expected mass at or above it).  Ties in expected revenue
    are broken toward the lowest price, with a relative slack absorbing
    float dust (equal-revenue grids tie at every price in exact
    arithmetic).
    """
    sel = prices >= floor
    cand = prices[sel]
    if cand.size == 0:
        return None, 0.0
    tails = np.cumsum(masses[sel][::-1])[::-1]
    revenue = cand * tails
    best = revenue.max()
    at = int(np.argmax(revenue >= best - PRICE_TIE_REL_TOL * max(1.0, abs(best))))
    return float(cand[at]), float(tails[at])


def lookahead_outcome(d: JointDistribution, profile) -> AuctionOutcome:
    """Post the conditionally optimal price to the higher bidder (tie: bidder 1).

    The price maximizes p * P(v >= p | other's value, own value >= other's);
    the lower bidder never wins.
    """
    ts = d.type_space
    if ts.n_bidders != 2:
        raise UnsupportedBidderCount("lookahead is implemented for two bidders")
    if not ts.contains(profile):
        raise ProfileOutOfSupport(f"profile {profile!r} outside the type space")
    v1, v2 = profile
    target = 0 if v1 >= v2 else 1
    floor = profile[1 - target]
    mat = d.as_array()
    masses = mat[:, ts.value_index(1, v2)] if target == 0 else mat[ts.value_index(0, v1), :]
    prices = np.asarray(ts.values[target], dtype=float)
    if masses[prices >= floor].sum() <= 0.0:
        raise ProfileOutOfSupport(
            f"profile {profile!r} has zero mass under the conditioning event"
        )
    price, _ = _posted_price(prices, masses, floor)
    allocation = np.zeros(2)
    payment = np.zeros(2)
    if profile[target] >= price:
        allocation[target] = 1.0
        payment[target] = price
    return AuctionOutcome(allocation=allocation, payment=payment)


def lookahead_revenue(d: JointDistribution) -> float:
    """Expected lookahead revenue via per-row/per-column price vectors.

    Bidder 1 is priced against each value w of bidder 2 (she is the target
    whenever v1 >= w); bidder 2 is priced against each value w of bidder 1,
    but collects only on profiles with v2 > w since ties belong to bidder 1
    -- hence the diagonal-cell correction when her optimal price sits at w.
    """
    ts = d.type_space
    if ts.n_bidders != 2:
        raise UnsupportedBidderCount("lookahead is implemented for two bidders")
    mat = d.as_array()
    grid1 = np.asarray(ts.values[0], dtype=float)
    grid2 = np.asarray(ts.values[1], dtype=float)

    total = 0.0
    for wi, w in enumerate(ts.values[1]):  # price bidder 1, column by column
        price, tail = _posted_price(grid1, mat[:, wi], w)
        if price is not None:
            total += price * tail
    for wi, w in enumerate(ts.values[0]):  # price bidder 2, row by row
        price, tail = _posted_price(grid2, mat[wi, :], w)
        if price is None:
            continue
        if price == w:
            tail -= float(mat[wi, ts.value_index(1, w)]) if w in ts.values[1] else 0.0
        total += price * tail
    return total
