"""Surplus-extracting auctions for correlated bidders under prior uncertainty.

Given a finite family of candidate joint value distributions and sample
access to whichever one is real, construct a second-price auction with
lottery side payments that extracts the full social surplus under every
candidate simultaneously, certify it exactly, and reproduce the negative
results for naive sample-based identification.
"""

from .distributions import (
    ConditionalVector,
    DistributionFamily,
    JointDistribution,
    TypeSpace,
    check_cm_condition,
    coin_pair,
    conditional,
    equal_revenue,
    lower_bound_family,
    new_joint,
    permutation_family,
    product_joint,
    span_dimension,
)
from .errors import CmAuctionError
from .experiments import (
    DistinguisherCurve,
    GapReport,
    distinguisher_curve,
    naive_distinguish,
    surplus_gap,
)
from .linalg import SolveOutcome, kronecker, kronecker_power, min_norm_solve, rank
from .mechanisms import (
    AuctionOutcome,
    InterimUtilityTable,
    LotterySchedule,
    SampleAuction,
    build_conddist,
    lookahead_outcome,
    lookahead_revenue,
    run_sample_auction,
    sample_bound,
    sample_search,
    second_price,
    solve_lotteries,
    vcg_interim_utilities,
    zero_auction,
)
from .verify import (
    CertificationReport,
    SimulationResult,
    check_dsic,
    check_expost_ir,
    exact_certify,
    monte_carlo,
)

__all__ = [
    "AuctionOutcome",
    "CertificationReport",
    "CmAuctionError",
    "ConditionalVector",
    "DistinguisherCurve",
    "DistributionFamily",
    "GapReport",
    "InterimUtilityTable",
    "JointDistribution",
    "LotterySchedule",
    "SampleAuction",
    "SimulationResult",
    "SolveOutcome",
    "TypeSpace",
    "build_conddist",
    "check_cm_condition",
    "check_dsic",
    "check_expost_ir",
    "coin_pair",
    "conditional",
    "distinguisher_curve",
    "equal_revenue",
    "exact_certify",
    "kronecker",
    "kronecker_power",
    "lookahead_outcome",
    "lookahead_revenue",
    "lower_bound_family",
    "min_norm_solve",
    "monte_carlo",
    "naive_distinguish",
    "new_joint",
    "permutation_family",
    "product_joint",
    "rank",
    "run_sample_auction",
    "sample_bound",
    "sample_search",
    "second_price",
    "solve_lotteries",
    "span_dimension",
    "surplus_gap",
    "vcg_interim_utilities",
    "zero_auction",
]

__version__ = "0.1.0"
