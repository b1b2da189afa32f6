"""Exception hierarchy.

Every error class carries a distinct ``exit_code`` so the CLI can map
failures onto stable process exit statuses (documented in ``--help``).
"""


class CmAuctionError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ParseError(CmAuctionError):
    """Input file does not match the expected JSON schema."""

    exit_code = 2


class NegativeMass(CmAuctionError):
    """A probability vector contains a negative entry."""

    exit_code = 3


class WrongLength(CmAuctionError):
    """A vector does not match the dimension implied by its type space."""

    exit_code = 4


class NotNormalized(CmAuctionError):
    """Probability mass deviates from 1 by more than the input tolerance."""

    exit_code = 5


class ZeroMarginal(CmAuctionError):
    """Conditioning on a value whose marginal probability is zero."""

    exit_code = 6


class HeterogeneousTypeSpaces(CmAuctionError):
    """Operation requires all bidders (or members) to share one value set."""

    exit_code = 7


class BadEps(CmAuctionError):
    """Coin-pair perturbation must lie strictly inside (0, 1)."""

    exit_code = 8


class BadH(CmAuctionError):
    """Equal-revenue truncation point out of range."""

    exit_code = 9


class InfeasibleSizes(CmAuctionError):
    """Requested rank-deficient family cannot exist at the given sizes."""

    exit_code = 10


class DimensionOverflow(CmAuctionError):
    """An operation would materialize more entries than the configured cap."""

    exit_code = 11


class NoSolution(CmAuctionError):
    """The lottery system is inconsistent beyond the residual tolerance."""

    exit_code = 12

    def __init__(self, message, bidder=None, residual=None):
        super().__init__(message)
        self.bidder = bidder
        self.residual = residual


class CmViolation(CmAuctionError):
    """A family member fails the Cremer-McLean condition."""

    exit_code = 13


class ProfileOutOfSupport(CmAuctionError):
    """A value profile lies outside the declared type space or support."""

    exit_code = 14


class UnsupportedBidderCount(CmAuctionError):
    """Operation is only implemented for two bidders."""

    exit_code = 15


class AllZeroLikelihood(CmAuctionError):
    """Every candidate distribution assigns zero likelihood to the samples."""

    exit_code = 16


class CertificationFailed(CmAuctionError):
    """At least one certification verdict is negative (CLI-level error)."""

    exit_code = 17
