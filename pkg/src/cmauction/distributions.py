"""Finite discrete joint value distributions and their named constructions.

A joint distribution over n >= 2 bidders is stored densely as a probability
vector over the full Cartesian product of per-bidder value grids, in
row-major profile order (last bidder varies fastest).  That layout keeps
every Kronecker-product index computation in the mechanism layer a plain
mixed-radix unrank.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadEps,
    BadH,
    HeterogeneousTypeSpaces,
    InfeasibleSizes,
    NegativeMass,
    NotNormalized,
    WrongLength,
    ZeroMarginal,
)
from .linalg import RANK_TOL, rank

INPUT_SUM_TOL = 1e-9
# Below this deviation a vector counts as already normalized and is stored
# untouched, which keeps write/read round trips bitwise stable.
NORMALIZED_EPS = 1e-13


@dataclass(frozen=True)
class TypeSpace:
    """Per-bidder grids of possible values (strictly increasing, >= 0)."""

    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        vals = tuple(tuple(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 2:
            raise ValueError("a type space needs at least two bidders")
        for i, grid in enumerate(vals):
            if not grid:
                raise ValueError(f"bidder {i} has an empty value grid")
            if any(v < 0 for v in grid):
                raise ValueError(f"bidder {i} has a negative value")
            if any(a >= b for a, b in zip(grid, grid[1:])):
                raise ValueError(f"bidder {i} values must be strictly increasing")

    @property
    def n_bidders(self) -> int:
        return len(self.values)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.values)

    @property
    def num_profiles(self) -> int:
        return math.prod(self.sizes)

    def profiles(self):
        """All value profiles in row-major order (last bidder fastest)."""
        return itertools.product(*self.values)

    def value_index(self, bidder: int, value) -> int:
        grid = self.values[bidder]
        try:
            return grid.index(value)
        except ValueError:
            raise KeyError(f"value {value!r} not in bidder {bidder}'s grid") from None

    def profile_index(self, profile) -> int:
        if len(profile) != self.n_bidders:
            raise ValueError("profile length does not match bidder count")
        idx = 0
        for i, v in enumerate(profile):
            idx = idx * len(self.values[i]) + self.value_index(i, v)
        return idx

    def opponent_sizes(self, bidder: int) -> tuple[int, ...]:
        return tuple(s for i, s in enumerate(self.sizes) if i != bidder)

    def opponent_profiles(self, bidder: int):
        """Opponents' profiles in row-major order over the remaining bidders."""
        grids = [g for i, g in enumerate(self.values) if i != bidder]
        return itertools.product(*grids)

    def opponent_index(self, profile, bidder: int) -> int:
        idx = 0
        for i, v in enumerate(profile):
            if i == bidder:
                continue
            idx = idx * len(self.values[i]) + self.value_index(i, v)
        return idx

    def contains(self, profile) -> bool:
        return len(profile) == self.n_bidders and all(
            v in self.values[i] for i, v in enumerate(profile)
        )


@dataclass(frozen=True)
class JointDistribution:
    """Dense probability vector over the profiles of a TypeSpace.

    Construction validates mass (entries >= 0, total within 1e-9 of 1) and
    renormalizes, so downstream code may rely on ``probs.sum() == 1`` to
    float accuracy.
    """

    type_space: TypeSpace
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).ravel()
        if p.size != self.type_space.num_profiles:
            raise WrongLength(
                f"probability vector has length {p.size}, expected "
                f"{self.type_space.num_profiles}"
            )
        if not np.isfinite(p).all():
            raise NegativeMass("probability vector has non-finite entries")
        if (p < 0).any():
            raise NegativeMass("probability vector has a negative entry")
        total = float(p.sum())
        if abs(total - 1.0) > INPUT_SUM_TOL:
            raise NotNormalized(f"probability mass sums to {total!r}, not 1")
        if abs(total - 1.0) > NORMALIZED_EPS:
            p = p / total
        else:
            p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def n_bidders(self) -> int:
        return self.type_space.n_bidders

    def as_array(self) -> np.ndarray:
        """Probabilities reshaped to one axis per bidder."""
        return self.probs.reshape(self.type_space.sizes)

    def prob(self, profile) -> float:
        return float(self.probs[self.type_space.profile_index(profile)])

    def marginal(self, bidder: int) -> np.ndarray:
        axes = tuple(i for i in range(self.n_bidders) if i != bidder)
        return self.as_array().sum(axis=axes)

    def expected_max(self) -> float:
        """E[max_i v_i]: the full social surplus of an efficient sale."""
        maxima = np.array([max(p) for p in self.type_space.profiles()])
        return float(self.probs @ maxima)


@dataclass(frozen=True)
class ConditionalVector:
    """Distribution over opponents' profiles given one bidder's value."""

    bidder: int
    value: float
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True)
class DistributionFamily:
    """Ordered list of candidate distributions on a common type space."""

    members: tuple[JointDistribution, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ValueError("a family needs at least one member")
        ts = members[0].type_space
        if any(d.type_space != ts for d in members[1:]):
            raise HeterogeneousTypeSpaces("family members must share one type space")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(members):
                raise ValueError("label count does not match member count")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def type_space(self) -> TypeSpace:
        return self.members[0].type_space

    def label(self, j: int) -> str:
        if self.labels is not None:
            return self.labels[j]
        return f"member{j}"


def new_joint(type_space: TypeSpace, probs) -> JointDistribution:
    """Validate and normalize a dense probability vector."""
    return JointDistribution(type_space, np.asarray(probs, dtype=float))


def conditional(d: JointDistribution, bidder: int, value) -> ConditionalVector:
    """Distribution of opponents' profiles given ``bidder`` has ``value``."""
    vi = d.type_space.value_index(bidder, value)
    slab = np.take(d.as_array(), vi, axis=bidder).ravel()
    mass = float(slab.sum())
    if mass <= 0.0:
        raise ZeroMarginal(
            f"bidder {bidder} has zero marginal probability at value {value!r}"
        )
    return ConditionalVector(bidder=bidder, value=value, probs=slab / mass)


def equal_revenue(h: int) -> np.ndarray:
    """Marginal over {1..h} with tail probability P(v >= k) = 1/k.

    Masses are built as 1/k - 1/(k+1) in floating point; the subtraction is
    exact (Sterbenz) so reverse-cumulative sums reproduce every tail 1/k
    exactly, including a total mass of exactly 1.
    """
    if h < 1:
        raise BadH(f"equal-revenue truncation must be >= 1, got {h}")
    inv = 1.0 / np.arange(1, h + 2)
    mass = inv[:-1] - inv[1:]
    mass[-1] = inv[-2]  # top value absorbs the 1/h tail
    return mass


def product_joint(type_space: TypeSpace, marginals) -> JointDistribution:
    """Independent joint distribution from per-bidder marginals."""
    marginals = [np.asarray(m, dtype=float) for m in marginals]
    if len(marginals) != type_space.n_bidders:
        raise WrongLength("need exactly one marginal per bidder")
    for i, m in enumerate(marginals):
        if m.size != len(type_space.values[i]):
            raise WrongLength(f"marginal {i} does not match bidder {i}'s grid")
    probs = np.ones(1)
    for m in marginals:
        probs = np.kron(probs, m)
    return JointDistribution(type_space, probs)


def coin_pair(h: int, eps: float) -> tuple[JointDistribution, JointDistribution]:
    """Two-bidder pair (D_A, D_B) that differs only in which bidder tends high.

    Both start from independent equal-revenue values; with probability eps
    the higher draw goes to bidder 1 (D_A) or to bidder 2 (D_B).  Two
    equivalent constructions are evaluated and cross-checked: the matrix
    form A + eps (B^T - B), and the piecewise (1 +/- eps) scaling of the
    independent product off the diagonal.
    """
    if h < 2:
        raise BadH(f"coin pair needs h >= 2, got {h}")
    if not 0.0 < eps < 1.0:
        raise BadEps(f"eps must lie in (0, 1), got {eps!r}")
    er = equal_revenue(h)
    a = np.outer(er, er)
    b = np.triu(a, k=1) + np.diag(np.diag(a) / 2.0)
    d_a = a + eps * (b.T - b)
    d_b = a + eps * (b - b.T)

    # Piecewise route: rows index bidder 1, so v1 > v2 is below the diagonal.
    sign = np.sign(np.subtract.outer(np.arange(h), np.arange(h)))
    alt = a * (1.0 + eps * sign)
    if max(np.abs(d_a - alt).max(), np.abs(d_b - alt.T).max()) > 1e-15:
        raise AssertionError("coin-pair construction routes disagree")

    ts = TypeSpace((tuple(range(1, h + 1)),) * 2)
    return JointDistribution(ts, d_a.ravel()), JointDistribution(ts, d_b.ravel())


def _permuted(d: JointDistribution, perm: tuple[int, ...]) -> JointDistribution:
    # new(v) = d(v o perm): realized as an axis transpose of the dense tensor.
    arr = d.as_array().transpose(perm)
    return JointDistribution(d.type_space, arr.ravel())


def permutation_family(d: JointDistribution) -> DistributionFamily:
    """All distinct bidder-relabelings of one distribution (k <= n!)."""
    grids = set(d.type_space.values)
    if len(grids) != 1:
        raise HeterogeneousTypeSpaces(
            "coordinate permutations need all bidders on one value grid"
        )
    members: list[JointDistribution] = []
    for perm in itertools.permutations(range(d.n_bidders)):
        cand = _permuted(d, perm)
        if not any(np.array_equal(cand.probs, m.probs) for m in members):
            members.append(cand)
    return DistributionFamily(tuple(members))


def _conditional_matrix(d: JointDistribution, bidder: int) -> np.ndarray:
    rows = [conditional(d, bidder, v).probs for v in d.type_space.values[bidder]]
    return np.vstack(rows)


def check_cm_condition(d: JointDistribution, tol: float = RANK_TOL) -> tuple[bool, ...]:
    """Per bidder: are her conditional vectors linearly independent?"""
    verdicts = []
    for i in range(d.n_bidders):
        mat = _conditional_matrix(d, i)
        verdicts.append(rank(mat, tol) == mat.shape[0])
    return tuple(verdicts)


def span_dimension(fam: DistributionFamily, tol: float = RANK_TOL) -> int:
    """Dimension of the linear space spanned by the members' probability vectors."""
    return rank(np.vstack([d.probs for d in fam]), tol)


def lower_bound_family(
    k: int,
    r: int,
    t: tuple[int, int] = (3, 3),
    seed: int = 0,
    tol: float = RANK_TOL,
) -> DistributionFamily:
    """Family of k distributions spanning exactly r dimensions that needs the
    worst-case sample count.

    Members r+1..k are convex combinations lambda_j D1 + (1-lambda_j) D2
    with lambda_j = j/(k-r+1), and every member shares bidder 1's
    conditional at her lowest value, which pins the stacked
    conditional-times-samples vectors inside a space too small for
    independence at any m <= k-r.  All required properties (CM condition
    per member, exact span r, shared conditional) are re-verified before
    the family is returned.
    """
    if not 2 <= r < k:
        raise InfeasibleSizes(f"need 2 <= r < k, got r={r}, k={k}")
    if len(t) != 2:
        raise InfeasibleSizes("construction is two-bidder only")
    if t[0] != t[1]:
        # CM for both bidders forces a square, nonsingular joint matrix.
        raise InfeasibleSizes(f"two-bidder CM families need square supports, got {t}")
    size = int(t[0])
    if size < max(r, 2) + 1:
        raise InfeasibleSizes(f"need t_i >= {max(r, 2) + 1} for r={r}, got {size}")

    rng = np.random.default_rng(seed)
    uniform = 1.0 / size
    delta = 0.1 * uniform  # perturbation is 10% of uniform mass
    shared_row = uniform + delta * rng.uniform(0.0, 1.0, size)

    ts = TypeSpace((tuple(range(1, size + 1)),) * 2)
    members: list[JointDistribution] = []
    for j in range(r):
        # Perturbed-identity rows: a signed bump pair whose position cycles
        # with the member index keeps both the per-member conditionals and
        # the members themselves well separated; the jitter only varies the
        # construction across seeds.
        mat = np.empty((size, size))
        mat[0] = shared_row
        for i in range(1, size):
            row = np.full(size, uniform)
            row[(i + j) % size] += delta
            row[(i + j + 1) % size] -= delta
            mat[i] = row + (delta / 4.0) * rng.uniform(0.0, 1.0, size)
        members.append(JointDistribution(ts, mat.ravel() / mat.sum()))
    for j in range(1, k - r + 1):
        lam = j / (k - r + 1)
        probs = lam * members[0].probs + (1.0 - lam) * members[1].probs
        members.append(JointDistribution(ts, probs))

    fam = DistributionFamily(tuple(members))
    base = conditional(members[0], 0, ts.values[0][0]).probs
    for j, d in enumerate(fam):
        if not all(check_cm_condition(d, tol)):
            raise InfeasibleSizes(
                f"member {j} fails the CM condition (seed {seed}, sizes {t})"
            )
        dev = np.abs(conditional(d, 0, ts.values[0][0]).probs - base).max()
        if dev > 1e-12:
            raise InfeasibleSizes(f"shared conditional deviates by {dev:g}")
    if span_dimension(fam, tol) != r:
        raise InfeasibleSizes(
            f"constructed family spans {span_dimension(fam, tol)} dims, wanted {r}"
        )
    return fam
