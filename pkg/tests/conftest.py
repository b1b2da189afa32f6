"""Shared fixtures and random-instance generators."""
import pytest

from cmauction.distributions import (
    DistributionFamily,
    JointDistribution,
    TypeSpace,
    check_cm_condition,
    coin_pair,
    equal_revenue,
    product_joint,
)


def random_joint(rng, sizes=(3, 3), low=0.2, high=1.0) -> JointDistribution:
    """Positive random joint distribution; satisfies CM almost surely."""
    ts = TypeSpace(tuple(tuple(range(1, s + 1)) for s in sizes))
    raw = rng.uniform(low, high, ts.num_profiles)
    return JointDistribution(ts, raw / raw.sum())


def random_cm_joint(rng, sizes=(3, 3)) -> JointDistribution:
    """Random joint distribution verified to satisfy the CM condition."""
    for _ in range(50):
        d = random_joint(rng, sizes)
        if all(check_cm_condition(d)):
            return d
    raise RuntimeError("could not draw a CM-satisfying distribution")


def random_cm_family(rng, k, sizes=(3, 3), dependent=False) -> DistributionFamily:
    """k CM members; with ``dependent`` the last is a convex combination.

    A dependent member needs two bases, so ``dependent`` requires k >= 3.
    """
    dependent = dependent and k >= 3
    members = [random_cm_joint(rng, sizes) for _ in range(k - 1 if dependent else k)]
    if dependent:
        lam = rng.uniform(0.2, 0.8)
        probs = lam * members[0].probs + (1 - lam) * members[1].probs
        members.append(JointDistribution(members[0].type_space, probs))
    return DistributionFamily(tuple(members))


@pytest.fixture
def coin_family():
    d_a, d_b = coin_pair(2, 0.1)
    return DistributionFamily((d_a, d_b), labels=("D_A", "D_B"))


@pytest.fixture
def er2_product():
    er = equal_revenue(2)
    ts = TypeSpace(((1, 2), (1, 2)))
    return product_joint(ts, [er, er])
