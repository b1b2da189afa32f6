"""Joint distributions, conditionals, named constructions, CM condition."""
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmauction.distributions import (
    DistributionFamily,
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
from cmauction.errors import (
    BadEps,
    BadH,
    HeterogeneousTypeSpaces,
    InfeasibleSizes,
    NegativeMass,
    NotNormalized,
    WrongLength,
    ZeroMarginal,
)
from conftest import random_joint

TS22 = TypeSpace(((1, 2), (1, 2)))


def coin_matrix_piecewise(h, eps):
    """Independent oracle for coin_pair: direct (1 +/- eps) tilting."""
    er = equal_revenue(h)
    a = np.outer(er, er)
    out = a.copy()
    for i in range(h):
        for j in range(h):
            if i > j:
                out[i, j] = a[i, j] * (1 + eps)
            elif i < j:
                out[i, j] = a[i, j] * (1 - eps)
    return out


# --- validation -----------------------------------------------------------


def test_new_joint_uniform():
    d = new_joint(TS22, [0.25, 0.25, 0.25, 0.25])
    np.testing.assert_array_equal(d.probs, [0.25] * 4)


def test_new_joint_negative_mass():
    with pytest.raises(NegativeMass):
        new_joint(TS22, [0.5, 0.5, 0.5, -0.5])


def test_new_joint_not_normalized():
    with pytest.raises(NotNormalized):
        new_joint(TS22, [0.4, 0.3, 0.1, 0.1])


def test_new_joint_wrong_length():
    with pytest.raises(WrongLength):
        new_joint(TS22, [0.5, 0.5])


def test_new_joint_renormalizes_small_noise():
    noisy = np.array([0.25, 0.25, 0.25, 0.25]) * (1 + 4e-10)
    d = new_joint(TS22, noisy)
    assert abs(d.probs.sum() - 1.0) < 1e-12


def test_type_space_validation():
    with pytest.raises(ValueError):
        TypeSpace(((1, 2),))  # one bidder
    with pytest.raises(ValueError):
        TypeSpace(((2, 1), (1, 2)))  # not increasing
    with pytest.raises(ValueError):
        TypeSpace(((-1, 2), (1, 2)))  # negative


def test_probs_are_immutable():
    d = new_joint(TS22, [0.25] * 4)
    with pytest.raises(ValueError):
        d.probs[0] = 0.3


# --- conditionals ---------------------------------------------------------


def test_conditional_of_product_is_marginal():
    rng = np.random.default_rng(5)
    marginals = [rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(4))]
    ts = TypeSpace((tuple(range(1, 4)), tuple(range(1, 5))))
    d = product_joint(ts, marginals)
    for bidder, other in ((0, 1), (1, 0)):
        conds = [conditional(d, bidder, v).probs for v in ts.values[bidder]]
        for c in conds:
            np.testing.assert_allclose(c, marginals[other], atol=1e-15)
        spread = np.ptp(np.vstack(conds), axis=0).max()
        assert spread <= 1e-15


def test_conditional_coin_rows():
    eps = 0.37
    d_a, _ = coin_pair(2, eps)
    np.testing.assert_allclose(
        conditional(d_a, 0, 1).probs,
        [1 / (2 - eps), (1 - eps) / (2 - eps)],
        atol=1e-15,
    )
    np.testing.assert_allclose(
        conditional(d_a, 0, 2).probs,
        [(1 + eps) / (2 + eps), 1 / (2 + eps)],
        atol=1e-15,
    )


def test_conditional_matches_matrix_rows():
    # Normalized rows of the piecewise-built matrix are the oracle.
    eps, h = 0.2, 4
    d_a, _ = coin_pair(h, eps)
    mat = coin_matrix_piecewise(h, eps)
    for vi in range(h):
        row = mat[vi] / mat[vi].sum()
        np.testing.assert_allclose(
            conditional(d_a, 0, vi + 1).probs, row, atol=1e-14
        )


def test_conditional_zero_marginal():
    d = new_joint(TS22, [0.5, 0.5, 0.0, 0.0])  # bidder 1 never has value 2
    with pytest.raises(ZeroMarginal):
        conditional(d, 0, 2)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**31 - 1),
    st.integers(min_value=2, max_value=4),
    st.integers(min_value=2, max_value=4),
)
def test_conditional_sums_to_one(seed, s1, s2):
    d = random_joint(np.random.default_rng(seed), (s1, s2), low=0.05)
    for bidder in range(2):
        for v in d.type_space.values[bidder]:
            assert abs(conditional(d, bidder, v).probs.sum() - 1.0) <= 1e-12


# --- equal revenue --------------------------------------------------------


def test_equal_revenue_degenerate():
    np.testing.assert_array_equal(equal_revenue(1), [1.0])


def test_equal_revenue_small_cases():
    np.testing.assert_allclose(equal_revenue(2), [0.5, 0.5], rtol=0, atol=0)
    np.testing.assert_allclose(
        equal_revenue(3), [0.5, 1 / 6, 1 / 3], rtol=1e-15, atol=0
    )


@pytest.mark.parametrize("h", [1, 2, 3, 7, 64, 1000])
def test_equal_revenue_exact_tails(h):
    mass = equal_revenue(h)
    tails = np.cumsum(mass[::-1])[::-1]
    np.testing.assert_array_equal(tails, 1.0 / np.arange(1, h + 1))


def test_equal_revenue_bad_h():
    with pytest.raises(BadH):
        equal_revenue(0)


# --- products -------------------------------------------------------------


def test_product_of_er2():
    d = product_joint(TS22, [equal_revenue(2)] * 2)
    np.testing.assert_array_equal(d.probs, [0.25] * 4)


def test_product_of_er3_outer():
    er = equal_revenue(3)
    ts = TypeSpace(((1, 2, 3), (1, 2, 3)))
    d = product_joint(ts, [er, er])
    np.testing.assert_allclose(d.as_array(), np.outer(er, er), atol=1e-16)


def test_product_with_point_mass_concentrates():
    ts = TypeSpace(((1, 2, 3), (1, 2)))
    d = product_joint(ts, [[0.0, 1.0, 0.0], [0.3, 0.7]])
    arr = d.as_array()
    assert arr[0].sum() == 0 and arr[2].sum() == 0
    np.testing.assert_allclose(arr[1], [0.3, 0.7])


def test_product_wrong_marginal_count():
    with pytest.raises(WrongLength):
        product_joint(TS22, [[0.5, 0.5]])


# --- coin pair ------------------------------------------------------------


def test_coin_pair_h2_closed_form():
    eps = 0.1
    d_a, d_b = coin_pair(2, eps)
    np.testing.assert_allclose(
        d_a.probs, [0.25, (1 - eps) / 4, (1 + eps) / 4, 0.25], atol=1e-16
    )
    np.testing.assert_allclose(
        d_b.probs, [0.25, (1 + eps) / 4, (1 - eps) / 4, 0.25], atol=1e-16
    )


@pytest.mark.parametrize("h,eps", [(2, 0.1), (3, 0.5), (5, 0.01), (8, 0.9)])
def test_coin_pair_routes_agree(h, eps):
    d_a, d_b = coin_pair(h, eps)
    mat = coin_matrix_piecewise(h, eps)
    assert np.abs(d_a.as_array() - mat).max() <= 1e-15
    assert np.abs(d_b.as_array() - mat.T).max() <= 1e-15


@pytest.mark.parametrize("h,eps", [(2, 0.3), (4, 0.1), (6, 0.7)])
def test_coin_pair_transpose_symmetry(h, eps):
    d_a, d_b = coin_pair(h, eps)
    np.testing.assert_array_equal(d_b.as_array(), d_a.as_array().T)


def test_coin_pair_small_eps_near_product():
    d_a, d_b = coin_pair(3, 1e-12)
    a = np.outer(equal_revenue(3), equal_revenue(3))
    assert np.abs(d_a.as_array() - a).max() <= 1e-12
    assert np.abs(d_b.as_array() - a).max() <= 1e-12


def test_coin_pair_marginal_sums_swap_under_transpose():
    d_a, d_b = coin_pair(4, 0.25)
    np.testing.assert_allclose(d_a.marginal(0), d_b.marginal(1), atol=1e-15)
    np.testing.assert_allclose(d_a.marginal(1), d_b.marginal(0), atol=1e-15)


def test_coin_pair_rejects_bad_parameters():
    with pytest.raises(BadEps):
        coin_pair(2, 0.0)
    with pytest.raises(BadEps):
        coin_pair(2, 1.0)
    with pytest.raises(BadH):
        coin_pair(1, 0.1)


# --- permutation family ---------------------------------------------------


def test_permutation_family_symmetric_is_singleton():
    d = new_joint(TS22, [0.4, 0.1, 0.1, 0.4])
    assert len(permutation_family(d)) == 1


def test_permutation_family_of_coin():
    d_a, d_b = coin_pair(3, 0.2)
    fam = permutation_family(d_a)
    assert len(fam) == 2
    probs = {tuple(m.probs) for m in fam}
    assert tuple(d_a.probs) in probs and tuple(d_b.probs) in probs


def test_permutation_family_generic_two_bidders():
    d = new_joint(TS22, [0.1, 0.2, 0.3, 0.4])
    assert len(permutation_family(d)) == 2


def test_permutation_family_three_bidders():
    ts = TypeSpace(((1, 2),) * 3)
    rng = np.random.default_rng(9)
    raw = rng.uniform(0.1, 1, 8)
    fam = permutation_family(new_joint(ts, raw / raw.sum()))
    assert len(fam) == 6  # 3! distinct relabelings, generically


def test_permutation_family_needs_common_grid():
    ts = TypeSpace(((1, 2), (1, 3)))
    with pytest.raises(HeterogeneousTypeSpaces):
        permutation_family(new_joint(ts, [0.25] * 4))


# --- CM condition and span ------------------------------------------------


def test_cm_fails_for_products():
    d = product_joint(TS22, [equal_revenue(2)] * 2)
    assert check_cm_condition(d) == (False, False)


def test_cm_holds_for_coin():
    d_a, _ = coin_pair(2, 0.1)
    assert check_cm_condition(d_a) == (True, True)


def test_cm_determinant_scaling():
    # The 2x2 conditional matrix has determinant eps^2 / ((2-eps)(2+eps));
    # its sign of nonsingularity is what check_cm_condition reports.
    eps = 0.1
    d_a, _ = coin_pair(2, eps)
    rows = np.vstack([conditional(d_a, 0, v).probs for v in (1, 2)])
    det = np.linalg.det(rows)
    np.testing.assert_allclose(det, eps**2 / ((2 - eps) * (2 + eps)), atol=1e-15)
    assert all(check_cm_condition(d_a))


def test_span_singleton():
    fam = DistributionFamily((product_joint(TS22, [equal_revenue(2)] * 2),))
    assert span_dimension(fam) == 1


def test_span_coin_pair(coin_family):
    assert span_dimension(coin_family) == 2


def test_span_reorder_invariant(coin_family):
    fam_rev = DistributionFamily(tuple(reversed(coin_family.members)))
    assert span_dimension(coin_family) == span_dimension(fam_rev)
    rng = np.random.default_rng(2)
    members = tuple(random_joint(rng) for _ in range(4))
    for perm in itertools.permutations(range(4)):
        fam = DistributionFamily(tuple(members[i] for i in perm))
        assert span_dimension(fam) == span_dimension(DistributionFamily(members))


def test_family_requires_common_type_space():
    d1 = product_joint(TS22, [equal_revenue(2)] * 2)
    ts3 = TypeSpace(((1, 2, 3), (1, 2, 3)))
    d2 = product_joint(ts3, [equal_revenue(3)] * 2)
    with pytest.raises(HeterogeneousTypeSpaces):
        DistributionFamily((d1, d2))


# --- worst-case family ----------------------------------------------------


@pytest.mark.parametrize("k,r", [(3, 2), (4, 2), (4, 3), (5, 2)])
def test_lower_bound_family_properties(k, r):
    size = max(r, 2) + 1
    fam = lower_bound_family(k, r, (size, size), seed=11)
    assert len(fam) == k
    assert span_dimension(fam) == r
    for d in fam:
        assert all(check_cm_condition(d))
    # Shared conditional of bidder 1 at her lowest value.
    v_star = fam.type_space.values[0][0]
    base = conditional(fam.members[0], 0, v_star).probs
    for d in fam:
        np.testing.assert_allclose(conditional(d, 0, v_star).probs, base, atol=1e-12)
    # Trailing members are the stated convex combinations.
    for j in range(r, k):
        lam = (j - r + 1) / (k - r + 1)
        combo = lam * fam.members[0].probs + (1 - lam) * fam.members[1].probs
        np.testing.assert_allclose(fam.members[j].probs, combo, atol=1e-15)


def test_lower_bound_family_span_exactly_two():
    fam = lower_bound_family(4, 2, (3, 3), seed=0)
    assert span_dimension(fam) == 2
    assert all(all(check_cm_condition(d)) for d in fam)


def test_lower_bound_family_rejects_r_not_less_than_k():
    with pytest.raises(InfeasibleSizes):
        lower_bound_family(2, 2)


def test_lower_bound_family_rejects_bad_sizes():
    with pytest.raises(InfeasibleSizes):
        lower_bound_family(3, 2, (3, 4))
    with pytest.raises(InfeasibleSizes):
        lower_bound_family(4, 3, (3, 3))  # needs t >= r + 1
    with pytest.raises(InfeasibleSizes):
        lower_bound_family(3, 1, (3, 3))  # r < 2
