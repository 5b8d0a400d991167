import math

import numpy as np
import pytest

from kernmetric import (
    DiscreteMeasure,
    DomainError,
    Euclidean,
    EuclideanMetric,
    FuncLp,
    FunctionSample,
    Gaussian,
    dirac,
    divergence,
    energy_distance,
    expected_score,
    kernel_score,
    kme_inner,
    kme_sq_norm,
    make_distance_kernel,
    make_lp_operator,
    make_radial_hilbert,
    measure_difference,
    mmd,
    mmd_u_statistic,
    permutation_test,
    trapezoid_grid,
)

from conftest import random_prob_measure

E1, E2 = Euclidean(1), Euclidean(2)
PHI = Gaussian(alpha=0.5)


def one_d(x):
    return np.array([float(x)])


@pytest.fixture
def k2():
    return make_radial_hilbert(PHI, E2)


# ---------------------------------------------------------------------------
# mmd


def test_mmd_identical_measures(k2, rng):
    mu = random_prob_measure(rng)
    assert mmd(k2, mu, mu) == 0.0


def test_mmd_two_diracs(k2):
    mu = dirac(E2, np.array([0.0, 0.0]))
    nu = dirac(E2, np.array([1.0, 1.0]))  # squared distance 2
    val = mmd(k2, mu, nu)
    assert val == pytest.approx(math.sqrt(2.0 - 2.0 * math.exp(-1.0)), rel=1e-14)
    assert val == pytest.approx(1.1243847, abs=1e-7)


def test_mmd_double_sum_expansion(k2, rng):
    for _ in range(10):
        p, q = random_prob_measure(rng), random_prob_measure(rng)
        expanded = kme_sq_norm(k2, p) - 2.0 * kme_inner(k2, p, q) + kme_sq_norm(k2, q)
        assert mmd(k2, p, q) == pytest.approx(math.sqrt(max(expanded, 0.0)), abs=1e-12)


def test_mmd_symmetry_exact(k2, rng):
    for _ in range(20):
        p, q = random_prob_measure(rng), random_prob_measure(rng)
        assert mmd(k2, p, q) == mmd(k2, q, p)


def test_mmd_triangle_inequality(k2, rng):
    for _ in range(200):
        p = random_prob_measure(rng)
        q = random_prob_measure(rng)
        r = random_prob_measure(rng)
        assert mmd(k2, p, q) <= mmd(k2, p, r) + mmd(k2, r, q) + 1e-10


def test_mmd_rejects_signed_measure(k2):
    bad = DiscreteMeasure(E2, (np.zeros(2), np.ones(2)), np.array([1.5, -0.5]))
    good = dirac(E2, np.zeros(2))
    with pytest.raises(DomainError):
        mmd(k2, bad, good)


# ---------------------------------------------------------------------------
# kernel scores


def test_kernel_score_point_mass_at_outcome(k2):
    x = np.array([0.4, -1.1])
    assert kernel_score(k2, dirac(E2, x), x) == 0.0


def test_kernel_score_dirac_value(k2):
    omega = np.array([0.0, 0.0])
    x = np.array([1.0, 1.0])  # squared distance 2
    val = kernel_score(k2, dirac(E2, omega), x)
    assert val == pytest.approx(1.0 - math.exp(-1.0), rel=1e-14)
    assert val == pytest.approx(0.6321206, abs=1e-7)


def test_kernel_score_is_half_squared_mmd_to_dirac(k2, rng):
    for _ in range(20):
        p = random_prob_measure(rng)
        x = rng.normal(size=2)
        lhs = kernel_score(k2, p, x)
        rhs = 0.5 * mmd(k2, p, dirac(E2, x)) ** 2
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_kernel_score_nonnegative(k2, rng):
    for _ in range(100):
        assert kernel_score(k2, random_prob_measure(rng), rng.normal(size=2)) >= 0.0


def test_expected_score_self(k2, rng):
    p = random_prob_measure(rng, atoms=4)
    g = np.array([[k2(x, y) for y in p.points] for x in p.points])
    w = p.weights
    expected = 0.5 * float(w @ np.diag(g)) - 0.5 * float(w @ g @ w)
    assert expected_score(k2, p, p) == pytest.approx(expected, abs=1e-13)


def test_expected_score_dirac_self(k2):
    d = dirac(E2, np.zeros(2))
    assert expected_score(k2, d, d) == 0.0


def test_propriety(k2, rng):
    for _ in range(200):
        p, q = random_prob_measure(rng), random_prob_measure(rng)
        assert expected_score(k2, q, p) >= expected_score(k2, p, p) - 1e-10


def test_mmd_score_identity(k2, rng):
    for _ in range(20):
        p, q = random_prob_measure(rng), random_prob_measure(rng)
        gap = 2.0 * (expected_score(k2, q, p) - expected_score(k2, p, p))
        assert mmd(k2, p, q) == pytest.approx(math.sqrt(max(gap, 0.0)), abs=1e-10)


# ---------------------------------------------------------------------------
# divergence


def test_divergence_identical(k2, rng):
    p = random_prob_measure(rng)
    assert divergence(k2, p, p) == 0.0


def test_divergence_diracs(k2):
    p = dirac(E2, np.array([0.0, 0.0]))
    q = dirac(E2, np.array([1.0, 1.0]))
    assert divergence(k2, p, q) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-14)


def test_divergence_identity_chain(k2, rng):
    for _ in range(20):
        p, q = random_prob_measure(rng), random_prob_measure(rng)
        d = divergence(k2, p, q)
        half_mmd_sq = 0.5 * mmd(k2, p, q) ** 2
        half_kme = 0.5 * kme_sq_norm(k2, measure_difference(p, q))
        assert d == pytest.approx(half_mmd_sq, rel=1e-12)
        assert d == pytest.approx(half_kme, rel=1e-12)


def test_divergence_positive_for_distinct_supports(k2, rng):
    p = random_prob_measure(rng)
    q = random_prob_measure(rng, scale=3.0)
    assert divergence(k2, p, q) > 0.0


# ---------------------------------------------------------------------------
# U-statistic


def test_u_statistic_duplicated_pair():
    k = make_radial_hilbert(PHI, E1)
    a, b = one_d(0.0), one_d(1.0)
    val = mmd_u_statistic(k, [a, b], [a, b])
    assert val == pytest.approx(k(a, b) - 1.0, abs=1e-15)
    assert val <= 0.0


def test_u_statistic_separated_pairs():
    k = make_radial_hilbert(PHI, E1)
    val = mmd_u_statistic(k, [one_d(0.0), one_d(0.0)], [one_d(1.0), one_d(1.0)])
    assert val == pytest.approx(2.0 - 2.0 * math.exp(-0.5), rel=1e-14)
    assert val == pytest.approx(0.7869387, abs=1e-7)


def test_u_statistic_unbiased_under_null(rng):
    k = make_radial_hilbert(PHI, E1)
    vals = []
    for _ in range(1000):
        xs = [one_d(v) for v in rng.normal(size=5)]
        ys = [one_d(v) for v in rng.normal(size=5)]
        vals.append(mmd_u_statistic(k, xs, ys))
    # mean of the unbiased estimator under the null is 0
    assert abs(np.mean(vals)) < 3.0 * np.std(vals) / math.sqrt(1000)


def test_u_statistic_needs_two_points():
    k = make_radial_hilbert(PHI, E1)
    with pytest.raises(DomainError):
        mmd_u_statistic(k, [one_d(0.0)], [one_d(1.0), one_d(2.0)])


# ---------------------------------------------------------------------------
# permutation test


def test_permutation_separated_functions():
    grid = trapezoid_grid(12)
    base = make_radial_hilbert(Gaussian(alpha=50.0), E1)
    k = make_lp_operator(PHI, base, grid, 1.5)
    zeros = [FunctionSample(grid, np.zeros(12)) for _ in range(20)]
    ones = [FunctionSample(grid, np.ones(12)) for _ in range(20)]
    res = permutation_test(k, zeros, ones, n_perm=99, seed=1)
    assert res.p_value == pytest.approx(0.01, abs=1e-15)


def test_permutation_deterministic(rng):
    k = make_radial_hilbert(PHI, E1)
    xs = [one_d(v) for v in rng.normal(size=8)]
    ys = [one_d(v) for v in rng.normal(size=8)]
    r1 = permutation_test(k, xs, ys, n_perm=50, seed=42)
    r2 = permutation_test(k, xs, ys, n_perm=50, seed=42)
    assert r1 == r2


def test_permutation_p_value_range(rng):
    k = make_radial_hilbert(PHI, E1)
    xs = [one_d(v) for v in rng.normal(size=5)]
    ys = [one_d(v) for v in rng.normal(size=5)]
    res = permutation_test(k, xs, ys, n_perm=99, seed=0)
    assert 0.0 < res.p_value <= 1.0
    assert res.estimator == "u_statistic"


def test_permutation_rejects_zero_perms():
    k = make_radial_hilbert(PHI, E1)
    pts = [one_d(0.0), one_d(1.0)]
    with pytest.raises(DomainError):
        permutation_test(k, pts, pts, n_perm=0, seed=0)


def test_permutation_test_result_json(rng):
    k = make_radial_hilbert(PHI, E1)
    xs = [one_d(v) for v in rng.normal(size=4)]
    ys = [one_d(v) for v in rng.normal(size=4)]
    res = permutation_test(k, xs, ys, n_perm=19, seed=3)
    d = res.to_json()
    assert set(d) == {"statistic", "p_value", "n_permutations", "seed", "estimator"}
    assert d["n_permutations"] == 19 and d["seed"] == 3


# ---------------------------------------------------------------------------
# energy distance


def test_energy_distance_identical(rng):
    metric = EuclideanMetric(2)
    p = random_prob_measure(rng)
    assert energy_distance(metric, p, p) == pytest.approx(0.0, abs=1e-15)


def test_energy_distance_two_diracs():
    metric = EuclideanMetric(1)
    p = dirac(E1, one_d(0.0))
    q = dirac(E1, one_d(1.0))
    assert energy_distance(metric, p, q) == 2.0


def test_energy_distance_equals_squared_mmd_any_base_point(rng):
    metric = EuclideanMetric(2)
    for _ in range(10):
        p, q = random_prob_measure(rng), random_prob_measure(rng)
        ed = energy_distance(metric, p, q)
        for z0 in (np.zeros(2), rng.normal(size=2)):
            k = make_distance_kernel(metric, z0)
            assert mmd(k, p, q) ** 2 == pytest.approx(ed, abs=1e-10)
