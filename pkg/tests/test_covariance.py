import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from disclab import reduce_biased, setsplit
from disclab.covariance import covariance_of, independent_baseline, operator_norm, power_norm
from disclab.distribution import SigningDistribution, polish
from disclab.errors import DimensionError, ValidationError


def test_two_by_two():
    dist = SigningDistribution([[1, 1], [-1, -1]], [0.5, 0.5], [0, 0])
    rep = covariance_of(np.eye(2), dist)
    assert rep.cov.tolist() == [[1, 1], [1, 1]]
    assert rep.op_norm == pytest.approx(2) and rep.trace_lower_bound == pytest.approx(1)


def test_point_mass_is_zero():
    x = np.array([1, -1, 1])
    rep = covariance_of(np.random.default_rng(0).normal(size=(4, 3)), SigningDistribution.point_mass(x))
    assert not np.any(rep.cov)


def test_basis_independent_uniform():
    from disclab.oracle import all_signings

    n = 5
    X = all_signings(n)
    dist = SigningDistribution(X, np.full(len(X), 1 / len(X)), np.zeros(n))
    rep = covariance_of(np.eye(n), dist)
    assert np.allclose(rep.cov, np.eye(n), atol=1e-14) and rep.op_norm == pytest.approx(1)


def test_dimension_mismatch():
    dist = SigningDistribution.point_mass([1, 1, 1])
    with pytest.raises(DimensionError):
        covariance_of(np.eye(2), dist)


@pytest.mark.parametrize("S,val", [(np.diag([2.0, 1.0]), 2), (np.zeros((3, 3)), 0), (np.ones((2, 2)), 2)])
def test_operator_norm(S, val):
    assert operator_norm(S) == pytest.approx(val)
    assert power_norm(S) == pytest.approx(val, rel=1e-8)


def test_operator_norm_rejects_asymmetric():
    with pytest.raises(ValidationError):
        operator_norm(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_baseline_examples():
    assert np.allclose(independent_baseline(np.eye(4), np.zeros(4)).cov, np.eye(4))
    assert not np.any(independent_baseline(np.eye(4), np.ones(4)).cov)
    v = np.array([[1.0], [2.0]])
    assert np.allclose(independent_baseline(v, [0.5]).cov, 0.75 * v @ v.T)
    with pytest.raises(ValidationError):
        independent_baseline(v, [1.5])


def test_baseline_matches_enumeration():
    from disclab.oracle import all_signings

    rng = np.random.default_rng(3)
    V = rng.normal(size=(3, 6))
    x0 = rng.uniform(-1, 1, 6)
    X = all_signings(6)
    probs = np.prod((1 + X * x0) / 2, axis=1)
    rep = covariance_of(V, SigningDistribution(X, probs, x0))
    assert np.allclose(rep.cov, independent_baseline(V, x0).cov, atol=1e-12)


def _random_dist(rng, N, k):
    X = rng.choice([-1, 1], size=(k, N))
    w = rng.random(k)
    w /= w.sum()
    return SigningDistribution(X, w, w @ X)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 8), st.integers(1, 12))
def test_report_invariants(seed, d, N, k):
    rng = np.random.default_rng(seed)
    V = rng.normal(size=(d, N))
    dist = _random_dist(rng, N, k)
    rep = covariance_of(V, dist)
    assert np.array_equal(rep.cov, rep.cov.T)
    assert np.linalg.eigvalsh(rep.cov).min() >= -1e-10
    assert rep.trace / d - 1e-10 <= rep.op_norm <= rep.trace + 1e-10
    energy = dist.probs @ np.sum(rep.signed_sums**2, axis=1)
    assert rep.trace == pytest.approx(energy, abs=1e-10)
    # reorder atoms, split one atom, negate everything
    perm = rng.permutation(k)
    reordered = SigningDistribution(dist.signings[perm], dist.probs[perm], dist.target_mean)
    X2 = np.vstack([dist.signings, dist.signings[:1]])
    p2 = np.r_[dist.probs, dist.probs[0] / 2]
    p2[0] /= 2
    split = SigningDistribution(X2, p2, dist.target_mean)
    for other in (reordered, split, dist.negated()):
        assert covariance_of(V, other).op_norm == pytest.approx(rep.op_norm, abs=1e-10)


def test_five_point_cov_is_zero():
    inst, z = setsplit.generate_satisfiable(12, 9, 3, seed=4)
    fam = reduce_biased.build(inst, 0.3, 0.5)
    rep = covariance_of(fam, reduce_biased.five_point_distribution(fam, z))
    assert np.max(np.abs(rep.cov)) <= 1e-15


def test_monte_carlo_smoke():
    rng = np.random.default_rng(77)
    V = rng.normal(size=(3, 5))
    dist = _random_dist(rng, 5, 6)
    exact = covariance_of(V, dist).cov
    n = 100_000
    idx = rng.choice(dist.support_size, size=n, p=dist.probs)
    W = (dist.signings[idx] - dist.target_mean) @ V.T
    prods = W[:, :, None] * W[:, None, :]
    emp = prods.mean(axis=0)
    sigma = prods.std(axis=0) / np.sqrt(n)
    assert np.all(np.abs(emp - exact) <= 3 * sigma + 1e-12)


def test_distribution_validation():
    with pytest.raises(ValidationError):
        SigningDistribution([[1, 0]], [1.0], [1, 0])
    with pytest.raises(ValidationError):
        SigningDistribution([[1, 1], [-1, -1]], [0.6, 0.6], [0, 0])
    with pytest.raises(ValidationError):
        SigningDistribution([[1, 1], [-1, -1]], [0.5, 0.5], [0.5, 0])


def test_distribution_json():
    dist = SigningDistribution([[1, -1], [-1, 1]], [0.25, 0.75], [-0.5, 0.5])
    back = SigningDistribution.from_json(dist.to_json())
    assert np.array_equal(back.signings, dist.signings) and np.array_equal(back.probs, dist.probs)


def test_polish_restores_mean():
    X = np.array([[1, 1], [-1, -1], [1, -1], [-1, 1]])
    p = np.array([0.25, 0.25, 0.25, 0.25]) + np.array([1e-9, -1e-9, 0, 0])
    dist = polish(X, p, np.zeros(2))
    assert np.max(np.abs(dist.mean())) <= 1e-14
