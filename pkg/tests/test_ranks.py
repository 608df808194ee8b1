import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rankspectra.errors import TiesDetected, ZeroDifference
from rankspectra.ranks import (
    compute_ranks,
    empirical_cdf_distance,
    latent_scores,
    reconstruct_ri_from_signs,
    sign_vector,
    standardize_ranks,
)


def tie_free(n_max=12, p_max=5):
    # distinct integers per column, shuffled, then squashed to floats
    @st.composite
    def build(draw):
        n = draw(st.integers(2, n_max))
        p = draw(st.integers(1, p_max))
        cols = [draw(st.permutations(range(n))) for _ in range(p)]
        scale = draw(st.floats(0.1, 10.0))
        return scale * np.array(cols, dtype=np.float64).T

    return build()


def test_simple_ranks():
    r = compute_ranks(np.array([3.1, -2.0, 5.0]))
    np.testing.assert_array_equal(r.r[:, 0], [2, 1, 3])


def test_standardized_n3():
    np.testing.assert_allclose(
        standardize_ranks(np.array([[1.0], [2.0], [3.0]]))[:, 0], [-np.sqrt(1.5), 0.0, np.sqrt(1.5)], atol=1e-15
    )


def test_ties():
    with pytest.raises(TiesDetected):
        compute_ranks(np.array([1.0, 1.0, 2.0]))
    mid = compute_ranks(np.array([1.0, 1.0, 2.0]), "midrank")
    assert mid.midrank
    np.testing.assert_array_equal(mid.r[:, 0], [1.5, 1.5, 3])


def test_sign_vector():
    np.testing.assert_array_equal(sign_vector(np.array([2.0, -1.0]), np.array([1.0, 3.0])), [1, -1])
    with pytest.raises(ZeroDifference):
        sign_vector(np.array([0.5]), np.array([0.5]))


@given(arrays(np.float64, 4, elements=st.floats(-1e6, 1e6)), arrays(np.float64, 4, elements=st.floats(-1e6, 1e6)))
def test_sign_antisymmetry(x, y):
    if np.any(x == y):
        return
    np.testing.assert_array_equal(sign_vector(x, y), -sign_vector(y, x))


def test_reconstruct_small(rng):
    x = rng.standard_normal((5, 3))
    rr = compute_ranks(x).standardized
    for i in range(5):
        assert np.max(np.abs(reconstruct_ri_from_signs(x, i) - rr[i])) < 1e-10


def test_reconstruct_two_samples():
    x = np.array([[0.1, 2.0, -1.0], [0.3, 1.0, -2.0]])
    np.testing.assert_allclose(reconstruct_ri_from_signs(x, 0), [-1, 1, 1])


def test_reconstruct_max_row():
    n = 7
    x = np.arange(n, dtype=float)[:, None]
    assert reconstruct_ri_from_signs(x, n - 1)[0] == pytest.approx(np.sqrt(3 / (n * n - 1)) * (n - 1))


@settings(max_examples=60, deadline=None)
@given(tie_free())
def test_rank_invariants(x):
    n = x.shape[0]
    rk = compute_ranks(x)
    rr = rk.standardized
    np.testing.assert_allclose(rr.sum(axis=0), 0.0, atol=1e-10)
    np.testing.assert_allclose(np.diag(rr.T @ rr) / n, 1.0, atol=1e-10)
    for i in range(n):
        np.testing.assert_allclose(reconstruct_ri_from_signs(x, i), rr[i], atol=1e-10)
    # strictly increasing transform keeps ranks
    np.testing.assert_array_equal(compute_ranks(np.exp(x / x.max()) + x**3).r, rk.r)
    # oracle: rank = 1 + number of smaller entries in the column
    count = 1 + (x[None, :, :] < x[:, None, :]).sum(axis=1)
    np.testing.assert_array_equal(rk.r, count)


def test_latent_scores():
    assert latent_scores(np.array(0.0)) == 0.0
    assert latent_scores(np.array(1.0)) == pytest.approx(float(2 * mpmath.ncdf(1) - 1), abs=1e-15)
    assert latent_scores(np.array(1.0)) == pytest.approx(0.6826895, abs=1e-7)
    assert latent_scores(np.array(40.0)) == 1.0
    for x in (-6.5, -2.0, 0.3, 3.7, 9.0):
        assert latent_scores(np.array(x)) == pytest.approx(float(2 * mpmath.ncdf(x) - 1), rel=1e-13, abs=1e-16)


@given(st.floats(-30, 30), st.floats(-30, 30))
def test_latent_scores_monotone_odd(a, b):
    la, lb = latent_scores(np.array([a, b]))
    assert latent_scores(np.array(-a)) == -la
    if a < b:
        assert la <= lb


def test_ecdf_distance():
    assert empirical_cdf_distance(np.array([0.0]), lambda x: 0.5 + 0 * x) == 0.5
    n = 50
    q = (np.arange(1, n + 1) - 0.5) / n  # uniform quantiles
    assert empirical_cdf_distance(q, lambda x: x) == pytest.approx(1 / (2 * n))


def test_ecdf_dkw():
    fails = 0
    for s in range(100):
        u = np.random.default_rng(s).random(10_000)
        fails += empirical_cdf_distance(u, lambda x: x) >= 0.025
    # DKW: P(sup > 0.025) <= 2 exp(-12.5) ~ 7.5e-6 per seed
    assert fails == 0
