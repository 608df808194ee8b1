from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankspectra import corrmat
from rankspectra.datagen import CovarianceModel, arcsin_transforms, build_covariance, sample_gaussian
from rankspectra.errors import DimensionMismatch, TiesDetected, ZeroVariance
from rankspectra.ranks import latent_scores
from rankspectra.spectra import esd, levy_distance

SEED = 20220613


def kendall_oracle(x):
    n, p = x.shape
    t = np.zeros((p, p))
    for a in range(p):
        for b in range(p):
            s = sum(np.sign(x[i, a] - x[j, a]) * np.sign(x[i, b] - x[j, b]) for i, j in combinations(range(n), 2))
            t[a, b] = s / (n * (n - 1) / 2)
    return t


def spearman_classical(x):
    n, p = x.shape
    r = x.argsort(0).argsort(0) + 1
    out = np.empty((p, p))
    for a in range(p):
        for b in range(p):
            d = r[:, a] - r[:, b]
            out[a, b] = 1 - 6 * np.sum(d * d) / (n * (n * n - 1))
    return out


def test_sample_cov_two_points():
    assert corrmat.sample_covariance(np.array([[1.0], [3.0]])).m[0, 0] == 2.0


def test_sample_cov_constant_column(rng):
    x = rng.standard_normal((10, 3))
    x[:, 1] = 4.2
    s = corrmat.sample_covariance(x).m
    np.testing.assert_allclose(s[1], 0.0, atol=1e-15)
    np.testing.assert_allclose(s[:, 1], 0.0, atol=1e-15)


def test_sample_cov_three_forms(rng):
    x = rng.standard_normal((6, 3))
    n = 6
    s = corrmat.sample_covariance(x).m
    xbar = x.mean(0)
    pairs = sum(np.outer(x[i] - x[j], x[i] - x[j]) for i in range(n) for j in range(n) if i != j) / (2 * n * (n - 1))
    raw = x.T @ x / (n - 1) - n / (n - 1) * np.outer(xbar, xbar)
    np.testing.assert_allclose(s, pairs, atol=1e-10)
    np.testing.assert_allclose(s, raw, atol=1e-10)
    np.testing.assert_allclose(s, np.cov(x.T), atol=1e-12)


def test_pearson(rng):
    x = rng.standard_normal((30, 2))
    x[:, 1] = 2 * x[:, 0]
    assert corrmat.pearson(x).m[0, 1] == pytest.approx(1.0, abs=1e-12)
    y = rng.standard_normal((8, 2))
    a, b = y[:, 0] - y[:, 0].mean(), y[:, 1] - y[:, 1].mean()
    r = np.sum(a * b) / np.sqrt(np.sum(a * a) * np.sum(b * b))
    assert corrmat.pearson(y).m[0, 1] == pytest.approx(r, abs=1e-12)
    z = rng.standard_normal((20, 4))
    np.testing.assert_allclose(corrmat.pearson(3.0 * z + np.arange(4)).m, corrmat.pearson(z).m, atol=1e-12)
    with pytest.raises(ZeroVariance):
        corrmat.pearson(np.column_stack([z[:, 0], np.ones(20)]))


def test_kendall_extremes(rng):
    x = rng.standard_normal(25)
    assert corrmat.kendall(np.column_stack([x, np.exp(x)])).m[0, 1] == 1.0
    assert corrmat.kendall(np.column_stack([x, -x])).m[0, 1] == -1.0


def test_kendall_hand_dataset():
    x = np.array([[1.0, 2.0], [2.0, 1.0], [3.0, 4.0], [4.0, 3.0]])
    # concordant pairs: (1,3),(1,4),(2,3),(2,4); discordant: (1,2),(3,4)
    assert corrmat.kendall(x).m[0, 1] == pytest.approx((4 - 2) / 6)
    np.testing.assert_allclose(corrmat.kendall(x).m, kendall_oracle(x), atol=1e-15)


def test_kendall_against_oracle_and_scipy(rng):
    from scipy.stats import kendalltau

    x = rng.standard_normal((70, 4))  # spans two row blocks
    t = corrmat.kendall(x).m
    np.testing.assert_allclose(t, kendall_oracle(x), atol=1e-13)
    assert t[0, 3] == pytest.approx(kendalltau(x[:, 0], x[:, 3]).statistic, abs=1e-13)
    with pytest.raises(TiesDetected):
        corrmat.kendall(np.array([[1.0, 2.0], [1.0, 3.0], [2.0, 1.0]]))


def test_spearman_classical_formula():
    x = np.array([[0.3, 5.0, -1.0], [1.2, 4.0, -3.0], [-0.7, 7.5, 2.0], [2.2, 1.0, 0.5], [0.9, 3.3, 1.1]])
    np.testing.assert_allclose(corrmat.spearman(x).m, spearman_classical(x), atol=1e-12)


def test_spearman_monotone(rng):
    x = rng.standard_normal((40, 3))
    assert corrmat.spearman(np.column_stack([x[:, 0], x[:, 0] ** 3])).m[0, 1] == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(corrmat.spearman(np.tanh(x) * 7 + 1).m, corrmat.spearman(x).m, atol=1e-14)


def test_improved_spearman_bruteforce(rng):
    x = rng.standard_normal((10, 4))
    diff = corrmat.improved_spearman(x).m - corrmat.improved_spearman_bruteforce(x)
    assert np.max(np.abs(diff)) < 1e-10


def test_improved_spearman_n3():
    x = np.array([[0.2, 1.0], [0.5, -1.0], [-0.1, 0.3]])
    acc = sum(np.outer(np.sign(x[i] - x[j]), np.sign(x[i] - x[k])) for i, j, k in permutations(range(3)))
    np.testing.assert_allclose(corrmat.improved_spearman(x).m, 3 * acc / 6, atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 25), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_spearman_kendall_decomposition(n, p, seed):
    x = np.random.default_rng(seed).standard_normal((n, p))
    rho = corrmat.spearman(x).m
    tau = corrmat.kendall(x).m
    tilde = corrmat.improved_spearman(x).m
    resid = rho - (3 / (n + 1) * tau + (n - 2) / (n + 1) * tilde)
    assert np.max(np.abs(resid)) < 1e-10
    for m in (rho, tau):
        np.testing.assert_allclose(m, m.T, atol=1e-10)
        assert np.all(np.abs(m) <= 1.0)
        np.testing.assert_array_equal(np.diag(m), 1.0)


def test_surrogate_w():
    np.testing.assert_array_equal(corrmat.spearman_surrogate_w(np.zeros((5, 3))).m, np.zeros((3, 3)))
    model = CovarianceModel.explicit([[1.0, 0.5], [0.5, 1.0]])
    a = latent_scores(sample_gaussian(model, 10**5, SEED))
    w = corrmat.spearman_surrogate_w(a).m
    t = arcsin_transforms(build_covariance(model))
    np.testing.assert_allclose(w, 3 * t.sigma2, atol=0.01)
    np.testing.assert_allclose(np.diag(w), 1.0, atol=0.01)


def test_kendall_surrogate():
    s3 = arcsin_transforms(build_covariance(CovarianceModel.tridiagonal(3, 0.3))).sigma3
    np.testing.assert_array_equal(corrmat.kendall_surrogate(np.zeros((4, 3)), s3).m, s3)
    a = latent_scores(sample_gaussian(CovarianceModel.identity(3), 10**5, SEED))
    np.testing.assert_allclose(corrmat.kendall_surrogate(a, np.eye(3) / 3).m, np.eye(3), atol=0.01)
    with pytest.raises(DimensionMismatch):
        corrmat.kendall_surrogate(a, np.eye(2))


def test_kendall_surrogate_spectrum():
    model = CovarianceModel.tridiagonal(150, 0.4)
    x = sample_gaussian(model, 300, SEED)
    s3 = arcsin_transforms(build_covariance(model)).sigma3
    sur = corrmat.kendall_surrogate(latent_scores(x), s3)
    assert levy_distance(esd(corrmat.kendall(x)), esd(sur)) < 0.05


def test_write_matrix_round_trip(tmp_path, rng):
    m = corrmat.spearman(rng.standard_normal((12, 4)))
    corrmat.write_matrix_csv(m, tmp_path / "m.csv")
    np.testing.assert_array_equal(np.loadtxt(tmp_path / "m.csv", delimiter=","), m.m)
