import json

import numpy as np
import pytest

from rankspectra import harness, mplaw
from rankspectra.datagen import CovarianceModel
from rankspectra.errors import UnsupportedLaw
from rankspectra.harness import ExperimentConfig
from rankspectra.spectra import SpectralDistribution, write_esd_csv


def cfg(**kw):
    base = dict(n=60, p=30, model=CovarianceModel.identity(30), estimator="spearman", replications=3)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_json_round_trip():
    c = cfg(model=CovarianceModel.tridiagonal(30, 0.25), bins=12, nu=1e-5, law="generalized_mp")
    assert ExperimentConfig.from_json(c.to_json()) == c
    e = cfg(p=2, model=CovarianceModel.explicit([[1, 0.3], [0.3, 1]]))
    back = ExperimentConfig.from_json(e.to_json())
    np.testing.assert_array_equal(back.model.matrix, e.model.matrix)


def test_config_validation():
    with pytest.raises(ValueError):
        cfg(n=2)
    with pytest.raises(ValueError):
        cfg(estimator="nope")
    with pytest.raises(ValueError):
        cfg(replications=0)
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({**cfg().to_dict(), "extra": 1})


def test_simulation_trace_and_files(tmp_path):
    c = ExperimentConfig(n=200, p=100, model=CovarianceModel.identity(100), estimator="spearman", replications=10)
    res = harness.run_simulation(c, tmp_path)
    assert res.pooled.eigenvalues.size == 1000
    assert res.pooled.mean() == pytest.approx(1.0, abs=1e-8)
    assert res.counts == [100] * 10
    assert (tmp_path / "eigenvalues.csv").read_text().startswith("eigenvalue\n")
    assert (tmp_path / "histogram.csv").read_text().startswith("bin_left,bin_right,density\n")
    assert len(list((tmp_path / "replications").glob("rep_*.csv"))) == 10
    assert ExperimentConfig.from_json((tmp_path / "config.json").read_text()) == c


def test_dump_matrix(tmp_path):
    harness.run_simulation(cfg(replications=2), tmp_path, dump_matrix=True)
    m = np.loadtxt(tmp_path / "matrices" / "matrix_r0001.csv", delimiter=",")
    assert m.shape == (30, 30)
    np.testing.assert_array_equal(m, harness.estimator_matrix(cfg(), 1).m)


def test_workers_and_reruns_identical(tmp_path):
    c1 = cfg(replications=12, estimator="kendall", model=CovarianceModel.tridiagonal(30, 0.3))
    c8 = ExperimentConfig.from_dict({**c1.to_dict(), "workers": 8})
    harness.run_simulation(c1, tmp_path / "a")
    harness.run_simulation(c8, tmp_path / "b")
    harness.run_simulation(c1, tmp_path / "c")
    for name in ("eigenvalues.csv", "histogram.csv", "replications/rep_0007.csv"):
        a = (tmp_path / "a" / name).read_bytes()
        assert a == (tmp_path / "b" / name).read_bytes() == (tmp_path / "c" / name).read_bytes()


@pytest.mark.parametrize("est", harness.ALL_ESTIMATORS)
def test_all_estimators_run(est):
    for data in ("gaussian", "cauchy"):
        m = harness.estimator_matrix(cfg(estimator=est, data=data, model=CovarianceModel.tridiagonal(30, 0.3)), 0)
        assert m.m.shape == (30, 30)
        np.testing.assert_allclose(m.m, m.m.T, atol=1e-12)


def test_rank_estimators_ignore_marginals():
    model = CovarianceModel.tridiagonal(30, 0.3)
    for est in harness.RANK_ESTIMATORS:
        g = harness.estimator_matrix(cfg(estimator=est, model=model), 2).m
        c = harness.estimator_matrix(cfg(estimator=est, model=model, data="cauchy"), 2).m
        np.testing.assert_array_equal(g, c)


def test_theory_dispatch(tmp_path):
    law = harness.run_theory(cfg(), tmp_path / "law.csv")
    assert law.meta["law"] == "standard_mp"
    assert (tmp_path / "law.json").exists()
    law = harness.run_theory(cfg(model=CovarianceModel.tridiagonal(30, 0.5)))
    assert law.meta["population"]["rho1"] == pytest.approx(6 / np.pi * np.arcsin(0.25))
    law = harness.run_theory(cfg(estimator="pearson", model=CovarianceModel.tridiagonal(30, 0.5)))
    assert law.meta["population"]["rho1"] == 0.5
    law = harness.run_theory(cfg(estimator="kendall"))
    assert law.meta["law"] == "kendall_identity"
    with pytest.raises(UnsupportedLaw, match="surrogate"):
        harness.run_theory(cfg(estimator="kendall", model=CovarianceModel.tridiagonal(30, 0.3)))


def test_compare_same_file(tmp_path):
    d = SpectralDistribution(np.random.default_rng(1).standard_normal(300))
    write_esd_csv(d, tmp_path / "e.csv")
    rep = harness.run_compare(tmp_path / "e.csv", tmp_path / "e.csv")
    assert rep.levy == 0.0 and rep.ks == 0.0


def test_compare_inverse_cdf_sample(tmp_path):
    law = mplaw.standard_mp_law(2.0)
    mplaw.write_law(law, tmp_path / "law.csv")
    u = (np.arange(100_000) + np.random.default_rng(5).random(100_000)) / 100_000
    sample = SpectralDistribution(law.quantile(u))
    write_esd_csv(sample, tmp_path / "e.csv")
    rep = harness.run_compare(tmp_path / "e.csv", tmp_path / "law.csv", threshold=0.01)
    assert rep.levy < 0.01 and rep.passed
    assert rep.levy <= rep.ks + 1e-6


def test_compare_threshold_fail():
    a = SpectralDistribution(np.zeros(3))
    b = SpectralDistribution(np.ones(3))
    rep = harness.run_compare(a, b, threshold=0.5)
    assert not rep.passed and rep.to_dict()["passed"] is False


def test_verify_quick_suite():
    rows = harness.verify_lemmas(["grothendieck", "esscher", "arcsin"], mc_samples=200_000)
    assert all(r.passed for r in rows)
    g = next(r for r in rows if r.name == "grothendieck rho=0.5")
    assert abs(g.estimate - 1 / 3) < 0.004 * np.sqrt(5)  # scaled from 1e6 pairs
    e = next(r for r in rows if r.name == "esscher four-sign rho=0")
    assert e.expected == pytest.approx(1 / 9)
    with pytest.raises(ValueError):
        harness.verify_lemmas("grothendieck", mc_samples=10)


def test_verify_rank_gram_n10():
    rows = harness.verify_lemmas("rank_gram_iid", prop_replications=100_000, prop_n=10)
    off = next(r for r in rows if "E[RR'/p]_01" in r.name)
    assert off.expected == pytest.approx(-1 / 9)
    assert abs(off.estimate + 1 / 9) < 0.005
    assert all(r.passed for r in rows)


def test_esscher_covariance_is_valid():
    for rho in (0.0, 0.5, 0.9, -0.7):
        assert np.all(np.linalg.eigvalsh(harness.esscher_covariance(rho)) > 0)
    assert harness.esscher_closed_form(0.0) == pytest.approx(1 / 9)


def test_reproduce_figure_small(tmp_path):
    summary = harness.reproduce_figure(2, tmp_path, replications=1, threshold=1.0)
    assert len(summary) == 8
    refs = {(r["estimator"], r["reference"]) for r in summary}
    assert ("kendall", "kendall_surrogate") in refs
    assert all(r["passed"] for r in summary)
    assert json.loads((tmp_path / "summary.json").read_text()) == summary
