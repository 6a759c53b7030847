import itertools
import math

import numpy as np
import pytest
from scipy import integrate, stats

import evd


def test_log_sum_exp_and_ess():
    x = [0.3, -1.2, 4.0]
    assert evd.log_sum_exp(x) == pytest.approx(math.log(sum(math.exp(v) for v in x)), rel=1e-14)
    assert evd.ess([0.0] * 8) == pytest.approx(8.0)


def test_resample_degenerate_weights():
    idx = evd.resample([0.0, -math.inf, -math.inf], 5, "systematic", 3)
    assert list(idx) == [0] * 5
    with pytest.raises(Exception):
        evd.resample([0.0], 2, "residual")


def test_poisson_evidence_against_quadrature():
    y = [0, 3, 1, 2, 2]
    f = lambda lam: math.exp(-lam) * np.prod([stats.poisson.pmf(v, lam) for v in y])
    ref, _ = integrate.quad(f, 0, 50, epsabs=1e-14)
    assert evd.poisson_log_evidence(y) == pytest.approx(math.log(ref), abs=1e-8)


def test_ising_log_z_by_enumeration():
    theta = 0.4
    total = 0.0
    for s in itertools.product([-1, 1], repeat=6):
        g = np.array(s).reshape(2, 3)
        stat = (g[:, 1:] * g[:, :-1]).sum() + (g[1:, :] * g[:-1, :]).sum()
        total += math.exp(theta * stat)
    assert evd.ising_log_z(theta, 2, 3) == pytest.approx(math.log(total), abs=1e-12)


def test_precision_evidence_one_dimension():
    y = np.array([[0.3], [-0.5], [0.1]])
    nu = 3.0

    def f(lam):
        return stats.gamma.pdf(lam, nu / 2, scale=2.0) * np.prod(stats.norm.pdf(y[:, 0], 0, 1 / math.sqrt(lam)))

    ref, _ = integrate.quad(f, 0, np.inf, epsabs=1e-14)
    assert evd.precision_log_evidence(y, nu) == pytest.approx(math.log(ref), abs=1e-8)


def test_ising_savis_close_to_quadrature():
    rng = np.random.default_rng(0)
    spins = rng.choice([-1, 1], size=(4, 4))
    truth = evd.ising_log_evidence(spins)
    rep = evd.ising_savis(spins, 0.3, 0.3, particles=400, points=20, burn_in=0, seed=2)
    assert rep["outside_support"] > 0
    assert abs(rep["log_evidence"] - truth) < 0.3


def test_run_experiment_and_summarise():
    cfg = "[experiment]\nid = bias-accumulation\nreplicates = 2\nseed = 3\n[model]\nn = 10\n[smc]\nP = 8\nM = 4\n"
    a = evd.run_experiment(cfg)
    b = evd.run_experiment(cfg)
    assert a["tables"] == b["tables"]
    assert "replicates.csv" in a["tables"]
    assert evd.summarise(a["tables"]["replicates.csv"]) == a["tables"]["summary.csv"]
    with pytest.raises(evd.ConfigError):
        evd.run_experiment("[experiment]\nid = toy-bf\nreplicates = 0\n")


def test_prop1_sweep():
    r = evd.prop1_sweep(50, 4)
    assert r["holding"] == 50
    assert r["min_margin"] > 0
