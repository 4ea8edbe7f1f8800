import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from combss.errors import InvalidConfig
from combss.simulate import SimSpec, gen_beta, gen_design, gen_response, replication_rngs, signal_variance, simulate


def test_beta_type2():
    assert gen_beta(SimSpec(10, 6, 0.0, 1.0, 2, 3)).tolist() == [1, 1, 1, 0, 0, 0]


def test_beta_type1_spacing():
    assert gen_beta(SimSpec(10, 5, 0.0, 1.0, 1, 5)).tolist() == [1] * 5
    assert np.flatnonzero(gen_beta(SimSpec(10, 9, 0.0, 1.0, 1, 3))).tolist() == [0, 4, 8]
    assert np.flatnonzero(gen_beta(SimSpec(10, 20, 0.0, 1.0, 1, 10))).tolist() == [0, 2, 4, 6, 8, 11, 13, 15, 17, 19]


@settings(max_examples=60, deadline=None)
@given(p=st.integers(1, 200), data=st.data())
def test_beta_has_k0_ones(p, data):
    k0 = data.draw(st.integers(1, p))
    bt = data.draw(st.sampled_from([1, 2]))
    beta = gen_beta(SimSpec(5, p, 0.0, 1.0, bt, k0))
    assert beta.sum() == k0 and set(np.unique(beta)) <= {0.0, 1.0}


@pytest.mark.parametrize("bad", [dict(rho=1.0), dict(rho=-1.0), dict(snr=0.0), dict(k0=11), dict(n=0)])
def test_spec_rejects(bad):
    args = dict(n=10, p=10, rho=0.0, snr=1.0, beta_type=1, k0=3)
    args.update(bad)
    with pytest.raises(InvalidConfig):
        SimSpec(**args)


def test_independent_design():
    x = gen_design(SimSpec(10000, 4, 0.0, 1.0, 1, 2), np.random.default_rng(0))
    c = np.cov(x, rowvar=False)
    assert np.max(np.abs(c - np.diag(np.diag(c)))) <= 0.05


def test_ar1_correlation_and_marginals():
    x = gen_design(SimSpec(20000, 5, 0.8, 1.0, 1, 2), np.random.default_rng(1))
    assert np.corrcoef(x[:, 0], x[:, 2])[0, 1] == pytest.approx(0.64, abs=0.02)
    assert np.allclose(x.var(axis=0), 1.0, atol=0.03)


def test_sigma2_closed_forms():
    spec = SimSpec(50, 3, 0.3, 2.0, 2, 1)
    _, s2 = gen_response(np.ones((50, 3)), gen_beta(spec), spec, np.random.default_rng(0))
    assert s2 == pytest.approx(0.5)
    assert signal_variance(np.array([1.0, 1.0, 0.0]), 0.8) / 1.0 == pytest.approx(3.6)


def test_huge_snr_is_noiseless():
    spec = SimSpec(30, 4, 0.5, 1e30, 2, 2)
    x = np.random.default_rng(2).standard_normal((30, 4))
    y, s2 = gen_response(x, gen_beta(spec), spec, np.random.default_rng(3))
    assert s2 < 1e-29 and np.allclose(y, x @ gen_beta(spec), atol=1e-13)


def test_empirical_snr():
    spec = SimSpec(100000, 10, 0.8, 4.0, 1, 4, seed=9)
    data = simulate(spec)
    signal = data.train.x @ data.beta
    assert signal.var() / data.sigma2 == pytest.approx(4.0, rel=0.05)


def test_determinism_and_substreams():
    spec = SimSpec(20, 6, 0.5, 3.0, 1, 3, seed=4)
    a, b = simulate(spec, 2, n_val=10), simulate(spec, 2, n_val=10)
    assert np.array_equal(a.train.x, b.train.x) and np.array_equal(a.train.y, b.train.y)
    assert np.array_equal(a.validation.x, b.validation.x)
    c = simulate(spec, 3, n_val=10)
    assert not np.array_equal(a.train.x, c.train.x)
    assert not np.array_equal(a.train.x[:10], a.validation.x)
    # validation stream does not shift the training draw
    assert np.array_equal(simulate(spec, 2).train.x, a.train.x)


def test_replication_rngs_independent_of_order():
    first = replication_rngs(7, 5)[0].standard_normal(3)
    replication_rngs(7, 4)
    assert np.array_equal(replication_rngs(7, 5)[0].standard_normal(3), first)
