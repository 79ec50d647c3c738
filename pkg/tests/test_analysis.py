import math

import numpy as np
import pytest

from fluctuon.analysis import (
    NormSpec,
    dft,
    fluctuation_field,
    h_neg_norm,
    idft,
    lp_spacetime_norm,
    spacetime_norm,
)


def test_dft_mean_normalization():
    g = np.full(32, 3.5)
    assert abs(dft(g).coeffs[0] - 3.5) <= 1e-14


def test_dft_roundtrip():
    rng = np.random.default_rng(0)
    g = rng.normal(size=64)
    assert np.allclose(idft(dft(g)), g)


def test_parseval():
    rng = np.random.default_rng(1)
    g = rng.normal(size=128)
    assert abs(np.sum(np.abs(dft(g).coeffs) ** 2) - np.mean(g**2)) <= 1e-12


def test_h_neg_norm_single_mode():
    # g = sqrt(2) cos(2 pi 3 x): coefficients 1/sqrt2 at n = +-3
    N = 64
    x = np.arange(N) / N
    g = math.sqrt(2) * np.cos(2 * math.pi * 3 * x)
    beta = 1.0
    expected = math.sqrt(1.0 / (1 + 4 * math.pi**2 * 9))
    spec = dft(g)
    assert abs(h_neg_norm(spec, beta) - expected) <= 1e-12


def test_h_neg_norm_constant():
    spec = dft(np.full(16, 2.0))
    assert abs(h_neg_norm(spec, 1.5) - 2.0) <= 1e-12


def test_h_neg_norm_batched():
    rng = np.random.default_rng(2)
    g = rng.normal(size=(5, 32))
    spec = dft(g, d=1)
    batch = h_neg_norm(spec, 0.75)
    singles = np.array([h_neg_norm(dft(row, d=1), 0.75) for row in g])
    assert np.allclose(batch, singles)


def test_norm_spec_admissibility():
    NormSpec(beta=0.6, tau=2.0)
    NormSpec(beta=1.6, tau=math.inf)
    with pytest.raises(ValueError):
        NormSpec(beta=0.4, tau=2.0)
    with pytest.raises(ValueError):
        NormSpec(beta=1.2, tau=math.inf)


def test_fluctuation_field_scaling():
    rho = np.array([1.1, 0.9, 1.0, 1.0])
    v = fluctuation_field(rho, 1.0, 0.01)
    assert np.allclose(v, (rho - 1.0) / 0.1)


def test_spacetime_norm_tau2_constant():
    traj = [(0.0, 2.0), (0.5, 2.0), (1.0, 2.0)]
    assert abs(spacetime_norm(traj, 2.0) - 2.0) <= 1e-14


def test_spacetime_norm_tau2_linear():
    # value(t) = t on [0,1]: sqrt(int t^2 dt) = 1/sqrt(3)
    ts = np.linspace(0, 1, 2001)
    traj = list(zip(ts, ts))
    assert abs(spacetime_norm(traj, 2.0) - 1 / math.sqrt(3)) <= 1e-5


def test_spacetime_norm_tau_inf():
    traj = [(0.0, 1.0), (0.3, 4.0), (0.6, 2.0)]
    assert spacetime_norm(traj, math.inf) == 4.0


def test_lp_spacetime_norm_constant_field():
    N = 16
    traj = [(0.0, np.full(N, 3.0)), (1.0, np.full(N, 3.0))]
    # (int int |3|^2 dx dt)^{1/2} = 3
    assert abs(lp_spacetime_norm(traj, 2.0) - 3.0) <= 1e-12
