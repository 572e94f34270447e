import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapforge.measures import (
    EnergyConfiguration,
    GammaShape,
    SimplexLaw,
    dirichlet_moment,
    marginal_moment,
    pair_alpha_moment,
    sample_configuration,
    sample_matrix,
)


def test_gamma_shape_validation():
    with pytest.raises(ValueError):
        GammaShape(0.0)
    with pytest.raises(ValueError):
        GammaShape(-1.0)


def test_simplex_law_total_energy():
    law = SimplexLaw(GammaShape(1.0), 0.5, 4)
    assert law.total_energy == 2.0


def test_energy_configuration_validation():
    with pytest.raises(ValueError):
        EnergyConfiguration(np.array([1.0, -0.5, 2.5]), 1.0)
    with pytest.raises(ValueError):
        EnergyConfiguration(np.array([1.0, 1.0, 2.0]), 1.0)  # sums to 4 != 3


def test_sample_configuration_constraint(rng):
    law = SimplexLaw(GammaShape(0.5), 2.0, 5)
    for _ in range(20):
        cfg = sample_configuration(law, rng)
        assert cfg.sites == 5
        assert np.all(cfg.x > 0)
        assert abs(cfg.x.sum() - 10.0) < 1e-10


def test_dirichlet_moment_against_sampling(rng):
    g, N = 1.5, 4
    law = SimplexLaw(GammaShape(g), 1.0, N)
    xs = sample_matrix(law, 400_000, rng) / N  # back to the sum-1 simplex
    k = np.array([2.0, 1.0, 0.0, 0.0])
    mc = float(np.mean(xs[:, 0] ** 2 * xs[:, 1]))
    exact = dirichlet_moment(GammaShape(g), N, k)
    assert abs(mc - exact) < 5e-5


def test_dirichlet_moment_closed_cases():
    # symmetric Dirichlet first moment is 1/N
    for g in (0.5, 1.0, 2.0):
        for N in (2, 3, 5):
            k = np.zeros(N)
            k[0] = 1.0
            assert abs(dirichlet_moment(GammaShape(g), N, k) - 1.0 / N) < 1e-14
    # uniform case gamma = 1, N = 2: E[w^2] = 1/3
    assert abs(dirichlet_moment(GammaShape(1.0), 2, [2, 0]) - 1.0 / 3.0) < 1e-14


def test_marginal_moment_is_beta_moment():
    from scipy.special import gammaln

    g, N, p = 0.7, 5, 3.0
    a, b = g, (N - 1) * g
    exact = np.exp(gammaln(a + p) + gammaln(a + b) - gammaln(a) - gammaln(a + b + p))
    assert abs(marginal_moment(GammaShape(g), N, p) - exact) < 1e-14


def test_pair_alpha_moment_symmetry():
    g = 1.3
    assert abs(pair_alpha_moment(GammaShape(g), 2, 3) - pair_alpha_moment(GammaShape(g), 3, 2)) < 1e-16
    assert abs(pair_alpha_moment(GammaShape(g), 0, 0) - 1.0) < 1e-15


@given(
    g=st.floats(0.2, 4.0),
    N=st.integers(2, 6),
    k0=st.integers(0, 4),
    k1=st.integers(0, 4),
)
@settings(max_examples=60, deadline=None)
def test_dirichlet_moment_permutation_invariant(g, N, k0, k1):
    k = np.zeros(N)
    k[0], k[1] = k0, k1
    kp = np.zeros(N)
    kp[0], kp[1] = k1, k0
    a = dirichlet_moment(GammaShape(g), N, k)
    b = dirichlet_moment(GammaShape(g), N, kp)
    assert a == pytest.approx(b, rel=1e-12)
    assert 0.0 < a <= 1.0
