import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import ellipe, ellipk

from gapforge.measures import GammaShape
from gapforge.models import (
    PairUpdate,
    apply_update,
    detailed_balance_defect,
    elliptic_e,
    elliptic_k,
    make_kernel,
    star_kernel,
)

ALL_KERNELS = ["star", "kmp", "stick", "gg3", "gg2"]


def _kernel(name):
    if name == "star":
        return make_kernel("star", m=1.0, gamma=1.5)
    if name == "stick":
        return make_kernel("stick", m=2.0)
    return make_kernel(name)


# ---------------------------------------------------------------------------
# elliptic integrals

def test_elliptic_against_scipy():
    # scipy uses the parameter m = t^2
    for t in (0.0, 0.1, 0.5, 0.9, 0.999):
        assert abs(elliptic_k(t) - ellipk(t * t)) < 1e-12
        assert abs(elliptic_e(t) - ellipe(t * t)) < 1e-12
    assert abs(elliptic_e(1.0) - 1.0) < 1e-15


def test_elliptic_domain():
    with pytest.raises(ValueError):
        elliptic_k(1.0)
    with pytest.raises(ValueError):
        elliptic_e(1.5)


# ---------------------------------------------------------------------------
# pair updates

def test_apply_update_conserves_energy():
    x = np.array([0.3, 1.2, 1.5])
    y = apply_update(x, PairUpdate(0, 2, 0.25))
    assert abs(y.sum() - x.sum()) < 1e-15 * x.sum()
    assert y[1] == x[1]


def test_pair_update_validation():
    with pytest.raises(ValueError):
        PairUpdate(1, 1, 0.5)
    with pytest.raises(ValueError):
        PairUpdate(0, 1, 1.5)


@given(
    a=st.floats(0.01, 10.0),
    b=st.floats(0.01, 10.0),
    alpha=st.floats(0.0, 1.0),
)
@settings(max_examples=80, deadline=None)
def test_apply_update_bounds(a, b, alpha):
    y = apply_update(np.array([a, b]), PairUpdate(0, 1, alpha))
    assert y[0] >= 0 and y[1] >= 0
    s = a + b
    assert abs(y.sum() - s) <= 4 * np.finfo(float).eps * s


# ---------------------------------------------------------------------------
# kernel validity

@pytest.mark.parametrize("name", ALL_KERNELS)
def test_alpha_rule_normalization(name):
    kern = _kernel(name)
    for beta in (0.13, 0.37, 0.5, 0.68, 0.91):
        u, w = kern.alpha_rule(beta)
        assert abs(w.sum() - 1.0) < 1e-6
        assert np.all(u >= 0) and np.all(u <= 1)


@pytest.mark.parametrize("name", ALL_KERNELS)
def test_detailed_balance(name):
    assert detailed_balance_defect(_kernel(name)) < 1e-8


@pytest.mark.parametrize("name", ALL_KERNELS)
def test_sampler_matches_density_moments(name):
    kern = _kernel(name)
    rng = np.random.default_rng(99)
    a, b = 0.7, 0.3
    n = 40_000
    draws = np.array([kern.alpha_sampler(a, b, rng) for _ in range(n)])
    u, w = kern.alpha_rule(a / (a + b))
    for p in (1, 2):
        exact = float(np.sum(w * u**p))
        err = 4.0 * draws.std() / math.sqrt(n)
        assert abs((draws**p).mean() - exact) < max(err, 0.01)


def test_star_rate_and_naming():
    kmp = make_kernel("kmp")
    assert kmp.name == "kmp"
    assert kmp.rate(0.4, 2.0) == 1.0
    star = star_kernel(2.0, GammaShape(1.0))
    assert star.name == "star"
    assert abs(star.rate(1.0, 2.0) - 9.0) < 1e-14


def test_stick_rate():
    stick = make_kernel("stick", m=2.0)
    # Lambda(a,b) = a^2 + b^2 for the stick family
    assert abs(stick.rate(1.0, 3.0) - 10.0) < 1e-12


def test_make_kernel_unknown():
    with pytest.raises(ValueError):
        make_kernel("nope")


def test_mechanical_metadata():
    assert make_kernel("gg3").mechanical.gamma_rev.gamma == 1.5
    assert make_kernel("gg3").mechanical.m == 0.5
    assert make_kernel("gg2").mechanical.gamma_rev.gamma == 1.0
    assert make_kernel("gg2").mechanical.m == 0.5
