"""Exchange kernels: jump rate Lambda(a,b) plus the redistribution law of the
energy fraction alpha.

All concrete kernels are of mechanical form: Lambda(a,b) factorizes as
Lambda_s(a+b) * Lambda_r(a/(a+b)) with Lambda_s(s) = s^m, and the alpha law
depends on the pair only through beta = a/(a+b).  The reversible marginal of
beta is Beta(gamma, gamma) for the kernel's gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import betaln

from .measures import GammaShape
from .quad import beta_rule, graded_rule, legendre_rule, power_rule

__all__ = [
    "ExchangeKernel",
    "PairUpdate",
    "apply_update",
    "star_kernel",
    "gg3_kernel",
    "gg2_kernel",
    "stick_kernel",
    "make_kernel",
    "elliptic_k",
    "elliptic_e",
    "detailed_balance_defect",
]

_AGM_TOL = 1e-15


def elliptic_k(t):
    """Complete elliptic integral K(t) in the modulus convention,
    integrand (1 - t^2 sin^2)^(-1/2), via the arithmetic-geometric mean."""
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t >= 1)):
        raise ValueError("elliptic_k requires 0 <= t < 1")
    a = np.ones_like(t)
    b = np.sqrt(1.0 - t * t)
    for _ in range(60):
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        if np.max(np.abs(a - b)) < _AGM_TOL:
            break
    out = np.pi / (2.0 * a)
    return float(out) if out.ndim == 0 else out


def elliptic_e(t):
    """Complete elliptic integral E(t), modulus convention, via AGM."""
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise ValueError("elliptic_e requires 0 <= t <= 1")
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty_like(t)
    at_one = t == 1.0
    out[at_one] = 1.0
    tt = t[~at_one]
    if tt.size:
        a = np.ones_like(tt)
        b = np.sqrt(1.0 - tt * tt)
        c = tt.copy()
        csum = 0.5 * c * c
        pow2 = 1.0
        for _ in range(60):
            c = 0.5 * (a - b)
            a, b = 0.5 * (a + b), np.sqrt(a * b)
            pow2 *= 2.0
            csum += 0.5 * pow2 * c * c
            if np.max(np.abs(c)) < _AGM_TOL:
                break
        k = np.pi / (2.0 * a)
        out[~at_one] = k * (1.0 - csum)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class PairUpdate:
    """One energy exchange: the pair (i, j) is redistributed by fraction alpha."""

    i: int
    j: int
    alpha: float

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise ValueError("pair indices must differ")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")


def apply_update(x: np.ndarray, u: PairUpdate) -> np.ndarray:
    """Return the configuration after the exchange; the pair sum is computed
    once so total energy is conserved up to one rounding of the split."""
    y = np.array(x, dtype=float)
    s = y[u.i] + y[u.j]
    y[u.i] = u.alpha * s
    y[u.j] = s - u.alpha * s
    return y


@dataclass(frozen=True)
class MechanicalForm:
    m: float
    gamma_rev: GammaShape
    certified: bool = True


@dataclass(frozen=True)
class ExchangeKernel:
    """Rate function plus redistribution kernel.

    alpha_rule(beta) returns quadrature (nodes, weights) with the density
    folded into the weights, so that sum w_i f(u_i) = int P(beta, dalpha) f(alpha);
    it is the workhorse of the variational assembly.
    """

    name: str
    rate: Callable[[float, float], float]
    alpha_density: Callable[[float, float, np.ndarray], np.ndarray]
    alpha_sampler: Callable[[float, float, np.random.Generator], float]
    mechanical: Optional[MechanicalForm]
    rate_r: Callable[[np.ndarray], np.ndarray]
    alpha_rule: Callable[[float], tuple[np.ndarray, np.ndarray]]


# ---------------------------------------------------------------------------
# star model: Lambda = (a+b)^m, alpha ~ Beta(gamma, gamma)

def star_kernel(m: float, gamma: GammaShape) -> ExchangeKernel:
    g = gamma.gamma
    lognorm = betaln(g, g)

    def rate(a, b):
        return (a + b) ** m

    def density(a, b, alpha):
        alpha = np.asarray(alpha, dtype=float)
        return np.exp((g - 1) * (np.log(alpha) + np.log1p(-alpha)) - lognorm)

    def sampler(a, b, rng):
        return float(rng.beta(g, g))

    def rule(beta):
        return beta_rule(g, g, 48)

    name = "kmp" if (m == 0 and g == 1) else "star"
    return ExchangeKernel(
        name=name,
        rate=rate,
        alpha_density=density,
        alpha_sampler=sampler,
        mechanical=MechanicalForm(m=m, gamma_rev=gamma, certified=m >= 0),
        rate_r=lambda beta: np.ones_like(np.asarray(beta, dtype=float)),
        alpha_rule=rule,
    )


# ---------------------------------------------------------------------------
# three-dimensional billiard-lattice kernel (gamma = 3/2, m = 1/2)

_GG3_PREF = math.sqrt(2.0 * math.pi) / 6.0


def _gg3_rate_r(beta):
    beta = np.asarray(beta, dtype=float)
    mx = np.maximum(beta, 1.0 - beta)
    return _GG3_PREF * (0.5 + mx) / np.sqrt(mx)


def _gg3_density(beta: float, alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    c = min(beta, 1.0 - beta)
    mx = max(beta, 1.0 - beta)
    ratio = np.minimum(alpha, 1.0 - alpha) / c
    return 1.5 * np.minimum(1.0, np.sqrt(ratio)) / (0.5 + mx)


def gg3_kernel() -> ExchangeKernel:
    mech = MechanicalForm(m=0.5, gamma_rev=GammaShape(1.5))

    def rate(a, b):
        s = a + b
        return float(s ** 0.5 * _gg3_rate_r(a / s))

    def density(a, b, alpha):
        return _gg3_density(a / (a + b), alpha)

    def sampler(a, b, rng):
        beta = a / (a + b)
        c = min(beta, 1.0 - beta)
        # uniform proposal; accept with 1 ^ sqrt((alpha ^ (1-alpha)) / c)
        while True:
            alpha = rng.random()
            if rng.random() <= min(1.0, math.sqrt(min(alpha, 1.0 - alpha) / c)):
                return alpha

    def rule(beta):
        c = min(beta, 1.0 - beta)
        mx = max(beta, 1.0 - beta)
        const = 1.5 / (0.5 + mx)
        nodes, weights = [], []
        # alpha < c: density = const * sqrt(alpha/c)
        u, w = power_rule(0.0, c, 0.5, 32, True)
        nodes.append(u)
        weights.append(w * const / math.sqrt(c))
        if mx > c:
            u, w = legendre_rule(c, mx, 32)
            nodes.append(u)
            weights.append(w * const)
        u, w = power_rule(mx, 1.0, 0.5, 32, False)
        nodes.append(u)
        weights.append(w * const / math.sqrt(c))
        return np.concatenate(nodes), np.concatenate(weights)

    return ExchangeKernel("gg3", rate, density, sampler, mech, _gg3_rate_r, rule)


# ---------------------------------------------------------------------------
# two-dimensional billiard-lattice kernel (gamma = 1, m = 1/2)

_GG2_PREF = math.sqrt(2.0 / math.pi ** 3)


def _gg2_rate_r(beta):
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    mx = np.maximum(beta, 1.0 - beta)
    bstar = np.minimum(beta / (1.0 - beta), (1.0 - beta) / beta)
    out = np.empty_like(beta)
    deg = bstar >= 1.0  # beta = 1/2: (1 - t) K(t) -> 0
    out[deg] = np.sqrt(8.0 * mx[deg] / math.pi ** 3) * 2.0 * elliptic_e(1.0)
    if np.any(~deg):
        # bstar enters as the squared modulus (matching the K(sqrt(.)) pattern
        # of the redistribution density); with modulus t = sqrt(bstar) the
        # normalization int P~ dalpha = Lambda_r holds to machine precision
        t = np.sqrt(bstar[~deg])
        out[~deg] = np.sqrt(8.0 * mx[~deg] / math.pi ** 3) * (
            2.0 * elliptic_e(t) - (1.0 - t * t) * elliptic_k(t)
        )
    return out if out.size > 1 else float(out[0])


def gg2_unnormalized(beta: float, alpha) -> np.ndarray:
    """The symmetric branch density; +inf at the integrable singularity alpha = 1 - beta."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    c = min(beta, 1.0 - beta)
    mx = max(beta, 1.0 - beta)
    out = np.empty_like(alpha)
    for idx, a in np.ndenumerate(alpha):
        if a <= c:
            x, t2 = 1.0 - beta, a / (1.0 - beta)
        elif a >= mx:
            x, t2 = beta, (1.0 - a) / beta
        elif beta <= 0.5:
            x, t2 = 1.0 - a, beta / (1.0 - a)
        else:
            x, t2 = a, (1.0 - beta) / a
        if t2 >= 1.0:
            out[idx] = np.inf
        else:
            out[idx] = math.sqrt(1.0 / x) * elliptic_k(math.sqrt(t2))
    return _GG2_PREF * out


def gg2_kernel() -> ExchangeKernel:
    mech = MechanicalForm(m=0.5, gamma_rev=GammaShape(1.0))

    def rate(a, b):
        s = a + b
        return float(s ** 0.5 * _gg2_rate_r(a / s))

    def density(a, b, alpha):
        beta = a / (a + b)
        return gg2_unnormalized(beta, alpha) / _gg2_rate_r(beta)

    def sampler(a, b, rng):
        beta = a / (a + b)
        lam = float(_gg2_rate_r(beta))
        star = 1.0 - beta  # location of the log singularity
        # envelope (pi/2) / (lam * sqrt(|alpha - star|)), from (1 - t^2 sin^2) >= 1 - t^2
        w_left, w_right = math.sqrt(star), math.sqrt(1.0 - star)
        p_left = w_left / (w_left + w_right)
        while True:
            u = rng.random()
            if rng.random() < p_left:
                alpha = star - star * u * u
            else:
                alpha = star + (1.0 - star) * u * u
            d = float(gg2_unnormalized(beta, alpha)[0]) / lam
            env = (math.pi / 2.0) / (lam * math.sqrt(abs(alpha - star)))
            if not math.isfinite(d):
                continue
            if rng.random() <= d / env:
                return float(alpha)

    def rule(beta):
        c = min(beta, 1.0 - beta)
        mx = max(beta, 1.0 - beta)
        star = 1.0 - beta
        lam = float(_gg2_rate_r(beta))
        nodes, weights = [], []
        if beta < 0.5:
            segs = [(0.0, c, None), (c, star, "hi"), (star, 1.0, "lo")]
        elif beta > 0.5:
            segs = [(0.0, star, "hi"), (star, mx, "lo"), (mx, 1.0, None)]
        else:
            segs = [(0.0, 0.5, "hi"), (0.5, 1.0, "lo")]
        for lo, hi, sing in segs:
            if hi - lo <= 0:
                continue
            if sing is None:
                u, w = legendre_rule(lo, hi, 48)
            else:
                u, w = graded_rule(lo, hi, sing, n_per_cell=32, n_cells=16)
            nodes.append(u)
            weights.append(w * gg2_unnormalized(beta, u) / lam)
        return np.concatenate(nodes), np.concatenate(weights)

    return ExchangeKernel("gg2", rate, density, sampler, mech, _gg2_rate_r, rule)


# ---------------------------------------------------------------------------
# stick process (gamma = 1)

def stick_kernel(m: float) -> ExchangeKernel:
    if m <= 0:
        raise ValueError("stick kernel requires m > 0")
    mech = MechanicalForm(m=m, gamma_rev=GammaShape(1.0))

    def rate_r(beta):
        beta = np.asarray(beta, dtype=float)
        return beta ** m + (1.0 - beta) ** m

    def rate(a, b):
        s = a + b
        return float(s ** m * rate_r(a / s))

    def density(a, b, alpha):
        beta = a / (a + b)
        alpha = np.asarray(alpha, dtype=float)
        return m * np.abs(beta - alpha) ** (m - 1.0) / float(rate_r(beta))

    def sampler(a, b, rng):
        # piecewise power-law CDF inverts in closed form
        beta = a / (a + b)
        lam = float(rate_r(beta))
        u = rng.random() * lam
        if u < beta ** m:
            return beta - (beta ** m - u) ** (1.0 / m)
        return beta + (u - beta ** m) ** (1.0 / m)

    def rule(beta):
        lam = float(rate_r(beta))
        nodes, weights = [], []
        if beta > 0:
            u, w = power_rule(0.0, beta, m - 1.0, 48, False)
            nodes.append(u)
            weights.append(w * m / lam)
        if beta < 1:
            u, w = power_rule(beta, 1.0, m - 1.0, 48, True)
            nodes.append(u)
            weights.append(w * m / lam)
        return np.concatenate(nodes), np.concatenate(weights)

    return ExchangeKernel("stick", rate, density, sampler, mech, rate_r, rule)


# ---------------------------------------------------------------------------

def make_kernel(name: str, m: float = 0.0, gamma: float = 1.0) -> ExchangeKernel:
    """Kernel selection by string identifier (CLI / config surface)."""
    name = name.lower()
    if name == "star":
        return star_kernel(m, GammaShape(gamma))
    if name == "kmp":
        return star_kernel(0.0, GammaShape(1.0))
    if name == "gg3":
        return gg3_kernel()
    if name == "gg2":
        return gg2_kernel()
    if name == "stick":
        return stick_kernel(m if m > 0 else 1.0)
    raise ValueError(f"unknown kernel {name!r}")


def detailed_balance_defect(kernel: ExchangeKernel, n_grid: int = 60) -> float:
    """Max asymmetry of q(beta, alpha) = Lambda_r(beta) p(beta, alpha) w_gamma(beta)
    over an interior grid; zero iff the bond dynamics is reversible for Beta(gamma, gamma)."""
    if kernel.mechanical is None:
        raise ValueError("detailed balance check needs a mechanical kernel")
    g = kernel.mechanical.gamma_rev.gamma
    # irrational offset keeps every pair (grid_i, grid_j) off the singular
    # line alpha = 1 - beta of the gg2 density
    grid = (np.arange(n_grid) + 0.5 / math.sqrt(2.0)) / n_grid
    lam = np.atleast_1d(kernel.rate_r(grid))
    wg = np.exp((g - 1) * (np.log(grid) + np.log1p(-grid)) - betaln(g, g))
    q = np.empty((n_grid, n_grid))
    for i, b in enumerate(grid):
        dens = kernel.alpha_density(b, 1.0 - b, grid)
        q[i, :] = lam[i] * dens * wg[i]
    # the gg2 density has an integrable +inf ridge at alpha = 1 - beta, which is
    # itself a symmetric set; only compare where both entries are finite
    finite = np.isfinite(q)
    if not np.array_equal(finite, finite.T):
        return math.inf
    d = np.abs(q - q.T)
    return float(np.max(d[finite & finite.T]))
