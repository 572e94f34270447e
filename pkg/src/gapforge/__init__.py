"""gapforge: numerical laboratory for spectral gaps of stochastic energy
exchange chains (conditioned product-Gamma equilibria, mechanical exchange
kernels, variational and Monte Carlo gap estimates)."""

__version__ = "0.1.0"
