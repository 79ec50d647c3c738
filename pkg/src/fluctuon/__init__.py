"""Numerical laboratory for conservative stochastic diffusion fluctuations.

Subpackages by role: noise (spectral basis and increments), coefficients
(nonlinearity triples and admissibility checks), solver (conservative
nonlinear scheme), ou (exact linearized solver), analysis (norms),
experiments (Monte-Carlo sweeps), cli (executable front end).
"""

__version__ = "0.1.0"
