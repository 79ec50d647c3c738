"""Spectral transforms and the norms the convergence statements use.

The Fourier convention is integral-like: the coefficient of the n-th
exponential mode approximates int g(x) exp(-i 2 pi n.x) dx, so the zero
mode is the field mean and mode sums approximate continuum integrals
without resolution-dependent factors.  This keeps norms comparable when
a sweep varies the grid.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpectralField",
    "NormSpec",
    "dft",
    "idft",
    "h_neg_norm",
    "fluctuation_field",
    "spacetime_norm",
    "lp_spacetime_norm",
]


@dataclass(frozen=True)
class SpectralField:
    """Complex mode coefficients in FFT ordering with integer frequencies."""

    coeffs: np.ndarray
    d: int
    N: int

    def frequencies(self):
        return np.fft.fftfreq(self.N, d=1.0 / self.N)


@dataclass(frozen=True)
class NormSpec:
    """Admissible (beta, tau) pair for the space-time fluctuation norm."""

    beta: float
    tau: float  # 2 or math.inf
    d: int = 1

    def __post_init__(self):
        if self.tau not in (2, 2.0, math.inf):
            raise ValueError("tau must be 2 or inf")
        need = self.d / 2.0 if self.tau != math.inf else 1.0 + self.d / 2.0
        if self.beta <= need:
            raise ValueError(
                "beta=%g inadmissible for tau=%s in d=%d (need beta > %g)"
                % (self.beta, self.tau, self.d, need)
            )


def dft(field, d=None):
    """Mean-normalized DFT; supports leading batch axes."""
    field = np.asarray(field)
    if d is None:
        d = field.ndim if field.ndim in (1, 2) else 1
    N = field.shape[-1]
    axes = tuple(range(field.ndim - d, field.ndim))
    coeffs = np.fft.fftn(field, axes=axes) / float(N**d)
    return SpectralField(coeffs=coeffs, d=d, N=N)


def idft(spec):
    """Inverse of dft; returns the real part of the reconstruction."""
    axes = tuple(range(spec.coeffs.ndim - spec.d, spec.coeffs.ndim))
    return np.real(np.fft.ifftn(spec.coeffs * float(spec.N**spec.d), axes=axes))


def _sobolev_weights(spec, beta):
    n = spec.frequencies()
    if spec.d == 1:
        nsq = n**2
    else:
        nsq = n[:, None] ** 2 + n[None, :] ** 2
    return (1.0 + 4.0 * math.pi**2 * nsq) ** (-beta)


def h_neg_norm(spec, beta):
    """H^{-beta} norm sqrt( sum_n (1 + 4 pi^2 |n|^2)^{-beta} |g_n|^2 )."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    w = _sobolev_weights(spec, beta)
    axes = tuple(range(spec.coeffs.ndim - spec.d, spec.coeffs.ndim))
    total = np.sum(w * np.abs(spec.coeffs) ** 2, axis=axes)
    return np.sqrt(total)


def fluctuation_field(rho, rho_bar, epsilon):
    """Rescaled deviation (rho - rho_bar) / sqrt(epsilon)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return (np.asarray(rho) - rho_bar) / math.sqrt(epsilon)


def spacetime_norm(trajectory, tau):
    """Space-time norm of a scalar-valued norm trajectory [(t, value), ...].

    tau=2: sqrt of the trapezoidal integral of value^2 over time.
    tau=inf: max over snapshots.
    """
    if len(trajectory) == 0:
        raise ValueError("empty trajectory")
    times = np.array([t for t, _ in trajectory], dtype=float)
    values = np.array([v for _, v in trajectory], dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("snapshot times must be sorted")
    if tau == math.inf:
        return float(np.max(values))
    if len(trajectory) < 2:
        raise ValueError("tau=2 needs at least two snapshots")
    return float(math.sqrt(np.trapezoid(values**2, times)))


def lp_spacetime_norm(trajectory, h, d=1):
    """( int_0^T int |v|^h dx dt )^{1/h}: trapezoid in time, exact grid sums in space.

    trajectory is a list of (t, GridField); fields may carry leading
    batch axes, in which case one norm per batch entry is returned.  The
    last d axes of each field are spatial.
    """
    if h < 1:
        raise ValueError("h must be >= 1")
    if len(trajectory) < 2:
        raise ValueError("need at least two snapshots")
    times = np.array([t for t, _ in trajectory], dtype=float)
    powers = []
    for _, f in trajectory:
        f = np.asarray(f, dtype=float)
        axes = tuple(range(f.ndim - d, f.ndim))
        # spatial mean approximates the unit-torus integral
        powers.append(np.mean(np.abs(f) ** h, axis=axes))
    powers = np.stack(powers, axis=-1)
    return np.trapezoid(powers, times, axis=-1) ** (1.0 / h)
