"""Exact Fourier-mode solver for the linearized fluctuation equation.

Around a constant state rho_bar the fluctuation field satisfies a linear
equation with constant coefficients, which decouples per Fourier mode:

    d v_n = lambda_n v_n dt + sum_k c_{n,k} dB_k,
    lambda_n = -4 pi^2 n^2 phi'(rho_bar) + i 2 pi n nu'(rho_bar).

Each mode is advanced by variation of constants with the increment at
the end point,

    v_n <- exp(lambda_n dt) (v_n + sum_k c_{n,k} dB_k),

so the drift has no time-discretization bias at all and the noise bias
is O(dt) in variance.  The projections c_{n,k} follow from exact
trigonometric orthogonality: the cos/sin pair at wavenumber n is the
only one that drives mode n.

Only d=1 is supported here; the coupling experiments that use this
module run in one dimension.  Modes are stored for n = 1..N_v; mode 0
carries no fluctuation mass (c_{0,k} = 0) and negative modes follow by
conjugate symmetry of a real field.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["OUModeSystem", "build_ou", "ou_step", "ou_solve", "stationary_variance"]


@dataclass(frozen=True)
class OUModeSystem:
    rho_bar: float
    N_v: int
    lam: np.ndarray      # (N_v,) complex, lambda_n for n=1..N_v
    c_cos: np.ndarray    # (N_v,) complex, coupling to the cos mode at wavenumber n
    c_sin: np.ndarray    # (N_v,) complex, coupling to the sin mode
    sigma_bar: float
    dphi_bar: float
    dnu_bar: float

    @property
    def n_noise_modes(self):
        return 2 * self.N_v + 1


def build_ou(c, rho_bar, model, N_v):
    """Mode rates and noise projections for the linear solver.

    N_v must not exceed the cutoff representable by the noise mode
    ordering (the experiment wiring shares the increment stream with the
    nonlinear path on the first 2M+1 modes, fresh beyond).  Weights of
    the shared basis are honored when |n| <= M; modes past the tabulated
    cutoff use unit weights.
    """
    if model.d != 1:
        raise ValueError("linearized solver is one-dimensional")
    if rho_bar <= 0:
        raise ValueError("rho_bar must be positive")
    if N_v < 1 or N_v > model.N // 2 - 1:
        raise ValueError("N_v outside (0, Nyquist)")

    dphi_bar = float(c.dphi(rho_bar))
    dnu_bar = float(np.asarray(c.dnu(rho_bar), dtype=float).reshape(-1)[0]) \
        if c.has_convection() else 0.0
    sigma_bar = float(c.sigma(rho_bar))

    n = np.arange(1, N_v + 1, dtype=float)
    lam = -4.0 * math.pi**2 * n**2 * dphi_bar + 2j * math.pi * n * dnu_bar

    w_cos = np.ones(N_v)
    w_sin = np.ones(N_v)
    for j in range(1, min(N_v, model.M) + 1):
        w_cos[j - 1] = model.weights[2 * j - 1]
        w_sin[j - 1] = model.weights[2 * j]

    # coefficient of exp(i 2 pi n x) in -d/dx (sigma_bar f_k): the Fourier
    # mass of sqrt(2)cos / sqrt(2)sin at +n is 1/sqrt(2) and -i/sqrt(2)
    phase = -2j * math.pi * n * sigma_bar
    c_cos = phase * w_cos / math.sqrt(2.0)
    c_sin = phase * w_sin * (-1j) / math.sqrt(2.0)

    return OUModeSystem(
        rho_bar=rho_bar,
        N_v=int(N_v),
        lam=lam,
        c_cos=c_cos,
        c_sin=c_sin,
        sigma_bar=sigma_bar,
        dphi_bar=dphi_bar,
        dnu_bar=dnu_bar,
    )


def _drive(sys, values):
    """sum_k c_{n,k} dB_k from stacked increments (..., n_modes, d)."""
    if values.shape[-2] < sys.n_noise_modes:
        raise ValueError(
            "need %d increment rows, got %d" % (sys.n_noise_modes, values.shape[-2])
        )
    cos_inc = values[..., 1 : 2 * sys.N_v + 1 : 2, 0]
    sin_inc = values[..., 2 : 2 * sys.N_v + 1 : 2, 0]
    return sys.c_cos * cos_inc + sys.c_sin * sin_inc


def ou_step(sys, v_hat, inc, dt):
    """Exact-drift update v_n <- exp(lambda_n dt)(v_n + drive)."""
    values = inc.values if hasattr(inc, "values") else np.asarray(inc)
    return np.exp(sys.lam * dt) * (v_hat + _drive(sys, values))


def ou_solve(sys, T, dt, stream, snapshot_times=()):
    """Iterate ou_step from v=0, returning [(t, v_hat array), ...]."""
    n_steps = max(1, int(round(T / dt)))
    snap_steps = sorted({min(n_steps, int(round(t / dt))) for t in snapshot_times})
    if not snap_steps:
        snap_steps = [0, n_steps]
    v = np.zeros(sys.N_v, dtype=complex)
    out = []
    if 0 in snap_steps:
        out.append((0.0, v.copy()))
    for s in range(n_steps):
        v = ou_step(sys, v, stream.at(s), dt)
        if (s + 1) in snap_steps:
            out.append(((s + 1) * dt, v.copy()))
    return out


def stationary_variance(sys, dt=None):
    """Long-run E|v_n|^2 per mode.

    With the end-point update the discrete fixed point is
    s_n^2 |e|^2 / (1 - |e|^2) with |e|^2 = exp(2 Re lambda_n dt) and
    s_n^2 = sum_k |c_{n,k}|^2 dt; as dt -> 0 this tends to the continuum
    value -sum_k |c_{n,k}|^2 / (2 Re lambda_n).
    """
    s2 = np.abs(sys.c_cos) ** 2 + np.abs(sys.c_sin) ** 2
    if dt is None:
        return -s2 / (2.0 * np.real(sys.lam))
    e2 = np.exp(2.0 * np.real(sys.lam) * dt)
    return s2 * dt * e2 / (1.0 - e2)
