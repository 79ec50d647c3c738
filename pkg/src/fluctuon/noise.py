"""Spectrally correlated noise on the periodic grid.

The noise field is expanded over a real trigonometric basis with an
ultraviolet cutoff M:

    {1} ∪ {sqrt(2) cos(2 pi k.x), sqrt(2) sin(2 pi k.x) : 0 < |k|_inf <= M}

Each basis function multiplies an independent d-dimensional Brownian
motion.  The basis is tabulated on the grid together with its gradients,
and the structure sums

    F1 = sum_k f_k^2,   F2 = (1/2) sum_k grad(f_k^2),   F3 = sum_k |grad f_k|^2

are exposed because they control the Ito correction of the nonlinear
solver and every rate bound downstream.  For this basis F1 is constant
and F2 vanishes identically, so the noise is spatially stationary.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NoiseModel",
    "ModeIncrements",
    "IncrementStream",
    "ResolutionError",
    "build_basis",
    "structure_sums",
    "sample_increments",
    "noise_flux",
    "f3_closed_form",
    "mode_count",
]


class ResolutionError(ValueError):
    """Grid too coarse to represent the requested cutoff without aliasing."""


def mode_count(d, M):
    """Number of basis functions for cutoff M in dimension d."""
    if d == 1:
        return 2 * M + 1
    if d == 2:
        # constant mode plus a cos/sin pair per half-space wavevector
        return 1 + 2 * (((2 * M + 1) ** 2 - 1) // 2)
    raise ValueError("unsupported dimension: %r" % (d,))


def f3_closed_form(M):
    """sup-norm of F3 in d=1: 8 pi^2 * sum_{k=1}^{M} k^2."""
    return (8.0 * math.pi**2 / 6.0) * M * (M + 1) * (2 * M + 1)


def _wavevectors(d, M):
    """Half-space wavevectors, one representative per {k, -k} pair."""
    if d == 1:
        return [(k,) for k in range(1, M + 1)]
    vecs = []
    for k1 in range(0, M + 1):
        for k2 in range(-M, M + 1):
            if k1 == 0 and k2 <= 0:
                continue
            vecs.append((k1, k2))
    return vecs


@dataclass(frozen=True)
class NoiseModel:
    """Tabulated noise basis on the periodic grid.

    values[j] holds the weighted basis function a_j * f_j on the grid and
    grads[j] its analytic gradient (axis 0 of grads[j] is the spatial
    direction).  Mode 0 is the constant function.
    """

    d: int
    M: int
    N: int
    wavevectors: tuple
    parities: tuple
    weights: np.ndarray
    values: np.ndarray
    grads: np.ndarray

    @property
    def n_modes(self):
        return self.values.shape[0]


def build_basis(d, M, N, weights=None):
    """Tabulate the cutoff trigonometric basis and its gradients.

    Requires N >= 4M + 4 so that products of basis functions (which enter
    F3 and the solver's flux terms) stay below the grid Nyquist mode.
    """
    if d not in (1, 2):
        raise ValueError("unsupported dimension: %r" % (d,))
    if M < 0:
        raise ValueError("cutoff M must be nonnegative")
    if N < 4 * M + 4:
        raise ResolutionError(
            "resolution-too-small: N=%d < 4M+4=%d would alias F3" % (N, 4 * M + 4)
        )

    x = np.arange(N) / N
    if d == 1:
        coords = (x,)
        shape = (N,)
    else:
        xx, yy = np.meshgrid(x, x, indexing="ij")
        coords = (xx, yy)
        shape = (N, N)

    vecs = _wavevectors(d, M)
    n_modes = 1 + 2 * len(vecs)
    if weights is None:
        w = np.ones(n_modes)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (n_modes,):
            raise ValueError("expected %d weights, got %r" % (n_modes, w.shape))

    values = np.empty((n_modes,) + shape)
    grads = np.zeros((n_modes, d) + shape)
    wavevectors = [(0,) * d]
    parities = ["const"]

    values[0] = w[0]
    j = 1
    amp = math.sqrt(2.0)
    for k in vecs:
        phase = sum(2.0 * math.pi * ki * ci for ki, ci in zip(k, coords))
        c, s = np.cos(phase), np.sin(phase)
        values[j] = w[j] * amp * c
        values[j + 1] = w[j + 1] * amp * s
        for a, ka in enumerate(k):
            grads[j, a] = -w[j] * amp * 2.0 * math.pi * ka * s
            grads[j + 1, a] = w[j + 1] * amp * 2.0 * math.pi * ka * c
        wavevectors += [k, k]
        parities += ["cos", "sin"]
        j += 2

    return NoiseModel(
        d=d,
        M=M,
        N=N,
        wavevectors=tuple(wavevectors),
        parities=tuple(parities),
        weights=w,
        values=values,
        grads=grads,
    )


def structure_sums(model):
    """Pointwise structure sums (F1, F2, F3) of the tabulated basis.

    F2 is vector valued with shape (d,) + grid.  Sup-norms are read off
    the returned fields by the caller; see sup_norms for the shortcut.
    """
    f1 = np.sum(model.values**2, axis=0)
    f2 = np.sum(model.values[:, None] * model.grads, axis=0)
    f3 = np.sum(model.grads**2, axis=(0, 1))
    return f1, f2, f3


def sup_norms(model):
    """(sup|F1|, sup|F2|, sup|F3|) of the structure sums."""
    f1, f2, f3 = structure_sums(model)
    return float(np.max(np.abs(f1))), float(np.max(np.abs(f2))), float(np.max(np.abs(f3)))


@dataclass(frozen=True)
class ModeIncrements:
    """Gaussian increments ΔB_k ~ N(0, dt I_d), one row per mode."""

    dt: float
    values: np.ndarray  # (n_modes, d)
    lineage: str = ""

    def __post_init__(self):
        if self.values.ndim != 2:
            raise ValueError("increments must have shape (n_modes, d)")


class IncrementStream:
    """Counter-based Gaussian increment source for one Monte-Carlo path.

    Increments are generated in fixed-size chunks keyed by
    (seed, path, chunk index) through a Philox counter, so the value at a
    given (step, mode, direction) is a pure function of those indices.
    Two consumers with different mode counts share a bitwise-identical
    prefix: the nonlinear solver reads the first 2M+1 modes of the same
    draws the linear solver reads in full.
    """

    CHUNK = 256

    def __init__(self, seed, path, n_modes, d, dt):
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.seed = int(seed)
        self.path = int(path)
        self.n_modes = int(n_modes)
        self.d = int(d)
        self.dt = float(dt)
        self._scale = math.sqrt(dt)

    def _chunk(self, index):
        bg = np.random.Philox(
            key=np.array([self.seed, self.path], dtype=np.uint64),
            counter=np.array([0, 0, 0, index], dtype=np.uint64),
        )
        gen = np.random.Generator(bg)
        return gen.standard_normal((self.CHUNK, self.n_modes, self.d)) * self._scale

    def block(self, step0, n_steps):
        """Increments for steps [step0, step0 + n_steps), shape (n_steps, n_modes, d)."""
        out = np.empty((n_steps, self.n_modes, self.d))
        filled = 0
        step = step0
        while filled < n_steps:
            ci, off = divmod(step, self.CHUNK)
            take = min(self.CHUNK - off, n_steps - filled)
            out[filled : filled + take] = self._chunk(ci)[off : off + take]
            filled += take
            step += take
        return out

    def at(self, step):
        """ModeIncrements for a single step index (bit-reproducible)."""
        values = self.block(step, 1)[0]
        return ModeIncrements(
            dt=self.dt,
            values=values,
            lineage="%d/%d/%d" % (self.seed, self.path, step),
        )


def sample_increments(model, dt, rng, step=None):
    """Draw per-mode increments for one step from an IncrementStream.

    When step is omitted the stream's own cursor is used; the stream never
    reuses entries because each (path, step) pair addresses a disjoint
    counter range.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if rng.dt != dt:
        raise ValueError("stream dt %g does not match requested dt %g" % (rng.dt, dt))
    if step is None:
        step = getattr(rng, "_cursor", 0)
        rng._cursor = step + 1
    inc = rng.at(step)
    if inc.values.shape[0] < model.n_modes:
        raise ValueError(
            "stream capacity %d below model mode count %d"
            % (inc.values.shape[0], model.n_modes)
        )
    return ModeIncrements(dt=inc.dt, values=inc.values[: model.n_modes], lineage=inc.lineage)


def noise_flux(model, amp, inc):
    """Vector field sum_k amp(x) f_k(x) ΔB_k before the discrete divergence.

    amp may carry leading batch axes; increments may likewise be batched
    with shape (..., n_modes, d).  The output has shape (..., d) + grid so
    the solver can face-interpolate and take a conservative divergence.
    """
    values = inc.values if isinstance(inc, ModeIncrements) else np.asarray(inc)
    if values.shape[-2] < model.n_modes:
        raise ValueError("increment rows %d < mode count %d" % (values.shape[-2], model.n_modes))
    values = values[..., : model.n_modes, :]
    amp = np.asarray(amp)
    grid_nd = model.d
    if amp.shape[-grid_nd:] != model.values.shape[1:]:
        raise ValueError("grid mismatch between amp and noise model")
    # field[..., a, x] = sum_k values[..., k, a] * f_k(x); einsum without path
    # optimization keeps the reduction order independent of batch shape, so
    # results are bit-identical across worker partitions
    flat_basis = model.values.reshape(model.n_modes, -1)
    field = np.einsum("...ka,kx->...ax", values, flat_basis, optimize=False)
    field = field.reshape(values.shape[:-2] + (model.d,) + model.values.shape[1:])
    return np.expand_dims(amp, -(grid_nd + 1)) * field
