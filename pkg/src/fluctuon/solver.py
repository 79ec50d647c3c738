"""Explicit conservative scheme for the nonlinear fluctuating diffusion.

One Euler-Maruyama step advances

    rho <- rho + dt D2[phi(rho)] - dt D.[nu(rho)]
               - sqrt(eps) D.[face(sigma(rho+) * noise)]
               + (eps/2) dt D.[face(F1 sigma'(rho+)^2 G[rho] + sigma'sigma F2)]

where D. is the conservative divergence (difference of face fluxes), D2
the standard discrete Laplacian, G the centered gradient and
rho+ = max(rho, 0).  Every term is a discrete divergence, so the grid
mass telescopes exactly; the only mass error is floating-point roundoff.

Negative excursions: sigma and sigma' are always evaluated at rho+, the
state itself is never clipped (clipping would break conservation), and
steps on which the state dips below zero are counted as negativity
events.  The reject-path policy aborts instead.

All operators broadcast over leading batch axes, so a whole ensemble of
paths can be advanced as one (paths, N) array.
"""

import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .noise import ModeIncrements, noise_flux, structure_sums

__all__ = [
    "SolverConfig",
    "PathState",
    "Trajectory",
    "PathRejected",
    "cfl_dt",
    "em_update",
    "step",
    "simulate_path",
    "save_trajectory",
    "load_trajectory",
]


class PathRejected(RuntimeError):
    """A path hit NaN/inf or violated the nonnegativity policy."""


@dataclass(frozen=True)
class SolverConfig:
    d: int
    N: int
    T: float
    dt: float
    epsilon: float
    rho0: float
    snapshot_times: tuple = ()
    nonneg_policy: str = "clip-at-zero"
    L: float = 1.0

    def __post_init__(self):
        if self.rho0 <= 0:
            raise ValueError("initial constant must be positive")
        if self.nonneg_policy not in ("clip-at-zero", "reject-path"):
            raise ValueError("unknown nonneg policy %r" % (self.nonneg_policy,))
        if any(t < 0 or t > self.T + 1e-12 for t in self.snapshot_times):
            raise ValueError("snapshot times must lie in [0, T]")

    @property
    def dx(self):
        return self.L / self.N


@dataclass
class PathState:
    rho: np.ndarray
    t: float
    mass0: float
    negativity_events: int = 0
    min_rho: float = math.inf


def cfl_dt(cfg, c, rho_max_est, f1_sup=None, dnu_sup=None):
    """Diffusive stability step, including the Ito-correction diffusion.

    dt = 0.2 dx^2 / sup_{z <= 2 rho_max} [ phi'(z) + (eps/2) |F1| sigma'(z)^2 ],
    capped by 0.1 dx / sup|nu'| when convection is present.  The sup is
    taken over a dense sample of (0, 2 rho_max].
    """
    if rho_max_est <= 0:
        raise ValueError("rho_max_est must be positive")
    dx = cfg.dx
    z = np.linspace(1e-6 * rho_max_est, 2.0 * rho_max_est, 4096)
    diff = np.asarray(c.dphi(z), dtype=float)
    if cfg.epsilon > 0 and f1_sup:
        diff = diff + 0.5 * cfg.epsilon * f1_sup * np.asarray(c.dsigma(z), dtype=float) ** 2
    dt = 0.2 * dx * dx / float(np.max(diff))
    if c.has_convection():
        if dnu_sup is None:
            dnu_sup = float(np.max(np.abs(np.asarray(c.dnu(z), dtype=float))))
        if dnu_sup > 0:
            dt = min(dt, 0.1 * dx / dnu_sup)
    return dt


def _face_avg(f, axis):
    """Average of a node field onto the faces i+1/2 along one axis."""
    return 0.5 * (f + np.roll(f, -1, axis=axis))


def _face_div(flux_faces, axis, dx):
    """Conservative divergence from face fluxes: (F_{i+1/2} - F_{i-1/2})/dx."""
    return (flux_faces - np.roll(flux_faces, 1, axis=axis)) / dx


def _centered_grad(f, axis, dx):
    return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * dx)


def _drift_increment(rho, cfg, c, model, f1_field, f2_field):
    """dt-proportional part of the update (deterministic plus Ito correction)."""
    d, dx = cfg.d, cfg.dx
    rho_plus = np.maximum(rho, 0.0)
    out = np.zeros_like(rho)

    phi_r = c.phi(rho_plus)
    spatial_axes = range(rho.ndim - d, rho.ndim)
    for ax in spatial_axes:
        # Laplacian of phi as divergence of face differences
        face_diff = (np.roll(phi_r, -1, axis=ax) - phi_r) / dx
        out += _face_div(face_diff, ax, dx)

    if c.has_convection():
        nu_r = c.nu(rho_plus)  # same shape as rho per component; d=1 scalar
        for ax in spatial_axes:
            out -= _face_div(_face_avg(nu_r, ax), ax, dx)

    if cfg.epsilon > 0:
        dsig = c.dsigma(rho_plus)
        sig = c.sigma(rho_plus)
        half_eps = 0.5 * cfg.epsilon
        for i, ax in enumerate(spatial_axes):
            corr = f1_field * dsig**2 * _centered_grad(rho, ax, dx)
            if f2_field is not None:
                corr = corr + dsig * sig * f2_field[i]
            out += half_eps * _face_div(_face_avg(corr, ax), ax, dx)
    return out


def em_update(rho, cfg, c, model, inc, f1_field, f2_field):
    """The bare Euler-Maruyama update, shared by step() and batched ensembles.

    Broadcasts over leading batch axes of rho (and of the increment
    values); every floating-point operation is elementwise or a fixed-
    order reduction, so each batch row is bit-identical to a standalone
    single-path run with the same stream.
    """
    new = rho + cfg.dt * _drift_increment(rho, cfg, c, model, f1_field, f2_field)
    if cfg.epsilon > 0:
        sig = c.sigma(np.maximum(rho, 0.0))
        flux = noise_flux(model, sig, inc)  # (..., d, grid)
        root_eps = math.sqrt(cfg.epsilon)
        for i in range(cfg.d):
            ax = new.ndim - cfg.d + i
            comp = flux[(Ellipsis, i) + (slice(None),) * cfg.d]
            new -= root_eps * _face_div(_face_avg(comp, ax), ax, cfg.dx)
    return new


def step(state, cfg, c, model, inc, _cache=None):
    """One Euler-Maruyama step; returns the same PathState advanced in place."""
    rho = state.rho
    if _cache is None:
        f1, f2, _ = structure_sums(model)
        f2 = f2 if float(np.max(np.abs(f2))) > 0 else None
    else:
        f1, f2 = _cache

    new = em_update(rho, cfg, c, model, inc, f1, f2)

    if not np.all(np.isfinite(new)):
        raise PathRejected("non-finite state at t=%g" % (state.t + cfg.dt,))

    mn = float(np.min(new))
    if mn < 0.0:
        if cfg.nonneg_policy == "reject-path":
            raise PathRejected("negative density at t=%g (reject-path)" % (state.t + cfg.dt,))
        state.negativity_events += 1
    state.min_rho = min(state.min_rho, mn)
    state.rho = new
    state.t += cfg.dt
    return state


@dataclass
class Trajectory:
    times: list
    fields: list
    mass0: float
    mass_drift: float
    negativity_events: int
    min_rho: float
    rejected: bool = False
    reason: str = ""


def simulate_path(cfg, c, model, seed, path=0, stream=None):
    """Run one path to the horizon, recording snapshots at the nearest steps.

    Deterministic function of (cfg, c, model, seed, path).  Rejected
    paths return a flagged Trajectory rather than being resampled.
    """
    from .noise import IncrementStream

    n_steps = max(1, int(round(cfg.T / cfg.dt)))
    snap_steps = sorted({min(n_steps, int(round(t / cfg.dt))) for t in cfg.snapshot_times})
    if not snap_steps:
        snap_steps = [0, n_steps]
    if stream is None:
        stream = IncrementStream(seed, path, model.n_modes, cfg.d, cfg.dt)

    shape = (cfg.N,) * cfg.d
    state = PathState(rho=np.full(shape, float(cfg.rho0)), t=0.0, mass0=float(cfg.rho0))
    f1, f2, _ = structure_sums(model)
    f2 = f2 if float(np.max(np.abs(f2))) > 0 else None
    cache = (f1, f2)

    times, fields = [], []
    if 0 in snap_steps:
        times.append(0.0)
        fields.append(state.rho.copy())

    zero_inc = ModeIncrements(dt=cfg.dt, values=np.zeros((model.n_modes, cfg.d)))
    try:
        for s in range(n_steps):
            if cfg.epsilon > 0:
                raw = stream.at(s)
                inc = ModeIncrements(dt=cfg.dt, values=raw.values[: model.n_modes],
                                     lineage=raw.lineage)
            else:
                inc = zero_inc
            step(state, cfg, c, model, inc, _cache=cache)
            if (s + 1) in snap_steps:
                times.append(state.t)
                fields.append(state.rho.copy())
    except PathRejected as exc:
        return Trajectory(times, fields, state.mass0, math.nan,
                          state.negativity_events, state.min_rho,
                          rejected=True, reason=str(exc))

    mass = float(np.mean(state.rho))
    drift = abs(mass - state.mass0) / abs(state.mass0)
    return Trajectory(times, fields, state.mass0, drift,
                      state.negativity_events, state.min_rho)



_MAGIC = b"FLRHO1\x00\x00"


def save_trajectory(path, traj, d, N, meta=None):
    """Flat binary dump: magic, d, N, count, times, row-major fields; JSON sidecar."""
    count = len(traj.fields)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<qqq", d, N, count))
        np.asarray(traj.times, dtype="<f8").tofile(fh)
        for f in traj.fields:
            np.ascontiguousarray(f, dtype="<f8").tofile(fh)
    sidecar = {
        "mass0": traj.mass0,
        "mass_drift": traj.mass_drift,
        "negativity_events": traj.negativity_events,
        "min_rho": traj.min_rho,
        "rejected": traj.rejected,
        "reason": traj.reason,
    }
    if meta:
        sidecar.update(meta)
    with open(str(path) + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)


def load_trajectory(path):
    with open(path, "rb") as fh:
        if fh.read(8) != _MAGIC:
            raise ValueError("not a trajectory file")
        d, N, count = struct.unpack("<qqq", fh.read(24))
        times = np.fromfile(fh, dtype="<f8", count=count)
        shape = (N,) * d
        fields = [np.fromfile(fh, dtype="<f8", count=N**d).reshape(shape) for _ in range(count)]
    with open(str(path) + ".json") as fh:
        sidecar = json.load(fh)
    traj = Trajectory(list(times), fields, sidecar["mass0"], sidecar["mass_drift"],
                      sidecar["negativity_events"], sidecar["min_rho"],
                      sidecar["rejected"], sidecar["reason"])
    return traj, d, N, sidecar
