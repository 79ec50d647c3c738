"""Command-line front end: config parsing, dispatch, and report files.

Config files are INI-style (flat key=value under sections).  Flags
override file keys; every run writes CSV/JSON reports whose names embed
the master seed and a hash of the canonical config, so outputs from
different configurations can never be silently mixed.  The hash excludes
run.workers and run.outdir: results are independent of both by
construction, and the determinism contract (same config, same seed,
any worker count -> byte-identical CSV) depends on that.
"""

import argparse
import configparser
import hashlib
import math
import os
import sys

import numpy as np

from .analysis import NormSpec
from .coefficients import validate_assumptions
from .experiments import (
    ExperimentAbort,
    ExperimentConfig,
    RegimeError,
    clt_experiment,
    make_coefficients,
    make_schedule,
    moment_experiment,
    moser_experiment,
    write_csv,
    write_json,
)
from .noise import build_basis
from .solver import SolverConfig, cfl_dt, simulate_path, save_trajectory

__all__ = ["parse_config", "run", "main", "config_hash", "ConfigError"]

_DEFAULTS = {
    "run": {"seed": "0", "outdir": "", "workers": "1", "paths": "200"},
    "grid": {"d": "1", "n": "128"},
    "coefficients": {"family": "power", "param": "2.0", "smooth_eta": "", "z_ref": "1.0"},
    "time": {"horizon": "0.25", "snapshots": "26"},
    "schedule": {"epsilons": "1e-2,1e-3,1e-4", "gamma": "0.125"},
    "norm": {"beta": "1.0", "tau": "2"},
    "experiment": {
        "n_v": "16",
        "thresholds": "0.5,1.0",
        "h": "2.0",
        "rho0": "1.0",
        "delta": "",
        "rho_max_est": "",
    },
    "simulate": {"epsilon": "1e-3", "cutoff": "2", "save_trajectory": ""},
}


class ConfigError(ValueError):
    pass


def _parse_value(section, key, raw, kind):
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "floats":
            return tuple(float(x) for x in raw.split(",") if x.strip())
        return raw
    except ValueError:
        raise ConfigError(
            "%s.%s: expected %s, got %r" % (section, key, kind, raw)
        ) from None


def parse_config(path=None, overrides=(), **flag_overrides):
    """Merge defaults, an optional config file, and override flags.

    overrides entries look like "section.key=value".  Returns a plain
    dict of sections with typed values plus the canonical item list the
    config hash is computed from.
    """
    raw = {s: dict(kv) for s, kv in _DEFAULTS.items()}
    if path is not None:
        parser = configparser.ConfigParser()
        with open(path) as fh:
            parser.read_file(fh)
        for section in parser.sections():
            if section not in raw:
                raise ConfigError("unknown section %r" % (section,))
            for key, value in parser.items(section):
                if key not in raw[section]:
                    raise ConfigError("unknown key %s.%s" % (section, key))
                raw[section][key] = value
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError("override must look like section.key=value: %r" % (item,))
        dotted, value = item.split("=", 1)
        section, key = dotted.split(".", 1)
        if section not in raw or key not in raw[section]:
            raise ConfigError("unknown key %s.%s" % (section, key))
        raw[section][key] = value
    for dotted, value in flag_overrides.items():
        if value is None:
            continue
        section, key = dotted.split("_", 1)
        raw[section][key] = str(value)

    cfg = {
        "run": {
            "seed": _parse_value("run", "seed", raw["run"]["seed"], "int"),
            "outdir": raw["run"]["outdir"]
            or os.environ.get("FLUCTUON_OUTDIR", "."),
            "workers": _parse_value("run", "workers", raw["run"]["workers"], "int"),
            "paths": _parse_value("run", "paths", raw["run"]["paths"], "int"),
        },
        "grid": {
            "d": _parse_value("grid", "d", raw["grid"]["d"], "int"),
            "n": _parse_value("grid", "n", raw["grid"]["n"], "int"),
        },
        "coefficients": {
            "family": raw["coefficients"]["family"],
            "param": _parse_value("coefficients", "param", raw["coefficients"]["param"], "float"),
            "smooth_eta": None
            if not raw["coefficients"]["smooth_eta"]
            else _parse_value("coefficients", "smooth_eta",
                              raw["coefficients"]["smooth_eta"], "float"),
            "z_ref": _parse_value("coefficients", "z_ref", raw["coefficients"]["z_ref"], "float"),
        },
        "time": {
            "horizon": _parse_value("time", "horizon", raw["time"]["horizon"], "float"),
            "snapshots": _parse_value("time", "snapshots", raw["time"]["snapshots"], "int"),
        },
        "schedule": {
            "epsilons": _parse_value("schedule", "epsilons", raw["schedule"]["epsilons"], "floats"),
            "gamma": _parse_value("schedule", "gamma", raw["schedule"]["gamma"], "float"),
        },
        "norm": {
            "beta": _parse_value("norm", "beta", raw["norm"]["beta"], "float"),
            "tau": raw["norm"]["tau"],
        },
        "experiment": {
            "n_v": _parse_value("experiment", "n_v", raw["experiment"]["n_v"], "int"),
            "thresholds": _parse_value("experiment", "thresholds",
                                       raw["experiment"]["thresholds"], "floats"),
            "h": _parse_value("experiment", "h", raw["experiment"]["h"], "float"),
            "rho0": _parse_value("experiment", "rho0", raw["experiment"]["rho0"], "float"),
            "delta": None
            if not raw["experiment"]["delta"]
            else _parse_value("experiment", "delta", raw["experiment"]["delta"], "float"),
            "rho_max_est": None
            if not raw["experiment"]["rho_max_est"]
            else _parse_value("experiment", "rho_max_est",
                              raw["experiment"]["rho_max_est"], "float"),
        },
        "simulate": {
            "epsilon": _parse_value("simulate", "epsilon", raw["simulate"]["epsilon"], "float"),
            "cutoff": _parse_value("simulate", "cutoff", raw["simulate"]["cutoff"], "int"),
            "save_trajectory": raw["simulate"]["save_trajectory"],
        },
    }

    if cfg["grid"]["d"] != 1:
        raise ConfigError("grid.d: only d=1 sweeps are wired through the CLI")
    if cfg["grid"]["n"] & (cfg["grid"]["n"] - 1):
        raise ConfigError("grid.n must be a power of two")
    tau_raw = cfg["norm"]["tau"]
    if tau_raw not in ("2", "inf"):
        raise ConfigError("norm.tau must be 2 or inf")
    tau = 2.0 if tau_raw == "2" else math.inf
    try:
        NormSpec(beta=cfg["norm"]["beta"], tau=tau, d=cfg["grid"]["d"])
    except ValueError as exc:
        raise ConfigError("norm.beta: %s" % exc) from None
    try:
        make_schedule(cfg["schedule"]["epsilons"], cfg["schedule"]["gamma"], d=cfg["grid"]["d"])
    except RegimeError as exc:
        raise ConfigError("schedule: %s" % exc) from None
    except ValueError as exc:
        raise ConfigError("schedule: %s" % exc) from None

    # canonical items (hash-stable): everything except worker count and outdir
    items = []
    for section in sorted(raw):
        for key in sorted(raw[section]):
            if (section, key) in (("run", "workers"), ("run", "outdir")):
                continue
            items.append("%s.%s=%s" % (section, key, raw[section][key]))
    cfg["canonical"] = tuple(items)
    return cfg


def config_hash(cfg):
    text = "\n".join(cfg["canonical"])
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


def _experiment_config(cfg):
    return ExperimentConfig(
        N=cfg["grid"]["n"],
        T=cfg["time"]["horizon"],
        rho0=cfg["experiment"]["rho0"],
        N_v=cfg["experiment"]["n_v"],
        snapshots=cfg["time"]["snapshots"],
        family=cfg["coefficients"]["family"],
        param=cfg["coefficients"]["param"],
        smooth_eta=cfg["coefficients"]["smooth_eta"],
        z_ref=cfg["coefficients"]["z_ref"],
        seed=cfg["run"]["seed"],
        workers=cfg["run"]["workers"],
        rho_max_est=cfg["experiment"]["rho_max_est"],
    )


def _emit(report, cfg, name):
    outdir = cfg["run"]["outdir"]
    os.makedirs(outdir, exist_ok=True)
    h = config_hash(cfg)
    base = os.path.join(outdir, "%s_s%d_%s" % (name, cfg["run"]["seed"], h))
    write_csv(report, base + ".csv", config_hash=h)
    write_json(report, base + ".json", config_hash=h)
    return base


def _print_rows(report):
    cols = ("epsilon", "M", "mean_sq_err", "ci_lo", "ci_hi", "bound", "ratio")
    print("  ".join("%12s" % c for c in cols))
    for row in report.rows:
        print("  ".join("%12.5g" % row[c] for c in cols))


def run(cfg, command):
    ecfg = _experiment_config(cfg)
    schedule = make_schedule(cfg["schedule"]["epsilons"], cfg["schedule"]["gamma"])
    tau = 2.0 if cfg["norm"]["tau"] == "2" else math.inf

    if command == "validate":
        coeffs = make_coefficients(ecfg.family, ecfg.param, ecfg.smooth_eta, ecfg.z_ref)
        report = validate_assumptions(coeffs)
        print(report.table())
        return 0 if report.all_passed else 2

    if command == "simulate":
        coeffs = make_coefficients(ecfg.family, ecfg.param, ecfg.smooth_eta, ecfg.z_ref)
        eps = cfg["simulate"]["epsilon"]
        model = build_basis(1, cfg["simulate"]["cutoff"], ecfg.N)
        from .noise import sup_norms

        probe = SolverConfig(d=1, N=ecfg.N, T=ecfg.T, dt=1.0, epsilon=eps, rho0=ecfg.rho0)
        dt = cfl_dt(probe, coeffs, ecfg.rho_max_est or 1.5 * ecfg.rho0,
                    f1_sup=sup_norms(model)[0])
        snap = tuple(np.linspace(0.0, ecfg.T, ecfg.snapshots))
        scfg = SolverConfig(d=1, N=ecfg.N, T=ecfg.T, dt=dt, epsilon=eps,
                            rho0=ecfg.rho0, snapshot_times=snap)
        traj = simulate_path(scfg, coeffs, model, ecfg.seed)
        print("steps=%d dt=%.3e mass_drift=%.3e min_rho=%.6g negativity_events=%d%s"
              % (int(round(ecfg.T / dt)), dt, traj.mass_drift, traj.min_rho,
                 traj.negativity_events, " REJECTED: " + traj.reason if traj.rejected else ""))
        dest = cfg["simulate"]["save_trajectory"]
        if dest:
            save_trajectory(dest, traj, 1, ecfg.N, meta={"config_hash": config_hash(cfg)})
            print("trajectory written to %s" % dest)
        return 1 if traj.rejected else 0

    if command == "clt":
        norm = NormSpec(beta=cfg["norm"]["beta"], tau=tau, d=1)
        report = clt_experiment(ecfg, schedule, norm, cfg["run"]["paths"],
                                thresholds=cfg["experiment"]["thresholds"])
    elif command == "moments":
        report = moment_experiment(ecfg, schedule, cfg["experiment"]["h"], cfg["run"]["paths"])
    elif command == "moser":
        delta = cfg["experiment"]["delta"]
        if delta is None:
            delta = ecfg.rho0 / 2.0
        report = moser_experiment(ecfg, schedule, delta, cfg["run"]["paths"])
    else:
        raise ConfigError("unknown subcommand %r" % (command,))

    base = _emit(report, cfg, command)
    _print_rows(report)
    print("reports written to %s.{csv,json}" % base)
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="fluctuon",
        description="Desk-scale fluctuation experiments for conservative stochastic diffusion",
    )
    parser.add_argument("command", choices=["simulate", "clt", "moments", "moser", "validate"])
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE", help="override a config key")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--outdir", default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--paths", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(
            args.config,
            overrides=args.overrides,
            run_seed=args.seed,
            run_outdir=args.outdir,
            run_workers=args.workers,
            run_paths=args.paths,
        )
        return run(cfg, args.command)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except ExperimentAbort as exc:
        print("experiment aborted: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
