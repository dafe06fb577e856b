"""Command-line driver: run / validate / presets / estimate.

Exit codes: 0 success, 1 validation failure, 2 runtime failure.
Worker count for sweeps comes from --workers or SPINBOSON_WORKERS.
"""

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import (
    ExperimentConfig, ConfigError, parse_config_text, apply_overrides,
    validate_mapping, DEFAULTS,
)
from .bath import BathSpec, discretize_bath, sample_reference_occupations
from .basis import enumerate_basis, hilbert_dimension
from .operators import DriveSpec, initial_state
from .sil import SilConfig, StateVector, propagate, default_dt
from .observables import (
    standard_observables, records_from_trajectory, write_power_csv,
    reduce_state, trace_distance,
)
from .linres import (
    thermal_equilibrium_correlation, onsager_from_correlation,
)
from .analytic import (
    WeakCouplingParams, ToulouseParams, weak_coupling_onsager, toulouse_onsager,
    kondo_frequency,
)
from .tur import sweep_tur, write_tur_csv


PRESETS = {
    # Driven trajectory, powers and energy channels (T=0, conversion window)
    "fig2": {"mode": "trajectory", "bath.alpha": 0.1, "bath.omega_c": 10.0,
             "drive.eps1": -1.0, "drive.eps2": 0.5, "drive.omega": 5.0,
             "drive.phi": 0.0, "run.t_final": 40.0, "output": "fig2.csv"},
    # Same run; the energy columns in the CSV are the point of this preset
    "fig3": {"mode": "trajectory", "bath.alpha": 0.1, "bath.omega_c": 10.0,
             "drive.eps1": -1.0, "drive.eps2": 0.5, "drive.omega": 5.0,
             "drive.phi": 0.0, "run.t_final": 40.0, "output": "fig3.csv"},
    # Non-Markovianity witness: trace distance between y+ / y- initial states
    "fig4": {"mode": "witness", "bath.alpha": 0.1, "bath.omega_c": 10.0,
             "drive.eps1": 0.5, "drive.eps2": 0.5, "drive.omega": math.pi,
             "run.t_final": 40.0, "output": "fig4.csv"},
    # Converter performance at maximum efficiency vs drive frequency
    "fig5": {"mode": "tur_sweep", "oracle": "weak_coupling",
             "bath.alpha": 0.0125, "bath.beta": 10.0, "drive.eps2": 0.5,
             "sweep.omega": tuple(np.round(np.arange(0.10, 6.001, 0.01), 10)),
             "output": "fig5.csv"},
    "fig6": {"mode": "tur_sweep", "oracle": "weak_coupling",
             "bath.alpha": 0.0125, "bath.beta": 10.0, "drive.eps2": 0.5,
             "sweep.omega": tuple(np.round(np.arange(0.10, 6.001, 0.01), 10)),
             "output": "fig6.csv"},
    # Tradeoff parameter vs frequency across coupling strengths
    "fig7": {"mode": "tur_sweep", "oracle": "weak_coupling",
             "bath.alpha": 0.0125, "bath.beta": 10.0, "drive.eps2": 0.5,
             "sweep.omega": tuple(np.round(np.arange(0.10, 6.001, 0.01), 10)),
             "sweep.alpha": (0.0125, 0.025, 0.10, 0.20),
             "output": "fig7.csv"},
    # Toulouse point: analytic oracle, frequencies in units of gamma
    "fig8": {"mode": "tur_sweep", "oracle": "toulouse", "bath.alpha": 0.5,
             "bath.beta": 10.0, "drive.eps2": 0.5,
             "sweep.omega": tuple(np.round(np.arange(0.4, 50.001, 0.05), 10)),
             "output": "fig8.csv"},
}

PRESET_NOTES = {
    "fig2": "driven trajectory, instantaneous channel powers (SIL)",
    "fig3": "driven trajectory, system/bath/interaction energy balance (SIL)",
    "fig4": "trace-distance non-Markovianity witness, y+/y- pair (SIL)",
    "fig5": "ME-line performance vs frequency (weak-coupling oracle)",
    "fig6": "power and fluctuations along the ME line (weak-coupling oracle)",
    "fig7": "static/dynamic TUR sweep over coupling strengths",
    "fig8": "Toulouse-point TUR sweep (digamma closed forms)",
}


def _worker_count(args):
    if getattr(args, "workers", None):
        return max(1, args.workers)
    env = os.environ.get("SPINBOSON_WORKERS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _load_mapping(args):
    mapping = {}
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError("unknown preset %r (have: %s)" %
                              (args.preset, ", ".join(sorted(PRESETS))))
        mapping.update(PRESETS[args.preset])
        if getattr(args, "full", False):
            mapping["bath.m_mod"] = 220
            mapping["bath.n_ph"] = 3
    if args.config:
        with open(args.config) as fh:
            mapping.update(parse_config_text(fh.read()))
    if args.override:
        mapping = apply_overrides(mapping, args.override)
    return mapping


def _estimate(mapping, file=sys.stdout):
    m = dict(DEFAULTS)
    m.update(mapping)
    m_mod, n_ph = int(m["bath.m_mod"]), int(m["bath.n_ph"])
    dim = 2 * hilbert_dimension(m_mod, n_ph)
    kd = int(m["sil.krylov_dim"])
    vec = 16 * dim
    # Krylov block plus state, companion, and scratch
    mem = vec * (kd + 4)
    drive = DriveSpec(eps1=float(m["drive.eps1"]), eps2=float(m["drive.eps2"]),
                      omega=float(m["drive.omega"]), phi=float(m["drive.phi"]))
    dt = float(m["sil.dt"]) or default_dt(drive)
    steps = int(float(m["run.t_final"]) / dt)
    # ~4 flops per matvec nonzero; coupling matrix has O(dim * m_mod) entries
    secs = steps * kd * dim * max(1, m_mod // 8) * 1e-9
    print("state dimension : %d" % dim, file=file)
    print("memory estimate : %.2f GB" % (mem / 1e9), file=file)
    print("time estimate   : %.0f s (%d steps, rough)" % (secs, steps), file=file)
    return mem


def _onsager_source(cfg, alpha):
    if cfg.oracle == "weak_coupling":
        params = WeakCouplingParams(alpha=alpha, omega_c=cfg.bath.omega_c,
                                    beta=cfg.bath.beta)
        return lambda w: weak_coupling_onsager(params, w, cfg.drive.phi)
    if cfg.oracle == "toulouse":
        params = ToulouseParams(gamma=kondo_frequency(cfg.bath.omega_c),
                                beta=cfg.bath.beta)
        return lambda w: toulouse_onsager(params, w, cfg.drive.phi)
    # sil: one equilibrium correlator, transformed per frequency
    spec = BathSpec(alpha=alpha, omega_c=cfg.bath.omega_c, m_mod=cfg.bath.m_mod,
                    n_ph=cfg.bath.n_ph, beta=cfg.bath.beta)
    taus = np.arange(0.0, cfg.tau_max + 0.5 * cfg.d_tau, cfg.d_tau)
    corr = thermal_equilibrium_correlation(spec, cfg.sil, cfg.t_bar, taus,
                                           n_samples=cfg.samples, seed=cfg.seed)
    return lambda w: onsager_from_correlation(corr, w, cfg.drive.phi)


def run_trajectory(cfg):
    spec = cfg.bath
    modes = discretize_bath(spec)
    basis = enumerate_basis(spec)
    obs = standard_observables(basis, modes, cfg.drive)
    psi0 = StateVector(initial_state(basis, tls="plus"), 0.0)
    traj = propagate(basis, modes, cfg.drive, cfg.sil, psi0, cfg.t_final,
                     observables=obs, sample_every=4)
    records = records_from_trajectory(traj)
    write_power_csv(cfg.output, records, cfg.header_params())


def run_witness(cfg):
    spec = cfg.bath
    modes = discretize_bath(spec)
    basis = enumerate_basis(spec)
    def track(label):
        psi0 = StateVector(initial_state(basis, tls=label), 0.0)
        obs = {"rho": lambda psi, t: reduce_state(psi, basis)}
        return propagate(basis, modes, cfg.drive, cfg.sil, psi0, cfg.t_final,
                         observables=obs, sample_every=4)
    traj1 = track("y+")
    traj2 = track("y-")
    dist = [trace_distance(a, b) for a, b in
            zip(traj1.observables["rho"], traj2.observables["rho"])]
    with open(cfg.output, "w") as fh:
        for key, value in cfg.header_params().items():
            fh.write(f"# {key} = {value}\n")
        fh.write("t,trace_distance\n")
        for t, d in zip(traj1.times, dist):
            fh.write(f"{t:.17g},{d:.17g}\n")


def run_correlation(cfg):
    taus = np.arange(0.0, cfg.tau_max + 0.5 * cfg.d_tau, cfg.d_tau)
    corr = thermal_equilibrium_correlation(cfg.bath, cfg.sil, cfg.t_bar, taus,
                                           n_samples=cfg.samples, seed=cfg.seed)
    with open(cfg.output, "w") as fh:
        for key, value in cfg.header_params().items():
            fh.write(f"# {key} = {value}\n")
        fh.write("tau,re_c,im_c\n")
        for t, c in zip(corr.tau, corr.values):
            fh.write(f"{t:.17g},{c.real:.17g},{c.imag:.17g}\n")


def run_onsager_sweep(cfg, workers):
    alphas = cfg.alpha_grid or (cfg.bath.alpha,)
    rows = []
    for alpha in alphas:
        src = _onsager_source(cfg, alpha)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            mats = list(pool.map(src, cfg.omega_grid))
        rows.extend((alpha, w, L) for w, L in zip(cfg.omega_grid, mats))
    with open(cfg.output, "w") as fh:
        for key, value in cfg.header_params().items():
            fh.write(f"# {key} = {value}\n")
        fh.write("alpha,omega,L11,L12,L21,L22,provenance\n")
        for alpha, w, L in rows:
            fh.write(f"{alpha:.17g},{w:.17g},{L.l11:.17g},{L.l12:.17g},"
                     f"{L.l21:.17g},{L.l22:.17g},{L.provenance}\n")


def run_tur_sweep(cfg, workers):
    alphas = cfg.alpha_grid or (cfg.bath.alpha,)
    omegas = np.asarray(cfg.omega_grid)
    header = cfg.header_params()
    all_points = []
    for alpha in alphas:
        src = _onsager_source(cfg, alpha)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                mats = list(pool.map(src, omegas))
            cached = dict(zip(omegas, mats))
            source = lambda w: cached[w]
        else:
            source = src
        pts = sweep_tur(source, omegas, cfg.drive.eps2, cfg.bath.beta)
        all_points.extend((alpha, p) for p in pts)
    with open(cfg.output, "w") as fh:
        for key, value in header.items():
            fh.write(f"# {key} = {value}\n")
        fh.write("alpha,omega,sigma,Q,V_dyn,ratio,static_violation,"
                 "dynamic_violation,singular\n")
        for alpha, p in all_points:
            fh.write(f"{alpha:.17g},{p.omega:.17g},{p.sigma:.17g},{p.q:.17g},"
                     f"{p.v_dyn:.17g},{p.ratio_dyn:.17g},"
                     f"{int(p.static_violation)},{int(p.dynamic_violation)},"
                     f"{int(p.singular)}\n")


def cmd_run(args):
    mapping = _load_mapping(args)
    cfg = ExperimentConfig.from_mapping(mapping)
    if getattr(args, "full", False):
        _estimate(mapping, file=sys.stderr)
    workers = _worker_count(args)
    if cfg.mode == "trajectory":
        run_trajectory(cfg)
    elif cfg.mode == "witness":
        run_witness(cfg)
    elif cfg.mode == "correlation":
        run_correlation(cfg)
    elif cfg.mode == "onsager_sweep":
        run_onsager_sweep(cfg, workers)
    elif cfg.mode == "tur_sweep":
        run_tur_sweep(cfg, workers)
    print("wrote %s" % cfg.output)
    return 0


def cmd_validate(args):
    mapping = _load_mapping(args)
    m = dict(DEFAULTS)
    m.update(mapping)
    findings = validate_mapping(m)
    for f in findings:
        print(f)
    if any(f.level == "error" for f in findings):
        return 1
    print("ok")
    return 0


def cmd_presets(args):
    for name in sorted(PRESETS):
        print("%-6s %s" % (name, PRESET_NOTES[name]))
    return 0


def cmd_estimate(args):
    mapping = _load_mapping(args)
    _estimate(mapping)
    return 0


def _add_common(p):
    p.add_argument("--preset", help="named preset (see 'presets')")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--full", action="store_true",
                   help="full-scale bath (m_mod=220, n_ph=3); prints a memory "
                        "estimate first")
    p.add_argument("--workers", type=int, default=0,
                   help="sweep worker count (default: SPINBOSON_WORKERS or 1)")
    p.add_argument("override", nargs="*", metavar="key=value",
                   help="dotted-path overrides, e.g. bath.alpha=0.2")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="spinboson",
        description="Driven spin-boson work-to-work converter toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("run", cmd_run), ("validate", cmd_validate),
                     ("presets", cmd_presets), ("estimate", cmd_estimate)):
        p = sub.add_parser(name)
        _add_common(p)
        p.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, FileNotFoundError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failures from the numeric modules
        print("runtime error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
