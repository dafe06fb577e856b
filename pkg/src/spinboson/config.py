"""Experiment configuration: flat key=value files with dotted paths.

A config file is plain text, one ``dotted.key = value`` per line, '#'
comments. Command-line flags override scalars using the same dotted
names. Grids are comma-separated number lists.
"""

import math
from dataclasses import dataclass, field

from .bath import BathSpec
from .operators import DriveSpec
from .sil import SilConfig, default_dt
from .analytic import ALPHA_WARN, ALPHA_REJECT

MODES = ("trajectory", "correlation", "onsager_sweep", "tur_sweep", "witness")
ORACLES = ("sil", "weak_coupling", "toulouse")


class ConfigError(ValueError):
    pass


@dataclass
class Finding:
    level: str   # "error" | "warning"
    field: str
    message: str

    def __str__(self):
        return "%s: %s: %s" % (self.level, self.field, self.message)


def _parse_scalar(text):
    text = text.strip()
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_list(text):
    text = text.strip()
    if not text:
        return ()
    return tuple(float(x) for x in text.split(","))


LIST_KEYS = ("sweep.omega", "sweep.alpha")

DEFAULTS = {
    "mode": "trajectory",
    "oracle": "sil",
    "output": "out.csv",
    "seed": 0,
    "bath.alpha": 0.1,
    "bath.omega_c": 10.0,
    "bath.m_mod": 60,
    "bath.n_ph": 2,
    "bath.beta": math.inf,
    "bath.s": 1.0,
    "drive.eps1": -1.0,
    "drive.eps2": 0.5,
    "drive.omega": 5.0,
    "drive.phi": 0.0,
    "drive.n_ratio": 1,
    "sil.dt": 0.0,          # 0 means use default_dt(drive)
    "sil.krylov_dim": 12,
    "sil.tolerance": 1e-9,
    "run.t_final": 40.0,
    "run.t_bar": 40.0,
    "run.tau_max": 40.0,
    "run.d_tau": 0.02,
    "run.samples": 16,
    "sweep.omega": (),
    "sweep.alpha": (),
}


def parse_config_text(text):
    """Parse key = value lines into a flat dict. Unknown keys are errors."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("line %d: expected key = value, got %r" % (lineno, raw))
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigError("line %d: unknown key %r" % (lineno, key))
        out[key] = _parse_list(val) if key in LIST_KEYS else _parse_scalar(val)
    return out


def apply_overrides(mapping, overrides):
    """Apply dotted-path flag overrides (list of 'key=value' strings)."""
    out = dict(mapping)
    for item in overrides:
        if "=" not in item:
            raise ConfigError("override %r: expected key=value" % item)
        key, _, val = item.partition("=")
        key = key.strip().lstrip("-")
        if key not in DEFAULTS:
            raise ConfigError("override: unknown key %r" % key)
        out[key] = _parse_list(val) if key in LIST_KEYS else _parse_scalar(val)
    return out


@dataclass
class ExperimentConfig:
    mode: str = "trajectory"
    oracle: str = "sil"
    output: str = "out.csv"
    seed: int = 0
    bath: BathSpec = None
    drive: DriveSpec = None
    sil: SilConfig = None
    t_final: float = 40.0
    t_bar: float = 40.0
    tau_max: float = 40.0
    d_tau: float = 0.02
    samples: int = 16
    omega_grid: tuple = ()
    alpha_grid: tuple = ()
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, mapping):
        m = dict(DEFAULTS)
        m.update(mapping)
        findings = validate_mapping(m)
        errors = [f for f in findings if f.level == "error"]
        if errors:
            raise ConfigError("; ".join(str(f) for f in errors))
        bath = BathSpec(alpha=float(m["bath.alpha"]), omega_c=float(m["bath.omega_c"]),
                        m_mod=int(m["bath.m_mod"]), n_ph=int(m["bath.n_ph"]),
                        beta=float(m["bath.beta"]), s=float(m["bath.s"]))
        drive = DriveSpec(eps1=float(m["drive.eps1"]), eps2=float(m["drive.eps2"]),
                          omega=float(m["drive.omega"]), phi=float(m["drive.phi"]),
                          n_ratio=int(m["drive.n_ratio"]))
        dt = float(m["sil.dt"]) or default_dt(drive)
        sil = SilConfig(dt=dt, krylov_dim=int(m["sil.krylov_dim"]),
                        tolerance=float(m["sil.tolerance"]))
        return cls(mode=m["mode"], oracle=m["oracle"], output=m["output"],
                   seed=int(m["seed"]), bath=bath, drive=drive, sil=sil,
                   t_final=float(m["run.t_final"]), t_bar=float(m["run.t_bar"]),
                   tau_max=float(m["run.tau_max"]), d_tau=float(m["run.d_tau"]),
                   samples=int(m["run.samples"]),
                   omega_grid=tuple(m["sweep.omega"]), alpha_grid=tuple(m["sweep.alpha"]),
                   raw=m)

    def header_params(self):
        """Flat parameter dict for CSV provenance headers."""
        from . import __version__
        out = {"version": __version__}
        for k in sorted(self.raw):
            v = self.raw[k]
            if k == "sil.dt" and self.sil is not None:
                v = self.sil.dt
            if isinstance(v, tuple):
                v = ",".join(repr(x) for x in v)
            out[k] = v
        return out


def validate_mapping(m):
    """Return a list of Findings (errors and warnings) for a flat mapping."""
    findings = []
    err = lambda f, msg: findings.append(Finding("error", f, msg))
    warn = lambda f, msg: findings.append(Finding("warning", f, msg))

    mode = m.get("mode")
    if mode not in MODES:
        err("mode", "must be one of %s" % (MODES,))
        return findings
    oracle = m.get("oracle")
    if oracle not in ORACLES:
        err("oracle", "must be one of %s" % (ORACLES,))
        return findings

    alpha = float(m["bath.alpha"])
    if not 0 < alpha <= 1:
        err("bath.alpha", "must lie in (0, 1]")
    if float(m["bath.s"]) != 1.0:
        err("bath.s", "Ohmic only")
    if int(m["drive.n_ratio"]) != 1:
        err("drive.n_ratio", "out of scope: n=1 only")
    if float(m["bath.omega_c"]) <= 0:
        err("bath.omega_c", "must be positive")
    if int(m["bath.m_mod"]) < 1:
        err("bath.m_mod", "must be at least 1")
    if int(m["bath.n_ph"]) < 1:
        err("bath.n_ph", "must be at least 1")
    if float(m["bath.beta"]) <= 0:
        err("bath.beta", "must be positive (may be inf)")

    if oracle == "weak_coupling":
        if alpha >= ALPHA_REJECT:
            err("oracle", "weak-coupling closed forms invalid at alpha=%g "
                "(limit %g)" % (alpha, ALPHA_REJECT))
        elif alpha > ALPHA_WARN:
            warn("oracle", "weak-coupling closed forms degrade above alpha=%g"
                 % ALPHA_WARN)
    if oracle == "toulouse" and alpha != 0.5:
        warn("oracle", "Toulouse forms hold at alpha=0.5; bath.alpha=%g ignored"
             % alpha)
    if oracle == "toulouse" and not math.isfinite(float(m["bath.beta"])):
        err("bath.beta", "Toulouse response requires finite temperature")

    if mode in ("onsager_sweep", "tur_sweep"):
        grid = tuple(m["sweep.omega"])
        if len(grid) == 0:
            err("sweep.omega", "sweep requires a nonempty frequency grid")
        elif any(b <= a for a, b in zip(grid, grid[1:])):
            err("sweep.omega", "grid must be strictly increasing")
        elif grid[0] <= 0:
            err("sweep.omega", "frequencies must be positive")
        agrid = tuple(m["sweep.alpha"])
        if agrid and any(b <= a for a, b in zip(agrid, agrid[1:])):
            err("sweep.alpha", "grid must be strictly increasing")

    if mode in ("trajectory", "witness") and float(m["run.t_final"]) <= 0:
        err("run.t_final", "must be positive")
    if mode == "correlation":
        if float(m["run.tau_max"]) <= 0:
            err("run.tau_max", "must be positive")
        if float(m["run.d_tau"]) <= 0:
            err("run.d_tau", "must be positive")

    dt = float(m["sil.dt"])
    if dt < 0:
        err("sil.dt", "must be positive (or 0 for the default)")
    kd = int(m["sil.krylov_dim"])
    if not 2 <= kd <= 64:
        err("sil.krylov_dim", "must lie in [2, 64]")
    return findings
