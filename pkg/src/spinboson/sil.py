"""Short Iterative Lanczos propagation with midpoint Hamiltonian evaluation.

Each step projects H(t + dt/2) onto the Krylov space built from the current
state, exponentiates the projected tridiagonal matrix exactly and applies the
projected propagator.  Two-time correlators are evaluated with synchronized
propagations of the state and of the operator-kicked companion vectors.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .operators import apply_hamiltonian, apply_operator

#: relative norm below which a new Krylov vector signals an invariant subspace
BREAKDOWN_THRESHOLD = 1e-12


class ToleranceError(RuntimeError):
    """Per-step Krylov truncation error above the configured tolerance."""


@dataclass(frozen=True)
class SilConfig:
    dt: float
    krylov_dim: int = 12
    reorthogonalize: bool = True
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not 2 <= self.krylov_dim <= 64:
            raise ValueError(f"krylov_dim must be in [2, 64], got {self.krylov_dim}")


@dataclass
class StateVector:
    amplitudes: np.ndarray
    t: float = 0.0

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class Trajectory:
    times: np.ndarray
    observables: dict
    checkpoints: list = field(default_factory=list)


def default_dt(drive=None):
    """Step resolving both the tunneling scale and the drive period."""
    dt = 0.005
    if drive is not None:
        dt = min(dt, drive.period / 200.0)
    return dt


def lanczos_step(matvec, psi, dt, krylov_dim, tolerance, reorthogonalize=True):
    """Propagate psi by exp(-i H dt) projected on the Krylov space of H.

    Returns (new_psi, err_estimate, breakdown).  The error estimate is the
    modulus of the propagated coefficient on the last Krylov vector.
    """
    n = krylov_dim
    dim = psi.size
    V = np.empty((n, dim), dtype=complex)
    alphas = np.empty(n)
    betas = np.empty(n - 1)
    V[0] = psi
    breakdown = False
    m = n
    w = None
    for j in range(n):
        w = matvec(V[j])
        if j > 0:
            w -= betas[j - 1] * V[j - 1]
        a = np.vdot(V[j], w).real
        alphas[j] = a
        if j == n - 1:
            break
        w -= a * V[j]
        if reorthogonalize:
            # one full Gram-Schmidt pass against all previous vectors
            w -= V[: j + 1].T @ (np.conj(V[: j + 1]) @ w)
        b = np.linalg.norm(w)
        if b < BREAKDOWN_THRESHOLD * max(1.0, abs(a)):
            breakdown = True
            m = j + 1
            break
        betas[j] = b
        V[j + 1] = w / b

    evals, evecs = eigh_tridiagonal(alphas[:m], betas[: m - 1])
    phase = np.exp(-1j * evals * dt)
    # coefficients of the propagated state in the Krylov basis
    coeff = evecs @ (phase * evecs[0, :].conj())
    new_psi = V[:m].T @ coeff
    err = 0.0 if breakdown else abs(coeff[-1])
    if err > tolerance:
        raise ToleranceError(
            f"Krylov truncation error {err:.3e} exceeds tolerance {tolerance:.3e}; "
            "reduce dt or increase krylov_dim"
        )
    # the projected propagator is unitary; renormalize away round-off only
    new_psi /= np.linalg.norm(new_psi)
    return new_psi, err, breakdown


def sil_step(basis, modes, drive, cfg: SilConfig, psi: StateVector) -> StateVector:
    """One SIL step at the midpoint Hamiltonian H(t + dt/2)."""
    tm = psi.t + 0.5 * cfg.dt

    def matvec(v):
        return apply_hamiltonian(basis, modes, drive, tm, v)

    new_amp, _, _ = lanczos_step(
        matvec, psi.amplitudes, cfg.dt, cfg.krylov_dim, cfg.tolerance,
        cfg.reorthogonalize,
    )
    return StateVector(new_amp, psi.t + cfg.dt)


def propagate(
    basis,
    modes,
    drive,
    cfg: SilConfig,
    psi0: StateVector,
    t_final,
    observables=None,
    sample_every=1,
    checkpoint_every=None,
) -> Trajectory:
    """Step from psi0.t to t_final, sampling observables on a uniform grid.

    observables maps names to callables f(psi_array, t).  Sampling happens
    every `sample_every` steps, including the initial state.
    """
    if t_final <= psi0.t:
        raise ValueError("t_final must exceed the initial time")
    observables = observables or {}
    n_steps = int(round((t_final - psi0.t) / cfg.dt))
    times = []
    records = {name: [] for name in observables}
    checkpoints = []
    psi = psi0
    for step in range(n_steps + 1):
        if step % sample_every == 0:
            times.append(psi.t)
            for name, f in observables.items():
                records[name].append(f(psi.amplitudes, psi.t))
        if checkpoint_every and step % checkpoint_every == 0:
            checkpoints.append(StateVector(psi.amplitudes.copy(), psi.t))
        if step == n_steps:
            break
        psi = sil_step(basis, modes, drive, cfg, psi)
    return Trajectory(
        times=np.asarray(times),
        observables={k: np.asarray(v) for k, v in records.items()},
        checkpoints=checkpoints,
    )


def two_time_correlator(basis, modes, drive, cfg, psi0, A, B, t, taus):
    """<A(t) B(t')> for t' = t - tau over the tau grid.

    Implemented as synchronized propagations: phi_j = B|psi(t'_j)> is spawned
    when the trajectory passes t'_j and carried forward to t together with
    psi; the result is <psi(t)|A|phi_j(t)>.  Times t - tau must lie on the
    step grid.
    """
    taus = np.asarray(taus, dtype=float)
    if np.any(taus < 0):
        raise ValueError("tau values must be >= 0")
    if psi0.t > t - np.max(taus):
        raise ValueError("initial time must precede every t - tau")
    t_primes = t - taus
    spawn_steps = {}
    for j, tp in enumerate(t_primes):
        s = (tp - psi0.t) / cfg.dt
        if abs(s - round(s)) > 1e-8:
            raise ValueError("every t - tau must lie on the time-step grid")
        spawn_steps.setdefault(int(round(s)), []).append(j)
    n_steps = int(round((t - psi0.t) / cfg.dt))

    psi = psi0
    companions = {}
    for step in range(n_steps + 1):
        for j in spawn_steps.get(step, ()):
            companions[j] = StateVector(
                apply_operator(basis, B, psi.amplitudes, modes, drive, psi.t),
                psi.t,
            )
        if step == n_steps:
            break
        psi = sil_step(basis, modes, drive, cfg, psi)
        for j, phi in companions.items():
            # companion vectors are not normalized; propagate the direction
            nrm = phi.norm()
            if nrm == 0.0:
                companions[j] = StateVector(phi.amplitudes, phi.t + cfg.dt)
                continue
            unit = StateVector(phi.amplitudes / nrm, phi.t)
            stepped = sil_step(basis, modes, drive, cfg, unit)
            companions[j] = StateVector(stepped.amplitudes * nrm, stepped.t)

    out = np.empty(len(taus), dtype=complex)
    for j in range(len(taus)):
        a_phi = apply_operator(basis, A, companions[j].amplitudes, modes, drive, t)
        out[j] = np.vdot(psi.amplitudes, a_phi)
    return out


_CKPT_MAGIC = b"SILCKPT1"


def save_checkpoint(path, basis, psi: StateVector):
    """Binary checkpoint: header (basis hash, time, dimension) + amplitudes."""
    fp = basis.fingerprint().encode()
    with open(path, "wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(struct.pack("<H", len(fp)))
        fh.write(fp)
        fh.write(struct.pack("<dq", psi.t, psi.amplitudes.size))
        fh.write(np.ascontiguousarray(psi.amplitudes, dtype="<c16").tobytes())


def load_checkpoint(path, basis) -> StateVector:
    with open(path, "rb") as fh:
        magic = fh.read(len(_CKPT_MAGIC))
        if magic != _CKPT_MAGIC:
            raise ValueError(f"{path} is not a SIL checkpoint")
        (fplen,) = struct.unpack("<H", fh.read(2))
        fp = fh.read(fplen).decode()
        if fp != basis.fingerprint():
            raise ValueError("checkpoint basis fingerprint does not match")
        t, dim = struct.unpack("<dq", fh.read(16))
        if dim != basis.dim:
            raise ValueError("checkpoint dimension does not match basis")
        amp = np.frombuffer(fh.read(16 * dim), dtype="<c16").astype(complex)
    return StateVector(amp, t)
