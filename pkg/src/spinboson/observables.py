"""Physical quantities along trajectories: channel powers, energy balance,
period averages, power fluctuations, the reduced TLS state and the
trace-distance non-Markovianity witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import expectation


class SteadyStateError(RuntimeError):
    """Requested window does not lie in the detected steady state."""


class UndecayedCorrelatorError(RuntimeError):
    """Two-time correlator tail above tolerance at the end of the tau grid."""


@dataclass
class PowerRecord:
    """One sampled row of the energy bookkeeping time series."""

    t: float
    p1: float
    p2: float
    e_s: float
    e_b: float
    e_sb: float
    sigma_z: float


CSV_COLUMNS = ("t", "P1", "P2", "dE_S", "dE_B", "dE_SB", "sigma_z")


def channel_power(basis, drive, psi, i, t):
    """<P_i(t)> = -(1/2) deps_i/dt * <sigma_z>."""
    if i not in (1, 2):
        raise ValueError(f"channel must be 1 or 2, got {i}")
    return -0.5 * drive.deps_dt(i, t) * expectation(basis, "sigma_z", psi)


def standard_observables(basis, modes, drive):
    """Observable callables for energy-balance trajectories."""
    return {
        "sigma_z": lambda psi, t: expectation(basis, "sigma_z", psi),
        "P1": lambda psi, t: channel_power(basis, drive, psi, 1, t),
        "P2": lambda psi, t: channel_power(basis, drive, psi, 2, t),
        "E_S": lambda psi, t: expectation(basis, "h_s", psi, modes, drive, t),
        "E_B": lambda psi, t: expectation(basis, "h_b", psi, modes),
        "E_SB": lambda psi, t: expectation(basis, "h_sb", psi, modes),
    }


def period_average(times, values, window_start, period):
    """Trapezoidal average of a sampled signal over one drive period."""
    times = np.asarray(times)
    values = np.asarray(values)
    end = window_start + period
    if window_start < times[0] - 1e-9 or end > times[-1] + 1e-9:
        raise ValueError("averaging window outside the sampled range")
    mask = (times >= window_start - 1e-9) & (times <= end + 1e-9)
    t_w, v_w = times[mask], values[mask]
    return float(np.trapezoid(v_w, t_w) / (t_w[-1] - t_w[0]))


def detect_steady_state(times, p1, p2, period, rel_tol=1e-3, t_floor=0.0):
    """Earliest window start where period-averaged powers have stabilized.

    Successive-period averages of P1 and P2 must change by less than rel_tol
    (relative to the total injected scale), with a hard floor on the start
    time.  Raises SteadyStateError if no window qualifies.
    """
    times = np.asarray(times)
    start = max(t_floor, times[0])
    scale = max(np.max(np.abs(p1)), np.max(np.abs(p2)), 1e-30)
    while start + 2.0 * period <= times[-1] + 1e-9:
        a1 = period_average(times, p1, start, period)
        b1 = period_average(times, p1, start + period, period)
        a2 = period_average(times, p2, start, period)
        b2 = period_average(times, p2, start + period, period)
        if abs(b1 - a1) <= rel_tol * scale and abs(b2 - a2) <= rel_tol * scale:
            return start
        start += period
    raise SteadyStateError(
        f"no steady-state window found in [{times[0]}, {times[-1]}] "
        f"(period {period}, floor {t_floor})"
    )


def power_fluctuations(b_func, drive, i, tau_grid, n_t=64, decay_tol=1e-4):
    """Time-averaged power fluctuations from a two-time correlator.

    D_i = (1/2T) int_0^T dt deps_i(t) int_0^inf dtau deps_i(t - tau) B(t, t-tau)

    b_func(t, tau) returns the connected symmetrized sigma_z correlator
    B(t, t - tau).  The tau grid must reach the point where |B| has decayed
    below decay_tol of its peak.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    period = drive.period
    t_grid = np.linspace(0.0, period, n_t + 1)
    b_matrix = np.array([[b_func(t, tau) for tau in tau_grid] for t in t_grid])
    peak = np.max(np.abs(b_matrix))
    ntail = max(2, len(tau_grid) // 20)
    tail = np.max(np.abs(b_matrix[:, -ntail:]))
    if peak > 0 and tail > decay_tol * peak:
        raise UndecayedCorrelatorError(
            f"correlator tail {tail:.3e} above {decay_tol:.1e} of peak "
            f"{peak:.3e} at tau={tau_grid[-1]}; extend the tau grid"
        )
    eps_dot_t = np.array([drive.deps_dt(i, t) for t in t_grid])
    inner = np.array(
        [
            np.trapezoid(
                [drive.deps_dt(i, t - tau) for tau in tau_grid] * b_matrix[j],
                tau_grid,
            )
            for j, t in enumerate(t_grid)
        ]
    )
    return float(np.trapezoid(eps_dot_t * inner, t_grid) / (2.0 * period))


# ---------------------------------------------------------------------------
# reduced TLS state and trace distance

def reduce_state(psi, basis):
    """2x2 reduced density matrix of the TLS (partial trace over the bath)."""
    m = np.asarray(psi).reshape(basis.n_bath, 2)
    # rho[s, s'] = sum_b psi[b, s] conj(psi[b, s'])
    return m.T @ np.conj(m)


def trace_distance(rho1, rho2):
    """Half the sum of the singular values of rho1 - rho2; in [0, 1]."""
    diff = np.asarray(rho1) - np.asarray(rho2)
    return float(0.5 * np.sum(np.linalg.svd(diff, compute_uv=False)))


def purity(rho):
    return float(np.real(np.trace(rho @ rho)))


def witness_measure(times, distances):
    """Integrated positive derivative of the trace distance (information
    backflow measure); reported alongside the raw series.
    """
    d = np.diff(np.asarray(distances))
    return float(np.sum(d[d > 0.0]))


# ---------------------------------------------------------------------------
# CSV emission

def write_power_csv(path, records, header_params=None):
    """Write PowerRecord rows with a parameter header block.

    Energy columns are emitted as variations relative to the first sample.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    e_s0, e_b0, e_sb0 = records[0].e_s, records[0].e_b, records[0].e_sb
    with open(path, "w") as fh:
        for key, value in (header_params or {}).items():
            fh.write(f"# {key} = {value}\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in records:
            row = (
                r.t, r.p1, r.p2, r.e_s - e_s0, r.e_b - e_b0, r.e_sb - e_sb0,
                r.sigma_z,
            )
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def records_from_trajectory(traj):
    """PowerRecord list from a trajectory with standard_observables."""
    obs = traj.observables
    return [
        PowerRecord(
            t=float(t), p1=obs["P1"][i], p2=obs["P2"][i], e_s=obs["E_S"][i],
            e_b=obs["E_B"][i], e_sb=obs["E_SB"][i], sigma_z=obs["sigma_z"][i],
        )
        for i, t in enumerate(traj.times)
    ]
