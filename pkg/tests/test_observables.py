import math

import numpy as np
import pytest

from spinboson.bath import BathSpec, discretize_bath
from spinboson.basis import enumerate_basis
from spinboson.observables import (
    CSV_COLUMNS,
    SteadyStateError,
    UndecayedCorrelatorError,
    channel_power,
    detect_steady_state,
    period_average,
    power_fluctuations,
    purity,
    records_from_trajectory,
    reduce_state,
    standard_observables,
    trace_distance,
    witness_measure,
    write_power_csv,
)
from spinboson.operators import DriveSpec, initial_state
from spinboson.sil import SilConfig, StateVector, propagate


def make(m_mod=3, n_ph=2, alpha=0.1):
    spec = BathSpec(alpha=alpha, omega_c=10.0, m_mod=m_mod, n_ph=n_ph)
    modes = discretize_bath(spec)
    basis = enumerate_basis(spec, modes)
    return spec, modes, basis


def test_channel_power_signs_and_zeros():
    spec, modes, basis = make()
    psi = initial_state(basis, "plus")  # <sigma_z> = 1
    drv = DriveSpec(eps1=1.0, eps2=0.0, omega=2.0)
    # P1 = -(1/2) eps1 omega cos(omega t) <sigma_z>
    assert channel_power(basis, drv, psi, 1, 0.0) == pytest.approx(-1.0)
    assert channel_power(basis, drv, psi, 2, 0.0) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        channel_power(basis, drv, psi, 3, 0.0)


def test_period_average_constant_and_sinusoid():
    t = np.linspace(0.0, 4.0, 4001)
    assert period_average(t, np.full_like(t, 2.5), 1.0, 2.0) == pytest.approx(2.5)
    period = 2 * math.pi / 3.0
    v = np.sin(3.0 * t)
    # window endpoints snap to the sample grid, so only grid-level accuracy
    assert period_average(t, v, 0.5, period) == pytest.approx(0.0, abs=1e-3)
    with pytest.raises(ValueError):
        period_average(t, v, 3.5, 2.0)


def test_detect_steady_state():
    period = 1.0
    t = np.linspace(0.0, 20.0, 2001)
    transient = np.exp(-t) * 0.5
    p1 = np.sin(2 * math.pi * t) + transient
    p2 = -np.cos(2 * math.pi * t) - transient
    start = detect_steady_state(t, p1, p2, period, rel_tol=1e-3)
    assert 0.0 <= start <= 10.0
    with pytest.raises(SteadyStateError):
        detect_steady_state(t, t, -t, period, rel_tol=1e-9)


def test_energy_balance_on_small_run():
    # d<H_total>/dt should equal P1 + P2 along the trajectory
    spec, modes, basis = make()
    drv = DriveSpec(eps1=-1.0, eps2=0.5, omega=5.0)
    cfg = SilConfig(dt=0.002)
    obs = standard_observables(basis, modes, drv)
    traj = propagate(
        basis, modes, drv, cfg,
        StateVector(initial_state(basis, "plus"), 0.0), 2.0,
        observables=obs, sample_every=1,
    )
    e_tot = (
        traj.observables["E_S"]
        + traj.observables["E_B"]
        + traj.observables["E_SB"]
    )
    dedt = np.gradient(e_tot, traj.times)
    p_tot = traj.observables["P1"] + traj.observables["P2"]
    # ignore the grid edges where np.gradient is one-sided
    err = np.max(np.abs((dedt - p_tot)[2:-2]))
    assert err < 5e-4 * max(1.0, np.max(np.abs(p_tot)))


def test_power_fluctuations_zero_drive_and_tail_check():
    drv = DriveSpec(eps1=0.0, eps2=0.0, omega=2.0)
    taus = np.linspace(0.0, 5.0, 201)
    d = power_fluctuations(lambda t, tau: math.exp(-2.0 * tau), drv, 1, taus)
    assert d == 0.0
    live = DriveSpec(eps1=1.0, eps2=0.0, omega=2.0)
    with pytest.raises(UndecayedCorrelatorError):
        power_fluctuations(lambda t, tau: 1.0, live, 1, taus)


def test_power_fluctuations_analytic_case():
    # stationary exponential correlator B(tau) = e^{-g tau} with a pure
    # sinusoidal drive: D = (eps w)^2/4 * g/(g^2 + w^2)
    g, w, eps = 2.0, 3.0, 0.7
    drv = DriveSpec(eps1=eps, eps2=0.0, omega=w)
    taus = np.linspace(0.0, 12.0, 3001)
    d = power_fluctuations(
        lambda t, tau: math.exp(-g * tau), drv, 1, taus, n_t=256
    )
    expected = (eps * w) ** 2 / 4.0 * g / (g**2 + w**2)
    assert d == pytest.approx(expected, rel=1e-3)


def test_reduce_state_product_and_entangled():
    spec, modes, basis = make(m_mod=2, n_ph=1)
    psi = initial_state(basis, "x+")
    rho = reduce_state(psi, basis)
    assert np.trace(rho) == pytest.approx(1.0)
    assert purity(rho) == pytest.approx(1.0)
    assert rho[0, 1] == pytest.approx(0.5)
    # Bell-like state across TLS and one bath excitation: maximally mixed TLS
    psi = np.zeros(basis.dim, dtype=complex)
    psi[basis.index(0, ())] = 1 / math.sqrt(2)
    psi[basis.index(1, ((0, 1),))] = 1 / math.sqrt(2)
    rho = reduce_state(psi, basis)
    assert purity(rho) == pytest.approx(0.5)
    assert rho[0, 0] == pytest.approx(0.5)
    assert abs(rho[0, 1]) < 1e-14


def test_trace_distance_properties():
    rho_a = np.diag([1.0, 0.0])
    rho_b = np.diag([0.0, 1.0])
    assert trace_distance(rho_a, rho_a) == 0.0
    assert trace_distance(rho_a, rho_b) == pytest.approx(1.0)
    rho_c = np.array([[0.5, 0.5], [0.5, 0.5]])
    dab = trace_distance(rho_a, rho_b)
    dac = trace_distance(rho_a, rho_c)
    dcb = trace_distance(rho_c, rho_b)
    assert dab <= dac + dcb + 1e-12


def test_witness_measure():
    t = np.arange(5.0)
    assert witness_measure(t, [1.0, 0.8, 0.6, 0.4, 0.2]) == 0.0
    assert witness_measure(t, [0.5, 0.3, 0.45, 0.2, 0.3]) == pytest.approx(0.25)


def test_witness_decay_qualitative():
    # distinguishability of y+/y- pairs decays under coupling to the bath
    spec, modes, basis = make(m_mod=10, n_ph=2)
    drv = DriveSpec(eps1=0.5, eps2=0.5, omega=math.pi)
    cfg = SilConfig(dt=0.01)
    rho_obs = {"rho": lambda a, t: reduce_state(a, basis)}
    runs = {}
    for tag in ("y+", "y-"):
        runs[tag] = propagate(
            basis, modes, drv, cfg,
            StateVector(initial_state(basis, tag), 0.0), 12.0,
            observables=rho_obs, sample_every=10,
        )
    dist = np.array(
        [
            trace_distance(a, b)
            for a, b in zip(
                runs["y+"].observables["rho"], runs["y-"].observables["rho"]
            )
        ]
    )
    assert dist[0] == pytest.approx(1.0)
    assert np.mean(dist[-10:]) < 0.8 * np.max(dist)


def test_csv_round_trip(tmp_path):
    spec, modes, basis = make()
    drv = DriveSpec(eps1=-1.0, eps2=0.5, omega=5.0)
    cfg = SilConfig(dt=0.01)
    traj = propagate(
        basis, modes, drv, cfg,
        StateVector(initial_state(basis, "plus"), 0.0), 0.2,
        observables=standard_observables(basis, modes, drv), sample_every=2,
    )
    records = records_from_trajectory(traj)
    path = tmp_path / "power.csv"
    write_power_csv(path, records, header_params={"alpha": 0.1})
    lines = path.read_text().splitlines()
    assert lines[0] == "# alpha = 0.1"
    assert lines[1] == ",".join(CSV_COLUMNS)
    data = np.array([[float(x) for x in l.split(",")] for l in lines[2:]])
    assert data.shape == (len(records), len(CSV_COLUMNS))
    assert np.allclose(data[:, 0], traj.times)
    # energy columns are variations: first row zeros
    assert np.allclose(data[0, 3:6], 0.0)
    assert data[0, 6] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        write_power_csv(tmp_path / "empty.csv", [])
