import math

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.optimize import curve_fit

from spinboson.analytic import delta_eff
from spinboson.bath import BathSpec, discretize_bath
from spinboson.basis import enumerate_basis
from spinboson.operators import DriveSpec, apply_operator, expectation, initial_state
from spinboson.sil import (
    SilConfig,
    StateVector,
    ToleranceError,
    default_dt,
    lanczos_step,
    load_checkpoint,
    propagate,
    save_checkpoint,
    sil_step,
    two_time_correlator,
)


def make(m_mod=3, n_ph=2, alpha=0.1, omega_c=10.0):
    spec = BathSpec(alpha=alpha, omega_c=omega_c, m_mod=m_mod, n_ph=n_ph)
    modes = discretize_bath(spec)
    basis = enumerate_basis(spec, modes)
    return spec, modes, basis


def dense_h(basis, modes, drive, t):
    d = basis.dim
    h = np.zeros((d, d), dtype=complex)
    eye = np.eye(d, dtype=complex)
    for j in range(d):
        h[:, j] = apply_operator(basis, "h_total", eye[:, j], modes, drive, t)
    return h


def test_default_dt():
    assert default_dt() == 0.005
    fast = DriveSpec(eps1=0.0, eps2=0.0, omega=500.0)
    assert default_dt(fast) == pytest.approx(2 * math.pi / 500.0 / 200.0)


def test_sil_config_validation():
    with pytest.raises(ValueError):
        SilConfig(dt=0.0)
    with pytest.raises(ValueError):
        SilConfig(dt=0.01, krylov_dim=1)
    with pytest.raises(ValueError):
        SilConfig(dt=0.01, krylov_dim=65)


def test_lanczos_matches_dense_exponential():
    # time-independent H, krylov_dim >= dim: the step is exact
    spec, modes, basis = make(m_mod=2, n_ph=1)
    h = dense_h(basis, modes, None, 0.0)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    psi /= np.linalg.norm(psi)
    dt = 0.1
    exact = expm(-1j * h * dt) @ psi
    # at full dimension the last-coefficient error estimate is a genuine
    # component of the state, so lift the tolerance out of the way
    got, err, breakdown = lanczos_step(
        lambda v: h @ v, psi, dt, krylov_dim=basis.dim, tolerance=10.0
    )
    assert np.allclose(got, exact, atol=1e-10)


def test_lanczos_breakdown_on_eigenstate():
    spec, modes, basis = make(m_mod=2, n_ph=1)
    h = dense_h(basis, modes, None, 0.0)
    evals, evecs = np.linalg.eigh(h)
    psi = evecs[:, 0].astype(complex)
    got, err, breakdown = lanczos_step(
        lambda v: h @ v, psi, 0.05, krylov_dim=8, tolerance=1e-6
    )
    assert breakdown
    phase = np.exp(-1j * evals[0] * 0.05)
    assert np.allclose(got, phase * psi, atol=1e-10)


def test_lanczos_tolerance_error():
    spec, modes, basis = make()
    h = dense_h(basis, modes, None, 0.0)
    rng = np.random.default_rng(1)
    psi = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    psi /= np.linalg.norm(psi)
    with pytest.raises(ToleranceError):
        lanczos_step(lambda v: h @ v, psi, 50.0, krylov_dim=3, tolerance=1e-12)


def test_sil_vs_dense_time_ordered_oracle():
    # driven H(t): compare against a midpoint-exponential product at a much
    # finer step
    spec, modes, basis = make(m_mod=3, n_ph=2)
    drive = DriveSpec(eps1=-1.0, eps2=0.5, omega=5.0)
    cfg = SilConfig(dt=0.01, krylov_dim=12)
    psi = StateVector(initial_state(basis, "plus"), 0.0)
    for _ in range(20):
        psi = sil_step(basis, modes, drive, cfg, psi)

    fine = 0.01 / 100
    ref = initial_state(basis, "plus")
    t = 0.0
    for _ in range(2000):
        h = dense_h(basis, modes, drive, t + fine / 2)
        ref = expm(-1j * h * fine) @ ref
        t += fine
    overlap = abs(np.vdot(ref, psi.amplitudes))
    assert overlap >= 1.0 - 1e-8


def test_norm_conservation_long_run():
    spec, modes, basis = make(m_mod=3, n_ph=2)
    drive = DriveSpec(eps1=-1.0, eps2=0.5, omega=5.0)
    cfg = SilConfig(dt=0.005)
    traj = propagate(
        basis, modes, drive, cfg,
        StateVector(initial_state(basis, "plus"), 0.0), 50.0,
        observables={"norm": lambda a, t: np.linalg.norm(a)},
        sample_every=100,
    )
    assert np.max(np.abs(traj.observables["norm"] - 1.0)) < 1e-8


def test_uncoupled_rabi_oscillation():
    # alpha=0, no bias: <sigma_z>(t) = cos(Delta t) with Delta = 1
    spec, modes, basis = make(alpha=0.0)
    cfg = SilConfig(dt=0.005)
    traj = propagate(
        basis, modes, None, cfg,
        StateVector(initial_state(basis, "plus"), 0.0), 10.0,
        observables={"sz": lambda a, t: expectation(basis, "sigma_z", a)},
        sample_every=20,
    )
    assert np.max(np.abs(traj.observables["sz"] - np.cos(traj.times))) < 1e-6


def test_stationary_state_constant_observables():
    # x+ (x) vacuum with alpha=0 is the H eigenstate: sigma_x stays 1
    spec, modes, basis = make(alpha=0.0)
    cfg = SilConfig(dt=0.01)
    traj = propagate(
        basis, modes, None, cfg,
        StateVector(initial_state(basis, "x+"), 0.0), 5.0,
        observables={"sx": lambda a, t: expectation(basis, "sigma_x", a)},
        sample_every=50,
    )
    assert np.max(np.abs(traj.observables["sx"] - 1.0)) < 1e-9


@pytest.mark.slow
def test_renormalized_tunneling_frequency():
    # undriven decay of <sigma_z> oscillates at Delta_eff(alpha, omega_c)
    spec, modes, basis = make(m_mod=60, n_ph=2, alpha=0.1)
    cfg = SilConfig(dt=0.01)
    traj = propagate(
        basis, modes, None, cfg,
        StateVector(initial_state(basis, "plus"), 0.0), 22.0,
        observables={"sz": lambda a, t: expectation(basis, "sigma_z", a)},
        sample_every=4,
    )
    mask = traj.times >= 1.0
    t, y = traj.times[mask], traj.observables["sz"][mask]

    def damped(t, a, g, w, ph):
        return a * np.exp(-g * t) * np.cos(w * t + ph)

    popt, _ = curve_fit(damped, t, y, p0=[1.0, 0.2, 0.9, 0.0])
    w_fit = abs(popt[2])
    assert w_fit == pytest.approx(delta_eff(10.0, 0.1), rel=0.05)


def test_two_time_correlator_identity_and_free():
    spec, modes, basis = make(alpha=0.0)
    cfg = SilConfig(dt=0.01)
    taus = np.arange(0.0, 1.001, 0.1)
    psi0 = StateVector(initial_state(basis, "x+"), 0.0)
    ones = two_time_correlator(
        basis, modes, None, cfg, psi0, "identity", "identity", 2.0, taus
    )
    assert np.allclose(ones, 1.0, atol=1e-8)
    # x+ is the alpha=0 ground state with energy -1/2, and sigma_z flips it
    # to x- at +1/2, so <sigma_z(t) sigma_z(t-tau)> = exp(-i tau)
    c = two_time_correlator(
        basis, modes, None, cfg, psi0, "sigma_z", "sigma_z", 2.0, taus
    )
    assert np.max(np.abs(c - np.exp(-1j * taus))) < 1e-6


def test_two_time_correlator_vs_dense():
    spec, modes, basis = make(m_mod=3, n_ph=2)
    drive = DriveSpec(eps1=0.3, eps2=-0.4, omega=2.0, phi=0.2)
    cfg = SilConfig(dt=0.01)
    taus = np.array([0.0, 0.25, 0.5])
    t = 1.0
    psi0 = StateVector(initial_state(basis, "plus"), 0.0)
    got = two_time_correlator(
        basis, modes, drive, cfg, psi0, "sigma_z", "sigma_z", t, taus
    )

    # dense time-ordered reference at a finer substep
    fine = 0.001
    n = int(round(t / fine))
    us = []  # cumulative propagators to each fine time
    u = np.eye(basis.dim, dtype=complex)
    us.append(u.copy())
    for k in range(n):
        h = dense_h(basis, modes, drive, (k + 0.5) * fine)
        u = expm(-1j * h * fine) @ u
        us.append(u.copy())
    sz = np.diag([(-1.0) ** (i % 2) for i in range(basis.dim)])
    psi = initial_state(basis, "plus")
    ref = []
    for tau in taus:
        kp = int(round((t - tau) / fine))
        phi = us[n] @ np.linalg.inv(us[kp]) @ sz @ us[kp] @ psi
        ref.append(np.vdot(us[n] @ psi, sz @ phi))
    assert np.max(np.abs(got - np.array(ref))) < 1e-7


def test_two_time_correlator_grid_checks():
    spec, modes, basis = make()
    cfg = SilConfig(dt=0.01)
    psi0 = StateVector(initial_state(basis, "plus"), 0.0)
    with pytest.raises(ValueError, match="grid"):
        two_time_correlator(
            basis, modes, None, cfg, psi0, "sigma_z", "sigma_z", 1.0,
            np.array([0.005]),
        )
    with pytest.raises(ValueError):
        two_time_correlator(
            basis, modes, None, cfg, psi0, "sigma_z", "sigma_z", 1.0,
            np.array([-0.1]),
        )
    with pytest.raises(ValueError):
        two_time_correlator(
            basis, modes, None, cfg, psi0, "sigma_z", "sigma_z", 1.0,
            np.array([2.0]),
        )


def test_time_reversal_round_trip():
    spec, modes, basis = make()
    h = dense_h(basis, modes, None, 0.0)
    rng = np.random.default_rng(4)
    psi = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    psi /= np.linalg.norm(psi)
    fwd, _, _ = lanczos_step(lambda v: h @ v, psi, 0.05, 20, 1e-8)
    back, _, _ = lanczos_step(lambda v: h @ v, fwd, -0.05, 20, 1e-8)
    assert np.allclose(back, psi, atol=1e-9)


def test_step_size_self_convergence():
    spec, modes, basis = make()
    drive = DriveSpec(eps1=-1.0, eps2=0.5, omega=5.0)
    psi0 = StateVector(initial_state(basis, "plus"), 0.0)

    def final_state(dt):
        cfg = SilConfig(dt=dt)
        psi = psi0
        for _ in range(int(round(2.0 / dt))):
            psi = sil_step(basis, modes, drive, cfg, psi)
        return psi.amplitudes

    coarse = final_state(0.02)
    fine = final_state(0.005)
    finer = final_state(0.00125)
    err_c = np.linalg.norm(coarse - finer)
    err_f = np.linalg.norm(fine - finer)
    # midpoint stepping is second order: 4x finer step, >= ~8x smaller error
    assert err_f < err_c / 8.0
    assert err_f < 1e-5


def test_checkpoint_round_trip(tmp_path):
    spec, modes, basis = make()
    rng = np.random.default_rng(5)
    amp = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    psi = StateVector(amp, 3.25)
    path = tmp_path / "state.ckpt"
    save_checkpoint(path, basis, psi)
    loaded = load_checkpoint(path, basis)
    assert loaded.t == 3.25
    assert np.array_equal(loaded.amplitudes, amp)


def test_checkpoint_fingerprint_mismatch(tmp_path):
    spec, modes, basis = make()
    other = enumerate_basis(BathSpec(alpha=0.2, omega_c=10.0, m_mod=3, n_ph=2))
    psi = StateVector(np.zeros(basis.dim, dtype=complex), 0.0)
    path = tmp_path / "state.ckpt"
    save_checkpoint(path, basis, psi)
    with pytest.raises(ValueError, match="fingerprint"):
        load_checkpoint(path, other)
    (tmp_path / "junk.ckpt").write_bytes(b"not a checkpoint")
    with pytest.raises(ValueError, match="not a SIL checkpoint"):
        load_checkpoint(tmp_path / "junk.ckpt", basis)


def test_propagate_checkpoint_every():
    spec, modes, basis = make()
    cfg = SilConfig(dt=0.01)
    traj = propagate(
        basis, modes, None, cfg,
        StateVector(initial_state(basis, "plus"), 0.0), 0.1,
        checkpoint_every=5,
    )
    assert [c.t for c in traj.checkpoints] == pytest.approx([0.0, 0.05, 0.1])
