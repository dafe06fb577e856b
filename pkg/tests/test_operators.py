import math

import numpy as np
import pytest

from spinboson.bath import BathSpec, discretize_bath
from spinboson.basis import enumerate_basis
from spinboson.operators import (
    OPERATOR_TAGS,
    DriveSpec,
    apply_hamiltonian,
    apply_operator,
    expectation,
    get_bath_operators,
    initial_state,
)


def make(m_mod=3, n_ph=2, alpha=0.1):
    spec = BathSpec(alpha=alpha, omega_c=10.0, m_mod=m_mod, n_ph=n_ph)
    modes = discretize_bath(spec)
    basis = enumerate_basis(spec, modes)
    return spec, modes, basis


def dense(basis, modes, drive, t, which="h_total"):
    d = basis.dim
    out = np.zeros((d, d), dtype=complex)
    eye = np.eye(d, dtype=complex)
    for j in range(d):
        out[:, j] = apply_operator(basis, which, eye[:, j], modes, drive, t)
    return out


def test_drive_spec_fields_and_derivative():
    drv = DriveSpec(eps1=-1.0, eps2=0.5, omega=5.0, phi=0.3)
    assert drv.period == pytest.approx(2 * math.pi / 5.0)
    for i in (1, 2):
        for t in (0.0, 0.17, 1.3):
            h = 1e-6
            fd = (drv.eps(i, t + h) - drv.eps(i, t - h)) / (2 * h)
            assert drv.deps_dt(i, t) == pytest.approx(fd, abs=1e-6)
    assert drv.bias(0.2) == pytest.approx(drv.eps(1, 0.2) + drv.eps(2, 0.2))
    with pytest.raises(ValueError):
        DriveSpec(eps1=0.0, eps2=0.0, omega=0.0)
    with pytest.raises(ValueError):
        DriveSpec(eps1=0.0, eps2=0.0, omega=1.0, n_ratio=0)
    with pytest.raises(ValueError):
        drv.eps(3, 0.0)


def test_single_mode_against_hand_built_matrix():
    # m=1, n_ph=1: bath space {|0>, |1>}, full space dim 4
    spec, modes, basis = make(m_mod=1, n_ph=1)
    w = modes.omega_k[0]
    g = modes.g_k[0]
    drv = DriveSpec(eps1=0.4, eps2=-0.2, omega=2.0, phi=0.1)
    t = 0.37
    bias = drv.bias(t)

    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    i2 = np.eye(2)
    hb_bath = np.diag([0.0, w])
    x_bath = g * sx  # b + b^dag truncated to 2 levels
    # ordering: index = 2*bath + tls, so bath is the slow factor
    h = (
        np.kron(hb_bath, i2)
        + 0.5 * np.kron(x_bath, sz)
        - 0.5 * bias * np.kron(np.eye(2), sz)
        - 0.5 * np.kron(np.eye(2), sx)
    )
    assert np.allclose(dense(basis, modes, drv, t), h, atol=1e-12)


def test_terms_sum_to_total():
    spec, modes, basis = make()
    drv = DriveSpec(eps1=-1.0, eps2=0.5, omega=5.0)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    t = 0.8
    total = apply_operator(basis, "h_total", psi, modes, drv, t)
    parts = sum(
        apply_operator(basis, tag, psi, modes, drv, t)
        for tag in ("h_b", "h_sb", "h_s")
    )
    assert np.allclose(total, parts, atol=1e-12)


def test_hermiticity_all_tags():
    spec, modes, basis = make()
    drv = DriveSpec(eps1=0.3, eps2=0.7, omega=1.5, phi=0.4)
    for tag in OPERATOR_TAGS:
        mat = dense(basis, modes, drv, 0.6, which=tag)
        assert np.max(np.abs(mat - mat.conj().T)) < 1e-12, tag


def test_linearity():
    spec, modes, basis = make()
    rng = np.random.default_rng(1)
    a = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    b = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    lhs = apply_hamiltonian(basis, modes, None, 0.0, 2.0 * a + 1j * b)
    rhs = 2.0 * apply_hamiltonian(
        basis, modes, None, 0.0, a
    ) + 1j * apply_hamiltonian(basis, modes, None, 0.0, b)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_sigma_z_eigenstates():
    spec, modes, basis = make()
    up = initial_state(basis, "plus")
    dn = initial_state(basis, "minus")
    assert expectation(basis, "sigma_z", up) == pytest.approx(1.0)
    assert expectation(basis, "sigma_z", dn) == pytest.approx(-1.0)
    assert expectation(basis, "sigma_x", initial_state(basis, "x+")) == (
        pytest.approx(1.0)
    )
    assert expectation(basis, "identity", up) == pytest.approx(1.0)


def test_coupling_has_no_vacuum_diagonal():
    spec, modes, basis = make()
    psi = initial_state(basis, "x+")
    assert expectation(basis, "h_sb", psi, modes=modes) == pytest.approx(0.0)
    assert expectation(basis, "h_b", psi, modes=modes) == pytest.approx(0.0)


def test_no_drive_means_zero_bias():
    spec, modes, basis = make()
    rng = np.random.default_rng(2)
    psi = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    drv = DriveSpec(eps1=0.0, eps2=0.0, omega=1.0)
    assert np.allclose(
        apply_operator(basis, "h_s", psi, drive=None),
        apply_operator(basis, "h_s", psi, drive=drv, t=0.5),
        atol=1e-14,
    )


def test_thermal_reference_matrix_elements():
    # with n_eq=[2] a raising transition out of the reference carries
    # sqrt(n_eq+1) relative to the vacuum case
    spec = BathSpec(alpha=0.1, omega_c=10.0, m_mod=1, n_ph=1, beta=1.0)
    modes = discretize_bath(spec)
    from spinboson.basis import TruncatedBasis

    basis = TruncatedBasis(spec, np.array([2]))
    energy, coupling = get_bath_operators(basis, modes)
    ref = basis.lookup[()]
    up = basis.lookup[((0, 1),)]
    down = basis.lookup[((0, -1),)]
    g = modes.g_k[0]
    assert coupling[up, ref] == pytest.approx(g * math.sqrt(3))
    assert coupling[ref, down] == pytest.approx(g * math.sqrt(2))
    w = modes.omega_k[0]
    assert energy[ref] == 0.0
    assert energy[up] == pytest.approx(w)
    assert energy[down] == pytest.approx(-w)


def test_dimension_mismatch_and_bad_tag():
    spec, modes, basis = make()
    with pytest.raises(ValueError):
        apply_operator(basis, "sigma_z", np.zeros(3))
    with pytest.raises(ValueError):
        apply_operator(basis, "nonsense", np.zeros(basis.dim))
