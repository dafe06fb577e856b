"""Matrix-free application of the driven spin-boson Hamiltonian.

H(t) = H_S(t) + H_B + H_SB with

    H_S(t) = -(eps1(t) + eps2(t))/2 * sigma_z - (1/2) * sigma_x
    H_B    = sum_k omega_k * (n_k^eq + dn_k)   (reference energy subtracted)
    H_SB   = (sigma_z / 2) * sum_k g_k (b_k^dag + b_k)

in units Delta = 1.  State vectors are complex arrays over the truncated
basis, laid out as psi.reshape(n_bath, 2) with the TLS index fastest.  The
bath-energy diagonal and the coupling matrix (sparse, acting on the bath
factor only) are assembled once per (basis, modes) pair and cached on the
basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps

from .basis import TruncatedBasis
from .bath import BathModes

OPERATOR_TAGS = ("identity", "sigma_z", "sigma_x", "h_b", "h_sb", "h_s", "h_total")


@dataclass(frozen=True)
class DriveSpec:
    """Two periodic bias drives: eps1*sin(w t) and eps2*cos(n w t - phi)."""

    eps1: float
    eps2: float
    omega: float
    phi: float = 0.0
    n_ratio: int = 1

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError(f"driving frequency must be > 0, got {self.omega}")
        if self.n_ratio < 1:
            raise ValueError(f"n_ratio must be a positive integer, got {self.n_ratio}")

    @property
    def period(self):
        return 2.0 * math.pi / self.omega

    def eps(self, i, t):
        """Field value eps_i(t), i in {1, 2}."""
        if i == 1:
            return self.eps1 * math.sin(self.omega * t)
        if i == 2:
            return self.eps2 * math.cos(self.n_ratio * self.omega * t - self.phi)
        raise ValueError(f"channel must be 1 or 2, got {i}")

    def deps_dt(self, i, t):
        """Analytic time derivative of eps_i(t)."""
        if i == 1:
            return self.eps1 * self.omega * math.cos(self.omega * t)
        if i == 2:
            w = self.n_ratio * self.omega
            return -self.eps2 * w * math.sin(w * t - self.phi)
        raise ValueError(f"channel must be 1 or 2, got {i}")

    def bias(self, t):
        """Total instantaneous bias eps1(t) + eps2(t)."""
        return self.eps(1, t) + self.eps(2, t)


def _build_bath_arrays(basis: TruncatedBasis, modes: BathModes):
    """Bath-energy diagonal and the coupling matrix sum_k g_k (b+ + b).

    Both act on the bath factor only; the coupling matrix is real symmetric.
    Transitions that would leave the truncated space are dropped.
    """
    omega_k = modes.omega_k
    g_k = modes.g_k
    n_ph = basis.spec.n_ph
    n_eq = basis.n_eq
    m_mod = basis.spec.m_mod

    energy = np.empty(basis.n_bath)
    rows, cols, vals = [], [], []
    lookup = basis.lookup

    for b, config in enumerate(basis.configs):
        grade = 0
        e = 0.0
        dn_map = dict(config)
        for k, d in config:
            grade += abs(d)
            e += omega_k[k] * d
        energy[b] = e

        # raising transitions b -> b' with dn_k -> dn_k + 1; lowering entries
        # are generated as the symmetric partners of these.
        for k in range(m_mod):
            dn = dn_map.get(k, 0)
            new_grade = grade + (1 if dn >= 0 else -1)
            if new_grade > n_ph:
                continue
            occ = n_eq[k] + dn
            new_dn = dn + 1
            if new_dn == 0:
                new_config = tuple(
                    (kk, dd) for kk, dd in config if kk != k
                )
            elif dn == 0:
                new_config = tuple(sorted(config + ((k, new_dn),)))
            else:
                new_config = tuple(
                    (kk, new_dn if kk == k else dd) for kk, dd in config
                )
            bp = lookup[new_config]
            amp = g_k[k] * math.sqrt(occ + 1)
            rows.append(bp)
            cols.append(b)
            vals.append(amp)

    up = sps.csr_matrix(
        (vals, (rows, cols)), shape=(basis.n_bath, basis.n_bath)
    )
    coupling = up + up.T
    return energy, coupling


def get_bath_operators(basis: TruncatedBasis, modes: BathModes):
    """Cached (bath_energy, coupling) pair for a basis/modes combination."""
    key = id(modes)
    if key not in basis._op_cache:
        basis._op_cache.clear()  # one modes object per basis in practice
        basis._op_cache[key] = _build_bath_arrays(basis, modes)
    return basis._op_cache[key]


def _as_matrix(psi, basis):
    psi = np.asarray(psi)
    if psi.size != basis.dim:
        raise ValueError(
            f"state dimension {psi.size} does not match basis dimension {basis.dim}"
        )
    return psi.reshape(basis.n_bath, 2)


def apply_sigma_z(basis, psi):
    m = _as_matrix(psi, basis).copy()
    m[:, 1] *= -1.0
    return m.reshape(-1)

def apply_sigma_x(basis, psi):
    m = _as_matrix(psi, basis)
    return m[:, ::-1].reshape(-1)


def apply_h_b(basis, modes, psi):
    energy, _ = get_bath_operators(basis, modes)
    m = _as_matrix(psi, basis)
    return (energy[:, None] * m).reshape(-1)


def apply_h_sb(basis, modes, psi):
    _, coupling = get_bath_operators(basis, modes)
    m = _as_matrix(psi, basis)
    out = 0.5 * (coupling @ m)
    out[:, 1] *= -1.0
    return out.reshape(-1)


def apply_h_s(basis, drive, t, psi):
    """System term -(eps1(t)+eps2(t))/2 sigma_z - (1/2) sigma_x."""
    bias = 0.0 if drive is None else drive.bias(t)
    m = _as_matrix(psi, basis)
    out = -0.5 * m[:, ::-1].astype(complex, copy=True)
    if bias != 0.0:
        out[:, 0] += -0.5 * bias * m[:, 0]
        out[:, 1] += +0.5 * bias * m[:, 1]
    return out.reshape(-1)


def apply_hamiltonian(basis, modes, drive, t, psi):
    """H(t) @ psi, assembled term by term without forming the dense matrix."""
    energy, coupling = get_bath_operators(basis, modes)
    m = _as_matrix(psi, basis)
    out = energy[:, None] * m
    sb = 0.5 * (coupling @ m)
    out[:, 0] += sb[:, 0]
    out[:, 1] -= sb[:, 1]
    out += -0.5 * m[:, ::-1]
    bias = 0.0 if drive is None else drive.bias(t)
    if bias != 0.0:
        out[:, 0] -= 0.5 * bias * m[:, 0]
        out[:, 1] += 0.5 * bias * m[:, 1]
    return out.reshape(-1)


def apply_operator(basis, which, psi, modes=None, drive=None, t=0.0):
    """Apply one named operator term; tags as in OPERATOR_TAGS."""
    if which == "identity":
        return np.array(psi, dtype=complex, copy=True)
    if which == "sigma_z":
        return apply_sigma_z(basis, psi)
    if which == "sigma_x":
        return apply_sigma_x(basis, psi)
    if which == "h_b":
        return apply_h_b(basis, modes, psi)
    if which == "h_sb":
        return apply_h_sb(basis, modes, psi)
    if which == "h_s":
        return apply_h_s(basis, drive, t, psi)
    if which == "h_total":
        return apply_hamiltonian(basis, modes, drive, t, psi)
    raise ValueError(f"unknown operator tag {which!r}")


def expectation(basis, which, psi, modes=None, drive=None, t=0.0):
    """Real part of <psi|O|psi> for a named Hermitian operator."""
    psi = np.asarray(psi)
    return float(
        np.real(np.vdot(psi, apply_operator(basis, which, psi, modes, drive, t)))
    )


def initial_state(basis: TruncatedBasis, tls="plus"):
    """Factorized start state: TLS state (x) bath reference configuration.

    tls is one of "plus" (sigma_z=+1), "minus", "x+" (ground state of
    -sigma_x/2), "y+", "y-".
    """
    amp = {
        "plus": (1.0, 0.0),
        "minus": (0.0, 1.0),
        "x+": (1 / math.sqrt(2), 1 / math.sqrt(2)),
        "y+": (1 / math.sqrt(2), 1j / math.sqrt(2)),
        "y-": (1 / math.sqrt(2), -1j / math.sqrt(2)),
    }[tls]
    psi = np.zeros(basis.dim, dtype=complex)
    ref = basis.lookup[()]
    psi[2 * ref] = amp[0]
    psi[2 * ref + 1] = amp[1]
    return psi
