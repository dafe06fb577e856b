"""Discretization of an Ohmic bosonic bath with exponential frequency cutoff.

All frequencies are measured in units of the TLS tunneling element (Delta = 1),
times in 1/Delta.  The continuum bath is replaced by m_mod discrete modes whose
frequencies are quantile nodes of the density of states

    rho(omega) = C * exp(-omega / omega_c),   omega in (0, 2*omega_c],

with C fixed so that the integral of rho over the support equals m_mod.  Each
mode's coupling g_k is chosen so that rho(omega_k) * g_k**2 reproduces the
spectral density J(omega_k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: upper edge of the discretized mode support, in units of omega_c
SUPPORT_FACTOR = 2.0


@dataclass(frozen=True)
class BathSpec:
    """Parameters of the dissipative environment.

    beta is the inverse temperature in units of 1/Delta; math.inf denotes T=0.
    Only the Ohmic exponent s=1 is supported at run time; the field exists so
    that configurations can carry it explicitly.
    """

    alpha: float
    omega_c: float
    m_mod: int
    n_ph: int
    beta: float = math.inf
    s: float = 1.0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.omega_c <= 0:
            raise ValueError(f"omega_c must be > 0, got {self.omega_c}")
        if self.m_mod < 1:
            raise ValueError(f"m_mod must be >= 1, got {self.m_mod}")
        if self.n_ph < 1:
            raise ValueError(f"n_ph must be >= 1, got {self.n_ph}")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0 (use math.inf for T=0), got {self.beta}")


@dataclass(frozen=True)
class BathModes:
    """Discretized mode frequencies and couplings (arrays of length m_mod)."""

    omega_k: np.ndarray
    g_k: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "omega_k", np.asarray(self.omega_k, dtype=float))
        object.__setattr__(self, "g_k", np.asarray(self.g_k, dtype=float))
        if self.omega_k.shape != self.g_k.shape:
            raise ValueError("omega_k and g_k must have the same length")


def spectral_density(omega, alpha, omega_c, s=1.0):
    """J(omega) = 2*alpha * omega**s * omega_c**(1-s) * exp(-omega/omega_c)."""
    omega = np.asarray(omega, dtype=float)
    return 2.0 * alpha * omega**s * omega_c ** (1.0 - s) * np.exp(-omega / omega_c)


def mode_density(omega, omega_c, m_mod):
    """Density of discretized modes rho(omega) on (0, SUPPORT_FACTOR*omega_c]."""
    norm = m_mod / (omega_c * (1.0 - math.exp(-SUPPORT_FACTOR)))
    return norm * np.exp(-np.asarray(omega, dtype=float) / omega_c)


def discretize_bath(spec: BathSpec) -> BathModes:
    """Place mode frequencies at the midpoint quantiles of rho(omega).

    The k-th frequency solves  integral_0^{omega_k} rho = k - 1/2,  which for
    the exponential density inverts in closed form.  Couplings satisfy
    rho(omega_k) * g_k**2 = J(omega_k).  Deterministic in spec.
    """
    if spec.s != 1.0:
        raise ValueError(f"only the Ohmic bath s=1 is supported, got s={spec.s}")
    k = np.arange(1, spec.m_mod + 1, dtype=float)
    # fraction of the support CDF at each midpoint quantile
    u = (k - 0.5) / spec.m_mod * (1.0 - math.exp(-SUPPORT_FACTOR))
    omega_k = -spec.omega_c * np.log1p(-u)
    rho = mode_density(omega_k, spec.omega_c, spec.m_mod)
    g_k = np.sqrt(spectral_density(omega_k, spec.alpha, spec.omega_c, spec.s) / rho)
    return BathModes(omega_k=omega_k, g_k=g_k)


def bose_occupation(omega, beta):
    """Mean thermal occupation 1/(exp(beta*omega)-1); zero at T=0."""
    omega = np.asarray(omega, dtype=float)
    if math.isinf(beta):
        return np.zeros_like(omega)
    return 1.0 / np.expm1(beta * omega)


def sample_reference_occupations(modes: BathModes, beta: float, rng) -> np.ndarray:
    """Draw integer per-mode occupations from the Bose-Einstein distribution.

    Occupation numbers of a thermal oscillator are geometrically distributed
    with success parameter 1 - exp(-beta*omega).  Returns zeros at T=0.
    """
    if math.isinf(beta):
        return np.zeros(len(modes.omega_k), dtype=np.int64)
    p = -np.expm1(-beta * modes.omega_k)
    # numpy's geometric counts trials (>=1); occupations are failures before
    # the first success
    return rng.geometric(p) - 1
