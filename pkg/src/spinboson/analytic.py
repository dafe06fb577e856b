"""Closed-form solutions used as oracles for the numerical pipeline.

Covers the dissipation-renormalized TLS gap, the weak-damping correlation
function and its Onsager matrix, the high-frequency performance slopes, and
the exactly solvable alpha = 1/2 (Toulouse) limit whose response functions
are combinations of complex digamma values.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .linres import OnsagerMatrix

# ---------------------------------------------------------------------------
# special functions (own implementations; scipy/mpmath serve as test oracles)

_LANCZOS_G = 7
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_real(x: float) -> float:
    """Gamma function for real x via the Lanczos approximation."""
    if x <= 0 and x == int(x):
        raise ValueError(f"Gamma pole at non-positive integer {x}")
    if x < 0.5:
        # reflection formula
        return math.pi / (math.sin(math.pi * x) * gamma_real(1.0 - x))
    x -= 1.0
    a = _LANCZOS_COEFFS[0]
    for i in range(1, _LANCZOS_G + 2):
        a += _LANCZOS_COEFFS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * a


# Bernoulli numbers B_2n / (2n) for the digamma asymptotic series
_DIGAMMA_ASYMP = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
_DIGAMMA_SHIFT = 10.0


def complex_digamma(z: complex) -> complex:
    """psi^(0)(z) by upward recurrence into the asymptotic regime.

    Arguments with Re z <= 0 are mapped through the reflection formula;
    poles at non-positive integers raise.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise ValueError(f"digamma pole at non-positive integer {z}")
    if z.real < 0.5:
        # psi(1-z) - psi(z) = pi / tan(pi z)
        return complex_digamma(1.0 - z) - math.pi / cmath.tan(math.pi * z)
    acc = 0.0 + 0.0j
    while abs(z) < _DIGAMMA_SHIFT:
        acc -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    series = 0.0 + 0.0j
    power = inv2
    for c in _DIGAMMA_ASYMP:
        series += c * power
        power *= inv2
    return acc + cmath.log(z) - 0.5 / z - series


# ---------------------------------------------------------------------------
# renormalized gap

def delta_eff(omega_c: float, alpha: float, delta: float = 1.0) -> float:
    """Renormalized oscillation frequency of the damped TLS.

    Delta_eff = Delta_r * [Gamma(1-2a) cos(pi a)]^(1/(2(1-a))) with
    Delta_r = Delta (Delta/omega_c)^(a/(1-a)).  Valid for 0 <= alpha < 1/2;
    at alpha = 1/2 the Toulouse branch gamma = pi Delta^2 / (2 omega_c)
    takes over.
    """
    if alpha < 0 or alpha > 0.5:
        raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")
    if alpha == 0.5:
        return kondo_frequency(omega_c, delta)
    delta_r = delta * (delta / omega_c) ** (alpha / (1.0 - alpha))
    return delta_r * (
        gamma_real(1.0 - 2.0 * alpha) * math.cos(math.pi * alpha)
    ) ** (1.0 / (2.0 * (1.0 - alpha)))


def kondo_frequency(omega_c: float, delta: float = 1.0) -> float:
    """gamma = pi Delta^2 / (2 omega_c), the alpha=1/2 relaxation rate."""
    return math.pi * delta**2 / (2.0 * omega_c)


# ---------------------------------------------------------------------------
# weak-damping closed forms

ALPHA_WARN = 0.2
ALPHA_REJECT = 0.35


@dataclass(frozen=True)
class WeakCouplingParams:
    """Effective frequency, decay rate and amplitudes of the damped-cosine
    equilibrium correlation function, valid for alpha << 1 and beta*Omega > 1.
    """

    alpha: float
    omega_c: float
    beta: float

    def __post_init__(self):
        if self.alpha > ALPHA_REJECT:
            raise ValueError(
                f"weak-damping form invalid at alpha={self.alpha} (> {ALPHA_REJECT})"
            )
        if self.alpha > ALPHA_WARN:
            warnings.warn(
                f"weak-damping form is stretched at alpha={self.alpha} (> {ALPHA_WARN})",
                stacklevel=2,
            )

    @property
    def Omega(self):
        return delta_eff(self.omega_c, self.alpha)

    @property
    def gamma_tilde(self):
        W = self.Omega
        coth = 1.0 if math.isinf(self.beta) else 1.0 / math.tanh(self.beta * W / 2.0)
        return math.pi * self.alpha * W / 2.0 * coth

    @property
    def a2(self):
        W = self.Omega
        tanh = 1.0 if math.isinf(self.beta) else math.tanh(self.beta * W / 2.0)
        return self.gamma_tilde / W - 1j * W**2 * tanh


def weak_coupling_correlation(params: WeakCouplingParams, tau):
    """C(tau) = (cos(Omega tau) + A2 sin(Omega tau)) exp(-gamma_tilde tau)."""
    tau = np.asarray(tau, dtype=float)
    W = params.Omega
    return (np.cos(W * tau) + params.a2 * np.sin(W * tau)) * np.exp(
        -params.gamma_tilde * tau
    )


def weak_coupling_onsager(params: WeakCouplingParams, omega, phi=0.0) -> OnsagerMatrix:
    """Onsager matrix of the damped-cosine correlation function."""
    W = params.Omega
    g = params.gamma_tilde
    tanh = 1.0 if math.isinf(params.beta) else math.tanh(params.beta * W / 2.0)
    denom = (g**2 + (W - omega) ** 2) * (g**2 + (W + omega) ** 2)
    pref = (omega / 8.0) * W**2 / denom
    f_w = 4.0 * W * omega * g
    g_w = 2.0 * W * (g**2 + W**2 - omega**2)
    l11 = pref * tanh * f_w
    l12 = pref * tanh * (math.sin(phi) * f_w - math.cos(phi) * g_w)
    l21 = -pref * tanh * (math.sin(-phi) * f_w - math.cos(phi) * g_w)
    return OnsagerMatrix(
        l11=l11, l12=l12, l21=l21, l22=l11, omega=omega, phi=phi,
        provenance="weak_coupling",
    )


def weak_coupling_slopes(params: WeakCouplingParams, eps2):
    """Leading linear slopes of |P_out| and D_out versus (1 - eta) at ME,
    in the high-frequency branch.
    """
    W = params.Omega
    g = params.gamma_tilde
    tanh = 1.0 if math.isinf(params.beta) else math.tanh(params.beta * W / 2.0)
    slope_p = -(eps2**2 / 16.0) * W**2 * tanh * (W / g)
    slope_d = (eps2**2 / 8.0) * W**3 * tanh
    return slope_p, slope_d


# ---------------------------------------------------------------------------
# Toulouse limit (alpha = 1/2, scaling limit)


@dataclass(frozen=True)
class ToulouseParams:
    gamma: float
    beta: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"Kondo frequency must be > 0, got {self.gamma}")
        if self.beta <= 0 or math.isinf(self.beta):
            raise ValueError("Toulouse closed forms require finite beta > 0")

    def z(self, omega):
        return complex(
            0.5 + self.gamma * self.beta / (4.0 * math.pi),
            -omega * self.beta / (2.0 * math.pi),
        )

    @property
    def z_prime(self):
        return 0.5 + self.gamma * self.beta / (4.0 * math.pi)


def toulouse_response(params: ToulouseParams, omega):
    """(R1, R2): sine and 1-cosine transforms of the incoherent kernel,
    expressed through the complex digamma.  Both are real.
    """
    psi_z = complex_digamma(params.z(omega))
    psi_zp = complex_digamma(complex(params.z_prime))
    r1 = (1j * params.gamma / math.pi) * (psi_z - psi_z.conjugate())
    r2 = (params.gamma / math.pi) * (psi_z + psi_z.conjugate() - 2.0 * psi_zp)
    return float(r1.real), float(r2.real)


def toulouse_response_quadrature(params: ToulouseParams, omega, tau_max=None):
    """Direct quadrature of the integral definitions of R1, R2.

    In the scaling limit the bath kernel is
    exp(-W(tau)) = pi / (beta omega_c sinh(pi tau / beta)) and the prefactor
    Delta^2 = 2 gamma omega_c / pi, so omega_c cancels and the integrands
    depend only on gamma and beta.
    """
    g, b = params.gamma, params.beta
    pref = 2.0 * g / b

    def kernel(tau):
        return pref * math.exp(-0.5 * g * tau) / math.sinh(math.pi * tau / b)

    # integrable 1/tau behavior at the origin; split at one thermal time
    split = b / math.pi
    upper = tau_max if tau_max is not None else max(60.0 / g, 20.0 * split)

    def do(f):
        lo, _ = quad(f, 0.0, split, limit=400, points=[0.0])
        hi, _ = quad(f, split, upper, limit=400)
        return lo + hi

    r1 = do(lambda tau: kernel(tau) * math.sin(omega * tau))
    r2 = do(lambda tau: kernel(tau) * (1.0 - math.cos(omega * tau)))
    return r1, r2


def toulouse_onsager(params: ToulouseParams, omega, phi=0.0) -> OnsagerMatrix:
    """Onsager matrix in the Toulouse limit; all entries are real."""
    r1, r2 = toulouse_response(params, omega)
    g = params.gamma
    pref = 1.0 / (4.0 * (omega**2 + g**2))
    sym = omega * r1 + g * r2
    asym = omega * r2 - g * r1
    l11 = pref * sym
    l12 = pref * (math.sin(phi) * sym + math.cos(phi) * asym)
    l21 = -pref * (math.sin(-phi) * sym + math.cos(phi) * asym)
    return OnsagerMatrix(
        l11=l11, l12=l12, l21=l21, l22=l11, omega=omega, phi=phi,
        provenance="toulouse",
    )


def toulouse_fluctuation_asymptote(params: ToulouseParams, eps2, omega):
    """High-frequency asymptote of the ME output fluctuations,
    eps2^2 (gamma/4) (1 - pi/g + pi^2/(2 g^2)) with
    g = |log(beta omega / 2 pi) - psi(z')|.
    """
    psi_zp = complex_digamma(complex(params.z_prime))
    gfac = abs(math.log(params.beta * omega / (2.0 * math.pi)) - psi_zp)
    return (
        eps2**2
        * (params.gamma / 4.0)
        * (1.0 - math.pi / gfac + 0.5 * math.pi**2 / gfac**2)
    )
