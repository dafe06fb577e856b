"""Linear-response engine: equilibrium correlation function, half-line
Fourier transform, Onsager matrix, maximum-efficiency line and performance.

The mean powers respond bilinearly to the drive amplitudes,
P_i = sum_j L_ij eps_i eps_j, with kinetic coefficients built from
F(omega) = integral_0^inf exp(i omega tau) Im C(tau) dtau, where C is the
sigma_z autocorrelation function of the undriven interacting system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .operators import apply_sigma_z, expectation, initial_state
from .sil import SilConfig, StateVector, sil_step


class RelaxationError(RuntimeError):
    """Equilibrium transient not decayed at the requested sampling time."""


class UndecayedTailError(RuntimeError):
    """Correlation tail too large at the end of the tau grid."""


class NoConversionError(RuntimeError):
    """No work-to-work conversion at this operating point."""


def coth_half(beta, omega):
    """coth(beta*omega/2), equal to 1 at T=0."""
    if math.isinf(beta):
        return 1.0
    return 1.0 / math.tanh(0.5 * beta * omega)


@dataclass
class CorrelationFunction:
    tau: np.ndarray
    values: np.ndarray
    beta: float
    t_bar: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.tau = np.asarray(self.tau, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.tau.shape != self.values.shape:
            raise ValueError("tau and values must have matching shapes")


@dataclass(frozen=True)
class OnsagerMatrix:
    """2x2 kinetic coefficients; l11 == l22 by construction."""

    l11: float
    l12: float
    l21: float
    l22: float
    omega: float
    phi: float
    provenance: str = "numeric"

    def as_array(self):
        return np.array([[self.l11, self.l12], [self.l21, self.l22]])

    @property
    def det(self):
        return self.l11 * self.l22 - self.l12 * self.l21


@dataclass(frozen=True)
class MEPoint:
    """Operating point on the maximum-efficiency line at fixed eps2."""

    omega: float
    eps1_me: float
    eta_me: float
    p_out_me: float
    p_in_me: float
    d_out_me: float
    sigma_rel_me: float
    singular: bool = False


# ---------------------------------------------------------------------------
# equilibrium correlator from the propagated wavefunction

RELAX_DRIFT_TOL = 1e-4


def relaxation_drift(times, sz_values):
    """Drift per unit time of the window-averaged magnetization."""
    times = np.asarray(times)
    sz = np.asarray(sz_values)
    half = len(sz) // 2
    if half < 2:
        raise ValueError("need at least 4 samples to measure a drift")
    m1 = np.mean(sz[:half])
    m2 = np.mean(sz[half:])
    dt_win = np.mean(times[half:]) - np.mean(times[:half])
    return abs(m2 - m1) / dt_win


def equilibrium_correlation(
    basis,
    modes,
    cfg: SilConfig,
    beta,
    t_bar,
    tau_grid,
    relax_tol=RELAX_DRIFT_TOL,
    check_relaxation=True,
    initial_tls="plus",
) -> CorrelationFunction:
    """C(tau) = <sigma_z(t_bar + tau) sigma_z(t_bar)> of the undriven system.

    The state is relaxed from the factorized initial condition to t_bar; the
    transient must have decayed there (window-averaged drift of <sigma_z>
    below relax_tol per unit time).  The correlator is then evaluated by
    propagating the state and its sigma_z-kicked companion side by side.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid[0] != 0.0 or np.any(np.diff(tau_grid) <= 0):
        raise ValueError("tau grid must start at 0 and increase")

    n_relax = int(round(t_bar / cfg.dt))
    window = max(10, int(round(8.0 / cfg.dt)))  # few tunneling periods
    psi = StateVector(initial_state(basis, initial_tls), 0.0)
    tail_t, tail_sz = [], []
    for step in range(n_relax):
        psi = sil_step(basis, modes, None, cfg, psi)
        if step >= n_relax - window:
            tail_t.append(psi.t)
            tail_sz.append(expectation(basis, "sigma_z", psi.amplitudes))
    if check_relaxation and n_relax > 0:
        drift = relaxation_drift(tail_t, tail_sz)
        if drift > relax_tol:
            raise RelaxationError(
                f"<sigma_z> drift {drift:.2e}/time at t_bar={t_bar} exceeds "
                f"{relax_tol:.2e}; increase t_bar"
            )

    phi = StateVector(apply_sigma_z(basis, psi.amplitudes), psi.t)
    sample_steps = tau_grid / cfg.dt
    if np.max(np.abs(sample_steps - np.round(sample_steps))) > 1e-8:
        raise ValueError("tau grid points must be multiples of cfg.dt")
    sample_steps = np.round(sample_steps).astype(int)

    values = np.empty(len(tau_grid), dtype=complex)
    next_idx = 0
    for step in range(sample_steps[-1] + 1):
        if next_idx < len(sample_steps) and step == sample_steps[next_idx]:
            values[next_idx] = np.vdot(
                psi.amplitudes, apply_sigma_z(basis, phi.amplitudes)
            )
            next_idx += 1
        if step == sample_steps[-1]:
            break
        psi = sil_step(basis, modes, None, cfg, psi)
        phi = sil_step(basis, modes, None, cfg, phi)
    return CorrelationFunction(
        tau=tau_grid, values=values, beta=beta, t_bar=t_bar,
        params={"initial_tls": initial_tls},
    )


def thermal_equilibrium_correlation(
    spec, cfg, t_bar, tau_grid, n_samples=16, seed=0, **kwargs
) -> CorrelationFunction:
    """Average C(tau) over sampled thermal reference occupations.

    At T=0 a single all-zero reference is used regardless of n_samples.
    Deterministic for a fixed seed.
    """
    from .bath import discretize_bath, sample_reference_occupations
    from .basis import enumerate_basis

    modes = discretize_bath(spec)
    if math.isinf(spec.beta):
        basis = enumerate_basis(spec)
        return equilibrium_correlation(
            basis, modes, cfg, spec.beta, t_bar, tau_grid, **kwargs
        )
    rng = np.random.default_rng(seed)
    acc = None
    for _ in range(n_samples):
        n_eq = sample_reference_occupations(modes, spec.beta, rng)
        basis = enumerate_basis(spec, n_eq=n_eq)
        corr = equilibrium_correlation(
            basis, modes, cfg, spec.beta, t_bar, tau_grid, **kwargs
        )
        acc = corr.values if acc is None else acc + corr.values
    return CorrelationFunction(
        tau=np.asarray(tau_grid, dtype=float),
        values=acc / n_samples,
        beta=spec.beta,
        t_bar=t_bar,
        params={"n_samples": n_samples, "seed": seed},
    )


# ---------------------------------------------------------------------------
# transform and Onsager assembly

DEFAULT_ETA_PAIR = (1e-3, 2e-3)


def half_line_fourier(
    corr: CorrelationFunction, omega, eta_pair=DEFAULT_ETA_PAIR, tail_tol=1e-2
):
    """F(omega) = integral_0^inf exp(i omega tau) Im C(tau) dtau.

    Trapezoidal transform with an exponential regularization window
    exp(-eta tau) evaluated at the two eta values and extrapolated linearly
    to eta -> 0.  Set eta_pair=None for the bare transform.  Raises when the
    (windowed) integrand has not decayed at the end of the grid.
    """
    tau = corr.tau
    im_c = np.imag(corr.values)
    peak = np.max(np.abs(im_c))
    if peak == 0.0:
        return 0.0 + 0.0j

    def transform(eta):
        windowed = im_c * np.exp(-eta * tau)
        ntail = max(2, len(tau) // 20)
        tail = np.max(np.abs(windowed[-ntail:]))
        if tail > tail_tol * peak:
            raise UndecayedTailError(
                f"correlation tail {tail:.3e} exceeds {tail_tol:.1e} of peak "
                f"{peak:.3e} at tau={tau[-1]}; extend the tau grid"
            )
        return np.trapezoid(np.exp(1j * omega * tau) * windowed, tau)

    if eta_pair is None:
        return transform(0.0)
    eta1, eta2 = eta_pair
    f1, f2 = transform(eta1), transform(eta2)
    return f1 + (f1 - f2) * eta1 / (eta2 - eta1)


def onsager_from_correlation(
    corr: CorrelationFunction, omega, phi=0.0, provenance="numeric", **fourier_kw
) -> OnsagerMatrix:
    """Assemble the kinetic coefficients from F(omega) at one frequency."""
    f = half_line_fourier(corr, omega, **fourier_kw)
    l11 = -(omega / 4.0) * f.imag
    l12 = (omega / 4.0) * (math.cos(phi) * f.real - math.sin(phi) * f.imag)
    l21 = -(omega / 4.0) * (math.cos(phi) * f.real + math.sin(phi) * f.imag)
    return OnsagerMatrix(
        l11=l11, l12=l12, l21=l21, l22=l11, omega=omega, phi=phi,
        provenance=provenance,
    )


def mean_powers(L: OnsagerMatrix, eps1, eps2):
    """(P1, P2) from the bilinear response."""
    p1 = L.l11 * eps1 * eps1 + L.l12 * eps1 * eps2
    p2 = L.l21 * eps2 * eps1 + L.l22 * eps2 * eps2
    return p1, p2


def conversion_regime(p1, p2):
    """'1' or '2' for the output channel (negative power), None otherwise."""
    if p1 < 0.0 < p2:
        return "1"
    if p2 < 0.0 < p1:
        return "2"
    return None


def me_line_and_performance(L: OnsagerMatrix, eps2, beta) -> MEPoint:
    """Maximum-efficiency operating point at fixed eps2.

    eps1 is placed on the ME line; output channel is channel 1 by the sign
    convention of the line.  The output fluctuations follow the
    linear-response relation D_out = eps1_ME^2 omega coth(beta omega/2) L11.
    """
    det = L.det
    if det == 0.0 or L.l21 == 0.0:
        return MEPoint(L.omega, math.nan, math.nan, math.nan, math.nan,
                       math.nan, math.nan, singular=True)
    y = L.l12 * L.l21 / det
    if 1.0 + y < 0.0:
        return MEPoint(L.omega, math.nan, math.nan, math.nan, math.nan,
                       math.nan, math.nan, singular=True)
    root = math.sqrt(1.0 + y)
    x = L.l12 / L.l21
    eps1 = eps2 * (L.l22 / L.l21) * (1.0 / root - 1.0)
    eta = x * (root - 1.0) / (root + 1.0)
    p_out = -(eps2**2) * eta * L.l22 / root
    p_in = mean_powers(L, eps1, eps2)[1]
    if not (p_out < 0.0 < p_in) or not 0.0 < eta <= 1.0:
        raise NoConversionError(
            f"no work-to-work conversion at omega={L.omega}: "
            f"P_out={p_out:.3e}, P_in={p_in:.3e}, eta={eta:.3e}"
        )
    d_out = eps1**2 * L.omega * coth_half(beta, L.omega) * L.l11
    sigma_rel = math.sqrt(d_out) / abs(p_out)
    return MEPoint(
        omega=L.omega, eps1_me=eps1, eta_me=eta, p_out_me=p_out,
        p_in_me=p_in, d_out_me=d_out, sigma_rel_me=sigma_rel,
    )


def efficiency_grid_search(L: OnsagerMatrix, eps2, eps1_grid):
    """Brute-force ME oracle: maximize |P_out|/P_in over an eps1 grid."""
    best = (None, -np.inf)
    for eps1 in eps1_grid:
        p1, p2 = mean_powers(L, eps1, eps2)
        if p1 < 0.0 < p2:
            eta = -p1 / p2
        elif p2 < 0.0 < p1:
            eta = -p2 / p1
        else:
            continue
        if eta > best[1]:
            best = (eps1, eta)
    return best
