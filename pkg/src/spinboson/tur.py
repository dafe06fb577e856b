"""Thermodynamic uncertainty relation diagnostics at maximum efficiency.

The tradeoff parameter Q = sigma * D_out / P_out^2 is compared against the
static bound 2 and against the dynamic bound for periodically driven systems,
V(omega) = 2 (1 - (omega / P_out) dP_out/domega)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linres import MEPoint, NoConversionError, me_line_and_performance, mean_powers

STATIC_BOUND = 2.0

#: |P_out| below this is treated as singular for bound evaluation
P_OUT_FLOOR = 1e-10

#: agreement required between the two printed forms of Q
Q_IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class TurPoint:
    omega: float
    sigma: float
    q: float
    v_static: float
    v_dyn: float
    ratio_dyn: float
    static_violation: bool
    dynamic_violation: bool
    singular: bool = False


def tradeoff_q(p_in, p_out, d_out, beta):
    """Q = sigma D_out / P_out^2 with sigma = beta (P_in - |P_out|).

    Computed in both printed forms (entropy form and efficiency form); they
    must agree to Q_IDENTITY_TOL relative.
    """
    if math.isinf(beta):
        raise ValueError("the TUR tradeoff parameter requires finite temperature")
    if not (p_out < 0.0 < p_in):
        raise NoConversionError(
            f"tradeoff parameter undefined outside the conversion regime "
            f"(P_in={p_in:.3e}, P_out={p_out:.3e})"
        )
    sigma = beta * (p_in - abs(p_out))
    q_entropy = sigma * d_out / p_out**2
    eta = abs(p_out) / p_in
    sigma2_rel = d_out / p_out**2
    q_eff = beta * abs(p_out) * (1.0 / eta - 1.0) * sigma2_rel
    if abs(q_entropy - q_eff) > Q_IDENTITY_TOL * max(abs(q_entropy), 1.0):
        raise AssertionError(
            f"tradeoff-parameter identity broken: {q_entropy!r} vs {q_eff!r}"
        )
    return q_entropy


def _derivative_uniform(values, i, h):
    """d(values)/dx at index i on a uniform grid: 4th-order central stencil
    in the interior, 2nd-order one-sided/central at the edges.
    """
    n = len(values)
    v = values
    if 2 <= i <= n - 3:
        return (-v[i + 2] + 8 * v[i + 1] - 8 * v[i - 1] + v[i - 2]) / (12.0 * h)
    if i == 0:
        return (-3 * v[0] + 4 * v[1] - v[2]) / (2.0 * h)
    if i == n - 1:
        return (3 * v[n - 1] - 4 * v[n - 2] + v[n - 3]) / (2.0 * h)
    return (v[i + 1] - v[i - 1]) / (2.0 * h)


def dynamic_bound(omegas, p_out_curve, omega, floor=P_OUT_FLOOR):
    """V(omega) = 2 (1 - (omega/P_out) dP_out/domega)^2 on a uniform grid.

    Returns (value, singular): singular marks points where |P_out| is below
    the floor, where the bound value carries no meaning.
    """
    omegas = np.asarray(omegas, dtype=float)
    p_out_curve = np.asarray(p_out_curve, dtype=float)
    if len(omegas) < 3:
        raise ValueError("need at least 3 grid points for the derivative stencil")
    h = omegas[1] - omegas[0]
    if np.max(np.abs(np.diff(omegas) - h)) > 1e-9 * h:
        raise ValueError("omega grid must be uniform")
    idx = int(np.argmin(np.abs(omegas - omega)))
    if abs(omegas[idx] - omega) > 1e-9 * h:
        raise ValueError(f"omega={omega} not on the grid")
    p = p_out_curve[idx]
    if not np.isfinite(p) or abs(p) < floor:
        return math.inf, True
    dp = _derivative_uniform(p_out_curve, idx, h)
    return 2.0 * (1.0 - omega * dp / p) ** 2, False


def sweep_tur(onsager_source, omegas, eps2, beta, debounce=True, frozen_eps1=None):
    """TUR diagnostics along a uniform omega grid.

    onsager_source maps omega -> OnsagerMatrix.  Singular and no-conversion
    points are recorded with NaN diagnostics; a violation flag is claimed
    only where the point and both grid neighbors violate (debounced), unless
    debounce=False.

    The dynamic bound differentiates the composed P_out(omega) along the ME
    line (eps1 re-optimized at each frequency).  Passing frozen_eps1 instead
    differentiates P_out at that fixed amplitude.
    """
    omegas = np.asarray(omegas, dtype=float)
    me_points = []
    for w in omegas:
        try:
            me_points.append(me_line_and_performance(onsager_source(w), eps2, beta))
        except NoConversionError:
            me_points.append(None)
    if frozen_eps1 is None:
        p_out = np.array(
            [m.p_out_me if m is not None and not m.singular else math.nan
             for m in me_points]
        )
    else:
        p_out = np.array(
            [mean_powers(onsager_source(w), frozen_eps1, eps2)[0] for w in omegas]
        )

    raw = []
    for i, w in enumerate(omegas):
        m = me_points[i]
        if m is None or m.singular or not np.isfinite(p_out[i]):
            raw.append(None)
            continue
        stencil = p_out[max(0, i - 2): i + 3]
        if np.any(~np.isfinite(stencil)):
            raw.append(None)
            continue
        sigma = beta * (m.p_in_me - abs(m.p_out_me))
        q = tradeoff_q(m.p_in_me, m.p_out_me, m.d_out_me, beta)
        v_dyn, singular = dynamic_bound(omegas, p_out, w)
        raw.append((sigma, q, v_dyn, singular))

    points = []
    for i, w in enumerate(omegas):
        if raw[i] is None:
            points.append(
                TurPoint(w, math.nan, math.nan, STATIC_BOUND, math.nan,
                         math.nan, False, False, singular=True)
            )
            continue
        sigma, q, v_dyn, singular = raw[i]

        def violates(j, kind):
            if raw[j] is None:
                return False
            qj, vj, sing = raw[j][1], raw[j][2], raw[j][3]
            if kind == "static":
                return qj < STATIC_BOUND
            return (not sing) and np.isfinite(vj) and qj < vj

        if debounce:
            # need both neighbors: edge points are never flagged
            if 0 < i < len(omegas) - 1:
                neighbors = (i - 1, i, i + 1)
                stat = all(violates(j, "static") for j in neighbors)
                dyn = (not singular) and all(violates(j, "dynamic") for j in neighbors)
            else:
                stat = dyn = False
        else:
            stat = violates(i, "static")
            dyn = (not singular) and violates(i, "dynamic")
        ratio = q / v_dyn if (not singular and v_dyn > 0) else math.nan
        points.append(
            TurPoint(w, sigma, q, STATIC_BOUND, v_dyn, ratio, stat, dyn,
                     singular=singular)
        )
    return points


def write_tur_csv(path, points, header_params=None):
    with open(path, "w") as fh:
        for key, value in (header_params or {}).items():
            fh.write(f"# {key} = {value}\n")
        fh.write("omega,sigma,Q,V_dyn,ratio,static_violation,"
                 "dynamic_violation,singular\n")
        for p in points:
            fh.write(
                f"{p.omega:.17g},{p.sigma:.17g},{p.q:.17g},{p.v_dyn:.17g},"
                f"{p.ratio_dyn:.17g},{int(p.static_violation)},"
                f"{int(p.dynamic_violation)},{int(p.singular)}\n"
            )
