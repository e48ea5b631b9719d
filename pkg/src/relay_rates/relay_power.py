"""Relay output power sigma_r^2(g) and the optimal MCP relay gain.

Three equivalent forms are provided: a closed form, a single integral over
the spatial frequency, and the defining double integral over both
frequencies.  The latter two exist to check the first.
"""

from __future__ import annotations

import math

import numpy as np

from .params import Binding, GainSolution, SystemParams, check_stable
from .quadrature import QuadratureSettings, integrate_periodic_1d, integrate_periodic_2d

TWO_PI = 2.0 * np.pi

# Bisection bracket stops this far (relatively) short of the stability edge.
EDGE_MARGIN = 1e-12
DEFAULT_ROOT_TOL = 1e-10


def relay_power_closed(p: SystemParams, g: float) -> float:
    """Closed-form sigma_r^2(g)."""
    check_stable(p, g)
    if g == 0:
        return 0.0
    x = 2.0 * p.mu * g
    # 1 - x^2 factored to keep precision near the stability edge
    one_minus_x2 = (1.0 - x) * (1.0 + x)
    root = math.sqrt(one_minus_x2)
    g2 = g * g
    return (
        (p.power_mt * p.beta**2 + p.var_z) * g2 / root
        + 4.0 * p.power_mt * p.alpha**2 * g2 / (root + one_minus_x2)
    )


def relay_power_integral_1d(p: SystemParams, g: float, quad: QuadratureSettings | None = None) -> float:
    """sigma_r^2(g) as a single integral over the spatial frequency."""
    check_stable(p, g)
    g2 = g * g

    def integrand(theta):
        c = np.cos(theta)
        num = (p.power_mt * (p.beta + 2.0 * p.alpha * c) ** 2 + p.var_z) * g2
        return num / (1.0 - 4.0 * g2 * p.mu**2 * c * c)

    value, _ = integrate_periodic_1d(integrand, quad)
    return value / TWO_PI


def relay_power_integral_2d(
    p: SystemParams, g: float, lam: int | None = None, quad: QuadratureSettings | None = None
) -> float:
    """sigma_r^2(g) from the defining double integral; ``lam`` overrides ``p.lam``."""
    check_stable(p, g)
    lam = p.lam if lam is None else lam
    g2 = g * g

    def integrand(theta, phi):
        c = np.cos(theta)
        num = (p.power_mt * (p.beta + 2.0 * p.alpha * c) ** 2 + p.var_z) * g2
        den = 1.0 - 4.0 * g * p.mu * c * np.cos(lam * phi) + 4.0 * g2 * p.mu**2 * c * c
        return num / den

    value, _ = integrate_periodic_2d(integrand, quad)
    return value / TWO_PI**2


def da_optimal_gain(p: SystemParams) -> float:
    """Full-power gain when relays do not hear each other (mu treated as 0)."""
    return math.sqrt(p.power_rt / (p.power_mt * (p.beta**2 + 2.0 * p.alpha**2) + p.var_z))


def solve_optimal_gain_mcp(
    p: SystemParams, quad: QuadratureSettings | None = None, tol: float = DEFAULT_ROOT_TOL
) -> GainSolution:
    """Gain at which the relays transmit at full power Q.

    sigma_r^2 is increasing on the stable interval, starts at 0 and diverges
    at the edge, so bisection on ``[0, (1 - EDGE_MARGIN) / (2 mu)]`` always
    brackets the root.  The search stops at relative residual ``tol`` or when
    the bracket can no longer be split in floating point.  ``quad`` is unused
    (the closed form needs no quadrature) and kept for a uniform call shape.
    """
    q = p.power_rt
    if p.mu == 0:
        g = da_optimal_gain(p)
        return GainSolution(g, relay_power_closed(p, g), Binding.POWER)

    hi = (1.0 - EDGE_MARGIN) / (2.0 * p.mu)
    p_hi = relay_power_closed(p, hi)
    if p_hi <= q:
        return GainSolution(hi, p_hi, Binding.STABILITY)

    lo, p_lo = 0.0, 0.0
    while True:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        p_mid = relay_power_closed(p, mid)
        if abs(p_mid - q) <= tol * q:
            return GainSolution(mid, p_mid, Binding.POWER)
        if p_mid < q:
            lo, p_lo = mid, p_mid
        else:
            hi, p_hi = mid, p_mid
    # bracket exhausted at floating-point resolution; take the closer endpoint
    if abs(p_lo - q) <= abs(p_hi - q):
        return GainSolution(lo, p_lo, Binding.POWER)
    return GainSolution(hi, p_hi, Binding.POWER)
