"""Per-cell sum-rate with joint multi-cell processing (MCP) at the base stations.

Rates are computed in nats internally and reported in bits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .params import SystemParams, check_stable
from .quadrature import QuadratureSettings, integrate_periodic_1d, integrate_periodic_2d
from .relay_power import da_optimal_gain, solve_optimal_gain_mcp
from .spectra import transfer_functions

TWO_PI = 2.0 * np.pi
LN2 = math.log(2.0)


class Scheme(str, enum.Enum):
    MCP = "MCP"
    MCP_DA = "MCP_DA"
    MCP_HALF_DUPLEX = "MCP_HalfDuplex"
    SCP = "SCP"


class Method(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    INTEGRAL_ORACLE = "IntegralOracle"
    SIMULATION = "Simulation"


class NegativeDiscriminant(AssertionError):
    """B < |C| somewhere on the grid, which the algebra rules out."""


@dataclass(frozen=True)
class RateResult:
    rate: float  # bits per channel use per cell
    scheme: Scheme
    gain_used: float
    method: Method

    @property
    def rate_nats(self) -> float:
        return self.rate * LN2

    def value(self, nats: bool = False) -> float:
        return self.rate_nats if nats else self.rate


def _abc(p: SystemParams, g: float, cos_t):
    h1 = p.beta + 2.0 * p.alpha * cos_t
    h2 = p.gamma + 2.0 * p.eta * cos_t
    g2 = g * g
    a = p.power_mt * g2 * h1**2 * h2**2
    b = p.var_z * g2 * h2**2 + p.var_w * (1.0 + 4.0 * g2 * p.mu**2 * cos_t**2)
    c = 4.0 * p.var_w * g * p.mu * cos_t
    return a, b, c


def mcp_log_argument(p: SystemParams, g: float, theta):
    """Log-argument of the single-integral MCP rate; >= 1 pointwise."""
    a, b, c = _abc(p, g, np.cos(theta))
    c = np.abs(c)
    if np.any(b < c):
        raise NegativeDiscriminant(f"B < |C| at g={g!r}")
    # x^2 - c^2 factored for accuracy when x is close to c
    num = a + b + np.sqrt((a + b - c) * (a + b + c))
    den = b + np.sqrt((b - c) * (b + c))
    return num / den


def mcp_rate_closed(p: SystemParams, g: float, quad: QuadratureSettings | None = None) -> RateResult:
    """MCP rate at relay gain ``g`` via the single theta-integral."""
    check_stable(p, g)
    value, _ = integrate_periodic_1d(lambda t: np.log(mcp_log_argument(p, g, t)), quad)
    nats = value / TWO_PI
    return RateResult(nats / LN2, Scheme.MCP, g, Method.CLOSED_FORM)


def mcp_rate_integral_2d(
    p: SystemParams, g: float, lam: int | None = None, quad: QuadratureSettings | None = None
) -> RateResult:
    """MCP rate from the double integral of log(1 + S_S/S_N) over (theta, phi)."""
    check_stable(p, g)
    lam = p.lam if lam is None else lam
    pl = p.replace(lam=lam)

    def integrand(theta, phi):
        t = transfer_functions(pl, g, theta, phi)
        s = pl.power_mt * np.abs(t.hs) ** 2
        n = pl.var_z * np.abs(t.hn) ** 2 + pl.var_w
        return np.log1p(s / n)

    value, _ = integrate_periodic_2d(integrand, quad)
    nats = value / TWO_PI**2
    return RateResult(nats / LN2, Scheme.MCP, g, Method.INTEGRAL_ORACLE)


def mcp_rate_da(p: SystemParams, g: float, quad: QuadratureSettings | None = None) -> RateResult:
    """MCP rate with directional relay antennas: inter-relay coupling ignored."""
    if not g >= 0 or not math.isfinite(g):
        raise ValueError(f"relay gain must be finite and >= 0, got {g!r}")
    g2 = g * g

    def integrand(theta):
        c = np.cos(theta)
        h2sq = (p.gamma + 2.0 * p.eta * c) ** 2
        snr = p.power_mt * g2 * (p.beta + 2.0 * p.alpha * c) ** 2 * h2sq / (p.var_z * g2 * h2sq + p.var_w)
        return np.log1p(snr)

    value, _ = integrate_periodic_1d(integrand, quad)
    return RateResult(value / TWO_PI / LN2, Scheme.MCP_DA, g, Method.CLOSED_FORM)


def half_duplex_params(p: SystemParams) -> SystemParams:
    """Per-slot parameters of the half-duplex scheme: doubled powers, no relay coupling."""
    return p.replace(power_mt=2.0 * p.power_mt, power_rt=2.0 * p.power_rt, mu=0.0)


def mcp_rate_half_duplex(
    p: SystemParams, quad: QuadratureSettings | None = None, g: float | None = None
) -> RateResult:
    """Half-duplex relaying: half the directional-antenna rate at doubled powers.

    ``g`` overrides the full-power gain computed from the doubled budgets.
    """
    hd = half_duplex_params(p)
    g = da_optimal_gain(hd) if g is None else g
    r = mcp_rate_da(hd, g, quad)
    return RateResult(0.5 * r.rate, Scheme.MCP_HALF_DUPLEX, g, Method.CLOSED_FORM)


def mcp_rate_optimal(p: SystemParams, quad: QuadratureSettings | None = None) -> RateResult:
    """MCP rate at full relay power, which is optimal for joint decoding."""
    sol = solve_optimal_gain_mcp(p)
    return mcp_rate_closed(p, sol.gain, quad)
