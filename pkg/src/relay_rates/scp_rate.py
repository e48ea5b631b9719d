"""Per-cell sum-rate with single-cell processing (SCP).

Each BS decodes only its own MT and treats the other cells' signals as
Gaussian interference.  Per temporal frequency phi the output splits into a
useful part (the spatial average of Hs), interference (the spatial
fluctuation of Hs around that average) and noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mcp_rate import LN2, Method, RateResult, Scheme
from .params import Binding, GainSolution, SystemParams, check_stable
from .quadrature import DEFAULT_SETTINGS, QuadratureSettings, integrate_periodic_1d
from .relay_power import relay_power_closed, solve_optimal_gain_mcp
from .spectra import transfer_functions

TWO_PI = 2.0 * np.pi
GRID_SIZE = 64
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ScpPsdTriple:
    psd_useful: float | np.ndarray
    psd_interference: float | np.ndarray
    psd_noise: float | np.ndarray


def _squeeze(x, scalar: bool):
    return float(x[0]) if scalar else x


def scp_psds(p: SystemParams, g: float, phi, quad: QuadratureSettings | None = None) -> ScpPsdTriple:
    """Useful, interference and noise PSDs at temporal frequency ``phi`` (scalar or array).

    The interference PSD is the theta-variance of Hs about its theta-mean,
    integrated on the same trapezoid grid as the mean, so it is nonnegative
    by construction.
    """
    check_stable(p, g)
    scalar = np.ndim(phi) == 0
    phi = np.atleast_1d(np.asarray(phi, dtype=float))

    def moments(theta):
        t = transfer_functions(p, g, theta[:, None], phi[None, :])
        return np.stack([t.hs, np.abs(t.hn) ** 2], axis=-1)

    sums, _ = integrate_periodic_1d(moments, quad)
    mean_hs = sums[:, 0] / TWO_PI
    mean_hn2 = sums[:, 1].real / TWO_PI

    def spread(theta):
        t = transfer_functions(p, g, theta[:, None], phi[None, :])
        return np.abs(t.hs - mean_hs[None, :]) ** 2

    var_hs, _ = integrate_periodic_1d(spread, quad)
    var_hs = np.atleast_1d(var_hs) / TWO_PI

    useful = p.power_mt * np.abs(mean_hs) ** 2
    interference = p.power_mt * var_hs
    noise = p.var_z * mean_hn2 + p.var_w
    return ScpPsdTriple(
        _squeeze(useful, scalar), _squeeze(interference, scalar), _squeeze(noise, scalar)
    )


def scp_rate(p: SystemParams, g: float, quad: QuadratureSettings | None = None) -> RateResult:
    """SCP rate at relay gain ``g``: phi-average of log(1 + S_U / (S_I + S_N))."""
    check_stable(p, g)
    outer = quad or DEFAULT_SETTINGS
    inner = outer.tightened(10.0)

    def integrand(phi):
        psd = scp_psds(p, g, phi, inner)
        return np.log1p(psd.psd_useful / (psd.psd_interference + psd.psd_noise))

    value, _ = integrate_periodic_1d(integrand, outer)
    return RateResult(value / TWO_PI / LN2, Scheme.SCP, g, Method.CLOSED_FORM)


def gain_search_grid(g_max: float, size: int = GRID_SIZE) -> np.ndarray:
    """Search grid on (0, g_max], geometrically refined toward both ends."""
    half = size // 2
    low = np.geomspace(1e-3, 0.5, half)
    high = 1.0 - np.geomspace(0.5, 1e-4, size - half)[1:]
    u = np.concatenate([low, high, [1.0]])
    return g_max * u


def _golden_max(f, a: float, b: float, xtol: float):
    """Golden-section search for a maximum of ``f`` on ``[a, b]``."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def scp_optimal_gain(
    p: SystemParams, quad: QuadratureSettings | None = None, xtol: float = 1e-6
) -> GainSolution:
    """Relay gain in (0, g_o] maximizing the SCP rate, g_o being the full-power gain.

    A coarse grid locates the best bracket, then golden-section search refines
    it.  Unimodality is not assumed: the refined point only replaces the grid
    optimum if it is at least as good.
    """
    g_full = solve_optimal_gain_mcp(p).gain
    grid = gain_search_grid(g_full)
    rates = np.array([scp_rate(p, g, quad).rate for g in grid])
    best = int(np.argmax(rates))
    g_best, r_best = float(grid[best]), float(rates[best])

    lo = float(grid[best - 1]) if best > 0 else 0.0
    hi = float(grid[min(best + 1, grid.size - 1)])
    g_ref, r_ref = _golden_max(lambda g: scp_rate(p, g, quad).rate, lo, hi, xtol * g_full)
    if r_ref > r_best:
        g_best, r_best = g_ref, r_ref

    binding = Binding.INTERIOR if g_best < g_full * (1.0 - xtol) else Binding.POWER
    return GainSolution(g_best, relay_power_closed(p, g_best), binding)


def scp_rate_optimal(p: SystemParams, quad: QuadratureSettings | None = None) -> tuple[RateResult, GainSolution]:
    sol = scp_optimal_gain(p, quad)
    return scp_rate(p, sol.gain, quad), sol
