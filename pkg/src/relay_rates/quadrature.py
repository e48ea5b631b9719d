"""Trapezoid quadrature for smooth 2*pi-periodic integrands.

On a periodic domain the uniform trapezoid rule converges geometrically for
analytic integrands, so the grid is simply doubled until the value settles.
Integrands are vectorized: they receive an array of nodes and return an array
whose leading axis (axes, in 2D) matches the nodes.  Trailing axes are
integrated componentwise, which lets one call carry several related integrals
(or a complex one) on the same grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# Relative change below this, scaled by the mean |f|, is treated as rounding noise.
_ROUNDOFF = 1e-14
_CHUNK_NODES = 1 << 20


class NonFinite(ArithmeticError):
    pass


class NoConvergence(ArithmeticError):
    """Doubling hit the point cap before reaching ``rel_tol``."""

    def __init__(self, value, est_error: float, points: int):
        super().__init__(
            f"no convergence with {points} points per axis (relative change {est_error:.3g})"
        )
        self.value = value
        self.est_error = est_error
        self.points = points


@dataclass(frozen=True)
class QuadratureSettings:
    initial_points: int = 256
    max_points: int = 1 << 16
    rel_tol: float = 1e-9
    # The tensor grid in 2D is capped on total nodes, not per axis.
    max_points_2d: int = 1 << 22

    def __post_init__(self):
        n = self.initial_points
        if n < 8 or n & (n - 1):
            raise ValueError(f"initial_points must be a power of two >= 8, got {n}")
        if self.max_points < n:
            raise ValueError("max_points must be >= initial_points")
        if self.max_points_2d < n * n:
            raise ValueError("max_points_2d must be >= initial_points**2")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")

    def tightened(self, factor: float = 10.0) -> "QuadratureSettings":
        return QuadratureSettings(
            self.initial_points, self.max_points, self.rel_tol / factor, self.max_points_2d
        )


DEFAULT_SETTINGS = QuadratureSettings()


def periodic_nodes(n: int, offset: float = 0.0) -> np.ndarray:
    return TWO_PI * (np.arange(n) + offset) / n


def _checked(values) -> np.ndarray:
    values = np.asarray(values)
    if not np.all(np.isfinite(values)):
        raise NonFinite("integrand returned NaN or inf on the quadrature grid")
    return values


def _eval_1d(f, nodes: np.ndarray) -> np.ndarray:
    vals = _checked(f(nodes))
    if vals.ndim == 0:
        vals = np.broadcast_to(vals, nodes.shape)
    return vals


def _settled(new, old, magnitude, rel_tol) -> tuple[float, bool]:
    delta = np.abs(np.asarray(new) - np.asarray(old))
    scale = np.abs(np.asarray(new))
    floor = _ROUNDOFF * TWO_PI * np.asarray(magnitude)
    ok = (delta <= rel_tol * scale) | (delta <= floor)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(scale > 0, delta / scale, delta)
    return float(np.max(rel)), bool(np.all(ok))


def _scalarize(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


def integrate_periodic_1d(f, settings: QuadratureSettings | None = None, *, raise_on_failure=True):
    """Integrate ``f`` over one period ``[0, 2*pi)``.

    Returns ``(value, est_error)`` where ``est_error`` is the relative change
    at the last doubling.  ``value`` is a float for scalar integrands and an
    array for vector- or complex-valued ones.
    """
    s = settings or DEFAULT_SETTINGS
    n = s.initial_points
    vals = _eval_1d(f, periodic_nodes(n))
    total = vals.sum(axis=0)
    abs_total = np.abs(vals).sum(axis=0)
    value = TWO_PI * total / n
    est_error = np.inf
    while True:
        if 2 * n > s.max_points:
            if raise_on_failure:
                raise NoConvergence(_scalarize(value), est_error, n)
            return _scalarize(value), est_error
        # midpoints of the current grid
        new_vals = _eval_1d(f, periodic_nodes(n, 0.5))
        total = total + new_vals.sum(axis=0)
        abs_total = abs_total + np.abs(new_vals).sum(axis=0)
        n *= 2
        new_value = TWO_PI * total / n
        est_error, ok = _settled(new_value, value, abs_total / n, s.rel_tol)
        value = new_value
        if ok:
            return _scalarize(value), est_error


def _grid_sum(f, theta: np.ndarray, phi: np.ndarray):
    """Sum of ``f`` over the tensor grid theta x phi, evaluated in row chunks."""
    rows = max(1, _CHUNK_NODES // max(1, phi.size))
    total = None
    abs_total = None
    for start in range(0, theta.size, rows):
        t = theta[start:start + rows]
        vals = _checked(f(t[:, None], phi[None, :]))
        vals = np.broadcast_to(vals, (t.size, phi.size) + vals.shape[2:])
        part = vals.sum(axis=(0, 1))
        abs_part = np.abs(vals).sum(axis=(0, 1))
        total = part if total is None else total + part
        abs_total = abs_part if abs_total is None else abs_total + abs_part
    return total, abs_total


def integrate_periodic_2d(f, settings: QuadratureSettings | None = None, *, raise_on_failure=True):
    """Integrate ``f(theta, phi)`` over ``[0, 2*pi)**2`` on a doubling tensor grid.

    ``f`` is called with broadcastable arrays ``theta[:, None]`` and
    ``phi[None, :]``.  Both axes are doubled together; previously evaluated
    nodes are reused.
    """
    s = settings or DEFAULT_SETTINGS
    n = s.initial_points
    total, abs_total = _grid_sum(f, periodic_nodes(n), periodic_nodes(n))
    value = TWO_PI**2 * total / n**2
    est_error = np.inf
    while True:
        if 2 * n > s.max_points or (2 * n) ** 2 > s.max_points_2d:
            if raise_on_failure:
                raise NoConvergence(_scalarize(value), est_error, n)
            return _scalarize(value), est_error
        even, odd = periodic_nodes(n), periodic_nodes(n, 0.5)
        fine = periodic_nodes(2 * n)
        # new nodes: odd theta rows on the fine phi grid, plus even rows at odd phi
        t1, a1 = _grid_sum(f, odd, fine)
        t2, a2 = _grid_sum(f, even, odd)
        total = total + t1 + t2
        abs_total = abs_total + a1 + a2
        n *= 2
        new_value = TWO_PI**2 * total / n**2
        est_error, ok = _settled(new_value, value, abs_total / n**2, s.rel_tol)
        value = new_value
        if ok:
            return _scalarize(value), est_error
