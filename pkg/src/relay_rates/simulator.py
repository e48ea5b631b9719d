"""Time-domain Monte Carlo of a finite ring of relay cells.

A ring of ``num_cells`` cells with wrap-around adjacency stands in for the
infinite line; the circulant structure keeps every spatial DFT mode an exact
eigenmode, so empirical spectra can be compared bin by bin with the
analytic PSDs at ``theta_k = 2 pi k / num_cells``.

Arrays are time-major: shape ``(num_symbols, num_cells)``.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal

from .params import SystemParams, check_stable

NUM_BATCHES = 16
SEGMENT_LENGTH = 256
MIN_SEGMENTS = 64
TRAJECTORY_MAGIC = b"RLYTRJ01"
_HEADER = struct.Struct("<8sQQQ")  # 32 bytes: magic, num_cells, num_symbols, lambda


class InsufficientSamples(ValueError):
    pass


@dataclass(frozen=True)
class RingConfig:
    num_cells: int = 64
    num_symbols: int = 1 << 16
    burn_in: int | None = None  # None: derived from the loop memory, see resolve_burn_in
    seed: int = 0
    gain: float = 0.0

    def __post_init__(self):
        if self.num_cells < 8:
            raise ValueError(f"num_cells must be >= 8, got {self.num_cells}")
        if self.num_symbols < 1:
            raise ValueError("num_symbols must be positive")
        if self.burn_in is not None and not 0 <= self.burn_in < self.num_symbols:
            raise ValueError("burn_in must lie in [0, num_symbols)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def resolve_burn_in(self, p: SystemParams) -> int:
        """Explicit burn_in, or 100 * lam / (1 - 2 mu g) capped at a quarter of the run."""
        if self.burn_in is not None:
            return self.burn_in
        memory = 100.0 * p.lam / (1.0 - 2.0 * p.mu * self.gain)
        return int(min(math.ceil(memory), self.num_symbols // 4))


@dataclass
class Trajectory:
    x: np.ndarray
    r: np.ndarray
    y: np.ndarray
    params: SystemParams
    config: RingConfig
    burn_in: int


@dataclass
class SimulationEstimate:
    relay_power_mean: float
    relay_power_stderr: float
    psd_output: np.ndarray  # (num_cells, segment_length): [spatial mode, temporal bin]
    psd_stderr: np.ndarray

    def frequencies(self):
        """(theta, phi) grids matching ``psd_output``."""
        m, n = self.psd_output.shape
        theta = 2.0 * np.pi * np.arange(m) / m
        phi = 2.0 * np.pi * np.arange(n) / n
        return np.meshgrid(theta, phi, indexing="ij")


def _complex_gaussian(rng: np.random.Generator, shape, var: float) -> np.ndarray:
    scale = math.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _neighbours(a: np.ndarray) -> np.ndarray:
    """Sum of the two ring neighbours along the cell axis."""
    return np.roll(a, 1, axis=-1) + np.roll(a, -1, axis=-1)


def run_ring(p: SystemParams, cfg: RingConfig) -> Trajectory:
    """Run the relay and BS recursions on the ring, starting from R = 0."""
    check_stable(p, cfg.gain)
    rng = np.random.default_rng(cfg.seed)
    shape = (cfg.num_symbols, cfg.num_cells)
    x = _complex_gaussian(rng, shape, p.power_mt)
    z = _complex_gaussian(rng, shape, p.var_z)
    w = _complex_gaussian(rng, shape, p.var_w)

    g, lam = cfg.gain, p.lam
    r = g * (p.beta * x + p.alpha * _neighbours(x) + z)
    if p.mu != 0 and g != 0:
        # rows n..n+lam-1 depend only on rows n-lam..n-1, so step lam rows at a time
        left = np.roll(np.arange(cfg.num_cells), 1)
        right = np.roll(np.arange(cfg.num_cells), -1)
        gm = g * p.mu
        for n in range(lam, cfg.num_symbols, lam):
            prev = r[n - lam:min(n, cfg.num_symbols - lam)]
            stop = n + prev.shape[0]
            r[n:stop] += gm * (prev[:, left] + prev[:, right])

    y = w.copy()
    delayed = r[: cfg.num_symbols - lam]
    y[lam:] += p.gamma * delayed + p.eta * _neighbours(delayed)
    return Trajectory(x, r, y, p, cfg, cfg.resolve_burn_in(p))


def _batch_stats(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and batch-means standard error over the leading axis."""
    values = np.asarray(values)
    mean = values.mean(axis=0)
    stderr = values.std(axis=0, ddof=1) / math.sqrt(values.shape[0])
    return mean, stderr


def estimate_relay_power(traj: Trajectory, cfg: RingConfig | None = None) -> tuple[float, float]:
    """Mean |R|^2 after burn-in, with a standard error from 16 batch means."""
    power = np.abs(traj.r[traj.burn_in:]) ** 2
    batches = np.array_split(power, NUM_BATCHES, axis=0)
    means = np.array([b.mean() for b in batches])
    mean, stderr = _batch_stats(means)
    return float(mean), float(stderr)


def estimate_output_psd(traj: Trajectory, cfg: RingConfig | None = None,
                        segment_length: int = SEGMENT_LENGTH) -> SimulationEstimate:
    """Empirical 2D PSD of the BS output.

    Spatial DFT across the ring (unitary scaling), then a flat-window Welch
    periodogram with 50% overlap along time for each spatial mode.  The
    post-burn-in record is cut into 16 contiguous batches; the PSD is the mean
    of the batch estimates and the standard error comes from their spread.
    White input of variance v gives a flat estimate at level v.
    """
    y = traj.y[traj.burn_in:]
    batch_len = y.shape[0] // NUM_BATCHES
    per_batch = (batch_len - segment_length) // (segment_length // 2) + 1 if batch_len >= segment_length else 0
    if per_batch * NUM_BATCHES < MIN_SEGMENTS:
        raise InsufficientSamples(
            f"{y.shape[0]} post-burn-in symbols give {per_batch * NUM_BATCHES} segments "
            f"of {segment_length}; need at least {MIN_SEGMENTS}"
        )
    modes = np.fft.fft(y, axis=1) / math.sqrt(y.shape[1])
    estimates = []
    for i in range(NUM_BATCHES):
        chunk = modes[i * batch_len:(i + 1) * batch_len]
        _, pxx = signal.welch(
            chunk, fs=1.0, window="boxcar", nperseg=segment_length,
            noverlap=segment_length // 2, detrend=False,
            return_onesided=False, scaling="density", axis=0,
        )
        estimates.append(pxx.T)
    psd, stderr = _batch_stats(np.array(estimates))
    power_mean, power_err = estimate_relay_power(traj)
    return SimulationEstimate(power_mean, power_err, psd, stderr)


def write_trajectory(path, traj: Trajectory) -> None:
    """Dump (X, R, Y) as little-endian complex64 triples, cell-major then symbol."""
    cfg = traj.config
    data = np.stack([traj.x, traj.r, traj.y], axis=-1)  # (symbols, cells, 3)
    data = np.ascontiguousarray(data.transpose(1, 0, 2)).astype("<c8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(TRAJECTORY_MAGIC, cfg.num_cells, cfg.num_symbols, traj.params.lam))
        fh.write(data.tobytes())


def read_trajectory(path) -> tuple[dict, np.ndarray]:
    """Read a dump; returns the header and an array of shape (cells, symbols, 3)."""
    raw = Path(path).read_bytes()
    magic, cells, symbols, lam = _HEADER.unpack_from(raw)
    if magic != TRAJECTORY_MAGIC:
        raise ValueError(f"not a trajectory file (magic {magic!r})")
    data = np.frombuffer(raw, dtype="<c8", offset=_HEADER.size).reshape(cells, symbols, 3)
    return {"num_cells": cells, "num_symbols": symbols, "lambda": lam}, data
