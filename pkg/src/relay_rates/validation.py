"""End-to-end check of the analytic formulas against the ring simulator."""

from __future__ import annotations

import numpy as np

from .params import SystemParams
from .relay_power import relay_power_closed
from .simulator import RingConfig, estimate_output_psd, run_ring
from .spectra import FreqPair, output_psd

Z_LIMIT = 4.0
PSD_BIN_FRACTION = 0.95


def _z(simulated: float, analytic: float, stderr: float) -> float:
    diff = simulated - analytic
    if stderr > 0:
        return diff / stderr
    return 0.0 if diff == 0 else float(np.copysign(np.inf, diff))


def run_validation(p: SystemParams, cfg: RingConfig, analytic: SystemParams | None = None) -> dict:
    """Compare simulated relay power and output PSD with their analytic values.

    ``analytic`` lets the analytic side use different parameters from the
    simulated one (negative controls).  The PSD check passes when at least
    95% of (spatial mode, temporal bin) cells lie within 4 standard errors.
    """
    analytic = p if analytic is None else analytic
    traj = run_ring(p, cfg)
    est = estimate_output_psd(traj)

    power_ref = relay_power_closed(analytic, cfg.gain)
    z_power = _z(est.relay_power_mean, power_ref, est.relay_power_stderr)

    theta, phi = est.frequencies()
    psd_ref = output_psd(analytic, cfg.gain, FreqPair(theta, phi))
    z_psd = (est.psd_output - psd_ref) / est.psd_stderr
    within = float(np.mean(np.abs(z_psd) <= Z_LIMIT))

    checks = [
        {
            "name": "relay_power",
            "analytic": power_ref,
            "simulated": est.relay_power_mean,
            "stderr": est.relay_power_stderr,
            "z": z_power,
            "passed": bool(abs(z_power) <= Z_LIMIT),
        },
        {
            "name": "output_psd",
            "bins": int(z_psd.size),
            "fraction_within": within,
            "required_fraction": PSD_BIN_FRACTION,
            "max_abs_z": float(np.max(np.abs(z_psd))),
            "median_abs_z": float(np.median(np.abs(z_psd))),
            "passed": within >= PSD_BIN_FRACTION,
        },
    ]
    return {
        "params": p.as_dict(),
        "simulation": {
            "num_cells": cfg.num_cells,
            "num_symbols": cfg.num_symbols,
            "burn_in": traj.burn_in,
            "seed": cfg.seed,
            "gain": cfg.gain,
        },
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
