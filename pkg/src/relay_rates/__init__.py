"""Sum-rates of a linear (Wyner-type) cellular uplink with full-duplex
amplify-and-forward relays, under joint multi-cell and single-cell decoding."""

from .mcp_rate import (
    Method,
    RateResult,
    Scheme,
    mcp_rate_closed,
    mcp_rate_da,
    mcp_rate_half_duplex,
    mcp_rate_integral_2d,
    mcp_rate_optimal,
)
from .params import (
    FIG3,
    Binding,
    GainSolution,
    NegativeGain,
    NonPositivePower,
    ParameterError,
    SystemParams,
    UnstableGain,
    ZeroDelay,
    db_to_linear,
    validate,
)
from .quadrature import QuadratureSettings, integrate_periodic_1d, integrate_periodic_2d
from .relay_power import (
    relay_power_closed,
    relay_power_integral_1d,
    relay_power_integral_2d,
    solve_optimal_gain_mcp,
)
from .scp_rate import ScpPsdTriple, scp_optimal_gain, scp_psds, scp_rate
from .spectra import FreqPair, TransferEval, eval_transfers, noise_psd, signal_psd

__version__ = "0.1.0"
