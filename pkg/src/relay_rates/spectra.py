"""Space-time transfer functions and output spectra of the relay network.

The network maps MT symbols X, relay noise Z and BS noise W to the BS outputs
through a 2D LTI system.  In the (spatial, temporal) frequency domain
``(theta, phi)`` the elementary responses are

    H1 = beta + 2 alpha cos(theta)          MT -> relay
    H2 = gamma + 2 eta cos(theta)           relay -> BS
    Hr = g exp(-1j lam phi)                 relay amplify + delay
    H3 = 2 mu cos(theta)                    relay -> adjacent relays

and closing the inter-relay loop gives the signal and noise responses
``Hs = H1 Hr H2 / (1 - Hr H3)`` and ``Hn = Hr H2 / (1 - Hr H3)``.

Every function broadcasts over array-valued ``theta`` and ``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import SystemParams, check_stable

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class FreqPair:
    theta: float | np.ndarray
    phi: float | np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", np.mod(self.theta, TWO_PI))
        object.__setattr__(self, "phi", np.mod(self.phi, TWO_PI))


@dataclass(frozen=True)
class TransferEval:
    h1: complex
    h2: complex
    hr: complex
    h3: complex
    hs: complex
    hn: complex
    denominator: complex


def _as_pair(f) -> FreqPair:
    return f if isinstance(f, FreqPair) else FreqPair(*f)


def transfer_functions(p: SystemParams, g: float, theta, phi) -> TransferEval:
    """Array-valued transfer functions on a broadcast (theta, phi) grid.

    Stability is not checked here; callers go through :func:`eval_transfers`
    or check once per gain before looping.
    """
    cos_t = np.cos(theta)
    h1 = p.beta + 2.0 * p.alpha * cos_t
    h2 = p.gamma + 2.0 * p.eta * cos_t
    h3 = 2.0 * p.mu * cos_t
    hr = g * np.exp(-1j * p.lam * np.asarray(phi))
    denominator = 1.0 - hr * h3
    hn = hr * h2 / denominator
    hs = h1 * hn
    return TransferEval(h1, h2, hr, h3, hs, hn, denominator)


def eval_transfers(p: SystemParams, g: float, f) -> TransferEval:
    """All transfer functions at frequency pair ``f`` (a FreqPair or (theta, phi))."""
    check_stable(p, g)
    f = _as_pair(f)
    t = transfer_functions(p, g, f.theta, f.phi)
    # the loop denominator never vanishes inside the stable range
    assert np.all(np.abs(t.denominator) > 0)
    return t


def signal_psd(p: SystemParams, g: float, f):
    """Useful-signal PSD ``P |Hs|**2``."""
    t = eval_transfers(p, g, f)
    return p.power_mt * np.abs(t.hs) ** 2


def noise_psd(p: SystemParams, g: float, f):
    """Noise PSD ``var_z |Hn|**2 + var_w``."""
    t = eval_transfers(p, g, f)
    return p.var_z * np.abs(t.hn) ** 2 + p.var_w


def output_psd(p: SystemParams, g: float, f):
    """PSD of the BS output: signal plus noise."""
    t = eval_transfers(p, g, f)
    return p.power_mt * np.abs(t.hs) ** 2 + p.var_z * np.abs(t.hn) ** 2 + p.var_w
