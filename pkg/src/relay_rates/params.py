"""System parameters for the linear cellular uplink with full-duplex AF relays.

All channel gains are amplitude gains: the power gain from a mobile terminal
to its local relay is ``beta**2``, and so on.  Powers and noise variances are
linear (not dB).
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass


class ParameterError(ValueError):
    """Invalid system parameter; ``field`` names the offending attribute."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class NonPositivePower(ParameterError):
    pass


class NegativeGain(ParameterError):
    pass


class ZeroDelay(ParameterError):
    pass


class UnstableGain(ValueError):
    """Relay gain at or beyond the feedback stability edge ``2*mu*g >= 1``."""

    def __init__(self, gain: float, mu: float):
        super().__init__(
            f"relay gain {gain!r} violates stability 2*mu*g < 1 (mu={mu!r}, "
            f"2*mu*g={2 * mu * gain!r})"
        )
        self.gain = gain
        self.mu = mu


class Binding(str, enum.Enum):
    """Which condition fixed a relay gain."""

    POWER = "PowerConstraint"
    STABILITY = "StabilityBound"
    INTERIOR = "Interior"


@dataclass(frozen=True)
class SystemParams:
    alpha: float = 0.2
    beta: float = 0.8
    gamma: float = 0.8
    eta: float = 0.2
    mu: float = 0.1
    power_mt: float = 10.0
    power_rt: float = 100.0
    var_z: float = 1.0
    var_w: float = 1.0
    lam: int = 1

    GAIN_FIELDS = ("alpha", "beta", "gamma", "eta", "mu")
    POSITIVE_FIELDS = ("power_mt", "power_rt", "var_z", "var_w")

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @property
    def stability_limit(self) -> float:
        """Supremum of admissible relay gains (``inf`` without inter-relay coupling)."""
        return math.inf if self.mu == 0 else 1.0 / (2.0 * self.mu)


@dataclass(frozen=True)
class GainSolution:
    gain: float
    achieved_power: float
    binding: Binding


def validate(raw: SystemParams) -> SystemParams:
    """Return ``raw`` unchanged if every field is admissible, else raise."""
    for name in SystemParams.GAIN_FIELDS:
        value = getattr(raw, name)
        if not math.isfinite(value) or value < 0:
            raise NegativeGain(name, f"gain must be finite and >= 0, got {value!r}")
    for name in SystemParams.POSITIVE_FIELDS:
        value = getattr(raw, name)
        if not math.isfinite(value) or value <= 0:
            raise NonPositivePower(name, f"must be finite and > 0, got {value!r}")
    if int(raw.lam) != raw.lam:
        raise ParameterError("lam", f"relay delay must be an integer, got {raw.lam!r}")
    if raw.lam < 1:
        raise ZeroDelay("lam", f"relay delay must be >= 1 symbol, got {raw.lam!r}")
    return raw


def check_stable(p: SystemParams, g: float) -> None:
    """Raise unless ``g`` is a nonnegative gain strictly inside the stable range."""
    if not g >= 0 or not math.isfinite(g):
        raise ValueError(f"relay gain must be finite and >= 0, got {g!r}")
    if p.mu > 0 and 2.0 * p.mu * g >= 1.0:
        raise UnstableGain(g, p.mu)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


# Settings used for the numerical-results figure: P/sigma^2 = 10 dB,
# Q/sigma^2 = 20 dB, sigma^2 = 1.
FIG3 = SystemParams(
    alpha=0.2, beta=0.8, gamma=0.8, eta=0.2, mu=0.1,
    power_mt=db_to_linear(10.0), power_rt=db_to_linear(20.0),
    var_z=1.0, var_w=1.0, lam=1,
)
