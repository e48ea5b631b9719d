"""Scheme evaluation, parameter sweeps and the flat key=value config format."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .mcp_rate import (
    RateResult,
    Scheme,
    half_duplex_params,
    mcp_rate_closed,
    mcp_rate_da,
    mcp_rate_half_duplex,
)
from .params import FIG3, Binding, GainSolution, SystemParams, check_stable, db_to_linear, validate
from .quadrature import QuadratureSettings
from .relay_power import da_optimal_gain, relay_power_closed, solve_optimal_gain_mcp
from .scp_rate import scp_optimal_gain, scp_rate

SWEEP_VARS = ("mu", "alpha", "eta", "P_db", "Q_db")
OUTPUT_FORMATS = ("csv", "json")
CSV_FIELDS = ("sweep_var", "scheme", "rate_bits", "gain", "relay_power", "binding", "error")
DEFAULT_MU_GRID = tuple(round(0.05 * k, 2) for k in range(10))
THREADS_ENV = "RELAY_RATES_THREADS"

SCHEME_ALIASES = {
    "mcp": Scheme.MCP,
    "mcp_da": Scheme.MCP_DA,
    "da": Scheme.MCP_DA,
    "mcp_hd": Scheme.MCP_HALF_DUPLEX,
    "hd": Scheme.MCP_HALF_DUPLEX,
    "half_duplex": Scheme.MCP_HALF_DUPLEX,
    "mcp_halfduplex": Scheme.MCP_HALF_DUPLEX,
    "scp": Scheme.SCP,
}


class ConfigError(ValueError):
    pass


def parse_scheme(name: str) -> Scheme:
    key = name.strip().lower().replace("-", "_")
    try:
        return SCHEME_ALIASES[key]
    except KeyError:
        raise ConfigError(
            f"unknown scheme {name!r}; choose from {sorted(set(SCHEME_ALIASES))}"
        ) from None


def scheme_token(s: Scheme) -> str:
    return {
        Scheme.MCP: "mcp",
        Scheme.MCP_DA: "mcp_da",
        Scheme.MCP_HALF_DUPLEX: "mcp_hd",
        Scheme.SCP: "scp",
    }[s]


# -- config files -------------------------------------------------------------

def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines (``#`` comments) or a JSON object into strings."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        obj = json.loads(stripped)
        out = {}
        for k, v in obj.items():
            if isinstance(v, (list, tuple)):
                v = ",".join(repr(float(x)) if isinstance(x, (int, float)) and not isinstance(x, bool) else str(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = repr(v)
            out[k] = str(v)
        return out
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key.replace("-", "_")] = value
    return out


def read_config(path) -> dict[str, str]:
    return parse_config_text(Path(path).read_text())


def _bool(value: str) -> bool:
    v = str(value).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


def _float(key: str, value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: not a number: {value!r}") from None


def params_from_mapping(m: dict) -> tuple[SystemParams, float]:
    """Build SystemParams from config keys; returns (params, sigma2).

    Powers come from ``power_mt``/``power_rt`` (linear) or ``p_db``/``q_db``
    (dB relative to ``sigma2``).  With ``power_gains`` true the gain keys are
    read as power gains and converted to amplitudes.
    """
    sigma2 = _float("sigma2", m.get("sigma2", 1.0))
    power_gains = _bool(m.get("power_gains", "false"))
    gains = {}
    for name in SystemParams.GAIN_FIELDS:
        value = _float(name, m.get(name, getattr(FIG3, name)))
        if power_gains:
            if value < 0:
                raise ConfigError(f"{name}: power gain must be >= 0, got {value!r}")
            value = math.sqrt(value)
        gains[name] = value

    def power(linear_key, db_key, default_db):
        if linear_key in m:
            return _float(linear_key, m[linear_key])
        return sigma2 * db_to_linear(_float(db_key, m.get(db_key, default_db)))

    lam_raw = m.get("lambda", m.get("lam", 1))
    try:
        lam = int(str(lam_raw))
    except ValueError:
        raise ConfigError(f"lambda: not an integer: {lam_raw!r}") from None
    p = SystemParams(
        **gains,
        power_mt=power("power_mt", "p_db", 10.0),
        power_rt=power("power_rt", "q_db", 20.0),
        var_z=_float("var_z", m.get("var_z", sigma2)),
        var_w=_float("var_w", m.get("var_w", sigma2)),
        lam=lam,
    )
    return p, sigma2


# -- sweep specification ------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    base: SystemParams = FIG3
    sweep_var: str = "mu"
    values: tuple[float, ...] = DEFAULT_MU_GRID
    schemes: tuple[Scheme, ...] = (Scheme.MCP, Scheme.SCP)
    output_format: str = "csv"
    sigma2: float = 1.0
    nats: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "schemes", tuple(Scheme(s) for s in self.schemes))
        if self.sweep_var not in SWEEP_VARS:
            raise ConfigError(f"sweep_var must be one of {SWEEP_VARS}, got {self.sweep_var!r}")
        if not self.values:
            raise ConfigError("values: sweep needs at least one value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError("values: must be strictly increasing")
        if not self.schemes:
            raise ConfigError("schemes: at least one scheme is required")
        if len(set(self.schemes)) != len(self.schemes):
            raise ConfigError("schemes: duplicate entries")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"output_format must be one of {OUTPUT_FORMATS}")
        validate(self.base)

    def params_at(self, value: float) -> SystemParams:
        if self.sweep_var == "P_db":
            return self.base.replace(power_mt=self.sigma2 * db_to_linear(value))
        if self.sweep_var == "Q_db":
            return self.base.replace(power_rt=self.sigma2 * db_to_linear(value))
        return self.base.replace(**{self.sweep_var: value})

    def to_mapping(self) -> dict[str, str]:
        b = self.base
        return {
            "alpha": repr(b.alpha), "beta": repr(b.beta), "gamma": repr(b.gamma),
            "eta": repr(b.eta), "mu": repr(b.mu),
            "power_mt": repr(b.power_mt), "power_rt": repr(b.power_rt),
            "var_z": repr(b.var_z), "var_w": repr(b.var_w), "lambda": str(b.lam),
            "sigma2": repr(self.sigma2),
            "sweep_var": self.sweep_var,
            "values": ",".join(repr(v) for v in self.values),
            "schemes": ",".join(scheme_token(s) for s in self.schemes),
            "output_format": self.output_format,
            "nats": "true" if self.nats else "false",
        }

    def to_config_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.to_mapping().items())

    def to_json(self) -> str:
        m = self.to_mapping()
        obj = {k: v for k, v in m.items()}
        for k in ("alpha", "beta", "gamma", "eta", "mu", "power_mt", "power_rt", "var_z", "var_w", "sigma2"):
            obj[k] = float(m[k])
        obj["lambda"] = self.base.lam
        obj["values"] = list(self.values)
        obj["schemes"] = [scheme_token(s) for s in self.schemes]
        obj["nats"] = self.nats
        return json.dumps(obj, indent=2)

    @classmethod
    def from_mapping(cls, m: dict) -> "SweepSpec":
        base, sigma2 = params_from_mapping(m)
        sweep_var = m.get("sweep_var", "mu")
        if "values" in m:
            values = tuple(_float("values", v) for v in str(m["values"]).split(",") if v.strip())
        elif sweep_var == "mu":
            values = DEFAULT_MU_GRID
        else:
            raise ConfigError("values: required unless sweeping mu")
        schemes_raw = m.get("schemes", "mcp,scp")
        schemes = tuple(parse_scheme(s) for s in str(schemes_raw).split(",") if s.strip())
        return cls(
            base=base, sweep_var=sweep_var, values=values, schemes=schemes,
            output_format=m.get("output_format", "csv"), sigma2=sigma2,
            nats=_bool(m.get("nats", "false")),
        )


# -- evaluation ---------------------------------------------------------------

@dataclass(frozen=True)
class SchemeOutcome:
    scheme: Scheme
    rate: float = math.nan  # bits
    gain: float = math.nan
    relay_power: float = math.nan
    binding: str = ""
    error: str = ""


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    outcomes: dict = field(default_factory=dict)  # Scheme -> SchemeOutcome


def evaluate_scheme(
    p: SystemParams, scheme: Scheme, quad: QuadratureSettings | None = None,
    force_gain: float | None = None,
) -> tuple[RateResult, GainSolution]:
    """Rate of ``scheme`` at its optimal relay gain, or at ``force_gain``."""
    if scheme is Scheme.MCP_HALF_DUPLEX:
        hd = half_duplex_params(p)
        g = da_optimal_gain(hd) if force_gain is None else force_gain
        sol = GainSolution(g, relay_power_closed(hd, g), Binding.POWER)
        return mcp_rate_half_duplex(p, quad, g=g), sol
    if scheme is Scheme.MCP_DA:
        da = p.replace(mu=0.0)
        g = da_optimal_gain(da) if force_gain is None else force_gain
        return mcp_rate_da(p, g, quad), GainSolution(g, relay_power_closed(da, g), Binding.POWER)
    if force_gain is not None:
        check_stable(p, force_gain)
        full = solve_optimal_gain_mcp(p).gain
        binding = Binding.POWER if force_gain >= full * (1 - 1e-9) else Binding.INTERIOR
        sol = GainSolution(force_gain, relay_power_closed(p, force_gain), binding)
    elif scheme is Scheme.MCP:
        sol = solve_optimal_gain_mcp(p)
    else:
        sol = scp_optimal_gain(p, quad)
    rate_fn = mcp_rate_closed if scheme is Scheme.MCP else scp_rate
    return rate_fn(p, sol.gain, quad), sol


def _evaluate_row(spec: SweepSpec, value: float, quad) -> SweepRow:
    outcomes = {}
    for scheme in spec.schemes:
        try:
            p = validate(spec.params_at(value))
            rate, sol = evaluate_scheme(p, scheme, quad)
            outcomes[scheme] = SchemeOutcome(
                scheme, rate.rate, sol.gain, sol.achieved_power, sol.binding.value
            )
        except Exception as exc:  # recorded per row; the sweep carries on
            outcomes[scheme] = SchemeOutcome(scheme, error=f"{type(exc).__name__}: {exc}")
    return SweepRow(value, outcomes)


def worker_count(n_tasks: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    workers = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(workers, n_tasks))


def run_sweep(spec: SweepSpec, quad: QuadratureSettings | None = None,
              workers: int | None = None) -> list[SweepRow]:
    """Evaluate every sweep value; rows come back in sweep order."""
    workers = worker_count(len(spec.values)) if workers is None else workers
    if workers == 1:
        return [_evaluate_row(spec, v, quad) for v in spec.values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda v: _evaluate_row(spec, v, quad), spec.values))


# -- output -------------------------------------------------------------------

def _fmt(x: float) -> str:
    return "" if math.isnan(x) else repr(float(x))


def row_records(rows: list[SweepRow], nats: bool = False) -> list[dict]:
    rate_key = "rate_nats" if nats else "rate_bits"
    factor = math.log(2.0) if nats else 1.0
    records = []
    for row in rows:
        for scheme, o in row.outcomes.items():
            records.append({
                "sweep_var": row.sweep_value,
                "scheme": scheme.value,
                rate_key: o.rate * factor,
                "gain": o.gain,
                "relay_power": o.relay_power,
                "binding": o.binding,
                "error": o.error,
            })
    return records


def rows_to_csv(rows: list[SweepRow], nats: bool = False) -> str:
    records = row_records(rows, nats)
    fields = list(CSV_FIELDS)
    if nats:
        fields[2] = "rate_nats"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow({k: _fmt(v) if isinstance(v, float) else v for k, v in rec.items()})
    return buf.getvalue()


def rows_to_json(rows: list[SweepRow], nats: bool = False) -> str:
    records = row_records(rows, nats)
    for rec in records:
        for k, v in rec.items():
            if isinstance(v, float) and math.isnan(v):
                rec[k] = None
    return json.dumps(records, indent=2)


def series(rows: list[SweepRow], scheme: Scheme, attr: str = "rate") -> np.ndarray:
    """One column of a sweep as an array, e.g. ``series(rows, Scheme.SCP, "gain")``."""
    return np.array([getattr(r.outcomes[scheme], attr) for r in rows])
