"""Command-line interface: ``relay-rates rate | sweep | validate``.

Exit codes: 0 success, 2 invalid input, 3 unstable forced gain,
4 failed simulator validation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .mcp_rate import LN2
from .params import ParameterError, UnstableGain, validate
from .relay_power import solve_optimal_gain_mcp
from .simulator import InsufficientSamples, RingConfig
from .sweep import (
    ConfigError,
    SweepSpec,
    evaluate_scheme,
    params_from_mapping,
    parse_scheme,
    read_config,
    rows_to_csv,
    rows_to_json,
    run_sweep,
)
from .validation import run_validation

EXIT_INVALID = 2
EXIT_UNSTABLE = 3
EXIT_VALIDATION_FAILED = 4

# flag dest -> config key
_PARAM_FLAGS = {
    "alpha": "alpha", "beta": "beta", "gamma": "gamma", "eta": "eta", "mu": "mu",
    "p_db": "p_db", "q_db": "q_db", "power_mt": "power_mt", "power_rt": "power_rt",
    "sigma2": "sigma2", "var_z": "var_z", "var_w": "var_w", "lam": "lambda",
}


def _add_param_flags(ap: argparse.ArgumentParser) -> None:
    g = ap.add_argument_group("system parameters (defaults: numerical-results settings)")
    g.add_argument("--config", help="flat key=value config file ('#' comments) or JSON object")
    for name in ("alpha", "beta", "gamma", "eta", "mu"):
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--power-gains", action="store_true",
                   help="read --alpha.. --mu as power gains (squared amplitudes)")
    g.add_argument("--p-db", type=float, help="MT power P in dB relative to --sigma2")
    g.add_argument("--q-db", type=float, help="relay power budget Q in dB relative to --sigma2")
    g.add_argument("--p", dest="power_mt", type=float, help="MT power P, linear")
    g.add_argument("--q", dest="power_rt", type=float, help="relay power budget Q, linear")
    g.add_argument("--sigma2", type=float, help="reference noise variance (default 1)")
    g.add_argument("--var-z", type=float, help="relay noise variance (default sigma2)")
    g.add_argument("--var-w", type=float, help="BS noise variance (default sigma2)")
    g.add_argument("--lambda", dest="lam", type=int, help="relay delay in symbols")
    g.add_argument("--nats", action="store_true", help="report rates in nats")


def _mapping(args) -> dict:
    m = read_config(args.config) if args.config else {}
    for dest, key in _PARAM_FLAGS.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        # a flag beats the other spelling of the same quantity in the config
        if key == "p_db":
            m.pop("power_mt", None)
        elif key == "q_db":
            m.pop("power_rt", None)
        m[key] = repr(value) if isinstance(value, float) else str(value)
    if args.power_gains:
        m["power_gains"] = "true"
    if args.nats:
        m["nats"] = "true"
    return m


def _schemes(raw_list) -> list:
    names = []
    for raw in raw_list or []:
        names.extend(s for s in raw.split(",") if s.strip())
    return [parse_scheme(s) for s in names]


def cmd_rate(args) -> int:
    m = _mapping(args)
    p, _ = params_from_mapping(m)
    validate(p)
    nats = args.nats or m.get("nats") == "true"
    schemes = _schemes(args.scheme) or [parse_scheme("mcp"), parse_scheme("scp")]
    out = []
    for scheme in schemes:
        rate, sol = evaluate_scheme(p, scheme, force_gain=args.force_gain)
        out.append({
            "scheme": rate.scheme.value,
            "rate_nats" if nats else "rate_bits": rate.rate * LN2 if nats else rate.rate,
            "gain": rate.gain_used,
            "relay_power": sol.achieved_power,
            "binding": sol.binding.value,
            "method": rate.method.value,
        })
    print(json.dumps(out, indent=2))
    return 0


def cmd_sweep(args) -> int:
    m = _mapping(args)
    if args.sweep_var:
        m["sweep_var"] = args.sweep_var
    if args.values:
        m["values"] = args.values
    if args.scheme is not None:
        m["schemes"] = ",".join(args.scheme)
    if args.format:
        m["output_format"] = args.format
    spec = SweepSpec.from_mapping(m)
    if args.dump_spec:
        print(spec.to_config_text(), end="")
        return 0
    rows = run_sweep(spec, workers=args.workers)
    text = rows_to_csv(rows, spec.nats) if spec.output_format == "csv" else rows_to_json(rows, spec.nats) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args) -> int:
    m = _mapping(args)
    p, _ = params_from_mapping(m)
    validate(p)
    gain = args.gain if args.gain is not None else solve_optimal_gain_mcp(p).gain
    cfg = RingConfig(num_cells=args.num_cells, num_symbols=args.num_symbols,
                     burn_in=args.burn_in, seed=args.seed, gain=gain)
    analytic = p
    if args.analytic_var_z is not None:
        analytic = p.replace(var_z=args.analytic_var_z)
    report = run_validation(p, cfg, analytic)
    print(json.dumps(report, indent=2))
    return 0 if report["passed"] else EXIT_VALIDATION_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="relay-rates",
        description="Per-cell sum-rates of a linear cellular uplink with full-duplex AF relays.",
    )
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("rate", help="evaluate rates at one parameter point")
    _add_param_flags(r)
    r.add_argument("--scheme", action="append",
                   help="mcp, mcp_da, mcp_hd or scp; repeatable or comma separated (default mcp,scp)")
    r.add_argument("--force-gain", type=float, help="use this relay gain instead of the optimal one")
    r.set_defaults(func=cmd_rate)

    s = sub.add_parser("sweep", help="sweep one parameter and tabulate rates and gains")
    _add_param_flags(s)
    s.add_argument("--sweep-var", choices=("mu", "alpha", "eta", "P_db", "Q_db"))
    s.add_argument("--values", help="comma-separated, strictly increasing (default for mu: 0,0.05,...,0.45)")
    s.add_argument("--scheme", action="append")
    s.add_argument("--format", choices=("csv", "json"))
    s.add_argument("--output", "-o", help="write the table here instead of stdout")
    s.add_argument("--workers", type=int, help="worker threads (default: $RELAY_RATES_THREADS or CPU count)")
    s.add_argument("--dump-spec", action="store_true", help="print the resolved sweep config and exit")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("validate", help="compare analytic power/PSDs with the ring simulator")
    _add_param_flags(v)
    v.add_argument("--gain", type=float, help="relay gain (default: full-power MCP gain)")
    v.add_argument("--num-cells", type=int, default=64)
    v.add_argument("--num-symbols", type=int, default=1 << 16)
    v.add_argument("--burn-in", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--analytic-var-z", type=float, help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if getattr(args, "scheme", None) is not None and not _schemes(args.scheme):
        print("error: schemes: at least one scheme is required", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except UnstableGain as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except (ParameterError, ConfigError, InsufficientSamples, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
