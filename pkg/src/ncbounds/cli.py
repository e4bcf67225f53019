"""Command-line front-end.

Subcommands:
  bound     evaluate both bounds plus the Fisher-information oracle once
  sweep     run a configured parameter sweep and write CSV/JSON
  table     resolvability scan over the number of sources
  gain      closed-form two-source NC gain
  selftest  randomized closed-form vs oracle equivalence check

Exit codes: 0 success, 2 configuration error, 3 numerical failure in a
required single-point run (sweeps record failures in-row instead).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .closed_form import TwoSourceParams, nc_gain
from .config import ConfigError, parse_config
from .resolvability import scan_table
from .selftest import oracle_equivalence_suite
from .sweep import emit_plot_script, evaluate_single, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _fmt(x: float) -> str:
    return "inf" if np.isinf(x) else f"{x:.9g}"


def _cmd_bound(args) -> int:
    spec = parse_config(args.config)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    print(spec.describe(), file=sys.stderr)
    results = evaluate_single(spec)
    if args.format == "json":
        payload = {
            name: {"trace": None if res.is_singular else res.trace,
                   "rmse": None if res.is_singular else res.rmse,
                   "singular": res.is_singular,
                   "condition_report": {k: _fmt(v) if isinstance(v, float) else v
                                        for k, v in res.condition_report.items()}}
            for name, res in results.items()
        }
        text = json.dumps(payload, indent=2)
    else:
        lines = ["kind,trace,rmse,status"]
        for name, res in results.items():
            status = ("singular:" + res.condition_report.get("singular_factor", "?")
                      if res.is_singular else "ok")
            lines.append(f"{name},{_fmt(res.trace)},{_fmt(res.rmse)},{status}")
        text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if results["crb"].is_singular or results["nc_crb"].is_singular:
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec = parse_config(args.config)
    if spec.axis is None:
        raise ConfigError(f"{args.config}: missing [sweep] table")
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    if args.out:
        spec = replace(spec, out_path=args.out)
    print(spec.describe(), file=sys.stderr)
    result = run_sweep(spec, threads=args.threads, config_path=args.config)
    result.write(spec.out_path, fmt=args.format)
    print(f"wrote {spec.out_path} ({len(result.rows)} points)", file=sys.stderr)
    if args.plot_script:
        script_path = spec.out_path.rsplit(".", 1)[0] + "_plot.py"
        emit_plot_script(spec.out_path, args.plot_script, script_path)
        print(f"wrote {script_path}", file=sys.stderr)
    return EXIT_OK


def _cmd_table(args) -> int:
    d_max = args.d_max if args.d_max is not None else 2 * (args.m - 1) + 1
    report = scan_table(args.m, args.n, args.snr_db, d_max, args.seed)
    if args.format == "json":
        text = json.dumps({"m_sensors": report.m_sensors,
                           "rows": [row.__dict__ for row in report.rows]},
                          default=lambda x: None if np.isinf(x) else x, indent=2)
        print(text)
    else:
        print(report.to_text())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_csv())
        print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_gain(args) -> int:
    params = TwoSourceParams.from_rotation(
        m_sensors=args.m, delta_mu=args.delta_mu, delta_phi_rot=args.delta_phi_rot,
        reference_delta=args.reference_delta, rho=args.rho, snr1=1.0, snr2=1.0,
    )
    print(_fmt(nc_gain(params)))
    return EXIT_OK


def _cmd_selftest(args) -> int:
    report = oracle_equivalence_suite(n_scenarios=args.trials, seed=args.seed)
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncbounds",
        description="Deterministic Cramér-Rao bounds for strictly non-circular sources",
    )
    parser.add_argument("--version", action="version", version=f"ncbounds {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="evaluate one scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("sweep", help="run a parameter sweep from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--plot-script", choices=("rmse_snr", "rmse_sensors", "gain_sep", "table"),
                   default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("table", help="resolvability scan over the source count")
    p.add_argument("--m", type=int, required=True, help="ULA sensor count")
    p.add_argument("--n", type=int, default=20, help="snapshots")
    p.add_argument("--snr-db", type=float, default=10.0)
    p.add_argument("--d-max", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("gain", help="closed-form two-source NC gain")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delta-mu", type=float, required=True)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--delta-phi-rot", type=float, default=np.pi / 2)
    p.add_argument("--reference-delta", type=float, default=0.0)
    p.set_defaults(func=_cmd_gain)

    p = sub.add_parser("selftest", help="closed form vs Fisher oracle on random scenarios")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
