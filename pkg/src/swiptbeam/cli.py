"""Command-line campaign runner.

Subcommands: ``table1`` (infeasibility/optimality table), ``fig``
(CSV behind one of the sweep figures), ``bench`` (scheme timing), and
``solve`` (one-shot solve of a config file, JSON to stdout).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .channels import generate_channels
from .experiments import (CampaignSpec, bench_timing, run_campaign, run_schemes,
                          sweep_figures, write_instances_csv, write_summary_csv)
from .model import Scheme, SystemConfig, db_to_linear, dbm_to_mw, load_config

ALL_SCHEME_NAMES = [s.value for s in Scheme]


def _parse_list(text: str) -> list[float]:
    """Comma lists and start..stop[..step] ranges, e.g. '2,4,8' or '2..24..2'."""
    text = text.strip()
    if ".." in text:
        parts = text.split("..")
        start, stop = float(parts[0]), float(parts[1])
        step = float(parts[2]) if len(parts) > 2 else 1.0
        vals = list(np.arange(start, stop + step / 2, step))
        return [float(v) for v in vals]
    return [float(v) for v in text.split(",") if v]


def _base_config(K: int, gamma_db: float, lambda_dbm: float, delta: float) -> SystemConfig:
    return SystemConfig(n_users=int(K), sinr_threshold=db_to_linear(gamma_db),
                        eh_threshold_mw=dbm_to_mw(lambda_dbm), delta=delta)


def _cmd_table1(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    schemes = tuple(Scheme(s) for s in args.schemes.split(","))
    all_summary = []
    all_instances = []
    for K in (int(v) for v in _parse_list(args.K)):
        for gamma_db in _parse_list(args.gamma_db):
            sub_seed = int(np.random.SeedSequence(
                [args.seed, K, int(round(10 * gamma_db))]).generate_state(1, np.uint64)[0] >> 1)
            spec = CampaignSpec(
                config=_base_config(K, gamma_db, -30.0, args.delta),
                axis="lambda_dbm", axis_values=tuple(_parse_list(args.lambda_dbm)),
                instances_per_point=args.n, schemes=schemes,
                base_seed=sub_seed, jobs=args.jobs)
            result = run_campaign(spec)
            extra = {"K": K, "gamma_db": gamma_db, "delta": args.delta}
            for agg in result.aggregates:
                all_summary.append((extra, agg))
            for rec in result.records:
                all_instances.append((extra, rec))
            if not args.quiet:
                for agg in result.aggregates:
                    print(f"K={K} gamma={gamma_db}dB lambda={agg.point}dBm "
                          f"{agg.scheme.value}: infeasible {agg.infeasible_count}"
                          f"/{agg.n_instances} ratio {agg.mean_ratio_to_optimal:.4f}")
    from .experiments import write_csv

    write_csv(out_dir / "table1_summary.csv",
              ["K", "gamma_db", "delta", "lambda_dbm", "scheme", "n_instances",
               "infeasible_count", "numfail_count", "n_feasible", "mean_total_power_mw",
               "mean_ratio_to_optimal", "mean_wall_time_s"],
              [[e["K"], e["gamma_db"], e["delta"], a.point, a.scheme, a.n_instances,
                a.infeasible_count, a.numfail_count, a.n_feasible, a.mean_total_power_mw,
                a.mean_ratio_to_optimal, a.mean_wall_time_s]
               for e, a in all_summary])
    write_csv(out_dir / "table1_instances.csv",
              ["K", "gamma_db", "delta", "lambda_dbm", "instance", "seed", "scheme",
               "status", "feasible", "total_power_mw", "wall_time_s"],
              [[e["K"], e["gamma_db"], e["delta"], r.point, r.instance, r.seed, r.scheme,
                r.status, int(r.feasible), r.total_power_mw, r.wall_time_s]
               for e, r in all_instances])
    print(f"wrote {out_dir / 'table1_summary.csv'}")
    return 0


def _cmd_fig(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    which = int(args.which)
    lam_values = _parse_list(args.lambda_dbm)
    if which == 7 and len(lam_values) > 1:
        # one series per EH threshold, merged into a single CSV for the heatmap
        from .experiments import FIGURE_HEADER, write_csv
        import csv as _csv

        rows = []
        for lam in lam_values:
            cfg = _base_config(int(args.K), args.gamma_db, lam, args.delta)
            path = sweep_figures(7, out_dir / f"_fig7_tmp_{lam}", config=cfg,
                                 instances=args.n, base_seed=args.seed, jobs=args.jobs)
            with open(path) as fh:
                for row in list(_csv.reader(fh))[1:]:
                    row[1] = f"zf_over_optimal[lambda_dbm={lam:g}]"
                    rows.append(row)
        write_csv(out_dir / "fig7.csv", FIGURE_HEADER, rows)
        print(f"wrote {out_dir / 'fig7.csv'}")
        return 0
    cfg = _base_config(int(args.K), args.gamma_db, lam_values[0], args.delta)
    path = sweep_figures(which, out_dir, config=cfg, instances=args.n,
                         base_seed=args.seed, jobs=args.jobs)
    print(f"wrote {path}")
    return 0


def _cmd_bench(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    Ks = [int(v) for v in _parse_list(args.K)]
    path = bench_timing(Ks, out_dir / "bench_timing.csv", instances=args.n,
                        base_seed=args.seed, gamma_db=args.gamma_db,
                        lambda_dbm=args.lambda_dbm, delta=args.delta)
    print(f"wrote {path}")
    return 0


def _cmd_solve(args) -> int:
    config, seed = load_config(args.config)
    if args.seed is not None:
        seed = args.seed
    channels = generate_channels(config, seed)
    outcomes = run_schemes(config, seed, [Scheme(args.scheme)])
    outcome = outcomes[Scheme(args.scheme)]
    payload = {
        "scheme": args.scheme,
        "seed": seed,
        "status": outcome.status.value,
        "feasible": outcome.feasible,
        "total_power_mw": None if not np.isfinite(outcome.total_power)
        else float(outcome.total_power),
        "P_mw": outcome.P.tolist(),
        "rho": outcome.rho.tolist(),
    }
    if args.scheme == Scheme.OPTIMAL.value:
        from .programs import solve_optimal

        res = solve_optimal(config, channels)
        if res.weights is not None:
            payload["w"] = [[[float(c.real), float(c.imag)] for c in row]
                            for row in res.weights.w]
    json.dump(payload, sys.stdout, indent=2)
    print()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swipt-beam")
    sub = parser.add_subparsers(dest="command", required=True)

    t1 = sub.add_parser("table1", help="infeasibility/optimality grid")
    t1.add_argument("--K", default="2,4,8")
    t1.add_argument("--gamma-db", dest="gamma_db", default="10,20")
    t1.add_argument("--lambda-dbm", dest="lambda_dbm", default="-40,-30,-20,-10")
    t1.add_argument("--delta", type=float, default=5.0)
    t1.add_argument("--n", type=int, default=100)
    t1.add_argument("--seed", type=int, default=42)
    t1.add_argument("--jobs", type=int, default=1)
    t1.add_argument("--schemes", default=",".join(ALL_SCHEME_NAMES))
    t1.add_argument("--quiet", action="store_true")
    t1.add_argument("--out", required=True)
    t1.set_defaults(func=_cmd_table1)

    fg = sub.add_parser("fig", help="CSV behind one sweep figure")
    fg.add_argument("--which", required=True, choices=["3", "4", "5", "7"])
    fg.add_argument("--K", default="4")
    fg.add_argument("--gamma-db", dest="gamma_db", type=float, default=20.0)
    fg.add_argument("--lambda-dbm", dest="lambda_dbm", default="-30")
    fg.add_argument("--delta", type=float, default=5.0)
    fg.add_argument("--n", type=int, default=200)
    fg.add_argument("--seed", type=int, default=42)
    fg.add_argument("--jobs", type=int, default=1)
    fg.add_argument("--out", required=True)
    fg.set_defaults(func=_cmd_fig)

    bn = sub.add_parser("bench", help="scheme timing vs user count")
    bn.add_argument("--K", default="2..12..2")
    bn.add_argument("--gamma-db", dest="gamma_db", type=float, default=10.0)
    bn.add_argument("--lambda-dbm", dest="lambda_dbm", type=float, default=-30.0)
    bn.add_argument("--delta", type=float, default=5.0)
    bn.add_argument("--n", type=int, default=20)
    bn.add_argument("--seed", type=int, default=42)
    bn.add_argument("--out", required=True)
    bn.set_defaults(func=_cmd_bench)

    sv = sub.add_parser("solve", help="one-shot solve of a JSON config")
    sv.add_argument("--config", required=True)
    sv.add_argument("--scheme", default="optimal", choices=ALL_SCHEME_NAMES)
    sv.add_argument("--seed", type=int, default=None)
    sv.set_defaults(func=_cmd_solve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
