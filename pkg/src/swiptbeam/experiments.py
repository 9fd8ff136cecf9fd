"""Monte-Carlo campaign runner reproducing the reference experiments.

Every (point, instance) task is independent: the channel seed is a
stable hash of (base_seed, point index, instance index), all schemes at
one task share the identical ChannelSet, and results merge by task key,
so campaigns are bit-reproducible for any worker count.  Infeasibility
is counted only on certified infeasible exits; numerical failures are
tracked in their own column.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .beamformers import mrt_weights, rzf_weights
from .channels import generate_channels
from .model import Scheme, SolveStatus, SystemConfig, db_to_linear, dbm_to_mw
from .programs import solve_fixed_weight, solve_mrt_zf, solve_optimal, solve_zf_closed_form

__all__ = ["CampaignSpec", "InstanceRecord", "PointAggregate", "CampaignResult",
           "run_campaign", "sweep_figures", "bench_timing", "instance_seed",
           "run_schemes"]

ALL_SCHEMES = (Scheme.ZF, Scheme.MRT, Scheme.RZF, Scheme.MRT_ZF,
               Scheme.LP_RHO_HALF, Scheme.OPTIMAL)


@dataclass(frozen=True)
class CampaignSpec:
    config: SystemConfig  # template; the sweep axis overrides one field
    axis: str  # one of: gamma_db, lambda_dbm, delta, K
    axis_values: tuple
    instances_per_point: int
    schemes: tuple = ALL_SCHEMES
    base_seed: int = 42
    rzf_eta: float = 1.0
    jobs: int = 1

    def __post_init__(self):
        if self.axis not in ("gamma_db", "lambda_dbm", "delta", "K"):
            raise ValueError(f"unknown sweep axis {self.axis!r}")
        vals = tuple(float(v) for v in self.axis_values)
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("axis values must be strictly increasing")
        if self.instances_per_point < 1:
            raise ValueError("instances_per_point must be >= 1")
        object.__setattr__(self, "axis_values", vals)
        object.__setattr__(self, "schemes", tuple(Scheme(s) for s in self.schemes))


@dataclass(frozen=True)
class InstanceRecord:
    point: float
    instance: int
    seed: int
    scheme: Scheme
    status: SolveStatus
    feasible: bool
    total_power_mw: float
    wall_time_s: float


@dataclass(frozen=True)
class PointAggregate:
    point: float
    scheme: Scheme
    n_instances: int
    infeasible_count: int
    numfail_count: int
    n_feasible: int
    mean_total_power_mw: float
    mean_ratio_to_optimal: float
    mean_wall_time_s: float


@dataclass(frozen=True)
class CampaignResult:
    spec: CampaignSpec
    records: tuple  # InstanceRecord, ordered by (point, instance, scheme)
    aggregates: tuple  # PointAggregate


def instance_seed(base_seed: int, point_index: int, instance: int) -> int:
    ss = np.random.SeedSequence([int(base_seed), int(point_index), int(instance)])
    return int(ss.generate_state(1, np.uint64)[0] >> 1)


def config_at_point(template: SystemConfig, axis: str, value: float) -> SystemConfig:
    if axis == "gamma_db":
        return replace(template, sinr_threshold=np.full(template.n_users, db_to_linear(value)))
    if axis == "lambda_dbm":
        return replace(template, eh_threshold_mw=np.full(template.n_users, dbm_to_mw(value)))
    if axis == "delta":
        return replace(template, delta=float(value))
    K = int(value)
    return SystemConfig(
        n_users=K,
        sinr_threshold=np.full(K, template.sinr_threshold[0]),
        eh_threshold_mw=np.full(K, template.eh_threshold_mw[0]),
        noise_mw=template.noise_mw,
        conversion_noise_mw=template.conversion_noise_mw,
        delta=template.delta,
        direct_variance=template.direct_variance,
        eh_includes_efficiency=template.eh_includes_efficiency,
    )


def run_schemes(config: SystemConfig, seed: int, schemes, rzf_eta: float = 1.0) -> dict:
    """Solve one channel instance under each scheme; shared ChannelSet."""
    channels = generate_channels(config, seed)
    out = {}
    for scheme in schemes:
        t0 = time.perf_counter()
        try:
            if scheme == Scheme.ZF:
                outcome = solve_zf_closed_form(config, channels).outcome
            elif scheme == Scheme.MRT:
                outcome = solve_fixed_weight(config, channels, mrt_weights(channels)).outcome
            elif scheme == Scheme.RZF:
                outcome = solve_fixed_weight(
                    config, channels, rzf_weights(channels, rzf_eta)).outcome
            elif scheme == Scheme.LP_RHO_HALF:
                outcome = solve_fixed_weight(
                    config, channels, mrt_weights(channels), rho_fixed=0.5).outcome
            elif scheme == Scheme.MRT_ZF:
                outcome = solve_mrt_zf(config, channels).outcome
            elif scheme == Scheme.OPTIMAL:
                outcome = solve_optimal(config, channels).outcome
            else:
                raise ValueError(f"unknown scheme {scheme}")
            out[scheme] = outcome
        except Exception:
            # a scheme-level numerical breakdown must never abort a campaign
            from .model import SolveOutcome

            out[scheme] = SolveOutcome(
                P=np.zeros(config.n_users), rho=np.full(config.n_users, 0.5),
                total_power=np.nan, feasible=False,
                status=SolveStatus.NUMERICAL_FAILURE, residuals=np.full(1, np.nan),
                wall_time=time.perf_counter() - t0)
    return out


def _run_task(args):
    template, axis, point_idx, point, instance, base_seed, schemes, rzf_eta = args
    config = config_at_point(template, axis, point)
    seed = instance_seed(base_seed, point_idx, instance)
    outcomes = run_schemes(config, seed, schemes, rzf_eta)
    records = []
    for scheme in schemes:
        oc = outcomes[scheme]
        records.append(InstanceRecord(
            point=point, instance=instance, seed=seed, scheme=scheme,
            status=oc.status, feasible=oc.feasible,
            total_power_mw=float(oc.total_power), wall_time_s=float(oc.wall_time)))
    return (point_idx, instance), records


def run_campaign(spec: CampaignSpec) -> CampaignResult:
    tasks = [
        (spec.config, spec.axis, pi, point, t, spec.base_seed, spec.schemes, spec.rzf_eta)
        for pi, point in enumerate(spec.axis_values)
        for t in range(spec.instances_per_point)
    ]
    results = {}
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            for key, recs in pool.map(_run_task, tasks, chunksize=1):
                results[key] = recs
    else:
        for task in tasks:
            key, recs = _run_task(task)
            results[key] = recs
    records = []
    for key in sorted(results):
        records.extend(results[key])
    aggregates = compute_aggregates(spec, records)
    return CampaignResult(spec=spec, records=tuple(records), aggregates=tuple(aggregates))


def compute_aggregates(spec: CampaignSpec, records) -> list[PointAggregate]:
    by_key = {}
    for rec in records:
        by_key.setdefault((rec.point, rec.scheme), []).append(rec)
    optimal_power = {}
    if Scheme.OPTIMAL in spec.schemes:
        for rec in records:
            if rec.scheme == Scheme.OPTIMAL and rec.feasible:
                optimal_power[(rec.point, rec.instance)] = rec.total_power_mw
    out = []
    for point in spec.axis_values:
        for scheme in spec.schemes:
            recs = by_key.get((point, scheme), [])
            feas = [r for r in recs if r.feasible]
            ratios = [r.total_power_mw / optimal_power[(r.point, r.instance)]
                      for r in feas if (r.point, r.instance) in optimal_power]
            out.append(PointAggregate(
                point=point, scheme=scheme, n_instances=len(recs),
                infeasible_count=sum(r.status == SolveStatus.INFEASIBLE for r in recs),
                numfail_count=sum(r.status == SolveStatus.NUMERICAL_FAILURE for r in recs),
                n_feasible=len(feas),
                mean_total_power_mw=float(np.mean([r.total_power_mw for r in feas]))
                if feas else np.nan,
                mean_ratio_to_optimal=float(np.mean(ratios)) if ratios else np.nan,
                mean_wall_time_s=float(np.mean([r.wall_time_s for r in recs]))
                if recs else np.nan))
    return out


# ---------------------------------------------------------------------------
# CSV artifacts

def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    if isinstance(x, Scheme):
        return x.value
    if isinstance(x, SolveStatus):
        return x.value
    return str(x)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_instances_csv(path, result: CampaignResult, extra: dict | None = None) -> None:
    extra = extra or {}
    header = list(extra) + ["axis_value", "instance", "seed", "scheme", "status",
                            "feasible", "total_power_mw", "wall_time_s"]
    rows = [list(extra.values()) + [r.point, r.instance, r.seed, r.scheme, r.status,
                                    int(r.feasible), r.total_power_mw, r.wall_time_s]
            for r in result.records]
    write_csv(path, header, rows)


def write_summary_csv(path, result: CampaignResult, extra: dict | None = None) -> None:
    extra = extra or {}
    header = list(extra) + ["axis_value", "scheme", "n_instances", "infeasible_count",
                            "numfail_count", "n_feasible", "mean_total_power_mw",
                            "mean_ratio_to_optimal", "mean_wall_time_s"]
    rows = [list(extra.values()) + [a.point, a.scheme, a.n_instances, a.infeasible_count,
                                    a.numfail_count, a.n_feasible, a.mean_total_power_mw,
                                    a.mean_ratio_to_optimal, a.mean_wall_time_s]
            for a in result.aggregates]
    write_csv(path, header, rows)


def figure_rows(result: CampaignResult, value_of) -> list[list]:
    """Rows for the figure CSV schema:
    axis_value, scheme, mean_value, stderr, n_feasible, mean_value_normalized."""
    by_key = {}
    for rec in result.records:
        if rec.feasible:
            by_key.setdefault((rec.point, rec.scheme), []).append(value_of(rec))
    rows = []
    peak = {}
    for (point, scheme), vals in by_key.items():
        mean = float(np.mean(vals))
        peak[scheme] = max(peak.get(scheme, 0.0), mean)
    for point in result.spec.axis_values:
        for scheme in result.spec.schemes:
            vals = by_key.get((point, scheme))
            if not vals:
                continue
            mean = float(np.mean(vals))
            stderr = float(np.std(vals, ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
            norm = mean / peak[scheme] if peak.get(scheme) else np.nan
            rows.append([point, scheme, mean, stderr, len(vals), norm])
    return rows


FIGURE_HEADER = ["axis_value", "scheme", "mean_value", "stderr", "n_feasible",
                 "mean_value_normalized"]


def sweep_figures(which: int, out_dir, *, config: SystemConfig, instances: int,
                  base_seed: int = 42, jobs: int = 1,
                  schemes=(Scheme.ZF, Scheme.MRT_ZF, Scheme.OPTIMAL),
                  axis_values=None) -> Path:
    """Produce the CSV behind one figure kind (3: vs lambda, 4: vs gamma,
    5: vs delta, 7: ZF/optimal power ratio vs gamma)."""
    out_dir = Path(out_dir)
    if which == 3:
        axis, values = "lambda_dbm", axis_values or (-40.0, -30.0, -22.0, -16.0, -10.0)
    elif which == 4:
        axis, values = "gamma_db", axis_values or (5.0, 10.0, 15.0, 20.0)
    elif which == 5:
        axis, values = "delta", axis_values or (2.0, 5.0, 10.0, 20.0)
    elif which == 7:
        axis, values = "gamma_db", axis_values or (0.0, 5.0, 10.0, 15.0, 20.0)
        schemes = (Scheme.ZF, Scheme.OPTIMAL)
    else:
        raise ValueError("figure must be one of 3, 4, 5, 7")
    spec = CampaignSpec(config=config, axis=axis, axis_values=tuple(values),
                        instances_per_point=instances, schemes=tuple(schemes),
                        base_seed=base_seed, jobs=jobs)
    result = run_campaign(spec)
    path = out_dir / f"fig{which}.csv"
    if which == 7:
        rows = _ratio_rows(result)
    else:
        rows = figure_rows(result, lambda r: r.total_power_mw)
    write_csv(path, FIGURE_HEADER, rows)
    write_instances_csv(out_dir / f"fig{which}_instances.csv", result)
    return path


def _ratio_rows(result: CampaignResult) -> list[list]:
    power = {}
    for rec in result.records:
        if rec.feasible:
            power[(rec.point, rec.instance, rec.scheme)] = rec.total_power_mw
    rows = []
    series = []
    for point in result.spec.axis_values:
        ratios = []
        for t in range(result.spec.instances_per_point):
            zf = power.get((point, t, Scheme.ZF))
            opt = power.get((point, t, Scheme.OPTIMAL))
            if zf is not None and opt is not None and opt > 0:
                ratios.append(zf / opt)
        if ratios:
            mean = float(np.mean(ratios))
            stderr = float(np.std(ratios, ddof=1) / np.sqrt(len(ratios))) if len(ratios) > 1 else 0.0
            series.append((point, mean, stderr, len(ratios)))
    peak = max(m for _, m, _, _ in series) if series else np.nan
    for point, mean, stderr, n in series:
        rows.append([point, "zf_over_optimal", mean, stderr, n, mean / peak])
    return rows


def bench_timing(Ks, out_path, *, instances: int = 20, base_seed: int = 42,
                 gamma_db: float = 10.0, lambda_dbm: float = -30.0,
                 delta: float = 5.0) -> Path:
    """Mean wall time per scheme and user count (warm cache, sequential)."""
    rows = []
    schemes = (Scheme.ZF, Scheme.MRT_ZF, Scheme.OPTIMAL)
    for K in Ks:
        config = SystemConfig(
            n_users=int(K), sinr_threshold=db_to_linear(gamma_db),
            eh_threshold_mw=dbm_to_mw(lambda_dbm), delta=delta)
        # warm-up instance (excluded): imports, caches, BLAS init
        run_schemes(config, instance_seed(base_seed, int(K), 10**6), schemes)
        times = {s: [] for s in schemes}
        for t in range(instances):
            outcomes = run_schemes(config, instance_seed(base_seed, int(K), t), schemes)
            for s in schemes:
                times[s].append(outcomes[s].wall_time)
        for s in schemes:
            vals = times[s]
            rows.append([float(K), s, float(np.mean(vals)),
                         float(np.std(vals, ddof=1) / np.sqrt(len(vals))),
                         len(vals), np.nan])
    write_csv(out_path, FIGURE_HEADER, rows)
    return Path(out_path)
