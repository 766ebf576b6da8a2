"""Command-line experiment harness.

Subcommands: run a single config, sweep a directory of configs, validate a
config without running, or recompute metrics from a written trace. Outputs
per run: trace.csv, metrics.csv, meta.json and a self-contained config.yaml
copy; CSV reals use full repr precision so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import config as config_mod
from . import dispatch, engine, metrics, topology


def _fmt(x):
    return repr(float(x))


def write_trace_csv(path, trace):
    ids = trace.agent_ids
    header = (["t", "D"] + [f"P_{i}" for i in ids] + [f"lam_{i}" for i in ids]
              + ["cost", "residual", "wb_scale", "wb_shape"])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k in range(trace.horizon):
            wb = trace.weibull[k]
            row = ([str(k + 1), _fmt(trace.demand[k])]
                   + [_fmt(v) for v in trace.p[k]]
                   + [_fmt(v) for v in trace.lam[k]]
                   + [_fmt(trace.cost_sum[k]), _fmt(trace.residual[k])]
                   + (["", ""] if wb is None else [_fmt(wb[0]), _fmt(wb[1])]))
            w.writerow(row)


def read_trace_csv(path):
    """Rebuild a RunTrace (sans broadcasts/monitors) from trace.csv."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise config_mod.ConfigError([f"{path}: empty trace file"])
    header = rows[0]
    ids = [int(h[2:]) for h in header if h.startswith("P_")]
    trace = engine.RunTrace(agent_ids=ids, seed=-1,
                            psi=float("nan"), psi_tilde=float("nan"))
    npid = len(ids)
    for row in rows[1:]:
        trace.demand.append(float(row[1]))
        trace.p.append([float(v) for v in row[2:2 + npid]])
        trace.lam.append([float(v) for v in row[2 + npid:2 + 2 * npid]])
        trace.cost_sum.append(float(row[2 + 2 * npid]))
        trace.residual.append(float(row[3 + 2 * npid]))
        sc, sh = row[4 + 2 * npid], row[5 + 2 * npid]
        trace.weibull.append(None if sc == "" else (float(sc), float(sh)))
    return trace


def write_metrics_csv(path, series):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "cumulative_regret", "cumulative_violation"])
        for k in range(len(series.cumulative_regret)):
            w.writerow([str(k + 1), _fmt(series.cumulative_regret[k]),
                        _fmt(series.cumulative_violation[k])])


def compute_series(trace, problem, byzantine):
    """Metric series for a run: benign-only whenever any agent is Byzantine."""
    agent_set = "benign" if byzantine else "all"
    return metrics.dynamic_regret(trace, problem, agent_set=agent_set)


def _network_diagnostics(cfg):
    diag = {}
    try:
        diag["kappa"] = topology.benign_spectral_gap(cfg.network)
        diag["chi"] = topology.skewness(cfg.network)
    except topology.TopologyError:
        pass
    if cfg.run.algorithm == "resilient":
        rho = engine.network_rho(cfg.network, cfg.run.rule_kind)
        diag["rho_bound"] = rho if np.isfinite(rho) else None
    return diag


def run_experiment(cfg, out_dir=None):
    """Run one config and persist its artifacts; returns the output Path.

    On any error the partially written files (and the directory, if this
    call created it) are removed before re-raising.
    """
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    created_dir = not out.exists()
    out.mkdir(parents=True, exist_ok=True)
    artifacts = [out / "config.yaml", out / "trace.csv",
                 out / "metrics.csv", out / "meta.json"]
    try:
        trace = engine.run(cfg.network, cfg.problem, cfg.attack, cfg.run,
                           cfg.seed)
        series = compute_series(trace, cfg.problem, cfg.network.byzantine)
        (out / "config.yaml").write_text(config_mod.serialize(cfg))
        write_trace_csv(out / "trace.csv", trace)
        write_metrics_csv(out / "metrics.csv", series)
        gamma = None
        try:
            gamma = metrics.growth_exponent(series.path_variation)
        except metrics.MetricsError:
            pass
        meta = {
            "seed": cfg.seed,
            "config_hash": cfg.digest(),
            "psi": trace.psi,
            "psi_tilde": trace.psi_tilde,
            "measured_gamma": gamma,
            "monitor_violations": trace.monitor_violations,
            "dispersion_bound": (None if not trace.dispersion_asserted
                                 else trace.dispersion_bound),
            "dispersion_asserted": trace.dispersion_asserted,
        }
        meta.update(_network_diagnostics(cfg))
        (out / "meta.json").write_text(
            json.dumps(meta, indent=2, sort_keys=True) + "\n")
        return out
    except Exception:
        for f in artifacts:
            if f.exists():
                f.unlink()
        if created_dir and not any(out.iterdir()):
            out.rmdir()
        raise


def _apply_overrides(cfg, args):
    run = cfg.run
    if getattr(args, "strict_monitors", False):
        run = dataclasses.replace(run, strict_monitors=True)
    seed = args.seed if getattr(args, "seed", None) is not None else cfg.seed
    return dataclasses.replace(cfg, run=run, seed=seed)


def cmd_run(args):
    cfg = config_mod.parse_config(args.config)
    cfg = _apply_overrides(cfg, args)
    out = run_experiment(cfg, out_dir=args.out)
    print(f"run complete: {out}")
    return 0


def cmd_sweep(args):
    paths = sorted(Path(args.config_dir).glob("*.yaml"))
    if not paths:
        print(f"no configs found in {args.config_dir}", file=sys.stderr)
        return 1
    base = Path(args.out) if args.out else None
    failures = 0
    for p in paths:
        try:
            cfg = config_mod.parse_config(p)
            cfg = _apply_overrides(cfg, args)
            out_dir = base / p.stem if base else cfg.out_dir
            out = run_experiment(cfg, out_dir=out_dir)
            print(f"{p.name}: ok -> {out}")
        except Exception as exc:
            failures += 1
            print(f"{p.name}: FAILED: {exc}", file=sys.stderr)
    return 1 if failures else 0


def cmd_validate(args):
    try:
        config_mod.parse_config(args.config)
    except config_mod.ConfigError as exc:
        for e in exc.errors:
            print(f"invalid: {e}", file=sys.stderr)
        return 1
    print("valid")
    return 0


def cmd_metrics(args):
    trace_path = Path(args.trace)
    trace = read_trace_csv(trace_path)
    cfg_path = Path(args.config) if args.config else trace_path.parent / "config.yaml"
    if not cfg_path.exists():
        print(f"missing config {cfg_path}; needed to recompute regret",
              file=sys.stderr)
        return 1
    cfg = config_mod.parse_config(cfg_path)
    series = compute_series(trace, cfg.problem, cfg.network.byzantine)
    out = Path(args.out) if args.out else trace_path.parent / "metrics.csv"
    write_metrics_csv(out, series)
    print(f"metrics written: {out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="oralloc",
        description="Decentralized online dispatch simulator")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="run a single experiment config")
    pr.add_argument("config")
    pr.add_argument("--seed", type=int, default=None)
    pr.add_argument("--out", default=None)
    pr.add_argument("--strict-monitors", action="store_true",
                    dest="strict_monitors")
    pr.set_defaults(func=cmd_run)

    ps = sub.add_parser("sweep", help="run every *.yaml config in a directory")
    ps.add_argument("config_dir")
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--out", default=None)
    ps.add_argument("--strict-monitors", action="store_true",
                    dest="strict_monitors")
    ps.set_defaults(func=cmd_sweep)

    pv = sub.add_parser("validate", help="validate a config without running")
    pv.add_argument("config")
    pv.set_defaults(func=cmd_validate)

    pm = sub.add_parser("metrics", help="recompute metrics from a trace.csv")
    pm.add_argument("trace")
    pm.add_argument("--config", default=None)
    pm.add_argument("--out", default=None)
    pm.set_defaults(func=cmd_metrics)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except config_mod.ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return 1
    except (engine.EngineError, dispatch.DispatchError,
            metrics.MetricsError, topology.TopologyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
