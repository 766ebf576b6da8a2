"""Regenerate the bundled experiment configs under configs/.

Case 1: 6-station synthetic system (4 thermal + 2 wind), 4 attacks x
4 algorithms at T=288. Case 2: 60-station system (54 thermal + 6 wind);
per-station thermal coefficients are sampled once from their published
ranges under the fixed seed below, and the hourly wind factors come from a
synthetic diurnal trace written alongside the configs. Run from the repo
root: python3 scripts/gen_configs.py
"""

import math
from pathlib import Path

import numpy as np
import yaml

ROOT = Path(__file__).resolve().parent.parent
CASE2_COEFF_SEED = 20240117      # fixes the sampled thermal coefficients

CASE1_THERMAL = [
    # (eta, zeta, xi, lo, hi)
    (0.0675, 2.00, 0.0, 50.0, 200.0),
    (0.0675, 1.75, 0.0, 20.0, 120.0),
    (0.0925, 1.00, 0.0, 15.0, 80.0),
    (0.0625, 3.00, 0.0, 10.0, 100.0),
]
CASE1_WIND = [
    # (rho, v_in, v_out, v_r, sigma_ue, sigma_oe, p_r, lo, hi)
    (1.0, 3.0, 25.0, 13.0, 5.0, 30.0, 160.0, 0.0, 160.0),
    (6.0, 5.0, 45.0, 15.0, 5.0, 20.0, 160.0, 0.0, 160.0),
]
CASE2_WIND = [
    (1.0, 3.0, 25.0, 13.0, 3.0, 20.0, 150.0, 0.0, 500.0),
    (6.0, 4.0, 45.0, 15.0, 5.0, 30.0, 160.0, 0.0, 300.0),
    (1.0, 5.0, 25.0, 16.0, 3.0, 20.0, 150.0, 0.0, 400.0),
    (6.0, 3.0, 45.0, 13.0, 5.0, 30.0, 160.0, 0.0, 200.0),
    (1.0, 4.0, 25.0, 15.0, 3.0, 20.0, 150.0, 0.0, 300.0),
    (6.0, 5.0, 45.0, 16.0, 5.0, 30.0, 160.0, 0.0, 200.0),
]

CASE1_ATTACKS = {
    "large_value": {"kind": "large_value", "value": -0.01},
    "small_value": {"kind": "small_value", "value": -300.0},
    "gauss_large": {"kind": "gaussian", "mean": -10.0,
                    "stddev": math.sqrt(5.0)},
    "gauss_small": {"kind": "gaussian", "mean": -150.0,
                    "stddev": math.sqrt(5.0)},
}
CASE2_ATTACKS = {
    "large_value": {"kind": "large_value", "value": -0.01},
    "small_value": {"kind": "small_value", "value": -2000.0},
    "gauss_large": {"kind": "gaussian", "mean": -500.0, "stddev": 30.0},
    "gauss_small": {"kind": "gaussian", "mean": -1500.0, "stddev": 30.0},
}

ALGOS = {
    "attack_free": {"algorithm": "attack_free"},
    "ctm": {"algorithm": "resilient", "rule": "ctm_arc"},
    "ios": {"algorithm": "resilient", "rule": "ios_arc"},
    "scc": {"algorithm": "resilient", "rule": "scc_arc",
            "tau": ["oracle"]},
}


def thermal_agent(eta, zeta, xi, lo, hi):
    return {"kind": "thermal", "eta": eta, "zeta": zeta, "xi": xi,
            "box": [lo, hi]}


def wind_agent(rho, v_in, v_out, v_r, s_ue, s_oe, p_r, lo, hi):
    return {"kind": "wind", "rho": rho, "v_in": v_in, "v_out": v_out,
            "v_r": v_r, "sigma_ue": s_ue, "sigma_oe": s_oe, "p_r": p_r,
            "box": [lo, hi]}


def trim_budgets(n, offsets, byzantine):
    budgets = {}
    byz = set(byzantine)
    for i in range(n):
        if i in byz:
            continue
        nbrs = {(i + k) % n for k in offsets} | {(i - k) % n for k in offsets}
        b = len(nbrs & byz)
        if b:
            budgets[i] = b
    return budgets


def write(path, cfg):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(yaml.safe_dump(cfg, sort_keys=True))
    print(path)


def gen_case1():
    agents = ([thermal_agent(*row) for row in CASE1_THERMAL]
              + [wind_agent(*row) for row in CASE1_WIND])
    base = {
        "network": {
            "graph": {"kind": "circulant", "n": 6, "offsets": [1, 2]},
            "byzantine": [5],
            "trim_budget": trim_budgets(6, [1, 2], [5]),
        },
        "agents": agents,
        "demand": {"kind": "gaussian", "mean": 70.0, "stddev": 5.0},
        "weibull": {"kind": "uniform", "scale_range": [3.0, 25.0],
                    "shape_range": [2.0, 3.0]},
        "seed": 2024,
    }
    for aname, attack in CASE1_ATTACKS.items():
        for gname, algo in ALGOS.items():
            cfg = dict(base)
            cfg["attack"] = attack
            run = {"alpha": 1.0, "beta": 3.0, "theta": 0.001, "horizon": 288}
            run.update(algo)
            cfg["run"] = run
            cfg["out"] = f"out/case1_{aname}_{gname}"
            write(ROOT / "configs" / "case1" / f"case1_{aname}_{gname}.yaml",
                  cfg)


def gen_wind_trace(horizon):
    """Synthetic hourly Weibull factors with a diurnal cycle plus jitter."""
    rng = np.random.default_rng(CASE2_COEFF_SEED)
    rows = []
    for t in range(horizon + 1):
        hour = t % 24
        scale = 9.0 + 3.0 * math.sin(2 * math.pi * hour / 24.0) \
            + rng.uniform(-0.5, 0.5)
        shape = 2.3 + 0.3 * math.sin(2 * math.pi * hour / 24.0 + 1.0) \
            + rng.uniform(-0.05, 0.05)
        rows.append((round(scale, 6), round(shape, 6)))
    return rows


def gen_case2():
    horizon = 288
    rng = np.random.default_rng(CASE2_COEFF_SEED)
    agents = []
    for _ in range(54):
        eta = rng.uniform(0.0024, 0.0697)
        zeta = rng.uniform(8.3391, 37.6968)
        xi = rng.uniform(6.78, 74.33)
        # lower bounds are drawn from the low end of the published range so
        # that the benign fleet stays feasible across the whole demand range
        lo = rng.uniform(5.0, 75.0)
        hi = rng.uniform(max(30.0, lo + 20.0), 420.0)
        agents.append(thermal_agent(round(eta, 6), round(zeta, 6),
                                    round(xi, 6), round(lo, 4), round(hi, 4)))
    agents += [wind_agent(*row) for row in CASE2_WIND]

    trace = gen_wind_trace(horizon)
    trace_path = ROOT / "configs" / "case2" / "wind_factors.txt"
    trace_path.parent.mkdir(parents=True, exist_ok=True)
    trace_path.write_text(
        "# hourly Weibull (scale, shape) factors, synthetic diurnal cycle\n"
        + "".join(f"{a} {b}\n" for a, b in trace))
    print(trace_path)

    byzantine = [10, 40]
    base = {
        "network": {
            "graph": {"kind": "circulant", "n": 60, "offsets": [1, 2]},
            "byzantine": byzantine,
            "trim_budget": trim_budgets(60, [1, 2], byzantine),
        },
        "agents": agents,
        "demand": {"kind": "gaussian", "mean": 100.0, "stddev": 10.0},
        "weibull": {"kind": "trace", "file": "wind_factors.txt"},
        "seed": 2024,
    }
    for aname, attack in CASE2_ATTACKS.items():
        for gname, algo in ALGOS.items():
            cfg = dict(base)
            cfg["attack"] = attack
            run = {"alpha": 5.0, "beta": 5.0, "theta": 0.00001,
                   "horizon": horizon}
            run.update(algo)
            cfg["run"] = run
            cfg["out"] = f"out/case2_{aname}_{gname}"
            write(ROOT / "configs" / "case2" / f"case2_{aname}_{gname}.yaml",
                  cfg)


if __name__ == "__main__":
    gen_case1()
    gen_case2()
