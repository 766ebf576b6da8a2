"""Experiment configuration: YAML schema, validation, and object building.

A config file fully describes one run: network, agents, demand, attack and
algorithm parameters. Parsing collects every validation failure instead of
stopping at the first, and the normalized form round-trips through
serialize/parse unchanged.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import yaml

from . import attacks, dispatch, engine, topology


class ConfigError(ValueError):
    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


_GRAPH_KINDS = ("path", "cycle", "star", "complete", "circulant")
_RULE_KINDS = ("weighted_average", "ctm_arc", "ios_arc", "scc_arc")
_ATTACK_KINDS = ("none", "large_value", "small_value", "gaussian")


@dataclass(frozen=True)
class ExperimentConfig:
    """Normalized configuration plus the built simulation objects."""

    raw: dict
    network: topology.NetworkSpec
    problem: engine.ProblemSpec
    attack: attacks.AttackSpec
    run: engine.RunConfig
    seed: int
    out_dir: str

    def __eq__(self, other):
        return isinstance(other, ExperimentConfig) and self.raw == other.raw

    def __hash__(self):
        return hash(self.digest())

    def digest(self):
        return hashlib.sha256(serialize(self).encode()).hexdigest()


def _build_graph(spec, errors, base_dir):
    try:
        if "file" in spec:
            path = Path(base_dir) / spec["file"]
            return topology.parse_graph_file(path.read_text())
        if "edges" in spec:
            return topology.Graph.from_edges(int(spec["n"]), spec["edges"])
        kind = spec.get("kind")
        if kind not in _GRAPH_KINDS:
            errors.append(f"network.graph.kind: unknown kind {kind!r}")
            return None
        n = int(spec["n"])
        if kind == "circulant":
            return topology.circulant_graph(n, [int(k) for k in spec["offsets"]])
        return getattr(topology, f"{kind}_graph")(n)
    except (KeyError, TypeError, ValueError, OSError, topology.TopologyError) as exc:
        errors.append(f"network.graph: {exc}")
        return None


def _build_agent(spec, idx, errors):
    try:
        box = dispatch.BoxConstraint(float(spec["box"][0]), float(spec["box"][1]))
        kind = spec.get("kind")
        if kind == "thermal":
            cost = dispatch.ThermalCost(eta=float(spec["eta"]),
                                        zeta=float(spec["zeta"]),
                                        xi=float(spec.get("xi", 0.0)))
        elif kind == "wind":
            cost = dispatch.WindCost(rho_lin=float(spec["rho"]),
                                     sigma_ue=float(spec["sigma_ue"]),
                                     sigma_oe=float(spec["sigma_oe"]),
                                     v_in=float(spec["v_in"]),
                                     v_out=float(spec["v_out"]),
                                     v_r=float(spec["v_r"]),
                                     p_r=float(spec["p_r"]))
        else:
            errors.append(f"agents[{idx}].kind: expected thermal or wind, got {kind!r}")
            return None
        return engine.AgentModel(cost=cost, box=box)
    except (KeyError, TypeError, ValueError, dispatch.DispatchError) as exc:
        errors.append(f"agents[{idx}]: {exc}")
        return None


def _build_demand(spec, errors, base_dir):
    try:
        kind = spec.get("kind")
        if kind == "gaussian":
            return dispatch.DemandProcess(kind="gaussian",
                                          mean=float(spec["mean"]),
                                          stddev=float(spec["stddev"]))
        if kind == "trace":
            if "file" in spec:
                vals = [float(v) for v in
                        (Path(base_dir) / spec["file"]).read_text().split()]
            else:
                vals = [float(v) for v in spec["values"]]
            return dispatch.DemandProcess(kind="trace", trace=tuple(vals))
        errors.append(f"demand.kind: expected gaussian or trace, got {kind!r}")
    except (KeyError, TypeError, ValueError, OSError,
            dispatch.DispatchError) as exc:
        errors.append(f"demand: {exc}")
    return None


def _build_weibull(spec, errors, base_dir):
    if spec is None:
        return engine.WeibullProcess()
    try:
        kind = spec.get("kind", "none")
        if kind == "none":
            return engine.WeibullProcess()
        if kind == "uniform":
            return engine.WeibullProcess(
                kind="uniform",
                scale_range=tuple(float(v) for v in spec["scale_range"]),
                shape_range=tuple(float(v) for v in spec["shape_range"]))
        if kind == "trace":
            if "file" in spec:
                rows = []
                for line in (Path(base_dir) / spec["file"]).read_text().splitlines():
                    line = line.split("#", 1)[0].strip()
                    if line:
                        a, b = line.split()
                        rows.append((float(a), float(b)))
            else:
                rows = [(float(a), float(b)) for a, b in spec["values"]]
            return engine.WeibullProcess(kind="trace", trace=tuple(rows))
        errors.append(f"weibull.kind: unknown kind {kind!r}")
    except (KeyError, TypeError, ValueError, OSError) as exc:
        errors.append(f"weibull: {exc}")
    return None


def _build_attack(spec, errors):
    if spec is None:
        spec = {"kind": "none"}
    try:
        kind = spec.get("kind", "none")
        if kind not in _ATTACK_KINDS:
            errors.append(f"attack.kind: unknown kind {kind!r}")
            return None
        return attacks.AttackSpec(kind=kind,
                                  value=float(spec.get("value", 0.0)),
                                  mean=float(spec.get("mean", 0.0)),
                                  stddev=float(spec.get("stddev", 0.0)),
                                  per_target=bool(spec.get("per_target", False)))
    except (TypeError, ValueError, attacks.AttackError) as exc:
        errors.append(f"attack: {exc}")
        return None


def parse_config(path):
    """Load, validate and build a config; raises ConfigError listing every
    failure found."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError([f"cannot read config: {exc}"])
    return parse_config_dict(raw, base_dir=path.parent)


def parse_config_dict(raw, base_dir="."):
    if not isinstance(raw, dict):
        raise ConfigError(["config root must be a mapping"])
    errors = []

    net_spec = raw.get("network", {})
    graph = _build_graph(net_spec.get("graph", {}), errors, base_dir)
    byzantine = frozenset(int(b) for b in net_spec.get("byzantine", []))
    budget_raw = net_spec.get("trim_budget", {})
    trim_budget = {int(k): int(v) for k, v in budget_raw.items()}

    agents = []
    agent_specs = raw.get("agents", [])
    if not agent_specs:
        errors.append("agents: at least one agent is required")
    for idx, a in enumerate(agent_specs):
        agents.append(_build_agent(a, idx, errors))

    demand = _build_demand(raw.get("demand", {}), errors, base_dir)
    weibull = _build_weibull(raw.get("weibull"), errors, base_dir)
    attack = _build_attack(raw.get("attack"), errors)

    run_spec = raw.get("run", {})
    run = None
    try:
        rule = run_spec.get("rule", "weighted_average")
        if rule not in _RULE_KINDS:
            errors.append(f"run.rule: unknown rule {rule!r}")
        tau = run_spec.get("tau", ["quantile", 0.5])
        tau = (str(tau[0]),) if tau[0] == "oracle" else (str(tau[0]), float(tau[1]))
        run = engine.RunConfig(alpha=float(run_spec["alpha"]),
                               beta=float(run_spec["beta"]),
                               theta=float(run_spec["theta"]),
                               horizon=int(run_spec["horizon"]),
                               algorithm=str(run_spec["algorithm"]),
                               rule_kind=rule,
                               tau_strategy=tau,
                               strict_monitors=bool(run_spec.get(
                                   "strict_monitors", False)))
    except (KeyError, TypeError, ValueError, engine.EngineError) as exc:
        errors.append(f"run: {exc}")

    network = None
    if graph is not None:
        if len(agent_specs) != graph.n:
            errors.append(f"agents: count {len(agent_specs)} does not match "
                          f"network size {graph.n}")
        try:
            weights = topology.build_metropolis(graph)
            network = topology.NetworkSpec(graph=graph, weights=weights,
                                           byzantine=byzantine,
                                           trim_budget=trim_budget)
        except topology.TopologyError as exc:
            errors.append(f"network: {exc}")

    problem = None
    if demand is not None and weibull is not None and all(
            a is not None for a in agents) and agents:
        problem = engine.ProblemSpec(agents=tuple(agents), demand=demand,
                                     weibull=weibull)
        if weibull.kind == "none" and any(a.is_wind for a in agents):
            errors.append("weibull: wind agents need a Weibull process")

    if run is not None and attack is not None and network is not None:
        if network.byzantine and attack.kind == "none":
            errors.append("attack: Byzantine agents configured without an attack")
        if run.algorithm == "resilient" and network.byzantine and \
                run.rule_kind == "weighted_average":
            # allowed (it is Algorithm 1 run under attack) but the spec of
            # a resilient run normally names a robust rule; not an error
            pass

    if errors:
        raise ConfigError(errors)

    seed = int(raw.get("seed", 0))
    out_dir = str(raw.get("out", "out"))
    raw = _inline_files(raw, graph, demand, weibull)
    return ExperimentConfig(raw=_normalize(raw), network=network,
                            problem=problem, attack=attack, run=run,
                            seed=seed, out_dir=out_dir)


def _inline_files(raw, graph, demand, weibull):
    """Replace file references with their loaded content so the normalized
    config is self-contained (a copy written next to run outputs stays
    parseable from any directory)."""
    raw = dict(raw)
    net = dict(raw.get("network", {}))
    gspec = net.get("graph", {})
    if isinstance(gspec, dict) and "file" in gspec:
        net["graph"] = {"n": graph.n,
                        "edges": [[i, j] for (i, j) in sorted(graph.edges)]}
        raw["network"] = net
    dspec = raw.get("demand", {})
    if isinstance(dspec, dict) and dspec.get("kind") == "trace" and "file" in dspec:
        raw["demand"] = {"kind": "trace", "values": list(demand.trace)}
    wspec = raw.get("weibull")
    if isinstance(wspec, dict) and wspec.get("kind") == "trace" and "file" in wspec:
        raw["weibull"] = {"kind": "trace",
                          "values": [[a, b] for (a, b) in weibull.trace]}
    return raw


def _normalize(obj):
    """Canonical plain-python form: sorted keys, lists for sequences."""
    if isinstance(obj, dict):
        return {str(k): _normalize(obj[k]) for k in sorted(obj, key=str)}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    return obj


def serialize(cfg):
    """YAML text whose parse compares equal to `cfg`."""
    return yaml.safe_dump(cfg.raw, sort_keys=True)
