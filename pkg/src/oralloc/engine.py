"""Synchronous step loops for the attack-free and Byzantine-resilient
online primal-dual algorithms over an agent graph.

Within a step the ordering is: primal update, dual half-update, broadcast,
aggregate. All broadcasts in a step carry that step's half-updated duals;
Byzantine agents broadcast attack messages instead and keep no state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import aggregation, attacks, dispatch, randomness, topology


class EngineError(RuntimeError):
    pass


@dataclass(frozen=True)
class AgentModel:
    """One station: cost model plus its capacity box."""

    cost: object          # ThermalCost | WindCost
    box: dispatch.BoxConstraint

    @property
    def is_wind(self):
        return isinstance(self.cost, dispatch.WindCost)


@dataclass(frozen=True)
class WeibullProcess:
    """Per-step (scale, shape) factors shared by all wind stations.

    kind "uniform" draws each factor from its range per step; kind "trace"
    replays a fixed list of (scale, shape) pairs; kind "none" is for
    all-thermal problems.
    """

    kind: str = "none"
    scale_range: tuple = (3.0, 25.0)
    shape_range: tuple = (2.0, 3.0)
    trace: tuple = ()

    def realize(self, seed, t):
        if self.kind == "none":
            return None
        if self.kind == "trace":
            if t >= len(self.trace):
                raise EngineError(f"Weibull trace exhausted at t={t}")
            scale, shape = self.trace[t]
            return dispatch.WeibullParams(scale=scale, shape=shape)
        lo_s, hi_s = self.scale_range
        lo_k, hi_k = self.shape_range
        scale = lo_s + (hi_s - lo_s) * randomness.rng_stream(
            seed, "weibull_scale", 0, t).random()
        shape = lo_k + (hi_k - lo_k) * randomness.rng_stream(
            seed, "weibull_shape", 0, t).random()
        return dispatch.WeibullParams(scale=scale, shape=shape)


@dataclass(frozen=True)
class ProblemSpec:
    agents: tuple            # AgentModel per agent id
    demand: dispatch.DemandProcess
    weibull: WeibullProcess = WeibullProcess()

    def weibull_for(self, agent_model, params):
        return params if agent_model.is_wind else None


@dataclass(frozen=True)
class RunConfig:
    alpha: float
    beta: float
    theta: float
    horizon: int
    algorithm: str                      # "attack_free" | "resilient"
    rule_kind: str = "weighted_average"  # aggregation for resilient runs
    tau_strategy: tuple = ("quantile", 0.5)
    strict_monitors: bool = False

    def __post_init__(self):
        if min(self.alpha, self.beta, self.theta) <= 0:
            raise EngineError("alpha, beta, theta must be positive")
        if self.beta * self.theta >= 1:
            raise EngineError("need beta*theta < 1 for the dual recursion")
        if self.horizon < 0:
            raise EngineError("horizon must be nonnegative")
        if self.algorithm not in ("attack_free", "resilient"):
            raise EngineError(f"unknown algorithm {self.algorithm!r}")


@dataclass
class RunTrace:
    """Append-only per-step record of a single run.

    Rows are indexed by step t = 1..T; the all-zero initialization is kept
    separately. Only benign agents carry state.
    """

    agent_ids: list
    seed: int
    psi: float
    psi_tilde: float
    demand: list = field(default_factory=list)        # D^t
    p: list = field(default_factory=list)             # benign P^t rows
    lam: list = field(default_factory=list)           # benign lambda^t rows
    broadcasts: list = field(default_factory=list)    # {agent: sent value}
    cost_sum: list = field(default_factory=list)      # sum_i C_i^t(P_i^t)
    residual: list = field(default_factory=list)      # sum_i G_i^t(P_i^t)
    weibull: list = field(default_factory=list)       # (scale, shape) or None
    monitor_violations: list = field(default_factory=list)
    dispersion: list = field(default_factory=list)
    dispersion_bound: float = float("nan")
    dispersion_asserted: bool = False

    @property
    def horizon(self):
        return len(self.demand)


def primal_step(p, grad, lambda_own, alpha, m_total, box):
    """Proximal-linear step: clip(p - alpha*(grad + lambda/m), box)."""
    return box.clip(p - alpha * (grad + lambda_own / m_total))


def dual_half_step(lam, p, demand, beta, theta, m_total):
    """lambda + beta*((p - demand)/m - theta*lambda)."""
    return lam + beta * ((p - demand) / m_total - theta * lam)


def assumption_constants(problem, benign_count, total_count):
    """(psi, psi_tilde): bounds on |P - D|/H and |P - D|/M over the run."""
    d_lo, d_hi = problem.demand.envelope()
    worst = 0.0
    for am in problem.agents:
        worst = max(worst, abs(am.box.hi - d_lo), abs(am.box.lo - d_hi))
    return worst / benign_count, worst / total_count


def network_rho(network, rule_kind):
    """Worst benign-agent contraction bound for the configured rule."""
    vals = [0.0]
    for i in network.benign_agents():
        nbrs = network.graph.neighbors(i)
        row = [network.weights.w[i, i]] + [network.weights.w[i, j] for j in nbrs]
        try:
            vals.append(topology.rho_bound(rule_kind, len(nbrs),
                                           network.budget(i), row))
        except topology.TopologyError:
            vals.append(float("inf"))
    return max(vals)


def run(network, problem, attack, config, seed):
    """Execute one run and return its trace.

    Initialization is all-zero (states and the step-0 demand). Invariant
    monitors record violations; with strict_monitors they raise instead.
    """
    n = network.graph.n
    if len(problem.agents) != n:
        raise EngineError("problem agent count must match network size")
    byz = set(network.byzantine)
    if byz and (attack is None or attack.kind == "none"):
        raise EngineError("Byzantine agents configured without an attack kind")
    benign = network.benign_agents()
    h = len(benign)
    psi, psi_tilde = assumption_constants(problem, h, n)
    dual_cap = (psi_tilde if config.algorithm == "attack_free" else psi) / config.theta

    trace = RunTrace(agent_ids=list(benign), seed=seed, psi=psi, psi_tilde=psi_tilde)

    if config.algorithm == "resilient" and h > 1:
        kappa = topology.benign_spectral_gap(network)
        rho = network_rho(network, config.rule_kind)
        if rho < (1.0 - kappa) ** 2 / (64.0 * h):
            eps = 1.0 - kappa - 8.0 * math.sqrt(rho * h)
            trace.dispersion_bound = (4.0 * h ** 3 * config.beta ** 2 * psi ** 2
                                      / (eps ** 3 * n ** 2))
            trace.dispersion_asserted = True

    neighbors = {i: network.graph.neighbors(i) for i in benign}
    rules = {}
    for i in benign:
        row = tuple([network.weights.w[i, i]] +
                    [network.weights.w[i, j] for j in neighbors[i]])
        kind = ("weighted_average" if config.algorithm == "attack_free"
                else config.rule_kind)
        rules[i] = aggregation.AggregationRule(
            kind=kind, weights_row=row, b=network.budget(i),
            tau_strategy=config.tau_strategy)

    p = {i: 0.0 for i in benign}
    lam = {i: 0.0 for i in benign}

    def note(kind, t, agent, value, bound):
        trace.monitor_violations.append(
            {"monitor": kind, "t": t, "agent": agent,
             "value": float(value), "bound": float(bound)})
        if config.strict_monitors:
            raise EngineError(
                f"monitor {kind} violated at t={t}, agent={agent}: "
                f"{value} > {bound}")

    for t in range(config.horizon + 1):
        demand_t = 0.0 if t == 0 else dispatch.realize_demand(
            problem.demand, t, randomness.rng_stream(seed, "demand", 0, t))
        weib_t = problem.weibull.realize(seed, t)

        if t >= 1:
            cost = 0.0
            resid = 0.0
            for i in benign:
                am = problem.agents[i]
                cost += dispatch.cost_value(
                    am.cost, problem.weibull_for(am, weib_t), p[i])
                resid += (p[i] - demand_t) / h
            trace.demand.append(demand_t)
            trace.p.append([p[i] for i in benign])
            trace.lam.append([lam[i] for i in benign])
            trace.cost_sum.append(cost)
            trace.residual.append(resid)
            trace.weibull.append(
                None if weib_t is None else (weib_t.scale, weib_t.shape))
            if h > 1:
                mean_lam = sum(lam[i] for i in benign) / h
                disp = sum((lam[i] - mean_lam) ** 2 for i in benign)
                trace.dispersion.append(disp)
                if trace.dispersion_asserted and disp > trace.dispersion_bound + 1e-9:
                    note("dual_consensus", t, None, disp, trace.dispersion_bound)
            if t == config.horizon:
                break

        # primal and dual half-updates against step-t data
        new_p = {}
        half = {}
        for i in benign:
            am = problem.agents[i]
            grad = dispatch.cost_gradient(
                am.cost, problem.weibull_for(am, weib_t), p[i])
            new_p[i] = primal_step(p[i], grad, lam[i], config.alpha, n, am.box)
            half[i] = dual_half_step(lam[i], p[i], demand_t,
                                     config.beta, config.theta, n)
            if abs(half[i]) > dual_cap + 1e-9:
                note("dual_half_bound", t, i, abs(half[i]), dual_cap)

        # broadcast: benign send their half-updates, Byzantine send the attack
        sent = {i: half[i] for i in benign}
        byz_shared = {}
        for j in byz:
            if not attack.per_target:
                byz_shared[j] = float(attacks.byzantine_message(
                    attack, j, t, None,
                    lambda a, k: randomness.rng_stream(seed, "attack", a, k),
                    byz)[0])
        trace.broadcasts.append(
            {**{i: sent[i] for i in benign}, **byz_shared})

        # aggregation
        new_lam = {}
        for i in benign:
            received = []
            mask = []
            for j in neighbors[i]:
                if j in byz:
                    if attack.per_target:
                        val = float(attacks.byzantine_message(
                            attack, j, t, i,
                            lambda a, k: randomness.rng_stream(seed, "attack", a, k),
                            byz)[0])
                    else:
                        val = byz_shared[j]
                    received.append(val)
                    mask.append(False)
                else:
                    received.append(half[j])
                    mask.append(True)
            out = aggregation.aggregate(rules[i], half[i], received,
                                        benign_mask=mask)
            new_lam[i] = float(out[0])
            if abs(new_lam[i]) > dual_cap + 1e-9:
                note("dual_bound", t, i, abs(new_lam[i]), dual_cap)

        p = new_p
        lam = new_lam

    return trace
