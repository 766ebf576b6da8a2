"""Dynamic regret and accumulative constraint violation over a run trace.

The per-step optimum comes from the dispatch oracle; regret compares the
recorded allocations against a fresh oracle solve at every step. Violation
is the norm of the running constraint sum, so signed residuals cancel by
design.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dispatch


class MetricsError(ValueError):
    pass


@dataclass
class MetricSeries:
    """Cumulative series aligned with trace steps t = 1..T."""

    cumulative_regret: np.ndarray
    cumulative_violation: np.ndarray
    per_step_optimum_cost: np.ndarray
    path_variation: np.ndarray

    def __post_init__(self):
        t = len(self.cumulative_regret)
        for arr in (self.cumulative_violation, self.per_step_optimum_cost,
                    self.path_variation):
            if len(arr) != t:
                raise MetricsError("metric series lengths must agree")
        if np.any(self.cumulative_violation < 0):
            raise MetricsError("violation series must be nonnegative")


class OptimumOracle:
    """Memoized per-step oracle solves for a fixed (trace, problem) pair.

    agent_set "benign" restricts to the agents the trace recorded (only
    benign agents carry state); "all" additionally includes stations that
    were Byzantine in the run, which matters for attack-free baselines run
    on the full network.
    """

    def __init__(self, trace, problem):
        self.trace = trace
        self.problem = problem
        self._cache = {}

    def agent_ids(self, agent_set):
        if agent_set == "benign":
            return list(self.trace.agent_ids)
        if agent_set == "all":
            return list(range(len(self.problem.agents)))
        raise MetricsError(f"unknown agent set {agent_set!r}")

    def solve(self, t, agent_set):
        """(allocations, cost sum) of the step-t optimum; t is 1-based."""
        key = (t, agent_set)
        if key in self._cache:
            return self._cache[key]
        ids = self.agent_ids(agent_set)
        demand = self.trace.demand[t - 1]
        weib = self.trace.weibull[t - 1]
        params = None if weib is None else dispatch.WeibullParams(*weib)
        costs = [self.problem.agents[i].cost for i in ids]
        boxes = [self.problem.agents[i].box for i in ids]
        weibulls = [params if self.problem.agents[i].is_wind else None
                    for i in ids]
        try:
            alloc, _mu = dispatch.instantaneous_optimum(costs, boxes, weibulls,
                                                        demand)
        except dispatch.DispatchError as exc:
            raise MetricsError(f"oracle infeasible at step t={t}: {exc}") from exc
        cost = sum(dispatch.cost_value(costs[k], weibulls[k], alloc[k])
                   for k in range(len(ids)))
        self._cache[key] = (alloc, cost)
        return self._cache[key]


def dynamic_regret(trace, problem, agent_set="benign", oracle=None):
    """Cumulative regret series against the per-step optimum.

    Negative values are meaningful: an algorithm pushed below the optimum
    cost by constraint violation (large-value attacks do this) reports a
    decreasing regret, which is left unclamped.
    """
    if oracle is None:
        oracle = OptimumOracle(trace, problem)
    horizon = trace.horizon
    ids = oracle.agent_ids(agent_set)
    recorded = {a: k for k, a in enumerate(trace.agent_ids)}
    regret = np.zeros(horizon)
    opt_cost = np.zeros(horizon)
    path = np.zeros(horizon)
    prev_alloc = None
    acc = 0.0
    path_acc = 0.0
    for t in range(1, horizon + 1):
        alloc, cost_star = oracle.solve(t, agent_set)
        weib = trace.weibull[t - 1]
        params = None if weib is None else dispatch.WeibullParams(*weib)
        cost_run = 0.0
        for i in ids:
            am = problem.agents[i]
            w = params if am.is_wind else None
            if i in recorded:
                p = trace.p[t - 1][recorded[i]]
            else:
                # Byzantine stations keep no recorded state; they contribute
                # nothing to the run cost in the benign-only comparison and
                # are excluded from "all" traces that dropped them
                continue
            cost_run += dispatch.cost_value(am.cost, w, p)
        acc += cost_run - cost_star
        regret[t - 1] = acc
        opt_cost[t - 1] = cost_star
        if prev_alloc is not None:
            path_acc += float(np.sum(np.abs(alloc - prev_alloc)))
        path[t - 1] = path_acc
        prev_alloc = alloc
    violation = constraint_violation(trace, agent_set).cumulative_violation
    return MetricSeries(cumulative_regret=regret,
                        cumulative_violation=violation,
                        per_step_optimum_cost=opt_cost,
                        path_variation=path)


def constraint_violation(trace, agent_set="benign"):
    """Norm of the running sum of H-normalized residuals.

    The trace's recorded residual already sums (P_i - D)/H over recorded
    agents, so both agent sets read the same column; "all" only differs for
    regret, where Byzantine stations would need recorded allocations.
    """
    horizon = trace.horizon
    running = np.cumsum(np.asarray(trace.residual, dtype=float))
    violation = np.abs(running)
    zeros = np.zeros(horizon)
    return MetricSeries(cumulative_regret=zeros.copy(),
                        cumulative_violation=violation,
                        per_step_optimum_cost=zeros.copy(),
                        path_variation=zeros.copy())


def growth_exponent(series, window=0.5):
    """Least-squares slope of log(series) vs log(t) over the tail window.

    `window` is the final fraction of steps to fit. Nonpositive values
    inside the window are an error: the fit needs a positive power law.
    """
    series = np.asarray(series, dtype=float)
    t_all = np.arange(1, len(series) + 1)
    if not (0 < window <= 1):
        raise MetricsError("window must be a fraction in (0, 1]")
    start = int(np.floor(len(series) * (1.0 - window)))
    tail = series[start:]
    t = t_all[start:]
    if len(tail) < 2:
        raise MetricsError("window too small to fit a slope")
    if np.any(tail <= 0):
        raise MetricsError("growth fit needs positive values in the window")
    slope, _intercept = np.polyfit(np.log(t), np.log(tail), 1)
    return float(slope)
