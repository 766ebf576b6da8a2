import numpy as np
import pytest

from oralloc import attacks as ak
from oralloc import dispatch as dp
from oralloc import engine as eg
from oralloc import metrics as mt
from oralloc import topology as tp


def _trace_from_rows(agent_ids, demand, p_rows):
    trace = eg.RunTrace(agent_ids=list(agent_ids), seed=0, psi=1.0,
                        psi_tilde=1.0)
    h = len(agent_ids)
    for d, row in zip(demand, p_rows):
        trace.demand.append(d)
        trace.p.append(list(row))
        trace.lam.append([0.0] * h)
        trace.cost_sum.append(0.0)
        trace.residual.append(sum((v - d) / h for v in row))
        trace.weibull.append(None)
    return trace


def _two_agent_problem():
    agents = (eg.AgentModel(cost=dp.ThermalCost(eta=1.0, zeta=0.0),
                            box=dp.BoxConstraint(0, 10)),
              eg.AgentModel(cost=dp.ThermalCost(eta=2.0, zeta=0.0),
                            box=dp.BoxConstraint(0, 10)))
    return eg.ProblemSpec(agents=agents,
                          demand=dp.DemandProcess(kind="trace",
                                                  trace=(0.0, 3.0, 3.0)))


def test_regret_zero_on_oracle_trajectory():
    prob = _two_agent_problem()
    # (4, 2) is the optimum for D=3 (KKT: 2*1*4 = 2*2*2)
    trace = _trace_from_rows([0, 1], [3.0, 3.0], [[4.0, 2.0], [4.0, 2.0]])
    series = mt.dynamic_regret(trace, prob, agent_set="all")
    assert np.allclose(series.cumulative_regret, 0.0, atol=1e-6)
    assert np.allclose(series.cumulative_violation, 0.0, atol=1e-9)


def test_regret_negative_when_stuck_below():
    agents = (eg.AgentModel(cost=dp.ThermalCost(eta=1.0, zeta=0.0),
                            box=dp.BoxConstraint(0, 10)),)
    prob = eg.ProblemSpec(agents=agents,
                          demand=dp.DemandProcess(kind="trace",
                                                  trace=(0.0, 4.0)))
    trace = _trace_from_rows([0], [4.0], [[0.0]])
    series = mt.dynamic_regret(trace, prob, agent_set="all")
    assert series.cumulative_regret[-1] == pytest.approx(-16.0, abs=1e-6)


def test_violation_signed_cancellation():
    trace = _trace_from_rows([0], [0.0, 0.0], [[1.0], [-1.0]])
    series = mt.constraint_violation(trace)
    assert np.allclose(series.cumulative_violation, [1.0, 0.0])


def test_violation_permutation_invariant():
    d = [5.0, 6.0, 4.0]
    rows = [[1.0, 7.0, 4.0], [2.0, 6.0, 9.0], [3.0, 3.0, 3.0]]
    t1 = _trace_from_rows([0, 1, 2], d, rows)
    t2 = _trace_from_rows([2, 0, 1], d, [[r[2], r[0], r[1]] for r in rows])
    v1 = mt.constraint_violation(t1).cumulative_violation
    v2 = mt.constraint_violation(t2).cumulative_violation
    assert np.allclose(v1, v2)


def test_growth_exponent_power_laws():
    t = np.arange(1, 2001, dtype=float)
    assert mt.growth_exponent(t) == pytest.approx(1.0, abs=0.01)
    assert mt.growth_exponent(np.sqrt(t)) == pytest.approx(0.5, abs=0.01)
    assert mt.growth_exponent(np.full_like(t, 3.0)) == pytest.approx(0.0,
                                                                     abs=0.01)


def test_growth_exponent_rejects_nonpositive():
    with pytest.raises(mt.MetricsError):
        mt.growth_exponent([1.0, -1.0, 2.0, 3.0], window=1.0)


def test_oracle_infeasibility_reports_step():
    agents = (eg.AgentModel(cost=dp.ThermalCost(eta=1.0, zeta=0.0),
                            box=dp.BoxConstraint(0, 5)),)
    prob = eg.ProblemSpec(agents=agents,
                          demand=dp.DemandProcess(kind="trace",
                                                  trace=(0.0, 3.0, 9.0)))
    trace = _trace_from_rows([0], [3.0, 9.0], [[3.0], [5.0]])
    with pytest.raises(mt.MetricsError, match="t=2"):
        mt.dynamic_regret(trace, prob, agent_set="all")


def test_oracle_memoization():
    prob = _two_agent_problem()
    trace = _trace_from_rows([0, 1], [3.0, 3.0], [[4.0, 2.0], [1.0, 1.0]])
    oracle = mt.OptimumOracle(trace, prob)
    a = oracle.solve(1, "all")
    b = oracle.solve(1, "all")
    assert a is b


def test_benign_agent_set_restricts_to_recorded():
    g = tp.circulant_graph(6, [1, 2])
    net = tp.NetworkSpec(graph=g, weights=tp.build_metropolis(g),
                         byzantine=frozenset({5}),
                         trim_budget={i: 1 for i in (0, 1, 3, 4)})
    agents = tuple(eg.AgentModel(cost=dp.ThermalCost(eta=0.05, zeta=2.0),
                                 box=dp.BoxConstraint(0, 150))
                   for _ in range(6))
    prob = eg.ProblemSpec(agents=agents,
                          demand=dp.DemandProcess(kind="gaussian", mean=70.0,
                                                  stddev=5.0))
    cfg = eg.RunConfig(alpha=1.0, beta=3.0, theta=0.001, horizon=10,
                       algorithm="resilient", rule_kind="ctm_arc")
    trace = eg.run(net, prob, ak.AttackSpec(kind="small_value", value=-300.0),
                   cfg, seed=2)
    series = mt.dynamic_regret(trace, prob, agent_set="benign")
    assert len(series.cumulative_regret) == 10
    oracle = mt.OptimumOracle(trace, prob)
    assert oracle.agent_ids("benign") == [0, 1, 2, 3, 4]
