import numpy as np
import pytest

from oralloc import attacks as ak
from oralloc import dispatch as dp
from oralloc import engine as eg
from oralloc import topology as tp


def _thermal_agents(n, eta=0.05, zeta=2.0, box=(0.0, 150.0)):
    return tuple(eg.AgentModel(cost=dp.ThermalCost(eta=eta, zeta=zeta),
                               box=dp.BoxConstraint(*box)) for _ in range(n))


def _case1_like_network():
    g = tp.circulant_graph(6, [1, 2])
    w = tp.build_metropolis(g)
    return tp.NetworkSpec(graph=g, weights=w, byzantine=frozenset({5}),
                          trim_budget={i: 1 for i in (0, 1, 3, 4)})


def _problem(n=6, mean=70.0, stddev=5.0):
    return eg.ProblemSpec(agents=_thermal_agents(n),
                          demand=dp.DemandProcess(kind="gaussian", mean=mean,
                                                  stddev=stddev))


def test_primal_step_examples():
    box = dp.BoxConstraint(0.0, 10.0)
    assert eg.primal_step(0.0, 1.0, 0.0, 1.0, 1, box) == 0.0
    assert eg.primal_step(5.0, 0.0, 0.0, 1.0, 1, box) == 5.0
    assert eg.primal_step(5.0, -2.0, 0.0, 1.0, 1, box) == 7.0


def test_dual_half_step_examples():
    assert eg.dual_half_step(0.0, 4.0, 4.0, 1.0, 0.5, 1) == 0.0
    assert eg.dual_half_step(1.0, 4.0, 4.0, 1.0, 0.5, 1) == 0.5
    assert eg.dual_half_step(0.0, 3.0, 0.0, 1.0, 0.5, 3) == 1.0


def test_run_config_validation():
    with pytest.raises(eg.EngineError):
        eg.RunConfig(alpha=0.0, beta=1.0, theta=0.1, horizon=1,
                     algorithm="attack_free")
    with pytest.raises(eg.EngineError):
        eg.RunConfig(alpha=1.0, beta=10.0, theta=0.2, horizon=1,
                     algorithm="attack_free")
    with pytest.raises(eg.EngineError):
        eg.RunConfig(alpha=1.0, beta=1.0, theta=0.1, horizon=1,
                     algorithm="median_of_means")


def test_horizon_zero_trace_is_empty():
    net = _case1_like_network()
    cfg = eg.RunConfig(alpha=1.0, beta=3.0, theta=0.001, horizon=0,
                       algorithm="resilient", rule_kind="ctm_arc")
    trace = eg.run(net, _problem(), ak.AttackSpec(kind="small_value",
                                                  value=-300.0), cfg, seed=1)
    assert trace.horizon == 0
    assert trace.p == [] and trace.lam == [] and trace.demand == []


def test_byzantine_without_attack_rejected():
    net = _case1_like_network()
    cfg = eg.RunConfig(alpha=1.0, beta=3.0, theta=0.001, horizon=2,
                       algorithm="resilient", rule_kind="ctm_arc")
    with pytest.raises(eg.EngineError):
        eg.run(net, _problem(), ak.AttackSpec(kind="none"), cfg, seed=1)


def test_ctm_b0_equals_attack_free_with_uniform_weights():
    """With no Byzantine agents and uniform closed-neighborhood weights,
    CTM with b=0 is the same unweighted mean as the plain average step."""
    g = tp.complete_graph(4)
    w = tp.WeightMatrix(np.full((4, 4), 0.25))
    net = tp.NetworkSpec(graph=g, weights=w)
    prob = _problem(4)
    atk = ak.AttackSpec(kind="none")
    base = dict(alpha=1.0, beta=3.0, theta=0.001, horizon=40)
    t1 = eg.run(net, prob, atk,
                eg.RunConfig(algorithm="attack_free", **base), seed=5)
    t2 = eg.run(net, prob, atk,
                eg.RunConfig(algorithm="resilient", rule_kind="ctm_arc",
                             **base), seed=5)
    assert t1.p == t2.p
    assert t1.lam == t2.lam


def test_determinism_identical_traces():
    net = _case1_like_network()
    cfg = eg.RunConfig(alpha=1.0, beta=3.0, theta=0.001, horizon=30,
                       algorithm="resilient", rule_kind="ios_arc")
    atk = ak.AttackSpec(kind="gaussian", mean=-150.0, stddev=5.0 ** 0.5)
    a = eg.run(net, _problem(), atk, cfg, seed=77)
    b = eg.run(net, _problem(), atk, cfg, seed=77)
    assert a.p == b.p and a.lam == b.lam and a.demand == b.demand
    assert a.broadcasts == b.broadcasts


def test_primal_feasibility_exact():
    net = _case1_like_network()
    cfg = eg.RunConfig(alpha=1.0, beta=3.0, theta=0.001, horizon=60,
                       algorithm="resilient", rule_kind="scc_arc",
                       tau_strategy=("oracle",))
    atk = ak.AttackSpec(kind="small_value", value=-300.0)
    trace = eg.run(net, _problem(), atk, cfg, seed=3)
    for row in trace.p:
        for p in row:
            assert 0.0 <= p <= 150.0


def test_dual_bound_monitor_records_violations():
    net = _case1_like_network()
    cfg = eg.RunConfig(alpha=1.0, beta=3.0, theta=0.001, horizon=10,
                       algorithm="attack_free")
    atk = ak.AttackSpec(kind="small_value", value=-1e9)
    trace = eg.run(net, _problem(), atk, cfg, seed=3)
    kinds = {v["monitor"] for v in trace.monitor_violations}
    assert "dual_bound" in kinds

    strict = eg.RunConfig(alpha=1.0, beta=3.0, theta=0.001, horizon=10,
                          algorithm="attack_free", strict_monitors=True)
    with pytest.raises(eg.EngineError, match="monitor"):
        eg.run(net, _problem(), atk, strict, seed=3)


def test_dual_bounds_hold_on_clean_runs():
    net = _case1_like_network()
    atk = ak.AttackSpec(kind="small_value", value=-300.0)
    for algo, rule in (("attack_free", "weighted_average"),
                       ("resilient", "ctm_arc")):
        cfg = eg.RunConfig(alpha=1.0, beta=3.0, theta=0.001, horizon=80,
                           algorithm=algo, rule_kind=rule,
                           strict_monitors=True)
        trace = eg.run(net, _problem(), atk, cfg, seed=11)
        assert trace.monitor_violations == []
        cap = (trace.psi if algo == "resilient" else trace.psi_tilde) / 0.001
        for row in trace.lam:
            assert all(abs(v) <= cap + 1e-9 for v in row)


def test_assumption_constants():
    prob = _problem(6, mean=70.0, stddev=5.0)
    psi, psi_tilde = eg.assumption_constants(prob, 5, 6)
    # envelope [0, 100], box [0, 150] -> worst |P - D| = 150
    assert psi == pytest.approx(150.0 / 5)
    assert psi_tilde == pytest.approx(150.0 / 6)


def test_resilient_beats_attack_free_direction():
    net = _case1_like_network()
    atk = ak.AttackSpec(kind="small_value", value=-300.0)
    base = dict(alpha=1.0, beta=3.0, theta=0.001, horizon=60)
    af = eg.run(net, _problem(), atk,
                eg.RunConfig(algorithm="attack_free", **base), seed=4)
    res = eg.run(net, _problem(), atk,
                 eg.RunConfig(algorithm="resilient", rule_kind="ios_arc",
                              **base), seed=4)
    v_af = abs(np.cumsum(af.residual)[-1])
    v_res = abs(np.cumsum(res.residual)[-1])
    assert v_res < v_af


def test_weibull_process_trace_and_uniform():
    proc = eg.WeibullProcess(kind="trace", trace=((10.0, 2.5), (11.0, 2.6)))
    wb = proc.realize(0, 1)
    assert (wb.scale, wb.shape) == (11.0, 2.6)
    with pytest.raises(eg.EngineError):
        proc.realize(0, 2)
    uni = eg.WeibullProcess(kind="uniform", scale_range=(3.0, 25.0),
                            shape_range=(2.0, 3.0))
    a = uni.realize(9, 4)
    b = uni.realize(9, 4)
    assert (a.scale, a.shape) == (b.scale, b.shape)
    assert 3.0 <= a.scale <= 25.0 and 2.0 <= a.shape <= 3.0
