import math

import numpy as np
import pytest

from oralloc import aggregation as ag
from oralloc import topology as tp

# worked fixtures: own/received pairs with one adversarial entry each
CTM_FIXTURE = ([1.0, 0.0], [[1.0, 0.0], [0.0, 1.0], [100.0, 100.0]])
IOS_FIXTURE = ([-9.0], [[-5.0], [10.0], [-20.0]])
SCC_FIXTURE = ([4.0, 0.0], [[0.0, 4.0], [-4.0, 0.0], [20.0, 20.0]])


def test_arc_clips_to_second_largest_norm():
    own, recv = CTM_FIXTURE
    out = ag.arc_preprocess(own, recv, 1)
    assert np.allclose(out[0], [1.0, 0.0])
    assert np.allclose(out[1], [0.0, 1.0])
    assert np.allclose(out[2], [0.70710678, 0.70710678], atol=1e-4)


def test_arc_budget_zero_clips_nothing():
    own, recv = CTM_FIXTURE
    out = ag.arc_preprocess(own, recv, 0)
    for x, y in zip(out, recv):
        assert np.allclose(x, y)


def test_arc_identical_norms_unchanged():
    out = ag.arc_preprocess([0.0], [[2.0], [-2.0], [2.0]], 1)
    assert np.allclose(np.ravel(out), [2.0, -2.0, 2.0])


def test_arc_budget_too_large():
    with pytest.raises(ag.AggregationError):
        ag.arc_preprocess([0.0], [[1.0]], 1)


def test_ctm_golden_fixture():
    own, recv = CTM_FIXTURE
    out, norm = ag.base_rule_norm("ctm", own, recv, b=1)
    assert np.allclose(out, [1.0, 0.5])
    assert norm == pytest.approx(math.sqrt(1.25))
    # benign norms are all 1, so Property 2 fails for the base rule
    assert norm > 1.0


def test_ctm_plain_mean_when_b_zero():
    out = ag.ctm([1.0], [[2.0], [3.0], [4.0]], 0)
    assert out[0] == pytest.approx(2.5)


def test_ctm_constant_inputs():
    out = ag.ctm([5.0], [[5.0], [5.0], [5.0]], 1)
    assert out[0] == pytest.approx(5.0)


def test_ios_golden_fixture():
    own, recv = IOS_FIXTURE
    out, norm = ag.base_rule_norm("ios", own, recv, weights_row=[0.25] * 4, b=1)
    assert out[0] == pytest.approx(-34.0 / 3.0)
    assert norm == pytest.approx(34.0 / 3.0)
    assert norm > 10.0   # max benign norm is 10: Property 2 violated


def test_ios_b_zero_is_weighted_average():
    out = ag.ios([1.0], [[2.0], [3.0]], [0.5, 0.25, 0.25], 0)
    assert out[0] == pytest.approx(0.5 * 1 + 0.25 * 2 + 0.25 * 3)


def test_ios_tie_removes_lowest_index():
    # received at -2 and +2 are equidistant from the average 0
    out = ag.ios([0.0], [[-2.0], [2.0]], [1 / 3] * 3, 1)
    assert out[0] == pytest.approx(1.0)   # -2 (index 0) removed


def test_scc_golden_fixture():
    own, recv = SCC_FIXTURE
    out, norm = ag.base_rule_norm("scc", own, recv,
                                  weights_row=[0.2, 0.2, 0.2, 0.4],
                                  tau=math.sqrt(48.0))
    assert np.allclose(out, [3.546, 2.964], atol=1e-3)
    assert norm == pytest.approx(4.622, abs=1e-3)
    assert norm > 4.0    # max benign norm 4: Property 2 violated


def test_scc_tau_zero_returns_own():
    out = ag.scc([3.0], [[10.0], [-7.0]], [0.5, 0.25, 0.25], 0.0)
    assert out[0] == pytest.approx(3.0)


def test_scc_tau_large_plain_average():
    out = ag.scc([1.0], [[2.0], [3.0]], [0.5, 0.25, 0.25], 1e12)
    assert out[0] == pytest.approx(0.5 + 0.5 + 0.75)


def test_scc_tau_oracle_golden():
    own, recv = SCC_FIXTURE
    tau = ag.scc_tau_oracle(own, recv, [True, True, False],
                            [0.2, 0.2, 0.2, 0.4])
    assert tau == pytest.approx(math.sqrt(48.0))


def test_scc_tau_oracle_requires_byzantine():
    with pytest.raises(ag.AggregationError):
        ag.scc_tau_oracle([0.0], [[1.0]], [True], [0.5, 0.5])


def test_scc_tau_quantile_max():
    assert ag.scc_tau_quantile([0.0], [[1.0], [2.0], [3.0]], 1.0) == 3.0


def test_aggregate_ctm_arc_golden():
    own, recv = CTM_FIXTURE
    rule = ag.AggregationRule(kind="ctm_arc", weights_row=(0.25,) * 4, b=1)
    out = ag.aggregate(rule, own, recv)
    assert np.allclose(out, [0.8536, 0.3536], atol=1e-3)
    assert np.linalg.norm(out) <= 1.0 + 1e-9
    assert ag.check_property2(rule, own, recv, [True, True, False])


def test_weighted_average_matches_matrix_row():
    rng = np.random.default_rng(0)
    for _ in range(20):
        m = int(rng.integers(2, 6))
        w = rng.random(m + 1)
        w /= w.sum()
        own = rng.normal(size=2)
        recv = [rng.normal(size=2) for _ in range(m)]
        rule = ag.AggregationRule(kind="weighted_average",
                                  weights_row=tuple(w))
        out = ag.aggregate(rule, own, recv)
        ref = w[0] * own + sum(w[k + 1] * np.asarray(recv[k])
                               for k in range(m))
        assert np.allclose(out, ref, atol=1e-12)


def test_weighted_average_constant_inputs():
    rule = ag.AggregationRule(kind="weighted_average",
                              weights_row=(0.25,) * 4)
    out = ag.aggregate(rule, [7.0], [[7.0], [7.0], [7.0]])
    assert out[0] == pytest.approx(7.0)


def test_scc_arc_all_zero():
    rule = ag.AggregationRule(kind="scc_arc", weights_row=(0.25,) * 4, b=1)
    out = ag.aggregate(rule, [0.0], [[0.0], [0.0], [0.0]],
                       benign_mask=[True, True, False])
    assert out[0] == 0.0


def _random_fixture(rng, d=1, max_mag=1e6):
    m = int(rng.integers(3, 9))
    b = int(rng.integers(1, (m - 1) // 2 + 1))
    own = rng.normal(size=d)
    benign = [rng.normal(size=d) for _ in range(m - b)]
    adversarial = []
    for _ in range(b):
        style = rng.integers(0, 3)
        if style == 0:
            adversarial.append(rng.uniform(-max_mag, max_mag, size=d))
        elif style == 1:
            # near the clipping threshold: just above the largest benign norm
            base = max(benign, key=lambda x: np.linalg.norm(x))
            adversarial.append(base * rng.uniform(1.0, 1.2))
        else:
            adversarial.append(-rng.uniform(0.5, 2.0)
                               * max(benign, key=lambda x: np.linalg.norm(x)))
    recv = benign + adversarial
    order = rng.permutation(m)
    recv = [recv[k] for k in order]
    mask = [bool(order[k] < m - b) for k in range(m)]
    w = rng.random(m + 1) + 0.05
    w /= w.sum()
    return own, recv, mask, b, tuple(w)


@pytest.mark.parametrize("kind", ["ctm_arc", "ios_arc", "scc_arc"])
def test_property2_randomized(kind):
    rng = np.random.default_rng(hash(kind) % (2 ** 32))
    violations = 0
    for _ in range(10 ** 4):
        own, recv, mask, b, w = _random_fixture(rng)
        rule = ag.AggregationRule(kind=kind, weights_row=w, b=b,
                                  tau_strategy=("oracle",))
        if not ag.check_property2(rule, own, recv, mask):
            violations += 1
    assert violations == 0


def test_arc_norm_domination():
    rng = np.random.default_rng(99)
    for _ in range(2000):
        own, recv, mask, b, _w = _random_fixture(rng)
        out = ag.arc_preprocess(own, recv, b)
        benign_max = max(np.linalg.norm(recv[k])
                         for k in range(len(recv)) if mask[k])
        for x in out:
            assert np.linalg.norm(x) <= benign_max + 1e-9


def test_measure_contraction_degenerate():
    rule = ag.AggregationRule(kind="ctm_arc", weights_row=(0.25,) * 4, b=1)
    r = ag.measure_contraction(rule, [2.0], [[2.0], [2.0], [9.0]],
                               [True, True, False],
                               e_row=[1 / 3, 1 / 3, 1 / 3, 0.0])
    assert r == 0.0


def test_measure_contraction_weighted_average_exact():
    w = (0.4, 0.3, 0.3)
    rule = ag.AggregationRule(kind="weighted_average", weights_row=w)
    r = ag.measure_contraction(rule, [1.0], [[2.0], [5.0]], [True, True],
                               e_row=list(w))
    assert r <= 1e-18


@pytest.mark.parametrize("kind", ["ctm_arc", "ios_arc", "scc_arc"])
def test_contraction_below_rho_bound(kind):
    rng = np.random.default_rng(2 + hash(kind) % 1000)
    worst = 0.0
    trials = 0
    for _ in range(4000):
        own, recv, mask, b, w = _random_fixture(rng, max_mag=1e3)
        m = len(recv)
        row = [w[0]] + list(w[1:])
        try:
            bound = tp.rho_bound(kind, m, b, row)
        except tp.TopologyError:
            continue   # IOS weight precondition not met for this fixture
        rule = ag.AggregationRule(kind=kind, weights_row=w, b=b,
                                  tau_strategy=("oracle",))
        e_row = ag.effective_row(kind, w, mask)
        ratio = ag.measure_contraction(rule, own, recv, mask, e_row)
        worst = max(worst, ratio)
        trials += 1
        assert ratio <= bound + 1e-9, (kind, ratio, bound)
    assert trials >= 1000


def test_ctm_arc_higher_dims_reported():
    """Property 2 for ctm_arc is only proved at d=1; at d >= 2 violations
    are possible in principle. Record the observed rate without asserting."""
    rng = np.random.default_rng(5)
    violations = 0
    for _ in range(2000):
        own, recv, mask, b, w = _random_fixture(rng, d=3)
        rule = ag.AggregationRule(kind="ctm_arc", weights_row=w, b=b)
        if not ag.check_property2(rule, own, recv, mask):
            violations += 1
    print(f"ctm_arc d=3 Property-2 violations: {violations}/2000")
