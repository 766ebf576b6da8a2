import math

import numpy as np
import pytest

from oralloc import attacks as ak
from oralloc.randomness import rng_stream


BYZ = frozenset({3})


def _stream(seed):
    return lambda agent, key: rng_stream(seed, "attack", agent, key)


def test_constant_attacks_invariant():
    small = ak.AttackSpec(kind="small_value", value=-300.0)
    large = ak.AttackSpec(kind="large_value", value=-0.01)
    for t in (0, 5, 100):
        for target in (0, 1, None):
            assert ak.byzantine_message(small, 3, t, target, _stream(1), BYZ)[0] == -300.0
            assert ak.byzantine_message(large, 3, t, target, _stream(1), BYZ)[0] == -0.01


def test_gaussian_deterministic_per_step():
    spec = ak.AttackSpec(kind="gaussian", mean=-150.0, stddev=math.sqrt(5.0))
    a = ak.byzantine_message(spec, 3, 7, 0, _stream(9), BYZ)
    b = ak.byzantine_message(spec, 3, 7, 1, _stream(9), BYZ)
    assert a[0] == b[0]          # shared broadcast per (agent, step)
    c = ak.byzantine_message(spec, 3, 8, 0, _stream(9), BYZ)
    assert a[0] != c[0]


def test_gaussian_per_target_mode():
    spec = ak.AttackSpec(kind="gaussian", mean=-10.0, stddev=1.0,
                         per_target=True)
    a = ak.byzantine_message(spec, 3, 7, 0, _stream(9), BYZ)
    b = ak.byzantine_message(spec, 3, 7, 1, _stream(9), BYZ)
    assert a[0] != b[0]


def test_gaussian_sample_mean():
    spec = ak.AttackSpec(kind="gaussian", mean=-150.0, stddev=math.sqrt(5.0))
    n = 10 ** 5
    draws = np.array([ak.byzantine_message(spec, 3, t, None, _stream(4), BYZ)[0]
                      for t in range(n)])
    tol = 4.0 * spec.stddev / math.sqrt(n)
    assert abs(draws.mean() - spec.mean) <= tol


def test_benign_sender_rejected():
    spec = ak.AttackSpec(kind="small_value", value=-300.0)
    with pytest.raises(ak.AttackError):
        ak.byzantine_message(spec, 0, 0, 1, _stream(1), BYZ)


def test_unknown_kind_rejected():
    with pytest.raises(ak.AttackError):
        ak.AttackSpec(kind="huge_value")
    with pytest.raises(ak.AttackError):
        ak.AttackSpec(kind="gaussian", stddev=-1.0)
