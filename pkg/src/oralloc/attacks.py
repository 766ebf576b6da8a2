"""Byzantine broadcast messages: stateless adversarial dual-variable sources."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class AttackError(ValueError):
    pass


@dataclass(frozen=True)
class AttackSpec:
    """What a Byzantine agent broadcasts each step.

    kind: large_value | small_value | gaussian | none
    Constant kinds send `value` every step; gaussian draws one value per
    (agent, step) and broadcasts it to every neighbor. per_target=True
    switches to independent draws per receiving neighbor (off by default,
    matching the experimental setup of a single shared wrong message).
    """

    kind: str
    value: float = 0.0
    mean: float = 0.0
    stddev: float = 0.0
    per_target: bool = False

    def __post_init__(self):
        if self.kind not in ("large_value", "small_value", "gaussian", "none"):
            raise AttackError(f"unknown attack kind {self.kind!r}")
        if self.stddev < 0:
            raise AttackError("stddev must be nonnegative")


def byzantine_message(spec, agent, t, target, rng_stream, byzantine, d=1):
    """Message agent `agent` sends to `target` at step t.

    `rng_stream` is a callable (agent, t) -> numpy Generator keyed to the
    attack domain; per-target mode folds the target id into the step key.
    """
    if agent not in byzantine:
        raise AttackError(f"agent {agent} is not Byzantine")
    if spec.kind in ("large_value", "small_value"):
        return np.full(d, spec.value)
    if spec.kind == "gaussian":
        key_t = (t, target) if spec.per_target else t
        gen = rng_stream(agent, key_t)
        return spec.mean + spec.stddev * gen.standard_normal(d)
    raise AttackError("attack kind 'none' produces no message")
