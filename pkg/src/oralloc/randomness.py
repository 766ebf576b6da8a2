"""Counter-based splittable RNG streams keyed by (seed, domain, agent, step).

Every random quantity in a run (demand draws, Weibull factors, Gaussian
attack messages) pulls from its own stream, so runs are reproducible and
insensitive to evaluation order.
"""

from __future__ import annotations

import numpy as np

_DOMAINS = {
    "demand": 1,
    "weibull_scale": 2,
    "weibull_shape": 3,
    "attack": 4,
}


def domain_id(tag):
    if tag not in _DOMAINS:
        raise ValueError(f"unknown RNG domain {tag!r}")
    return _DOMAINS[tag]


def _flatten_key(t):
    # t may be an int or a tuple (t, target) for per-target attack draws
    if isinstance(t, tuple):
        return tuple(int(v) for v in t)
    return (int(t),)


def rng_stream(seed, domain_tag, agent, t):
    """Fresh Philox generator for the given key; same key, same draws."""
    key = (domain_id(domain_tag), int(agent)) + _flatten_key(t)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))
