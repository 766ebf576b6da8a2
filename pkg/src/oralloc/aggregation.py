"""Robust aggregation of dual variables: clipping preprocessor, base rules
(coordinate-wise trimmed mean, iterative outlier removal, self-centered
clipping) and their clipped compositions, plus checkers for the two
properties the convergence analysis relies on.

All operations are dimension-generic; the dispatch experiments use d=1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class AggregationError(ValueError):
    pass


def _as_vectors(own, received):
    own = np.atleast_1d(np.asarray(own, dtype=float))
    recv = [np.atleast_1d(np.asarray(x, dtype=float)) for x in received]
    for x in recv:
        if x.shape != own.shape:
            raise AggregationError("all dual vectors must share one dimension")
    return own, recv


def arc_preprocess(own, received, b):
    """Clip received vectors to the (b+1)-th largest received norm.

    Sorting ties on equal norms are broken by input index (stable sort).
    Zero vectors pass through unchanged. `own` is never clipped.
    """
    own, recv = _as_vectors(own, received)
    if b >= len(recv):
        raise AggregationError(f"trim budget {b} must be < received count {len(recv)}")
    norms = np.array([np.linalg.norm(x) for x in recv])
    order = sorted(range(len(recv)), key=lambda k: (-norms[k], k))
    threshold = norms[order[b]]
    clipped = []
    for x, nx in zip(recv, norms):
        if nx > threshold and nx > 0:
            clipped.append((threshold / nx) * x)
        else:
            clipped.append(x.copy())
    return clipped


def ctm(own, received, b):
    """Coordinate-wise trimmed mean.

    Per coordinate: drop the b largest and b smallest received values (by
    sorted position, so duplicates at the boundary trim exactly 2b entries),
    then average the survivors together with own's coordinate.
    """
    own, recv = _as_vectors(own, received)
    if len(recv) < 2 * b + 1:
        raise AggregationError(
            f"CTM needs at least 2b+1={2 * b + 1} received values, got {len(recv)}")
    mat = np.stack(recv)           # (m, d)
    srt = np.sort(mat, axis=0)
    kept = srt[b:mat.shape[0] - b] if b > 0 else srt
    return (kept.sum(axis=0) + own) / (kept.shape[0] + 1)


def ios(own, received, weights_row, b):
    """Iterative outlier removal then weighted averaging.

    `weights_row` holds the own weight first, then one weight per received
    entry. Each round removes the received element farthest from the
    weighted average of the current set (own is never removed); distance
    ties remove the lowest input index.
    """
    own, recv = _as_vectors(own, received)
    if b >= len(recv):
        raise AggregationError(f"trim budget {b} must be < received count {len(recv)}")
    w = np.asarray(weights_row, dtype=float)
    if w.size != len(recv) + 1:
        raise AggregationError("weights_row must hold own weight plus one per received")
    alive = list(range(len(recv)))
    for _ in range(b):
        pts = [own] + [recv[k] for k in alive]
        wts = np.array([w[0]] + [w[k + 1] for k in alive])
        avg = np.average(pts, axis=0, weights=wts)
        dists = [np.linalg.norm(recv[k] - avg) for k in alive]
        worst = max(range(len(alive)), key=lambda j: (dists[j], -alive[j]))
        alive.pop(worst)
    pts = [own] + [recv[k] for k in alive]
    wts = np.array([w[0]] + [w[k + 1] for k in alive])
    return np.average(pts, axis=0, weights=wts)


def scc(own, received, weights_row, tau):
    """Clip received vectors toward own at radius tau, then weighted-average."""
    own, recv = _as_vectors(own, received)
    if tau < 0:
        raise AggregationError("clipping radius must be nonnegative")
    w = np.asarray(weights_row, dtype=float)
    if w.size != len(recv) + 1:
        raise AggregationError("weights_row must hold own weight plus one per received")
    clipped = []
    for x in recv:
        delta = x - own
        dist = np.linalg.norm(delta)
        if dist > tau and dist > 0:
            clipped.append(own + (tau / dist) * delta)
        else:
            clipped.append(x)
    pts = [own] + clipped
    return np.average(pts, axis=0, weights=w)


def scc_tau_oracle(own, received, benign_mask, weights_row):
    """Ideal clipping radius from ground-truth benign labels.

    tau^2 = (1 / Byzantine weight mass) * sum over own and benign received
    of weight * ||own - value||^2. Diagnostic/test mode: a running system
    has no labels and falls back to a distance quantile.
    """
    own, recv = _as_vectors(own, received)
    w = np.asarray(weights_row, dtype=float)
    byz_mass = sum(w[k + 1] for k in range(len(recv)) if not benign_mask[k])
    if byz_mass <= 0:
        raise AggregationError("oracle radius undefined without Byzantine neighbors")
    acc = 0.0  # own term contributes zero distance
    for k, x in enumerate(recv):
        if benign_mask[k]:
            acc += w[k + 1] * float(np.linalg.norm(own - x) ** 2)
    return float(np.sqrt(acc / byz_mass))


def scc_tau_quantile(own, received, q):
    """Practical clipping radius: q-quantile of distances to own."""
    own, recv = _as_vectors(own, received)
    dists = np.array([np.linalg.norm(x - own) for x in recv])
    return float(np.quantile(dists, q))


@dataclass(frozen=True)
class AggregationRule:
    """Configured aggregator: plain weighted average or a clipped composition.

    kind: weighted_average | ctm_arc | ios_arc | scc_arc
    weights_row: own mixing weight first, then one weight per received entry
    tau_strategy: ("oracle",) or ("quantile", q); only scc_arc reads it.
    """

    kind: str
    weights_row: tuple
    b: int = 0
    tau_strategy: tuple = ("quantile", 0.5)

    def __post_init__(self):
        if self.kind not in ("weighted_average", "ctm_arc", "ios_arc", "scc_arc"):
            raise AggregationError(f"unknown aggregation kind {self.kind!r}")
        if self.b < 0:
            raise AggregationError("trim budget must be nonnegative")
        row = tuple(float(v) for v in self.weights_row)
        if not row or any(v < 0 or v > 1 for v in row):
            raise AggregationError("weights_row entries must lie in [0, 1]")
        object.__setattr__(self, "weights_row", row)


def aggregate(rule, own, received, benign_mask=None):
    """Apply a configured rule to own plus received duals.

    weighted_average ignores the budget and mixes everything by the row
    weights. Composed kinds run the clipping preprocessor first. scc_arc
    with the oracle radius needs `benign_mask`; when the mask is missing or
    shows no Byzantine neighbor, the median-distance fallback is used.
    """
    own, recv = _as_vectors(own, received)
    if rule.kind == "weighted_average":
        return np.average([own] + recv, axis=0, weights=rule.weights_row)
    clipped = arc_preprocess(own, recv, rule.b)
    if rule.kind == "ctm_arc":
        return ctm(own, clipped, rule.b)
    if rule.kind == "ios_arc":
        return ios(own, clipped, rule.weights_row, rule.b)
    # scc_arc
    strategy = rule.tau_strategy
    tau = None
    if strategy[0] == "oracle":
        if benign_mask is not None and not all(benign_mask):
            tau = scc_tau_oracle(own, clipped, benign_mask, rule.weights_row)
        else:
            strategy = ("quantile", 0.5)
    if tau is None:
        tau = scc_tau_quantile(own, clipped, strategy[1])
    return scc(own, clipped, rule.weights_row, tau)


def check_property2(rule, own, received, benign_mask, slack=1e-9):
    """Norm domination: aggregate norm <= max benign neighborhood norm."""
    own, recv = _as_vectors(own, received)
    out = aggregate(rule, own, recv, benign_mask=benign_mask)
    cap = np.linalg.norm(own)
    for k, x in enumerate(recv):
        if benign_mask[k]:
            cap = max(cap, np.linalg.norm(x))
    return bool(np.linalg.norm(out) <= cap + slack)


def base_rule_norm(kind, own, received, weights_row=None, tau=None, b=1):
    """Run a base rule without the clipping preprocessor (for the golden
    counter-example fixtures) and return (output, norm)."""
    if kind == "ctm":
        out = ctm(own, received, b)
    elif kind == "ios":
        out = ios(own, received, weights_row, b)
    elif kind == "scc":
        out = scc(own, received, weights_row, tau)
    else:
        raise AggregationError(f"unknown base rule {kind!r}")
    return out, float(np.linalg.norm(out))


def measure_contraction(rule, own, received, benign_mask, e_row):
    """Ratio ||AGG - benign weighted average||^2 / weighted dispersion.

    `e_row` is the effective benign row: own weight first, then one weight
    per received entry, zero on Byzantine entries, summing to 1. A
    degenerate denominator (all benign inputs equal to the average) returns
    0 when the numerator is negligible and raises otherwise.
    """
    own, recv = _as_vectors(own, received)
    e = np.asarray(e_row, dtype=float)
    if e.size != len(recv) + 1:
        raise AggregationError("e_row must hold own weight plus one per received")
    for k in range(len(recv)):
        if not benign_mask[k] and e[k + 1] != 0.0:
            raise AggregationError("Byzantine entries must have zero effective weight")
    if abs(e.sum() - 1.0) > 1e-9:
        raise AggregationError("e_row must sum to 1")
    pts = [own] + recv
    bar = sum(e[k] * pts[k] for k in range(len(pts)))
    out = aggregate(rule, own, recv, benign_mask=benign_mask)
    lhs = float(np.linalg.norm(out - bar) ** 2)
    rhs = sum(e[k] * float(np.linalg.norm(pts[k] - bar) ** 2)
              for k in range(len(pts)))
    if rhs <= 0.0:
        if lhs <= 1e-18:
            return 0.0
        raise AggregationError("contraction denominator zero with nonzero numerator")
    return lhs / rhs


def effective_row(rule_kind, weights_row, benign_mask):
    """Witness weight row for the contraction property of a composed rule.

    ctm_arc averages uniformly over own plus benign received; ios_arc and
    scc_arc keep the mixing weights and fold the Byzantine mass into the
    own weight.
    """
    w = np.asarray(weights_row, dtype=float)
    m = w.size - 1
    e = np.zeros_like(w)
    if rule_kind == "ctm_arc":
        benign_count = 1 + sum(1 for k in range(m) if benign_mask[k])
        e[0] = 1.0 / benign_count
        for k in range(m):
            if benign_mask[k]:
                e[k + 1] = 1.0 / benign_count
        return e
    if rule_kind in ("ios_arc", "scc_arc", "weighted_average"):
        byz_mass = sum(w[k + 1] for k in range(m) if not benign_mask[k])
        e[0] = w[0] + byz_mass
        for k in range(m):
            if benign_mask[k]:
                e[k + 1] = w[k + 1]
        return e / e.sum()
    raise AggregationError(f"unknown rule kind {rule_kind!r}")
