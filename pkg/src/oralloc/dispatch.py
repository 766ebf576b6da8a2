"""Economic-dispatch problem data: cost models, demand, per-step optimum oracle.

Thermal stations carry a quadratic cost. Wind stations pay a linear cost
plus under/over-estimation penalties against the random wind power induced
by Weibull-distributed wind speed through the standard piecewise-linear
power curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate


class DispatchError(ValueError):
    pass


class InfeasibleDemandError(DispatchError):
    pass


@dataclass(frozen=True)
class BoxConstraint:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise DispatchError(f"box [{self.lo}, {self.hi}] has lo > hi")

    def clip(self, p):
        return min(max(p, self.lo), self.hi)


@dataclass(frozen=True)
class ThermalCost:
    """Quadratic generation cost eta*p^2 + zeta*p + xi."""

    eta: float
    zeta: float
    xi: float = 0.0

    def __post_init__(self):
        if self.eta < 0:
            raise DispatchError("quadratic coefficient must be nonnegative")


@dataclass(frozen=True)
class WindCost:
    """Linear cost plus expected under/over-estimation penalties."""

    rho_lin: float
    sigma_ue: float
    sigma_oe: float
    v_in: float
    v_out: float
    v_r: float
    p_r: float

    def __post_init__(self):
        if not (0 < self.v_in < self.v_r < self.v_out):
            raise DispatchError("need 0 < v_in < v_r < v_out")
        if self.p_r <= 0:
            raise DispatchError("rated power must be positive")
        if self.sigma_ue < 0 or self.sigma_oe < 0:
            raise DispatchError("penalty coefficients must be nonnegative")


@dataclass(frozen=True)
class WeibullParams:
    scale: float
    shape: float

    def __post_init__(self):
        if self.scale <= 0 or self.shape <= 0:
            raise DispatchError("Weibull scale and shape must be positive")

    def cdf(self, v):
        if v <= 0:
            return 0.0
        return 1.0 - math.exp(-((v / self.scale) ** self.shape))


def wind_power_cdf(model, weibull, p):
    """CDF of the wind power W at p.

    W maps wind speed through the power curve: 0 below cut-in / above
    cut-out, linear ramp up to rated speed, flat at rated power up to
    cut-out. Point masses sit at 0 and p_r.
    """
    if p < 0:
        return 0.0
    if p >= model.p_r:
        return 1.0
    # speed at which the ramp reaches power p
    v_p = model.v_in + p * (model.v_r - model.v_in) / model.p_r
    return weibull.cdf(v_p) + (1.0 - weibull.cdf(model.v_out))


def _expected_shortfall_surplus(model, weibull, p):
    """(E[(W-p)+], E[(p-W)+]) via CDF integrals; handles the point masses."""
    p_r = model.p_r

    def cdf(x):
        return wind_power_cdf(model, weibull, x)

    # E[(W-p)+] = int_{max(p,0)}^{p_r} (1 - F(x)) dx, plus (0-p)*1 tail if p<0
    lo = max(p, 0.0)
    if lo < p_r:
        short, _ = integrate.quad(lambda x: 1.0 - cdf(x), lo, p_r,
                                  epsabs=1e-10, epsrel=1e-10, limit=200)
    else:
        short = 0.0
    if p < 0:
        short += -p  # W >= 0 always, so (W-p)+ gains -p uniformly
    # E[(p-W)+] = int_0^p F(x) dx for p >= 0
    if p > 0:
        hi = min(p, p_r)
        surplus, _ = integrate.quad(cdf, 0.0, hi,
                                    epsabs=1e-10, epsrel=1e-10, limit=200)
        if p > p_r:
            surplus += p - p_r
    else:
        surplus = 0.0
    return short, surplus


def cost_value(model, weibull, p):
    """Instantaneous cost of producing p under the given model."""
    if isinstance(model, ThermalCost):
        if weibull is not None:
            raise DispatchError("thermal cost takes no Weibull parameters")
        return model.eta * p * p + model.zeta * p + model.xi
    if isinstance(model, WindCost):
        if weibull is None:
            raise DispatchError("wind cost needs Weibull parameters")
        short, surplus = _expected_shortfall_surplus(model, weibull, p)
        return model.rho_lin * p + model.sigma_ue * short + model.sigma_oe * surplus
    raise DispatchError(f"unknown cost model {type(model).__name__}")


def cost_gradient(model, weibull, p):
    """Derivative of cost_value in p (closed form for both models)."""
    if isinstance(model, ThermalCost):
        if weibull is not None:
            raise DispatchError("thermal cost takes no Weibull parameters")
        return 2.0 * model.eta * p + model.zeta
    if isinstance(model, WindCost):
        if weibull is None:
            raise DispatchError("wind cost needs Weibull parameters")
        f = wind_power_cdf(model, weibull, p)
        return model.rho_lin + model.sigma_oe * f - model.sigma_ue * (1.0 - f)
    raise DispatchError(f"unknown cost model {type(model).__name__}")


def gradient_bound(model, weibull, box):
    """Upper bound on |cost gradient| over the box (Assumption-style constant)."""
    if isinstance(model, ThermalCost):
        return max(abs(2.0 * model.eta * box.lo + model.zeta),
                   abs(2.0 * model.eta * box.hi + model.zeta))
    if isinstance(model, WindCost):
        return max(abs(model.rho_lin - model.sigma_ue),
                   abs(model.rho_lin + model.sigma_oe))
    raise DispatchError(f"unknown cost model {type(model).__name__}")


def _agent_best_response(model, weibull, box, mu, tol=1e-10):
    """argmin_{p in box} C(p) + mu*p; gradient is monotone so bisect."""
    def g(p):
        return cost_gradient(model, weibull, p) + mu

    if isinstance(model, ThermalCost) and model.eta > 0:
        return box.clip((-model.zeta - mu) / (2.0 * model.eta))
    lo, hi = box.lo, box.hi
    if g(lo) >= 0:
        return lo
    if g(hi) <= 0:
        return hi
    while hi - lo > tol * max(1.0, abs(hi) + abs(lo)):
        mid = 0.5 * (lo + hi)
        if g(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def instantaneous_optimum(costs, boxes, weibulls, demand, tol=1e-9):
    """Solve min sum C_i(P_i) s.t. mean(P) = demand, P_i in box_i.

    Bisection on the scalar multiplier mu: each agent answers with its
    box-constrained best response, and the induced mean allocation is
    nonincreasing in mu. Returns (allocations, mu).
    """
    n = len(costs)
    if not (len(boxes) == len(weibulls) == n):
        raise DispatchError("costs, boxes, weibulls must align")
    total_lo = sum(b.lo for b in boxes)
    total_hi = sum(b.hi for b in boxes)
    target = n * demand
    if not (total_lo - 1e-12 <= target <= total_hi + 1e-12):
        raise InfeasibleDemandError(
            f"demand {demand} infeasible for boxes summing to [{total_lo}, {total_hi}]")

    def mean_alloc(mu):
        return sum(_agent_best_response(costs[i], weibulls[i], boxes[i], mu)
                   for i in range(n)) / n

    g_max = 1.0
    for i in range(n):
        g_max = max(g_max,
                    abs(cost_gradient(costs[i], weibulls[i], boxes[i].lo)),
                    abs(cost_gradient(costs[i], weibulls[i], boxes[i].hi)))
    lo, hi = -(g_max + 1.0), g_max + 1.0
    # mean_alloc is nonincreasing in mu; expand until the bracket straddles
    for _ in range(200):
        if mean_alloc(lo) >= demand - tol and mean_alloc(hi) <= demand + tol:
            break
        lo *= 2.0
        hi *= 2.0
    atol = tol * max(1.0, abs(demand))
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        m = mean_alloc(mid)
        if abs(m - demand) <= atol:
            lo = hi = mid
            break
        if m > demand:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(lo) + abs(hi)):
            break
    mu = 0.5 * (lo + hi)
    alloc = [_agent_best_response(costs[i], weibulls[i], boxes[i], mu)
             for i in range(n)]
    mean = sum(alloc) / n
    if abs(mean - demand) > atol:
        # multiplier sits at a breakpoint: distribute the residual over the
        # agents whose response is strictly inside the box
        residual = target - sum(alloc)
        free = [i for i in range(n)
                if boxes[i].lo + 1e-12 < alloc[i] < boxes[i].hi - 1e-12]
        if not free:
            free = list(range(n))
        # small correction only; keeps KKT residual within tolerance
        for i in free:
            alloc[i] = boxes[i].clip(alloc[i] + residual / len(free))
    return np.array(alloc), mu


@dataclass(frozen=True)
class DemandProcess:
    """Per-step average demand: gaussian draws or a fixed trace."""

    kind: str
    mean: float = 0.0
    stddev: float = 0.0
    trace: tuple = ()

    def __post_init__(self):
        if self.kind not in ("gaussian", "trace"):
            raise DispatchError(f"unknown demand kind {self.kind!r}")
        if self.kind == "gaussian" and self.stddev < 0:
            raise DispatchError("stddev must be nonnegative")
        if self.kind == "trace":
            vals = tuple(float(v) for v in self.trace)
            if any(not math.isfinite(v) for v in vals):
                raise DispatchError("trace demand values must be finite")
            object.__setattr__(self, "trace", vals)

    def envelope(self):
        """(min, max) demand range used for the Assumption-1 constants.

        Gaussian demand uses the 6-sigma envelope; a trace uses its extrema.
        The t=0 initialization demand of zero is included.
        """
        if self.kind == "gaussian":
            lo = self.mean - 6.0 * self.stddev
            hi = self.mean + 6.0 * self.stddev
        else:
            lo = min(self.trace) if self.trace else 0.0
            hi = max(self.trace) if self.trace else 0.0
        return min(lo, 0.0), max(hi, 0.0)


def realize_demand(process, t, rng):
    """Demand at step t; deterministic given the per-(seed, t) stream."""
    if process.kind == "trace":
        if t >= len(process.trace):
            raise DispatchError(f"trace demand exhausted at t={t}")
        return process.trace[t]
    return process.mean + process.stddev * rng.standard_normal()
