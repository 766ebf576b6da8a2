"""Deterministic simulator for decentralized online resource allocation
under Byzantine attacks: primal-dual step loops, robust dual aggregation,
economic-dispatch cost models, and regret/violation metrics."""

from . import (aggregation, attacks, cli, config, dispatch, engine, metrics,
               randomness, topology)

__all__ = ["aggregation", "attacks", "cli", "config", "dispatch", "engine",
           "metrics", "randomness", "topology"]
__version__ = "0.1.0"
