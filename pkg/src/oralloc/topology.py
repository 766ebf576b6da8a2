"""Communication graphs, Metropolis mixing weights and robustness diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Undirected graph on agents 0..n-1, stored as a set of sorted edge pairs."""

    n: int
    edges: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise TopologyError("graph needs at least one node")
        for (i, j) in self.edges:
            if i == j:
                raise TopologyError(f"self-loop at node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise TopologyError(f"edge ({i},{j}) out of range for n={self.n}")
            if i > j:
                raise TopologyError("edges must be stored as sorted pairs")
        if not self.is_connected():
            raise TopologyError("graph is not connected")

    @staticmethod
    def from_edges(n, edges):
        pairs = frozenset((min(i, j), max(i, j)) for i, j in edges)
        return Graph(n=n, edges=pairs)

    def neighbors(self, i):
        return sorted(j for j in range(self.n)
                      if (min(i, j), max(i, j)) in self.edges and j != i)

    def degree(self, i):
        return len(self.neighbors(i))

    def is_connected(self):
        if self.n == 1:
            return True
        seen = {0}
        stack = [0]
        adj = {k: [] for k in range(self.n)}
        for (i, j) in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(n):
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def complete_graph(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def circulant_graph(n, offsets):
    """Ring plus chords: node i connects to i +/- k for each offset k."""
    edges = []
    for i in range(n):
        for k in offsets:
            edges.append((i, (i + k) % n))
    return Graph.from_edges(n, edges)


@dataclass(frozen=True)
class WeightMatrix:
    """Row-stochastic mixing matrix aligned with a graph's sparsity pattern."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        object.__setattr__(self, "w", w)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise TopologyError("weight matrix must be square")
        if np.any(w < 0):
            raise TopologyError("weights must be nonnegative")
        if np.max(np.abs(w.sum(axis=1) - 1.0)) > 1e-12:
            raise TopologyError("rows must sum to 1")

    @property
    def n(self):
        return self.w.shape[0]

    def row(self, i):
        return self.w[i].copy()

    def is_doubly_stochastic(self, tol=1e-12):
        return bool(np.max(np.abs(self.w.sum(axis=0) - 1.0)) <= tol)


def build_metropolis(graph):
    """Metropolis constant weights: w_ij = 1/(1+max(deg_i,deg_j)) on edges.

    The diagonal is the residual 1 - sum of off-diagonals, so every row sums
    to exactly 1 in floating point. The result is doubly stochastic.
    """
    n = graph.n
    if n > 1 and not graph.edges:
        raise TopologyError("graph is not connected")
    deg = [graph.degree(i) for i in range(n)]
    w = np.zeros((n, n))
    for (i, j) in graph.edges:
        w[i, j] = w[j, i] = 1.0 / (1.0 + max(deg[i], deg[j]))
    for i in range(n):
        w[i, i] = 1.0 - w[i].sum()
    return WeightMatrix(w)


def _operator_norm_sq(a, iters=200, rtol=1e-12):
    """Squared operator norm of `a` by power iteration on a^T a."""
    ata = a.T @ a
    n = ata.shape[0]
    v = np.ones(n) / np.sqrt(n)
    prev = 0.0
    for _ in range(iters):
        v = ata @ v
        norm = np.linalg.norm(v)
        if norm == 0.0:
            return 0.0
        v /= norm
        val = float(v @ ata @ v)
        if abs(val - prev) <= rtol * max(1.0, abs(val)):
            # one deflation-free check is enough for symmetric PSD ata
            prev = val
            break
        prev = val
    return max(prev, 0.0)


def spectral_gap(weights):
    """Squared distance of the mixing matrix from the perfect averaging operator.

    Returns ||w - (1/n) 1 1^T w||^2 (operator norm squared). Zero for the
    exact averaging matrix, and < 1 for any Metropolis matrix of a connected
    graph.
    """
    w = weights.w
    n = w.shape[0]
    avg = np.ones((n, n)) / n
    return _operator_norm_sq(w - avg @ w)


@dataclass(frozen=True)
class NetworkSpec:
    """Graph, mixing weights, Byzantine set and per-agent trim budgets."""

    graph: Graph
    weights: WeightMatrix
    byzantine: frozenset = frozenset()
    trim_budget: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.graph.n
        if self.weights.n != n:
            raise TopologyError("weights size does not match graph")
        for b in self.byzantine:
            if not (0 <= b < n):
                raise TopologyError(f"byzantine id {b} out of range")
        if len(self.byzantine) >= n:
            raise TopologyError("byzantine set must be a proper subset of agents")
        benign = self.benign_agents()
        sub_ok = _induced_connected(self.graph, benign)
        if not sub_ok:
            raise TopologyError("benign subgraph is disconnected")
        for i in benign:
            nbrs = self.graph.neighbors(i)
            byz_nbrs = sum(1 for j in nbrs if j in self.byzantine)
            b_i = self.budget(i)
            if b_i < byz_nbrs:
                raise TopologyError(
                    f"agent {i}: trim budget {b_i} below Byzantine neighbor count {byz_nbrs}")
            if len(nbrs) < 2 * b_i + 1:
                raise TopologyError(
                    f"agent {i}: neighborhood size {len(nbrs)} < 2*{b_i}+1")

    def budget(self, i):
        return int(self.trim_budget.get(i, 0))

    def benign_agents(self):
        return [i for i in range(self.graph.n) if i not in self.byzantine]


def _induced_connected(graph, nodes):
    nodes = list(nodes)
    if not nodes:
        return False
    keep = set(nodes)
    if len(keep) == 1:
        return True
    adj = {i: [] for i in keep}
    for (i, j) in graph.edges:
        if i in keep and j in keep:
            adj[i].append(j)
            adj[j].append(i)
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(keep)


def benign_subnetwork_parts(graph, weights, byzantine):
    """Induced benign graph plus the diagnostic effective weight matrix.

    Off-diagonal entries keep the original mixing weight between benign
    agents; each diagonal absorbs the weight the agent had assigned to its
    Byzantine neighbors, so rows still sum to 1. Diagnostic only: the
    algorithm path never consumes this matrix.
    """
    byzantine = frozenset(byzantine)
    benign = [i for i in range(graph.n) if i not in byzantine]
    if not _induced_connected(graph, benign):
        raise TopologyError("benign subgraph is disconnected")
    idx = {a: k for k, a in enumerate(benign)}
    h = len(benign)
    w = weights.w
    e = np.zeros((h, h))
    for a in benign:
        absorbed = sum(w[a, b] for b in graph.neighbors(a) if b in byzantine)
        for c in benign:
            if c == a:
                e[idx[a], idx[a]] = w[a, a] + absorbed
            elif (min(a, c), max(a, c)) in graph.edges:
                e[idx[a], idx[c]] = w[a, c]
    sub_edges = [(idx[i], idx[j]) for (i, j) in graph.edges
                 if i in idx and j in idx]
    if h == 1:
        sub = Graph.from_edges(1, [])
    else:
        sub = Graph.from_edges(h, sub_edges)
    return sub, WeightMatrix(e)


def benign_subnetwork(spec):
    return benign_subnetwork_parts(spec.graph, spec.weights, spec.byzantine)


def benign_spectral_gap(spec):
    """kappa of the benign diagnostic matrix: ||E - (1/H) 1 1^T E||^2."""
    _, ew = benign_subnetwork(spec)
    return spectral_gap(ew)


def skewness(spec):
    """Column-sum skewness (1/H)||E^T 1 - 1||^2 of the diagnostic matrix."""
    _, ew = benign_subnetwork(spec)
    h = ew.n
    col = ew.w.sum(axis=0)
    return float(np.sum((col - 1.0) ** 2) / h)


def rho_bound(rule_kind, neighborhood_size, b, weights_row=None):
    """Per-agent contraction-constant upper bound for a composed robust rule.

    `weights_row` lists the agent's own mixing weight first, then one weight
    per neighbor; it is required for the ios/scc bounds. Byzantine placement
    is taken worst-case: the `b` largest neighbor weights.
    """
    nb = int(neighborhood_size)
    b = int(b)
    if b < 0:
        raise TopologyError("trim budget must be nonnegative")
    if b == 0:
        return 0.0
    if rule_kind in ("ctm", "ctm_arc"):
        if nb < 2 * b + 1:
            raise TopologyError(f"CTM requires |N| >= 2b+1, got |N|={nb}, b={b}")
        trim = 6.0 * b * (nb - b + 1) / (nb - 2 * b + 1) ** 2
        arc = b / (nb - 2 * b + 1)
        return trim + arc
    if weights_row is None:
        raise TopologyError(f"rule {rule_kind} needs the agent's weight row")
    row = np.asarray(weights_row, dtype=float)
    if row.size != nb + 1:
        raise TopologyError("weights_row must hold own weight plus one per neighbor")
    nbr = np.sort(row[1:])[::-1]
    worst_mass = float(nbr[:b].sum())          # largest-b neighbor weight mass
    rest = np.concatenate(([row[0]], nbr[b:]))  # own + remaining neighbors
    w_min = float(rest.min())
    w_max = float(rest.max())
    arc = b * w_max / (1.0 - b * w_max)
    if rule_kind in ("ios", "ios_arc"):
        if worst_mass >= 1.0 / 3.0:
            raise TopologyError(
                f"IOS bound needs top-{b} weight mass < 1/3, got {worst_mass:.4f}")
        base = (15.0 * worst_mass) ** 2 / (w_min ** 2 * (1.0 - 3.0 * worst_mass) ** 2)
        return base + arc
    if rule_kind in ("scc", "scc_arc"):
        base = 8.0 * worst_mass * (1.0 + w_min) / w_min
        return base + arc
    raise TopologyError(f"unknown rule kind {rule_kind!r}")


def parse_graph_file(text):
    """Parse the edge-list format: first line "n <count>", then "i j" lines.

    '#' starts a comment; blank lines are skipped.
    """
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if parts[0] != "n" or len(parts) != 2:
                raise TopologyError(f"line {lineno}: expected 'n <count>' header")
            n = int(parts[1])
            continue
        if len(parts) != 2:
            raise TopologyError(f"line {lineno}: expected 'i j'")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        raise TopologyError("missing 'n <count>' header")
    return Graph.from_edges(n, edges)


def format_graph_file(graph):
    lines = [f"n {graph.n}"]
    for (i, j) in sorted(graph.edges):
        lines.append(f"{i} {j}")
    return "\n".join(lines) + "\n"
