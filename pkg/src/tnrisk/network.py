"""Layered activity network and least-cost-to-end computation.

Topology: Source(i) -> Staged(j) -> Attack -> End, plus Source(i) -> Abandon -> End.
Edge weights: translocation cost on the first hop, interception + yield on the
second, the abandon yield on the abandon hop, zero into End.  BLOCKED edges are
kept in the edge map but never traversed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BlockedEdgeOnPath, EmptyTargets, NegativeCycle, NotAPath
from .params import BLOCKED, ModelParams, is_blocked

SOURCE = "source"
STAGED = "staged"
ATTACK = "attack"
ABANDON = "abandon"
END = "end"


@dataclass(frozen=True, order=True)
class NodeId:
    kind: str
    code: str = ""

    def __repr__(self):
        return f"{self.kind}:{self.code}" if self.code else self.kind


def source(code: str) -> NodeId:
    return NodeId(SOURCE, code)


def staged(code: str) -> NodeId:
    return NodeId(STAGED, code)


ATTACK_NODE = NodeId(ATTACK)
ABANDON_NODE = NodeId(ABANDON)
END_NODE = NodeId(END)


@dataclass
class ActivityNetwork:
    nodes: tuple[NodeId, ...]
    edges: dict[tuple[NodeId, NodeId], float]
    params: ModelParams
    isolated_sources: tuple[str, ...] = ()
    _succ: dict[NodeId, list[NodeId]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._succ:
            for (u, v) in self.edges:
                self._succ.setdefault(u, []).append(v)
            for u in self._succ:
                self._succ[u].sort()

    def successors(self, u: NodeId, traversable_only: bool = True) -> list[NodeId]:
        out = self._succ.get(u, [])
        if traversable_only:
            out = [v for v in out if not is_blocked(self.edges[(u, v)])]
        return out

    def weight(self, u: NodeId, v: NodeId) -> float:
        return self.edges[(u, v)]

    @property
    def source_nodes(self) -> list[NodeId]:
        return [n for n in self.nodes if n.kind == SOURCE]

    @property
    def staged_nodes(self) -> list[NodeId]:
        return [n for n in self.nodes if n.kind == STAGED]

    def topological_order(self) -> list[NodeId]:
        # layered by construction
        return list(self.nodes)


def build_network(params: ModelParams) -> ActivityNetwork:
    """Assemble the activity network for every source with positive supply."""
    targets = params.targets
    if not targets:
        raise EmptyTargets("no country has both interception and yield data")
    sources = params.sources

    nodes: list[NodeId] = [source(i) for i in sources]
    nodes += [staged(j) for j in targets]
    nodes += [ATTACK_NODE, ABANDON_NODE, END_NODE]

    edges: dict[tuple[NodeId, NodeId], float] = {}
    isolated: list[str] = []
    for i in sources:
        reachable = False
        for j in targets:
            t = params.barrier(i, j)
            edges[(source(i), staged(j))] = t
            reachable = reachable or not is_blocked(t)
        edges[(source(i), ABANDON_NODE)] = params.A
        if not reachable and is_blocked(params.A):
            isolated.append(i)
    for j in targets:
        edges[(staged(j), ATTACK_NODE)] = params.I[j] + params.Y[j]
    edges[(ATTACK_NODE, END_NODE)] = 0.0
    edges[(ABANDON_NODE, END_NODE)] = 0.0

    return ActivityNetwork(nodes=tuple(nodes), edges=edges, params=params,
                           isolated_sources=tuple(isolated))


@dataclass
class CostToEnd:
    costs: dict[NodeId, float]

    def __getitem__(self, node: NodeId) -> float:
        return self.costs.get(node, BLOCKED)


def _bellman_ford_to_end(network: ActivityNetwork) -> dict[NodeId, float]:
    dist = {n: BLOCKED for n in network.nodes}
    dist[END_NODE] = 0.0
    edges = [(u, v, w) for (u, v), w in network.edges.items() if not is_blocked(w)]
    for _ in range(len(network.nodes) - 1):
        changed = False
        for u, v, w in edges:
            if not is_blocked(dist[v]) and w + dist[v] < dist[u]:
                dist[u] = w + dist[v]
                changed = True
        if not changed:
            break
    for u, v, w in edges:
        if not is_blocked(dist[v]) and w + dist[v] < dist[u] - 1e-12:
            raise NegativeCycle(f"relaxation did not converge at edge {u}->{v}")
    return dist


def _topological_dp_to_end(network: ActivityNetwork) -> dict[NodeId, float]:
    dist = {n: BLOCKED for n in network.nodes}
    dist[END_NODE] = 0.0
    for u in reversed(network.topological_order()):
        if u == END_NODE:
            continue
        best = BLOCKED
        for v in network.successors(u):
            w = network.weight(u, v)
            if not is_blocked(dist[v]):
                best = min(best, w + dist[v])
        dist[u] = best
    return dist


def least_cost_to_end(network: ActivityNetwork) -> CostToEnd:
    """Least cost from every node to End, BLOCKED where End is unreachable.

    Bellman-Ford handles the negative edge weights; a reverse-topological
    dynamic program cross-checks it (the two must agree exactly on a DAG).
    """
    bf = _bellman_ford_to_end(network)
    dp = _topological_dp_to_end(network)
    for n in network.nodes:
        if bf[n] != dp[n] and not (is_blocked(bf[n]) and is_blocked(dp[n])):
            raise AssertionError(f"Bellman-Ford and DP disagree at {n}: {bf[n]} vs {dp[n]}")
    return CostToEnd(bf)


def path_cost(network: ActivityNetwork, path: list[NodeId]) -> float:
    """Sum of edge weights along an explicit node sequence."""
    if len(path) < 2:
        raise NotAPath("a path needs at least two nodes")
    total = 0.0
    for u, v in zip(path, path[1:]):
        if (u, v) not in network.edges:
            raise NotAPath(f"{u} -> {v} is not an edge")
        w = network.edges[(u, v)]
        if is_blocked(w):
            raise BlockedEdgeOnPath(f"{u} -> {v} is blocked")
        total += w
    return total


def export_edges_csv(network: ActivityNetwork, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["from_kind", "from_code", "to_kind", "to_code", "weight"])
        for (u, v), weight in sorted(network.edges.items()):
            w.writerow([u.kind, u.code, v.kind, v.code,
                        "inf" if is_blocked(weight) else repr(weight)])
