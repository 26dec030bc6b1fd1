"""Small min-cost flow solver with arc lower bounds.

Successive shortest paths with Bellman-Ford label correction; integral
optima are guaranteed because all capacities and imbalances are integers.
Sized for the allocation networks built here (tens of nodes), not for
general-purpose use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["FlowInfeasibleError", "MinCostFlowProblem"]

_INF = float("inf")


class FlowInfeasibleError(Exception):
    """The required circulation does not exist."""


@dataclass
class _Arc:
    head: int
    cap: int
    cost: float
    flow: int = 0
    partner: int = -1  # index of the reverse arc in the arc list


@dataclass
class MinCostFlowProblem:
    """Circulation network with per-arc [lower, upper] bounds."""

    n_nodes: int
    _arcs: list[_Arc] = field(default_factory=list)
    _adj: list[list[int]] = field(default_factory=list)
    _lower: list[tuple[int, int, int]] = field(default_factory=list)  # (arc idx, tail, lower)

    def __post_init__(self) -> None:
        self._adj = [[] for _ in range(self.n_nodes)]

    def add_arc(self, tail: int, head: int, lower: int, upper: int, cost: float) -> int:
        """Add a directed arc; returns an id usable with `arc_flow`."""
        if not 0 <= lower <= upper:
            raise ValueError(f"bad bounds [{lower}, {upper}]")
        idx = len(self._arcs)
        self._arcs.append(_Arc(head, upper - lower, cost, 0, idx + 1))
        self._arcs.append(_Arc(tail, 0, -cost, 0, idx))
        self._adj[tail].append(idx)
        self._adj[head].append(idx + 1)
        if lower:
            self._lower.append((idx, tail, lower))
        return idx

    def arc_flow(self, arc_id: int) -> int:
        lower = next((l for i, _, l in self._lower if i == arc_id), 0)
        return self._arcs[arc_id].flow + lower

    def solve(self) -> float:
        """Find a minimum-cost feasible circulation; returns its total cost.

        Lower bounds are removed by the standard imbalance transformation,
        then the imbalances are routed from a super-source to a super-sink.
        """
        imbalance = [0] * self.n_nodes
        base_cost = 0.0
        for arc_id, tail, lower in self._lower:
            head = self._arcs[arc_id].head
            imbalance[head] += lower
            imbalance[tail] -= lower
            base_cost += lower * self._arcs[arc_id].cost

        source = self.n_nodes
        sink = self.n_nodes + 1
        self._adj.append([])
        self._adj.append([])
        required = 0
        for node, b in enumerate(imbalance):
            if b > 0:
                self._add_helper(source, node, b)
                required += b
            elif b < 0:
                self._add_helper(node, sink, -b)

        shipped = 0
        while shipped < required:
            path = self._shortest_path(source, sink)
            if path is None:
                raise FlowInfeasibleError("lower bounds cannot be met within capacities")
            bottleneck = min(self._arcs[a].cap - self._arcs[a].flow for a in path)
            for a in path:
                self._arcs[a].flow += bottleneck
                self._arcs[self._arcs[a].partner].flow -= bottleneck
            shipped += bottleneck

        total = base_cost
        for arc in self._arcs[::2]:
            if arc.flow > 0 and arc.head < self.n_nodes:
                total += arc.flow * arc.cost
        return total

    def _add_helper(self, tail: int, head: int, cap: int) -> None:
        idx = len(self._arcs)
        self._arcs.append(_Arc(head, cap, 0.0, 0, idx + 1))
        self._arcs.append(_Arc(tail, 0, 0.0, 0, idx))
        self._adj[tail].append(idx)
        self._adj[head].append(idx + 1)

    def _shortest_path(self, source: int, sink: int) -> list[int] | None:
        """Bellman-Ford over the residual graph; returns arc indices or None."""
        n = len(self._adj)
        dist = [_INF] * n
        pred: list[int] = [-1] * n
        dist[source] = 0.0
        for _ in range(n):
            changed = False
            for tail in range(n):
                if dist[tail] == _INF:
                    continue
                for a in self._adj[tail]:
                    arc = self._arcs[a]
                    if arc.flow < arc.cap and dist[tail] + arc.cost < dist[arc.head] - 1e-12:
                        dist[arc.head] = dist[tail] + arc.cost
                        pred[arc.head] = a
                        changed = True
            if not changed:
                break
        if dist[sink] == _INF:
            return None
        path = []
        node = sink
        while node != source:
            a = pred[node]
            path.append(a)
            node = self._arcs[self._arcs[a].partner].head
        return path
