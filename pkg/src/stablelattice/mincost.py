"""Minimum-cost stable assignment via a closure reduction to min-cut.

Selecting a down-closed set of poset elements (taken at full weight)
and leaving the rest at zero sweeps out every candidate optimum of a
linear cost, so the problem reduces to maximum closure: one network
node per element, infinite arcs along the covering relation oriented
from smaller to larger, source arcs into positive-cost elements and
sink arcs out of negative-cost ones.  A minimum s-t cut's sink side is
then an optimal ideal.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .errors import InvariantViolation
from .model import Instance, Vector
from .poset import RotationPoset, build_poset, from_closed_function
from .rotations import Rotation


def rotation_cost(rot: Rotation, costs: Vector) -> int:
    """Cost swing of one unit shift: gains minus losses."""
    return sum(costs[e] for e in rot.plus) - sum(costs[e] for e in rot.minus)


@dataclass(frozen=True)
class ClosureNetwork:
    """Flow network whose finite min cuts are the ideals of the poset.

    Node 0 is the source, node ``size - 1`` the sink, and node i + 1
    carries poset element i.  ``infinite`` exceeds the total finite
    capacity, so no cut ever severs a covering arc.
    """

    size: int
    arcs: tuple[tuple[int, int, int], ...]
    infinite: int
    element_cost: tuple[int, ...]  # rotation cost times weight, per element

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return self.size - 1


def build_closure_network(poset: RotationPoset, costs: Vector) -> ClosureNetwork:
    """Assemble the network for a cost vector.

    Zero-cost elements get neither a source nor a sink arc; they are
    free in the cut and settle on whichever side the covering arcs
    force.
    """
    n = len(poset.elements)
    swing = [
        rotation_cost(el.rotation, costs) * el.weight for el in poset.elements
    ]
    infinite = 1 + sum(abs(s) for s in swing)
    arcs: list[tuple[int, int, int]] = []
    for i, j in sorted(poset.covers):
        arcs.append((i + 1, j + 1, infinite))
    for i, s in enumerate(swing):
        if s > 0:
            arcs.append((0, i + 1, s))
        elif s < 0:
            arcs.append((i + 1, n + 1, -s))
    return ClosureNetwork(n + 2, tuple(arcs), infinite, tuple(swing))


def _max_flow(size: int, arcs: tuple[tuple[int, int, int], ...], s: int, t: int
              ) -> tuple[int, set[int]]:
    """Dinic's algorithm; returns (flow value, residual-reachable set)."""
    heads: list[int] = []
    caps: list[int] = []
    adj: list[list[int]] = [[] for _ in range(size)]
    for u, v, c in arcs:
        adj[u].append(len(heads))
        heads.append(v)
        caps.append(c)
        adj[v].append(len(heads))
        heads.append(u)
        caps.append(0)

    def bfs() -> Optional[list[int]]:
        level = [-1] * size
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for a in adj[u]:
                v = heads[a]
                if caps[a] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def dfs(u: int, limit: int, level: list[int], it: list[int]) -> int:
        if u == t:
            return limit
        while it[u] < len(adj[u]):
            a = adj[u][it[u]]
            v = heads[a]
            if caps[a] > 0 and level[v] == level[u] + 1:
                pushed = dfs(v, min(limit, caps[a]), level, it)
                if pushed:
                    caps[a] -= pushed
                    caps[a ^ 1] += pushed
                    return pushed
            it[u] += 1
        return 0

    flow = 0
    while True:
        level = bfs()
        if level is None:
            break
        it = [0] * size
        while True:
            pushed = dfs(s, 1 << 62, level, it)
            if not pushed:
                break
            flow += pushed

    # sink side of the minimal-sink-side min cut: nodes with a residual
    # path to t (arc a's reverse pair is a ^ 1)
    sink_side = {t}
    queue = deque([t])
    while queue:
        v = queue.popleft()
        for a in adj[v]:
            u = heads[a]
            if caps[a ^ 1] > 0 and u not in sink_side:
                sink_side.add(u)
                queue.append(u)
    return flow, sink_side


def min_cut_closure(net: ClosureNetwork) -> tuple[frozenset[int], int]:
    """Optimal ideal and the cut value.

    The returned ideal is the sink side of the minimum cut with the
    fewest elements, so cost-free elements stay out and the decoded
    assignment sits as low in the lattice as optimality allows (an
    all-zero cost yields the bottom).
    """
    flow, sink_side = _max_flow(net.size, net.arcs, net.source, net.sink)
    ideal = frozenset(i for i in range(net.size - 2) if (i + 1) in sink_side)
    cut = 0
    for u, v, c in net.arcs:
        if u not in sink_side and v in sink_side:
            cut += c
    if cut != flow:
        raise InvariantViolation(f"cut value {cut} differs from max flow {flow}")
    return ideal, cut


def min_cost_stable(
    inst: Instance, costs: Vector, poset: Optional[RotationPoset] = None
) -> tuple[Vector, int]:
    """A stable assignment minimizing the linear cost, with its cost.

    Builds the poset when one is not supplied.  The returned cost is
    certified against the decomposition bottom-cost + sum of selected
    element swings; disagreement raises.
    """
    if len(costs) != len(inst.edges):
        raise ValueError("cost vector must assign every edge")
    poset = poset if poset is not None else build_poset(inst)
    net = build_closure_network(poset, costs)
    ideal, _ = min_cut_closure(net)
    for j in ideal:
        if poset.below_mask[j] & ~sum(1 << i for i in ideal) != 0:
            raise InvariantViolation("min cut returned a set that is not an ideal")
    values = tuple(
        el.weight if i in ideal else 0 for i, el in enumerate(poset.elements)
    )
    x = from_closed_function(inst, poset, values)
    cost = sum(c * v for c, v in zip(costs, x))
    certified = sum(c * v for c, v in zip(costs, poset.bottom)) + sum(
        net.element_cost[i] for i in ideal
    )
    if cost != certified:
        raise InvariantViolation(
            f"cost {cost} disagrees with its certificate {certified}"
        )
    return x, cost


def to_dimacs(net: ClosureNetwork) -> str:
    """The network in DIMACS max-flow format for external cross-checks."""
    lines = [
        "c closure network for min-cost stable assignment",
        f"p max {net.size} {len(net.arcs)}",
        f"n {net.source + 1} s",
        f"n {net.sink + 1} t",
    ]
    for u, v, c in net.arcs:
        lines.append(f"a {u + 1} {v + 1} {c}")
    return "\n".join(lines) + "\n"
