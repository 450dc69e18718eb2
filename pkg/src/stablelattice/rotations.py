"""Unit-swap structure of a stable assignment: tandems, the active graph,
rotations, and maximal shift weights.

At a stable assignment x, a firm may answer a unit probe on an edge a by
dropping a unit on another edge c (a firm swap), and a worker may accept
a unit on a in exchange for a dropped unit on c (a worker swap).  The
swaps chain into an auxiliary digraph; after trimming, its components
are simple cycles whose images in the market graph are the rotations
applicable to x.  Shifting x along a rotation with a feasible weight
yields another stable assignment that every firm weakly prefers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .choice import bump
from .errors import InvariantViolation
from .model import (
    FIRM,
    WORKER,
    Instance,
    Vector,
    edge_interest,
    is_stable,
)

LEGAL_FIRM = "legal_firm"
ESSENTIAL_WORKER = "essential_worker"
QUASI_LEGAL_WORKER = "quasi_legal_worker"
QUASI_ESSENTIAL_WORKER = "quasi_essential_worker"


@dataclass(frozen=True)
class Tandem:
    """A paired unit swap at one vertex.

    For firm swaps ``first`` is the edge gaining a unit and ``second``
    the edge losing one; worker swaps are written the other way round,
    (lost, gained), matching the direction they are traversed in a
    rotation.
    """

    kind: str
    first: int
    second: int
    pivot: str


@dataclass(frozen=True)
class Rotation:
    """An edge-simple alternating cycle (a1, c1, a2, c2, ..., ak, ck).

    Even positions gain a unit, odd positions lose one.  The stored
    cycle is canonical: among all rotations of the pair sequence, the
    lexicographically smallest, so equality of rotations is tuple
    equality.
    """

    cycle: tuple[int, ...]

    def __post_init__(self):
        if len(self.cycle) < 4 or len(self.cycle) % 2 != 0:
            raise ValueError("a rotation alternates at least two gain/lose pairs")
        if len(set(self.cycle)) != len(self.cycle):
            raise ValueError("rotation cycles are edge-simple")

    @property
    def plus(self) -> tuple[int, ...]:
        return self.cycle[0::2]

    @property
    def minus(self) -> tuple[int, ...]:
        return self.cycle[1::2]

    @property
    def size(self) -> int:
        return len(self.cycle) // 2

    def delta(self, edge_count: int) -> Vector:
        """The signed incidence vector of the cycle."""
        out = [0] * edge_count
        for e in self.plus:
            out[e] = 1
        for e in self.minus:
            out[e] = -1
        return tuple(out)

    def tandems(self, inst: Instance) -> tuple[Tandem, ...]:
        """The firm and worker swaps the cycle is built from."""
        cyc = self.cycle
        out = []
        for i in range(0, len(cyc), 2):
            a, c = cyc[i], cyc[i + 1]
            a_next = cyc[(i + 2) % len(cyc)]
            f = inst.edges[a].firm
            if inst.edges[c].firm != f:
                raise InvariantViolation(f"edges {a},{c} do not share a firm")
            out.append(Tandem(LEGAL_FIRM, a, c, f))
            w = inst.edges[c].worker
            if inst.edges[a_next].worker != w:
                raise InvariantViolation(f"edges {c},{a_next} do not share a worker")
            out.append(Tandem(ESSENTIAL_WORKER, c, a_next, w))
        return tuple(out)


def canonical_rotation(sequence: Iterable[int]) -> Rotation:
    """Canonicalize a gain/lose-alternating edge sequence into a Rotation."""
    seq = tuple(sequence)
    k = len(seq)
    best = min(seq[i:] + seq[:i] for i in range(0, k, 2))
    return Rotation(best)


# ---------------------------------------------------------------------------
# swap discovery
# ---------------------------------------------------------------------------

def legal_firm_pairs(
    inst: Instance, x: Vector, *, verified: bool = False
) -> tuple[list[Tandem], frozenset[int], frozenset[int]]:
    """All firm swaps at x, plus the firm-side up and down edge sets.

    Scans every edge once: ``up`` collects edges whose unit increase the
    firm would (partly) keep, ``down`` the positive edges it would not
    grow.  Case-b probes yield the swaps.  Requires x stable.
    """
    if not verified and not is_stable(inst, x):
        raise ValueError("assignment is not stable")
    pairs: list[Tandem] = []
    up = set()
    down = set()
    for e, edge in enumerate(inst.edges):
        probe = edge_interest(inst, x, e, edge.firm)
        if probe.interesting:
            up.add(e)
            if probe.case == "b":
                pairs.append(Tandem(LEGAL_FIRM, e, probe.displaced, edge.firm))
        elif x[e] > 0:
            down.add(e)
    return pairs, frozenset(up), frozenset(down)


def essential_worker_pair(
    inst: Instance, x: Vector, c: int, firm_up: frozenset[int]
) -> Optional[Tandem]:
    """The unique worker swap releasing c, or None when no candidate exists.

    Candidates are incident edges the firms want that the worker accepts
    as a one-for-one trade for c; among them the essential one is the
    single candidate whose trade no other candidate can still improve.
    A tie means the choice function violates the axioms.
    """
    w = inst.edges[c].worker
    cf = inst.cf[w]
    pos = inst.local_pos[w]
    z0 = inst.local(x, w)
    candidates = []
    for a in inst.incident[w]:
        if a == c or a not in firm_up:
            continue
        z = bump(bump(z0, pos[c], -1), pos[a])
        if cf.evaluate(z) == z:
            candidates.append((a, z))
    if not candidates:
        return None
    hits = []
    for a, z in candidates:
        if all(
            d == a or cf.evaluate(bump(z, pos[d])) == z
            for d, _ in candidates
        ):
            hits.append(a)
    if len(hits) != 1:
        raise InvariantViolation(
            f"worker {w} has {len(hits)} essential partners for edge "
            f"{inst.edges[c].id}; the axioms guarantee exactly one"
        )
    return Tandem(ESSENTIAL_WORKER, c, hits[0], w)


# ---------------------------------------------------------------------------
# auxiliary digraph, cleaning, rotations
# ---------------------------------------------------------------------------

Node = tuple[str, int]  # (side, edge index): the side-copy of an edge


def clean_digraph(nodes: set[Node], out: dict[Node, Node]) -> set[Node]:
    """Iteratively drop nodes without an entering arc; return the survivors.

    Every node has at most one leaving arc, so what survives is exactly
    the union of the directed cycles.  Running the procedure on an
    already clean digraph changes nothing.
    """
    indeg: dict[Node, int] = {v: 0 for v in nodes}
    for u, v in out.items():
        if u in nodes and v in nodes:
            indeg[v] += 1
    queue = [v for v, d in indeg.items() if d == 0]
    alive = set(nodes)
    while queue:
        u = queue.pop()
        if u not in alive:
            continue
        alive.discard(u)
        v = out.get(u)
        if v is not None and v in alive:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return alive


@dataclass(frozen=True)
class ActiveGraph:
    """The swap digraph at a stable assignment and its rotation decomposition."""

    firm_pairs: tuple[Tandem, ...]
    worker_pairs: tuple[Tandem, ...]
    firm_up: frozenset[int]
    firm_down: frozenset[int]
    nodes: frozenset[Node]
    arcs: tuple[tuple[Node, Node], ...]
    surviving: frozenset[Node]
    rotations: tuple[Rotation, ...]

    @property
    def is_empty(self) -> bool:
        return not self.rotations


def build_active_graph(inst: Instance, x: Vector, *, verified: bool = False) -> ActiveGraph:
    """Assemble the swap digraph at x, trim it, and extract the rotations.

    An empty result is valid: it means x is the firm-optimal assignment.
    """
    firm_pairs, up, down = legal_firm_pairs(inst, x, verified=verified)
    worker_pairs = []
    for c in sorted(down):
        t = essential_worker_pair(inst, x, c, up)
        if t is not None:
            worker_pairs.append(t)

    nodes: set[Node] = set()
    out: dict[Node, Node] = {}
    for a in up:
        nodes.add((WORKER, a))
        nodes.add((FIRM, a))
        out[(WORKER, a)] = (FIRM, a)
    for c in down:
        nodes.add((FIRM, c))
        nodes.add((WORKER, c))
        out[(FIRM, c)] = (WORKER, c)
    for t in firm_pairs:
        out[(FIRM, t.first)] = (FIRM, t.second)
    for t in worker_pairs:
        out[(WORKER, t.first)] = (WORKER, t.second)
    arcs = tuple(sorted((u, v) for u, v in out.items()))

    alive = clean_digraph(nodes, out)

    rotations = []
    seen: set[Node] = set()
    for start in sorted(alive):
        if start in seen:
            continue
        cycle_nodes = []
        cur = start
        while cur not in seen:
            seen.add(cur)
            cycle_nodes.append(cur)
            cur = out[cur]
        if cur != start:
            raise InvariantViolation("trimmed swap digraph is not a cycle union")
        edge_seq = []
        for i, node in enumerate(cycle_nodes):
            nxt = cycle_nodes[(i + 1) % len(cycle_nodes)]
            if node[1] == nxt[1]:  # crossing an edge-arc emits the market edge
                if node[0] == WORKER:
                    edge_seq.append(("+", node[1]))
                else:
                    edge_seq.append(("-", node[1]))
        if edge_seq and edge_seq[0][0] == "-":
            edge_seq = edge_seq[1:] + edge_seq[:1]
        signs = [s for s, _ in edge_seq]
        if signs != ["+", "-"] * (len(edge_seq) // 2):
            raise InvariantViolation("rotation cycle does not alternate")
        rotations.append(canonical_rotation(e for _, e in edge_seq))
    rotations.sort(key=lambda r: r.cycle)

    return ActiveGraph(
        firm_pairs=tuple(firm_pairs),
        worker_pairs=tuple(worker_pairs),
        firm_up=up,
        firm_down=down,
        nodes=frozenset(nodes),
        arcs=arcs,
        surviving=frozenset(alive),
        rotations=tuple(rotations),
    )


def rotations_at(inst: Instance, x: Vector, *, verified: bool = False) -> tuple[Rotation, ...]:
    return build_active_graph(inst, x, verified=verified).rotations


# ---------------------------------------------------------------------------
# applying rotations and maximal weights
# ---------------------------------------------------------------------------

def weight_bound(inst: Instance, x: Vector, rot: Rotation) -> int:
    """Largest weight the box alone allows for shifting x along rot."""
    room_up = min(inst.caps[e] - x[e] for e in rot.plus)
    room_down = min(x[e] for e in rot.minus)
    return min(room_up, room_down)


def apply_rotation(inst: Instance, x: Vector, rot: Rotation, weight: int) -> Vector:
    """Shift x along the rotation: +weight on gains, -weight on losses.

    Pure arithmetic; the result is only guaranteed stable for feasible
    weights.  Rejects weight < 1 and box violations.
    """
    if weight < 1:
        raise ValueError("shift weight must be a positive integer")
    if weight > weight_bound(inst, x, rot):
        raise ValueError(f"weight {weight} violates the box bounds")
    out = list(x)
    for e in rot.plus:
        out[e] += weight
    for e in rot.minus:
        out[e] -= weight
    return tuple(out)


def is_rotation_applicable(inst: Instance, x: Vector, rot: Rotation) -> bool:
    """True when every swap of the rotation is present at the stable x."""
    if weight_bound(inst, x, rot) < 1:
        return False
    cyc = rot.cycle
    n = len(cyc)
    interest_memo: dict[int, bool] = {}

    def firm_wants(e: int) -> bool:
        if e not in interest_memo:
            interest_memo[e] = edge_interest(inst, x, e, inst.edges[e].firm).interesting
        return interest_memo[e]

    for i in range(0, n, 2):
        a, c, a_next = cyc[i], cyc[i + 1], cyc[(i + 2) % n]
        f = inst.edges[a].firm
        probe = edge_interest(inst, x, a, f)
        if not (probe.case == "b" and probe.displaced == c):
            return False
        # worker swap (c, a_next): candidates must reproduce exactly a_next
        w = inst.edges[c].worker
        cf = inst.cf[w]
        pos = inst.local_pos[w]
        z0 = inst.local(x, w)
        if x[c] < 1 or x[a_next] >= inst.caps[a_next]:
            return False
        if not firm_wants(a_next) or firm_wants(c):
            return False
        z = bump(bump(z0, pos[c], -1), pos[a_next])
        if cf.evaluate(z) != z:
            return False
        for d in inst.incident[w]:
            if d == a_next or d == c or x[d] >= inst.caps[d] or not firm_wants(d):
                continue
            if cf.evaluate(bump(z, pos[d])) != z:
                return False
    return True


def max_weight_linear(inst: Instance, x: Vector, rot: Rotation) -> int:
    """Maximal feasible weight by stepping one unit at a time.

    After each step the shifted vector's full stability and the
    rotation's continued applicability are both verified; the theory
    says the two criteria coincide, so any disagreement is reported as
    an invariant violation rather than silently resolved.
    """
    if not is_rotation_applicable(inst, x, rot):
        raise ValueError("rotation is not applicable to this assignment")
    bound = weight_bound(inst, x, rot)
    weight = 0
    cur = x
    while True:
        applicable = is_rotation_applicable(inst, cur, rot) if weight else True
        next_stable = weight + 1 <= bound and is_stable(
            inst, apply_rotation(inst, cur, rot, 1)
        )
        if applicable != next_stable:
            raise InvariantViolation(
                f"weight search disagreement at weight {weight}: swaps "
                f"{'persist' if applicable else 'broke'} but the next step is "
                f"{'stable' if next_stable else 'unstable'}"
            )
        if not applicable:
            return weight
        cur = apply_rotation(inst, cur, rot, 1)
        weight += 1


def max_weight_binary(inst: Instance, x: Vector, rot: Rotation) -> int:
    """Maximal feasible weight by bisection (gapless choice functions).

    Correct whenever one shifted probe being stable-and-applicable
    implies all smaller weights are; the no-gap condition guarantees
    that.  Uses at most ceil(log2(bound)) probes.
    """
    return binary_weight_probes(inst, x, rot)[0]


def binary_weight_probes(inst: Instance, x: Vector, rot: Rotation) -> tuple[int, int]:
    """(maximal weight, number of bisection probes used)."""
    if not is_rotation_applicable(inst, x, rot):
        raise ValueError("rotation is not applicable to this assignment")
    bound = weight_bound(inst, x, rot)

    def good(mu: int) -> bool:
        y = apply_rotation(inst, x, rot, mu)
        return is_stable(inst, y) and is_rotation_applicable(inst, y, rot)

    # good(mu) holds exactly for mu < tau; good(0) is known, good(bound) is
    # false because some swap or bound breaks at tau <= bound.
    lo, hi = 0, bound
    probes = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        probes += 1
        if good(mid):
            lo = mid
        else:
            hi = mid
    return hi, probes


# ---------------------------------------------------------------------------
# DOT exports
# ---------------------------------------------------------------------------

def active_graph_dot(inst: Instance, graph: ActiveGraph) -> str:
    """The trimmed swap digraph in DOT, nodes labeled side:edge."""
    lines = ["digraph swaps {"]

    def name(node: Node) -> str:
        side, e = node
        return f'"{side}:{inst.edges[e].id}"'

    for u, v in graph.arcs:
        if u in graph.surviving and v in graph.surviving:
            style = ""
        else:
            style = " [style=dotted]"
        lines.append(f"  {name(u)} -> {name(v)}{style};")
    lines.append("}")
    return "\n".join(lines)


def rotation_label(inst: Instance, rot: Rotation) -> str:
    """Signed edge-id list, e.g. '+w1:f1 -w2:f1 +w2:f2 -w1:f2'."""
    parts = []
    for i, e in enumerate(rot.cycle):
        sign = "+" if i % 2 == 0 else "-"
        parts.append(f"{sign}{inst.edges[e].id}")
    return " ".join(parts)
