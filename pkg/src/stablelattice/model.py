"""The two-sided market instance, assignment vectors, and stability.

An :class:`Instance` is a bipartite graph of workers and firms with
integer edge capacities and one choice function per vertex.  Assignments
are plain tuples of nonnegative integers aligned with the instance's
edge order; every algorithm in the package speaks this vocabulary.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .choice import (
    BalancedTripleChoice,
    ChoiceFunction,
    QuotaOrderChoice,
    TableChoice,
    bump,
    join,
)
from .errors import InvalidInstance, InvariantViolation

Vector = tuple[int, ...]
EdgePair = tuple[str, str]

WORKER = "W"
FIRM = "F"


# ---------------------------------------------------------------------------
# choice-function declarations (edge-id based, resolved at instance build)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuotaOrderSpec:
    """Priority order over incident edges (best first) plus a quota."""

    quota: int
    order: tuple[EdgePair, ...]


@dataclass(frozen=True)
class BalanceSpec:
    """Anchor/left/right roles for a degree-3 balanced vertex."""

    quota: int
    anchor: EdgePair
    left: EdgePair
    right: EdgePair


@dataclass(frozen=True)
class TableSpec:
    """Explicit rows (z, C(z)); coordinates follow the vertex's edge order."""

    rows: tuple[tuple[Vector, Vector], ...]


ChoiceSpec = QuotaOrderSpec | BalanceSpec | TableSpec


@dataclass(frozen=True)
class Edge:
    worker: str
    firm: str
    cap: int
    index: int

    @property
    def pair(self) -> EdgePair:
        return (self.worker, self.firm)

    @property
    def id(self) -> str:
        return f"{self.worker}:{self.firm}"


class Instance:
    """Immutable market description.

    Vertices are strings; edges carry a dense index assigned in
    declaration order, and all assignment vectors are tuples over that
    index.  Each vertex's incident edges are enumerated by ascending
    edge index; local vectors follow that enumeration.
    """

    def __init__(
        self,
        workers: Sequence[str],
        firms: Sequence[str],
        edges: Sequence[tuple[str, str, int]],
        cfs: Mapping[str, ChoiceSpec],
        gapless: bool = False,
        costs: Optional[Mapping[EdgePair, int]] = None,
    ):
        self.workers = tuple(workers)
        self.firms = tuple(firms)
        if set(self.workers) & set(self.firms):
            raise InvalidInstance("a vertex cannot be on both sides")
        if len(set(self.workers)) != len(self.workers) or len(set(self.firms)) != len(self.firms):
            raise InvalidInstance("duplicate vertex declaration")
        self.side: dict[str, str] = {w: WORKER for w in self.workers}
        self.side.update({f: FIRM for f in self.firms})

        built: list[Edge] = []
        seen: set[EdgePair] = set()
        for w, f, cap in edges:
            if self.side.get(w) != WORKER or self.side.get(f) != FIRM:
                raise InvalidInstance(f"edge {w}:{f} must join a worker to a firm")
            if (w, f) in seen:
                raise InvalidInstance(f"duplicate edge {w}:{f}")
            if cap < 0:
                raise InvalidInstance(f"edge {w}:{f} has negative capacity")
            seen.add((w, f))
            built.append(Edge(w, f, cap, len(built)))
        self.edges: tuple[Edge, ...] = tuple(built)
        self.edge_index: dict[EdgePair, int] = {e.pair: e.index for e in self.edges}
        self.caps: Vector = tuple(e.cap for e in self.edges)
        self.gapless = gapless

        self.incident: dict[str, tuple[int, ...]] = {v: () for v in self.side}
        grouped: dict[str, list[int]] = {v: [] for v in self.side}
        for e in self.edges:
            grouped[e.worker].append(e.index)
            grouped[e.firm].append(e.index)
        for v, idxs in grouped.items():
            self.incident[v] = tuple(idxs)
        self.local_pos: dict[str, dict[int, int]] = {
            v: {e: i for i, e in enumerate(idxs)} for v, idxs in self.incident.items()
        }

        self.cf: dict[str, ChoiceFunction] = {}
        for v in self.side:
            if not self.incident[v]:
                continue  # isolated vertices are inert and need no choice function
            if v not in cfs:
                raise InvalidInstance(f"vertex {v} has edges but no choice function")
            self.cf[v] = self._compile(v, cfs[v])

        self.costs: Optional[Vector] = None
        if costs is not None:
            values = [0] * len(self.edges)
            for pair, c in costs.items():
                values[self._edge_from_pair(pair)] = c
            self.costs = tuple(values)

    # -- construction helpers ----------------------------------------

    def _edge_from_pair(self, pair: EdgePair) -> int:
        try:
            return self.edge_index[tuple(pair)]
        except KeyError:
            raise InvalidInstance(f"unknown edge {pair[0]}:{pair[1]}") from None

    def _compile(self, v: str, spec: ChoiceSpec) -> ChoiceFunction:
        idxs = self.incident[v]
        caps = tuple(self.caps[e] for e in idxs)
        pos = self.local_pos[v]
        if isinstance(spec, QuotaOrderSpec):
            order_idx = [self._edge_from_pair(p) for p in spec.order]
            if sorted(order_idx) != sorted(idxs):
                raise InvalidInstance(
                    f"order for {v} is not a permutation of its incident edges"
                )
            return QuotaOrderChoice(caps, tuple(pos[e] for e in order_idx), spec.quota)
        if isinstance(spec, BalanceSpec):
            if len(idxs) != 3:
                raise InvalidInstance(f"balanced vertex {v} must have degree 3")
            roles = [self._edge_from_pair(p) for p in (spec.anchor, spec.left, spec.right)]
            if sorted(roles) != sorted(idxs):
                raise InvalidInstance(
                    f"anchor/left/right for {v} must name its three incident edges"
                )
            return BalancedTripleChoice(
                caps, pos[roles[0]], pos[roles[1]], pos[roles[2]], spec.quota
            )
        if isinstance(spec, TableSpec):
            return TableChoice(caps, {tuple(z): tuple(cz) for z, cz in spec.rows})
        raise InvalidInstance(f"unknown choice spec {spec!r} for {v}")

    # -- basic queries -----------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.workers + self.firms

    def zero(self) -> Vector:
        return (0,) * len(self.edges)

    def in_box(self, x: Vector) -> bool:
        return len(x) == len(self.edges) and all(
            0 <= v <= c for v, c in zip(x, self.caps)
        )

    def require_in_box(self, x: Vector) -> None:
        if not self.in_box(x):
            raise ValueError(f"vector violates box bounds 0 <= x <= {self.caps}")

    def box_size(self) -> int:
        size = 1
        for c in self.caps:
            size *= c + 1
        return size

    def bmax(self) -> int:
        return max(self.caps, default=0)

    def local(self, x: Vector, v: str) -> Vector:
        """Restriction of x to the edges at v, in local enumeration order."""
        if v not in self.side:
            raise ValueError(f"unknown vertex {v!r}")
        return tuple(x[e] for e in self.incident[v])

    def scatter(self, side: str, locals_by_vertex: Mapping[str, Vector]) -> Vector:
        """Assemble a global vector from one local vector per vertex of a side.

        Vertices without an entry (isolated ones) contribute nothing.
        """
        out = [0] * len(self.edges)
        group = self.workers if side == WORKER else self.firms
        for v in group:
            if v not in locals_by_vertex:
                continue
            loc = locals_by_vertex[v]
            for p, e in enumerate(self.incident[v]):
                out[e] = loc[p]
        return tuple(out)

    def endpoint(self, e: int, side: str) -> str:
        edge = self.edges[e]
        return edge.worker if side == WORKER else edge.firm

    def other_endpoint(self, e: int, v: str) -> str:
        edge = self.edges[e]
        if v == edge.worker:
            return edge.firm
        if v == edge.firm:
            return edge.worker
        raise ValueError(f"{v} is not an endpoint of edge {edge.id}")

    def swapped(self) -> "Instance":
        """The same market with worker and firm roles exchanged.

        Edge indices, capacities and choice functions are preserved, so
        assignment vectors carry over unchanged.
        """
        inst = object.__new__(Instance)
        inst.workers = self.firms
        inst.firms = self.workers
        inst.side = {v: (FIRM if s == WORKER else WORKER) for v, s in self.side.items()}
        inst.edges = tuple(
            Edge(e.firm, e.worker, e.cap, e.index) for e in self.edges
        )
        inst.edge_index = {e.pair: e.index for e in inst.edges}
        inst.caps = self.caps
        inst.gapless = self.gapless
        inst.incident = self.incident
        inst.local_pos = self.local_pos
        inst.cf = self.cf
        inst.costs = self.costs
        return inst


# ---------------------------------------------------------------------------
# acceptability, interest, stability
# ---------------------------------------------------------------------------

def restrict(inst: Instance, x: Vector, v: str) -> Vector:
    """Public alias of :meth:`Instance.local`."""
    return inst.local(x, v)


def is_acceptable(inst: Instance, x: Vector) -> bool:
    """True when every vertex keeps its whole restriction of x."""
    inst.require_in_box(x)
    return all(cf.evaluate(inst.local(x, v)) == inst.local(x, v) for v, cf in inst.cf.items())


@dataclass(frozen=True)
class EdgeInterest:
    """Outcome of probing one extra unit on an edge at one endpoint.

    ``case`` is 'a' when the unit is kept outright, 'b' when it is kept
    at the cost of one unit on ``displaced`` (a global edge index), and
    None when the edge is saturated or the unit is refused.
    """

    interesting: bool
    case: Optional[str] = None
    displaced: Optional[int] = None


def edge_interest(inst: Instance, x: Vector, e: int, v: str) -> EdgeInterest:
    """Probe whether a unit increase on edge e is (partly) kept by v.

    Precondition: x is acceptable at v.  Saturated edges are never
    interesting.  Raises :class:`InvariantViolation` when the choice
    function reacts in a way the axioms exclude.
    """
    edge = inst.edges[e]
    if v not in (edge.worker, edge.firm):
        raise ValueError(f"{v} is not an endpoint of edge {edge.id}")
    if x[e] >= edge.cap:
        return EdgeInterest(False)
    z = inst.local(x, v)
    pos = inst.local_pos[v][e]
    out = inst.cf[v].evaluate(bump(z, pos))
    if out == z:
        return EdgeInterest(False)
    if out == bump(z, pos):
        return EdgeInterest(True, "a")
    diff = [i for i in range(len(z)) if out[i] != z[i]]
    if len(diff) == 2 and pos in diff and out[pos] == z[pos] + 1:
        other = diff[0] if diff[1] == pos else diff[1]
        if out[other] == z[other] - 1:
            return EdgeInterest(True, "b", inst.incident[v][other])
    raise InvariantViolation(
        f"choice function at {v} maps {bump(z, pos)} to {out}; "
        "a unit probe must be kept whole, kept with one displacement, or refused"
    )


def is_interesting(inst: Instance, x: Vector, e: int, v: str) -> bool:
    return edge_interest(inst, x, e, v).interesting


@dataclass(frozen=True)
class StabilityReport:
    """Acceptability, per-edge interest on both sides, and blocking edges."""

    acceptable: bool
    worker_interest: tuple[bool, ...]
    firm_interest: tuple[bool, ...]
    blocking: frozenset[int]

    @property
    def stable(self) -> bool:
        return self.acceptable and not self.blocking

    def firm_up(self, x: Vector) -> frozenset[int]:
        """Edges whose unit increase the firm endpoint would keep."""
        return frozenset(e for e, hot in enumerate(self.firm_interest) if hot)

    def firm_down(self, x: Vector) -> frozenset[int]:
        """Positive-value edges the firm endpoint would not grow."""
        return frozenset(
            e for e, hot in enumerate(self.firm_interest) if not hot and x[e] > 0
        )


def stability_report(inst: Instance, x: Vector) -> StabilityReport:
    """Full stability diagnostics for x, in |V| + 2|E| evaluations.

    Blocking edges are exactly those interesting for both endpoints; x
    is stable when it is acceptable and no edge blocks it.  Interest
    flags are only meaningful (and only computed) at acceptable x.
    """
    m = len(inst.edges)
    if not is_acceptable(inst, x):
        return StabilityReport(False, (False,) * m, (False,) * m, frozenset())
    w_flags = []
    f_flags = []
    blocking = []
    for e, edge in enumerate(inst.edges):
        w_hot = edge_interest(inst, x, e, edge.worker).interesting
        f_hot = edge_interest(inst, x, e, edge.firm).interesting
        w_flags.append(w_hot)
        f_flags.append(f_hot)
        if w_hot and f_hot:
            blocking.append(e)
    return StabilityReport(True, tuple(w_flags), tuple(f_flags), frozenset(blocking))


def is_stable(inst: Instance, x: Vector) -> bool:
    return stability_report(inst, x).stable


# ---------------------------------------------------------------------------
# side-wide comparison
# ---------------------------------------------------------------------------

class Ordering(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


def _compare_side(inst: Instance, x: Vector, y: Vector, side: str) -> Ordering:
    for v, cf in inst.cf.items():
        zx, zy = inst.local(x, v), inst.local(y, v)
        if cf.evaluate(zx) != zx or cf.evaluate(zy) != zy:
            raise ValueError(f"comparison requires vectors acceptable at {v}")

    verdict = Ordering.EQUAL
    for v in (inst.firms if side == FIRM else inst.workers):
        if v not in inst.cf:
            continue
        zx, zy = inst.local(x, v), inst.local(y, v)
        if zx == zy:
            continue
        best = inst.cf[v].evaluate(join(zx, zy))
        if best == zy:
            here = Ordering.LESS
        elif best == zx:
            here = Ordering.GREATER
        else:
            return Ordering.INCOMPARABLE
        if verdict == Ordering.EQUAL:
            verdict = here
        elif verdict != here:
            return Ordering.INCOMPARABLE
    return verdict


def compare_firm_side(inst: Instance, x: Vector, y: Vector) -> Ordering:
    """Aggregate the firms' revealed preferences between two assignments.

    LESS means every firm weakly prefers y (and at least one strictly);
    INCOMPARABLE means the firms disagree in direction.  Both inputs
    must be acceptable.
    """
    return _compare_side(inst, x, y, FIRM)


def compare_worker_side(inst: Instance, x: Vector, y: Vector) -> Ordering:
    return _compare_side(inst, x, y, WORKER)


def firm_prefers_weakly(inst: Instance, x: Vector, y: Vector) -> bool:
    """x is at most y for every firm (the route-target dominance test)."""
    return compare_firm_side(inst, x, y) in (Ordering.LESS, Ordering.EQUAL)
