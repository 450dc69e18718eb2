"""Desk-scale ground truth: exhaustive enumeration of stable assignments.

Everything here works from first principles -- box scanning, pairwise
comparison, order-theoretic joins -- deliberately independent of the
rotation machinery it is used to validate.  The only shared code is the
vocabulary: choice-function evaluation and the stability predicate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

from .errors import CapExceeded, InvariantViolation
from .model import (
    FIRM,
    Instance,
    Ordering,
    Vector,
    compare_firm_side,
    compare_worker_side,
    edge_interest,
)


@dataclass(frozen=True)
class StableLattice:
    """The enumerated stable set with its firm-side order precomputed.

    ``leq[i]`` is a bitmask over element indices j with element i weakly
    below element j; ``hasse`` holds the covering pairs (i, j).
    """

    instance: Instance
    elements: tuple[Vector, ...]
    leq: tuple[int, ...]
    hasse: frozenset[tuple[int, int]]
    bottom: int
    top: int

    def index(self, x: Vector) -> int:
        try:
            return self.elements.index(tuple(x))
        except ValueError:
            raise ValueError(f"{x} is not a stable assignment of this lattice") from None

    def below(self, i: int, j: int) -> bool:
        return bool(self.leq[i] >> j & 1)

    def __len__(self) -> int:
        return len(self.elements)


def _acceptable_locals(inst: Instance, v: str) -> list[Vector]:
    cf = inst.cf[v]
    return [z for z in cf.box() if cf.evaluate(z) == z]


def _enumerate_acceptable(inst: Instance) -> Iterator[Vector]:
    """All globally acceptable vectors, in row-major order per worker group.

    Workers contribute only their acceptable local vectors; a firm is
    checked as soon as the last worker touching it has been placed.
    """
    workers = [w for w in inst.workers if w in inst.cf]
    if not workers:
        yield inst.zero()
        return
    w_order = {w: i for i, w in enumerate(workers)}
    firm_ready: dict[int, list[str]] = {i: [] for i in range(len(workers))}
    for f in inst.firms:
        if f not in inst.cf:
            continue
        last = max(w_order[inst.edges[e].worker] for e in inst.incident[f])
        firm_ready[last].append(f)
    choices = {w: _acceptable_locals(inst, w) for w in workers}
    x = [0] * len(inst.edges)

    def place(i: int) -> Iterator[Vector]:
        if i == len(workers):
            yield tuple(x)
            return
        w = workers[i]
        idxs = inst.incident[w]
        for z in choices[w]:
            for p, e in enumerate(idxs):
                x[e] = z[p]
            ok = True
            for f in firm_ready[i]:
                zf = tuple(x[e] for e in inst.incident[f])
                if inst.cf[f].evaluate(zf) != zf:
                    ok = False
                    break
            if ok:
                yield from place(i + 1)
        for e in idxs:
            x[e] = 0

    yield from place(0)


def _is_blocked(inst: Instance, x: Vector) -> bool:
    for e, edge in enumerate(inst.edges):
        if x[e] >= edge.cap:
            continue
        if not edge_interest(inst, x, e, edge.firm).interesting:
            continue
        if edge_interest(inst, x, e, edge.worker).interesting:
            return True
    return False


def enumerate_stable(inst: Instance, cap: int = 10**7) -> StableLattice:
    """Scan the whole box and collect every stable assignment.

    Raises :class:`CapExceeded` when the box holds more than ``cap``
    points.  The returned lattice has its order matrix, covering pairs,
    and extreme elements precomputed.
    """
    if inst.box_size() > cap:
        raise CapExceeded(f"box has {inst.box_size()} points, cap is {cap}")
    stable = [x for x in _enumerate_acceptable(inst) if not _is_blocked(inst, x)]
    stable.sort()
    elements = tuple(stable)
    n = len(elements)
    if n == 0:
        raise InvariantViolation("no stable assignment found; theory guarantees one")

    leq = [1 << i for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            verdict = compare_firm_side(inst, elements[i], elements[j])
            if verdict == Ordering.LESS:
                leq[i] |= 1 << j
            elif verdict == Ordering.GREATER:
                leq[j] |= 1 << i

    hasse = set()
    for i in range(n):
        for j in range(n):
            if i == j or not leq[i] >> j & 1:
                continue
            between = leq[i] & ~(1 << i) & ~(1 << j)
            if not any(
                leq[k] >> j & 1 for k in range(n) if between >> k & 1
            ):
                hasse.add((i, j))

    bottoms = [i for i in range(n) if all(not leq[j] >> i & 1 for j in range(n) if j != i)]
    tops = [i for i in range(n) if all(not leq[i] >> j & 1 for j in range(n) if j != i)]
    if len(bottoms) != 1 or len(tops) != 1:
        raise InvariantViolation("stable set lacks unique extremes; not a lattice")
    return StableLattice(inst, elements, tuple(leq), frozenset(hasse), bottoms[0], tops[0])


def immediate_successors(lat: StableLattice, x: Vector) -> set[Vector]:
    """Stable assignments covering x in the firm-side order."""
    i = lat.index(x)
    return {lat.elements[j] for a, j in lat.hasse if a == i}


# ---------------------------------------------------------------------------
# lattice operations and the law audit
# ---------------------------------------------------------------------------

def lattice_join(inst: Instance, x: Vector, y: Vector) -> Vector:
    """Firm-side join assembled from each firm's local join."""
    loc = {}
    for f in inst.firms:
        if f not in inst.cf:
            continue
        zx, zy = inst.local(x, f), inst.local(y, f)
        loc[f] = inst.cf[f].evaluate(tuple(max(a, b) for a, b in zip(zx, zy)))
    return inst.scatter(FIRM, loc)


def lattice_meet(inst: Instance, x: Vector, y: Vector) -> Vector:
    """Firm-side meet assembled from each firm's local meet (via closures)."""
    from .choice import closure

    loc = {}
    for f in inst.firms:
        if f not in inst.cf:
            continue
        cx = closure(inst.cf[f], inst.local(x, f))
        cy = closure(inst.cf[f], inst.local(y, f))
        loc[f] = inst.cf[f].evaluate(tuple(min(a, b) for a, b in zip(cx, cy)))
    return inst.scatter(FIRM, loc)


@dataclass(frozen=True)
class AuditReport:
    """Pass/fail per lattice law, with a witness for every failure."""

    closed_under_join_meet: bool
    join_meet_match_order: bool
    distributive: bool
    polar: bool
    unisize: bool
    witnesses: dict[str, tuple] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (
            self.closed_under_join_meet
            and self.join_meet_match_order
            and self.distributive
            and self.polar
            and self.unisize
        )


def lattice_audit(lat: StableLattice) -> AuditReport:
    """Verify the structural laws of the stable set, with witnesses.

    Checks: closure of the stable set under join and meet; that the
    computed join/meet are the order-theoretic least upper and greatest
    lower bounds; distributivity over all triples; that the two sides
    order stable assignments oppositely; and that each vertex receives
    the same total amount in every stable assignment.
    """
    inst = lat.instance
    n = len(lat.elements)
    witness: dict[str, tuple] = {}
    index = {x: i for i, x in enumerate(lat.elements)}

    joins = [[0] * n for _ in range(n)]
    meets = [[0] * n for _ in range(n)]
    closed = True
    matches = True
    for i in range(n):
        for j in range(i, n):
            jv = lattice_join(inst, lat.elements[i], lat.elements[j])
            mv = lattice_meet(inst, lat.elements[i], lat.elements[j])
            if jv not in index or mv not in index:
                closed = False
                witness.setdefault("closure", (lat.elements[i], lat.elements[j]))
                continue
            ji, mi = index[jv], index[mv]
            joins[i][j] = joins[j][i] = ji
            meets[i][j] = meets[j][i] = mi
            uppers = [k for k in range(n) if lat.below(i, k) and lat.below(j, k)]
            lowers = [k for k in range(n) if lat.below(k, i) and lat.below(k, j)]
            lub = [k for k in uppers if all(lat.below(k, u) for u in uppers)]
            glb = [k for k in lowers if all(lat.below(l, k) for l in lowers)]
            if lub != [ji] or glb != [mi]:
                matches = False
                witness.setdefault("order_match", (lat.elements[i], lat.elements[j]))

    distributive = closed
    if closed:
        for i, j, k in itertools.product(range(n), repeat=3):
            if meets[i][joins[j][k]] != joins[meets[i][j]][meets[i][k]]:
                distributive = False
                witness.setdefault(
                    "distributivity",
                    (lat.elements[i], lat.elements[j], lat.elements[k]),
                )
                break

    polar = True
    for i in range(n):
        for j in range(i + 1, n):
            fw = compare_firm_side(inst, lat.elements[i], lat.elements[j])
            ww = compare_worker_side(inst, lat.elements[i], lat.elements[j])
            expected = {
                Ordering.LESS: Ordering.GREATER,
                Ordering.GREATER: Ordering.LESS,
                Ordering.EQUAL: Ordering.EQUAL,
                Ordering.INCOMPARABLE: Ordering.INCOMPARABLE,
            }[fw]
            if ww != expected:
                polar = False
                witness.setdefault("polarity", (lat.elements[i], lat.elements[j]))

    unisize = True
    for v in inst.vertices:
        sizes = {sum(inst.local(x, v)) for x in lat.elements}
        if len(sizes) > 1:
            unisize = False
            witness.setdefault("unisize", (v, tuple(sorted(sizes))))

    return AuditReport(closed, matches, distributive, polar, unisize, witness)


# ---------------------------------------------------------------------------
# principal elements and the chain-split structure
# ---------------------------------------------------------------------------

def principal_elements(lat: StableLattice) -> frozenset[int]:
    """Indices reachable from the bottom by repeated maximal straight runs.

    A step follows a covering direction as far as the stable set stays
    stable point-by-point; that run length is exactly the maximal
    feasible shift weight, so the reachable set is the principal part of
    the lattice.
    """
    index = {x: i for i, x in enumerate(lat.elements)}
    succ: dict[int, list[int]] = {}
    for i, j in lat.hasse:
        succ.setdefault(i, []).append(j)
    seen = {lat.bottom}
    stack = [lat.bottom]
    while stack:
        i = stack.pop()
        base = lat.elements[i]
        for j in succ.get(i, ()):
            delta = tuple(b - a for a, b in zip(base, lat.elements[j]))
            m = 1
            while True:
                nxt = tuple(a + (m + 1) * d for a, d in zip(base, delta))
                if nxt in index:
                    m += 1
                else:
                    break
            target = index[tuple(a + m * d for a, d in zip(base, delta))]
            if target not in seen:
                seen.add(target)
                stack.append(target)
    return frozenset(seen)


def lattice_dot(lat: StableLattice) -> str:
    """The stable set's Hasse diagram in DOT, nodes labeled by vector."""
    from .fileio import format_vector

    lines = ["digraph stable {", "  rankdir=BT;"]
    for i, x in enumerate(lat.elements):
        lines.append(f'  n{i} [label="{format_vector(lat.instance, x)}"];')
    for i, j in sorted(lat.hasse):
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines)


@dataclass(frozen=True)
class BirkhoffStructure:
    """Prime ideals of the principal sublattice and their induced order.

    ``anchors[i]`` is the largest element of the i-th prime ideal and
    ``ideal_order`` holds the strict comparabilities between ideals
    (indices into ``prime_ideals``).
    """

    chain: tuple[Vector, ...]
    prime_ideals: tuple[frozenset[Vector], ...]
    anchors: tuple[Vector, ...]
    co_anchors: tuple[Vector, ...]
    ideal_order: frozenset[tuple[int, int]]


def birkhoff_extract(lat: StableLattice) -> BirkhoffStructure:
    """Split the principal sublattice along one maximal chain.

    Each chain link yields a prime ideal (the elements whose join with
    the link's lower end stays below its upper end); the ideals are
    ordered by comparing their largest elements, and the co-anchor
    (least element outside each ideal) ordering is cross-checked to
    agree.
    """
    inst = lat.instance
    members = sorted(principal_elements(lat))
    pos = {m: p for p, m in enumerate(members)}

    def below(a: int, b: int) -> bool:
        return lat.below(members[a], members[b])

    def join_of(a: int, b: int) -> int:
        uppers = [k for k in range(len(members)) if below(a, k) and below(b, k)]
        least = [k for k in uppers if all(below(k, u) for u in uppers)]
        if len(least) != 1:
            raise InvariantViolation("principal part is not closed under join")
        return least[0]

    def meet_of(a: int, b: int) -> int:
        lowers = [k for k in range(len(members)) if below(k, a) and below(k, b)]
        greatest = [k for k in lowers if all(below(l, k) for l in lowers)]
        if len(greatest) != 1:
            raise InvariantViolation("principal part is not closed under meet")
        return greatest[0]

    # maximal chain within the principal part
    chain = [pos[lat.bottom]]
    while True:
        cur = chain[-1]
        covers = [
            j
            for j in range(len(members))
            if j != cur
            and below(cur, j)
            and not any(
                k != cur and k != j and below(cur, k) and below(k, j)
                for k in range(len(members))
            )
        ]
        if not covers:
            break
        chain.append(min(covers))

    ideals: list[frozenset[Vector]] = []
    anchors: list[int] = []
    co_anchors: list[int] = []
    for t in range(1, len(chain)):
        lo, hi = chain[t - 1], chain[t]
        ideal = []
        for y in range(len(members)):
            v = meet_of(join_of(lo, y), hi)
            if v not in (lo, hi):
                raise InvariantViolation("chain split produced a third value")
            if v == lo:
                ideal.append(y)
        filt = [y for y in range(len(members)) if y not in ideal]
        mx = [y for y in ideal if all(below(z, y) for z in ideal)]
        mn = [y for y in filt if all(below(y, z) for z in filt)]
        if len(mx) != 1 or len(mn) != 1:
            raise InvariantViolation("prime ideal without unique extremes")
        ideals.append(frozenset(lat.elements[members[y]] for y in ideal))
        anchors.append(mx[0])
        co_anchors.append(mn[0])

    if len(set(anchors)) != len(anchors):
        raise InvariantViolation("chain links produced duplicate prime ideals")

    order = set()
    for i in range(len(anchors)):
        for j in range(len(anchors)):
            if i != j and below(anchors[i], anchors[j]):
                order.add((i, j))
                if not below(co_anchors[i], co_anchors[j]):
                    raise InvariantViolation("anchor and co-anchor orders disagree")

    return BirkhoffStructure(
        chain=tuple(lat.elements[members[c]] for c in chain),
        prime_ideals=tuple(ideals),
        anchors=tuple(lat.elements[members[a]] for a in anchors),
        co_anchors=tuple(lat.elements[members[c]] for c in co_anchors),
        ideal_order=frozenset(order),
    )
