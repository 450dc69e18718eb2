"""Extreme stable assignments and routes between comparable ones.

Two independent methods find the worker-optimal assignment: an iterated
capacity-reduction fixpoint, and a two-stage construction that grows an
assignment from zero along augmenting paths and then walks the reversed
lattice.  Routes (sequences of rotation shifts) connect comparable
stable assignments; the multiset of weighted rotations used is a route
invariant and the basis of the poset representation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .choice import bump
from .errors import InvariantViolation
from .model import (
    FIRM,
    WORKER,
    Instance,
    Ordering,
    Vector,
    compare_firm_side,
    edge_interest,
    firm_prefers_weakly,
    is_acceptable,
    is_stable,
)
from .rotations import (
    Rotation,
    apply_rotation,
    is_rotation_applicable,
    max_weight_binary,
    max_weight_linear,
    rotations_at,
)


def weight_search_for(inst: Instance) -> Callable[[Instance, Vector, Rotation], int]:
    return max_weight_binary if inst.gapless else max_weight_linear


def route_length_bound(inst: Instance) -> int:
    """Hard ceiling on the number of shifts in any route: bmax * |E| / 2."""
    return inst.bmax() * len(inst.edges) // 2


# ---------------------------------------------------------------------------
# worker-optimal assignment, method 1: capacity reduction
# ---------------------------------------------------------------------------

def worker_optimal(inst: Instance) -> Vector:
    """The stable assignment every worker likes best (firm-side minimum).

    Iterates: workers choose from the current capacities, firms prune
    the workers' proposal, and capacities shrink wherever the firms
    pruned.  The capacity vector strictly decreases until the firms
    prune nothing, and that fixpoint is the worker-optimal stable
    assignment.
    """
    if not inst.edges:
        return ()
    b_cur: Vector = inst.caps
    for _ in range(len(inst.edges) * inst.bmax() + 2):
        x = inst.scatter(
            WORKER,
            {w: inst.cf[w].evaluate(inst.local(b_cur, w)) for w in inst.workers if w in inst.cf},
        )
        y = inst.scatter(
            FIRM,
            {f: inst.cf[f].evaluate(inst.local(x, f)) for f in inst.firms if f in inst.cf},
        )
        if y == x:
            return x
        b_next = tuple(
            b_cur[e] if y[e] == x[e] else y[e] for e in range(len(inst.edges))
        )
        if b_next == b_cur:
            raise InvariantViolation("capacity reduction stalled without converging")
        b_cur = b_next
    raise InvariantViolation("capacity reduction exceeded its iteration bound")


def firm_optimal(inst: Instance) -> Vector:
    """The stable assignment every firm likes best (firm-side maximum)."""
    return worker_optimal(inst.swapped())


# ---------------------------------------------------------------------------
# worker-optimal assignment, method 2: two-stage augmentation
# ---------------------------------------------------------------------------

def _firm_interest_flags(inst: Instance, x: Vector) -> list[bool]:
    return [
        edge_interest(inst, x, e, edge.firm).interesting
        for e, edge in enumerate(inst.edges)
    ]


def _partial_stability_ok(inst: Instance, x: Vector, firm_hot: list[bool]) -> bool:
    """The stage-1 invariants: acceptable, and any two-sided tension on an
    edge the firms want must be pure acceptance on the worker side."""
    if not inst.in_box(x) or not is_acceptable(inst, x):
        return False
    for e, edge in enumerate(inst.edges):
        if not firm_hot[e]:
            continue
        probe = edge_interest(inst, x, e, edge.worker)
        if probe.interesting and probe.case != "a":
            return False
    return True


def _quasi_partner(
    inst: Instance, x: Vector, c: int, firm_hot: list[bool]
) -> tuple[Optional[int], bool]:
    """(unique trade partner for releasing c, any candidate existed).

    Mirrors the worker swap of the stable setting, with the extra
    requirement that the gained edge is one the worker would currently
    refuse outright.
    """
    w = inst.edges[c].worker
    cf = inst.cf[w]
    pos = inst.local_pos[w]
    z0 = inst.local(x, w)
    candidates = []
    for a in inst.incident[w]:
        if a == c or not firm_hot[a] or x[a] >= inst.caps[a]:
            continue
        if cf.evaluate(bump(z0, pos[a])) != z0:
            continue  # the worker already wants a; not a pure trade
        z = bump(bump(z0, pos[c], -1), pos[a])
        if cf.evaluate(z) == z:
            candidates.append((a, z))
    if not candidates:
        return None, False
    hits = [
        a
        for a, z in candidates
        if all(d == a or cf.evaluate(bump(z, pos[d])) == z for d, _ in candidates)
    ]
    if len(hits) != 1:
        raise InvariantViolation(
            f"worker {w} has {len(hits)} trade partners for {inst.edges[c].id}; "
            "exactly one is guaranteed"
        )
    return hits[0], True


ACCEPT = "accept"  # path ends at a firm that keeps the extra unit outright
DROP = "drop"      # path ends at a worker whose lost unit nobody trades for
CYCLE = "cycle"    # path closed on itself


def _augmenting_chain(
    inst: Instance, x: Vector, start: int, firm_hot: list[bool]
) -> tuple[list[int], str]:
    """Follow the unique swap chain from a mutually wanted start edge.

    Returns the shifted edge list (alternating gain/lose, gains at even
    positions) and how it terminated.  For CYCLE the returned list is
    only the closed part.
    """
    edges = [start]
    position = {start: 0}
    while True:
        last = edges[-1]
        if len(edges) % 2 == 1:  # arrived at the firm end of a gained edge
            f = inst.edges[last].firm
            probe = edge_interest(inst, x, last, f)
            if probe.case == "a":
                return edges, ACCEPT
            if probe.case != "b":
                raise InvariantViolation(
                    f"edge {inst.edges[last].id} stopped interesting mid-chain"
                )
            nxt = probe.displaced
        else:  # arrived at the worker end of a lost edge
            nxt, _ = _quasi_partner(inst, x, last, firm_hot)
            if nxt is None:
                return edges, DROP
        if nxt in position:
            m = position[nxt]
            if m % 2 != len(edges) % 2:
                raise InvariantViolation("swap chain closed with mismatched parity")
            cyc = edges[m:]
            if m % 2 == 1:  # closed at a firm: rotate so a gained edge leads
                cyc = cyc[1:] + cyc[:1]
            return cyc, CYCLE
        position[nxt] = len(edges)
        edges.append(nxt)


def _shift_chain(x: Vector, edges: list[int], weight: int) -> Vector:
    out = list(x)
    for i, e in enumerate(edges):
        out[e] += weight if i % 2 == 0 else -weight
    return tuple(out)


def _chain_bound(inst: Instance, x: Vector, edges: list[int]) -> int:
    up = min(inst.caps[e] - x[e] for e in edges[0::2])
    down = min(x[e] for e in edges[1::2]) if edges[1::2] else up
    return min(up, down)


def _chain_persists(
    inst: Instance, x: Vector, edges: list[int], kind: str, firm_hot: list[bool]
) -> bool:
    """Would the same chain be constructed again at x?"""
    for i, e in enumerate(edges):
        if i % 2 == 0 and x[e] >= inst.caps[e]:
            return False
        if i % 2 == 1 and x[e] <= 0:
            return False
    if kind != CYCLE:  # a path's first edge must stay mutually wanted
        start = edges[0]
        w0 = inst.edges[start].worker
        z0 = inst.local(x, w0)
        if not firm_hot[start]:
            return False
        if inst.cf[w0].evaluate(bump(z0, inst.local_pos[w0][start])) != bump(
            z0, inst.local_pos[w0][start]
        ):
            return False
    n = len(edges)
    limit = n if kind == CYCLE else n - 1
    for i in range(limit):
        e, nxt = edges[i], edges[(i + 1) % n]
        if i % 2 == 0:
            probe = edge_interest(inst, x, e, inst.edges[e].firm)
            if not (probe.case == "b" and probe.displaced == nxt):
                return False
        else:
            partner, _ = _quasi_partner(inst, x, e, firm_hot)
            if partner != nxt:
                return False
    if kind == ACCEPT:
        if edge_interest(inst, x, edges[-1], inst.edges[edges[-1]].firm).case != "a":
            return False
    elif kind == DROP:
        partner, any_candidate = _quasi_partner(inst, x, edges[-1], firm_hot)
        if partner is not None or any_candidate:
            return False
    return True


def _chain_weight(
    inst: Instance, x: Vector, edges: list[int], kind: str
) -> int:
    """Maximal shift weight along an augmenting chain, by bisection.

    A probe continues while the shifted point keeps the stage-1
    invariants and regenerates the same chain.  The applied weight is
    the first weight at which the chain itself breaks, provided the
    invariants still hold there; otherwise the last invariant-clean
    weight.  Requires the no-gap declaration for correctness.
    """
    bound = _chain_bound(inst, x, edges)

    def result_ok(mu: int) -> bool:
        y = _shift_chain(x, edges, mu)
        if not inst.in_box(y) or not is_acceptable(inst, y):
            return False
        return _partial_stability_ok(inst, y, _firm_interest_flags(inst, y))

    def continuing(mu: int) -> bool:
        if not result_ok(mu):
            return False
        y = _shift_chain(x, edges, mu)
        return _chain_persists(inst, y, edges, kind, _firm_interest_flags(inst, y))

    lo, hi = 0, bound
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if continuing(mid):
            lo = mid
        else:
            hi = mid
    if result_ok(hi):
        return hi
    return max(lo, 1)


def _pick_start(
    inst: Instance, x: Vector, firm_hot: list[bool]
) -> Optional[tuple[int, Optional[int]]]:
    """Choose the start edge for the next augmenting chain.

    Candidates are edges a firm wants and the worker accepts outright.
    Taking an arbitrary one can park a worker on units that later,
    better-placed edges will displace, stranding a trade-form tension
    no chain can start from.  So a candidate is preferred when its unit
    would survive even if every firm-wanted edge at that worker were
    pushed to capacity, and the surviving amount (the rush slack) caps
    the shift weight.  Returns (edge, slack); slack None marks a
    fallback pick whose shifts stay at weight one.
    """
    fallback = None
    for e, edge in enumerate(inst.edges):
        if not firm_hot[e]:
            continue
        w = edge.worker
        pos = inst.local_pos[w]
        z = inst.local(x, w)
        if inst.cf[w].evaluate(bump(z, pos[e])) != bump(z, pos[e]):
            continue
        if fallback is None:
            fallback = (e, None)
        rush = list(z)
        for d in inst.incident[w]:
            if firm_hot[d]:
                rush[pos[d]] = inst.caps[d]
        slack = inst.cf[w].evaluate(tuple(rush))[pos[e]] - z[pos[e]]
        if slack > 0:
            return e, slack
    return fallback


def _verify_shift(inst: Instance, x: Vector, y: Vector) -> None:
    """Hard stage-1 postconditions: in-box, acceptable, no firm worse off.

    Purely local tensions of the kind the growth invariant forbids can
    appear transiently (and resolve later), so they are not enforced
    here; these three conditions are what termination and correctness
    rest on, and their failure means a broken choice function.
    """
    if not inst.in_box(y):
        raise InvariantViolation("augmenting shift left the capacity box")
    if not is_acceptable(inst, y):
        raise InvariantViolation("augmenting shift produced an unacceptable point")
    for f in inst.firms:
        if f not in inst.cf:
            continue
        zx, zy = inst.local(x, f), inst.local(y, f)
        if zx != zy and inst.cf[f].evaluate(
            tuple(max(a, b) for a, b in zip(zx, zy))
        ) != zy:
            raise InvariantViolation(f"augmenting shift made firm {f} worse off")


def worker_optimal_two_stage(inst: Instance) -> Vector:
    """Worker-optimal assignment via augmentation from zero.

    Stage 1 grows an acceptable assignment along uniquely determined
    swap chains until no edge is wanted by a firm and freely accepted by
    its worker; the result is stable but need not be extreme.  Stage 2
    swaps the sides and rides rotations to the top of the reversed
    lattice, which is the worker optimum.  Every shift is re-verified
    and the stage-1 endpoint is checked stable; failures raise.
    """
    if not inst.edges:
        return ()
    x = inst.zero()
    # every iteration strictly improves at least one firm, so any generous
    # bound only exists to turn silent nontermination into a loud failure
    guard = min(10**7, 4 * (sum(inst.caps) + 1) * (len(inst.edges) + 1))
    for _ in range(guard):
        firm_hot = _firm_interest_flags(inst, x)
        picked = _pick_start(inst, x, firm_hot)
        if picked is None:
            break
        start, slack = picked
        chain, kind = _augmenting_chain(inst, x, start, firm_hot)
        if inst.gapless and slack is not None:
            weight = _chain_weight(inst, x, chain, kind)
            if chain[0] == start:  # the rush slack caps how far the start parks
                weight = min(weight, slack)
        else:
            weight = 1
        y = _shift_chain(x, chain, max(weight, 1))
        _verify_shift(inst, x, y)
        x = y
    else:
        raise InvariantViolation("stage 1 exceeded its iteration guard")

    if not is_stable(inst, x):
        raise InvariantViolation("stage 1 terminated on an unstable assignment")

    swapped = inst.swapped()
    weight_fn = weight_search_for(swapped)
    steps = 0
    bound = route_length_bound(inst) + 1
    while True:
        rots = rotations_at(swapped, x, verified=True)
        if not rots:
            return x
        for rot in rots:
            steps += 1
            if steps > bound:
                raise InvariantViolation("stage 2 exceeded the route length bound")
            if not is_rotation_applicable(swapped, x, rot):
                raise InvariantViolation("batched rotation stopped being applicable")
            x = apply_rotation(swapped, x, rot, weight_fn(swapped, x, rot))


# ---------------------------------------------------------------------------
# routes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RouteStep:
    rotation: Rotation
    weight: int
    cap: int  # maximal feasible weight at the moment the step was taken


@dataclass(frozen=True)
class Route:
    """A sequence of rotation shifts between stable assignments.

    ``points`` holds the visited assignments, points[0] == start and one
    entry per step after it.
    """

    start: Vector
    steps: tuple[RouteStep, ...]
    points: tuple[Vector, ...]

    @property
    def end(self) -> Vector:
        return self.points[-1]

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def is_principal(self) -> bool:
        return all(s.weight == s.cap for s in self.steps)

    @property
    def is_non_excessive(self) -> bool:
        last_pos = {}
        for i, s in enumerate(self.steps):
            last_pos[s.rotation] = i
        return all(
            s.weight == s.cap for i, s in enumerate(self.steps) if last_pos[s.rotation] != i
        )


def full_route(inst: Instance, rng: Optional[random.Random] = None) -> Route:
    """A principal route from the worker optimum to the firm optimum.

    Rotations of one trimmed swap digraph are consumed as a batch before
    the digraph is rebuilt (applying one full-weight rotation leaves the
    others applicable with unchanged weights).  Order is deterministic
    unless an rng is supplied.  Exceeding the route length bound proves
    a bug and raises.
    """
    x = worker_optimal(inst)
    weight_fn = weight_search_for(inst)
    bound = route_length_bound(inst)
    steps: list[RouteStep] = []
    points: list[Vector] = [x]
    while True:
        rots = list(rotations_at(inst, x, verified=True))
        if not rots:
            break
        if rng is not None:
            rng.shuffle(rots)
        for rot in rots:
            if len(steps) >= bound:
                raise InvariantViolation(
                    f"route exceeded the length bound {bound}; this proves a bug"
                )
            if not is_rotation_applicable(inst, x, rot):
                raise InvariantViolation("batched rotation stopped being applicable")
            tau = weight_fn(inst, x, rot)
            x = apply_rotation(inst, x, rot, tau)
            steps.append(RouteStep(rot, tau, tau))
            points.append(x)
    return Route(points[0], tuple(steps), tuple(points))


def route_between(
    inst: Instance,
    x: Vector,
    y: Vector,
    weight_policy: str = "maximal",
    rng: Optional[random.Random] = None,
) -> Route:
    """A non-excessive route from x up to y (both stable, x below y).

    Each step picks a rotation whose unit application keeps the result
    weakly below y for every firm, then applies it with the largest
    dominance-preserving weight; that weight is forced (a smaller one
    could never be topped up again without breaking non-excessiveness).
    ``weight_policy='randomized'`` randomizes the rotation choice with
    the supplied rng; 'maximal' picks the canonically smallest.
    """
    if weight_policy not in ("maximal", "randomized"):
        raise ValueError(f"unknown weight policy {weight_policy!r}")
    if compare_firm_side(inst, x, y) != Ordering.LESS:
        raise ValueError("route target must be strictly above the start for the firms")
    weight_fn = weight_search_for(inst)
    bound = route_length_bound(inst)
    cur = x
    steps: list[RouteStep] = []
    points: list[Vector] = [x]
    partially_used: set[Rotation] = set()
    while cur != y:
        if len(steps) >= bound:
            raise InvariantViolation(f"route exceeded the length bound {bound}")
        rots = rotations_at(inst, cur, verified=True)
        cands = [
            rot
            for rot in rots
            if firm_prefers_weakly(inst, apply_rotation(inst, cur, rot, 1), y)
        ]
        if not cands:
            raise InvariantViolation(
                "no rotation stays below the target; successor structure falsified"
            )
        if weight_policy == "randomized" and rng is not None:
            rot = rng.choice(cands)
        else:
            rot = min(cands, key=lambda r: r.cycle)
        if rot in partially_used:
            raise InvariantViolation(
                "a partially applied rotation recurred; route invariance falsified"
            )
        tau = weight_fn(inst, cur, rot)
        lam = tau
        while lam > 1 and not firm_prefers_weakly(
            inst, apply_rotation(inst, cur, rot, lam), y
        ):
            lam -= 1
        if lam < tau:
            partially_used.add(rot)
        cur = apply_rotation(inst, cur, rot, lam)
        steps.append(RouteStep(rot, lam, tau))
        points.append(cur)
    return Route(points[0], tuple(steps), tuple(points))


def rotation_multiset(route: Route) -> dict[tuple[Rotation, int], int]:
    """Multiset of (rotation, weight) steps; the route invariant.

    Only meaningful for non-excessive routes, so excessive input raises.
    """
    if not route.is_non_excessive:
        raise ValueError("rotation multiset is only defined for non-excessive routes")
    out: dict[tuple[Rotation, int], int] = {}
    for s in route.steps:
        key = (s.rotation, s.weight)
        out[key] = out.get(key, 0) + 1
    return out
