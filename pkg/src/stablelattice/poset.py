"""The weighted poset of labeled rotations representing the stable lattice.

A full route uses each rotation some number of times; labeling the
occurrences chronologically gives the element set.  Element weights are
the maximal shift weights, and the order is built one element at a
time: drive the assignment as far as possible without using the
element's rotation, apply it once, and read off which labeled rotations
become applicable right after -- those are exactly the immediate
successors.  Closed functions on the result (bounded by the weights,
with any positive value forcing everything below it to full weight) are
in bijection with the stable assignments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import CapExceeded, InvariantViolation
from .model import Instance, Vector, is_stable
from .rotations import Rotation, apply_rotation, is_rotation_applicable, rotations_at
from .routes import (
    weight_search_for,
    full_route,
    route_between,
    route_length_bound,
)


@dataclass(frozen=True)
class PosetElement:
    """One labeled rotation occurrence.

    ``anchor`` is the largest stable assignment whose route avoids this
    occurrence, and ``anchor_successor`` the assignment just after
    applying it there; both are recorded during construction for audit.
    """

    rotation: Rotation
    occurrence: int  # 1-based position among this rotation's uses
    weight: int      # maximal feasible shift weight at this occurrence
    anchor: Vector
    anchor_successor: Vector


class RotationPoset:
    """Elements in full-route order with the covering relation."""

    def __init__(
        self,
        instance: Instance,
        bottom: Vector,
        top: Vector,
        elements: tuple[PosetElement, ...],
        covers: frozenset[tuple[int, int]],
    ):
        self.instance = instance
        self.bottom = bottom
        self.top = top
        self.elements = elements
        self.covers = covers
        if any(i >= j for i, j in covers):
            raise InvariantViolation(
                "route order is not a linear extension of the poset"
            )
        self.by_label = {
            (el.rotation, el.occurrence): i for i, el in enumerate(elements)
        }
        n = len(elements)
        below = [0] * n  # bitmask of strict predecessors
        preds: dict[int, list[int]] = {j: [] for j in range(n)}
        for i, j in covers:
            preds[j].append(i)
        for j in range(n):  # full-route order is a linear extension
            mask = 0
            for i in preds[j]:
                mask |= below[i] | (1 << i)
            below[j] = mask
        self.below_mask = tuple(below)

    def __len__(self) -> int:
        return len(self.elements)

    def weights(self) -> tuple[int, ...]:
        return tuple(el.weight for el in self.elements)

    def precedes(self, i: int, j: int) -> bool:
        """Strict order: element i below element j."""
        return bool(self.below_mask[j] >> i & 1)


ClosedFunction = tuple[int, ...]


def _transitive_reduction(
    n: int, edges: set[tuple[int, int]]
) -> tuple[set[tuple[int, int]], set[tuple[int, int]]]:
    """(reduced edge set, removed shortcuts)."""
    reach = [0] * n
    order = sorted(range(n))  # indices are already a linear extension
    succ: dict[int, list[int]] = {i: [] for i in range(n)}
    for i, j in edges:
        succ[i].append(j)
    for i in reversed(order):
        mask = 0
        for j in succ[i]:
            mask |= reach[j] | (1 << j)
        reach[i] = mask
    removed = set()
    for i, j in sorted(edges):
        indirect = 0
        for k in succ[i]:
            if k != j:
                indirect |= reach[k] | (1 << k)
        if indirect >> j & 1:
            removed.add((i, j))
    return edges - removed, removed


def build_poset(inst: Instance) -> RotationPoset:
    """Construct the weighted poset of labeled rotations.

    Stage 0 walks one full route, fixing the element list, weights, and
    occurrence labels.  Stage i then resumes the route just before its
    i-th step, exhausts every other rotation to reach the element's
    anchor, applies the element's rotation once, and labels each
    rotation applicable at the result by its occurrence count along the
    constructed route; those labeled rotations are the immediate
    successors.  A final transitive-reduction pass double-checks that no
    shortcut edges were produced.
    """
    base = full_route(inst)
    n = len(base.steps)
    counts: dict[Rotation, int] = {}
    labels: list[int] = []
    label_index: dict[tuple[Rotation, int], int] = {}
    for j, step in enumerate(base.steps):
        counts[step.rotation] = counts.get(step.rotation, 0) + 1
        labels.append(counts[step.rotation])
        label_index[(step.rotation, counts[step.rotation])] = j

    weight_of = weight_search_for(inst)
    anchors: list[Vector] = []
    anchor_next: list[Vector] = []
    covers: set[tuple[int, int]] = set()
    bound = route_length_bound(inst) + 1

    for i in range(n):
        target = base.steps[i].rotation
        prefix = [s.rotation for s in base.steps[:i]]
        x = base.points[i]
        moves = 0
        while True:
            others = [r for r in rotations_at(inst, x, verified=True) if r != target]
            if not others:
                break
            rot = min(others, key=lambda r: r.cycle)
            x = apply_rotation(inst, x, rot, weight_of(inst, x, rot))
            prefix.append(rot)
            moves += 1
            if moves > bound:
                raise InvariantViolation("anchor search exceeded the route bound")
        if not is_rotation_applicable(inst, x, target):
            raise InvariantViolation(
                "the stage rotation stopped being applicable at its anchor"
            )
        tau = weight_of(inst, x, target)
        if tau != base.steps[i].cap:
            raise InvariantViolation(
                f"occurrence weight changed between routes ({tau} vs "
                f"{base.steps[i].cap}); route invariance falsified"
            )
        y = apply_rotation(inst, x, target, tau)
        anchors.append(x)
        anchor_next.append(y)
        route_counts: dict[Rotation, int] = {}
        for r in prefix + [target]:
            route_counts[r] = route_counts.get(r, 0) + 1
        for succ_rot in rotations_at(inst, y, verified=True):
            if succ_rot == target:
                raise InvariantViolation(
                    "a rotation stayed applicable right after its full-weight use"
                )
            key = (succ_rot, route_counts.get(succ_rot, 0) + 1)
            if key not in label_index:
                raise InvariantViolation(
                    f"occurrence {key} has no poset element; labeling is inconsistent"
                )
            covers.add((i, label_index[key]))

    reduced, removed = _transitive_reduction(n, covers)
    if removed:
        raise InvariantViolation(
            f"immediate-successor search produced shortcut edges {sorted(removed)}"
        )

    elements = tuple(
        PosetElement(
            rotation=base.steps[i].rotation,
            occurrence=labels[i],
            weight=base.steps[i].cap,
            anchor=anchors[i],
            anchor_successor=anchor_next[i],
        )
        for i in range(n)
    )
    return RotationPoset(inst, base.start, base.end, elements, frozenset(reduced))


# ---------------------------------------------------------------------------
# closed functions and the isomorphism
# ---------------------------------------------------------------------------

def is_closed(poset: RotationPoset, values: ClosedFunction) -> bool:
    """0 <= values <= weights, and positive values force full predecessors."""
    n = len(poset.elements)
    if len(values) != n:
        raise ValueError(f"expected {n} values, got {len(values)}")
    for v, el in zip(values, poset.elements):
        if not 0 <= v <= el.weight:
            raise ValueError(f"value {v} outside [0, {el.weight}]")
    full = 0
    for i, el in enumerate(poset.elements):
        if values[i] == el.weight:
            full |= 1 << i
    return all(
        poset.below_mask[j] & ~full == 0
        for j in range(n)
        if values[j] > 0
    )


def to_closed_function(inst: Instance, poset: RotationPoset, x: Vector) -> ClosedFunction:
    """Coordinates of a stable assignment on the poset.

    Reads the weights off a route from the bottom to x: the k-th use of
    a rotation carries the value of its k-th labeled occurrence.
    """
    if not is_stable(inst, x):
        raise ValueError("coordinates are defined for stable assignments only")
    values = [0] * len(poset.elements)
    if x == poset.bottom:
        return tuple(values)
    route = route_between(inst, poset.bottom, x)
    seen: dict[Rotation, int] = {}
    for step in route.steps:
        seen[step.rotation] = seen.get(step.rotation, 0) + 1
        key = (step.rotation, seen[step.rotation])
        if key not in poset.by_label:
            raise InvariantViolation(
                "route used a rotation occurrence missing from the poset"
            )
        values[poset.by_label[key]] = step.weight
    result = tuple(values)
    if not is_closed(poset, result):
        raise InvariantViolation(
            "route weights are not a closed function; representation falsified"
        )
    return result


def from_closed_function(
    inst: Instance, poset: RotationPoset, values: ClosedFunction
) -> Vector:
    """The stable assignment a closed function denotes.

    Adds every labeled rotation's signed cycle, scaled by its value, to
    the bottom assignment; the result is verified stable.
    """
    if not is_closed(poset, values):
        raise ValueError("values do not form a closed function")
    out = list(poset.bottom)
    for v, el in zip(values, poset.elements):
        if v == 0:
            continue
        for e in el.rotation.plus:
            out[e] += v
        for e in el.rotation.minus:
            out[e] -= v
    x = tuple(out)
    if not inst.in_box(x) or not is_stable(inst, x):
        raise InvariantViolation(
            "closed function decoded to an unstable point; representation falsified"
        )
    return x


def closed_functions(
    poset: RotationPoset, cap: int = 10**6
) -> Iterator[ClosedFunction]:
    """Yield every closed function once, lexicographically in element order.

    The element order is a linear extension, so a prefix assignment is
    extendable exactly when each positive value sees all its
    predecessors already full; that check prunes the search.  Raises
    :class:`CapExceeded` when the value box exceeds ``cap`` points.
    """
    total = 1
    for el in poset.elements:
        total *= el.weight + 1
        if total > cap:
            raise CapExceeded(f"closed-function box exceeds cap {cap}")
    n = len(poset.elements)
    values = [0] * n

    def assign(i: int, full_mask: int) -> Iterator[ClosedFunction]:
        if i == n:
            yield tuple(values)
            return
        el = poset.elements[i]
        predecessors_full = poset.below_mask[i] & ~full_mask == 0
        for v in range(0, el.weight + 1):
            if v > 0 and not predecessors_full:
                break
            values[i] = v
            yield from assign(i + 1, full_mask | ((1 << i) if v == el.weight else 0))
        values[i] = 0

    return assign(0, 0)


def stable_assignments(inst: Instance, poset: Optional[RotationPoset] = None,
                       cap: int = 10**6) -> Iterator[Vector]:
    """All stable assignments, decoded from the poset representation."""
    poset = poset if poset is not None else build_poset(inst)
    for values in closed_functions(poset, cap=cap):
        yield from_closed_function(inst, poset, values)


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------

def rotation_ids(poset: RotationPoset) -> dict[Rotation, str]:
    """Stable display names R1, R2, ... in order of first use."""
    ids: dict[Rotation, str] = {}
    for el in poset.elements:
        if el.rotation not in ids:
            ids[el.rotation] = f"R{len(ids) + 1}"
    return ids


def poset_text(poset: RotationPoset) -> str:
    """Line format: '<id> <rotation-id> <occurrence> <tau>' then 'edge a b'.

    Element ids are 1-based positions in full-route order.  A legend of
    rotation cycles is appended as comments.
    """
    from .rotations import rotation_label

    ids = rotation_ids(poset)
    lines = []
    for i, el in enumerate(poset.elements):
        lines.append(f"{i + 1} {ids[el.rotation]} {el.occurrence} {el.weight}")
    for i, j in sorted(poset.covers):
        lines.append(f"edge {i + 1} {j + 1}")
    for rot, rid in ids.items():
        lines.append(f"# rotation {rid} = {rotation_label(poset.instance, rot)}")
    return "\n".join(lines) + "\n"


def poset_dot(poset: RotationPoset) -> str:
    """Hasse diagram in DOT; nodes labeled rotation#occurrence:weight."""
    ids = rotation_ids(poset)
    lines = ["digraph poset {", "  rankdir=BT;"]
    for i, el in enumerate(poset.elements):
        label = f"{ids[el.rotation]}#{el.occurrence}:{el.weight}"
        lines.append(f'  n{i + 1} [label="{label}"];')
    for i, j in sorted(poset.covers):
        lines.append(f"  n{i + 1} -> n{j + 1};")
    lines.append("}")
    return "\n".join(lines)
