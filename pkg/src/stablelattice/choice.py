"""Choice functions on a vertex's local box, and their axioms.

A choice function C maps every local vector z (one integer per incident
edge, within capacities) to a sub-vector C(z) <= z.  Three concrete kinds
are supported:

* :class:`QuotaOrderChoice` -- keep units greedily along a strict priority
  order until a quota fills.
* :class:`BalancedTripleChoice` -- a degree-3 rule that keeps an anchor
  edge in full and splits the remaining quota between the two side edges
  as evenly as the caps allow.
* :class:`TableChoice` -- an explicit lookup table over the whole box,
  the escape hatch for arbitrary oracle-given behaviour.

The module also provides exhaustive axiom checking on small boxes, the
revealed-preference relation, closures, and local lattice join/meet.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional

from .errors import CapExceeded, InvalidInstance, InvariantViolation

LocalVector = tuple[int, ...]


def join(z: LocalVector, zp: LocalVector) -> LocalVector:
    return tuple(max(a, b) for a, b in zip(z, zp))


def meet(z: LocalVector, zp: LocalVector) -> LocalVector:
    return tuple(min(a, b) for a, b in zip(z, zp))


def dominates(z: LocalVector, zp: LocalVector) -> bool:
    """Componentwise z >= zp."""
    return all(a >= b for a, b in zip(z, zp))


def bump(z: LocalVector, pos: int, amount: int = 1) -> LocalVector:
    return z[:pos] + (z[pos] + amount,) + z[pos + 1 :]


class ChoiceFunction(ABC):
    """A self-map of the local integer box with C(z) <= z."""

    caps: LocalVector
    quota: Optional[int]

    @abstractmethod
    def evaluate(self, z: LocalVector) -> LocalVector:
        """Return C(z).  Raises ValueError if z is outside the box."""

    # -- box helpers -------------------------------------------------

    def in_box(self, z: LocalVector) -> bool:
        return len(z) == len(self.caps) and all(
            0 <= v <= c for v, c in zip(z, self.caps)
        )

    def box_size(self) -> int:
        size = 1
        for c in self.caps:
            size *= c + 1
        return size

    def box(self) -> Iterator[LocalVector]:
        """All local vectors in row-major order."""
        return itertools.product(*(range(c + 1) for c in self.caps))

    def is_acceptable(self, z: LocalVector) -> bool:
        return self.evaluate(z) == z

    def _require_in_box(self, z: LocalVector) -> None:
        if not self.in_box(z):
            raise ValueError(f"vector {z} outside local box with caps {self.caps}")


class QuotaOrderChoice(ChoiceFunction):
    """Greedy selection along a strict priority order, up to a quota.

    ``priority`` lists local positions from most to least preferred.  If
    ``|z| <= quota`` the whole vector is kept; otherwise units are kept
    in priority order, a partial amount on the first overflowing edge,
    and nothing after it.
    """

    def __init__(self, caps: LocalVector, priority: tuple[int, ...], quota: int):
        if sorted(priority) != list(range(len(caps))):
            raise InvalidInstance(
                f"priority {priority} is not a permutation of positions 0..{len(caps) - 1}"
            )
        if quota < 0:
            raise InvalidInstance("quota must be nonnegative")
        self.caps = tuple(caps)
        self.priority = tuple(priority)
        self.quota = quota

    def evaluate(self, z: LocalVector) -> LocalVector:
        self._require_in_box(z)
        if sum(z) <= self.quota:
            return z
        out = [0] * len(z)
        room = self.quota
        for pos in self.priority:
            take = min(z[pos], room)
            out[pos] = take
            room -= take
            if room == 0:
                break
        return tuple(out)

    def __repr__(self) -> str:
        return f"QuotaOrderChoice(caps={self.caps}, priority={self.priority}, quota={self.quota})"


class BalancedTripleChoice(ChoiceFunction):
    """Degree-3 rule keeping an anchor and balancing the two side edges.

    When ``|z| > quota`` the anchor value is kept in full and the
    remaining ``quota - z[anchor]`` units are split between the left and
    right positions so that the split is as even as the values of z
    allow.  Ties (odd remainders) favour the left position unless its
    value caps it below the even point.  The quota must be even and the
    anchor capacity must not exceed it, otherwise the rule is undefined.
    """

    def __init__(self, caps: LocalVector, anchor: int, left: int, right: int, quota: int):
        if len(caps) != 3 or sorted((anchor, left, right)) != [0, 1, 2]:
            raise InvalidInstance("balanced rule needs exactly three distinct positions")
        if quota < 0 or quota % 2 != 0:
            raise InvalidInstance("balanced rule quota must be even and nonnegative")
        if caps[anchor] > quota:
            raise InvalidInstance("anchor capacity exceeds quota; rule undefined")
        self.caps = tuple(caps)
        self.anchor = anchor
        self.left = left
        self.right = right
        self.quota = quota

    def evaluate(self, z: LocalVector) -> LocalVector:
        self._require_in_box(z)
        if sum(z) <= self.quota:
            return z
        kept = z[self.anchor]
        remainder = self.quota - kept
        lo = max(0, remainder - z[self.right])
        hi = min(remainder, z[self.left])
        zeta = min(max((remainder + 1) // 2, lo), hi)
        out = [0, 0, 0]
        out[self.anchor] = kept
        out[self.left] = zeta
        out[self.right] = remainder - zeta
        return tuple(out)

    def __repr__(self) -> str:
        return (
            f"BalancedTripleChoice(caps={self.caps}, anchor={self.anchor}, "
            f"left={self.left}, right={self.right}, quota={self.quota})"
        )


class TableChoice(ChoiceFunction):
    """An explicit table over the entire local box."""

    def __init__(self, caps: LocalVector, table: Mapping[LocalVector, LocalVector]):
        self.caps = tuple(caps)
        self.quota = None
        self.table = dict(table)
        expected = self.box_size()
        if len(self.table) != expected:
            raise InvalidInstance(
                f"table has {len(self.table)} rows, local box has {expected} points"
            )
        for z, image in self.table.items():
            if not self.in_box(z):
                raise InvalidInstance(f"table key {z} outside local box")
            if len(image) != len(caps) or any(v < 0 for v in image) or not dominates(z, image):
                raise InvalidInstance(f"table image {image} not between 0 and {z}")

    def evaluate(self, z: LocalVector) -> LocalVector:
        self._require_in_box(z)
        try:
            return self.table[tuple(z)]
        except KeyError:  # unreachable after construction checks
            raise ValueError(f"table miss for {z}") from None

    def __repr__(self) -> str:
        return f"TableChoice(caps={self.caps}, rows={len(self.table)})"


# ---------------------------------------------------------------------------
# axiom checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AxiomReport:
    """Outcome of exhaustive axiom checks on one choice function.

    Every failing axiom carries a concrete counterexample: the pair (or
    single vector) of local vectors that witnesses the failure.
    """

    consistency: bool                 # z >= z' >= C(z)  implies  C(z') = C(z)
    substitutability: bool            # z >= z'  implies  C(z) /\ z' <= C(z')
    size_monotonicity: bool           # z >= z'  implies  |C(z)| >= |C(z')|
    quota_filling: Optional[bool]     # |C(z)| = min(|z|, quota); None without a quota
    stationarity: bool                # C(z \/ z') = C(C(z) \/ z')
    counterexamples: dict[str, tuple[LocalVector, ...]] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        core = self.consistency and self.substitutability and self.size_monotonicity
        return core and self.stationarity and self.quota_filling is not False


def check_axioms(cf: ChoiceFunction, pair_cap: int = 10**6) -> AxiomReport:
    """Exhaustively verify the choice-function axioms on cf's box.

    All universally quantified statements are checked over every ordered
    pair in the box.  ``pair_cap`` bounds the number of pairs examined;
    larger boxes raise :class:`CapExceeded` (shrink the box or raise the
    cap -- the checks are never sampled).
    """
    size = cf.box_size()
    if size * size > pair_cap:
        raise CapExceeded(
            f"axiom check needs {size * size} pairs, cap is {pair_cap}"
        )
    image = {z: cf.evaluate(z) for z in cf.box()}
    for z, cz in image.items():
        if not dominates(z, cz) or any(v < 0 for v in cz):
            raise InvalidInstance(f"C({z}) = {cz} escapes [0, z]")

    counter: dict[str, tuple[LocalVector, ...]] = {}
    consistency = substitutability = size_mono = stationarity = True
    quota_ok: Optional[bool] = None if cf.quota is None else True

    points = list(image)
    for z in points:
        cz = image[z]
        if cf.quota is not None and quota_ok:
            if sum(cz) != min(sum(z), cf.quota):
                quota_ok = False
                counter.setdefault("quota_filling", (z,))
        for zp in itertools.product(*(range(v + 1) for v in z)):
            if zp == z:
                continue
            czp = image[zp]
            if consistency and dominates(zp, cz) and czp != cz:
                consistency = False
                counter.setdefault("consistency", (z, zp))
            if substitutability and not dominates(czp, meet(cz, zp)):
                substitutability = False
                counter.setdefault("substitutability", (z, zp))
            if size_mono and sum(cz) < sum(czp):
                size_mono = False
                counter.setdefault("size_monotonicity", (z, zp))
    for z in points:
        cz = image[z]
        for zp in points:
            if stationarity and image[join(z, zp)] != image[join(cz, zp)]:
                stationarity = False
                counter.setdefault("stationarity", (z, zp))
    return AxiomReport(
        consistency=consistency,
        substitutability=substitutability,
        size_monotonicity=size_mono,
        quota_filling=quota_ok,
        stationarity=stationarity,
        counterexamples=counter,
    )


def check_gapless(cf: ChoiceFunction, triple_cap: int = 10**6) -> bool:
    """Exhaustively test the no-gap regularity used by the fast weight search.

    The condition: for acceptable z1 < z2 < z3 (in revealed preference)
    and an edge a whose unit increase displaces c1, c2, c3 respectively,
    c1 = c3 forces c1 = c2.  True on quota-order rules; may fail for
    table rules.
    """
    acceptable = [z for z in cf.box() if cf.evaluate(z) == z]
    n = len(acceptable)
    if n**3 > triple_cap:
        raise CapExceeded(f"gapless check needs {n ** 3} triples, cap is {triple_cap}")

    def prefers(za: LocalVector, zb: LocalVector) -> bool:
        return za != zb and cf.evaluate(join(za, zb)) == zb

    def displaced(z: LocalVector, pos: int) -> Optional[int]:
        if z[pos] >= cf.caps[pos]:
            return None
        out = cf.evaluate(bump(z, pos))
        diff = [i for i in range(len(z)) if out[i] != z[i]]
        if diff == [pos] and out[pos] == z[pos] + 1:
            return None
        if len(diff) == 2 and pos in diff and out[pos] == z[pos] + 1:
            other = diff[0] if diff[1] == pos else diff[1]
            if out[other] == z[other] - 1:
                return other
        return None

    for z1, z2, z3 in itertools.permutations(acceptable, 3):
        if not (prefers(z1, z2) and prefers(z2, z3)):
            continue
        for pos in range(len(cf.caps)):
            c1 = displaced(z1, pos)
            c2 = displaced(z2, pos)
            c3 = displaced(z3, pos)
            if c1 is not None and c1 == c3 and c2 is not None and c2 != c1:
                return False
    return True


# ---------------------------------------------------------------------------
# revealed preference, closure, local lattice operations
# ---------------------------------------------------------------------------

def _require_acceptable(cf: ChoiceFunction, z: LocalVector) -> None:
    if cf.evaluate(z) != z:
        raise ValueError(f"{z} is not acceptable (C(z) != z)")


def revealed_prefers(cf: ChoiceFunction, z: LocalVector, zp: LocalVector) -> bool:
    """True when the acceptable vector z is revealed preferred to zp.

    That is zp < z in the revealed order: offered everything in both,
    the agent picks exactly z.
    """
    _require_acceptable(cf, z)
    _require_acceptable(cf, zp)
    if z == zp:
        raise ValueError("revealed preference compares distinct vectors")
    return cf.evaluate(join(z, zp)) == z


def closure(cf: ChoiceFunction, z: LocalVector) -> LocalVector:
    """The largest vector whose image under C is still z.

    The preimage of an acceptable z is the interval [z, closure(z)], so
    each coordinate can be pushed up independently until the image
    moves.  The result is cross-verified with one evaluation; failure
    means the function is not a valid choice function.
    """
    _require_acceptable(cf, z)
    bar = list(z)
    for pos in range(len(z)):
        t = z[pos]
        while t < cf.caps[pos] and cf.evaluate(bump(z, pos, t + 1 - z[pos])) == z:
            t += 1
        bar[pos] = t
    result = tuple(bar)
    if cf.evaluate(result) != z:
        raise InvariantViolation(
            f"closure cross-check failed: C({result}) != {z}; invalid choice function"
        )
    return result


def local_join_meet(
    cf: ChoiceFunction, z: LocalVector, zp: LocalVector
) -> tuple[LocalVector, LocalVector]:
    """Join and meet of two acceptable vectors in the local preference lattice."""
    _require_acceptable(cf, z)
    _require_acceptable(cf, zp)
    lattice_join = cf.evaluate(join(z, zp))
    lattice_meet = cf.evaluate(meet(closure(cf, z), closure(cf, zp)))
    return lattice_join, lattice_meet
