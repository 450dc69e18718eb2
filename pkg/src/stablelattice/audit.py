"""Whole-instance cross-validation: every solver against the enumeration."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .mincost import min_cost_stable
from .model import Instance
from .oracle import enumerate_stable, immediate_successors, lattice_audit
from .poset import build_poset, closed_functions, from_closed_function, to_closed_function
from .rotations import apply_rotation, binary_weight_probes, max_weight_linear, rotations_at
from .routes import (
    firm_optimal,
    full_route,
    rotation_multiset,
    route_between,
    route_length_bound,
    worker_optimal,
    worker_optimal_two_stage,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def cross_validate(
    inst: Instance,
    cap: int = 10**7,
    cost_trials: int = 5,
    route_seeds: int = 5,
) -> list[CheckResult]:
    """Run every solver on the instance and compare against enumeration.

    Returns one result per check; an exception in any check is reported
    as a failure rather than raised.
    """
    results: list[CheckResult] = []

    def run(name, fn):
        try:
            detail = fn()
            results.append(CheckResult(name, True, detail or ""))
        except Exception as exc:  # noqa: BLE001 - audit reports, never raises
            results.append(CheckResult(name, False, str(exc)))

    lat = enumerate_stable(inst, cap=cap)

    def check_laws():
        report = lattice_audit(lat)
        if not report.ok:
            raise AssertionError(f"lattice laws failed: {report.witnesses}")
        return f"{len(lat)} stable assignments"

    run("lattice-laws", check_laws)

    def check_extremes():
        xmin = worker_optimal(inst)
        xmin2 = worker_optimal_two_stage(inst)
        xmax = firm_optimal(inst)
        if xmin != lat.elements[lat.bottom]:
            raise AssertionError("capacity-reduction optimum differs from enumeration")
        if xmin2 != xmin:
            raise AssertionError("two-stage optimum differs from capacity reduction")
        if xmax != lat.elements[lat.top]:
            raise AssertionError("firm optimum differs from enumeration")
        return ""

    run("extremes", check_extremes)

    def check_successors():
        for x in lat.elements:
            rotated = {
                apply_rotation(inst, x, rot, 1)
                for rot in rotations_at(inst, x, verified=True)
            }
            if rotated != immediate_successors(lat, x):
                raise AssertionError(f"successor sets differ at {x}")
        return ""

    run("successors", check_successors)

    def check_route_bounds():
        route = full_route(inst)
        bound = route_length_bound(inst)
        if len(route) > bound:
            raise AssertionError(f"route length {len(route)} exceeds {bound}")
        if inst.gapless:
            rotations = [s.rotation for s in route.steps]
            if len(set(rotations)) != len(rotations):
                raise AssertionError("gapless instance repeated a rotation")
            m, w, f = len(inst.edges), len(inst.workers), len(inst.firms)
            if len(route) >= 4 * m * m * w * f:
                raise AssertionError("gapless route length bound violated")
        return f"route length {len(route)}"

    run("route-bounds", check_route_bounds)

    def check_poset():
        poset = build_poset(inst)
        decoded = [from_closed_function(inst, poset, v) for v in closed_functions(poset)]
        if len(set(decoded)) != len(decoded):
            raise AssertionError("closed functions decoded to duplicate points")
        if set(decoded) != set(lat.elements):
            raise AssertionError("closed functions do not match the stable set")
        for x in lat.elements:
            if from_closed_function(inst, poset, to_closed_function(inst, poset, x)) != x:
                raise AssertionError(f"coordinate round-trip failed at {x}")
        return f"{len(poset)} poset elements"

    run("poset-bijection", check_poset)

    def check_pi():
        xmin, xmax = lat.elements[lat.bottom], lat.elements[lat.top]
        if xmin == xmax:
            return "single stable assignment"
        seen = None
        for seed in range(route_seeds):
            route = route_between(inst, xmin, xmax, "randomized", random.Random(seed))
            bag = rotation_multiset(route)
            if seen is None:
                seen = bag
            elif bag != seen:
                raise AssertionError(f"route multiset differs at seed {seed}")
        return ""

    run("route-invariance", check_pi)

    def check_mincost():
        poset = build_poset(inst)
        rng = random.Random(20_000)
        for _ in range(cost_trials):
            costs = tuple(rng.randint(-10, 10) for _ in inst.edges)
            _, cost = min_cost_stable(inst, costs, poset)
            best = min(
                sum(c * v for c, v in zip(costs, y)) for y in lat.elements
            )
            if cost != best:
                raise AssertionError(f"cost {cost} vs brute-force {best} for {costs}")
        return f"{cost_trials} cost vectors"

    run("min-cost", check_mincost)

    if inst.gapless:

        def check_weights():
            route = full_route(inst)
            x = route.start
            for step in route.steps:
                linear = max_weight_linear(inst, x, step.rotation)
                fast, probes = binary_weight_probes(inst, x, step.rotation)
                if linear != fast:
                    raise AssertionError(f"weight search split: {linear} vs {fast}")
                x = apply_rotation(inst, x, step.rotation, step.weight)
            return ""

        run("weight-search", check_weights)

    return results
