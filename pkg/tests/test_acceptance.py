"""Acceptance suite: exact end-to-end checks with one report line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the pass lines
and timings.
"""

from __future__ import annotations

import random
import time

import pytest

from stablelattice.choice import BalancedTripleChoice, QuotaOrderChoice, TableChoice, check_axioms
from stablelattice.fixtures import fixture_instance
from stablelattice.mincost import min_cost_stable
from stablelattice.model import is_stable
from stablelattice.oracle import enumerate_stable, immediate_successors, lattice_audit
from stablelattice.poset import (
    build_poset,
    closed_functions,
    from_closed_function,
    to_closed_function,
)
from stablelattice.rotations import (
    apply_rotation,
    binary_weight_probes,
    max_weight_linear,
    rotations_at,
)
from stablelattice.routes import (
    full_route,
    rotation_multiset,
    route_between,
    route_length_bound,
    worker_optimal,
    worker_optimal_two_stage,
)

RANDOM_SEEDS = range(50)
RANDOM_BOX_LIMIT = 10**5


def _report(criterion: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"PASS {criterion}{suffix}")


@pytest.fixture(scope="module")
def corpus():
    """Criterion-2 instance corpus with lattices and posets precomputed."""
    instances = [
        ("single-edge", fixture_instance("single-edge")),
        ("marriage-2x2", fixture_instance("marriage-2x2")),
        ("triangle-1", fixture_instance("triangle-p", p=1)),
        ("triangle-2", fixture_instance("triangle-p", p=2)),
    ]
    for seed in RANDOM_SEEDS:
        instances.append(
            (
                f"random-{seed}",
                fixture_instance(
                    "random-linear", seed=seed, box_limit=RANDOM_BOX_LIMIT
                ),
            )
        )
    started = time.monotonic()
    out = []
    for name, inst in instances:
        assert inst.box_size() <= RANDOM_BOX_LIMIT or name.startswith("triangle")
        out.append((name, inst, enumerate_stable(inst), build_poset(inst)))
    return out, time.monotonic() - started


def test_criterion_1_triangle_goldens():
    """Two rotations, unique alternating full route, chain poset, q+1 points."""
    for p in (1, 2, 4):
        started = time.monotonic()
        q = 2 * p
        inst = fixture_instance("triangle-p", p=p)
        route = full_route(inst)
        assert len(route) == q
        rotations = [s.rotation for s in route.steps]
        assert len(set(rotations)) == 2
        assert rotations[0::2] == [rotations[0]] * p
        assert rotations[1::2] == [rotations[1]] * p
        assert all(s.weight == 1 for s in route.steps)
        # uniqueness of the full route: one applicable rotation at each point
        for point in route.points[:-1]:
            assert len(rotations_at(inst, point, verified=True)) == 1
        poset = build_poset(inst)
        assert len(poset) == q
        assert poset.covers == frozenset((i, i + 1) for i in range(q - 1))
        values = list(closed_functions(poset))
        assert len(values) == q + 1
        decoded = {from_closed_function(inst, poset, v) for v in values}
        assert len(decoded) == q + 1
        assert all(is_stable(inst, x) for x in decoded)
        if p <= 2:
            lat = enumerate_stable(inst)
            assert decoded == set(lat.elements)
        elapsed = time.monotonic() - started
        assert elapsed < 5.0
        _report(f"criterion 1 p={p}", f"{elapsed:.2f}s, {q + 1} stable assignments")


def test_criterion_2_poset_lattice_isomorphism(corpus):
    """Closed functions decode exactly onto the enumerated stable set."""
    instances, build_time = corpus
    started = time.monotonic()
    for name, inst, lat, poset in instances:
        values = list(closed_functions(poset))
        decoded = [from_closed_function(inst, poset, v) for v in values]
        assert len(decoded) == len(set(decoded)), name
        assert set(decoded) == set(lat.elements), name
        for v, x in zip(values, decoded):
            assert to_closed_function(inst, poset, x) == v, name
        for x in lat.elements:
            v = to_closed_function(inst, poset, x)
            assert from_closed_function(inst, poset, v) == x, name
    elapsed = build_time + time.monotonic() - started
    assert elapsed < 60.0
    _report("criterion 2", f"{len(instances)} instances, {elapsed:.1f}s incl. setup")


def test_criterion_3_successor_equivalence(corpus):
    """Unit rotation shifts are exactly the lattice covers, everywhere."""
    instances = corpus[0]
    for name, inst, lat, _ in instances:
        for x in lat.elements:
            shifted = {
                apply_rotation(inst, x, rot, 1)
                for rot in rotations_at(inst, x, verified=True)
            }
            assert shifted == immediate_successors(lat, x), name
    _report("criterion 3", f"{sum(len(lat) for _, _, lat, _ in instances)} points checked")


def test_criterion_4_lattice_laws(corpus):
    for name, inst, lat, _ in corpus[0]:
        report = lattice_audit(lat)
        assert report.ok, (name, report.witnesses)
    _report("criterion 4")


def test_criterion_5_route_invariance(corpus):
    for name, inst, lat, _ in corpus[0]:
        lo, hi = lat.elements[lat.bottom], lat.elements[lat.top]
        if lo == hi:
            continue
        bags = [
            rotation_multiset(
                route_between(inst, lo, hi, "randomized", random.Random(seed))
            )
            for seed in range(5)
        ]
        assert all(bag == bags[0] for bag in bags), name
    _report("criterion 5", "5 randomized routes per instance")


def test_criterion_6_worker_optimum_cross_method(corpus):
    for name, inst, lat, _ in corpus[0]:
        bottom = lat.elements[lat.bottom]
        assert worker_optimal(inst) == bottom, name
        assert worker_optimal_two_stage(inst) == bottom, name
    _report("criterion 6")


def test_criterion_7_route_length_bounds(corpus):
    checked = 0
    for name, inst, _, _ in corpus[0]:
        route = full_route(inst)
        assert len(route) <= route_length_bound(inst), name
        if inst.gapless:
            rotations = [s.rotation for s in route.steps]
            assert len(set(rotations)) == len(rotations), name
            m, nw, nf = len(inst.edges), len(inst.workers), len(inst.firms)
            assert len(route) < 4 * m * m * nw * nf, name
            checked += 1
    for p in (1, 2, 4):
        inst = fixture_instance("triangle-p", p=p)
        assert len(full_route(inst)) <= route_length_bound(inst)
    _report("criterion 7", f"{checked} gapless instances")


def test_criterion_8_weight_search_agreement():
    started = time.monotonic()
    fixtures = [
        fixture_instance("single-edge"),
        fixture_instance("marriage-2x2"),
        fixture_instance("marriage-2x2", capacity=2**5),
        fixture_instance("marriage-2x2", capacity=2**10),
    ] + [
        fixture_instance("random-linear", seed=s, box_limit=RANDOM_BOX_LIMIT)
        for s in range(10)
    ]
    pairs = 0
    for inst in fixtures:
        assert inst.gapless
        route = full_route(inst)
        x = route.start
        for step in route.steps:
            linear = max_weight_linear(inst, x, step.rotation)
            fast, probes = binary_weight_probes(inst, x, step.rotation)
            assert linear == fast == step.weight
            assert probes <= 11
            x = apply_rotation(inst, x, step.rotation, step.weight)
            pairs += 1
    elapsed = time.monotonic() - started
    assert elapsed < 10.0
    _report("criterion 8", f"{pairs} weight pairs, {elapsed:.1f}s")


def test_criterion_9_min_cost_optimality(corpus):
    trials = 0
    for name, inst, lat, poset in corpus[0]:
        rng = random.Random(90_000 + hash(name) % 1000)
        for _ in range(20):
            costs = tuple(rng.randint(-10, 10) for _ in inst.edges)
            _, cost = min_cost_stable(inst, costs, poset)
            best = min(sum(c * v for c, v in zip(costs, y)) for y in lat.elements)
            assert cost == best, (name, costs)
            trials += 1
    _report("criterion 9", f"{trials} cost vectors")


def test_criterion_10_axiom_suites(corpus):
    quota_order = balanced = 0
    for name, inst, _, _ in corpus[0]:
        for v, cf in inst.cf.items():
            if cf.box_size() > 10**5:
                continue
            report = check_axioms(cf)
            if isinstance(cf, QuotaOrderChoice):
                assert report.consistency, (name, v)
                assert report.substitutability, (name, v)
                assert report.quota_filling, (name, v)
                quota_order += 1
            elif isinstance(cf, BalancedTripleChoice):
                assert report.substitutability, (name, v)
                assert report.quota_filling, (name, v)
                balanced += 1
    for p in (1, 2, 4):
        inst = fixture_instance("triangle-p", p=p)
        for v, cf in inst.cf.items():
            assert cf.box_size() <= 10**5
            report = check_axioms(cf)
            assert report.substitutability and report.quota_filling, (p, v)
            if isinstance(cf, BalancedTripleChoice):
                balanced += 1
            else:
                quota_order += 1
    broken = TableChoice((2,), {(0,): (0,), (1,): (1,), (2,): (0,)})
    report = check_axioms(broken)
    assert not report.size_monotonicity
    assert report.counterexamples["size_monotonicity"] == ((2,), (1,))
    _report(
        "criterion 10",
        f"{quota_order} priority rules, {balanced} balanced rules, 1 broken table",
    )
