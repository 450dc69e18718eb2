from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stablelattice.choice import (
    BalancedTripleChoice,
    QuotaOrderChoice,
    TableChoice,
    check_axioms,
    check_gapless,
    closure,
    join,
    local_join_meet,
    revealed_prefers,
)
from stablelattice.errors import CapExceeded, InvalidInstance, InvariantViolation

from conftest import materialize


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def test_quota_order_overflow_fills_greedily():
    cf = QuotaOrderChoice(caps=(2, 2), priority=(0, 1), quota=2)
    assert cf.evaluate((2, 2)) == (2, 0)
    assert cf.evaluate((1, 2)) == (1, 1)


def test_quota_order_within_quota_keeps_everything():
    cf = QuotaOrderChoice(caps=(2, 2), priority=(0, 1), quota=5)
    assert cf.evaluate((2, 2)) == (2, 2)


def test_quota_order_partial_fill_on_overflow_edge():
    # quota 3 with priority e0 > e1 > e2: e1 only partly kept
    cf = QuotaOrderChoice(caps=(2, 3, 1), priority=(0, 1, 2), quota=3)
    assert cf.evaluate((2, 3, 1)) == (2, 1, 0)


def test_balanced_triple_splits_remainder_evenly():
    cf = BalancedTripleChoice(caps=(2, 1, 1), anchor=0, left=1, right=2, quota=2)
    assert cf.evaluate((1, 1, 1)) == (1, 1, 0)  # remainder 1 goes left
    assert cf.evaluate((2, 1, 1)) == (2, 0, 0)  # anchor eats the whole quota
    assert cf.evaluate((1, 1, 0)) == (1, 1, 0)  # within quota


def test_balanced_triple_caps_bind():
    cf = BalancedTripleChoice(caps=(4, 2, 2), anchor=0, left=1, right=2, quota=4)
    # remainder 3, left value caps at 1: forced split (1, 2)
    assert cf.evaluate((1, 1, 2)) == (1, 1, 2)  # size 4, within quota
    assert cf.evaluate((1, 1, 2)) == (1, 1, 2)
    assert cf.evaluate((2, 1, 2)) == (2, 1, 1)
    assert cf.evaluate((0, 1, 2)) == (0, 1, 2)


def test_balanced_triple_rejects_odd_quota_or_wide_anchor():
    with pytest.raises(InvalidInstance):
        BalancedTripleChoice(caps=(2, 1, 1), anchor=0, left=1, right=2, quota=3)
    with pytest.raises(InvalidInstance):
        BalancedTripleChoice(caps=(4, 1, 1), anchor=0, left=1, right=2, quota=2)


def test_table_requires_full_domain_and_majorization():
    with pytest.raises(InvalidInstance):
        TableChoice((1,), {(0,): (0,)})  # missing (1,)
    with pytest.raises(InvalidInstance):
        TableChoice((1,), {(0,): (0,), (1,): (2,)})  # image above input


def test_evaluate_outside_box_raises():
    cf = QuotaOrderChoice(caps=(1,), priority=(0,), quota=1)
    with pytest.raises(ValueError):
        cf.evaluate((2,))


# ---------------------------------------------------------------------------
# axioms
# ---------------------------------------------------------------------------

def test_quota_order_passes_core_axioms():
    cf = QuotaOrderChoice(caps=(2, 2, 1), priority=(1, 0, 2), quota=3)
    report = check_axioms(cf)
    assert report.consistency
    assert report.substitutability
    assert report.quota_filling
    assert report.size_monotonicity
    assert report.stationarity


def test_balanced_triple_passes_substitutability_and_quota_filling():
    for p in (1, 2):
        cf = BalancedTripleChoice(
            caps=(2 * p, p, p), anchor=0, left=1, right=2, quota=2 * p
        )
        report = check_axioms(cf)
        assert report.substitutability
        assert report.quota_filling
        # quota filling is a special case of size monotonicity, and together
        # with substitutability it forces consistency
        assert report.size_monotonicity
        assert report.consistency


def test_broken_table_fails_size_monotonicity_with_counterexample():
    table = {(0,): (0,), (1,): (1,), (2,): (0,)}
    report = check_axioms(TableChoice((2,), table))
    assert not report.size_monotonicity
    assert report.counterexamples["size_monotonicity"] == ((2,), (1,))
    assert not report.consistency  # same rows break consistency too
    assert report.quota_filling is None  # tables carry no quota


def test_axiom_pair_cap_enforced():
    cf = QuotaOrderChoice(caps=(9, 9, 9), priority=(0, 1, 2), quota=5)
    with pytest.raises(CapExceeded):
        check_axioms(cf, pair_cap=100)


@settings(max_examples=40, deadline=None)
@given(
    caps=st.lists(st.integers(1, 3), min_size=1, max_size=3),
    quota=st.integers(0, 6),
    seed=st.integers(0, 10**6),
)
def test_random_quota_order_always_passes_axioms(caps, quota, seed):
    import random

    order = list(range(len(caps)))
    random.Random(seed).shuffle(order)
    report = check_axioms(QuotaOrderChoice(tuple(caps), tuple(order), quota))
    assert report.all_passed


@settings(max_examples=20, deadline=None)
@given(p=st.integers(1, 2), roles=st.permutations([0, 1, 2]))
def test_random_balanced_triples_pass_axioms(p, roles):
    anchor, left, right = roles
    caps = [0, 0, 0]
    caps[anchor] = 2 * p
    caps[left] = p
    caps[right] = p
    cf = BalancedTripleChoice(tuple(caps), anchor, left, right, 2 * p)
    report = check_axioms(cf)
    assert report.substitutability and report.quota_filling


def test_quota_order_is_gapless_but_balanced_triple_is_not():
    assert check_gapless(QuotaOrderChoice((2, 2), (0, 1), 2))
    # the balanced rule alternates which side edge a probe displaces as the
    # anchor grows, which is exactly the forbidden flip
    cf = BalancedTripleChoice(caps=(4, 2, 2), anchor=0, left=1, right=2, quota=4)
    assert not check_gapless(cf)


# ---------------------------------------------------------------------------
# revealed preference, closure, join/meet
# ---------------------------------------------------------------------------

def test_revealed_preference_on_marriage_firm():
    # firm with priority second-edge-first and quota 1
    cf = QuotaOrderChoice(caps=(1, 1), priority=(1, 0), quota=1)
    held, rival = (1, 0), (0, 1)
    assert revealed_prefers(cf, rival, held)
    assert not revealed_prefers(cf, held, rival)


def test_revealed_preference_dominated_input_is_trivial():
    cf = QuotaOrderChoice(caps=(2, 2), priority=(0, 1), quota=4)
    assert revealed_prefers(cf, (2, 1), (1, 1))


def test_revealed_preference_rejects_equal_or_unacceptable():
    cf = QuotaOrderChoice(caps=(2,), priority=(0,), quota=1)
    with pytest.raises(ValueError):
        revealed_prefers(cf, (1,), (1,))
    with pytest.raises(ValueError):
        revealed_prefers(cf, (2,), (1,))  # (2,) not acceptable


def test_closure_single_edge_cases():
    assert closure(QuotaOrderChoice((2,), (0,), 2), (1,)) == (1,)
    assert closure(QuotaOrderChoice((2,), (0,), 1), (1,)) == (2,)


def test_closure_at_capacity_is_identity():
    cf = QuotaOrderChoice((2, 1), (0, 1), 3)
    assert closure(cf, (2, 1)) == (2, 1)


def test_closure_dominates_exactly_the_preimage():
    cf = materialize(QuotaOrderChoice((2, 2, 1), (2, 0, 1), 2))
    for z in cf.box():
        if cf.evaluate(z) != z:
            continue
        bar = closure(cf, z)
        preimage = [y for y in cf.box() if cf.evaluate(y) == z]
        assert all(all(a <= b for a, b in zip(y, bar)) for y in preimage)
        assert bar in preimage


def test_closure_cross_check_catches_invalid_tables():
    # each coordinate of (0,0) pushes to 1 alone, but the corner (1,1)
    # maps elsewhere: the preimage is not an interval, so the closure's
    # verification evaluation must flag the table
    table = {(0, 0): (0, 0), (1, 0): (0, 0), (0, 1): (0, 0), (1, 1): (1, 1)}
    cf = TableChoice((1, 1), table)
    with pytest.raises(InvariantViolation):
        closure(cf, (0, 0))


def test_local_join_meet_identities():
    cf = QuotaOrderChoice((1, 1), (1, 0), 1)
    a, b = (1, 0), (0, 1)
    jn, mt = local_join_meet(cf, a, b)
    assert jn == (0, 1)  # the preferred edge wins the join
    assert mt == (1, 0)
    assert local_join_meet(cf, a, a) == (a, a)


def test_local_join_meet_comparable_pair():
    cf = QuotaOrderChoice((2, 2), (0, 1), 4)
    low, high = (1, 0), (2, 1)
    assert local_join_meet(cf, low, high) == (high, low)


def _acceptables(cf):
    return [z for z in cf.box() if cf.evaluate(z) == z]


def test_revealed_preference_is_transitive_on_small_boxes():
    cf = QuotaOrderChoice((2, 1, 1), (1, 2, 0), 2)
    acc = _acceptables(cf)
    for a, b, c in itertools.permutations(acc, 3):
        if revealed_prefers(cf, b, a) and revealed_prefers(cf, c, b):
            assert revealed_prefers(cf, c, a)


def test_join_meet_absorption_on_acceptable_pairs():
    cf = QuotaOrderChoice((1, 1, 1), (2, 0, 1), 2)
    acc = _acceptables(cf)
    for a, b in itertools.product(acc, repeat=2):
        jn, mt = local_join_meet(cf, a, b)
        assert jn in acc and mt in acc
        # absorption: a join (a meet b) == a == a meet (a join b)
        assert local_join_meet(cf, a, mt)[0] == a
        assert local_join_meet(cf, a, jn)[1] == a


def test_substitutability_plus_monotonicity_imply_consistency_on_tables():
    # scan a family of materialized tables: whenever A2 and A3 hold, A1 does
    for quota in (1, 2, 3):
        for priority in itertools.permutations(range(3)):
            cf = materialize(QuotaOrderChoice((1, 2, 1), tuple(priority), quota))
            report = check_axioms(cf)
            if report.substitutability and report.size_monotonicity:
                assert report.consistency
