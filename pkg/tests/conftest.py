from __future__ import annotations

import pytest

from stablelattice.choice import TableChoice
from stablelattice.fixtures import fixture_instance


@pytest.fixture
def single_edge():
    return fixture_instance("single-edge")


@pytest.fixture
def marriage():
    return fixture_instance("marriage-2x2")


@pytest.fixture
def triangle1():
    return fixture_instance("triangle-p", p=1)


@pytest.fixture
def triangle2():
    return fixture_instance("triangle-p", p=2)


def materialize(cf) -> TableChoice:
    """Freeze any choice function into an explicit table over its box."""
    return TableChoice(cf.caps, {z: cf.evaluate(z) for z in cf.box()})


def tabled(inst):
    """Clone an instance with every choice function frozen into a table."""
    from stablelattice.model import Instance, TableSpec

    specs = {}
    for v, cf in inst.cf.items():
        specs[v] = TableSpec(tuple((z, cf.evaluate(z)) for z in cf.box()))
    return Instance(
        inst.workers,
        inst.firms,
        [(e.worker, e.firm, e.cap) for e in inst.edges],
        specs,
        gapless=inst.gapless,
    )


def vec(inst, **by_id):
    """Build a global vector from edge ids written as w1_f1=2 keywords."""
    out = [0] * len(inst.edges)
    for key, val in by_id.items():
        w, f = key.split("_")
        out[inst.edge_index[(w, f)]] = val
    return tuple(out)


def bridged_squares():
    """Connected market whose poset is a two-element antichain.

    Two preference squares on disjoint vertex sets, joined by one inert
    edge (ranked last on both ends).  Each square contributes one
    rotation; the two are simultaneously applicable and incomparable,
    so the stable set is a four-element Boolean lattice.  This is the
    smallest shape priority-order rules allow: at a stable point every
    firm-wanted edge at a worker sits below all its held units, so all
    drops at one worker share one trade partner and a worker (or firm)
    can host only one rotation at a time -- an antichain therefore
    needs four workers and four firms.
    """
    from stablelattice.model import Instance, QuotaOrderSpec

    edges, cfs = [], {}
    for (wa, wb, fa, fb) in (("w1", "w2", "f1", "f2"), ("w3", "w4", "g1", "g2")):
        e11, e12, e21, e22 = (wa, fa), (wa, fb), (wb, fa), (wb, fb)
        edges += [(*e11, 1), (*e12, 1), (*e21, 1), (*e22, 1)]
        cfs[wb] = QuotaOrderSpec(1, (e22, e21))
        cfs[fb] = QuotaOrderSpec(1, (e12, e22))
    edges.append(("w1", "g1", 1))
    cfs["w1"] = QuotaOrderSpec(1, (("w1", "f1"), ("w1", "f2"), ("w1", "g1")))
    cfs["w3"] = QuotaOrderSpec(1, (("w3", "g1"), ("w3", "g2")))
    cfs["f1"] = QuotaOrderSpec(1, (("w2", "f1"), ("w1", "f1")))
    cfs["g1"] = QuotaOrderSpec(1, (("w4", "g1"), ("w3", "g1"), ("w1", "g1")))
    return Instance(
        ["w1", "w2", "w3", "w4"], ["f1", "f2", "g1", "g2"], edges, cfs, gapless=True
    )


def triangle_point(inst, p: int, k: int):
    """The k-th assignment on the triangle fixture's stable chain."""
    out = [0] * len(inst.edges)
    for i in (1, 2, 3):
        a = inst.edge_index[(f"w{i}", f"f{i}")]
        c = inst.edge_index[(f"w{i}", f"f{i % 3 + 1}")]
        d = inst.edge_index[(f"w{i}", f"f{(i - 2) % 3 + 1}")]
        out[a] = k
        if k % 2 == 0:
            out[c] = p - k // 2
            out[d] = p - k // 2
        else:
            out[c] = p - (k - 1) // 2
            out[d] = p - (k + 1) // 2
    return tuple(out)
