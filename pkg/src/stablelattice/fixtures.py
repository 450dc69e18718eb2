"""Deterministic fixture generators, emitted in the instance file format."""

from __future__ import annotations

import random

from .errors import InvalidInstance
from .fileio import parse_instance
from .model import Instance


def single_edge(cap: int = 2, quota: int | None = None) -> str:
    """One worker, one firm, one edge; quotas default to the capacity."""
    q = cap if quota is None else quota
    return "\n".join(
        [
            "format 1",
            "worker w",
            "firm f",
            f"edge w f {cap}",
            f"cf w linear quota={q} order=w:f",
            f"cf f linear quota={q} order=w:f",
            "gapless true",
        ]
    ) + "\n"


def marriage_2x2(capacity: int = 1) -> str:
    """The classic two-stable-matchings square, optionally capacity-scaled.

    Workers prefer the diagonal, firms the off-diagonal, so the worker
    optimum and the firm optimum differ and one rotation of weight
    ``capacity`` connects them.
    """
    c = capacity
    return "\n".join(
        [
            "format 1",
            "worker w1",
            "worker w2",
            "firm f1",
            "firm f2",
            f"edge w1 f1 {c}",
            f"edge w1 f2 {c}",
            f"edge w2 f1 {c}",
            f"edge w2 f2 {c}",
            f"cf w1 linear quota={c} order=w1:f1,w1:f2",
            f"cf w2 linear quota={c} order=w2:f2,w2:f1",
            f"cf f1 linear quota={c} order=w2:f1,w1:f1",
            f"cf f2 linear quota={c} order=w1:f2,w2:f2",
            "gapless true",
        ]
    ) + "\n"


def triangle(p: int = 1) -> str:
    """Three workers, three firms, a big poset from a small graph.

    Vertical edges carry capacity q = 2p, the slanted ones p; workers
    rank their edges c > d > a with quota q, and each firm keeps its
    vertical edge in full while balancing the two slanted ones.  The
    stable set is a chain of q + 1 assignments climbed by two
    alternating rotations, so the representation grows with p on a
    fixed graph.
    """
    if p < 1:
        raise InvalidInstance("triangle parameter must be a positive integer")
    q = 2 * p
    lines = ["format 1"]
    lines += [f"worker w{i}" for i in (1, 2, 3)]
    lines += [f"firm f{i}" for i in (1, 2, 3)]

    def a(i: int) -> str:
        return f"w{i}:f{i}"

    def cc(i: int) -> str:  # worker i's edge to the next firm
        return f"w{i}:f{i % 3 + 1}"

    def dd(i: int) -> str:  # worker i's edge to the previous firm
        return f"w{i}:f{(i - 2) % 3 + 1}"

    for i in (1, 2, 3):
        lines.append(f"edge {a(i).replace(':', ' ')} {q}")
        lines.append(f"edge {cc(i).replace(':', ' ')} {p}")
        lines.append(f"edge {dd(i).replace(':', ' ')} {p}")
    for i in (1, 2, 3):
        lines.append(f"cf w{i} linear quota={q} order={cc(i)},{dd(i)},{a(i)}")
    for i in (1, 2, 3):
        left = cc((i - 2) % 3 + 1)   # previous worker's edge into firm i
        right = dd(i % 3 + 1)        # next worker's edge into firm i
        lines.append(
            f"cf f{i} balance quota={q} anchor={a(i)} left={left} right={right}"
        )
    return "\n".join(lines) + "\n"


def random_linear(
    seed: int,
    workers: int = 3,
    firms: int = 3,
    bmax: int = 3,
    density: float = 1.0,
    opposition: float = 0.9,
    quota_span: tuple[float, float] = (0.45, 0.55),
    box_limit: int = 10**5,
) -> str:
    """A seeded random market with priority-order choice functions.

    Byte-identical output for equal arguments.  Quotas are drawn as a
    fraction of each vertex's total capacity (``quota_span``), and with
    probability ``opposition`` a firm ranks its edges the other way
    round from how their workers rank them; both knobs keep the markets
    competitive enough to carry several stable assignments.  Capacities
    are decremented (largest first) until the assignment box holds at
    most ``box_limit`` points.  The output is marked gapless
    (priority-order rules have no gaps).
    """
    rng = random.Random(seed)
    nw = rng.randint(2, max(2, workers))
    nf = rng.randint(2, max(2, firms))
    ws = [f"w{i + 1}" for i in range(nw)]
    fs = [f"f{j + 1}" for j in range(nf)]
    pairs = [(w, f) for w in ws for f in fs if rng.random() < density]
    for w in ws:
        if not any(p[0] == w for p in pairs):
            pairs.append((w, rng.choice(fs)))
    for f in fs:
        if not any(p[1] == f for p in pairs):
            pairs.append((rng.choice(ws), f))
    pairs.sort(key=lambda p: (ws.index(p[0]), fs.index(p[1])))
    caps = {p: rng.randint(1, bmax) for p in pairs}

    def box_size() -> int:
        size = 1
        for c in caps.values():
            size *= c + 1
        return size

    while box_size() > box_limit:
        widest = max(caps, key=lambda p: (caps[p], pairs.index(p)))
        caps[widest] -= 1

    def quota_for(incident) -> int:
        total = sum(caps[p] for p in incident)
        return min(total, max(1, round(total * rng.uniform(*quota_span))))

    lines = ["format 1"]
    lines += [f"worker {w}" for w in ws]
    lines += [f"firm {f}" for f in fs]
    lines += [f"edge {w} {f} {caps[(w, f)]}" for w, f in pairs]
    worker_rank: dict[tuple[str, str], int] = {}
    for w in ws:
        incident = [p for p in pairs if p[0] == w]
        order = incident[:]
        rng.shuffle(order)
        worker_rank.update({p: k for k, p in enumerate(order)})
        order_txt = ",".join(f"{a}:{b}" for a, b in order)
        lines.append(f"cf {w} linear quota={quota_for(incident)} order={order_txt}")
    for f in fs:
        incident = [p for p in pairs if p[1] == f]
        order = incident[:]
        if rng.random() < opposition:
            order.sort(key=lambda p: (-worker_rank[p], rng.random()))
        else:
            rng.shuffle(order)
        order_txt = ",".join(f"{a}:{b}" for a, b in order)
        lines.append(f"cf {f} linear quota={quota_for(incident)} order={order_txt}")
    lines.append("gapless true")
    return "\n".join(lines) + "\n"


_GENERATORS = {
    "single-edge": single_edge,
    "marriage-2x2": marriage_2x2,
    "triangle-p": triangle,
    "random-linear": random_linear,
}


def generate_fixture(name: str, **params) -> str:
    """Instance text for a named fixture; unknown names raise."""
    try:
        gen = _GENERATORS[name]
    except KeyError:
        raise InvalidInstance(
            f"unknown fixture {name!r}; choose from {sorted(_GENERATORS)}"
        ) from None
    return gen(**params)


def fixture_instance(name: str, **params) -> Instance:
    """Parsed form of :func:`generate_fixture`."""
    return parse_instance(generate_fixture(name, **params))
