"""Plain-text instance files and vector formatting.

The format is line-based and hand-authorable::

    format 1
    worker w1
    firm f1
    edge w1 f1 2
    cf w1 linear quota=2 order=w1:f1,w1:f2
    cf f1 balance quota=2 anchor=w1:f1 left=w3:f1 right=w2:f1
    cf f2 table
    0,0 -> 0,0
    ...
    cost w1 f1 3
    gapless true

Edges are identified as ``worker:firm``.  Table rows list local vectors
in the vertex's edge enumeration order (ascending edge declaration).
Assignment vectors render as ``edge=value`` tokens sorted by edge id.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Optional

from .choice import BalancedTripleChoice, QuotaOrderChoice, TableChoice, check_axioms
from .errors import InvalidInstance, ParseError
from .model import (
    BalanceSpec,
    ChoiceSpec,
    Instance,
    QuotaOrderSpec,
    TableSpec,
    Vector,
)

FORMAT_VERSION = "1"


def _split_edge_id(token: str, line: int) -> tuple[str, str]:
    if token.count(":") != 1:
        raise ParseError(line, f"edge id {token!r} must be worker:firm")
    w, f = token.split(":")
    if not w or not f:
        raise ParseError(line, f"edge id {token!r} must be worker:firm")
    return w, f


def _parse_kv(token: str, key: str, line: int) -> str:
    prefix = key + "="
    if not token.startswith(prefix):
        raise ParseError(line, f"expected {key}=..., got {token!r}")
    return token[len(prefix):]


def _parse_tuple(text: str, line: int) -> Vector:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ParseError(line, f"bad integer tuple {text!r}") from None


def parse_instance(text: str, skip_axiom_check: bool = False) -> Instance:
    """Parse and validate an instance file.

    Table choice functions are axiom-checked at load unless
    ``skip_axiom_check`` is set; a violation is a load error carrying
    the counterexample.
    """
    workers: list[str] = []
    firms: list[str] = []
    edges: list[tuple[str, str, int]] = []
    cf_specs: dict[str, ChoiceSpec] = {}
    costs: dict[tuple[str, str], int] = {}
    gapless = False
    saw_format = False
    table_target: Optional[str] = None
    table_rows: list[tuple[Vector, Vector]] = []
    table_line = 0

    def flush_table(line: int) -> None:
        nonlocal table_target, table_rows
        if table_target is None:
            return
        if not table_rows:
            raise ParseError(table_line, f"table for {table_target} has no rows")
        cf_specs[table_target] = TableSpec(tuple(table_rows))
        table_target = None
        table_rows = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if table_target is not None and "->" in stripped and stripped.split()[0] not in (
            "worker", "firm", "edge", "cf", "cost", "gapless", "format"
        ):
            left, _, right = stripped.partition("->")
            table_rows.append(
                (_parse_tuple(left.strip(), lineno), _parse_tuple(right.strip(), lineno))
            )
            continue
        flush_table(lineno)
        parts = stripped.split()
        kind = parts[0]
        if kind == "format":
            if len(parts) != 2 or parts[1] != FORMAT_VERSION:
                raise ParseError(lineno, f"unsupported format {stripped!r}")
            saw_format = True
        elif kind == "worker":
            if len(parts) != 2:
                raise ParseError(lineno, "worker lines are 'worker <id>'")
            _check_vertex_id(parts[1], lineno)
            workers.append(parts[1])
        elif kind == "firm":
            if len(parts) != 2:
                raise ParseError(lineno, "firm lines are 'firm <id>'")
            _check_vertex_id(parts[1], lineno)
            firms.append(parts[1])
        elif kind == "edge":
            if len(parts) != 4:
                raise ParseError(lineno, "edge lines are 'edge <worker> <firm> <cap>'")
            try:
                cap = int(parts[3])
            except ValueError:
                raise ParseError(lineno, f"bad capacity {parts[3]!r}") from None
            edges.append((parts[1], parts[2], cap))
        elif kind == "cf":
            if len(parts) < 3:
                raise ParseError(lineno, "cf lines are 'cf <vertex> <kind> ...'")
            vertex, cf_kind = parts[1], parts[2]
            if cf_kind == "linear":
                if len(parts) != 5:
                    raise ParseError(lineno, "linear cf needs quota=... order=...")
                quota = _int_arg(parts[3], "quota", lineno)
                order = tuple(
                    _split_edge_id(tok, lineno)
                    for tok in _parse_kv(parts[4], "order", lineno).split(",")
                )
                cf_specs[vertex] = QuotaOrderSpec(quota, order)
            elif cf_kind == "balance":
                if len(parts) != 7:
                    raise ParseError(
                        lineno, "balance cf needs quota= anchor= left= right="
                    )
                cf_specs[vertex] = BalanceSpec(
                    _int_arg(parts[3], "quota", lineno),
                    _split_edge_id(_parse_kv(parts[4], "anchor", lineno), lineno),
                    _split_edge_id(_parse_kv(parts[5], "left", lineno), lineno),
                    _split_edge_id(_parse_kv(parts[6], "right", lineno), lineno),
                )
            elif cf_kind == "table":
                if len(parts) != 3:
                    raise ParseError(lineno, "table cf lines are 'cf <vertex> table'")
                table_target = vertex
                table_line = lineno
            else:
                raise ParseError(lineno, f"unknown cf kind {cf_kind!r}")
        elif kind == "cost":
            if len(parts) != 4:
                raise ParseError(lineno, "cost lines are 'cost <worker> <firm> <value>'")
            try:
                costs[(parts[1], parts[2])] = int(parts[3])
            except ValueError:
                raise ParseError(lineno, f"bad cost {parts[3]!r}") from None
        elif kind == "gapless":
            if len(parts) != 2 or parts[1] not in ("true", "false"):
                raise ParseError(lineno, "gapless lines are 'gapless true|false'")
            gapless = parts[1] == "true"
        else:
            raise ParseError(lineno, f"unknown directive {kind!r}")
    flush_table(len(text.splitlines()) + 1)
    if not saw_format:
        raise ParseError(1, "missing 'format 1' header")
    try:
        inst = Instance(
            workers, firms, edges, cf_specs, gapless=gapless, costs=costs or None
        )
    except InvalidInstance as exc:
        raise ParseError(0, str(exc)) from exc

    if not skip_axiom_check:
        for v, cf in inst.cf.items():
            if isinstance(cf, TableChoice):
                report = check_axioms(cf)
                if not report.all_passed:
                    failed = [k for k in report.counterexamples]
                    raise ParseError(
                        0,
                        f"table cf at {v} violates {', '.join(failed)}; "
                        f"counterexamples {report.counterexamples}",
                    )
    return inst


def _check_vertex_id(name: str, line: int) -> None:
    if any(ch in name for ch in ":=,#") or not name:
        raise ParseError(line, f"vertex id {name!r} may not contain ':' '=' ',' '#'")


def _int_arg(token: str, key: str, line: int) -> int:
    try:
        return int(_parse_kv(token, key, line))
    except ValueError:
        raise ParseError(line, f"bad integer in {token!r}") from None


def serialize_instance(inst: Instance) -> str:
    """Render an instance back into the text format (round-trip stable)."""
    lines = [f"format {FORMAT_VERSION}"]
    for w in inst.workers:
        lines.append(f"worker {w}")
    for f in inst.firms:
        lines.append(f"firm {f}")
    for e in inst.edges:
        lines.append(f"edge {e.worker} {e.firm} {e.cap}")
    for v in list(inst.workers) + list(inst.firms):
        if v not in inst.cf:
            continue
        cf = inst.cf[v]
        ids = [inst.edges[e].id for e in inst.incident[v]]
        if isinstance(cf, QuotaOrderChoice):
            order = ",".join(ids[p] for p in cf.priority)
            lines.append(f"cf {v} linear quota={cf.quota} order={order}")
        elif isinstance(cf, BalancedTripleChoice):
            lines.append(
                f"cf {v} balance quota={cf.quota} anchor={ids[cf.anchor]} "
                f"left={ids[cf.left]} right={ids[cf.right]}"
            )
        elif isinstance(cf, TableChoice):
            lines.append(f"cf {v} table")
            for z in itertools.product(*(range(c + 1) for c in cf.caps)):
                cz = cf.table[z]
                lines.append(
                    f"{','.join(map(str, z))} -> {','.join(map(str, cz))}"
                )
    if inst.costs is not None:
        for e in inst.edges:
            lines.append(f"cost {e.worker} {e.firm} {inst.costs[e.index]}")
    if inst.gapless:
        lines.append("gapless true")
    return "\n".join(lines) + "\n"


def format_vector(inst: Instance, x: Vector) -> str:
    """``edge=value`` tokens, space separated, sorted by edge id."""
    inst.require_in_box(x)
    pairs = sorted((inst.edges[e].id, x[e]) for e in range(len(inst.edges)))
    return " ".join(f"{eid}={val}" for eid, val in pairs)


def parse_vector(inst: Instance, tokens: Iterable[str] | str) -> Vector:
    """Parse ``edge=value`` tokens; unmentioned edges default to zero."""
    if isinstance(tokens, str):
        tokens = tokens.split()
    out = [0] * len(inst.edges)
    for tok in tokens:
        if "=" not in tok:
            raise ValueError(f"vector token {tok!r} is not edge=value")
        eid, _, val = tok.partition("=")
        w, _, f = eid.partition(":")
        if (w, f) not in inst.edge_index:
            raise ValueError(f"unknown edge {eid!r}")
        try:
            out[inst.edge_index[(w, f)]] = int(val)
        except ValueError:
            raise ValueError(f"bad value in token {tok!r}") from None
    return tuple(out)
