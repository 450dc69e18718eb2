"""Command-line interface.

Subcommands operate on an instance file (path or '-' for stdin) and
print line-based text; DOT, DIMACS, and PNG artifacts are written to
files named by flags.  Exit codes: 0 success, 1 domain error, 2 usage.
"""

from __future__ import annotations

import argparse
import random
import sys
from typing import Optional

from .audit import cross_validate
from .choice import check_axioms
from .errors import CapExceeded, InvalidInstance, InvariantViolation
from .fileio import format_vector, parse_instance, parse_vector
from .fixtures import generate_fixture
from .mincost import build_closure_network, min_cost_stable, to_dimacs
from .model import Instance, stability_report
from .oracle import enumerate_stable, lattice_audit, lattice_dot
from .poset import build_poset, poset_dot, poset_text, rotation_ids
from .rotations import rotation_label
from .routes import firm_optimal, full_route, route_between, worker_optimal


def _load(path: str, skip_axiom_check: bool = False) -> Instance:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return parse_instance(text, skip_axiom_check=skip_axiom_check)


def _flag(value: Optional[bool]) -> str:
    return "skipped" if value is None else ("pass" if value else "fail")


def _cmd_check_axioms(args) -> int:
    inst = _load(args.instance, skip_axiom_check=True)
    failed = False
    for v in list(inst.workers) + list(inst.firms):
        if v not in inst.cf:
            continue
        report = check_axioms(inst.cf[v], pair_cap=args.pair_cap)
        line = (
            f"vertex {v} consistency={_flag(report.consistency)} "
            f"substitutability={_flag(report.substitutability)} "
            f"size-monotonicity={_flag(report.size_monotonicity)} "
            f"quota-filling={_flag(report.quota_filling)} "
            f"stationarity={_flag(report.stationarity)}"
        )
        if args.gapless:
            from .choice import check_gapless

            line += f" gapless={_flag(check_gapless(inst.cf[v], args.pair_cap))}"
        print(line)
        for axiom, witness in sorted(report.counterexamples.items()):
            print(f"counterexample {v} {axiom} {witness}")
        if not report.all_passed:
            failed = True
    return 1 if failed else 0


def _cmd_stable_check(args) -> int:
    inst = _load(args.instance)
    x = parse_vector(inst, args.values)
    report = stability_report(inst, x)
    print(f"acceptable {str(report.acceptable).lower()}")
    print(f"stable {str(report.stable).lower()}")
    blocking = " ".join(sorted(inst.edges[e].id for e in report.blocking))
    print(f"blocking {blocking}".rstrip())
    return 0


def _cmd_xmin(args) -> int:
    inst = _load(args.instance)
    if args.method == "ag":
        x = worker_optimal(inst)
    else:
        from .routes import worker_optimal_two_stage

        x = worker_optimal_two_stage(inst)
    print(format_vector(inst, x))
    return 0


def _cmd_xmax(args) -> int:
    inst = _load(args.instance)
    print(format_vector(inst, firm_optimal(inst)))
    return 0


def _print_route(inst: Instance, route) -> None:
    ids = {}
    for step in route.steps:
        if step.rotation not in ids:
            ids[step.rotation] = f"R{len(ids) + 1}"
            print(f"rotation {ids[step.rotation]} {rotation_label(inst, step.rotation)}")
    print(f"start {format_vector(inst, route.start)}")
    for k, step in enumerate(route.steps, start=1):
        print(f"step {k} {ids[step.rotation]} weight {step.weight}")
    print(f"end {format_vector(inst, route.end)}")


def _cmd_route(args) -> int:
    inst = _load(args.instance)
    rng = random.Random(args.seed) if args.seed is not None else None
    if args.between:
        x = parse_vector(inst, args.between[0])
        y = parse_vector(inst, args.between[1])
        policy = "randomized" if rng is not None else "maximal"
        route = route_between(inst, x, y, policy, rng)
    else:
        route = full_route(inst, rng)
    _print_route(inst, route)
    return 0


def _cmd_poset(args) -> int:
    inst = _load(args.instance)
    poset = build_poset(inst)
    text = poset_text(poset)
    if args.text:
        with open(args.text, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(poset_dot(poset) + "\n")
    if args.plot:
        from .plots import hasse_figure

        ids = rotation_ids(poset)
        labels = [
            f"{ids[el.rotation]}#{el.occurrence}\nw={el.weight}"
            for el in poset.elements
        ]
        hasse_figure(labels, sorted(poset.covers), args.plot, "rotation poset")
    sys.stdout.write(text)
    return 0


def _cmd_enumerate(args) -> int:
    inst = _load(args.instance)
    lat = enumerate_stable(inst, cap=args.cap)
    for x in lat.elements:
        print(format_vector(inst, x))
    report = lattice_audit(lat)
    print(f"count {len(lat)}")
    for law in (
        "closed_under_join_meet",
        "join_meet_match_order",
        "distributive",
        "polar",
        "unisize",
    ):
        print(f"audit {law.replace('_', '-')} {_flag(getattr(report, law))}")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(lattice_dot(lat) + "\n")
    if args.plot:
        from .plots import hasse_figure

        labels = [format_vector(inst, x).replace(" ", "\n") for x in lat.elements]
        hasse_figure(labels, sorted(lat.hasse), args.plot, "stable assignments")
    return 0 if report.ok else 1


def _cmd_mincost(args) -> int:
    inst = _load(args.instance)
    if args.costs:
        with open(args.costs, encoding="utf-8") as fh:
            costs = parse_vector(inst, fh.read())
    elif inst.costs is not None:
        costs = inst.costs
    else:
        costs = (0,) * len(inst.edges)
    poset = build_poset(inst)
    if args.dimacs:
        with open(args.dimacs, "w", encoding="utf-8") as fh:
            fh.write(to_dimacs(build_closure_network(poset, costs)))
    x, cost = min_cost_stable(inst, costs, poset)
    print(f"cost {cost}")
    print(format_vector(inst, x))
    return 0


def _cmd_audit(args) -> int:
    inst = _load(args.instance)
    results = cross_validate(inst, cap=args.cap, cost_trials=args.cost_trials)
    failed = False
    for res in results:
        suffix = f": {res.detail}" if res.detail else ""
        print(f"check {res.name} {'pass' if res.passed else 'fail'}{suffix}")
        failed = failed or not res.passed
    if args.plot_dir:
        import os

        from .plots import hasse_figure

        os.makedirs(args.plot_dir, exist_ok=True)
        poset = build_poset(inst)
        ids = rotation_ids(poset)
        hasse_figure(
            [f"{ids[el.rotation]}#{el.occurrence}\nw={el.weight}" for el in poset.elements],
            sorted(poset.covers),
            f"{args.plot_dir}/poset.png",
            "rotation poset",
        )
        lat = enumerate_stable(inst, cap=args.cap)
        hasse_figure(
            [format_vector(inst, x).replace(" ", "\n") for x in lat.elements],
            sorted(lat.hasse),
            f"{args.plot_dir}/lattice.png",
            "stable assignments",
        )
    return 1 if failed else 0


def _cmd_fixture(args) -> int:
    params = {}
    for key in ("p", "capacity", "cap", "seed", "workers", "firms", "bmax", "box_limit"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    sys.stdout.write(generate_fixture(args.name, **params))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stablelattice",
        description="Stable assignments under integer choice functions: "
        "extremes, rotations, the weighted rotation poset, and min-cost selection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_instance(p):
        p.add_argument("instance", help="instance file path, or - for stdin")
        return p

    p = with_instance(sub.add_parser("check-axioms", help="verify choice-function axioms"))
    p.add_argument("--pair-cap", type=int, default=10**6)
    p.add_argument("--gapless", action="store_true",
                   help="also test the no-gap regularity exhaustively")
    p.set_defaults(fn=_cmd_check_axioms)

    p = with_instance(sub.add_parser("stable-check", help="diagnose one assignment"))
    p.add_argument("values", nargs="*", help="edge=value tokens; missing edges are 0")
    p.set_defaults(fn=_cmd_stable_check)

    p = with_instance(sub.add_parser("xmin", help="worker-optimal stable assignment"))
    p.add_argument("--method", choices=("ag", "twostage"), default="ag")
    p.set_defaults(fn=_cmd_xmin)

    p = with_instance(sub.add_parser("xmax", help="firm-optimal stable assignment"))
    p.set_defaults(fn=_cmd_xmax)

    p = with_instance(sub.add_parser("route", help="rotation route between extremes"))
    p.add_argument("--full", action="store_true", help="full route (default)")
    p.add_argument("--between", nargs=2, metavar=("X", "Y"),
                   help="two assignment vectors as quoted edge=value lists")
    p.add_argument("--seed", type=int, help="randomize rotation choice")
    p.set_defaults(fn=_cmd_route)

    p = with_instance(sub.add_parser("poset", help="weighted rotation poset"))
    p.add_argument("--dot", metavar="FILE")
    p.add_argument("--text", metavar="FILE")
    p.add_argument("--plot", metavar="FILE", help="render the Hasse diagram to PNG")
    p.set_defaults(fn=_cmd_poset)

    p = with_instance(sub.add_parser("enumerate", help="brute-force stable set + audit"))
    p.add_argument("--cap", type=int, default=10**7)
    p.add_argument("--dot", metavar="FILE")
    p.add_argument("--plot", metavar="FILE", help="render the lattice to PNG")
    p.set_defaults(fn=_cmd_enumerate)

    p = with_instance(sub.add_parser("mincost", help="minimum-cost stable assignment"))
    p.add_argument("--costs", metavar="FILE", help="edge=value cost tokens")
    p.add_argument("--dimacs", metavar="FILE", help="export the cut network")
    p.set_defaults(fn=_cmd_mincost)

    p = with_instance(sub.add_parser("audit", help="full cross-validation suite"))
    p.add_argument("--cap", type=int, default=10**7)
    p.add_argument("--cost-trials", type=int, default=5)
    p.add_argument("--plot-dir", metavar="DIR", help="write poset.png and lattice.png")
    p.set_defaults(fn=_cmd_audit)

    p = sub.add_parser("fixture", help="emit a named fixture instance")
    p.add_argument("name", help="single-edge | marriage-2x2 | triangle-p | random-linear")
    p.add_argument("--p", type=int)
    p.add_argument("--capacity", type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--firms", type=int)
    p.add_argument("--bmax", type=int)
    p.add_argument("--box-limit", type=int, dest="box_limit")
    p.set_defaults(fn=_cmd_fixture)

    return parser


def run_command(argv: list[str]) -> int:
    """Dispatch one CLI invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.fn(args)
    except (InvalidInstance, InvariantViolation, CapExceeded, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
