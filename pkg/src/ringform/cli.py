"""Command-line front door: generate instances, run and verify simulations,
analyze instances, and benchmark round counts against the bounds.

Exit codes are stable contracts: 0 success, 2 invalid instance, 3 no
termination within the round budget, 4 verification failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import analysis, engine, generators, verify
from .core import (
    Instance,
    InstanceFormatError,
    ProblemKind,
    parse_instance,
    serialize_instance,
    validate,
)

EXIT_OK = 0
EXIT_INVALID_INSTANCE = 2
EXIT_NO_TERMINATION = 3
EXIT_VERIFICATION_FAILED = 4
EXIT_IO_ERROR = 5


@dataclass(frozen=True)
class BenchRow:
    instance_id: str
    k: int
    p: int
    q: int
    n_blue: int
    n_blue_min: int
    rounds_used: int
    bound: int
    bound_proven: bool
    ok: bool


@dataclass(frozen=True)
class BenchReport:
    rows: tuple[BenchRow, ...]
    max_ratio: float

    def all_ok(self) -> bool:
        return all(row.ok for row in self.rows)


def _load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fp:
        return parse_instance(fp.read())


def _prepare(inst: Instance) -> tuple[Instance, bool]:
    """Orient the colour roles for exact two-colour instances."""
    if inst.spec.kind is ProblemKind.P1 and inst.q == 2:
        return engine.orient_roles(inst)
    return inst, False


def cmd_gen(args: argparse.Namespace) -> int:
    spec = generators.GenSpec(kind=args.kind, k=args.k, p=args.p, q=args.q,
                              seed=args.seed, m=args.m, extras=args.extras)
    try:
        inst = generators.generate(spec)
    except generators.GeneratorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INSTANCE
    text = serialize_instance(inst)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            fp.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    report = validate(inst)
    if not report.valid:
        for check in report.colour_checks:
            if not check.ok:
                print(f"invalid: colour {check.colour}: have {check.actual}, "
                      f"need {check.required}", file=sys.stderr)
        for issue in report.issues:
            print(f"invalid: {issue}", file=sys.stderr)
        return EXIT_INVALID_INSTANCE

    oriented, reversed_roles = _prepare(inst)
    result = engine.run(oriented, max_rounds=args.max_rounds)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fp:
            engine.write_trace(result, fp, reversed_roles=reversed_roles)

    summary = {
        "terminated": result.terminated,
        "rounds_used": result.rounds_used,
        "bound": result.bound,
        "bound_satisfied": result.terminated and result.rounds_used <= result.bound,
        "reversed": reversed_roles,
        "final": result.final.to_string(),
    }
    print(json.dumps(summary))
    if not result.terminated:
        return EXIT_NO_TERMINATION
    if args.verify:
        verdicts = verify.verify_result(result)
        for verdict in verdicts:
            print(verdict)
        if not all(v.passed for v in verdicts):
            return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    report = validate(inst)
    out: dict = {
        "kind": inst.spec.kind.value,
        "k": inst.k,
        "p": inst.p,
        "q": inst.q,
        "valid": report.valid,
        "issues": list(report.issues),
        "bound": analysis.theoretical_bound(inst),
        "bound_proven": analysis.bound_is_proven(inst),
    }
    if report.extras is not None:
        out["extras"] = report.extras
    if inst.q == 2 or inst.spec.kind is ProblemKind.P2:
        row = inst.spec.row(1)
        profile = analysis.surplus_profile(inst.initial, row)
        out["surplus"] = list(profile.y)
        out["rename_offset"] = analysis.rename_offset(profile)
        if report.valid:
            out["distance"] = analysis.distance_report(inst.initial, row).total
    print(json.dumps(out))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    with open(args.trace, "r", encoding="utf-8") as fp:
        data = engine.read_trace(fp)
    verdicts = verify.verify_trace(data)
    for verdict in verdicts:
        print(verdict)
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_VERIFICATION_FAILED


def _bench_instances(suite: str, seeds: int) -> list[tuple[str, Instance]]:
    items: list[tuple[str, Instance]] = []
    if suite in ("random", "all"):
        for k in (2, 4, 6, 8, 12, 16):
            for p in (2, 4, 6):
                for seed in range(seeds):
                    inst = generators.gen_random(k, p, 2, seed)
                    items.append((f"random-k{k}-p{p}-s{seed}", inst))
    if suite in ("homogeneous", "all"):
        for k in (4, 8, 16, 32):
            for p in (2, 4):
                for m in sorted({1, p // 2, p - 1}):
                    for seed in range(seeds):
                        inst = generators.gen_homogeneous(k, p, m, seed)
                        items.append((f"homogeneous-k{k}-p{p}-m{m}-s{seed}", inst))
    if suite in ("adversarial", "all"):
        for k in (8, 16, 32):
            for p in (2, 4):
                inst = generators.gen_adversarial_half(k, p)
                items.append((f"adversarial-k{k}-p{p}", inst))
    if not items:
        raise ValueError(f"unknown suite {suite!r}")
    return items


def run_bench(suite: str, seeds: int) -> BenchReport:
    rows = []
    for instance_id, inst in _bench_instances(suite, seeds):
        oriented, _ = _prepare(inst)
        result = engine.run(oriented)
        n_blue = oriented.initial.colour_totals()[0]
        star = min(oriented.spec.row(1))
        proven = analysis.bound_is_proven(oriented)
        ok = result.terminated and (not proven or result.rounds_used <= result.bound)
        rows.append(BenchRow(
            instance_id=instance_id, k=inst.k, p=inst.p, q=inst.q,
            n_blue=n_blue, n_blue_min=star,
            rounds_used=result.rounds_used, bound=result.bound,
            bound_proven=proven, ok=ok,
        ))
    rows.sort(key=lambda r: r.instance_id)
    max_ratio = max((r.rounds_used / r.bound for r in rows if r.bound), default=0.0)
    return BenchReport(rows=tuple(rows), max_ratio=max_ratio)


def cmd_bench(args: argparse.Namespace) -> int:
    report = run_bench(args.suite, args.seeds)
    header = f"{'instance':34} {'k':>3} {'p':>3} {'q':>2} {'N1':>5} {'n1*':>4} " \
             f"{'rounds':>7} {'bound':>6} ok"
    print(header)
    for row in report.rows:
        print(f"{row.instance_id:34} {row.k:>3} {row.p:>3} {row.q:>2} {row.n_blue:>5} "
              f"{row.n_blue_min:>4} {row.rounds_used:>7} {row.bound:>6} "
              f"{'yes' if row.ok else 'NO'}")
    print(f"max rounds/bound ratio: {report.max_ratio:.3f}")
    if args.out:
        payload = {
            "rows": [vars(row) for row in report.rows],
            "max_ratio": report.max_ratio,
        }
        with open(args.out, "w", encoding="utf-8") as fp:
            json.dump(payload, fp, indent=2)
    return EXIT_OK if report.all_ok() else EXIT_VERIFICATION_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringform",
        description="Simulate and verify coloured-agent pattern formation on a ring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance document")
    gen.add_argument("--kind", required=True,
                     choices=["random", "p2_random", "p3_random", "homogeneous",
                              "adversarial_half"])
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--p", type=int, required=True)
    gen.add_argument("--q", type=int, default=2)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--m", type=int, default=None)
    gen.add_argument("--extras", type=int, default=None)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=cmd_gen)

    runp = sub.add_parser("run", help="simulate an instance")
    runp.add_argument("--instance", required=True)
    runp.add_argument("--trace", default=None)
    runp.add_argument("--max-rounds", type=int, default=None)
    runp.add_argument("--verify", action="store_true")
    runp.set_defaults(func=cmd_run)

    ana = sub.add_parser("analyze", help="report surpluses, renaming, distance, bound")
    ana.add_argument("--instance", required=True)
    ana.set_defaults(func=cmd_analyze)

    ver = sub.add_parser("verify", help="check a stored trace")
    ver.add_argument("--trace", required=True)
    ver.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="tabulate round counts against bounds")
    bench.add_argument("--suite", default="all",
                       choices=["random", "homogeneous", "adversarial", "all"])
    bench.add_argument("--seeds", type=int, default=3)
    bench.add_argument("--out", default=None)
    bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InstanceFormatError as exc:
        print(f"invalid instance document: {exc}", file=sys.stderr)
        return EXIT_INVALID_INSTANCE
    except engine.InvalidInstanceError as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EXIT_INVALID_INSTANCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
