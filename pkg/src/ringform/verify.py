"""Trace checkers: every structural guarantee of the algorithms, made testable.

Checkers are pure functions over a replayed run (the instance plus the
recorded per-round move sets).  Each returns an :class:`InvariantVerdict`
that names the first offending round and the witnesses on failure, so a
stored trace can be audited post-hoc without re-running the engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from . import analysis
from .core import Configuration, Instance, ProblemKind
from .engine import (
    Move,
    RoundTrace,
    RunResult,
    TraceData,
    build_pairing,
    target_satisfied,
    window_step_two_colour,
    apply_moves,
    wrap_block,
)

BLUE = 1


class TraceError(ValueError):
    """A trace whose recorded moves cannot be replayed from its instance."""


@dataclass(frozen=True)
class InvariantVerdict:
    name: str
    passed: bool
    round: int | None = None
    detail: str = ""

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        where = f" round {self.round}" if self.round is not None else ""
        tail = f": {self.detail}" if self.detail else ""
        return f"{status} {self.name}{where}{tail}"


@dataclass(frozen=True)
class ReplayedRun:
    """Configurations reconstructed by replaying a trace's move sets."""

    instance: Instance
    rounds: tuple[RoundTrace, ...]
    configs: tuple[Configuration, ...]  # configs[r] is the state after round r
    distances: tuple[int, ...] | None   # recorded distances, index 0 recomputed

    @property
    def final(self) -> Configuration:
        return self.configs[-1]


def _replay_moves(cfg: Configuration, moves: Sequence[Move], round_index: int) -> Configuration:
    srcs = {m.src for m in moves}
    dsts = {m.dst for m in moves}
    if len(srcs) != len(moves) or len(dsts) != len(moves) or srcs != dsts:
        raise TraceError(f"round {round_index}: moves do not permute positions")
    agents = list(cfg.agents)
    for m in moves:
        if not 0 <= m.src < cfg.n or not 0 <= m.dst < cfg.n:
            raise TraceError(f"round {round_index}: move {m} outside the ring")
        if cfg.agents[m.src].id != m.agent_id:
            raise TraceError(f"round {round_index}: move {m} does not match its source agent")
        agents[m.dst] = cfg.agents[m.src]
    return cfg.with_agents(tuple(agents))


def replay(instance: Instance, rounds: Sequence[RoundTrace]) -> ReplayedRun:
    """Rebuild the configuration after every round from the recorded moves."""
    configs = [instance.initial]
    for rt in rounds:
        configs.append(_replay_moves(configs[-1], rt.moves, rt.index))
    distances: tuple[int, ...] | None = None
    if all(rt.distance is not None for rt in rounds):
        row = instance.spec.row(BLUE)
        if instance.spec.kind in (ProblemKind.P1, ProblemKind.P2):
            d0 = analysis.distance_report(instance.initial, row).total
            distances = (d0,) + tuple(rt.distance for rt in rounds)  # type: ignore[misc]
    return ReplayedRun(
        instance=instance,
        rounds=tuple(rounds),
        configs=tuple(configs),
        distances=distances,
    )


def replay_result(result: RunResult) -> ReplayedRun:
    return replay(result.instance, result.trace)


def replay_trace(data: TraceData) -> ReplayedRun:
    return replay(data.instance, data.rounds)


# --- individual checkers -------------------------------------------------------


def _blue_ids_clockwise(cfg: Configuration) -> tuple[int, ...]:
    return tuple(a.id for a in cfg.agents if a.colour == BLUE)


def _cyclically_equal(a: Sequence[int], b: Sequence[int]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = list(a) + list(a)
    target = list(b)
    return any(doubled[i:i + len(target)] == target for i in range(len(a)))


def check_order_preserving(run: ReplayedRun) -> InvariantVerdict:
    """The clockwise ordering of blue agents never changes between rounds."""
    name = "order_preserving"
    before = _blue_ids_clockwise(run.configs[0])
    for r, cfg in enumerate(run.configs[1:], start=1):
        after = _blue_ids_clockwise(cfg)
        if not _cyclically_equal(before, after):
            return InvariantVerdict(name, False, r,
                                    f"blue order {before} became {after}")
        before = after
    return InvariantVerdict(name, True)


def _lower_bound_extras(inst: Instance) -> int:
    if inst.spec.kind is ProblemKind.P2:
        return inst.initial.colour_totals()[0] - sum(inst.spec.row(BLUE))
    return 0


def check_suffix_property(run: ReplayedRun) -> InvariantVerdict:
    """In coordinates renamed from the initial state, every prefix of blocks
    carries a cumulative blue surplus of at most the extras count (0 for
    exact problems) and every suffix a cumulative surplus of at least 0,
    after every round."""
    name = "suffix_property"
    inst = run.instance
    row = inst.spec.row(BLUE)
    offset = analysis.rename_offset(analysis.surplus_profile(inst.initial, row))
    allowed = _lower_bound_extras(inst)
    for r, cfg in enumerate(run.configs):
        profile = analysis.surplus_profile(cfg, row)
        rotated = analysis.renamed_row(profile.y, offset)
        prefix = 0
        for j, value in enumerate(rotated, start=1):
            prefix += value
            if prefix > allowed:
                return InvariantVerdict(
                    name, False, r,
                    f"prefix of {j} renamed blocks has surplus {prefix} > {allowed}")
            suffix = profile.total - prefix
            if j < len(rotated) and suffix < 0:
                return InvariantVerdict(
                    name, False, r,
                    f"suffix after {j} renamed blocks has surplus {suffix} < 0")
    return InvariantVerdict(name, True)


def check_no_wraparound(run: ReplayedRun) -> InvariantVerdict:
    """No agent is ever exchanged inside the window that pairs the renamed
    last block with the renamed first block."""
    name = "no_wraparound"
    inst = run.instance
    k = inst.k
    row = inst.spec.row(BLUE)
    origin = analysis.rename_offset(analysis.surplus_profile(inst.initial, row))
    forbidden = (wrap_block(origin - 1, k), origin)
    for r, rt in enumerate(run.rounds, start=1):
        pairing = build_pairing(k, rt.offset)
        if forbidden not in pairing.pairs:
            continue
        cfg = run.configs[r - 1]
        for m in rt.moves:
            src_b, dst_b = cfg.block_of(m.src), cfg.block_of(m.dst)
            if src_b != dst_b and {src_b, dst_b} == set(forbidden):
                return InvariantVerdict(
                    name, False, r,
                    f"agent {m.agent_id} crossed between blocks {forbidden[0]} and {forbidden[1]}")
    return InvariantVerdict(name, True)


def check_distance_monotone(
    run: ReplayedRun,
    *,
    require_nonnegative: bool = True,
    require_zero_quiescence: bool = True,
) -> InvariantVerdict:
    """The recorded distance never increases; for exact problems it also stays
    non-negative and, once zero, no agent moves again."""
    name = "distance_monotone"
    if run.distances is None:
        return InvariantVerdict(name, False, None, "trace carries no distance values")
    d = run.distances
    for r in range(1, len(d)):
        if d[r] > d[r - 1]:
            return InvariantVerdict(name, False, r, f"distance rose {d[r - 1]} -> {d[r]}")
    if require_nonnegative:
        for r, value in enumerate(d):
            if value < 0:
                return InvariantVerdict(name, False, r, f"distance {value} < 0")
    if require_zero_quiescence:
        for r, value in enumerate(d):
            if value == 0:
                for later in range(r, len(run.rounds)):
                    if run.rounds[later].moves:
                        return InvariantVerdict(
                            name, False, later + 1,
                            "agents moved after the distance reached 0")
                break
    return InvariantVerdict(name, True)


def check_distance_decrease(run: ReplayedRun, window: int) -> InvariantVerdict:
    """While positive, the distance drops by at least 1 within ``window`` rounds."""
    name = f"distance_decrease[{window}]"
    if run.distances is None:
        return InvariantVerdict(name, False, None, "trace carries no distance values")
    d = run.distances
    for r in range(len(d) - window):
        if d[r] > 0 and d[r + window] > d[r] - 1:
            return InvariantVerdict(
                name, False, r,
                f"distance {d[r]} did not drop within {window} rounds (still {d[r + window]})")
    return InvariantVerdict(name, True)


def check_final(result: RunResult, inst: Instance) -> InvariantVerdict:
    """A terminated run must actually satisfy its target condition."""
    name = "final_condition"
    if not result.terminated:
        return InvariantVerdict(name, False, None, "run did not terminate")
    if not target_satisfied(result.final, inst):
        return InvariantVerdict(name, False, None,
                                f"final configuration {result.final.to_string()!r} misses the target")
    return InvariantVerdict(name, True)


def check_final_config(run: ReplayedRun, terminated: bool) -> InvariantVerdict:
    name = "final_condition"
    if not terminated:
        return InvariantVerdict(name, False, None, "run did not terminate")
    if not target_satisfied(run.final, run.instance):
        return InvariantVerdict(name, False, None,
                                f"final configuration {run.final.to_string()!r} misses the target")
    return InvariantVerdict(name, True)


def check_cooperativeness(run: ReplayedRun,
                          partition: analysis.BluePartition | None = None) -> InvariantVerdict:
    """From round 2c+2 on, every blue agent of class c either advances one
    block left each round or already sits in its destination block."""
    name = "cooperativeness"
    inst = run.instance
    if inst.k % 2:
        return InvariantVerdict(name, False, None, "only meaningful for an even block count")
    if partition is None:
        partition = analysis.blue_partition(inst)
    row = inst.spec.row(BLUE)
    offset = analysis.rename_offset(analysis.surplus_profile(inst.initial, row))
    n_blue = inst.initial.colour_totals()[0]
    dest = analysis.destinations(n_blue, analysis.renamed_row(row, offset))

    scans = [analysis.blue_scan(cfg, offset) for cfg in run.configs]
    ids0 = tuple(agent_id for _, agent_id in scans[0])
    for r, scan in enumerate(scans):
        if tuple(agent_id for _, agent_id in scan) != ids0:
            return InvariantVerdict(name, False, r, "blue ranks are not stable")

    blocks = [tuple(block for block, _ in scan) for scan in scans]
    for class_index, ranks in enumerate(partition.classes, start=1):
        active_from = 2 * class_index + 2
        for r in range(active_from, len(run.configs)):
            for rank in ranks:
                before = blocks[r - 1][rank - 1]
                after = blocks[r][rank - 1]
                if before != dest[rank - 1] and after != before - 1:
                    return InvariantVerdict(
                        name, False, r,
                        f"rank {rank} (class {class_index}) stayed in block {before}, "
                        f"destination {dest[rank - 1]}")
    return InvariantVerdict(name, True)


def check_safety(run: ReplayedRun) -> InvariantVerdict:
    """Moves stay inside their window, recorded counts match the replayed
    configurations, and global colour totals never change."""
    name = "safety"
    totals = run.configs[0].colour_totals()
    for r, rt in enumerate(run.rounds, start=1):
        cfg_before = run.configs[r - 1]
        cfg_after = run.configs[r]
        pairing = build_pairing(run.instance.k, rt.offset)
        window_of: dict[int, int] = {}
        for wid, (lb, rb) in enumerate(pairing.pairs):
            window_of[lb] = wid
            window_of[rb] = wid
        for m in rt.moves:
            src_w = window_of.get(cfg_before.block_of(m.src))
            dst_w = window_of.get(cfg_before.block_of(m.dst))
            if src_w is None or src_w != dst_w:
                return InvariantVerdict(name, False, r, f"move {m} leaves its window")
        if cfg_after.all_counts() != rt.counts:
            return InvariantVerdict(name, False, r, "recorded counts disagree with the moves")
        if cfg_after.colour_totals() != totals:
            return InvariantVerdict(name, False, r, "colour totals changed")
    return InvariantVerdict(name, True)


def check_quiescence(run: ReplayedRun, rounds_used: int, terminated: bool) -> InvariantVerdict:
    """After the target condition holds, the trailing verification rounds
    (at least k of them) record no moves."""
    name = "quiescence"
    if not terminated:
        return InvariantVerdict(name, False, None, "run did not terminate")
    tail = run.rounds[rounds_used:]
    if len(tail) < run.instance.k:
        return InvariantVerdict(name, False, None,
                                f"only {len(tail)} verification rounds, expected {run.instance.k}")
    for rt in tail:
        if rt.moves:
            return InvariantVerdict(name, False, rt.index,
                                    "agents moved after the target condition held")
    return InvariantVerdict(name, True)


# --- independent distance oracle ------------------------------------------------


def oracle_distance(cfg: Configuration, inst: Instance) -> int:
    """Distance computed the plodding way: scan for the best renaming, then walk
    every blue agent and find its destination by a fresh cumulative scan.
    Shares no code with the analysis module."""
    k, p = cfg.k, cfg.p
    row = [inst.spec.matrix[0][j] for j in range(k)]

    best_j, best_sum, running = 0, None, 0
    for j in range(k):
        blues_here = sum(
            1 for x in range(j * p, (j + 1) * p) if cfg.agents[x].colour == BLUE
        )
        running += blues_here - row[j]
        if best_sum is None or running > best_sum:
            best_sum, best_j = running, j
    start = (best_j + 1) % k  # 0-based original index of the renamed first block

    total = 0
    rank = 0
    for step in range(k):
        orig = (start + step) % k
        renamed_index = step + 1
        for x in range(orig * p, (orig + 1) * p):
            if cfg.agents[x].colour != BLUE:
                continue
            rank += 1
            covered = 0
            dest = k
            for ell in range(k):
                covered += row[(start + ell) % k]
                if covered >= rank:
                    dest = ell + 1
                    break
            total += renamed_index - dest
    return total


# --- sequential phase oracle ----------------------------------------------------


def sequential_phase_counts(inst: Instance, max_rounds_per_phase: int | None = None,
                            ) -> tuple[tuple[int, ...], ...]:
    """Final per-block colour counts after running one two-colour pass per
    constrained colour, in colour order, each pass freezing the colours
    already fixed.  Raises :class:`TraceError` if any pass fails to settle."""
    if inst.spec.kind is not ProblemKind.P1:
        raise ValueError("the phase oracle applies to exact-count instances")
    cfg = inst.initial
    spec = inst.spec
    if max_rounds_per_phase is None:
        max_rounds_per_phase = 4 * inst.n * inst.k + 16
    for colour in range(1, inst.q):
        row = spec.row(colour)
        cap = min(row)
        frozen = frozenset(range(1, colour))

        def phase_done(state: Configuration) -> bool:
            return all(
                state.counts(j)[colour - 1] == row[j - 1] for j in range(1, state.k + 1)
            )

        offset = 1
        steps = 0
        while not phase_done(cfg):
            if steps >= max_rounds_per_phase:
                raise TraceError(f"phase for colour {colour} did not settle")
            pairing = build_pairing(inst.k, offset)
            moves: list[Move] = []
            for lb, rb in pairing.pairs:
                moves.extend(window_step_two_colour(
                    cfg.block_view(lb), cfg.block_view(rb), row[lb - 1], cap,
                    blue_colour=colour, frozen=frozen,
                ))
            cfg = apply_moves(cfg, moves, pairing)
            steps += 1
            offset = offset % inst.k + 1
    return cfg.all_counts()


# --- orchestration ----------------------------------------------------------------


def applicable_checks(inst: Instance) -> tuple[str, ...]:
    kind = inst.spec.kind
    if kind is ProblemKind.P1 and inst.q == 2:
        names = ["safety", "quiescence", "order_preserving", "suffix_property",
                 "no_wraparound", "distance_monotone", "distance_decrease", "final_condition"]
        if inst.k % 2 == 0:
            names.append("cooperativeness")
        return tuple(names)
    if kind is ProblemKind.P2:
        return ("safety", "quiescence", "order_preserving", "suffix_property",
                "no_wraparound", "distance_nonincreasing", "final_condition")
    return ("safety", "quiescence", "final_condition")


def run_checks(run: ReplayedRun, rounds_used: int, terminated: bool,
               names: Sequence[str] | None = None) -> list[InvariantVerdict]:
    """Run the named checkers (default: all applicable ones) over a replay."""
    inst = run.instance
    window = 2 if inst.k % 2 == 0 else 3
    table: dict[str, Callable[[], InvariantVerdict]] = {
        "safety": lambda: check_safety(run),
        "quiescence": lambda: check_quiescence(run, rounds_used, terminated),
        "order_preserving": lambda: check_order_preserving(run),
        "suffix_property": lambda: check_suffix_property(run),
        "no_wraparound": lambda: check_no_wraparound(run),
        "distance_monotone": lambda: check_distance_monotone(run),
        "distance_nonincreasing": lambda: check_distance_monotone(
            run, require_nonnegative=False, require_zero_quiescence=False),
        "distance_decrease": lambda: check_distance_decrease(run, window),
        "cooperativeness": lambda: check_cooperativeness(run),
        "final_condition": lambda: check_final_config(run, terminated),
    }
    if names is None:
        names = applicable_checks(inst)
    return [table[name]() for name in names]


def verify_result(result: RunResult) -> list[InvariantVerdict]:
    run = replay_result(result)
    return run_checks(run, result.rounds_used, result.terminated)


def verify_trace(data: TraceData) -> list[InvariantVerdict]:
    try:
        run = replay_trace(data)
    except TraceError as exc:
        return [InvariantVerdict("replay", False, None, str(exc))]
    return run_checks(run, data.summary.get("rounds_used", len(data.rounds)),
                      data.summary.get("terminated", False))
