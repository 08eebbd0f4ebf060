"""Synchronous round-based execution of the window-swap algorithms.

Each round partitions the ring into windows of two adjacent blocks
starting at a cyclically shifting offset and applies a window step to
every window in parallel:

- the two-colour step packs blue agents ahead of red ones in both blocks
  of a deficient window and trades the leftmost surplus reds of the left
  block for the leftmost blues of the right block, capped by the smallest
  per-block blue requirement;
- the many-colour step repairs the lowest-indexed colour whose count is
  wrong in the window, trading colour-i agents from the right block for
  higher-coloured agents from the left block, and once all constrained
  colours are locally correct rearranges blocks into their target
  patterns when the problem asks for exact patterns.

All moves of a round are net displacements applied in one synchronous
step; the engine refuses to apply colliding or out-of-window move sets.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from . import analysis
from .core import (
    Agent,
    BlockView,
    Configuration,
    Instance,
    ProblemKind,
    RequirementSpec,
    colour_of_symbol,
    parse_instance,
    serialize_instance,
    validate,
)

TRACE_FORMAT = "ringform-trace-v1"


class EngineError(RuntimeError):
    """Internal consistency violation; indicates a bug, not bad input."""


class InvalidInstanceError(ValueError):
    """The instance fails semantic validation and cannot be run."""


@dataclass(frozen=True)
class Move:
    agent_id: int
    src: int
    dst: int


@dataclass(frozen=True)
class WindowPairing:
    """Disjoint (left, right) block pairs of one round; odd k leaves one block idle."""

    offset: int
    pairs: tuple[tuple[int, int], ...]
    unpaired: int | None


@dataclass(frozen=True)
class RoundTrace:
    index: int
    offset: int
    moves: tuple[Move, ...]
    counts: tuple[tuple[int, ...], ...]
    distance: int | None
    checks: tuple[tuple[str, bool], ...]


@dataclass(frozen=True)
class RunResult:
    terminated: bool
    rounds_used: int
    bound: int
    trace: tuple[RoundTrace, ...]
    final: Configuration
    instance: Instance
    initial_distance: int | None


def wrap_block(b: int, k: int) -> int:
    return (b - 1) % k + 1


def build_pairing(k: int, offset: int) -> WindowPairing:
    """Pair blocks (offset, offset+1), (offset+2, offset+3), ... around the ring."""
    if not 1 <= offset <= k:
        raise ValueError(f"offset {offset} out of range 1..{k}")
    pairs = []
    b = offset
    for _ in range(k // 2):
        pairs.append((b, wrap_block(b + 1, k)))
        b = wrap_block(b + 2, k)
    unpaired = wrap_block(offset - 1, k) if k % 2 else None
    return WindowPairing(offset=offset, pairs=tuple(pairs), unpaired=unpaired)


def uses_two_colour_steps(inst: Instance) -> bool:
    """Exact two-colour targets and lower-bound targets run the two-colour step;
    everything else (three or more colours, or exact patterns) runs the
    many-colour step."""
    kind = inst.spec.kind
    return kind is ProblemKind.P2 or (kind is ProblemKind.P1 and inst.q == 2)


def default_max_rounds(inst: Instance) -> int:
    return 4 * inst.n * inst.k + 16


def orient_roles(inst: Instance) -> tuple[Instance, bool]:
    """Swap the two colour roles when that lowers the round-count bound.

    The bound tracks the colour with the smaller total-to-minimum-requirement
    ratio; if colour 2 has the strictly smaller ratio the returned instance
    has colours 1 and 2 exchanged in both the configuration and the
    requirement matrix (compared cross-multiplied, so a zero minimum on one
    side never forces a swap toward it).
    """
    if inst.q != 2 or inst.spec.kind is not ProblemKind.P1:
        raise ValueError("role orientation applies to exact two-colour instances")
    totals = inst.initial.colour_totals()
    star1 = min(inst.spec.row(1))
    star2 = min(inst.spec.row(2))
    if star1 == 0 and star2 == 0:
        raise ValueError("cannot orient: both colours have a zero minimum requirement")
    if totals[0] * star2 <= totals[1] * star1:
        return inst, False
    swapped_cfg = inst.initial.with_agents(
        tuple(Agent(a.id, 3 - a.colour) for a in inst.initial.agents)
    )
    swapped_spec = RequirementSpec.exact((inst.spec.row(2), inst.spec.row(1)), inst.p)
    return Instance(spec=swapped_spec, initial=swapped_cfg, provenance=inst.provenance), True


def window_step_two_colour(
    left: BlockView,
    right: BlockView,
    blue_required_left: int,
    cap: int,
    *,
    blue_colour: int = 1,
    frozen: frozenset[int] = frozenset(),
) -> tuple[Move, ...]:
    """Net moves of one two-colour window.

    Nothing happens unless the left block is short of blue agents.  On a
    deficit, both blocks pack their mobile blue agents before the red ones
    (order-preserving), then the t leftmost reds of the left block trade
    positions with the t leftmost blues of the right block, where
    t = min(cap, deficit, blues available on the right).  Agents whose
    colour is in ``frozen`` keep their exact positions.
    """

    def is_blue(agent: Agent) -> bool:
        return agent.colour == blue_colour

    def mobile(view: BlockView) -> list[tuple[int, Agent]]:
        return [(pos, a) for pos, a in view.slots if a.colour not in frozen]

    left_mobile = mobile(left)
    right_mobile = mobile(right)
    blues_left = [a for _, a in left_mobile if is_blue(a)]
    deficit = blue_required_left - len(blues_left)
    if deficit <= 0:
        return ()

    blues_right = [a for _, a in right_mobile if is_blue(a)]
    reds_left = [a for _, a in left_mobile if not is_blue(a)]
    reds_right = [a for _, a in right_mobile if not is_blue(a)]
    t = min(cap, deficit, len(blues_right))
    if len(reds_left) < t:
        raise EngineError(
            f"window [{left.index}|{right.index}]: {len(reds_left)} movable reds but t={t}"
        )

    new_left = blues_left + reds_left
    new_right = blues_right + reds_right
    base = len(blues_left)
    for x in range(t):
        new_left[base + x], new_right[x] = new_right[x], new_left[base + x]

    old_pos = {a.id: pos for pos, a in left_mobile + right_mobile}
    moves = []
    for slots, layout in ((left_mobile, new_left), (right_mobile, new_right)):
        for (pos, _), agent in zip(slots, layout):
            if old_pos[agent.id] != pos:
                moves.append(Move(agent.id, old_pos[agent.id], pos))
    return tuple(moves)


def _rearrange_to_pattern(view: BlockView, pattern: str, q: int) -> list[Move]:
    """Permute a block into its target pattern, order-preserving per colour."""
    queues: dict[int, list[tuple[int, Agent]]] = {}
    for pos, agent in view.slots:
        queues.setdefault(agent.colour, []).append((pos, agent))
    moves = []
    for (pos, _), symbol in zip(view.slots, pattern):
        colour = colour_of_symbol(symbol, q)
        queue = queues.get(colour)
        if not queue:
            raise EngineError(
                f"block {view.index} cannot form {pattern!r}: colour counts disagree"
            )
        src, agent = queue.pop(0)
        if src != pos:
            moves.append(Move(agent.id, src, pos))
    return moves


def window_step_q_colour(
    left: BlockView,
    right: BlockView,
    spec: RequirementSpec,
    *,
    capped: bool = False,
) -> tuple[Move, ...]:
    """Net moves of one many-colour window.

    Scan colours upward while colour i is correct in both blocks.  At the
    first wrong colour, if the left block is short of it, trade
    t = min(deficit, available on the right) leftmost colour-i agents of
    the right block for the t leftmost higher-coloured agents of the left
    block (``capped`` additionally limits t by the smallest per-block
    requirement of colour i).  If every constrained colour is correct in
    both blocks, exact-pattern problems rearrange each block into its
    target pattern.
    """
    q = spec.q

    def colour_count(view: BlockView, colour: int) -> int:
        return sum(1 for _, a in view.slots if a.colour == colour)

    i = 1
    while i < q and (
        colour_count(left, i) == spec.required(i, left.index)
        and colour_count(right, i) == spec.required(i, right.index)
    ):
        i += 1

    if i < q:
        deficit = spec.required(i, left.index) - colour_count(left, i)
        if deficit <= 0:
            return ()
        t = min(deficit, colour_count(right, i))
        if capped:
            t = min(t, min(spec.row(i)))
        if t <= 0:
            return ()
        incoming = [(pos, a) for pos, a in right.slots if a.colour == i][:t]
        outgoing = [(pos, a) for pos, a in left.slots if a.colour > i][:t]
        if len(outgoing) < t:
            raise EngineError(
                f"window [{left.index}|{right.index}]: not enough agents above colour {i}"
            )
        moves = []
        for (rpos, ragent), (lpos, lagent) in zip(incoming, outgoing):
            moves.append(Move(ragent.id, rpos, lpos))
            moves.append(Move(lagent.id, lpos, rpos))
        return tuple(moves)

    if spec.kind is not ProblemKind.P3:
        return ()
    patterns = spec.patterns or ()
    moves = _rearrange_to_pattern(left, patterns[left.index - 1], q)
    moves += _rearrange_to_pattern(right, patterns[right.index - 1], q)
    return tuple(moves)


def apply_moves(cfg: Configuration, moves: Sequence[Move],
                pairing: WindowPairing | None = None) -> Configuration:
    """Apply a round's net moves, refusing collisions and out-of-window moves."""
    if not moves:
        return cfg
    srcs = [m.src for m in moves]
    dsts = [m.dst for m in moves]
    if len(set(dsts)) != len(dsts):
        raise EngineError("collision: two agents target the same position")
    if len(set(srcs)) != len(srcs):
        raise EngineError("two moves leave the same position")
    if set(srcs) != set(dsts):
        raise EngineError("moves do not permute positions: some node would empty")
    for m in moves:
        if not 0 <= m.src < cfg.n or not 0 <= m.dst < cfg.n:
            raise EngineError(f"move {m} outside the ring")
        if cfg.agents[m.src].id != m.agent_id:
            raise EngineError(f"move {m} does not match the agent at its source")
    if pairing is not None:
        window_of = {}
        for wid, (lb, rb) in enumerate(pairing.pairs):
            window_of[lb] = wid
            window_of[rb] = wid
        for m in moves:
            src_w = window_of.get(cfg.block_of(m.src))
            dst_w = window_of.get(cfg.block_of(m.dst))
            if src_w is None or src_w != dst_w:
                raise EngineError(f"move {m} leaves its window")
    agents = list(cfg.agents)
    for m in moves:
        agents[m.dst] = cfg.agents[m.src]
    return cfg.with_agents(tuple(agents))


def execute_round(
    cfg: Configuration,
    inst: Instance,
    offset: int,
    *,
    index: int = 0,
    capped_swaps: bool = False,
) -> tuple[Configuration, RoundTrace]:
    """Apply the window step to every window of the round's pairing in parallel."""
    pairing = build_pairing(cfg.k, offset)
    spec = inst.spec
    moves: list[Move] = []
    if uses_two_colour_steps(inst):
        row = spec.row(1)
        cap = min(row)
        for lb, rb in pairing.pairs:
            moves.extend(
                window_step_two_colour(cfg.block_view(lb), cfg.block_view(rb), row[lb - 1], cap)
            )
    else:
        for lb, rb in pairing.pairs:
            moves.extend(
                window_step_q_colour(cfg.block_view(lb), cfg.block_view(rb), spec,
                                     capped=capped_swaps)
            )
    new_cfg = apply_moves(cfg, moves, pairing)
    if new_cfg.colour_totals() != cfg.colour_totals():
        raise EngineError("colour totals changed across a round")
    checks = (("collision_free", True), ("within_window", True), ("colours_conserved", True))
    trace = RoundTrace(index=index, offset=offset, moves=tuple(moves),
                       counts=new_cfg.all_counts(), distance=None, checks=checks)
    return new_cfg, trace


def target_satisfied(cfg: Configuration, inst: Instance) -> bool:
    spec = inst.spec
    if spec.kind is ProblemKind.P3:
        return cfg.to_string() == "".join(spec.patterns or ())
    if spec.kind is ProblemKind.P2:
        return all(
            cfg.counts(j)[0] >= spec.required(1, j) for j in range(1, cfg.k + 1)
        )
    return all(cfg.counts(j) == spec.column(j) for j in range(1, cfg.k + 1))


def run(
    inst: Instance,
    max_rounds: int | None = None,
    *,
    capped_swaps: bool = False,
) -> RunResult:
    """Drive rounds until the target holds, then observe quiescence.

    The offset advances cyclically every round.  Once the target condition
    first holds (after ``rounds_used`` rounds), k further verification
    rounds are executed; the run counts as terminated only if they all
    produce empty move sets.  Exhausting ``max_rounds`` (default
    ``4*n*k + 16``) yields ``terminated=False``.
    """
    report = validate(inst)
    if not report.valid:
        raise InvalidInstanceError(
            "; ".join(report.issues)
            or "global colour totals do not meet the target condition"
        )
    if max_rounds is None:
        max_rounds = default_max_rounds(inst)
    if max_rounds < 0:
        raise ValueError("max_rounds must be non-negative")

    two_colour = uses_two_colour_steps(inst)
    if two_colour:
        row = inst.spec.row(1)
        offset0 = analysis.rename_offset(analysis.surplus_profile(inst.initial, row))
        n_blue = inst.initial.colour_totals()[0]
        dest = analysis.destinations(n_blue, analysis.renamed_row(row, offset0))

        def measure(cfg: Configuration) -> int:
            return analysis.distance(cfg, row, offset0, dest).total

        initial_distance = measure(inst.initial)
    else:
        initial_distance = None

    cfg = inst.initial
    rounds: list[RoundTrace] = []
    offset = 1
    steps = 0
    while steps < max_rounds and not target_satisfied(cfg, inst):
        cfg, rt = execute_round(cfg, inst, offset, index=steps + 1, capped_swaps=capped_swaps)
        if two_colour:
            rt = dataclasses.replace(rt, distance=measure(cfg))
        rounds.append(rt)
        steps += 1
        offset = offset % inst.k + 1

    reached = target_satisfied(cfg, inst)
    rounds_used = steps
    terminated = reached
    if reached:
        for _ in range(inst.k):
            cfg, rt = execute_round(cfg, inst, offset, index=steps + 1, capped_swaps=capped_swaps)
            if two_colour:
                rt = dataclasses.replace(rt, distance=measure(cfg))
            rounds.append(rt)
            steps += 1
            offset = offset % inst.k + 1
            if rt.moves:
                terminated = False

    return RunResult(
        terminated=terminated,
        rounds_used=rounds_used,
        bound=analysis.theoretical_bound(inst),
        trace=tuple(rounds),
        final=cfg,
        instance=inst,
        initial_distance=initial_distance,
    )


# --- trace serialization (JSON lines) -----------------------------------------


@dataclass(frozen=True)
class TraceData:
    """A deserialized trace file: the instance as run, its rounds, the summary."""

    instance: Instance
    rounds: tuple[RoundTrace, ...]
    summary: dict


def round_record(rt: RoundTrace) -> dict:
    return {
        "type": "round",
        "round": rt.index,
        "offset": rt.offset,
        "moves": [[m.agent_id, m.src, m.dst] for m in rt.moves],
        "counts": [list(row) for row in rt.counts],
        "distance": rt.distance,
        "checks": dict(rt.checks),
    }


def trace_records(result: RunResult, *, reversed_roles: bool = False) -> list[dict]:
    records: list[dict] = [{
        "type": "header",
        "format": TRACE_FORMAT,
        "instance": serialize_instance(result.instance),
        "reversed": reversed_roles,
        "initial_distance": result.initial_distance,
    }]
    records.extend(round_record(rt) for rt in result.trace)
    records.append({
        "type": "summary",
        "terminated": result.terminated,
        "rounds_used": result.rounds_used,
        "bound": result.bound,
        "bound_satisfied": result.terminated and result.rounds_used <= result.bound,
    })
    return records


def write_trace(result: RunResult, fp: IO[str], *, reversed_roles: bool = False) -> None:
    for record in trace_records(result, reversed_roles=reversed_roles):
        fp.write(json.dumps(record) + "\n")


def read_trace(fp: IO[str] | Iterable[str]) -> TraceData:
    instance: Instance | None = None
    rounds: list[RoundTrace] = []
    summary: dict = {}
    header: dict = {}
    for no, line in enumerate(fp, start=1):
        line = line.strip()
        if not line:
            continue
        record = json.loads(line)
        rtype = record.get("type")
        if rtype == "header":
            header = record
            instance = parse_instance(record["instance"])
        elif rtype == "round":
            rounds.append(RoundTrace(
                index=record["round"],
                offset=record["offset"],
                moves=tuple(Move(*m) for m in record["moves"]),
                counts=tuple(tuple(row) for row in record["counts"]),
                distance=record.get("distance"),
                checks=tuple((name, bool(v)) for name, v in record.get("checks", {}).items()),
            ))
        elif rtype == "summary":
            summary = record
        else:
            raise ValueError(f"trace line {no}: unknown record type {rtype!r}")
    if instance is None:
        raise ValueError("trace has no header record")
    summary.setdefault("initial_distance", header.get("initial_distance"))
    summary.setdefault("reversed", header.get("reversed", False))
    return TraceData(instance=instance, rounds=tuple(rounds), summary=summary)
