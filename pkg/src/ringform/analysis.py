"""Quantities behind the termination argument of the two-colour balancer.

Everything here is a pure function of a configuration and a per-block
requirement row for the tracked colour (colour 1 after role orientation,
or the merged lower-bound colour for P2): per-block surpluses, the block
renaming that pins the cumulative surplus at zero, destination blocks,
the distance potential, the class partition of blue agents, and the
round-count bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import Configuration, Instance, ProblemKind

BLUE = 1  # the tracked colour; roles are swapped before a run, never here


@dataclass(frozen=True)
class SurplusProfile:
    """Per-block colour-1 surplus: count present minus count required."""

    y: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.y)

    @property
    def total(self) -> int:
        """Whole-ring surplus: 0 for exact instances, the extras d for P2."""
        return sum(self.y)


@dataclass(frozen=True)
class DistanceReport:
    rename_offset: int
    dest: tuple[int, ...]
    displacement: tuple[int, ...]
    total: int


@dataclass(frozen=True)
class BluePartition:
    """Blue ranks 1..N grouped into classes of ``class_size`` (last may be short)."""

    class_size: int
    classes: tuple[tuple[int, ...], ...]

    @property
    def count(self) -> int:
        return len(self.classes)


def surplus_profile(cfg: Configuration, requirement_row: Sequence[int]) -> SurplusProfile:
    """Surplus of colour 1 per block relative to ``requirement_row``."""
    if len(requirement_row) != cfg.k:
        raise ValueError(f"requirement row has {len(requirement_row)} entries, expected {cfg.k}")
    y = tuple(
        cfg.counts(j)[BLUE - 1] - requirement_row[j - 1] for j in range(1, cfg.k + 1)
    )
    return SurplusProfile(y=y)


def cumulative_surplus(profile: SurplusProfile, start: int, length: int) -> int:
    """Sum of ``length`` consecutive surpluses beginning at block ``start`` (wrapping)."""
    k = profile.k
    if not 1 <= start <= k:
        raise ValueError(f"start block {start} out of range 1..{k}")
    if not 1 <= length <= k:
        raise ValueError(f"length {length} out of range 1..{k}")
    return sum(profile.y[(start - 1 + j) % k] for j in range(length))


def max_cumulative(profile: SurplusProfile, start: int) -> int:
    """Largest cumulative surplus over all window lengths from ``start``."""
    return max(cumulative_surplus(profile, start, length) for length in range(1, profile.k + 1))


def rename_offset(profile: SurplusProfile) -> int:
    """Block to relabel as block 1 so cumulative surpluses never exceed the total.

    Taking the smallest prefix-sum maximiser ``j`` (scanning from block 1)
    and starting at ``j + 1`` caps every cumulative surplus at 0 for exact
    instances and at the extras count for lower-bound instances.
    """
    prefix = 0
    best_j, best = 1, None
    for j in range(1, profile.k + 1):
        prefix += profile.y[j - 1]
        if best is None or prefix > best:
            best, best_j = prefix, j
    return best_j % profile.k + 1


def renamed_block(original: int, offset: int, k: int) -> int:
    """Index of an original block after relabelling block ``offset`` as block 1."""
    return (original - offset) % k + 1


def original_block(renamed: int, offset: int, k: int) -> int:
    return (offset - 1 + renamed - 1) % k + 1


def renamed_row(row: Sequence[int], offset: int) -> tuple[int, ...]:
    return tuple(row[offset - 1:]) + tuple(row[:offset - 1])


def destinations(n_blue: int, requirement_row: Sequence[int]) -> tuple[int, ...]:
    """Destination block per blue rank: the first block whose cumulative
    requirement covers the rank.  Ranks beyond the total requirement (the
    extras of a lower-bound instance) settle in the last block.
    """
    k = len(requirement_row)
    dest = []
    block, covered = 1, requirement_row[0]
    for rank in range(1, n_blue + 1):
        while block < k and covered < rank:
            block += 1
            covered += requirement_row[block - 1]
        dest.append(block if covered >= rank else k)
    return tuple(dest)


def blue_scan(cfg: Configuration, offset: int) -> tuple[tuple[int, int], ...]:
    """Blue agents in renamed reading order as (renamed block, agent id) pairs."""
    out = []
    for rb in range(1, cfg.k + 1):
        for _, agent in cfg.block_view(original_block(rb, offset, cfg.k)).slots:
            if agent.colour == BLUE:
                out.append((rb, agent.id))
    return tuple(out)


def distance(cfg: Configuration, requirement_row: Sequence[int], offset: int,
             dest: Sequence[int]) -> DistanceReport:
    """Sum of displacements of all blue agents in renamed coordinates.

    The rank-``i`` blue agent sitting in renamed block ``j`` contributes
    ``j - dest[i]``; the total is the potential that certifies termination.
    """
    scan = blue_scan(cfg, offset)
    if len(scan) != len(dest):
        raise ValueError(f"{len(scan)} blue agents but {len(dest)} destinations")
    displacement = tuple(block - dest[i] for i, (block, _) in enumerate(scan))
    return DistanceReport(
        rename_offset=offset,
        dest=tuple(dest),
        displacement=displacement,
        total=sum(displacement),
    )


def distance_report(cfg: Configuration, requirement_row: Sequence[int]) -> DistanceReport:
    """Distance of ``cfg`` with renaming and destinations derived from scratch."""
    offset = rename_offset(surplus_profile(cfg, requirement_row))
    n_blue = sum(1 for a in cfg.agents if a.colour == BLUE)
    dest = destinations(n_blue, renamed_row(requirement_row, offset))
    return distance(cfg, requirement_row, offset, dest)


def blue_partition(inst: Instance) -> BluePartition:
    """Partition blue ranks into consecutive classes of size min-requirement."""
    size = min(inst.spec.row(BLUE))
    if size < 1:
        raise ValueError("colour-1 requirement must be positive in every block")
    n_blue = inst.initial.colour_totals()[BLUE - 1]
    classes = tuple(
        tuple(range(lo, min(lo + size - 1, n_blue) + 1))
        for lo in range(1, n_blue + 1, size)
    )
    return BluePartition(class_size=size, classes=classes)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def theoretical_bound(inst: Instance) -> int:
    """Round-count bound reported for a run of this instance.

    Exact two-colour instances with an even block count get the proven
    ``ceil(2*N/n*) + k + 4`` bound (N blue agents total, n* the smallest
    per-block blue requirement).  Odd block counts triple that formula,
    reflecting the slower guaranteed potential drop; this value is a
    heuristic, not proven tight.  Everything else gets the safety cap
    ``4*n*k + 16`` over the proven O(nk) guarantee.
    """
    spec = inst.spec
    if spec.kind is ProblemKind.P1 and inst.q == 2:
        n_blue = inst.initial.colour_totals()[BLUE - 1]
        star = min(spec.row(BLUE))
        if star < 1:
            raise ValueError("colour-1 requirement must be positive in every block")
        base = _ceil_div(2 * n_blue, star) + inst.k + 4
        return base if inst.k % 2 == 0 else 3 * base
    return 4 * inst.n * inst.k + 16


def bound_is_proven(inst: Instance) -> bool:
    """True when ``theoretical_bound`` returns the proven exact formula."""
    return inst.spec.kind is ProblemKind.P1 and inst.q == 2 and inst.k % 2 == 0
