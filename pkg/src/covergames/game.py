"""The Hurewicz game: ONE's refinement strategy, TWO's policies, block
bookkeeping, and the assembled per-stage disjoint families with their block
indices; plus the Hurewicz/Menger selection checkers.

ONE's move at suffix start s is the family list produced by the selective
refinement engine on covers s..N (each family disjoint, refining its cover,
the whole move covering the sample).  TWO answers with a finite subfamily.
The block index after a move is the least n such that every selected region
already occurs in some family with index below n; the next move starts
there.

Assembled families: region values picked by TWO are routed to the stage of
their earliest occurrence in the move they came from.  Every routed region
therefore sits inside its own stage's disjoint family (disjointness and
refinement are inherited), and each still satisfies the defining property of
the construction: it is contained in some element of its stage's cover.
Routing by occurrence rather than by the bare containment property is what
keeps the families disjoint when TWO's selection spans overlapping
families.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .covers import (
    Cover,
    CoverSeq,
    DisjointFamily,
    OpenRegion,
    region_mask,
)
from .exact import CheckFailure, InputError
from .screenability import _sc_fin_families
from .space import SampledSpace

DEFAULT_TAIL_SLACK = 1


@dataclass(frozen=True)
class Round:
    start_index: int
    one_move: tuple[DisjointFamily, ...]  # families for covers start..horizon
    two_move: tuple[OpenRegion, ...]
    two_refs: tuple[tuple[int, int], ...]  # (stage, region idx) per selection
    block: int


@dataclass(frozen=True)
class Transcript:
    space: SampledSpace
    covers: CoverSeq
    rounds: tuple[Round, ...]
    blocks: tuple[int, ...]
    horizon: int

    def move_families(self, k: int) -> dict[int, DisjointFamily]:
        """Round k's families keyed by their cover stage."""
        rnd = self.rounds[k - 1]
        return {
            rnd.start_index + off: fam for off, fam in enumerate(rnd.one_move)
        }


TwoPolicy = Callable[[dict[int, DisjointFamily]], list[tuple[int, int]]]


def strategy_F_move(
    space: SampledSpace,
    covers: CoverSeq,
    start_index: int,
    sc=None,
) -> tuple[DisjointFamily, ...]:
    """ONE's move: disjoint refining families for covers start..horizon whose
    union covers the sample (delegated to the selective refinement engine on
    the suffix)."""
    d = space.screen_dim
    if d is None:
        raise InputError("the game needs a grid or Cantor space")
    if start_index > covers.horizon - d:
        raise InputError(
            f"suffix too short: start {start_index} leaves fewer than "
            f"{d + 1} covers"
        )
    if sc is None:
        families, _, _ = _sc_fin_families(
            space, covers, allow_pointwise=True, start=start_index
        )
        return tuple(families)
    return tuple(sc(space, covers, start_index))


def _earliest_occurrence(
    one_move: dict[int, DisjointFamily]
) -> dict[OpenRegion, tuple[int, int]]:
    """Each offered region value mapped to its earliest (stage, member index)."""
    out: dict[OpenRegion, tuple[int, int]] = {}
    for n in sorted(one_move):
        for ridx, region in enumerate(one_move[n].regions):
            out.setdefault(region, (n, ridx))
    return out


def block_index(
    two_move: Sequence[OpenRegion],
    one_move: dict[int, DisjointFamily],
    start_index: int,
) -> int:
    """Least n with every selected region occurring in some family below n.

    Occurrence is by region value; a region value present in several
    families counts at its earliest stage.  The empty selection yields the
    vacuous minimum, the suffix start itself.
    """
    if not two_move:
        return start_index
    occurrence = _earliest_occurrence(one_move)
    worst = None
    for region in two_move:
        hit = occurrence.get(region)
        if hit is None:
            raise InputError("TWO selected a region outside ONE's move")
        worst = hit[0] if worst is None else max(worst, hit[0])
    return worst + 1


def covering_two_policy(
    one_move: dict[int, DisjointFamily]
) -> list[tuple[int, int]]:
    """TWO's canonical winning reply: take the shortest prefix of ONE's
    families that already covers (the move's first block, by construction),
    then pick a minimal-by-greedy covering subfamily inside it, ties to the
    earliest (stage, index).  Staying in the earliest covering prefix keeps
    the block indices advancing one block per round."""
    some_fam = next(iter(one_move.values()))
    space = some_fam.space
    stages = sorted(one_move)
    prefix: list[int] = []
    covered = np.zeros(space.n, dtype=bool)
    for n in stages:
        prefix.append(n)
        covered |= one_move[n].union_mask()
        if covered.all():
            break
    if not covered.all():
        raise CheckFailure(
            "ONE's move does not cover the sample",
            witness=int(np.flatnonzero(~covered)[0]),
        )
    if len(prefix) == 1:
        # a single covering family is pairwise disjoint, so greedy gains
        # never change: the pick order is simply size-descending
        n = prefix[0]
        sized = []
        for ridx, region in enumerate(one_move[n].regions):
            size = int(region_mask(region).sum())
            if size:
                sized.append((-size, ridx))
        return [(n, ridx) for _, ridx in sorted(sized)]
    flat = [
        (n, ridx, region_mask(region))
        for n in prefix
        for ridx, region in enumerate(one_move[n].regions)
    ]
    uncovered = np.ones(space.n, dtype=bool)
    picks: list[tuple[int, int]] = []
    while uncovered.any():
        best, best_gain = None, 0
        for n, ridx, mask in flat:
            gain = int((mask & uncovered).sum())
            if gain > best_gain:
                best, best_gain = (n, ridx, mask), gain
        assert best is not None
        n, ridx, mask = best
        picks.append((n, ridx))
        uncovered &= ~mask
    return picks


def adversarial_two_policy(avoid_point: int) -> TwoPolicy:
    """TWO grabs every offered region missing the given point: the play then
    never covers that point and ONE is not (yet) lost at the horizon."""

    def policy(one_move: dict[int, DisjointFamily]) -> list[tuple[int, int]]:
        picks = []
        for n in sorted(one_move):
            for ridx, region in enumerate(one_move[n].regions):
                if not region_mask(region)[avoid_point]:
                    picks.append((n, ridx))
        return picks

    return policy


def play_hurewicz_game(
    space: SampledSpace,
    covers: CoverSeq,
    two_policy: TwoPolicy | None = None,
    horizon: int | None = None,
    sc=None,
) -> Transcript:
    """Alternate ONE's strategy moves and TWO's selections until the blocks
    pass the horizon or the remaining suffix is too short for a move."""
    covers.validate()
    d = space.screen_dim
    if d is None:
        raise InputError("the game needs a grid or Cantor space")
    horizon = covers.horizon if horizon is None else horizon
    if horizon > covers.horizon:
        raise InputError("game horizon exceeds the cover sequence")
    policy = two_policy if two_policy is not None else covering_two_policy
    rounds: list[Round] = []
    blocks: list[int] = []
    start = 1
    while start <= horizon - d:
        suffix = CoverSeq(space, covers.covers[:horizon])
        move = strategy_F_move(space, suffix, start, sc=sc)
        fams = {start + off: fam for off, fam in enumerate(move)}
        refs = policy(fams)
        regions = []
        for n, ridx in refs:
            if n not in fams or not 0 <= ridx < len(fams[n].regions):
                raise InputError("TWO's policy referenced a region outside the move")
            regions.append(fams[n].regions[ridx])
        m = block_index(regions, fams, start)
        rounds.append(Round(start, move, tuple(regions), tuple(refs), m))
        blocks.append(m)
        if m <= start:  # empty or stalled selection: no progress possible
            break
        start = m
    return Transcript(space, covers, tuple(rounds), tuple(blocks), horizon)


@dataclass(frozen=True)
class LossReport:
    lost_by_one: bool
    tail_round: tuple[int, ...] | None  # per point: least k with point in all
    unresolved: tuple[int, ...]  # points violating the truncated criterion

    def __bool__(self) -> bool:
        return self.lost_by_one


def transcript_loss_report(
    transcript: Transcript, tail_slack: int = DEFAULT_TAIL_SLACK
) -> LossReport:
    """Truncated loss criterion for ONE: every sample point lies in TWO's
    selection unions from some round k(x) <= rounds - tail_slack onward."""
    space = transcript.space
    R = len(transcript.rounds)
    if R == 0:
        return LossReport(False, None, tuple(range(space.n)))
    union_masks = []
    for rnd in transcript.rounds:
        u = np.zeros(space.n, dtype=bool)
        for region in rnd.two_move:
            u |= region_mask(region)
        union_masks.append(u)
    suffix_all = np.ones(space.n, dtype=bool)
    tail = np.full(space.n, -1, dtype=np.int64)
    for k in range(R, 0, -1):
        suffix_all &= union_masks[k - 1]
        tail[suffix_all] = k
    cutoff = R - tail_slack
    bad = np.flatnonzero((tail == -1) | (tail > cutoff))
    if bad.size:
        return LossReport(False, None, tuple(int(b) for b in bad))
    return LossReport(True, tuple(int(t) for t in tail), ())


@dataclass(frozen=True)
class ScPlusResult:
    """Per-stage finite disjoint refining families plus strictly increasing
    block indices; the tail index records, per point, the first block from
    which every materialized block contains a covering stage."""

    families: tuple[DisjointFamily, ...]  # 1-based by stage
    blocks: tuple[int, ...]
    tail_index: tuple[int, ...]
    horizon: int

    def family(self, n: int) -> DisjointFamily:
        return self.families[n - 1]

    def usable_blocks(self) -> list[tuple[int, int]]:
        """Materialized block intervals [m_k, m_{k+1}): both families and the
        closing index exist within the horizon."""
        out = []
        for k in range(len(self.blocks) - 1):
            if self.blocks[k + 1] <= self.horizon + 1:
                out.append((self.blocks[k], self.blocks[k + 1]))
        return out


def assemble_W(
    transcript: Transcript, covers: CoverSeq, tail_slack: int = DEFAULT_TAIL_SLACK
) -> ScPlusResult:
    """Route TWO's selections into per-stage families.

    Precondition: the transcript is lost by ONE under the truncated
    criterion.  Stage j in [m_{k-1}, m_k) (with m_0 the first suffix start)
    receives the round-k selections whose earliest occurrence is j; the
    selections' containment in a cover element of stage j is re-verified,
    and regions never present in round k's move cannot appear (identity
    tracking).
    """
    loss = transcript_loss_report(transcript, tail_slack)
    if not loss.lost_by_one:
        raise CheckFailure(
            "transcript is not lost by ONE under the truncated criterion",
            witness=loss.unresolved,
        )
    space = transcript.space
    horizon = transcript.horizon
    # route each selected region value to its earliest stage within the
    # round's block interval, carrying that family member's refinement
    # witness along
    assignments: dict[int, list[tuple[OpenRegion, int, str]]] = {
        j: [] for j in range(1, horizon + 1)
    }
    for k, rnd in enumerate(transcript.rounds, start=1):
        fams = transcript.move_families(k)
        occurrence = _earliest_occurrence(fams)
        lo = rnd.start_index
        hi = rnd.block
        seen: set[OpenRegion] = set()
        for region in rnd.two_move:
            if region in seen:
                continue
            seen.add(region)
            hit = occurrence.get(region)
            if hit is None:
                raise CheckFailure(
                    "a selected region does not occur in its round's move",
                    witness=(k, region),
                )
            stage, ridx = hit
            if lo <= stage < hi and stage <= horizon:
                fam = fams[stage]
                assignments[stage].append(
                    (region, fam.witness[ridx], fam.witness_kinds[ridx])
                )
    families = []
    for j in range(1, horizon + 1):
        cov = covers.cover(j)
        entries = assignments[j]
        families.append(
            DisjointFamily(
                tuple(e[0] for e in entries),
                cov,
                witness=[e[1] for e in entries],
                witness_kinds=[e[2] for e in entries],
            )
        )
    blocks = transcript.blocks
    for a, b in zip(blocks, blocks[1:]):
        if b <= a:
            raise CheckFailure("block indices must strictly increase", witness=blocks)
    tail = _tail_indices(space, families, blocks, horizon)
    return ScPlusResult(tuple(families), blocks, tail, horizon)


def _tail_indices(space, families, blocks, horizon) -> tuple[int, ...]:
    usable = [
        (blocks[k], blocks[k + 1])
        for k in range(len(blocks) - 1)
        if blocks[k + 1] <= horizon + 1
    ]
    if not usable:
        return tuple(1 for _ in range(space.n))
    stage_union = [fam.union_mask() for fam in families]
    block_cov = []
    for lo, hi in usable:
        u = np.zeros(space.n, dtype=bool)
        for j in range(lo, hi):
            u |= stage_union[j - 1]
        block_cov.append(u)
    tail = np.full(space.n, len(usable) + 1, dtype=np.int64)
    good = np.ones(space.n, dtype=bool)
    for k in range(len(usable), 0, -1):
        good = good & block_cov[k - 1]
        tail[good] = k
    return tuple(int(t) for t in tail)


def sc_plus_select(
    space: SampledSpace, covers: CoverSeq, tail_slack: int = DEFAULT_TAIL_SLACK
) -> ScPlusResult:
    """The block-selection engine: play the game with the covering policy,
    then assemble the families.  This is the engine the Haver pipeline
    consumes."""
    transcript = play_hurewicz_game(space, covers)
    return assemble_W(transcript, covers, tail_slack)


# -- selection checkers -----------------------------------------------------------


@dataclass(frozen=True)
class TailReport:
    ok: bool
    tail_start: tuple[int, ...] | None  # per point: least K covered from K on
    failures: tuple[int, ...]

    def __bool__(self) -> bool:
        return self.ok


def _picks_masks(
    space: SampledSpace, covers: CoverSeq, picks: Sequence[Sequence[int]]
) -> list[np.ndarray]:
    if len(picks) != covers.horizon:
        raise InputError("picks must give one (possibly empty) list per cover")
    masks = []
    for n, chosen in enumerate(picks, start=1):
        cov = covers.cover(n)
        u = np.zeros(space.n, dtype=bool)
        for ridx in chosen:
            if not 0 <= ridx < len(cov.regions):
                raise InputError(f"pick {ridx} outside cover {n}")
            u |= region_mask(cov.regions[ridx])
        masks.append(u)
    return masks


def hurewicz_selection_check(
    space: SampledSpace,
    covers: CoverSeq,
    picks: Sequence[Sequence[int]],
) -> TailReport:
    """Per point, the least K with the point in every pick-union from K to
    the horizon; fails listing the points with no such K."""
    masks = _picks_masks(space, covers, picks)
    N = len(masks)
    tail = np.full(space.n, -1, dtype=np.int64)
    suffix = np.ones(space.n, dtype=bool)
    for k in range(N, 0, -1):
        suffix = suffix & masks[k - 1]
        tail[suffix] = k
    bad = np.flatnonzero(tail == -1)
    if bad.size:
        return TailReport(False, None, tuple(int(b) for b in bad[:32]))
    return TailReport(True, tuple(int(t) for t in tail), ())


@dataclass(frozen=True)
class MengerReport:
    ok: bool
    witness: tuple[tuple[int, int], ...] | None  # per point: (stage, region idx)
    failure_point: int | None

    def __bool__(self) -> bool:
        return self.ok


def menger_selection_check(
    space: SampledSpace,
    covers: CoverSeq,
    picks: Sequence[Sequence[int]],
) -> MengerReport:
    """The concatenation of all picks must cover; reports the first orphan
    point otherwise, and per-point (stage, region) witnesses when it does."""
    masks = _picks_masks(space, covers, picks)
    witness: list[tuple[int, int] | None] = [None] * space.n
    covered = np.zeros(space.n, dtype=bool)
    for n, chosen in enumerate(picks, start=1):
        cov = covers.cover(n)
        for ridx in chosen:
            m = region_mask(cov.regions[ridx])
            for p in np.flatnonzero(m & ~covered):
                witness[int(p)] = (n, ridx)
            covered |= m
    if not covered.all():
        return MengerReport(False, None, int(np.flatnonzero(~covered)[0]))
    return MengerReport(True, tuple(w for w in witness if w is not None), None)
