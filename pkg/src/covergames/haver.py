"""From a monotone totally-bounded chain and an epsilon schedule to a
verified small-diameter disjoint-family witness.

Pipeline per stage n (after normalizing the schedule so each term is
strictly below half its predecessor):

* delta_n = ((2**2**n - 1)/2**2**n) * (eps_n/2), strictly below eps_n/2;
* F_n = a greedy delta_n-net of chain stage n (centers inside the stage);
* U_n = the eps_n/2-balls at F_n plus the complement of the closed
  delta_n-balls at F_n -- a finite open cover of the whole sample, with the
  two structural facts asserted pointwise: closed delta_n-balls sit inside
  the open eps_n-balls, and stage n never meets the complement piece.

The block-selection engine is then run on (U_n) to the same horizon, its
families are filtered to the members analytically inside some eps_n/2 ball,
and the covering claim is replayed point by point: pick a materialized block
at or past the point's chain entry stage, find a covering stage j inside it,
and observe that the region containing the point cannot sit in the
complement piece (the point is in stage j), so it survived the filter.
Points whose replay would need blocks past the horizon raise a documented
horizon-exhausted error rather than being silently accepted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .covers import (
    Ball,
    CoClosedBalls,
    Cover,
    CoverSeq,
    DisjointFamily,
    analytic_contains,
    covers_check,
    region_mask,
)
from .exact import CheckFailure, InputError
from .game import ScPlusResult, sc_plus_select
from .netting import SigmaDecomposition, greedy_net
from .space import (
    SampledSpace,
    Schedule,
    paired_delta_schedule,
    diameter,
    epsilon_schedule,
)


class ClaimHorizonError(CheckFailure):
    """The covering-claim replay for some point needs blocks past the horizon."""


def normalize_epsilons(raw: Sequence[Fraction]) -> Schedule:
    """Monotonize a positive schedule so each term is strictly below half the
    previous one, never increasing any term.

    Terms already strict are kept; a term at or above half the previous one
    is replaced by a quarter of the previous (the largest power of one half
    that restores strictness).  Any witness for the output is a witness for
    the input.
    """
    vals = [Fraction(v) for v in raw]
    if not vals:
        raise InputError("epsilon schedule must be nonempty")
    if any(v <= 0 for v in vals):
        raise InputError("epsilon schedule terms must be positive")
    out = [vals[0]]
    for v in vals[1:]:
        prev = out[-1]
        out.append(v if v < prev / 2 else prev / 4)
    sched = epsilon_schedule(out)
    for n in range(1, sched.horizon):
        assert sched.value(n + 1) < sched.value(n) / 2
        assert sched.value(n) <= vals[n - 1] or n == 1
    return sched


@dataclass(frozen=True)
class StageCovers:
    """The per-stage two-piece covers with their nets and radii."""

    covers: CoverSeq
    nets: tuple[tuple[int, ...], ...]  # F_n center indices, 1-based stages
    deltas: tuple[Fraction, ...]
    complement_index: tuple[int, ...]  # index of the complement region per stage


def build_stage_covers(
    space: SampledSpace,
    chain: SigmaDecomposition,
    schedule: Schedule,
) -> StageCovers:
    """Build and validate the two-piece covers for each stage of the schedule.

    Requires the schedule normalized (strict halving) and a chain at least as
    long as the schedule horizon.
    """
    if chain.space is not space:
        raise InputError("chain must live on the given space")
    if schedule.kind != "epsilon":
        raise InputError("build_stage_covers expects an epsilon schedule")
    for n in range(1, schedule.horizon):
        if not schedule.value(n + 1) < schedule.value(n) / 2:
            raise InputError(
                "epsilon schedule must be normalized (strict halving); "
                "run normalize_epsilons first"
            )
    if chain.horizon < schedule.horizon:
        raise InputError("chain shorter than the schedule horizon")

    deltas = paired_delta_schedule(
        epsilon_schedule(schedule.values[: schedule.horizon])
    )
    covers = []
    nets = []
    comp_idx = []
    for n in range(1, schedule.horizon + 1):
        eps_n = schedule.value(n)
        delta_n = deltas.value(n)
        assert delta_n < eps_n / 2
        stage = chain.stage(n)
        if stage.is_empty():
            raise CheckFailure(
                f"chain stage {n} is empty; nets need a nonempty stage",
                witness=n,
            )
        net = greedy_net(space, stage, delta_n)
        centers = net.centers
        regions: list = [Ball(space, c, eps_n / 2) for c in centers]
        comp = CoClosedBalls(space, tuple((c, delta_n) for c in centers))
        regions.append(comp)
        cover = Cover(space, regions)
        rep = covers_check(cover)
        if not rep.ok:
            raise CheckFailure(
                f"stage {n} cover fails to cover point {rep.failure_point}",
                witness=rep.failure_point,
            )
        # closed delta-ball inside the open eps-ball, pointwise per center
        for c in centers:
            closed = space.within_le(c, delta_n)
            open_eps = space.within_lt(c, eps_n)
            if not bool(np.all(open_eps[closed])):
                raise AssertionError(
                    f"closed delta-ball at center {c} escapes the eps-ball"
                )
        # the stage never meets the complement piece
        if bool(np.any(region_mask(comp) & stage.mask())):
            raise AssertionError(
                f"stage {n} meets the complement piece of its own cover"
            )
        covers.append(cover)
        nets.append(tuple(centers))
        comp_idx.append(len(regions) - 1)
    return StageCovers(
        CoverSeq(space, covers), tuple(nets), tuple(deltas.values), tuple(comp_idx)
    )


@dataclass(frozen=True)
class ClaimTrace:
    point: int
    entry_stage: int  # least n with the point in chain stage n
    block_k: int
    block: tuple[int, int]
    stage: int
    region_index: int


@dataclass(frozen=True)
class HaverWitness:
    epsilon_schedule: Schedule
    families: tuple[DisjointFamily, ...]  # 1-based stages, filtered
    diam_bounds: tuple[Fraction, ...]  # per stage: max region diameter (upper bound)
    covering_witness: tuple[tuple[int, int], ...]  # per point: (stage, region idx)
    traces: tuple[ClaimTrace, ...]
    blocks: tuple[int, ...]
    stage_covers: StageCovers


def build_haver_witness(
    space: SampledSpace,
    chain: SigmaDecomposition,
    schedule: Schedule,
    scplus: Callable[[SampledSpace, CoverSeq], ScPlusResult] = sc_plus_select,
) -> HaverWitness:
    """Run the full pipeline and validate every invariant.

    The filter keeps exactly the engine-family members analytically inside
    some eps_n/2 ball at that stage's net; the replayed covering claim
    produces the per-point witness and traces.  A replay failure for a point
    inside the horizon indicates an implementation bug and raises;
    exhaustion of the horizon raises ClaimHorizonError.
    """
    for n in range(1, min(chain.horizon, schedule.horizon)):
        if not chain.stage(n).issubset(chain.stage(n + 1)):
            raise CheckFailure(f"chain is not monotone at stage {n}", witness=n)
    stage_covers = build_stage_covers(space, chain, schedule)
    engine_out = scplus(space, stage_covers.covers)
    horizon = schedule.horizon

    families: list[DisjointFamily] = []
    diam_bounds: list[Fraction] = []
    kept_raw_indices: list[dict[int, int]] = []
    for n in range(1, horizon + 1):
        eps_n = schedule.value(n)
        cover = stage_covers.covers.cover(n)
        raw = engine_out.family(n)
        kept, widx = [], []
        raw_to_kept: dict[int, int] = {}
        for raw_idx, region in enumerate(raw.regions):
            ball_idx = _find_containing_ball(
                region, cover, stage_covers.nets[n - 1], eps_n / 2, space
            )
            if ball_idx is not None:
                raw_to_kept[raw_idx] = len(kept)
                kept.append(region)
                widx.append(ball_idx)
        fam = DisjointFamily(
            tuple(kept),
            cover,
            witness=widx,
            witness_kinds=("analytic",) * len(kept),
        )
        worst = Fraction(0)
        for region in kept:
            d = diameter(space, space.subset_from_mask(region_mask(region)))
            if not d.value_sq < eps_n * eps_n:
                raise AssertionError(
                    f"a filtered region at stage {n} has diameter >= eps_{n}"
                )
            worst = max(worst, d.value)
        families.append(fam)
        diam_bounds.append(worst)
        kept_raw_indices.append(raw_to_kept)

    # replay the covering claim per point; per-stage owner tables make the
    # per-point lookups O(1)
    blocks = engine_out.blocks
    usable = engine_out.usable_blocks()
    stage_unions = []
    owners = []
    for n in range(1, horizon + 1):
        raw = engine_out.family(n)
        owner = np.full(space.n, -1, dtype=np.int64)
        for ridx, region in enumerate(raw.regions):
            owner[region_mask(region)] = ridx
        owners.append(owner)
        stage_unions.append(owner >= 0)
    kept_index = kept_raw_indices
    witness: list[tuple[int, int]] = []
    traces: list[ClaimTrace] = []
    for p in range(space.n):
        entry = chain.tail_start[p]
        trace = _replay_claim(
            p, entry, usable, blocks, stage_unions, owners, kept_index, horizon
        )
        traces.append(trace)
        witness.append((trace.stage, trace.region_index))

    covered = np.zeros(space.n, dtype=bool)
    for fam in families:
        covered |= fam.union_mask()
    assert covered.all(), "claim replay succeeded but the union misses a point"

    return HaverWitness(
        schedule,
        tuple(families),
        tuple(diam_bounds),
        tuple(witness),
        tuple(traces),
        blocks,
        stage_covers,
    )


def _find_containing_ball(
    region, cover: Cover, net: tuple[int, ...], radius: Fraction, space
) -> int | None:
    """Index (within the cover) of a net ball analytically containing the
    region.

    Only centers strictly within the radius of the region's anchor point can
    contain it (the anchor lies in the region), so the candidate prune is
    exact and complete.  Regions with no sample points are dropped: they
    contribute nothing to any invariant.
    """
    mask = region_mask(region)
    anchors = np.flatnonzero(mask)
    if anchors.size == 0:
        return None
    anchor = int(anchors[0])
    hits = space.within_lt(anchor, radius)
    for bidx, center in enumerate(net):
        if not hits[center]:
            continue
        if analytic_contains(region, cover.regions[bidx]):
            return bidx
    return None


def _replay_claim(
    p: int,
    entry: int,
    usable: list[tuple[int, int]],
    blocks: tuple[int, ...],
    stage_unions: list[np.ndarray],
    owners: list[np.ndarray],
    kept_index: list[dict[int, int]],
    horizon: int,
) -> ClaimTrace:
    saw_eligible = False
    for k, (lo, hi) in enumerate(usable, start=1):
        if lo < entry:
            continue
        saw_eligible = True
        for j in range(lo, min(hi, horizon + 1)):
            if not stage_unions[j - 1][p]:
                continue
            region_idx = int(owners[j - 1][p])
            kept_idx = kept_index[j - 1].get(region_idx)
            if kept_idx is None:
                raise CheckFailure(
                    f"claim replay failed at point {p}: the region covering it "
                    f"at stage {j} did not survive the filter (an "
                    f"implementation bug, not a math failure)",
                    witness=(p, j, blocks),
                )
            return ClaimTrace(p, entry, k, (lo, hi), j, kept_idx)
    if saw_eligible:
        raise CheckFailure(
            f"claim replay failed at point {p}: no eligible block contains a "
            f"covering stage (an implementation bug, not a math failure)",
            witness=(p, entry, blocks),
        )
    raise ClaimHorizonError(
        f"claim replay for point {p} (chain entry stage {entry}) needs a "
        f"materialized block at or past stage {entry}; blocks {blocks} within "
        f"horizon {horizon} are exhausted",
        witness=(p, entry, blocks),
    )
