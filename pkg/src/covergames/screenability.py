"""Pairwise-disjoint open refinements via shifted-brick colorings.

On a grid of spacing h in dimension d, bricks live on a lattice whose faces
sit at h/2 modulo h, so no sample point ever lies on a face and the open
bricks inherit the half-open cells' sample points without any shrinking.
Class c (of d+1) takes runs of d consecutive cells starting at cell index c
modulo d+1, leaving one-cell gaps, so same-class bricks are separated by at
least one cell side and the d+1 classes cover by pigeonhole: a point's cell
index k_i on axis i only rules out the single class congruent to k_i + 1.

Cell sides are whole multiples of h.  This working-resolution discipline is
what keeps the search honest: a single color class can never cover a grid
sample (the face at h/2 separates the points 0 and h), which is exactly the
dimension-theoretic behavior the construction is meant to exhibit.  Covers
strictly finer than the sample resolution admit no such brick grid; the game
pipelines then fall back to point-isolating boxes (a finite sample is
honestly zero-dimensional at sub-resolution scales), but the public
refinement operations never do.

Cantor samples use level boxes instead: fattened hulls of the surviving
level-L interval groups, one class, gaps at least a removed middle third.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .covers import (
    Ball,
    Box,
    Cover,
    CoverSeq,
    DisjointFamily,
    lebesgue_argmax_region,
    lebesgue_number,
    refines_check,
    region_mask,
)
from .exact import CheckFailure, InputError, exact_sqrt, sqrt_lower
from .space import CantorStructure, GridStructure, SampledSpace


class ResolutionError(CheckFailure):
    """The cover's Lebesgue number is too small for any admissible brick size."""


@dataclass(frozen=True)
class BrickGrid:
    """Geometry of one shifted-brick layout: lattice origin, cell side, and
    the d+1 classes of open boxes that contain at least one sample point."""

    dim: int
    cell_side: Fraction
    origin: Fraction
    class_shifts: tuple[int, ...]
    color_classes: tuple[tuple[Box, ...], ...]


def _grid_params(space: SampledSpace) -> tuple[int, Fraction]:
    st = space.structure
    if not isinstance(st, GridStructure):
        raise InputError("brick refinement needs a grid space")
    return st.dim, st.h


def _require_screenable(space: SampledSpace) -> None:
    """The box constructions measure extents in the coordinate metrics; the
    2-adic variant has no box-compatible geometry."""
    if space.metric_kind == "cantor_2adic":
        raise InputError(
            "screenability constructions need the euclidean or chebyshev "
            "sample metrics"
        )


def admissible_cell_sides(space: SampledSpace, below: Fraction) -> list[Fraction]:
    """Whole-h cell sides strictly below the given bound, largest first."""
    _, h = _grid_params(space)
    m = -((-below.numerator * h.denominator) // (below.denominator * h.numerator))
    m -= 1  # largest m with m*h < below
    top = max(0, m)
    return [h * k for k in range(top, 0, -1)]


def build_brick_grid(space: SampledSpace, cell_side: Fraction) -> BrickGrid:
    """Lay out the d+1 shifted brick classes at the given cell side.

    Only bricks containing at least one sample point are materialized; empty
    bricks contribute nothing to sample coverage and are dropped.
    """
    d, h = _grid_params(space)
    s = Fraction(cell_side)
    m = s / h
    if s <= 0 or m.denominator != 1:
        raise InputError("cell side must be a positive multiple of the grid spacing")
    m = int(m)
    origin = h / 2
    period = d + 1
    if space.scale * h == 1:
        # grid coordinates are k*h with integer table k: cell = (2k-1)//(2m)
        ik = np.asarray(space._icoords, dtype=np.int64)
        cells = (2 * ik - 1) // (2 * m)
    else:
        cells = np.array(
            [[(p[i] - origin) // s for i in range(d)] for p in space.points],
            dtype=np.int64,
        )
    classes: list[tuple[Box, ...]] = []
    for c in range(period):
        r = (cells - c) % period
        ok = (r != d).all(axis=1)
        z = (cells - c - r) // period
        buckets: dict[tuple[int, ...], None] = {}
        for pidx in np.flatnonzero(ok):
            buckets.setdefault(tuple(int(v) for v in z[pidx]), None)
        boxes = []
        for zt in sorted(buckets):
            lo = tuple(origin + (zi * period + c) * s for zi in zt)
            hi = tuple(origin + (zi * period + c + d) * s for zi in zt)
            boxes.append(Box(space, lo, hi))
        classes.append(tuple(boxes))
    return BrickGrid(d, s, origin, tuple(range(period)), tuple(classes))


def _witness_class(
    boxes: Sequence[Box], cover: Cover, lam: Fraction
) -> DisjointFamily:
    """Attach Lebesgue-certified parents to a class of boxes."""
    widx, kinds = [], []
    for b in boxes:
        anchor = int(np.flatnonzero(region_mask(b))[0])
        widx.append(lebesgue_argmax_region(cover, anchor, lam))
        kinds.append("analytic-lebesgue")
    return DisjointFamily(boxes, cover, witness=widx, witness_kinds=kinds)


def brick_refinement(
    space: SampledSpace, cover: Cover
) -> tuple[DisjointFamily, ...]:
    """d+1 pairwise-disjoint families jointly covering the sample, each
    refining the cover; 1 family on Cantor samples (dimension zero).

    Raises ResolutionError when no admissible brick size fits below
    lambda/(2d): the cover is finer than the sample resolution supports.
    """
    _require_screenable(space)
    if isinstance(space.structure, CantorStructure) or space.n == 1:
        lam = lebesgue_number(cover)
        return (_cantor_level_family(space, cover, lam),)
    d, h = _grid_params(space)
    lam = lebesgue_number(cover)
    sides = admissible_cell_sides(space, lam / (2 * d))
    if not sides:
        raise ResolutionError(
            f"resolution insufficient: Lebesgue number {lam} admits no brick "
            f"side of at least the grid spacing {h}",
            witness=lam,
        )
    grid = build_brick_grid(space, sides[0])
    families = tuple(
        _witness_class(cls, cover, lam) for cls in grid.color_classes
    )
    _assert_jointly_cover(space, families)
    return families


def _assert_jointly_cover(space, families) -> None:
    union = np.zeros(space.n, dtype=bool)
    for fam in families:
        union |= fam.union_mask()
    if not union.all():
        missing = int(np.flatnonzero(~union)[0])
        raise AssertionError(
            f"brick classes fail to cover sample point {missing}"
        )


def _cantor_level_family(
    space: SampledSpace, cover: Cover, lam: Fraction
) -> DisjointFamily:
    """One class of fattened level-interval boxes on a Cantor sample.

    Level L groups the sample into surviving-interval clusters of euclidean
    extent 3**-L - 3**-depth, pairwise separated by at least 3**-L; each
    fattened hull sits analytically inside the Lebesgue ball of its leftmost
    point.  The single point space degenerates to one box.
    """
    if space.n == 1:
        gamma = min(lam / 2, space.mesh / 2)
        p = space.points[0]
        box = Box(space, tuple(c - gamma for c in p), tuple(c + gamma for c in p))
        return _witness_class([box], cover, lam)
    st = space.structure
    assert isinstance(st, CantorStructure)
    depth = st.depth
    level = None
    for L in range(depth + 1):
        extent = Fraction(1, 3**L) - Fraction(1, 3**depth)
        gamma = min(Fraction(1, 4 * 3**L), lam / 2)
        if extent + gamma < lam:
            level = L
            break
    if level is None:
        raise ResolutionError(
            f"resolution insufficient: Lebesgue number {lam} below the "
            f"Cantor sample spacing",
            witness=lam,
        )
    gamma = min(Fraction(1, 4 * 3**level), lam / 2)
    groups: dict[int, list[int]] = {}
    for pidx, (coord,) in enumerate(space.points):
        key = (coord.numerator * 3**level) // coord.denominator  # floor(c * 3^L)
        groups.setdefault(key, []).append(pidx)
    boxes = []
    for key in sorted(groups):
        members = groups[key]
        lo = min(space.points[i][0] for i in members)
        hi = max(space.points[i][0] for i in members)
        boxes.append(Box(space, (lo - gamma,), (hi + gamma,)))
    return _witness_class(boxes, cover, lam)


def _pointwise_family(
    space: SampledSpace, cover: Cover, lam: Fraction
) -> DisjointFamily:
    """Point-isolating boxes: the sub-resolution fallback for game pipelines.

    gamma keeps the family margin-disjoint (pair gaps strictly above the
    space mesh) and every box analytically inside its anchor's Lebesgue ball.
    """
    d = space.coord_dim
    min_gap_sq = space.min_positive_gap_sq()
    g = exact_sqrt(min_gap_sq)
    if g is None:
        g = sqrt_lower(min_gap_sq, space.mesh / 2**20)
    margin = space.mesh
    if g <= margin:
        raise ResolutionError(
            "resolution insufficient: sample points closer than the mesh margin",
            witness=g,
        )
    gamma = min((g - margin) / 4, lam / (4 * d))
    if gamma <= 0:
        raise ResolutionError(
            "resolution insufficient: no room for point-isolating boxes",
            witness=lam,
        )
    boxes = [
        Box(
            space,
            tuple(c - gamma for c in p),
            tuple(c + gamma for c in p),
        )
        for p in space.points
    ]
    return _witness_class(boxes, cover, lam)


@dataclass(frozen=True)
class ScSelection:
    """Per-stage disjoint refining families whose union covers the sample."""

    families: tuple[DisjointFamily, ...]  # 1-based: families[n-1] refines cover n
    covering_witness: tuple[tuple[int, int], ...]  # per point: (stage, region idx)
    block_starts: tuple[int, ...]
    fallback_blocks: tuple[int, ...]  # block starts built by the pointwise fallback


def _blocks(horizon: int, width: int) -> list[tuple[int, int]]:
    """Consecutive 1-based blocks [start, end] of the given width; a trailing
    short block keeps the leftover stages."""
    out = []
    start = 1
    while start <= horizon:
        end = min(start + width - 1, horizon)
        out.append((start, end))
        start = end + 1
    return out


def sc_fin_select(
    space: SampledSpace,
    covers: CoverSeq,
    allow_pointwise: bool = False,
) -> ScSelection:
    """One disjoint refining family per cover, jointly covering the sample.

    Stages are grouped into blocks of screen_dim+1 consecutive covers; each
    full block gets one brick grid sized below (min of the block's Lebesgue
    numbers)/(2d), and color class c becomes the family of the block's c-th
    cover, so every full block already covers by pigeonhole.  A trailing
    short block contributes families without the coverage claim.

    With allow_pointwise (game pipelines only), a block whose covers are too
    fine for any admissible brick side instead hands its first cover the
    point-isolating family and the rest empty families.
    """
    _require_screenable(space)
    d = space.screen_dim
    if d is None:
        raise InputError("selective screenability needs a grid or Cantor space")
    if covers.horizon < d + 1:
        raise InputError(
            f"need at least screen_dim+1 = {d + 1} covers, got {covers.horizon}"
        )
    covers.validate()
    families, block_starts, fallback = _sc_fin_families(
        space, covers, allow_pointwise
    )
    union = np.zeros(space.n, dtype=bool)
    witness: list[tuple[int, int] | None] = [None] * space.n
    for n, fam in enumerate(families, start=1):
        for ridx, region in enumerate(fam.regions):
            m = region_mask(region)
            for p in np.flatnonzero(m & ~union):
                witness[int(p)] = (n, ridx)
            union |= m
    if not union.all():
        missing = int(np.flatnonzero(~union)[0])
        raise CheckFailure(
            f"selection fails to cover sample point {missing}", witness=missing
        )
    return ScSelection(
        tuple(families),
        tuple(w for w in witness if w is not None),
        tuple(block_starts),
        tuple(fallback),
    )


def _sc_fin_families(
    space: SampledSpace,
    covers: CoverSeq,
    allow_pointwise: bool,
    start: int = 1,
) -> tuple[list[DisjointFamily], list[int], list[int]]:
    """Families for covers[start..horizon]; returns (families, block starts,
    fallback block starts).  Raises ResolutionError when a full block is
    infeasible and the fallback is not allowed."""
    _require_screenable(space)
    d = space.screen_dim
    assert d is not None
    width = d + 1
    families: list[DisjointFamily] = []
    block_starts: list[int] = []
    fallback_starts: list[int] = []
    horizon = covers.horizon
    use_bricks = isinstance(space.structure, GridStructure) and space.n > 1
    for lo, hi in _blocks(horizon - start + 1, width):
        lo, hi = lo + start - 1, hi + start - 1
        block_starts.append(lo)
        block_covers = [covers.cover(n) for n in range(lo, hi + 1)]
        lams = [lebesgue_number(c) for c in block_covers]
        lam_blk = min(lams)
        if use_bricks:
            sides = admissible_cell_sides(space, lam_blk / (2 * d))
            if sides:
                grid = build_brick_grid(space, sides[0])
                for c, cov in enumerate(block_covers):
                    families.append(
                        _witness_class(grid.color_classes[c], cov, lams[c])
                    )
                if hi - lo + 1 == width:
                    _assert_block_covers(space, families[-width:])
                continue
            if not allow_pointwise:
                raise ResolutionError(
                    f"resolution insufficient for block {lo}..{hi}: Lebesgue "
                    f"number {lam_blk} admits no brick side",
                    witness=(lo, lam_blk),
                )
            families.append(_pointwise_family(space, block_covers[0], lams[0]))
            for cov in block_covers[1:]:
                families.append(DisjointFamily((), cov))
            fallback_starts.append(lo)
            continue
        # Cantor / single point: width == 1, one covering class per block
        try:
            families.append(
                _cantor_level_family(space, block_covers[0], lams[0])
            )
        except ResolutionError:
            if not allow_pointwise:
                raise
            families.append(_pointwise_family(space, block_covers[0], lams[0]))
            fallback_starts.append(lo)
    return families, block_starts, fallback_starts


def _assert_block_covers(space, block_families) -> None:
    union = np.zeros(space.n, dtype=bool)
    for fam in block_families:
        union |= fam.union_mask()
    assert union.all(), "a full brick block must cover the sample"


@dataclass(frozen=True)
class FiniteCWitness:
    n: int
    families: tuple[DisjointFamily, ...]


@dataclass(frozen=True)
class NoWitnessAtHorizon:
    horizon: int
    candidates_refuted: int
    refutations: tuple[tuple[str, int], ...]  # (candidate label, uncovered point)


def finite_c_search(
    space: SampledSpace, covers: CoverSeq
) -> FiniteCWitness | NoWitnessAtHorizon:
    """Smallest n <= horizon for which some brick candidate at the working
    resolution yields disjoint refinements of covers 1..n that jointly cover.

    For each n the standard block construction is tried first; failing that,
    every admissible candidate (each whole-h cell side up to the largest
    cover element, each class rotation; each Cantor level) is tried, keeping
    per candidate only the boxes that refine.  On a grid of dimension d the
    answer is d+1 for generic covers whenever the resolution suffices.  A
    negative answer carries the per-candidate refutations (an uncovered
    sample point each).
    """
    covers.validate()
    _require_screenable(space)
    d = space.screen_dim
    if d is None:
        raise InputError("finite_c_search needs a grid or Cantor space")
    refutations: list[tuple[str, int]] = []
    count = 0
    for n in range(1, covers.horizon + 1):
        prefix = CoverSeq(space, covers.covers[:n])
        try:
            families, _, _ = _sc_fin_families(space, prefix, allow_pointwise=False)
            union = np.zeros(space.n, dtype=bool)
            for fam in families:
                union |= fam.union_mask()
            if union.all():
                return FiniteCWitness(n, tuple(families))
        except ResolutionError:
            pass
        found, tried = _scan_candidates(space, prefix, refutations)
        count += tried
        if found is not None:
            return FiniteCWitness(n, found)
    return NoWitnessAtHorizon(covers.horizon, count, tuple(refutations[:64]))


def _candidate_class_lists(space: SampledSpace, horizon_extent: Fraction):
    """All brick candidates at the working resolution: (label, class list)."""
    if isinstance(space.structure, GridStructure):
        d, _ = _grid_params(space)
        for s in reversed(admissible_cell_sides(space, horizon_extent)):
            grid = build_brick_grid(space, s)
            for rot in range(d + 1):
                classes = tuple(
                    grid.color_classes[(c + rot) % (d + 1)] for c in range(d + 1)
                )
                yield f"side={s},rot={rot}", classes
    elif isinstance(space.structure, CantorStructure):
        depth = space.structure.depth
        for L in range(depth + 1):
            gamma = Fraction(1, 4 * 3**L)
            groups: dict[int, list[int]] = {}
            for pidx, (coord,) in enumerate(space.points):
                key = (coord.numerator * 3**L) // coord.denominator
                groups.setdefault(key, []).append(pidx)
            boxes = []
            for key in sorted(groups):
                members = groups[key]
                lo = min(space.points[i][0] for i in members)
                hi = max(space.points[i][0] for i in members)
                boxes.append(Box(space, (lo - gamma,), (hi + gamma,)))
            yield f"level={L}", (tuple(boxes),)


def _max_element_extent(covers: CoverSeq) -> Fraction:
    """Upper bound on how large a refining box can be: the widest cover
    element (complement shapes are unbounded, capped at the sample width)."""
    cap = covers.space.diameter_upper_bound() + 1
    worst = Fraction(0)
    for cover in covers.covers:
        for r in cover.regions:
            if isinstance(r, Ball):
                worst = max(worst, 2 * r.radius)
            elif isinstance(r, Box):
                worst = max(worst, max(h - l for l, h in zip(r.lo, r.hi)))
            else:
                return cap
    return min(worst + 1, cap)


def _scan_candidates(
    space: SampledSpace, prefix: CoverSeq, refutations: list[tuple[str, int]]
) -> tuple[tuple[DisjointFamily, ...] | None, int]:
    """Try every brick candidate against the prefix covers; return witnessed
    families on the first success, recording a refutation point otherwise."""
    n = prefix.horizon
    tried = 0
    extent = _max_element_extent(prefix)
    for label, classes in _candidate_class_lists(space, extent):
        tried += 1
        kept_per_stage: list[list[Box]] = []
        union = np.zeros(space.n, dtype=bool)
        for stage in range(1, n + 1):
            cls = classes[(stage - 1) % len(classes)]
            cov = prefix.cover(stage)
            kept = [b for b in cls if refines_check([b], cov).ok]
            kept_per_stage.append(kept)
            for b in kept:
                union |= region_mask(b)
        if union.all():
            families = tuple(
                DisjointFamily(tuple(kept), prefix.cover(stage))
                for stage, kept in enumerate(kept_per_stage, start=1)
            )
            return families, tried
        refutations.append((f"{label},n={n}", int(np.flatnonzero(~union)[0])))
    return None, tried
