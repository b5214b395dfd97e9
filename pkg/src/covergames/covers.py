"""Open regions, covers, refinement and disjointness checks, Lebesgue numbers.

Region shapes are analytic descriptions (open metric balls centered at sample
points, axis boxes, complements of finite unions of closed balls) evaluated
exactly against a sample.  Containment and separation are decided by exact
analytic tests where the shape pair supports one, and on the sample
otherwise; every check reports which kind of evidence it used.

Box ends are open by default.  A closed end is allowed only where it is
vacuous on the sample (at or beyond the sample's bounding box), which is how
relatively-open truncations like [0, 0.6) on [0,1] are expressed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .exact import (
    CheckFailure,
    InputError,
    clamp_int64,
    exact_sqrt,
    int_le_bound,
    int_lt_bound,
    sqrt_lower,
    sqrt_upper,
)
from .space import SampledSpace, SubsetHandle

UNCOVERED_REPORT_CAP = 16


@dataclass(frozen=True)
class Ball:
    """Open metric ball around a sample point: {x : d(x, center) < radius}."""

    space: SampledSpace
    center: int
    radius: Fraction

    def __post_init__(self):
        if not 0 <= self.center < self.space.n:
            raise InputError(f"ball center index {self.center} out of range")
        if self.radius <= 0:
            raise InputError("ball radius must be positive")
        object.__setattr__(
            self, "_hash", hash((id(self.space), "ball", self.center, self.radius))
        )

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return (
            isinstance(other, Ball)
            and self.space is other.space
            and self.center == other.center
            and self.radius == other.radius
        )


@dataclass(frozen=True)
class Box:
    """Open axis box, with optionally closed ends at the sample boundary."""

    space: SampledSpace
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]
    lo_closed: tuple[bool, ...] = ()
    hi_closed: tuple[bool, ...] = ()

    def __post_init__(self):
        d = self.space.coord_dim
        if len(self.lo) != d or len(self.hi) != d:
            raise InputError("box bounds must match the space dimension")
        if not self.lo_closed:
            object.__setattr__(self, "lo_closed", (False,) * d)
        if not self.hi_closed:
            object.__setattr__(self, "hi_closed", (False,) * d)
        if len(self.lo_closed) != d or len(self.hi_closed) != d:
            raise InputError("box end flags must match the space dimension")
        for i in range(d):
            if self.lo[i] >= self.hi[i]:
                raise InputError("box needs lo < hi on every axis")
        # closed ends must be vacuous on the sample (relative openness)
        for i in range(d):
            if self.lo_closed[i] and self.lo[i] > self.space.axis_min[i]:
                raise InputError("closed lower end must sit at/below the sample")
            if self.hi_closed[i] and self.hi[i] < self.space.axis_max[i]:
                raise InputError("closed upper end must sit at/above the sample")
        object.__setattr__(
            self,
            "_hash",
            hash(
                (
                    id(self.space),
                    "box",
                    self.lo,
                    self.hi,
                    self.lo_closed,
                    self.hi_closed,
                )
            ),
        )

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return (
            isinstance(other, Box)
            and self.space is other.space
            and self.lo == other.lo
            and self.hi == other.hi
            and self.lo_closed == other.lo_closed
            and self.hi_closed == other.hi_closed
        )

    def corners(self):
        d = len(self.lo)
        for mask in range(1 << d):
            yield tuple(
                self.hi[i] if (mask >> i) & 1 else self.lo[i] for i in range(d)
            )


@dataclass(frozen=True)
class CoClosedBalls:
    """Complement of a finite union of closed balls: d(x, c_i) > r_i for all i."""

    space: SampledSpace
    balls: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        for c, r in self.balls:
            if not 0 <= c < self.space.n:
                raise InputError(f"closed-ball center index {c} out of range")
            if r <= 0:
                raise InputError("closed-ball radius must be positive")
        object.__setattr__(self, "_hash", hash((id(self.space), "co", self.balls)))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return (
            isinstance(other, CoClosedBalls)
            and self.space is other.space
            and self.balls == other.balls
        )


OpenRegion = Union[Ball, Box, CoClosedBalls]


# -- membership -------------------------------------------------------------------


def region_mask(region: OpenRegion) -> np.ndarray:
    """Boolean membership over all sample points (cached per space)."""
    space = region.space
    cached = space._mask_cache.get(region)
    if cached is not None:
        return cached
    if isinstance(region, Ball):
        mask = space.within_lt(region.center, region.radius)
    elif isinstance(region, Box):
        mask = np.ones(space.n, dtype=bool)
        icoords = space._icoords
        scale = space.scale
        for i in range(space.coord_dim):
            lo_s = region.lo[i] * scale
            hi_s = region.hi[i] * scale
            col = icoords[:, i]
            if region.lo_closed[i]:
                # x >= lo  <=>  ix >= ceil(lo_s)  <=>  ix > ceil(lo_s) - 1
                b = -int_le_bound(-lo_s) - 1
            else:
                b = int_le_bound(lo_s)  # x > lo  <=>  ix > floor(lo_s)
            mask &= np.asarray(col > (clamp_int64(b) if space._fast else b), bool)
            if region.hi_closed[i]:
                b = int_le_bound(hi_s)  # x <= hi  <=>  ix <= floor(hi_s)
            else:
                b = int_lt_bound(hi_s)  # x < hi   <=>  ix <= ceil(hi_s)-1
            mask &= np.asarray(col <= (clamp_int64(b) if space._fast else b), bool)
    else:
        mask = np.ones(space.n, dtype=bool)
        for c, r in region.balls:
            mask &= ~space.within_le(c, r)
    mask.flags.writeable = False
    if (len(space._mask_cache) + 1) * space.n < 2**24:  # ~16 MB of bool masks
        space._mask_cache[region] = mask
    return mask


def contains(region: OpenRegion, p: int) -> bool:
    """Exact membership of sample point p in the region."""
    if not 0 <= p < region.space.n:
        raise InputError(f"point index {p} out of range")
    return bool(region_mask(region)[p])


# -- covers -------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageReport:
    ok: bool
    assignment: tuple[int, ...] | None  # region index per target point, -1 off-target
    failure_point: int | None
    uncovered: tuple[int, ...]

    def __bool__(self) -> bool:
        return self.ok


class Cover:
    """A finite list of regions intended to cover a target subset.

    Validation is lazy (covers_check); intermediate non-covering families are
    first-class values in the longer pipelines.
    """

    def __init__(
        self,
        space: SampledSpace,
        regions: Sequence[OpenRegion],
        target: SubsetHandle | None = None,
    ):
        for r in regions:
            if r.space is not space:
                raise InputError("cover regions must live on the cover's space")
        self.space = space
        self.regions = tuple(regions)
        self.target = target if target is not None else space.subset_all()
        self._masks: list[np.ndarray] | None = None
        self._lebesgue: Fraction | None = None

    def masks(self) -> list[np.ndarray]:
        if self._masks is None:
            self._masks = [region_mask(r) for r in self.regions]
        return self._masks

    def union_mask(self) -> np.ndarray:
        out = np.zeros(self.space.n, dtype=bool)
        for m in self.masks():
            out |= m
        return out


def covers_check(cover: Cover) -> CoverageReport:
    """Per-point region assignment, or the first uncovered target point.

    The assignment picks the lowest containing region index per point; the
    failure point is the lowest-index uncovered point, with further uncovered
    points reported up to a cap.
    """
    space = cover.space
    tmask = cover.target.mask()
    assignment = np.full(space.n, -1, dtype=np.int64)
    remaining = tmask.copy()
    for idx, m in enumerate(cover.masks()):
        hit = remaining & m
        assignment[hit] = idx
        remaining &= ~m
    uncovered = np.flatnonzero(remaining)
    if uncovered.size:
        return CoverageReport(
            False,
            None,
            int(uncovered[0]),
            tuple(int(u) for u in uncovered[:UNCOVERED_REPORT_CAP]),
        )
    return CoverageReport(True, tuple(int(a) for a in assignment), None, ())


# -- analytic containment (sufficient tests) ---------------------------------------


def _dist_sq(space: SampledSpace, i: int, j: int) -> Fraction:
    return space.distance_sq(i, j)


def _axis_interval(region: Ball) -> tuple[list[Fraction], list[Fraction]]:
    space = region.space
    c = space.points[region.center]
    lo = [ci - region.radius for ci in c]
    hi = [ci + region.radius for ci in c]
    return lo, hi


def _point_box_gap_sq(space, p: int, box: Box) -> tuple[Fraction, bool]:
    """Squared metric gap from sample point p to the (closed) box.

    Returns (gap_sq, inside_closed): euclidean sums per-axis clamp gaps,
    chebyshev takes their max.
    """
    coords = space.points[p]
    gaps = []
    for i in range(space.coord_dim):
        x = coords[i]
        if x < box.lo[i]:
            gaps.append(box.lo[i] - x)
        elif x > box.hi[i]:
            gaps.append(x - box.hi[i])
        else:
            gaps.append(Fraction(0))
    if space.metric_kind == "chebyshev":
        g = max(gaps)
        return g * g, all(g == 0 for g in gaps)
    gsq = sum((g * g for g in gaps), Fraction(0))
    return gsq, all(g == 0 for g in gaps)


def analytic_contains(inner: OpenRegion, outer: OpenRegion) -> bool:
    """Exact sufficient test that inner is a subset of outer as analytic sets.

    A True answer certifies true containment in the ambient space; a False
    answer is inconclusive (callers fall back to sample containment).
    The cantor_2adic metric supports only the same-center / same-shape cases.
    """
    space = inner.space
    if outer.space is not space:
        return False
    metric = space.metric_kind

    if isinstance(inner, Ball) and isinstance(outer, Ball):
        if inner.center == outer.center:
            return inner.radius <= outer.radius
        if metric == "cantor_2adic":
            # ultrametric: B(c1,r1) centered anywhere inside B(c2,r2) with
            # r1 <= r2 and d(c1,c2) < r2 is contained
            d_sq = _dist_sq(space, inner.center, outer.center)
            return inner.radius <= outer.radius and d_sq < outer.radius**2
        if inner.radius > outer.radius:
            return False
        d_sq = _dist_sq(space, inner.center, outer.center)
        return d_sq <= (outer.radius - inner.radius) ** 2

    if metric == "cantor_2adic":
        return False

    if isinstance(inner, Ball) and isinstance(outer, Box):
        lo, hi = _axis_interval(inner)
        for i in range(space.coord_dim):
            lo_ok = lo[i] >= outer.lo[i] if not outer.lo_closed[i] else True
            hi_ok = hi[i] <= outer.hi[i] if not outer.hi_closed[i] else True
            if not (lo_ok and hi_ok):
                return False
        return True

    if isinstance(inner, Ball) and isinstance(outer, CoClosedBalls):
        for c, r in outer.balls:
            d_sq = _dist_sq(space, inner.center, c)
            if d_sq < (inner.radius + r) ** 2:
                return False
        return True

    if isinstance(inner, Box) and isinstance(outer, Ball):
        center = space.points[outer.center]
        rsq = outer.radius**2
        scale_needed = metric == "euclidean"
        for corner in inner.corners():
            if metric == "chebyshev":
                d = max(abs(ci - xi) for ci, xi in zip(corner, center))
                dsq = d * d
            else:
                dsq = sum(
                    ((ci - xi) ** 2 for ci, xi in zip(corner, center)), Fraction(0)
                )
            if dsq >= rsq:
                return False
        return True

    if isinstance(inner, Box) and isinstance(outer, Box):
        for i in range(len(inner.lo)):
            if inner.lo_closed[i] and not outer.lo_closed[i]:
                if outer.lo[i] >= inner.lo[i]:
                    return False
            elif outer.lo[i] > inner.lo[i]:
                return False
            if inner.hi_closed[i] and not outer.hi_closed[i]:
                if outer.hi[i] <= inner.hi[i]:
                    return False
            elif outer.hi[i] < inner.hi[i]:
                return False
        return True

    if isinstance(inner, Box) and isinstance(outer, CoClosedBalls):
        for c, r in outer.balls:
            gap_sq, inside = _point_box_gap_sq(space, c, inner)
            if inside or gap_sq <= r * r:
                return False
        return True

    return False  # CoClosedBalls as inner: sample evidence only


def sample_contains(inner: OpenRegion, outer: OpenRegion) -> bool:
    im = region_mask(inner)
    om = region_mask(outer)
    return bool(np.all(om[im]))


def region_contained_in(inner: OpenRegion, outer: OpenRegion) -> Optional[str]:
    """Containment decision: "analytic", "sample", or None.

    Analytic evidence implies sample evidence; sample evidence is the
    desk-scale stand-in where no exact shape test applies.
    """
    if analytic_contains(inner, outer):
        return "analytic"
    if sample_contains(inner, outer):
        return "sample"
    return None


@dataclass(frozen=True)
class RefinesReport:
    ok: bool
    witness: tuple[tuple[int, str], ...] | None  # per fine region: (coarse idx, kind)
    counterexample: tuple[int, int] | None  # (fine region index, sample point)

    def __bool__(self) -> bool:
        return self.ok


def refines_check(fine: Sequence[OpenRegion], coarse: Cover) -> RefinesReport:
    """Witness that every fine region sits inside some coarse region.

    Prefers analytic witnesses; falls back to sample containment.  On
    failure, reports the offending fine region together with a sample point
    of it that escapes the best (largest-overlap) coarse candidate.
    """
    witness = []
    for fidx, f in enumerate(fine):
        if f.space is not coarse.space:
            raise InputError("refinement operands must share one space")
        found = None
        for cidx, c in enumerate(coarse.regions):
            if analytic_contains(f, c):
                found = (cidx, "analytic")
                break
        if found is None:
            fm = region_mask(f)
            for cidx, cm in enumerate(coarse.masks()):
                if bool(np.all(cm[fm])):
                    found = (cidx, "sample")
                    break
        if found is None:
            fm = region_mask(f)
            best_idx, best_overlap = 0, -1
            for cidx, cm in enumerate(coarse.masks()):
                overlap = int((fm & cm).sum())
                if overlap > best_overlap:
                    best_idx, best_overlap = cidx, overlap
            escape = np.flatnonzero(fm & ~coarse.masks()[best_idx])
            pt = int(escape[0]) if escape.size else int(np.flatnonzero(fm)[0])
            return RefinesReport(False, None, (fidx, pt))
        witness.append(found)
    return RefinesReport(True, tuple(witness), None)


# -- disjointness ---------------------------------------------------------------------


def _axis_gaps(lo1, hi1, lo2, hi2) -> list[Fraction] | None:
    """Per-axis gaps between two boxes; None when the open boxes intersect."""
    gaps = []
    overlap_all = True
    for a1, b1, a2, b2 in zip(lo1, hi1, lo2, hi2):
        if b1 <= a2:
            gaps.append(a2 - b1)
            overlap_all = False
        elif b2 <= a1:
            gaps.append(a1 - b2)
            overlap_all = False
        else:
            gaps.append(Fraction(0))
    if overlap_all:
        return None
    return gaps


def analytic_gap_ge(
    r1: OpenRegion, r2: OpenRegion, margin: Fraction
) -> Optional[bool]:
    """Exact test that the metric gap between two regions is >= margin.

    Returns None when the shape pair has no analytic gap (complement shapes,
    or the cantor_2adic metric on non-ball shapes).  margin 0 means open-set
    disjointness (touching closures allowed).
    """
    space = r1.space
    metric = space.metric_kind

    def ival(r):
        if isinstance(r, Ball):
            return _axis_interval(r)
        if isinstance(r, Box):
            return list(r.lo), list(r.hi)
        return None

    if isinstance(r1, Ball) and isinstance(r2, Ball):
        d_sq = _dist_sq(space, r1.center, r2.center)
        need = r1.radius + r2.radius + margin
        return d_sq >= need * need

    if metric == "cantor_2adic":
        return None
    i1, i2 = ival(r1), ival(r2)
    if i1 is None or i2 is None:
        return None

    if isinstance(r1, Box) and isinstance(r2, Box):
        gaps = _axis_gaps(i1[0], i1[1], i2[0], i2[1])
        if gaps is None:
            return False
        if metric == "chebyshev":
            return max(gaps) >= margin
        gsq = sum((g * g for g in gaps), Fraction(0))
        return gsq >= margin * margin

    # ball vs box: gap = d(center, box) - radius
    ball, box = (r1, r2) if isinstance(r1, Ball) else (r2, r1)
    gap_sq, inside = _point_box_gap_sq(space, ball.center, box)
    need = ball.radius + margin
    if inside:
        return False
    return gap_sq >= need * need


@dataclass(frozen=True)
class DisjointReport:
    ok: bool
    violating_pair: tuple[int, int] | None
    reason: str | None  # "shared_point" | "analytic_overlap" | "gap_below_margin"
    witness_point: int | None

    def __bool__(self) -> bool:
        return self.ok


def pairwise_disjoint_check(
    regions: Sequence[OpenRegion], margin: Fraction
) -> DisjointReport:
    """Pairwise disjointness: no shared sample point, and analytic gap >= margin
    wherever the shape pair supports an exact gap."""
    if margin < 0:
        raise InputError("margin must be nonnegative")
    n = len(regions)
    if n <= 1:
        return DisjointReport(True, None, None, None)
    space = regions[0].space
    masks = [region_mask(r) for r in regions]

    # shared sample points: count memberships per point
    counts = np.zeros(space.n, dtype=np.int32)
    for m in masks:
        counts += m
    multi = np.flatnonzero(counts > 1)
    if multi.size:
        p = int(multi[0])
        owners = [i for i, m in enumerate(masks) if m[p]]
        return DisjointReport(False, (owners[0], owners[1]), "shared_point", p)

    order = _pair_order(regions, margin)
    for i, j in order:
        verdict = analytic_gap_ge(regions[i], regions[j], margin)
        if verdict is False:
            reason = (
                "analytic_overlap"
                if analytic_gap_ge(regions[i], regions[j], Fraction(0)) is False
                else "gap_below_margin"
            )
            return DisjointReport(False, (i, j), reason, None)
    return DisjointReport(True, None, None, None)


def _pair_order(regions: Sequence[OpenRegion], margin: Fraction):
    """All index pairs, pruned by a certified float prefilter for large box
    families (the only families that get big in practice).

    A pair is skipped only when a conservatively-rounded axis gap already
    exceeds margin in float, which lower-bounds the true metric gap in both
    supported metrics.
    """
    n = len(regions)
    if n <= 64 or not all(isinstance(r, Box) for r in regions):
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    # conservative float bounding boxes: lo rounded down, hi rounded up
    lo = np.array([[np.nextafter(float(x), -np.inf) for x in r.lo] for r in regions])
    hi = np.array([[np.nextafter(float(x), np.inf) for x in r.hi] for r in regions])
    pad = np.nextafter(float(margin), np.inf)
    pairs = []
    for i in range(n):
        # exact attention needed unless some axis gap certainly exceeds margin
        close = np.ones(n - i - 1, dtype=bool)
        for ax in range(lo.shape[1]):
            gap_above = lo[i + 1 :, ax] - hi[i, ax]  # j sits above i
            gap_below = lo[i, ax] - hi[i + 1 :, ax]  # j sits below i
            close &= (gap_above <= pad) & (gap_below <= pad)
        for off in np.flatnonzero(close):
            pairs.append((i, i + 1 + int(off)))
    return pairs


# -- Lebesgue numbers ------------------------------------------------------------------


def _containment_radius_lb(
    region: OpenRegion, p: int, tol: Fraction
) -> Fraction | None:
    """Rational lower bound for the analytic containment radius of region at p.

    The containment radius cr satisfies: the open ball B(p, cr) is a subset of
    the region.  Returns None when p is not in the region.  Exact whenever
    distances are rational; otherwise within tol of exact.
    """
    space = region.space
    if not contains(region, p):
        return None
    cap = space.diameter_upper_bound() + 1

    def dist_lb_ub(i: int, j: int) -> tuple[Fraction, Fraction]:
        dsq = space.distance_sq(i, j)
        d = exact_sqrt(dsq)
        if d is not None:
            return d, d
        return sqrt_lower(dsq, tol), sqrt_upper(dsq, tol)

    if isinstance(region, Ball):
        _, dub = dist_lb_ub(region.center, p)
        return min(region.radius - dub, cap)
    if isinstance(region, Box):
        coords = space.points[p]
        slack = cap
        for i in range(space.coord_dim):
            if not region.lo_closed[i]:
                slack = min(slack, coords[i] - region.lo[i])
            if not region.hi_closed[i]:
                slack = min(slack, region.hi[i] - coords[i])
        return slack
    # complement of closed balls: cr = min_i (d(p, c_i) - r_i)
    slack = cap
    for c, r in region.balls:
        dlb, _ = dist_lb_ub(c, p)
        slack = min(slack, dlb - r)
    return slack


def lebesgue_number(cover: Cover) -> Fraction:
    """A certified positive refinement radius for a validated cover.

    lambda = min over target points p of max over regions containing p of a
    rational lower bound of the analytic containment radius.  Guarantee: for
    every target point p there is a single cover region that analytically
    contains the open ball B(p, lambda); in particular all sample points
    within lambda of p lie in one region.
    """
    if cover._lebesgue is not None:
        return cover._lebesgue
    report = covers_check(cover)
    if not report.ok:
        raise CheckFailure(
            f"cover does not cover its target (first uncovered point "
            f"{report.failure_point})",
            witness=report.failure_point,
        )
    space = cover.space
    t_idx = np.flatnonzero(cover.target.mask())
    masks = cover.masks()
    tol = space.mesh / 2**20
    lam: Fraction | None = None
    for p in t_idx:
        p = int(p)
        best: Fraction | None = None
        local_tol = tol
        while True:
            for ridx, region in enumerate(cover.regions):
                if not masks[ridx][p]:
                    continue
                cr = _containment_radius_lb(region, p, local_tol)
                if cr is not None and (best is None or cr > best):
                    best = cr
            if best is not None and best > 0:
                break
            # true radius is positive; refine the sqrt tolerance and retry
            local_tol /= 2**20
            best = None
        lam = best if lam is None else min(lam, best)
    assert lam is not None and lam > 0
    cover._lebesgue = lam
    return lam


def lebesgue_argmax_region(cover: Cover, p: int, lam: Fraction) -> int:
    """Index of a cover region analytically containing B(p, lam).

    Deterministic: the lowest region index whose containment-radius lower
    bound at p reaches lam.
    """
    space = cover.space
    masks = cover.masks()
    tol = space.mesh / 2**20
    while True:
        for ridx, region in enumerate(cover.regions):
            if not masks[ridx][p]:
                continue
            cr = _containment_radius_lb(region, p, tol)
            if cr is not None and cr >= lam:
                return ridx
        tol /= 2**20
        if tol < space.mesh / 2**400:
            raise CheckFailure(
                f"no region certifies the Lebesgue ball at point {p}", witness=p
            )


# -- families -------------------------------------------------------------------------


class DisjointFamily:
    """A pairwise-disjoint family of regions refining a parent cover.

    Construction validates both halves and records the refinement witness
    (parent region index and evidence kind per member).  The disjointness
    margin defaults to the space mesh.
    """

    def __init__(
        self,
        regions: Sequence[OpenRegion],
        parent: Cover,
        witness: Sequence[int] | None = None,
        witness_kinds: Sequence[str] | None = None,
        margin: Fraction | None = None,
    ):
        self.space = parent.space
        self.regions = tuple(regions)
        self.parent = parent
        self.margin = self.space.mesh if margin is None else margin
        dis = pairwise_disjoint_check(self.regions, self.margin)
        if not dis.ok:
            raise CheckFailure(
                f"family is not pairwise disjoint: regions {dis.violating_pair} "
                f"({dis.reason})",
                witness=dis,
            )
        if witness is None:
            ref = refines_check(self.regions, parent)
            if not ref.ok:
                raise CheckFailure(
                    f"family does not refine its parent cover: {ref.counterexample}",
                    witness=ref.counterexample,
                )
            self.witness = tuple(w[0] for w in ref.witness)
            self.witness_kinds = tuple(w[1] for w in ref.witness)
        else:
            self.witness = tuple(witness)
            self.witness_kinds = (
                tuple(witness_kinds)
                if witness_kinds is not None
                else ("given",) * len(self.regions)
            )
            for r, widx in zip(self.regions, self.witness):
                if region_contained_in(r, parent.regions[widx]) is None:
                    raise CheckFailure(
                        "refinement witness does not hold on the sample",
                        witness=(r, widx),
                    )

    def union_mask(self) -> np.ndarray:
        out = np.zeros(self.space.n, dtype=bool)
        for r in self.regions:
            out |= region_mask(r)
        return out

    def __len__(self) -> int:
        return len(self.regions)


class CoverSeq:
    """A finite 1-indexed sequence of covers over a common space."""

    def __init__(self, space: SampledSpace, covers: Sequence[Cover]):
        for c in covers:
            if c.space is not space:
                raise InputError("all covers must live on the same space")
        self.space = space
        self.covers = tuple(covers)
        self.horizon = len(covers)

    def cover(self, n: int) -> Cover:
        if not 1 <= n <= self.horizon:
            raise InputError(f"cover index {n} outside 1..{self.horizon}")
        return self.covers[n - 1]

    def validate(self) -> None:
        for n in range(1, self.horizon + 1):
            rep = covers_check(self.cover(n))
            if not rep.ok:
                raise CheckFailure(
                    f"cover {n} fails to cover (point {rep.failure_point})",
                    witness=(n, rep.failure_point),
                )
