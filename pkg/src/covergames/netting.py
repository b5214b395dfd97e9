"""Epsilon-nets, total-boundedness certificates, and the two chain
constructions: building a monotone totally-bounded chain out of shrinking
ball selections, and selecting finite subcovers out of such a chain.

The chain builder intersects tails of ball-selection coverages at the
doubling-exponent radii (1/2)**(2**n); the selector goes the other way,
turning a chain plus arbitrary validated covers into finite per-stage
selections.  Per-cover Lebesgue numbers do the refinement fitting: metric
re-construction has no desk-scale analogue, and a certified per-cover
radius is exact and sufficient for every pipeline here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .covers import (
    Ball,
    Cover,
    CoverSeq,
    covers_check,
    lebesgue_argmax_region,
    lebesgue_number,
    region_mask,
)
from .exact import CheckFailure, InputError, ResourceError, int_lt_bound, clamp_int64
from .space import SampledSpace, SubsetHandle, doubling_delta


@dataclass(frozen=True)
class NetCertificate:
    """A finite center set whose open epsilon-balls cover the target subset."""

    epsilon: Fraction
    centers: tuple[int, ...]
    covered: SubsetHandle


def validate_net(space: SampledSpace, cert: NetCertificate) -> bool:
    """Re-check a certificate pointwise: every covered point strictly within
    epsilon of some center."""
    cover = Cover(
        space,
        [Ball(space, c, cert.epsilon) for c in cert.centers],
        target=cert.covered,
    )
    return covers_check(cover).ok


def greedy_net(
    space: SampledSpace, subset: SubsetHandle, epsilon: Fraction
) -> NetCertificate:
    """Farthest-point greedy net of the subset, centers drawn from the subset.

    Ties among equidistant farthest candidates go to the lowest point index;
    the first center is the lowest-index point of the subset.  Terminates on
    any finite sample and always validates.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise InputError("epsilon must be positive")
    idx = np.fromiter(subset.indices(), dtype=np.int64)
    if idx.size == 0:
        raise InputError("greedy_net needs a nonempty subset")
    bound = int_lt_bound(epsilon * epsilon * space.dist_scale_sq)
    if space._fast:
        bound = clamp_int64(bound)
    centers = [int(idx[0])]
    best = space.dist_sq_row(centers[0])[idx]
    while True:
        worst_pos = int(np.argmax(best))  # argmax takes lowest index on ties
        if bool(best[worst_pos] <= bound):
            break
        c = int(idx[worst_pos])
        centers.append(c)
        row = space.dist_sq_row(c)[idx]
        best = np.minimum(best, row)
    return NetCertificate(epsilon, tuple(centers), subset)


@dataclass(frozen=True)
class MinimalNetResult:
    size: int
    centers: tuple[int, ...]
    exceeds_cap: bool = False


def minimal_net_bruteforce(
    space: SampledSpace,
    subset: SubsetHandle,
    epsilon: Fraction,
    cap: int | None = None,
) -> MinimalNetResult:
    """Minimum-cardinality net by exhaustive search over center subsets in
    increasing size; the oracle against which the greedy net is judged.

    Centers are drawn from the subset.  If no net of size <= cap exists the
    sentinel result (exceeds_cap=True) is returned.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise InputError("epsilon must be positive")
    idx = subset.indices()
    k = len(idx)
    if k == 0:
        raise InputError("minimal_net_bruteforce needs a nonempty subset")
    if k > 24:
        raise ResourceError("exhaustive net search is capped at 24 subset points")
    cap = k if cap is None else min(cap, k)
    bound = int_lt_bound(epsilon * epsilon * space.dist_scale_sq)
    if space._fast:
        bound = clamp_int64(bound)
    arr = np.fromiter(idx, dtype=np.int64)
    coverage = {}
    for c in idx:
        row = space.dist_sq_row(c)[arr]
        bits = 0
        for pos in np.flatnonzero(row <= bound):
            bits |= 1 << int(pos)
        coverage[c] = bits
    full = (1 << k) - 1
    for size in range(1, cap + 1):
        for combo in itertools.combinations(idx, size):
            got = 0
            for c in combo:
                got |= coverage[c]
            if got == full:
                return MinimalNetResult(size, tuple(combo))
    return MinimalNetResult(0, (), exceeds_cap=True)


@dataclass(frozen=True)
class SigmaDecomposition:
    """A monotone chain of totally bounded pieces whose union is the sample,
    with optional per-(stage, epsilon) net certificates."""

    space: SampledSpace
    chain: tuple[SubsetHandle, ...]
    certificates: dict[tuple[int, Fraction], NetCertificate]
    tail_start: tuple[int, ...]  # per point: least n with point in chain[n-1]

    @property
    def horizon(self) -> int:
        return len(self.chain)

    def stage(self, n: int) -> SubsetHandle:
        if not 1 <= n <= self.horizon:
            raise InputError(f"chain index {n} outside 1..{self.horizon}")
        return self.chain[n - 1]


def _validate_chain(space: SampledSpace, chain: Sequence[SubsetHandle]):
    for n in range(len(chain) - 1):
        if not chain[n].issubset(chain[n + 1]):
            raise CheckFailure(
                f"chain is not monotone at stage {n + 1}", witness=n + 1
            )
    union = 0
    for h in chain:
        union |= h.bits
    if union != space.subset_all().bits:
        missing = space.subset_all().bits & ~union
        orphan = missing.bit_length() - 1
        raise CheckFailure(
            f"chain union misses sample point {orphan}", witness=orphan
        )


def _tail_start(chain: Sequence[SubsetHandle], space: SampledSpace) -> tuple[int, ...]:
    out = []
    for p in range(space.n):
        k = next(
            (n + 1 for n, h in enumerate(chain) if h.contains_index(p)), None
        )
        assert k is not None
        out.append(k)
    return tuple(out)


def chain_decomposition(
    space: SampledSpace, chain: Sequence[SubsetHandle]
) -> SigmaDecomposition:
    """Wrap a directly-given monotone chain (validated) as a decomposition."""
    chain = tuple(chain)
    if not chain:
        raise InputError("chain must be nonempty")
    _validate_chain(space, chain)
    return SigmaDecomposition(space, chain, {}, _tail_start(chain, space))


def decompose_from_hurewicz(
    space: SampledSpace,
    selections: Mapping[int, Sequence[Ball]],
    horizon: int,
    epsilons: Sequence[Fraction] = (),
) -> SigmaDecomposition:
    """Chain stages as tail intersections of the selection coverages.

    selections maps stage m (1-based, indices may be missing) to a finite
    list of balls of radius exactly (1/2)**(2**m).  Stage n of the chain is
    the intersection of the selection unions over present m in n..horizon.
    Every sample point must lie in some tail (reported otherwise); for each
    requested epsilon a net certificate for stage n is extracted from the
    selection at the least stage m >= n whose radius is <= epsilon.
    """
    if horizon < 1:
        raise InputError("horizon must be >= 1")
    sel: dict[int, tuple[Ball, ...]] = {}
    for m, balls in selections.items():
        m = int(m)
        if not 1 <= m <= horizon:
            raise InputError(f"selection index {m} outside 1..{horizon}")
        want = doubling_delta(m)
        for b in balls:
            if not isinstance(b, Ball) or b.space is not space:
                raise InputError("selections must be balls on the given space")
            if b.radius != want:
                raise InputError(
                    f"selection {m} has a ball of radius {b.radius}, "
                    f"expected (1/2)^(2^{m}) = {want}"
                )
        sel[m] = tuple(balls)

    union_masks: dict[int, np.ndarray] = {}
    for m, balls in sel.items():
        u = np.zeros(space.n, dtype=bool)
        for b in balls:
            u |= region_mask(b)
        union_masks[m] = u

    chain = []
    for n in range(1, horizon + 1):
        x = np.ones(space.n, dtype=bool)
        for m in range(n, horizon + 1):
            if m in union_masks:
                x &= union_masks[m]
        chain.append(space.subset_from_mask(x))
    _validate_chain_precondition(space, chain)

    certificates: dict[tuple[int, Fraction], NetCertificate] = {}
    for n in range(1, horizon + 1):
        for eps in epsilons:
            eps = Fraction(eps)
            m = next(
                (
                    m
                    for m in range(n, horizon + 1)
                    if m in sel and doubling_delta(m) <= eps
                ),
                None,
            )
            if m is None:
                raise CheckFailure(
                    f"no selection stage >= {n} has radius <= {eps} "
                    f"within the horizon",
                    witness=(n, eps),
                )
            cert = NetCertificate(
                eps, tuple(b.center for b in sel[m]), chain[n - 1]
            )
            if not validate_net(space, cert):
                raise CheckFailure(
                    f"extracted certificate for stage {n} at epsilon {eps} "
                    f"does not validate",
                    witness=(n, eps),
                )
            certificates[(n, eps)] = cert

    return SigmaDecomposition(
        space, tuple(chain), certificates, _tail_start(chain, space)
    )


def _validate_chain_precondition(space: SampledSpace, chain: Sequence[SubsetHandle]):
    union = 0
    for h in chain:
        union |= h.bits
    if union != space.subset_all().bits:
        missing = space.subset_all().bits & ~union
        orphan = missing.bit_length() - 1
        raise CheckFailure(
            f"sample point {orphan} lies in no coverage tail: the truncated "
            f"tail condition fails",
            witness=orphan,
        )


@dataclass(frozen=True)
class HurewiczSelection:
    """Per-stage finite subcover picks (indices into each cover's regions),
    with the nets that produced them and the per-stage fitted balls."""

    picks: tuple[tuple[int, ...], ...]  # 1-based stage n -> picks[n-1]
    nets: tuple[NetCertificate, ...]
    ball_witness: tuple[tuple[tuple[int, int], ...], ...]  # (ball center, region)


def select_from_decomposition(
    space: SampledSpace,
    decomposition: SigmaDecomposition,
    covers: CoverSeq,
) -> HurewiczSelection:
    """Finite subcover picks: stage m takes a (lambda_m/2)-net of chain stage
    m and maps each net ball into a containing cover element via the
    Lebesgue guarantee.

    Contract: every sample point x lies in the union of the picks at every
    stage n >= (least m with x in stage m).
    """
    if covers.space is not space or decomposition.space is not space:
        raise InputError("decomposition and covers must live on the given space")
    if covers.horizon < decomposition.horizon:
        raise InputError("cover sequence shorter than the chain")
    covers.validate()
    _validate_chain(space, decomposition.chain)

    picks: list[tuple[int, ...]] = []
    nets: list[NetCertificate] = []
    witness: list[tuple[tuple[int, int], ...]] = []
    for m in range(1, covers.horizon + 1):
        cover = covers.cover(m)
        lam = lebesgue_number(cover)
        # beyond its horizon the chain is constant: its union is the sample,
        # so the final stage serves every later cover index
        stage = decomposition.stage(min(m, decomposition.horizon))
        if stage.is_empty():
            picks.append(())
            nets.append(NetCertificate(lam / 2, (), stage))
            witness.append(())
            continue
        net = greedy_net(space, stage, lam / 2)
        pairs = []
        chosen: list[int] = []
        for c in net.centers:
            ridx = lebesgue_argmax_region(cover, c, lam)
            pairs.append((c, ridx))
            if ridx not in chosen:
                chosen.append(ridx)
        picks.append(tuple(sorted(chosen)))
        nets.append(net)
        witness.append(tuple(pairs))
    return HurewiczSelection(tuple(picks), tuple(nets), tuple(witness))
