"""Desk-scale metric spaces: finite samples with exact metrics.

A compact metric space is represented by a finite dense sample of it.  All
coordinates are exact rationals and all distance comparisons are decided
exactly: squared distances are integers once scaled by the square of the
coordinate lcm denominator, so "d(p,q) < r" becomes an integer comparison.

Three metric kinds are supported:

* ``euclidean``   -- squared distances are rational; distances themselves are
  rational only in dimension one.
* ``chebyshev``   -- max-coordinate metric, always rational.
* ``cantor_2adic``-- ultrametric on middle-thirds endpoints: (1/2)**L where L
  is the first ternary level at which the two addresses differ.

"Covers the space" always means "covers the sample"; infinite sequences are
truncated at an explicit horizon by the callers.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .exact import (
    InputError,
    ResourceError,
    clamp_int64,
    exact_sqrt,
    int_le_bound,
    int_lt_bound,
    parse_rational,
    sqrt_upper,
)

METRIC_KINDS = ("euclidean", "chebyshev", "cantor_2adic")

DEFAULT_POINT_CAP = 2**20
POINT_CAP_ENV = "COVER_GAMES_POINT_CAP"

# rational upper bounds for sqrt(d), d = 1..3, used for grid mesh values
_EUCLID_MESH_FACTOR = {1: Fraction(1), 2: Fraction(3, 2), 3: Fraction(7, 4)}


def default_point_cap() -> int:
    raw = os.environ.get(POINT_CAP_ENV)
    if raw is None:
        return DEFAULT_POINT_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise InputError(f"{POINT_CAP_ENV} must be an integer, got {raw!r}") from exc
    if cap <= 0:
        raise InputError(f"{POINT_CAP_ENV} must be positive")
    return cap


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@dataclass(frozen=True)
class GridStructure:
    dim: int
    h: Fraction


@dataclass(frozen=True)
class CantorStructure:
    depth: int


class SampledSpace:
    """A finite point sample with an exact metric.

    Instances are immutable after construction and safe to share between
    threads; every derived quantity (integer coordinate table, nearest gap,
    region membership masks) is precomputed or cached once.
    """

    def __init__(
        self,
        points,
        metric_kind: str,
        mesh: Fraction,
        label: str = "",
        structure: GridStructure | CantorStructure | None = None,
        detect: bool = True,
    ):
        if metric_kind not in METRIC_KINDS:
            raise InputError(f"unknown metric kind {metric_kind!r}")
        pts = tuple(tuple(Fraction(c) for c in p) for p in points)
        if not pts:
            raise InputError("a space needs at least one point")
        dims = {len(p) for p in pts}
        if len(dims) != 1 or dims == {0}:
            raise InputError("all points must share one positive coordinate dimension")
        if len(set(pts)) != len(pts):
            raise InputError("point identifiers (coordinates) must be unique")
        mesh = Fraction(mesh)
        if mesh <= 0:
            raise InputError("mesh must be positive")
        self.points = pts
        self.coord_dim = dims.pop()
        self.metric_kind = metric_kind
        self.mesh = mesh
        self.label = label
        self.n = len(pts)

        scale = 1
        for p in pts:
            for c in p:
                scale = _lcm(scale, c.denominator)
        self.scale = scale
        self._icoords = np.array(
            [[int(c * scale) for c in p] for p in pts], dtype=object
        )
        # int64 fast path only when squared scaled distances cannot overflow
        span = max(
            (max(int(c * scale) for c in p) - min(int(c * scale) for c in p))
            for p in zip(*pts)
        ) if self.coord_dim else 0
        self._fast = span * span * self.coord_dim < 2**62
        if self._fast:
            self._icoords = self._icoords.astype(np.int64)

        if metric_kind == "cantor_2adic":
            self._init_cantor_bits()
            self.dist_scale_sq = 4**self._cantor_depth
        else:
            self.dist_scale_sq = scale * scale

        if structure is None and detect:
            structure = detect_structure(pts)
        self.structure = structure
        self._index = {p: i for i, p in enumerate(pts)}
        self._mask_cache: dict[object, np.ndarray] = {}
        self._row_cache: dict[int, np.ndarray] = {}
        self._min_gap_sq: Fraction | None = None
        self._diam_sq: Fraction | None = None
        self._diam_ub: Fraction | None = None
        self.axis_min = tuple(min(col) for col in zip(*pts))
        self.axis_max = tuple(max(col) for col in zip(*pts))

    # -- structural metadata -------------------------------------------------

    @property
    def grid_h(self) -> Fraction | None:
        return self.structure.h if isinstance(self.structure, GridStructure) else None

    @property
    def screen_dim(self) -> int | None:
        """Number of colors needed minus one: grid dim, or 0 for Cantor/point."""
        if isinstance(self.structure, GridStructure):
            return self.structure.dim
        if isinstance(self.structure, CantorStructure):
            return 0
        if self.n == 1:
            return 0
        return None

    def _init_cantor_bits(self) -> None:
        if self.coord_dim != 1:
            raise InputError("cantor_2adic metric needs 1-dim coordinates")
        depth = 0
        digit_lists = []
        for (c,) in self.points:
            digits = _ternary_digits(c)
            if digits is None:
                raise InputError(
                    f"cantor_2adic coordinate {c} is not a middle-thirds endpoint"
                )
            digit_lists.append(digits)
            depth = max(depth, len(digits))
        bits = []
        for digits in digit_lists:
            b = 0
            for lvl in range(depth):
                d = digits[lvl] if lvl < len(digits) else 0
                b = (b << 1) | (d // 2)
            bits.append(b)
        self._cantor_depth = max(depth, 1)
        if depth == 0:  # single point 0
            bits = [0 for _ in bits]
        self._cantor_bits = np.array(bits, dtype=np.int64)
        # most significant bit value table for xor results
        table = np.zeros(1 << self._cantor_depth, dtype=np.int64)
        for v in range(1, 1 << self._cantor_depth):
            table[v] = 1 << (v.bit_length() - 1)
        self._msb_table = table

    # -- exact distances ------------------------------------------------------

    def index_of(self, coords) -> int:
        key = tuple(Fraction(c) for c in coords)
        if key not in self._index:
            raise InputError(f"no sample point at {key}")
        return self._index[key]

    def distance_sq(self, i: int, j: int) -> Fraction:
        """Exact squared distance between sample points i and j."""
        return Fraction(int(self.dist_sq_row(i)[j]), self.dist_scale_sq)

    def distance_exact(self, i: int, j: int) -> Fraction | None:
        """Exact distance when rational (always, except euclidean dim>=2)."""
        return exact_sqrt(self.distance_sq(i, j))

    def dist_sq_row(self, i: int) -> np.ndarray:
        """Scaled squared distances from point i to all points.

        Entries are exact integers; true d^2 = entry / dist_scale_sq.
        """
        row = self._row_cache.get(i)
        if row is not None:
            return row
        if self.metric_kind == "euclidean":
            delta = self._icoords - self._icoords[i]
            row = (delta * delta).sum(axis=1)
        elif self.metric_kind == "chebyshev":
            delta = np.abs(self._icoords - self._icoords[i])
            m = delta.max(axis=1)
            row = m * m
        else:  # cantor_2adic: d*2^D = msb(xor), so d^2*4^D = msb^2
            xor = self._cantor_bits ^ self._cantor_bits[i]
            msb = self._msb_table[xor]
            row = msb * msb
        if (len(self._row_cache) + 1) * self.n < 2**22:  # ~32 MB of int64 rows
            self._row_cache[i] = row
        return row

    def within_lt(self, i: int, radius: Fraction) -> np.ndarray:
        """Boolean mask of points with d(i, .) < radius (exact)."""
        bound = int_lt_bound(radius * radius * self.dist_scale_sq)
        if self._fast:
            bound = clamp_int64(bound)
        return np.asarray(self.dist_sq_row(i) <= bound, dtype=bool)

    def within_le(self, i: int, radius: Fraction) -> np.ndarray:
        """Boolean mask of points with d(i, .) <= radius (exact)."""
        bound = int_le_bound(radius * radius * self.dist_scale_sq)
        if self._fast:
            bound = clamp_int64(bound)
        return np.asarray(self.dist_sq_row(i) <= bound, dtype=bool)

    def min_positive_gap_sq(self) -> Fraction:
        """Smallest positive squared distance between sample points."""
        if self._min_gap_sq is None:
            best = None
            for i in range(self.n):
                row = self.dist_sq_row(i)
                pos = row[row > 0]
                if pos.size:
                    m = int(pos.min())
                    best = m if best is None else min(best, m)
            if best is None:  # single point
                best = self.dist_scale_sq  # gap 1 by convention
            self._min_gap_sq = Fraction(best, self.dist_scale_sq)
        return self._min_gap_sq

    def diameter_sq(self) -> Fraction:
        if self._diam_sq is None:
            worst = 0
            for i in range(self.n):
                worst = max(worst, int(self.dist_sq_row(i).max()))
            self._diam_sq = Fraction(worst, self.dist_scale_sq)
        return self._diam_sq

    def diameter_upper_bound(self) -> Fraction:
        """A rational upper bound for the sample diameter (cached)."""
        if self._diam_ub is None:
            d = exact_sqrt(self.diameter_sq())
            if d is None:
                d = sqrt_upper(self.diameter_sq(), self.mesh / 1024)
            self._diam_ub = d
        return self._diam_ub

    # -- subsets ---------------------------------------------------------------

    def subset_all(self) -> SubsetHandle:
        return SubsetHandle(self, (1 << self.n) - 1)

    def subset_from_indices(self, indices) -> SubsetHandle:
        bits = 0
        for i in indices:
            if not 0 <= i < self.n:
                raise InputError(f"point index {i} out of range")
            bits |= 1 << i
        return SubsetHandle(self, bits)

    def subset_from_mask(self, mask: np.ndarray) -> SubsetHandle:
        bits = 0
        for i in np.flatnonzero(mask):
            bits |= 1 << int(i)
        return SubsetHandle(self, bits)

    def mask_of_bits(self, bits: int) -> np.ndarray:
        out = np.zeros(self.n, dtype=bool)
        idx = []
        while bits:
            low = bits & -bits
            idx.append(low.bit_length() - 1)
            bits ^= low
        out[idx] = True
        return out

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"SampledSpace({self.label or 'unlabeled'}, n={self.n}, "
            f"metric={self.metric_kind}, mesh={self.mesh})"
        )


def _ternary_digits(c: Fraction) -> list[int] | None:
    """Finite base-3 digits of c in [0,1) with digits in {0,2}, or None."""
    if c < 0 or c >= 1:
        return None
    digits = []
    for _ in range(64):
        if c == 0:
            return digits
        c *= 3
        d = c.numerator // c.denominator
        if d not in (0, 2):
            return None
        digits.append(d)
        c -= d
    return None


@dataclass(frozen=True)
class SubsetHandle:
    """A subset of a space's sample, stored as a bitset over point indices."""

    space: SampledSpace
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.space.n:
            raise InputError("subset bits outside the space's point range")

    def indices(self) -> tuple[int, ...]:
        out, bits = [], self.bits
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return tuple(out)

    def mask(self) -> np.ndarray:
        return self.space.mask_of_bits(self.bits)

    def count(self) -> int:
        return bin(self.bits).count("1")

    def is_empty(self) -> bool:
        return self.bits == 0

    def contains_index(self, i: int) -> bool:
        return bool((self.bits >> i) & 1)

    def issubset(self, other: SubsetHandle) -> bool:
        return self.bits & ~other.bits == 0

    def union(self, other: SubsetHandle) -> SubsetHandle:
        return SubsetHandle(self.space, self.bits | other.bits)

    def intersect(self, other: SubsetHandle) -> SubsetHandle:
        return SubsetHandle(self.space, self.bits & other.bits)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SubsetHandle)
            and self.space is other.space
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((id(self.space), self.bits))


@dataclass(frozen=True)
class DiameterResult:
    value: Fraction          # exact if `exact`, else certified upper bound
    value_sq: Fraction       # always exact
    empty: bool
    exact: bool


def diameter(space: SampledSpace, subset: SubsetHandle) -> DiameterResult:
    """Max pairwise distance over the subset; 0 (flagged) when empty.

    The squared value is always exact.  The linear value is exact whenever
    the metric yields rational distances, otherwise it is a certified
    rational upper bound (callers that enforce diameter bounds compare the
    squared value).
    """
    idx = subset.indices()
    if not idx:
        return DiameterResult(Fraction(0), Fraction(0), True, True)
    if len(idx) == 1:
        return DiameterResult(Fraction(0), Fraction(0), False, True)
    arr = np.fromiter(idx, dtype=np.int64)
    worst = 0
    for i in idx:
        row = space.dist_sq_row(i)[arr]
        worst = max(worst, int(row.max()))
    dsq = Fraction(worst, space.dist_scale_sq)
    root = exact_sqrt(dsq)
    if root is not None:
        return DiameterResult(root, dsq, False, True)
    return DiameterResult(sqrt_upper(dsq, space.mesh / 1024), dsq, False, False)


# -- builders -------------------------------------------------------------------


def build_grid_space(
    dim: int,
    resolution: Fraction,
    metric_kind: str = "euclidean",
    point_cap: int | None = None,
    label: str | None = None,
) -> SampledSpace:
    """The uniform grid {0, h, 2h, ..., 1}^dim with its exact metric.

    mesh is h/2 times a rational upper bound for the metric's cell diameter
    factor, so every point of the underlying cube is within mesh of the
    sample.
    """
    h = parse_rational(resolution)
    if not 1 <= dim <= 3:
        raise InputError("grid dimension must be 1, 2 or 3")
    if metric_kind not in ("euclidean", "chebyshev"):
        raise InputError("grid spaces support euclidean or chebyshev metrics")
    if not (0 < h <= Fraction(1, 2)):
        raise InputError("resolution must satisfy 0 < h <= 1/2")
    inv = 1 / h
    if inv.denominator != 1:
        raise InputError("1/h must be an integer")
    side = int(inv) + 1
    count = side**dim
    cap = point_cap if point_cap is not None else default_point_cap()
    if count > cap:
        raise ResourceError(f"grid would have {count} points, cap is {cap}")
    axis = [Fraction(k) * h for k in range(side)]
    pts = list(itertools.product(axis, repeat=dim))
    factor = _EUCLID_MESH_FACTOR[dim] if metric_kind == "euclidean" else Fraction(1)
    mesh = h * factor / 2
    if label is None:
        label = (
            f"grid{dim}d_h{h.denominator}"
            if h.numerator == 1
            else f"grid{dim}d_{h}"
        )
    return SampledSpace(
        pts,
        metric_kind,
        mesh,
        label=label,
        structure=GridStructure(dim, h),
        detect=False,
    )


def cantor_points(depth: int) -> list[tuple[Fraction]]:
    """Left endpoints of the depth-level middle-thirds construction, sorted."""
    pts = [Fraction(0)]
    for level in range(1, depth + 1):
        step = Fraction(2, 3**level)
        pts = [p for q in pts for p in (q, q + step)]
    return [(p,) for p in sorted(pts)]


def build_cantor_space(depth: int, point_cap: int | None = None) -> SampledSpace:
    """2**depth Cantor left endpoints with the euclidean metric, mesh 3**-depth."""
    if depth < 1:
        raise InputError("cantor depth must be a positive integer")
    if depth > 16:
        raise ResourceError("cantor depth capped at 16")
    cap = point_cap if point_cap is not None else default_point_cap()
    if 2**depth > cap:
        raise ResourceError(f"cantor sample would have {2**depth} points, cap {cap}")
    return SampledSpace(
        cantor_points(depth),
        "euclidean",
        Fraction(1, 3**depth),
        label=f"cantor_{depth}",
        structure=CantorStructure(depth),
        detect=False,
    )


def build_cantor_2adic_space(depth: int, point_cap: int | None = None) -> SampledSpace:
    """The same Cantor endpoints under the 2-adic ultrametric."""
    if depth < 1:
        raise InputError("cantor depth must be a positive integer")
    if depth > 16:
        raise ResourceError("cantor depth capped at 16")
    cap = point_cap if point_cap is not None else default_point_cap()
    if 2**depth > cap:
        raise ResourceError(f"cantor sample would have {2**depth} points, cap {cap}")
    return SampledSpace(
        cantor_points(depth),
        "cantor_2adic",
        Fraction(1, 2**depth),
        label=f"cantor_2adic_{depth}",
        structure=CantorStructure(depth),
        detect=False,
    )


def build_single_point_space() -> SampledSpace:
    return SampledSpace(
        [(Fraction(0),)],
        "euclidean",
        Fraction(1, 2),
        label="single_point",
        structure=None,
        detect=False,
    )


def detect_structure(points) -> GridStructure | CantorStructure | None:
    """Recognize the built-in grid / Cantor samples from raw coordinates."""
    dim = len(points[0])
    pset = set(points)
    if dim == 1:
        n = len(points)
        if n and n & (n - 1) == 0:
            depth = n.bit_length() - 1
            if depth >= 1 and pset == set(cantor_points(depth)):
                return CantorStructure(depth)
    axis_vals = sorted({p[0] for p in points})
    if len(axis_vals) >= 2 and axis_vals[0] == 0 and axis_vals[-1] == 1:
        h = axis_vals[1] - axis_vals[0]
        if h > 0 and all(
            axis_vals[k] == k * h for k in range(len(axis_vals))
        ):
            expected = set(
                itertools.product([Fraction(k) * h for k in range(len(axis_vals))],
                                  repeat=dim)
            )
            if pset == expected:
                return GridStructure(dim, h)
    return None


# -- schedules -------------------------------------------------------------------


def doubling_delta(n: int) -> Fraction:
    """The n-th radius of the doubling-exponent schedule: (1/2)**(2**n)."""
    return Fraction(1, 2 ** (2**n))


def paired_delta(eps_n: Fraction, n: int) -> Fraction:
    """Net radius paired with eps_n: ((2**2**n - 1)/2**2**n) * (eps_n/2)."""
    p = 2 ** (2**n)
    return Fraction(p - 1, p) * (eps_n / 2)


@dataclass(frozen=True)
class Schedule:
    """A finite positive schedule, 1-indexed: values[n-1] is the n-th term.

    Kinds:
      epsilon     -- arbitrary positive terms (Haver input)
      delta_doubling  -- exactly (1/2)**(2**n)
      delta_paired  -- exactly ((2**2**n - 1)/2**2**n)*(eps_n/2) for the paired
                     epsilon schedule
    """

    kind: str
    values: tuple[Fraction, ...]
    horizon: int
    paired_epsilons: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("epsilon", "delta_doubling", "delta_paired"):
            raise InputError(f"unknown schedule kind {self.kind!r}")
        if self.horizon < 1 or len(self.values) != self.horizon:
            raise InputError("schedule length must equal its positive horizon")
        if any(v <= 0 for v in self.values):
            raise InputError("schedule values must be positive")
        if self.kind == "delta_doubling":
            for n in range(1, self.horizon + 1):
                if self.values[n - 1] != doubling_delta(n):
                    raise InputError(
                        f"delta_doubling schedule term {n} must be (1/2)^(2^{n})"
                    )
        if self.kind == "delta_paired":
            eps = self.paired_epsilons
            if eps is None or len(eps) != self.horizon:
                raise InputError("delta_paired schedule needs its paired epsilons")
            for n in range(1, self.horizon + 1):
                if self.values[n - 1] != paired_delta(eps[n - 1], n):
                    raise InputError(f"delta_paired schedule term {n} is off-formula")

    def value(self, n: int) -> Fraction:
        if not 1 <= n <= self.horizon:
            raise InputError(f"schedule index {n} outside 1..{self.horizon}")
        return self.values[n - 1]


def doubling_delta_schedule(horizon: int) -> Schedule:
    return Schedule(
        "delta_doubling",
        tuple(doubling_delta(n) for n in range(1, horizon + 1)),
        horizon,
    )


def paired_delta_schedule(eps: Schedule) -> Schedule:
    vals = tuple(paired_delta(eps.value(n), n) for n in range(1, eps.horizon + 1))
    return Schedule("delta_paired", vals, eps.horizon, paired_epsilons=eps.values)


def epsilon_schedule(values) -> Schedule:
    vals = tuple(parse_rational(v) for v in values)
    return Schedule("epsilon", vals, len(vals))
