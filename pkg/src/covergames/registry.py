"""Built-in space registry so experiments and acceptance runs need no
external data: the unit interval and square at several resolutions, Cantor
samples at depths 1..10 (euclidean and one 2-adic variant), and a single
point."""

from __future__ import annotations

from fractions import Fraction

from .exact import InputError
from .space import (
    SampledSpace,
    build_cantor_2adic_space,
    build_cantor_space,
    build_grid_space,
    build_single_point_space,
)

_INTERVAL_DENS = (8, 64, 256, 1024)
_SQUARE_DENS = (4, 8, 64)
_CANTOR_DEPTHS = tuple(range(1, 11))


def builtin_names() -> list[str]:
    names = ["single_point"]
    names += [f"unit_interval_{d}" for d in _INTERVAL_DENS]
    names += [f"unit_square_{d}" for d in _SQUARE_DENS]
    names += [f"cantor_{k}" for k in _CANTOR_DEPTHS]
    names += ["cantor_2adic_10"]
    return names


def builtin_space(name: str) -> SampledSpace:
    if name == "single_point":
        return build_single_point_space()
    if name.startswith("unit_interval_"):
        den = int(name.rsplit("_", 1)[1])
        if den not in _INTERVAL_DENS:
            raise InputError(f"no built-in interval at 1/{den}")
        return build_grid_space(1, Fraction(1, den), label=name)
    if name.startswith("unit_square_"):
        den = int(name.rsplit("_", 1)[1])
        if den not in _SQUARE_DENS:
            raise InputError(f"no built-in square at 1/{den}")
        return build_grid_space(2, Fraction(1, den), label=name)
    if name == "cantor_2adic_10":
        return build_cantor_2adic_space(10)
    if name.startswith("cantor_"):
        depth = int(name.rsplit("_", 1)[1])
        if depth not in _CANTOR_DEPTHS:
            raise InputError(f"no built-in cantor sample at depth {depth}")
        return build_cantor_space(depth)
    raise InputError(
        f"unknown built-in space {name!r}; known: {', '.join(builtin_names())}"
    )
