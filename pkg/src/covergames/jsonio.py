"""JSON schemas for spaces, covers, chains, selections and picks.

Rationals travel as "numerator/denominator" strings, bit-exact.  Space files
carry {label, metric, mesh, points}; cover files carry {space, regions} with
region shapes "ball", "box" and "co_closed_balls".  Everything emitted is
canonical (sorted keys) so identical inputs produce byte-identical outputs.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .covers import Ball, Box, CoClosedBalls, Cover, CoverSeq, OpenRegion
from .exact import InputError, format_rational, parse_rational
from .netting import SigmaDecomposition, chain_decomposition
from .space import SampledSpace


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


def load_json(path) -> object:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


# -- spaces ------------------------------------------------------------------------


def space_to_json(space: SampledSpace) -> dict:
    return {
        "label": space.label,
        "metric": space.metric_kind,
        "mesh": format_rational(space.mesh),
        "points": [[format_rational(c) for c in p] for p in space.points],
    }


def space_from_json(doc: dict) -> SampledSpace:
    try:
        points = [
            tuple(parse_rational(c) for c in p) for p in doc["points"]
        ]
        return SampledSpace(
            points,
            doc["metric"],
            parse_rational(doc["mesh"]),
            label=doc.get("label", ""),
        )
    except KeyError as exc:
        raise InputError(f"space JSON missing key {exc}") from exc


# -- regions and covers --------------------------------------------------------------


def region_to_json(region: OpenRegion) -> dict:
    if isinstance(region, Ball):
        return {
            "shape": "ball",
            "center": region.center,
            "radius": format_rational(region.radius),
        }
    if isinstance(region, Box):
        out = {
            "shape": "box",
            "lo": [format_rational(x) for x in region.lo],
            "hi": [format_rational(x) for x in region.hi],
        }
        if any(region.lo_closed):
            out["lo_closed"] = list(region.lo_closed)
        if any(region.hi_closed):
            out["hi_closed"] = list(region.hi_closed)
        return out
    return {
        "shape": "co_closed_balls",
        "balls": [[c, format_rational(r)] for c, r in region.balls],
    }


def region_from_json(space: SampledSpace, doc: dict) -> OpenRegion:
    shape = doc.get("shape")
    if shape == "ball":
        return Ball(space, int(doc["center"]), parse_rational(doc["radius"]))
    if shape == "box":
        lo = tuple(parse_rational(x) for x in doc["lo"])
        hi = tuple(parse_rational(x) for x in doc["hi"])
        lo_closed = tuple(bool(b) for b in doc.get("lo_closed", ()))
        hi_closed = tuple(bool(b) for b in doc.get("hi_closed", ()))
        return Box(space, lo, hi, lo_closed, hi_closed)
    if shape == "co_closed_balls":
        balls = tuple((int(c), parse_rational(r)) for c, r in doc["balls"])
        return CoClosedBalls(space, balls)
    raise InputError(f"unknown region shape {shape!r}")


def cover_to_json(cover: Cover) -> dict:
    return {
        "space": cover.space.label,
        "regions": [region_to_json(r) for r in cover.regions],
    }


def _check_space_ref(space: SampledSpace, ref) -> None:
    """A cover file may name its space (label) or inline it; either must
    agree with the space the caller supplied."""
    if ref is None:
        return
    if isinstance(ref, dict):
        inline = space_from_json(ref)
        if inline.points != space.points or inline.metric_kind != space.metric_kind:
            raise InputError("inline space disagrees with the supplied space")
        return
    if ref and space.label and ref != space.label:
        raise InputError(
            f"cover file names space {ref!r} but {space.label!r} was given"
        )


def cover_from_json(space: SampledSpace, doc: dict) -> Cover:
    _check_space_ref(space, doc.get("space"))
    return Cover(space, [region_from_json(space, r) for r in doc["regions"]])


def coverseq_to_json(covers: CoverSeq) -> dict:
    return {
        "space": covers.space.label,
        "covers": [
            [region_to_json(r) for r in c.regions] for c in covers.covers
        ],
    }


def coverseq_from_json(space: SampledSpace, doc: dict) -> CoverSeq:
    _check_space_ref(space, doc.get("space"))
    covers = [
        Cover(space, [region_from_json(space, r) for r in regions])
        for regions in doc["covers"]
    ]
    return CoverSeq(space, covers)


# -- chains, selections, picks ---------------------------------------------------------


def chain_to_json(dec: SigmaDecomposition) -> dict:
    return {
        "space": dec.space.label,
        "chain": [list(h.indices()) for h in dec.chain],
    }


def chain_from_json(space: SampledSpace, doc: dict) -> SigmaDecomposition:
    chain = [space.subset_from_indices(idx) for idx in doc["chain"]]
    return chain_decomposition(space, chain)


def selections_to_json(selections: dict[int, list[Ball]]) -> dict:
    return {
        "selections": {
            str(m): [region_to_json(b) for b in balls]
            for m, balls in sorted(selections.items())
        }
    }


def selections_from_json(space: SampledSpace, doc: dict) -> dict[int, list[Ball]]:
    out = {}
    for key, regions in doc["selections"].items():
        balls = []
        for r in regions:
            region = region_from_json(space, r)
            if not isinstance(region, Ball):
                raise InputError("selections must consist of balls")
            balls.append(region)
        out[int(key)] = balls
    return out


def picks_to_json(picks) -> dict:
    return {"picks": [list(p) for p in picks]}


def picks_from_json(doc: dict) -> list[list[int]]:
    return [[int(i) for i in stage] for stage in doc["picks"]]
