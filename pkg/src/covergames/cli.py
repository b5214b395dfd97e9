"""Command-line entry point: one subcommand per pipeline, JSON in, JSON
report out.

Exit codes: 0 all checks passed; 1 a mathematical check failed (the report
carries a concrete witness); 2 input or usage error.  Reports are canonical
(sorted keys) and byte-identical across runs except for the wall_time_s
field.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import jsonio
from .covers import (
    Ball,
    Cover,
    CoverSeq,
    covers_check,
    lebesgue_number,
    pairwise_disjoint_check,
)
from .exact import (
    CheckFailure,
    InputError,
    ResourceError,
    format_rational,
    parse_rational,
)
from .game import (
    adversarial_two_policy,
    hurewicz_selection_check,
    menger_selection_check,
    play_hurewicz_game,
    sc_plus_select,
    transcript_loss_report,
)
from .haver import build_haver_witness, normalize_epsilons
from .netting import (
    decompose_from_hurewicz,
    greedy_net,
    minimal_net_bruteforce,
    select_from_decomposition,
    validate_net,
)
from .registry import builtin_names, builtin_space
from .screenability import (
    FiniteCWitness,
    brick_refinement,
    finite_c_search,
    sc_fin_select,
)
from .space import SampledSpace, default_point_cap, doubling_delta


@dataclass
class RunConfig:
    horizon: int = 8
    margin: Fraction | None = None  # default: the space mesh
    tail_slack: int = 1
    point_cap: int = field(default_factory=default_point_cap)
    seed: int = 0

    def __post_init__(self):
        if self.horizon < 1:
            raise InputError("horizon must be >= 1")
        if self.point_cap <= 0:
            raise InputError("point_cap must be positive")

    @staticmethod
    def from_file(path) -> "RunConfig":
        doc = jsonio.load_json(path)
        kwargs = {}
        for key in ("horizon", "tail_slack", "point_cap", "seed"):
            if key in doc:
                kwargs[key] = int(doc[key])
        if "margin" in doc:
            kwargs["margin"] = parse_rational(doc["margin"])
        return RunConfig(**kwargs)


class Report:
    """Command echo, input digests, per-check verdicts with witnesses."""

    def __init__(self, command: str, argv: list[str]):
        self.doc = {
            "command": command,
            "argv": list(argv),
            "inputs": {},
            "checks": [],
            "result": {},
            "wall_time_s": 0.0,
        }
        self._t0 = time.monotonic()

    def add_input(self, name: str, obj) -> None:
        self.doc["inputs"][name] = jsonio.digest(obj)

    def check(self, name: str, ok: bool, **details) -> bool:
        entry = {"name": name, "pass": bool(ok)}
        entry.update(details)
        self.doc["checks"].append(entry)
        return ok

    def result(self, **kv) -> None:
        self.doc["result"].update(kv)

    def finish(self, exit_code: int) -> dict:
        self.doc["exit_code"] = exit_code
        self.doc["wall_time_s"] = round(time.monotonic() - self._t0, 6)
        return self.doc

    @property
    def all_passed(self) -> bool:
        return all(c["pass"] for c in self.doc["checks"])


def _load_space(spec: str, cfg: RunConfig | None = None) -> SampledSpace:
    if spec in builtin_names():
        space = builtin_space(spec)
    else:
        space = jsonio.space_from_json(jsonio.load_json(spec))
    cap = cfg.point_cap if cfg is not None else default_point_cap()
    if space.n > cap:
        raise ResourceError(f"space has {space.n} points, cap is {cap}")
    return space


def _emit(report_doc: dict, out: str | None) -> None:
    text = json.dumps(report_doc, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _frac_str(x: Fraction) -> str:
    return format_rational(x)


# -- subcommand handlers -----------------------------------------------------------


def _cmd_net(args, cfg: RunConfig, report: Report) -> int:
    space = _load_space(args.space, cfg)
    report.add_input("space", jsonio.space_to_json(space))
    eps = parse_rational(args.epsilon)
    subset = space.subset_all()
    cert = greedy_net(space, subset, eps)
    ok = validate_net(space, cert)
    report.check("net_validates", ok, centers=len(cert.centers))
    if args.oracle:
        if space.n <= 24:
            oracle = minimal_net_bruteforce(space, subset, eps)
            report.check(
                "greedy_at_least_minimal",
                not oracle.exceeds_cap and len(cert.centers) >= oracle.size,
                greedy=len(cert.centers),
                minimal=oracle.size,
            )
        else:
            report.check(
                "greedy_at_least_minimal",
                True,
                skipped="exhaustive net search is capped at 24 points",
            )
    report.result(
        epsilon=_frac_str(eps),
        centers=list(cert.centers),
    )
    return 0 if report.all_passed else 1


def _cmd_decompose(args, cfg: RunConfig, report: Report) -> int:
    space = _load_space(args.space, cfg)
    report.add_input("space", jsonio.space_to_json(space))
    doc = jsonio.load_json(args.selections)
    report.add_input("selections", doc)
    selections = jsonio.selections_from_json(space, doc)
    horizon = args.horizon or cfg.horizon
    epsilons = [parse_rational(e) for e in args.epsilons.split(",")] if args.epsilons else []
    dec = decompose_from_hurewicz(space, selections, horizon, epsilons)
    report.check("chain_monotone", True)
    report.check(
        "chain_union_is_sample",
        True,
        stages=[h.count() for h in dec.chain],
    )
    report.check(
        "certificates_validate",
        all(validate_net(space, c) for c in dec.certificates.values()),
        count=len(dec.certificates),
    )
    report.result(
        chain=jsonio.chain_to_json(dec)["chain"],
        tail_start_max=max(dec.tail_start),
        certificates={
            f"{n}@{_frac_str(e)}": list(c.centers)
            for (n, e), c in sorted(dec.certificates.items(), key=lambda kv: (kv[0][0], kv[0][1]))
        },
    )
    return 0 if report.all_passed else 1


def _cmd_select(args, cfg: RunConfig, report: Report) -> int:
    space = _load_space(args.space, cfg)
    report.add_input("space", jsonio.space_to_json(space))
    chain_doc = jsonio.load_json(args.chain)
    report.add_input("chain", chain_doc)
    dec = jsonio.chain_from_json(space, chain_doc)
    covers_doc = jsonio.load_json(args.covers)
    report.add_input("covers", covers_doc)
    covers = jsonio.coverseq_from_json(space, covers_doc)
    sel = select_from_decomposition(space, dec, covers)
    tail = hurewicz_selection_check(space, covers, sel.picks)
    report.check("tail_condition", tail.ok)
    if tail.ok:
        contract = all(
            tail.tail_start[p] <= dec.tail_start[p] for p in range(space.n)
        )
        report.check("tail_from_chain_entry", contract)
    report.result(picks=jsonio.picks_to_json(sel.picks)["picks"])
    return 0 if report.all_passed else 1


def _cmd_refine(args, cfg: RunConfig, report: Report) -> int:
    space = _load_space(args.space, cfg)
    report.add_input("space", jsonio.space_to_json(space))
    doc = jsonio.load_json(args.cover)
    report.add_input("cover", doc)
    cover = jsonio.cover_from_json(space, doc)
    report.check("cover_validates", covers_check(cover).ok)
    families = brick_refinement(space, cover)
    report.check("family_count", True, count=len(families))
    margin = cfg.margin if cfg.margin is not None else space.mesh
    report.check(
        "families_margin_disjoint",
        all(
            pairwise_disjoint_check(fam.regions, margin).ok for fam in families
        ),
        margin=_frac_str(margin),
    )
    report.result(
        lebesgue=_frac_str(lebesgue_number(cover)),
        families=[
            [jsonio.region_to_json(r) for r in fam.regions] for fam in families
        ],
        witnesses=[list(fam.witness) for fam in families],
    )
    return 0 if report.all_passed else 1


def _cmd_scfin(args, cfg: RunConfig, report: Report) -> int:
    space = _load_space(args.space, cfg)
    report.add_input("space", jsonio.space_to_json(space))
    doc = jsonio.load_json(args.covers)
    report.add_input("covers", doc)
    covers = jsonio.coverseq_from_json(space, doc)
    sel = sc_fin_select(space, covers)
    report.check("selection_covers", True)
    margin = cfg.margin if cfg.margin is not None else space.mesh
    report.check(
        "families_margin_disjoint",
        all(
            pairwise_disjoint_check(fam.regions, margin).ok
            for fam in sel.families
        ),
        margin=_frac_str(margin),
    )
    report.result(
        block_starts=list(sel.block_starts),
        families=[
            [jsonio.region_to_json(r) for r in fam.regions]
            for fam in sel.families
        ],
        witnesses=[list(fam.witness) for fam in sel.families],
    )
    return 0 if report.all_passed else 1


def _cmd_fincspace(args, cfg: RunConfig, report: Report) -> int:
    space = _load_space(args.space, cfg)
    report.add_input("space", jsonio.space_to_json(space))
    doc = jsonio.load_json(args.covers)
    report.add_input("covers", doc)
    covers = jsonio.coverseq_from_json(space, doc)
    res = finite_c_search(space, covers)
    if isinstance(res, FiniteCWitness):
        report.check("witness_found", True, n=res.n)
        report.result(
            n=res.n,
            families=[
                [jsonio.region_to_json(r) for r in fam.regions]
                for fam in res.families
            ],
        )
    else:
        report.check("witness_found", False, candidates_refuted=res.candidates_refuted)
        report.result(no_witness_at_horizon=res.horizon)
    return 0 if report.all_passed else 1


def _cmd_haver(args, cfg: RunConfig, report: Report) -> int:
    space = _load_space(args.space, cfg)
    report.add_input("space", jsonio.space_to_json(space))
    chain_doc = jsonio.load_json(args.chain)
    report.add_input("chain", chain_doc)
    dec = jsonio.chain_from_json(space, chain_doc)
    raw = [parse_rational(e) for e in args.epsilons.split(",")]
    horizon = args.horizon or len(raw)
    sched = normalize_epsilons(raw[:horizon])
    witness = build_haver_witness(space, dec, sched)
    report.check("families_disjoint", True)
    diam_ok = all(
        d < sched.value(n)
        for n, d in enumerate(witness.diam_bounds, start=1)
    )
    report.check("diameters_below_schedule", diam_ok)
    report.check("claim_replay_full", len(witness.traces) == space.n)
    report.result(
        epsilons=[_frac_str(e) for e in sched.values],
        deltas=[_frac_str(d) for d in witness.stage_covers.deltas],
        blocks=list(witness.blocks),
        family_sizes=[len(f) for f in witness.families],
        diam_bounds=[_frac_str(d) for d in witness.diam_bounds],
        traces=[
            {
                "point": t.point,
                "entry_stage": t.entry_stage,
                "block": list(t.block),
                "stage": t.stage,
            }
            for t in witness.traces[: min(space.n, 32)]
        ],
    )
    return 0 if report.all_passed else 1


def _cmd_game(args, cfg: RunConfig, report: Report) -> int:
    space = _load_space(args.space, cfg)
    report.add_input("space", jsonio.space_to_json(space))
    doc = jsonio.load_json(args.covers)
    report.add_input("covers", doc)
    covers = jsonio.coverseq_from_json(space, doc)
    if args.two == "covering":
        policy = None
    elif args.two.startswith("adversarial:"):
        policy = adversarial_two_policy(int(args.two.split(":", 1)[1]))
    else:
        raise InputError("--two must be 'covering' or 'adversarial:<point>'")
    horizon = args.horizon or covers.horizon
    transcript = play_hurewicz_game(space, covers, policy, horizon)
    loss = transcript_loss_report(transcript, cfg.tail_slack)
    report.check(
        "one_lost", loss.lost_by_one, unresolved=list(loss.unresolved[:32])
    )
    report.result(
        rounds=len(transcript.rounds),
        blocks=list(transcript.blocks),
        moves=[
            {
                "start": r.start_index,
                "one": [
                    [jsonio.region_to_json(reg) for reg in fam.regions]
                    for fam in r.one_move
                ],
                "two": [list(ref) for ref in r.two_refs],
                "block": r.block,
            }
            for r in transcript.rounds
        ],
    )
    return 0 if report.all_passed else 1


def _cmd_scplus(args, cfg: RunConfig, report: Report) -> int:
    space = _load_space(args.space, cfg)
    report.add_input("space", jsonio.space_to_json(space))
    doc = jsonio.load_json(args.covers)
    report.add_input("covers", doc)
    covers = jsonio.coverseq_from_json(space, doc)
    res = sc_plus_select(space, covers, cfg.tail_slack)
    report.check("blocks_increasing", all(a < b for a, b in zip(res.blocks, res.blocks[1:])))
    report.check("tail_index_bounded", max(res.tail_index) <= 2, max_tail=max(res.tail_index))
    report.result(
        blocks=list(res.blocks),
        family_sizes=[len(f) for f in res.families],
        tail_index_max=max(res.tail_index),
    )
    return 0 if report.all_passed else 1


def _cmd_check(args, cfg: RunConfig, report: Report) -> int:
    space = _load_space(args.space, cfg)
    report.add_input("space", jsonio.space_to_json(space))
    covers_doc = jsonio.load_json(args.covers)
    report.add_input("covers", covers_doc)
    covers = jsonio.coverseq_from_json(space, covers_doc)
    picks_doc = jsonio.load_json(args.picks)
    report.add_input("picks", picks_doc)
    picks = jsonio.picks_from_json(picks_doc)
    if args.kind == "menger":
        rep = menger_selection_check(space, covers, picks)
        report.check("menger", rep.ok, failure_point=rep.failure_point)
    elif args.kind == "hurewicz":
        rep = hurewicz_selection_check(space, covers, picks)
        report.check("hurewicz", rep.ok, failures=list(rep.failures))
    else:
        raise InputError("--kind must be menger or hurewicz")
    return 0 if report.all_passed else 1


def pipeline_demo(space_label: str, horizon: int, report: Report) -> int:
    """Chain-build, block-selection and small-diameter witness end to end on
    a built-in space: the executable composite of the main implication chain
    up to its externally-cited final step."""
    space = builtin_space(space_label)
    report.add_input("space", jsonio.space_to_json(space))

    # stage 1: chain from greedy selections at the doubling radii
    selections = {}
    for m in range(1, horizon + 1):
        delta = doubling_delta(m)
        net = greedy_net(space, space.subset_all(), delta)
        selections[m] = [Ball(space, c, delta) for c in net.centers]
    dec = decompose_from_hurewicz(
        space, selections, horizon, epsilons=[Fraction(1, 2), Fraction(1, 16)]
    )
    report.check("decompose_chain_full", dec.chain[-1].count() == space.n)

    # stage 2+3: epsilon schedule scaled to the space, then the witness.
    # The early terms sit far above the diameter so single-center nets keep
    # the early-stage refinements at honest brick resolution.
    diam = max(space.diameter_upper_bound(), space.mesh)
    raw = [16 * diam * Fraction(15, 32) ** (n - 1) for n in range(1, horizon + 1)]
    sched = normalize_epsilons(raw)
    witness = build_haver_witness(space, dec, sched)
    report.check(
        "haver_witness_validates",
        True,
        blocks=list(witness.blocks),
        family_sizes=[len(f) for f in witness.families],
    )

    # surface the refinement width: the first block of the stage covers
    # splits into screen_dim + 1 honest disjoint families
    d = space.screen_dim
    if d is not None and witness.stage_covers.covers.horizon >= d + 1:
        prefix = CoverSeq(
            space, witness.stage_covers.covers.covers[: d + 1]
        )
        sel = sc_fin_select(space, prefix)
        report.check(
            "first_block_family_count",
            len(sel.families) == d + 1 and not sel.fallback_blocks,
            families=len(sel.families),
        )

    report.result(
        space=space_label,
        horizon=horizon,
        epsilons=[_frac_str(e) for e in sched.values],
        diam_bounds=[_frac_str(x) for x in witness.diam_bounds],
    )
    return 0 if report.all_passed else 1


def _cmd_demo(args, cfg: RunConfig, report: Report) -> int:
    return pipeline_demo(args.label, args.horizon or 6, report)


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        default=argparse.SUPPRESS,
        help="RunConfig overrides (JSON file)",
    )
    common.add_argument(
        "--out",
        default=argparse.SUPPRESS,
        help="write the JSON report here instead of stdout",
    )
    p = argparse.ArgumentParser(
        prog="covergames",
        description="Open-cover selection constructions on finite metric samples",
        parents=[common],
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, **arguments):
        sp = sub.add_parser(name, parents=[common])
        for arg, kw in arguments.items():
            sp.add_argument(arg, **kw)
        sp.set_defaults(fn=fn)
        return sp

    add(
        "net",
        _cmd_net,
        **{
            "--space": {"required": True},
            "--epsilon": {"required": True},
            "--oracle": {"action": "store_true"},
        },
    )
    add(
        "decompose",
        _cmd_decompose,
        **{
            "--space": {"required": True},
            "--selections": {"required": True},
            "--horizon": {"type": int, "default": 0},
            "--epsilons": {"default": ""},
        },
    )
    add(
        "select",
        _cmd_select,
        **{
            "--space": {"required": True},
            "--chain": {"required": True},
            "--covers": {"required": True},
        },
    )
    add("refine", _cmd_refine, **{"--space": {"required": True}, "--cover": {"required": True}})
    add("scfin", _cmd_scfin, **{"--space": {"required": True}, "--covers": {"required": True}})
    add(
        "fincspace",
        _cmd_fincspace,
        **{"--space": {"required": True}, "--covers": {"required": True}},
    )
    add(
        "haver",
        _cmd_haver,
        **{
            "--space": {"required": True},
            "--chain": {"required": True},
            "--epsilons": {"required": True},
            "--horizon": {"type": int, "default": 0},
        },
    )
    add(
        "game",
        _cmd_game,
        **{
            "--space": {"required": True},
            "--covers": {"required": True},
            "--two": {"default": "covering"},
            "--horizon": {"type": int, "default": 0},
        },
    )
    add("scplus", _cmd_scplus, **{"--space": {"required": True}, "--covers": {"required": True}})
    add(
        "check",
        _cmd_check,
        **{
            "--kind": {"required": True},
            "--space": {"required": True},
            "--covers": {"required": True},
            "--picks": {"required": True},
        },
    )
    add("demo", _cmd_demo, **{"--label": {"required": True}, "--horizon": {"type": int, "default": 0}})
    return p


def run(argv: list[str]) -> tuple[int, dict]:
    """Execute one subcommand; returns (exit code, report document)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (2 if exc.code else 0), {"command": "usage", "exit_code": exc.code}
    report = Report(args.cmd, argv)
    try:
        config_path = getattr(args, "config", None)
        cfg = RunConfig.from_file(config_path) if config_path else RunConfig()
        code = args.fn(args, cfg, report)
    except CheckFailure as exc:
        report.check("precondition", False, error=str(exc), witness=repr(exc.witness))
        return 1, report.finish(1)
    except InputError as exc:
        report.check("input", False, error=str(exc))
        return 2, report.finish(2)
    return code, report.finish(code)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
        out = getattr(args, "out", None)
    except SystemExit as exc:
        return 2 if exc.code else 0
    code, doc = run(argv)
    if doc.get("command") != "usage":
        _emit(doc, out)
    return code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
