from __future__ import annotations

import random
from fractions import Fraction as F

import numpy as np
import pytest

from covergames.covers import (
    Ball,
    Box,
    Cover,
    CoverSeq,
    pairwise_disjoint_check,
    refines_check,
    region_contained_in,
    region_mask,
)
from covergames.exact import CheckFailure, InputError
from covergames.game import (
    adversarial_two_policy,
    assemble_W,
    block_index,
    hurewicz_selection_check,
    menger_selection_check,
    play_hurewicz_game,
    sc_plus_select,
    strategy_F_move,
    transcript_loss_report,
)



def overlapping_interval_covers(s, horizon, step=F(3, 100)):
    """Validated two-interval covers whose overlap widens per stage, so
    different blocks pick different brick sizes (distinct box values)."""
    covers = []
    for k in range(horizon):
        a = F(3, 5) + k * step
        b = F(2, 5) - k * step
        covers.append(
            Cover(
                s,
                [
                    Box(s, (F(0),), (a,), lo_closed=(True,)),
                    Box(s, (b,), (F(1),), hi_closed=(True,)),
                ],
            )
        )
    return CoverSeq(s, covers)


class TestStrategyMove:
    def test_trivial_covers_alternating(self, interval_64):
        s = interval_64
        trivial = Cover(s, [Ball(s, 32, F(2))])
        covers = CoverSeq(s, [trivial, trivial])
        move = strategy_F_move(s, covers, 1)
        assert len(move) == 2
        union = np.zeros(s.n, dtype=bool)
        for fam in move:
            union |= fam.union_mask()
        assert union.all()

    def test_interior_start(self, interval_64):
        s = interval_64
        covers = overlapping_interval_covers(s, 8)
        move = strategy_F_move(s, covers, 3)
        assert len(move) == 6  # families indexed 3..8
        union = np.zeros(s.n, dtype=bool)
        for fam in move:
            union |= fam.union_mask()
        assert union.all()
        for off, fam in enumerate(move):
            assert refines_check(fam.regions, covers.cover(3 + off)).ok

    def test_suffix_too_short(self, interval_64):
        s = interval_64
        covers = overlapping_interval_covers(s, 4)
        with pytest.raises(InputError):
            strategy_F_move(s, covers, 4)  # d=1 leaves one cover only

    def test_bit_identical_replay(self, interval_64):
        s = interval_64
        covers = overlapping_interval_covers(s, 6)
        a = strategy_F_move(s, covers, 1)
        b = strategy_F_move(s, covers, 1)
        assert [f.regions for f in a] == [f.regions for f in b]
        assert [f.witness for f in a] == [f.witness for f in b]


class TestBlockIndex:
    def _move(self, s):
        # distinct covers per stage so the families carry distinct boxes
        covers = overlapping_interval_covers(s, 4)
        move = strategy_F_move(s, covers, 1)
        fams = {n: fam for n, fam in enumerate(move, start=1)}
        # sanity for the tests below: no value collisions across families
        seen = {}
        for n, fam in fams.items():
            for r in fam.regions:
                seen.setdefault(r, n)
        assert all(seen[r] == n for n, fam in fams.items() for r in fam.regions)
        return fams

    def test_from_first_family(self, interval_64):
        fams = self._move(interval_64)
        region = fams[1].regions[0]
        assert block_index([region], fams, 1) == 2

    def test_spanning_first_and_third(self, interval_64):
        fams = self._move(interval_64)
        picks = [fams[1].regions[0], fams[3].regions[0]]
        assert block_index(picks, fams, 1) == 4

    def test_duplicate_value_counts_at_earliest(self, interval_64):
        # identical covers produce identical brick families; a region value
        # appearing at several stages counts at its earliest occurrence
        s = interval_64
        trivial = Cover(s, [Ball(s, 32, F(2))])
        covers = CoverSeq(s, [trivial] * 4)
        move = strategy_F_move(s, covers, 1)
        fams = {n: fam for n, fam in enumerate(move, start=1)}
        assert fams[3].regions[0] in fams[1].regions
        assert block_index([fams[3].regions[0]], fams, 1) == 2

    def test_empty_selection(self, interval_64):
        fams = self._move(interval_64)
        assert block_index([], fams, 1) == 1

    def test_foreign_region_rejected(self, interval_64):
        s = interval_64
        fams = self._move(s)
        with pytest.raises(InputError):
            block_index([Ball(s, 0, F(1, 3))], fams, 1)


class TestPlay:
    def test_single_point_space(self, point_space):
        s = point_space
        cover = Cover(s, [Ball(s, 0, F(1))])
        covers = CoverSeq(s, [cover] * 4)
        transcript = play_hurewicz_game(s, covers)
        loss = transcript_loss_report(transcript)
        assert loss.lost_by_one
        assert all(k == 1 for k in loss.tail_round)

    def test_covering_two_loses_for_one(self, interval_64):
        s = interval_64
        covers = overlapping_interval_covers(s, 8)
        transcript = play_hurewicz_game(s, covers)
        loss = transcript_loss_report(transcript)
        assert loss.lost_by_one
        # every round's selection covers the sample
        for rnd in transcript.rounds:
            u = np.zeros(s.n, dtype=bool)
            for region in rnd.two_move:
                u |= region_mask(region)
            assert u.all()

    def test_adversarial_two_keeps_one_alive(self, interval_64):
        s = interval_64
        covers = overlapping_interval_covers(s, 6)
        avoid = 32
        transcript = play_hurewicz_game(s, covers, adversarial_two_policy(avoid))
        loss = transcript_loss_report(transcript)
        assert not loss.lost_by_one
        assert avoid in loss.unresolved

    def test_blocks_strictly_increase(self, interval_64):
        s = interval_64
        covers = overlapping_interval_covers(s, 8)
        transcript = play_hurewicz_game(s, covers)
        for a, b in zip(transcript.blocks, transcript.blocks[1:]):
            assert a < b


class TestAssemble:
    def test_single_point_every_stage_nonempty(self, point_space):
        s = point_space
        cover = Cover(s, [Ball(s, 0, F(1))])
        covers = CoverSeq(s, [cover] * 4)
        res = sc_plus_select(s, covers)
        for lo, hi in res.usable_blocks():
            assert any(len(res.family(j)) > 0 for j in range(lo, hi))
        assert max(res.tail_index) == 1

    def test_all_three_clauses(self, interval_64):
        s = interval_64
        covers = overlapping_interval_covers(s, 8)
        res = sc_plus_select(s, covers)
        # clause 1: finite pairwise disjoint; clause 2: refines
        for n in range(1, 9):
            fam = res.family(n)
            assert len(fam) < 100
            assert pairwise_disjoint_check(fam.regions, s.mesh).ok
            assert refines_check(fam.regions, covers.cover(n)).ok
        # clause 3: the block clause via the recorded tail indices
        for lo, hi in res.usable_blocks():
            union = np.zeros(s.n, dtype=bool)
            for j in range(lo, hi):
                union |= res.family(j).union_mask()
            assert union.all()  # covering TWO gives tail index 1

    def test_block_minimality(self, interval_64):
        s = interval_64
        covers = overlapping_interval_covers(s, 8)
        transcript = play_hurewicz_game(s, covers)
        for k, rnd in enumerate(transcript.rounds):
            fams = transcript.move_families(k + 1)
            m = rnd.block
            assert block_index(rnd.two_move, fams, rnd.start_index) == m
            # decrementing the block breaks containment
            if rnd.two_move:
                below = [
                    n
                    for n in fams
                    if n < m - 1
                    for _ in fams[n].regions
                ]
                contained = all(
                    any(r in fams[n].regions for n in fams if n < m - 1)
                    for r in rnd.two_move
                )
                assert not contained

    def test_no_invented_regions(self, interval_64):
        s = interval_64
        covers = overlapping_interval_covers(s, 8)
        transcript = play_hurewicz_game(s, covers)
        res = assemble_W(transcript, covers)
        offered = set()
        for rnd in transcript.rounds:
            for region in rnd.two_move:
                offered.add(region)
        for n in range(1, 9):
            for region in res.family(n).regions:
                assert region in offered

    def test_members_fit_their_stage_cover(self, interval_64):
        s = interval_64
        covers = overlapping_interval_covers(s, 8)
        res = sc_plus_select(s, covers)
        for n in range(1, 9):
            cov = covers.cover(n)
            for region in res.family(n).regions:
                assert any(
                    region_contained_in(region, parent) is not None
                    for parent in cov.regions
                )

    def test_not_lost_rejected(self, interval_64):
        s = interval_64
        covers = overlapping_interval_covers(s, 6)
        transcript = play_hurewicz_game(s, covers, adversarial_two_policy(32))
        with pytest.raises(CheckFailure):
            assemble_W(transcript, covers)

    def test_deterministic(self, interval_64):
        s = interval_64
        covers = overlapping_interval_covers(s, 8)
        a = sc_plus_select(s, covers)
        b = sc_plus_select(s, covers)
        assert a.blocks == b.blocks
        assert [f.regions for f in a.families] == [f.regions for f in b.families]


class TestCheckers:
    def _covers(self, s, horizon=4):
        return CoverSeq(
            s,
            [
                Cover(s, [Ball(s, 0, F(2)), Ball(s, 32, F(1, 4)), Ball(s, 64, F(1, 4))])
                for _ in range(horizon)
            ],
        )

    def test_full_picks_tail_one(self, interval_64):
        s = interval_64
        covers = self._covers(s)
        picks = [[0, 1, 2]] * 4
        rep = hurewicz_selection_check(s, covers, picks)
        assert rep.ok and set(rep.tail_start) == {1}

    def test_empty_picks_fail_everywhere(self, interval_64):
        s = interval_64
        covers = self._covers(s)
        rep = hurewicz_selection_check(s, covers, [[], [], [], []])
        assert not rep.ok and len(rep.failures) > 0
        men = menger_selection_check(s, covers, [[], [], [], []])
        assert not men.ok and men.failure_point == 0

    def test_whole_space_pick_covers(self, interval_64):
        s = interval_64
        covers = self._covers(s)
        picks = [[0], [], [], []]  # one pick containing a whole-space region
        assert menger_selection_check(s, covers, picks).ok

    def test_menger_without_hurewicz_tail(self, interval_64):
        # each point covered at exactly one stage: the union covers but the
        # tail condition fails for the early-only points
        s = interval_64
        left = Box(s, (F(0),), (F(33, 64),), lo_closed=(True,))
        right = Box(s, (F(31, 64),), (F(1),), hi_closed=(True,))
        covers = CoverSeq(s, [Cover(s, [left, right]) for _ in range(2)])
        picks = [[0], [1]]
        men = menger_selection_check(s, covers, picks)
        assert men.ok
        hur = hurewicz_selection_check(s, covers, picks)
        assert not hur.ok

    def test_hurewicz_implies_menger(self, interval_64):
        s = interval_64
        rng = random.Random(41)
        covers = self._covers(s)
        for _ in range(20):
            picks = [
                sorted(rng.sample(range(3), rng.randrange(1, 4)))
                for _ in range(4)
            ]
            hur = hurewicz_selection_check(s, covers, picks)
            if hur.ok:
                assert menger_selection_check(s, covers, picks).ok

    def test_select_output_passes(self, interval_64):
        from covergames.netting import chain_decomposition, select_from_decomposition

        s = interval_64
        covers = self._covers(s)
        dec = chain_decomposition(
            s,
            [
                s.subset_from_indices(range(0, 33)),
                s.subset_all(),
                s.subset_all(),
                s.subset_all(),
            ],
        )
        sel = select_from_decomposition(s, dec, covers)
        rep = hurewicz_selection_check(s, covers, sel.picks)
        assert rep.ok
        for p in range(s.n):
            assert rep.tail_start[p] <= dec.tail_start[p]


class TestCantorGame:
    def test_blocks_single_steps(self, cantor_5):
        s = cantor_5
        cover = Cover(s, [Ball(s, 0, F(2)), Ball(s, 16, F(1, 2))])
        covers = CoverSeq(s, [cover] * 5)
        res = sc_plus_select(s, covers)
        assert res.blocks == tuple(range(2, 2 + len(res.blocks)))
        assert max(res.tail_index) == 1
