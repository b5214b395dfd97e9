from __future__ import annotations

from fractions import Fraction as F

import pytest

from covergames import jsonio
from covergames.covers import Ball, Box, CoClosedBalls, Cover, CoverSeq
from covergames.exact import InputError
from covergames.netting import chain_decomposition
from covergames.space import build_cantor_space, build_grid_space


class TestSpaceRoundTrip:
    def test_grid_round_trip(self):
        s = build_grid_space(2, F(1, 4))
        doc = jsonio.space_to_json(s)
        assert doc["mesh"] == "3/16"  # (h/2) * (3/2 >= sqrt(2))
        assert doc["points"][0] == ["0/1", "0/1"]
        s2 = jsonio.space_from_json(doc)
        assert s2.points == s.points
        assert s2.metric_kind == s.metric_kind
        assert s2.mesh == s.mesh
        # structure is re-detected from the raw coordinates
        assert s2.screen_dim == 2

    def test_cantor_round_trip(self):
        s = build_cantor_space(4)
        s2 = jsonio.space_from_json(jsonio.space_to_json(s))
        assert s2.points == s.points
        assert s2.screen_dim == 0

    def test_missing_key(self):
        with pytest.raises(InputError):
            jsonio.space_from_json({"points": [["0/1"]]})


class TestRegionRoundTrip:
    def test_all_shapes(self, interval_8):
        s = interval_8
        regions = [
            Ball(s, 3, F(1, 4)),
            Box(s, (F(0),), (F(3, 5),), lo_closed=(True,)),
            CoClosedBalls(s, ((0, F(1, 8)), (8, F(1, 4)))),
        ]
        for r in regions:
            doc = jsonio.region_to_json(r)
            assert jsonio.region_from_json(s, doc) == r

    def test_spec_shape_names(self, interval_8):
        s = interval_8
        assert jsonio.region_to_json(Ball(s, 0, F(1, 2)))["shape"] == "ball"
        assert jsonio.region_to_json(
            Box(s, (F(1, 8),), (F(7, 8),))
        )["shape"] == "box"
        assert (
            jsonio.region_to_json(CoClosedBalls(s, ((0, F(1, 2)),)))["shape"]
            == "co_closed_balls"
        )

    def test_plain_spec_box_parses(self, interval_8):
        # a box document without end flags (the baseline schema) parses open
        doc = {"shape": "box", "lo": ["1/8"], "hi": ["7/8"]}
        r = jsonio.region_from_json(interval_8, doc)
        assert r.lo_closed == (False,)


class TestCoverAndChainFiles:
    def test_cover_round_trip(self, interval_8):
        s = interval_8
        cover = Cover(s, [Ball(s, 0, F(1, 2)), Ball(s, 8, F(1, 2))])
        doc = jsonio.cover_to_json(cover)
        c2 = jsonio.cover_from_json(s, doc)
        assert c2.regions == cover.regions

    def test_coverseq_round_trip(self, interval_8):
        s = interval_8
        seq = CoverSeq(
            s,
            [
                Cover(s, [Ball(s, 4, F(2))]),
                Cover(s, [Ball(s, 0, F(2))]),
            ],
        )
        doc = jsonio.coverseq_to_json(seq)
        seq2 = jsonio.coverseq_from_json(s, doc)
        assert [c.regions for c in seq2.covers] == [c.regions for c in seq.covers]

    def test_space_label_mismatch(self, interval_8):
        doc = {"space": "another", "regions": []}
        with pytest.raises(InputError):
            jsonio.cover_from_json(interval_8, doc)

    def test_inline_space_accepted(self, interval_8):
        s = interval_8
        doc = {
            "space": jsonio.space_to_json(s),
            "regions": [jsonio.region_to_json(Ball(s, 0, F(1, 2)))],
        }
        cover = jsonio.cover_from_json(s, doc)
        assert len(cover.regions) == 1

    def test_inline_space_mismatch_rejected(self, interval_8):
        other = build_grid_space(1, F(1, 4))
        doc = {"space": jsonio.space_to_json(other), "regions": []}
        with pytest.raises(InputError):
            jsonio.cover_from_json(interval_8, doc)

    def test_chain_round_trip(self, interval_8):
        s = interval_8
        dec = chain_decomposition(
            s, [s.subset_from_indices(range(5)), s.subset_all()]
        )
        doc = jsonio.chain_to_json(dec)
        dec2 = jsonio.chain_from_json(s, doc)
        assert dec2.chain == dec.chain

    def test_selections_round_trip(self, interval_8):
        s = interval_8
        from covergames.space import doubling_delta

        sel = {1: [Ball(s, 0, doubling_delta(1)), Ball(s, 8, doubling_delta(1))]}
        doc = jsonio.selections_to_json(sel)
        sel2 = jsonio.selections_from_json(s, doc)
        assert sel2 == sel

    def test_picks_round_trip(self):
        picks = [[0, 2], [], [1]]
        assert jsonio.picks_from_json(jsonio.picks_to_json(picks)) == picks

    def test_malformed_json_file(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(InputError):
            jsonio.load_json(p)


class TestCanonical:
    def test_digest_stable(self):
        a = jsonio.digest({"b": 1, "a": [1, 2]})
        b = jsonio.digest({"a": [1, 2], "b": 1})
        assert a == b
