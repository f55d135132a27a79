import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seedgraph.citescore import Approach, ScoreMap
from seedgraph.fusion import (
    combine_all,
    combine_citation,
    rank,
    rescale_to_range,
)

EXCL = frozenset({999})


def smap(approach, entries, excluded=EXCL):
    return ScoreMap.from_dict(approach, entries, excluded)


class TestCombineCitation:
    def test_hand_arithmetic(self):
        combined = combine_citation(
            smap(Approach.DC, {7: 2.0}),
            smap(Approach.BC, {7: 10.0}),
            smap(Approach.CC, {7: 20.0}),
        )
        assert combined.as_dict() == {7: 5.0}
        assert combined.approach is Approach.DC_BC_CC

    def test_missing_components_contribute_zero(self):
        combined = combine_citation(
            smap(Approach.DC, {1: 4.0}),
            smap(Approach.BC, {2: 3.0}),
            smap(Approach.CC, {1: 2.0, 3: 5.0}),
        )
        assert combined.as_dict() == {
            1: 4.0 + 2.0 * 0.1,
            2: 3.0 * 0.1,
            3: 5.0 * 0.1,
        }

    def test_entry_set_is_the_union(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            parts = []
            for approach in (Approach.DC, Approach.BC, Approach.CC):
                n = int(rng.integers(0, 15))
                idx = rng.choice(200, size=n, replace=False)
                parts.append(
                    smap(approach, {int(i): float(rng.integers(1, 9)) for i in idx})
                )
            combined = combine_citation(*parts)
            union = set().union(*(p.as_dict() for p in parts))
            assert set(combined.as_dict()) == union

    def test_intersection_mode(self):
        combined = combine_citation(
            smap(Approach.DC, {1: 1.0, 2: 1.0}),
            smap(Approach.BC, {2: 2.0, 3: 2.0}),
            smap(Approach.CC, {2: 4.0, 4: 4.0}),
            mode="intersection",
        )
        assert set(combined.as_dict()) == {2}

    def test_custom_weights_are_linear(self):
        parts = (
            smap(Approach.DC, {1: 2.0}),
            smap(Approach.BC, {1: 3.0}),
            smap(Approach.CC, {1: 4.0}),
        )
        single = combine_citation(*parts, weights=(1.0, 0.5, 0.25))
        double = combine_citation(*parts, weights=(2.0, 1.0, 0.5))
        assert double.get(1) == 2 * single.get(1)

    def test_zero_weighted_entries_drop_out(self):
        combined = combine_citation(
            smap(Approach.DC, {1: 2.0}),
            smap(Approach.BC, {2: 3.0}),
            smap(Approach.CC, {}),
            weights=(0.0, 0.1, 0.1),
        )
        assert set(combined.as_dict()) == {2}

    def test_weights_validated(self):
        parts = (
            smap(Approach.DC, {}),
            smap(Approach.BC, {}),
            smap(Approach.CC, {}),
        )
        with pytest.raises(ValueError):
            combine_citation(*parts, weights=(1.0, -0.1, 0.1))

    def test_mismatched_exclusions_rejected(self):
        with pytest.raises(ValueError, match="excluded"):
            combine_citation(
                smap(Approach.DC, {1: 1.0}),
                smap(Approach.BC, {}, excluded=frozenset({1})),
                smap(Approach.CC, {}),
            )

    def test_bad_mode_rejected(self):
        parts = (
            smap(Approach.DC, {1: 1.0}),
            smap(Approach.BC, {}),
            smap(Approach.CC, {}),
        )
        with pytest.raises(ValueError, match="mode"):
            combine_citation(*parts, mode="xor")


class TestRescale:
    def test_hand_values(self):
        out = rescale_to_range([0.0, 5.0, 10.0], 1.0, 6.0)
        assert out.tolist() == [1.0, 3.5, 6.0]

    def test_degenerate_input_maps_to_midpoint(self):
        out = rescale_to_range([7.0, 7.0, 7.0], 2.0, 4.0)
        assert out.tolist() == [3.0, 3.0, 3.0]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            rescale_to_range([], 0.0, 1.0)

    def test_inverted_target_rejected(self):
        with pytest.raises(ValueError):
            rescale_to_range([1.0, 2.0], 5.0, 4.0)

    @settings(deadline=None)
    @given(
        st.lists(
            st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
            min_size=2,
            max_size=40,
        ),
        st.floats(min_value=-100, max_value=100),
        st.floats(min_value=0, max_value=100),
    )
    def test_endpoints_and_order(self, values, lo, width):
        hi = lo + width
        out = rescale_to_range(values, lo, hi)
        assert np.all(out >= lo - 1e-9) and np.all(out <= hi + 1e-9)
        if min(values) < max(values):
            assert out[np.argmin(values)] == pytest.approx(lo, abs=1e-12)
            assert out[np.argmax(values)] == pytest.approx(hi, abs=1e-12)
            order = np.argsort(values, kind="stable")
            assert np.all(np.diff(out[order]) >= 0)


class TestCombineAll:
    def test_hand_table(self):
        cited = smap(Approach.DC_BC_CC, {1: 2.0, 2: 5.0})
        lexical = smap(Approach.RA, {1: 1.0, 2: 3.0, 3: 5.0})
        combined = combine_all(cited, lexical)
        assert combined.approach is Approach.DC_BC_CC_RA
        assert combined.as_dict() == {1: 4.0, 2: 8.5, 3: 5.0}

    def test_superset_of_citation_entries(self):
        cited = smap(Approach.DC_BC_CC, {4: 1.0, 9: 3.0})
        lexical = smap(Approach.RA, {9: 2.0, 11: 7.0})
        combined = combine_all(cited, lexical)
        assert set(combined.as_dict()) >= {4, 9}
        assert combined.get(4) == 1.0  # untouched where lexical is absent

    def test_empty_citation_blend_passes_lexical_through(self):
        lexical = smap(Approach.RA, {3: 0.25, 8: 0.5})
        combined = combine_all(smap(Approach.DC_BC_CC, {}), lexical)
        assert combined.approach is Approach.DC_BC_CC_RA
        assert combined.as_dict() == {3: 0.25, 8: 0.5}

    def test_empty_lexical_leaves_citation_blend(self):
        cited = smap(Approach.DC_BC_CC, {2: 1.5})
        combined = combine_all(cited, smap(Approach.RA, {}))
        assert combined.as_dict() == {2: 1.5}

    def test_uniform_lexical_scores_land_on_midpoint(self):
        cited = smap(Approach.DC_BC_CC, {1: 2.0, 2: 6.0})
        lexical = smap(Approach.RA, {3: 0.7, 4: 0.7})
        combined = combine_all(cited, lexical)
        assert combined.get(3) == combined.get(4) == 4.0

    def test_rescale_uses_citation_range(self):
        cited = smap(Approach.DC_BC_CC, {1: 2.0, 2: 6.0})
        lexical = smap(Approach.RA, {5: 10.0, 6: 20.0})
        combined = combine_all(cited, lexical)
        assert combined.get(5) == 2.0
        assert combined.get(6) == 6.0

    def test_intersection_mode(self):
        cited = smap(Approach.DC_BC_CC, {1: 2.0, 2: 6.0})
        lexical = smap(Approach.RA, {2: 1.0, 3: 9.0})
        combined = combine_all(cited, lexical, mode="intersection")
        assert set(combined.as_dict()) == {2}


class TestRank:
    def test_descending_scores(self):
        ranked = rank(smap(Approach.DC, {1: 2.0, 2: 9.0, 3: 4.0}), tie_seed=0)
        assert ranked.scores.tolist() == [9.0, 4.0, 2.0]
        assert ranked.indices.tolist() == [2, 3, 1]

    def test_same_seed_reproduces(self):
        scores = smap(Approach.DC, {i: float(i % 3) + 1 for i in range(30)})
        a = rank(scores, tie_seed=1234)
        b = rank(scores, tie_seed=1234)
        assert a.indices.tolist() == b.indices.tolist()

    def test_permutes_only_within_tied_blocks(self):
        entries = {1: 5.0, 2: 3.0, 3: 3.0, 4: 3.0, 5: 1.0}
        for seed in range(40):
            ranked = rank(smap(Approach.DC, entries), tie_seed=seed)
            assert ranked.indices[0] == 1
            assert ranked.indices[-1] == 5
            assert sorted(ranked.indices[1:4].tolist()) == [2, 3, 4]

    def test_all_tie_orders_reachable(self):
        entries = {10: 2.0, 11: 2.0, 12: 2.0}
        seen = set()
        for seed in range(300):
            ranked = rank(smap(Approach.DC, entries), tie_seed=seed)
            seen.add(tuple(ranked.indices.tolist()))
        assert seen == set(itertools.permutations((10, 11, 12)))

    def test_empty_map(self):
        ranked = rank(smap(Approach.DC, {}), tie_seed=0)
        assert len(ranked) == 0
        assert ranked.items == []

    @settings(deadline=None)
    @given(
        st.dictionaries(
            st.integers(min_value=0, max_value=100),
            st.sampled_from([1.0, 2.0, 3.0]),
            max_size=30,
        ),
        st.integers(min_value=0, max_value=2**32),
    )
    def test_always_a_sorted_permutation(self, entries, seed):
        ranked = rank(smap(Approach.DC, entries), tie_seed=seed)
        assert np.all(np.diff(ranked.scores) <= 0)
        assert sorted(ranked.indices.tolist()) == sorted(entries)
        for idx, score in ranked:
            assert entries[idx] == score
