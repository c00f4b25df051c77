from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from randgroups.errors import BudgetExceeded, PreconditionError
from randgroups.density import (
    Budget,
    DehnRewriter,
    Method,
    ModelParams,
    Presentation,
    Verdict,
    closed_form_count,
    count_cyclically_reduced,
    enumerate_B_l,
    is_small_cancellation,
    is_trivial,
    max_piece_ratio,
    sample_presentation,
)
from randgroups.freegroup import Word

from .oracles import all_pairs_piece_ratio, brute_cyclically_reduced_count


# a length-24 relator found by search; its piece ratio is 1/8
SC_RELATOR = "a1a1a1a2a1a1a2a2a1a2a2a2A1A1A1a2A1A1a2a2A1a2a2a2"


class TestCounts:
    @pytest.mark.parametrize("l,expected", [(1, 4), (2, 12), (3, 28)])
    def test_small_values(self, l, expected):
        # brute_cyclically_reduced_count(2, l) gives 4, 12, 28
        assert count_cyclically_reduced(2, l) == expected

    @pytest.mark.parametrize("k,l", [(2, l) for l in range(1, 9)] + [(3, l) for l in range(1, 6)])
    def test_against_brute_force(self, k, l):
        assert count_cyclically_reduced(k, l) == brute_cyclically_reduced_count(k, l)

    def test_closed_form(self):
        for k in range(2, 5):
            for l in range(1, 11):
                assert count_cyclically_reduced(k, l) == closed_form_count(k, l)

    def test_rejects_bad_rank(self):
        with pytest.raises(PreconditionError):
            count_cyclically_reduced(1, 3)


class TestEnumerate:
    def test_level_one(self):
        assert {str(w) for w in enumerate_B_l(2, 1)} == {"a1", "A1", "a2", "A2"}

    @pytest.mark.parametrize("l", range(1, 7))
    def test_length_and_validity(self, l):
        words = list(enumerate_B_l(2, l))
        assert len(words) == len(set(words)) == count_cyclically_reduced(2, l)
        assert all(w.is_cyclically_reduced() and len(w) == l for w in words)

    def test_deterministic(self):
        assert list(enumerate_B_l(2, 4)) == list(enumerate_B_l(2, 4))

    def test_cap(self):
        with pytest.raises(BudgetExceeded):
            list(enumerate_B_l(2, 12, cap=1000))


class TestSampling:
    def test_relator_count(self):
        p = sample_presentation(ModelParams(2, 3, 0.5, seed=7))
        assert len(p.relators) == 5
        assert all(len(r) == 3 and r.is_cyclically_reduced() for r in p.relators)

    def test_density_zero(self):
        assert len(sample_presentation(ModelParams(2, 1, 0.0, seed=1)).relators) == 1

    def test_deterministic(self):
        a = sample_presentation(ModelParams(2, 12, 0.2, seed=99))
        b = sample_presentation(ModelParams(2, 12, 0.2, seed=99))
        assert a == b

    def test_substreams_differ(self):
        params = ModelParams(2, 12, 0.2, seed=99)
        assert sample_presentation(params, (0,)) != sample_presentation(params, (1,))

    def test_json_roundtrip(self):
        p = sample_presentation(ModelParams(2, 8, 0.3, seed=3))
        q = Presentation.from_json(p.to_json())
        assert q == p

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**63 - 1), st.integers(1, 14), st.floats(0, 0.4))
    def test_invariants(self, seed, l, d):
        params = ModelParams(2, l, d, seed)
        p = sample_presentation(params)
        assert len(p.relators) == params.relator_count >= 1
        assert all(len(r) == l and r.is_cyclically_reduced() for r in p.relators)

    def test_uniform_on_B3(self):
        # chi-square goodness of fit against the uniform law on the 28 words
        from collections import Counter
        from scipy.stats import chisquare
        params = ModelParams(2, 3, 0.0, seed=2024)
        counts = Counter(sample_presentation(params, (t,)).relators[0] for t in range(5600))
        assert len(counts) == 28
        assert chisquare(list(counts.values())).pvalue > 1e-3


class TestPieces:
    def test_two_relators(self):
        p = Presentation.from_relators(["a1a2a2", "a1A2A2"])
        # all_pairs_piece_ratio gives 2/3: the piece a2a2 occurs in a1a2a2 and
        # in the inverse a2a2A1 of the second relator
        assert max_piece_ratio(p) == Fraction(2, 3)

    def test_self_overlap(self):
        p = Presentation.from_relators(["a1a2a1A2"])
        assert max_piece_ratio(p) == Fraction(1, 4)

    def test_duplicates_collapse(self):
        one = Presentation.from_relators(["a1a2a1A2"])
        two = Presentation.from_relators(["a1a2a1A2", "a1a2a1A2"])
        assert max_piece_ratio(one) == max_piece_ratio(two)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32), st.integers(3, 10), st.floats(0, 0.3))
    def test_matches_all_pairs_oracle(self, seed, l, d):
        p = sample_presentation(ModelParams(2, l, d, seed))
        assert max_piece_ratio(p) == all_pairs_piece_ratio([r.letters for r in p.relators], l)

    def test_known_small_cancellation_relator(self):
        p = Presentation.from_relators([SC_RELATOR])
        assert max_piece_ratio(p) == Fraction(1, 8)
        assert is_small_cancellation(p)


class TestWordProblem:
    @pytest.fixture
    def sc(self):
        return Presentation.from_relators([SC_RELATOR])

    def test_relator_is_trivial(self, sc):
        v = is_trivial(sc.relators[0], sc)
        assert v.status is Verdict.TRIVIAL and v.method is Method.DEHN

    def test_generator_nontrivial(self, sc):
        assert is_trivial(Word.parse("a1"), sc).status is Verdict.NONTRIVIAL

    def test_empty_word(self, sc):
        assert is_trivial(Word.identity(), sc).status is Verdict.TRIVIAL

    def test_conjugated_product_trivial(self, sc):
        r = sc.relators[0]
        c = Word.parse("a2a1A2")
        w = r.conjugate(c) * r.inverse().conjugate(Word.parse("a1"))
        assert is_trivial(w, sc).status is Verdict.TRIVIAL

    def test_dehn_strictly_shortens(self, sc):
        dehn = DehnRewriter(sc)
        r = sc.relators[0]
        w = (r.conjugate(Word.parse("a2a2")) * Word.parse("a1a2A1")).letters
        trace = dehn.trace_cyclic(w)
        lengths = [len(x) for x in trace]
        assert all(a > b for a, b in zip(lengths, lengths[1:]))
        assert len(trace) - 1 <= len(w)

    def test_ball_search_finite_quotient(self):
        # <a1,a2 : a1a1> : a1 is nontrivial but A1A1 . a1a1 style words are trivial
        p = Presentation.from_relators(["a1a1"])
        assert is_trivial(Word.parse("a2a1a1A2"), p).status is Verdict.TRIVIAL
        v = is_trivial(Word.parse("a1"), p, Budget(radius=2, node_cap=500))
        assert v.status is Verdict.UNKNOWN and v.method is Method.BALL_SEARCH

    def test_ball_search_budget_respected(self):
        p = Presentation.from_relators(["a1a2a1a2a1"])
        v = is_trivial(Word.parse("a2a2a2"), p, Budget(radius=6, node_cap=50))
        assert v.budget_consumed <= 50


def test_proper_power_is_not_small_cancellation():
    p = Presentation.from_relators(["a1a2a1a2"])
    assert max_piece_ratio(p) == 1
    assert all_pairs_piece_ratio([(1, 2, 1, 2)], 4) == 1
