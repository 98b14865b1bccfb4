import itertools
import random

import pytest

from wordweight.errors import BudgetExhausted, ConjugatorTooLong, IndexTooSmall
from wordweight.genset import (
    BigGen,
    GenSetParams,
    LETTER_GENS,
    enumerate_generators,
    expand_generator,
    max_usable_index,
    normalize_conjugator,
    theta_value,
)
from wordweight.words import IDENTITY, LETTERS, Word

W = Word.parse

P5 = GenSetParams(base=5, jmin=2)
P2 = GenSetParams(base=2, jmin=1)


def raw_expansion(v: Word, j: int, params: GenSetParams) -> Word:
    """Expansion straight from the defining product, no normal form."""
    return (
        v
        * W(f"b^{params.inner_exp(j)}")
        * ~v
        * W(f"a^{params.outer_exp(j)}")
        * W(f"b^{params.outer_exp(j)}")
    )


def all_reduced_words(max_len: int):
    """Brute-force: every reduced word with at most max_len letters."""
    words = [IDENTITY]
    frontier = [IDENTITY]
    for _ in range(max_len):
        nxt = []
        for u in frontier:
            for l in LETTERS:
                w = u * l.word()
                if w.s_length == u.s_length + 1:
                    nxt.append(w)
        words.extend(nxt)
        frontier = nxt
    return words


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            GenSetParams(base=1)
        with pytest.raises(ValueError):
            GenSetParams(jmin=0)
        with pytest.raises(ValueError):
            GenSetParams(base=5, jmin=2, jmax_cap=1)

    def test_schedule(self):
        assert P5.conjugator_bound(2) == 25
        assert P5.inner_exp(2) == 125
        assert P5.outer_exp(2) == 625
        assert theta_value(2, P5) == 125 + 2 * 625


class TestNormalize:
    def test_strips_trailing_b_power(self):
        gen = normalize_conjugator(W("a b^3"), 2, P5)
        assert gen == BigGen(W("a"), 2)

    def test_identity_fixed(self):
        assert normalize_conjugator(IDENTITY, 2, P5) == BigGen(IDENTITY, 2)

    def test_pure_b_power_drops_to_identity(self):
        assert normalize_conjugator(W("b^2"), 2, P5) == BigGen(IDENTITY, 2)

    def test_errors(self):
        with pytest.raises(IndexTooSmall):
            normalize_conjugator(IDENTITY, 1, P5)
        with pytest.raises(ConjugatorTooLong):
            normalize_conjugator(W("a^26"), 2, P5)

    def test_idempotent_and_expansion_preserving(self):
        rng = random.Random(7)
        for _ in range(1000):
            j = rng.choice([1, 2])
            bound = P2.conjugator_bound(j)
            v = IDENTITY
            for _ in range(rng.randint(0, bound)):
                v = v * rng.choice(LETTERS).word()
            if v.s_length > bound:
                continue
            gen = normalize_conjugator(v, j, P2)
            again = normalize_conjugator(gen.conj, j, P2)
            assert again == gen
            assert expand_generator(gen, P2) == raw_expansion(v, j, P2)


class TestExpansion:
    def test_identity_conjugator_base5(self):
        gen = BigGen(IDENTITY, 2)
        assert expand_generator(gen, P5) == W("b^125 a^625 b^625")
        assert expand_generator(gen, P5).s_length == 1375
        assert expand_generator(gen, P5).abelianize() == (625, 750, 0)

    def test_letter_conjugator_base2(self):
        assert expand_generator(BigGen(W("a"), 1), P2) == W("a b^2 a^3 b^4")

    def test_letter_conjugator_base5(self):
        assert expand_generator(BigGen(W("c"), 2), P5) == W(
            "c b^125 c^-1 a^625 b^625"
        )

    def test_letter_gen(self):
        assert expand_generator(LETTER_GENS[1], P5) == W("a^-1")

    def test_expansion_length_formula(self):
        # Writing the normal-form conjugator as a^k w0 (k >= 0 maximal,
        # w0 not starting with a positive a-run), the expansion reduces to
        # a^k w0 b^inner w0^-1 a^(outer-k) b^outer with no other losses:
        # |expansion| = k + 2|w0| + inner + (outer - k) + outer.
        rng = random.Random(13)
        for _ in range(200):
            j = rng.choice([1, 2])
            v = IDENTITY
            for _ in range(rng.randint(0, P2.conjugator_bound(j))):
                v = v * rng.choice(LETTERS).word()
            if v.s_length > P2.conjugator_bound(j):
                continue
            gen = normalize_conjugator(v, j, P2)
            runs = gen.conj.runs
            k = runs[0][1] if runs and runs[0][0] == "a" and runs[0][1] > 0 else 0
            w0_len = gen.conj.s_length - k
            expected = (
                k
                + 2 * w0_len
                + P2.inner_exp(j)
                + (P2.outer_exp(j) - k)
                + P2.outer_exp(j)
            )
            assert expand_generator(gen, P2).s_length == expected


class TestEnumeration:
    def test_base2_index1_complete_count(self):
        gens = list(enumerate_generators(P2, 1, max_count=100, complete=True))
        assert len(gens) == 25

    def test_matches_bruteforce_expansion_set(self):
        # Oracle: expand the raw definition over every reduced v with
        # |v| <= 2 and dedupe by expansion.
        oracle = {
            raw_expansion(v, 1, P2) for v in all_reduced_words(P2.conjugator_bound(1))
        }
        gens = list(enumerate_generators(P2, 1, max_count=100, complete=True))
        assert {expand_generator(g, P2) for g in gens} == oracle
        assert len(oracle) == 25

    def test_pairwise_distinct_and_deterministic(self):
        a = list(enumerate_generators(P2, 1, max_count=100, complete=True))
        b = list(enumerate_generators(P2, 1, max_count=100, complete=True))
        assert a == b
        expansions = [expand_generator(g, P2) for g in a]
        assert len(set(expansions)) == len(expansions)

    def test_length_lex_order_prefix(self):
        gens = list(itertools.islice(enumerate_generators(P2, 1), 5))
        assert [g.conj for g in gens] == [
            IDENTITY,
            W("a"),
            W("a^-1"),
            W("c"),
            W("c^-1"),
        ]

    def test_truncation_without_complete(self):
        gens = list(enumerate_generators(P2, 1, max_count=10))
        assert len(gens) == 10

    def test_stream_prefix_at_canonical_base(self):
        gens = list(enumerate_generators(P5, 2, max_count=10))
        assert len(gens) == 10
        assert gens[0].conj == IDENTITY and gens[0].index == 2
        expansions = [expand_generator(g, P5) for g in gens]
        assert len(set(expansions)) == 10

    def test_budget_exhausted_when_complete_demanded(self):
        with pytest.raises(BudgetExhausted):
            list(enumerate_generators(P2, 1, max_count=10, complete=True))
        with pytest.raises(BudgetExhausted):
            list(enumerate_generators(P5, 2, max_count=1000, complete=True))

    def test_index_below_jmin(self):
        with pytest.raises(IndexTooSmall):
            list(enumerate_generators(P5, 1))


class TestMaxUsableIndex:
    def test_no_index_qualifies(self):
        assert max_usable_index(W("c^3"), 3, P2) is None

    def test_small_target(self):
        assert max_usable_index(W("a^4 b^4"), 3, P2) == 1

    def test_base5_block(self):
        assert max_usable_index(W("a^625 b^625"), 126, P5) == 2

    def test_respects_cap(self):
        capped = GenSetParams(base=2, jmin=1, jmax_cap=1)
        assert max_usable_index(W("a^100 b^100"), 100, capped) == 1
        assert max_usable_index(W("a^100 b^100"), 100, P2) == 3
