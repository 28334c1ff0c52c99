"""Periodicity of words over a finite alphabet."""

from itertools import product
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from loopbench.errors import InvalidInput
from loopbench.words import (
    Word,
    all_words,
    is_constant,
    is_periodic,
    periodic_extension,
    periodicity_lemma_check,
    shortest_period,
)

binary_words = st.lists(st.integers(0, 1), min_size=1, max_size=24).map(tuple)


class TestWord:
    def test_rejects_letters_outside_alphabet(self):
        with pytest.raises(InvalidInput):
            Word((0, 2), 2)

    def test_slice_and_concatenation_stay_words(self):
        w = Word((0, 1, 1), 2)
        assert w[1:] == Word((1, 1), 2)
        assert (w + (0,)).letters == (0, 1, 1, 0)
        assert w[0] == 0

    def test_json_roundtrip_keeps_alphabet(self):
        w = Word((2, 0, 1), 3)
        assert Word.from_json(w.to_json(), 3) == w


class TestPeriodicity:
    def test_examples(self):
        assert is_periodic((0, 1, 0, 1, 0), 2)
        assert not is_periodic((0, 1, 1, 0), 2)
        assert shortest_period((0, 1, 0, 1, 0)) == 2
        assert shortest_period((0, 1, 1)) == 3
        assert shortest_period((1,)) == 1

    def test_every_word_is_periodic_beyond_its_length(self):
        assert is_periodic((0, 1, 1), 3)
        assert is_periodic((0, 1, 1), 7)

    def test_invalid_arguments(self):
        with pytest.raises(InvalidInput):
            is_periodic((0, 1), 0)
        with pytest.raises(InvalidInput):
            shortest_period(())

    @given(binary_words)
    def test_shortest_period_is_least(self, x):
        k = shortest_period(x)
        assert is_periodic(x, k)
        assert all(not is_periodic(x, j) for j in range(1, k))

    @given(binary_words)
    def test_period_multiples(self, x):
        """A k-periodic word is periodic for every multiple of k."""
        k = shortest_period(x)
        assert all(is_periodic(x, m * k) for m in range(1, 4))

    def test_constant_words(self):
        assert is_constant((2, 2, 2))
        assert not is_constant((2, 1))
        assert shortest_period((2, 2, 2)) == 1


class TestFineWilf:
    """Long enough a- and b-periodic words are gcd(a, b)-periodic."""

    @pytest.mark.parametrize("n,max_len", [(2, 10), (3, 7), pytest.param(3, 10, marks=pytest.mark.slow)])
    def test_exhaustive(self, n, max_len):
        for length in range(1, max_len + 1):
            for x in all_words(n, length):
                # pairs that are not both periods of x hold vacuously
                periods = [p for p in range(1, 11) if is_periodic(x, p)]
                for a in periods:
                    for b in periods:
                        assert periodicity_lemma_check(x, a, b)

    def test_bound_is_tight(self):
        # one letter short of 2 + 3 - gcd(2, 3)
        x = (0, 1, 0)
        assert is_periodic(x, 2) and is_periodic(x, 3)
        assert not is_periodic(x, gcd(2, 3))


class TestSubwordPeriod:
    """A subword of length >= 2k - 2 keeps the shortest period k of the word."""

    @pytest.mark.parametrize("n,max_len", [(2, 12), (3, 7)])
    def test_exhaustive(self, n, max_len):
        for length in range(2, max_len + 1):
            for x in all_words(n, length):
                k = shortest_period(x)
                if k < 2:
                    continue
                for size in range(max(2 * k - 2, 1), length + 1):
                    for start in range(length - size + 1):
                        assert shortest_period(x[start : start + size]) == k

    @pytest.mark.slow
    def test_ternary_up_to_twelve(self):
        # longer subwords contain one of length 2k - 2, so that length is enough
        for length in range(2, 13):
            for x in all_words(3, length):
                k = shortest_period(x)
                size = 2 * k - 2
                if k < 2 or size > length:
                    continue
                for start in range(length - size + 1):
                    assert shortest_period(x[start : start + size]) == k


class TestHelpers:
    def test_all_words_lexicographic(self):
        assert list(all_words(2, 2)) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert len(list(all_words(3, 3))) == 27

    def test_periodic_extension(self):
        assert periodic_extension((0, 1, 1), 2, 5) == (0, 1, 0, 1, 0)
        with pytest.raises(InvalidInput):
            periodic_extension((0, 1), 3, 5)

    @given(binary_words)
    def test_extension_by_shortest_period_restores_word(self, x):
        assert periodic_extension(x, shortest_period(x), len(x)) == x

    def test_letters_of_word_and_tuple_agree(self):
        for x in product(range(2), repeat=5):
            assert shortest_period(Word(x, 2)) == shortest_period(x)
