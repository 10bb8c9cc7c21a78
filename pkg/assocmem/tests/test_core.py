import os
import tempfile
from collections import Counter

import numpy as np
from django.test import SimpleTestCase

from assocmem.core import (AssocmemError, Alphabet, ERASED, ErasurePattern, PartialWord, RetrievalResult, Word,
                           WordSet, candidates, erase, make_rng, masked_eq, read_query_file, read_word_file,
                           sample_word_set, write_word_file)


class MaskedEqTests(SimpleTestCase):

    def test_agreement_with_one_erasure(self):
        self.assertTrue(masked_eq((1, 2, 3), (1, None, 3)))

    def test_disagreement(self):
        self.assertFalse(masked_eq((1, 2), (2, None)))

    def test_all_erased_matches_anything(self):
        self.assertTrue(masked_eq(('?', '?'), (0, 1)))

    def test_length_mismatch(self):
        with self.assertRaises(ValueError):
            masked_eq((1, 2), (1, 2, 3))


class DomainTypeTests(SimpleTestCase):

    def test_alphabet_bounds(self):
        with self.assertRaises(ValueError):
            Alphabet(1)
        self.assertEqual(Alphabet(2).bits_per_symbol, 1)
        self.assertEqual(Alphabet(5).bits_per_symbol, 3)
        self.assertEqual(Alphabet(256).bits_per_symbol, 8)

    def test_partial_word(self):
        q = PartialWord([1, None, '?', 0])
        self.assertEqual(q.erased_count(), 2)
        self.assertEqual(q.erased_positions(), [1, 2])
        self.assertEqual(q.known_positions(), [0, 3])
        self.assertEqual(q.erasure_mask(), 0b0110)
        self.assertEqual(str(q), '1 ? ? 0')
        self.assertFalse(q.is_complete())

    def test_word_rejects_erasures(self):
        with self.assertRaises(ValueError):
            Word([0, ERASED])

    def test_erasure_pattern(self):
        pattern = ErasurePattern([2, 0], 3)
        self.assertEqual(pattern.r, 2)
        self.assertEqual(pattern.mask, 0b101)
        self.assertEqual(pattern.apply(Word([4, 5, 6])), PartialWord([None, 5, None]))
        with self.assertRaises(ValueError):
            ErasurePattern([1, 1], 3)
        with self.assertRaises(ValueError):
            ErasurePattern([3], 3)

    def test_word_set_validation(self):
        with self.assertRaises(ValueError):
            WordSet([(0, 1), (0, 1)], 2)
        with self.assertRaises(ValueError):
            WordSet([(0, 2)], 2)
        with self.assertRaises(ValueError):
            WordSet([(0, 1), (0,)], 2)
        with self.assertRaises(ValueError):
            WordSet([], 2)
        word_set = WordSet([(1, 2), (1, 3)], 4)
        self.assertEqual((word_set.m, word_set.n, word_set.l), (2, 2, 4))
        self.assertIn(Word([1, 3]), word_set)
        self.assertNotIn(Word([3, 1]), word_set)
        self.assertEqual(word_set.index_of((1, 3)), 1)

    def test_retrieval_result_invariants(self):
        with self.assertRaises(ValueError):
            RetrievalResult(Word([0]), RetrievalResult.UNIQUE, 2, 0)
        with self.assertRaises(ValueError):
            RetrievalResult(Word([0]), RetrievalResult.NO_MATCH, 0, 0)
        with self.assertRaises(ValueError):
            RetrievalResult(None, RetrievalResult.NO_MATCH, 0, -1)
        self.assertEqual(RetrievalResult(None, RetrievalResult.NO_MATCH, 0, 3).format_line(), '- NoMatch 0 3')
        self.assertEqual(RetrievalResult(Word([1, 3]), RetrievalResult.UNIQUE, 1, 3).format_line(),
                         '1 3 Unique 1 3')


class SamplingTests(SimpleTestCase):

    def test_full_set(self):
        word_set = sample_word_set(2, 2, 4, seed=5)
        self.assertEqual(sorted(word_set.words), [(0, 0), (0, 1), (1, 0), (1, 1)])

    def test_too_many_words(self):
        with self.assertRaises(ValueError):
            sample_word_set(2, 2, 5, seed=0)

    def test_deterministic(self):
        self.assertEqual(sample_word_set(16, 4, 50, seed=3), sample_word_set(16, 4, 50, seed=3))
        self.assertNotEqual(sample_word_set(16, 4, 50, seed=3), sample_word_set(16, 4, 50, seed=4))

    def test_two_subsets_uniform(self):
        seeds = 60000
        counts = Counter(frozenset(sample_word_set(2, 2, 2, make_rng(7, i)).words) for i in range(seeds))
        self.assertEqual(len(counts), 6)
        for count in counts.values():
            self.assertAlmostEqual(count / seeds, 1 / 6, delta=0.01)

    def test_single_words_uniform(self):
        seeds = 40000
        counts = Counter(sample_word_set(2, 2, 1, make_rng(11, i)).word(0) for i in range(seeds))
        self.assertEqual(len(counts), 4)
        for count in counts.values():
            self.assertAlmostEqual(count / seeds, 1 / 4, delta=0.01)

    def test_large_universe_distinct(self):
        word_set = sample_word_set(256, 4, 2000, seed=1)
        self.assertEqual(word_set.m, 2000)
        self.assertEqual(len(np.unique(word_set.array, axis=0)), 2000)
        huge = sample_word_set(2, 70, 100, seed=1)
        self.assertEqual((huge.m, huge.n), (100, 70))

    def test_erase(self):
        word = Word([1, 2, 3, 4])
        query = erase(word, 2, seed=0)
        self.assertEqual(query.erased_count(), 2)
        self.assertTrue(masked_eq(query, word))
        self.assertEqual(erase(word, 0, seed=0), word)
        with self.assertRaises(ValueError):
            erase(word, 5, seed=0)

    def test_erase_patterns_uniform(self):
        trials = 30000
        rng = make_rng(2)
        counts = Counter(erase(Word([0, 0, 0, 0]), 2, rng).erasure_mask() for _ in range(trials))
        self.assertEqual(len(counts), 6)
        for count in counts.values():
            self.assertAlmostEqual(count / trials, 1 / 6, delta=0.015)

    def test_candidates(self):
        word_set = WordSet([(1, 2), (1, 3), (0, 3)], 4)
        self.assertEqual(candidates(word_set, (None, 3)), [(1, 3), (0, 3)])
        self.assertEqual(candidates(word_set, (2, None)), [])

    def test_negative_seed(self):
        with self.assertRaises(ValueError):
            make_rng(-1)


class WordFileTests(SimpleTestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def _write(self, name, text):
        path = os.path.join(self.directory.name, name)
        with open(path, 'w') as file:
            file.write(text)
        return path

    def test_round_trip(self):
        word_set = sample_word_set(5, 3, 10, seed=0)
        path = os.path.join(self.directory.name, 'words.txt')
        write_word_file(path, word_set.words, 3, 5)
        self.assertEqual(read_word_file(path), word_set)

    def test_queries(self):
        path = self._write('queries.txt', '2 4\n# comment\n\n? 3\n1 ?\n')
        n, l, queries = read_query_file(path)
        self.assertEqual((n, l), (2, 4))
        self.assertEqual(queries, [PartialWord([None, 3]), PartialWord([1, None])])

    def test_parse_errors_name_the_line(self):
        cases = [
            ('2 4\n1 2\n1 9\n', 'Line 3'),
            ('2 4\n1 2\n1 2 3\n', 'Line 3'),
            ('2 4\n1 ?\n', 'Line 2'),
            ('2 4\n1 x\n', 'Line 2'),
            ('two four\n', 'Line 1'),
        ]
        for text, expected in cases:
            with self.assertRaises(AssocmemError) as context:
                read_word_file(self._write('bad.txt', text))
            self.assertEqual(context.exception.error_code, AssocmemError.PARSE_ERROR)
            self.assertIn(expected, str(context.exception))

    def test_duplicate_words_rejected(self):
        with self.assertRaises(AssocmemError):
            read_word_file(self._write('dup.txt', '2 4\n1 2\n1 2\n'))
