import itertools
import logging
import math
from fractions import Fraction

import numpy as np

from . import configs
from .core import AssocmemError, ERASED, RetrievalResult, WordSet, erase, index_to_words, make_rng, match_mask
from .decorators import require_query_length

logger = logging.getLogger(__name__)

# Tie policies
UNIFORM_RANDOM = 'UniformRandom'
FIRST_STORED = 'FirstStored'
MAX_WEIGHT = 'MaxWeight'

TIE_POLICIES = (UNIFORM_RANDOM, FIRST_STORED, MAX_WEIGHT)

# Cross-check the exact oracle by direct candidate counting below this many word comparisons
_CROSS_CHECK_LIMIT = 10 ** 6


class BruteForceMemory:
    """
    Maximum likelihood associative memory storing S verbatim and scanning it on every query.
    """

    def __init__(self, word_set, weights=None):
        """
        :type word_set: WordSet
        :param word_set: Stored words
        :type weights: list[float] or None
        :param weights: Per-word probability measure, uniform when None
        """
        if word_set is None:
            raise ValueError('word_set is None')
        if weights is not None:
            weights = np.asarray(weights, dtype=float)
            if weights.shape != (word_set.m,):
                raise ValueError('Weight vector length {} does not match m={}'.format(weights.size, word_set.m))
            if np.any(weights < 0):
                raise ValueError('Negative weight')
            if abs(float(weights.sum()) - 1.0) > 1e-12:
                raise ValueError('Weights sum to {}, not 1'.format(weights.sum()))
            weights.setflags(write=False)
        self.store = word_set
        self.weights = weights

    @property
    def n(self):
        return self.store.n

    @property
    def m(self):
        return self.store.m

    def storage_bits(self):
        """
        :rtype: int
        :return: Bits used by the verbatim copy, m * n * ceil(log2 l)
        """
        return self.store.m * self.store.n * self.store.alphabet.bits_per_symbol

    @require_query_length
    def retrieve(self, q, tie_policy=UNIFORM_RANDOM, seed=None):
        """
        Scan every stored word and return a candidate matching q up to erasures.

        :type q: PartialWord
        :param q: Query
        :type tie_policy: str
        :param tie_policy: `UNIFORM_RANDOM`, `FIRST_STORED` or `MAX_WEIGHT`
        :type seed: int or numpy.random.Generator
        :param seed: Seed or generator for `UNIFORM_RANDOM`
        :rtype: RetrievalResult
        :return: Retrieved word; op_count counts the m * n symbol comparisons of the scan
        """
        if tie_policy not in TIE_POLICIES:
            raise ValueError('Unrecognised tie policy {}'.format(tie_policy))

        op_count = self.store.m * self.store.n
        indexes = np.flatnonzero(match_mask(self.store, q))
        count = len(indexes)
        if count == 0:
            return RetrievalResult(None, RetrievalResult.NO_MATCH, 0, op_count)

        if count == 1 or tie_policy == FIRST_STORED:
            chosen = indexes[0]
        elif tie_policy == UNIFORM_RANDOM:
            chosen = indexes[make_rng(seed).integers(count)]
        else:
            weights = self.weights if self.weights is not None else np.full(self.store.m, 1.0 / self.store.m)
            # argmax keeps the first maximum, i.e. stored order on ties
            chosen = indexes[int(np.argmax(weights[indexes]))]

        status = RetrievalResult.UNIQUE if count == 1 else RetrievalResult.AMBIGUOUS
        return RetrievalResult(self.store.word(chosen), status, count, op_count)


def store(word_set, weights=None):
    """
    :type word_set: WordSet
    :param word_set: Words to store
    :type weights: list[float] or None
    :param weights: Per-word measure, nonnegative and summing to 1
    :rtype: BruteForceMemory
    :return: Memory holding word_set
    """
    return BruteForceMemory(word_set, weights)


def _erased_copies(word_set, r):
    """
    Yield (pattern, erased array) for each of the C(n, r) erasure patterns.
    """
    for positions in itertools.combinations(range(word_set.n), r):
        erased = word_set.array.copy()
        erased[:, list(positions)] = ERASED
        yield positions, erased


def exact_success_probability(word_set, r, budget=None):
    """
    Exact success probability of the ML rule on one set: P_S(f*) = |S_r| / (m * C(n, r)), where S_r is the set of
    distinct r-erasure partial words consistent with some stored word.

    :type word_set: WordSet
    :param word_set: Stored words
    :type r: int
    :param r: Number of erasures
    :type budget: int
    :param budget: Maximum (word, pattern) pairs enumerated, `ENUMERATION_BUDGET` when None
    :rtype: fractions.Fraction
    :return: Exact success probability
    """
    n, m = word_set.n, word_set.m
    if r < 0 or r > n:
        raise ValueError('Cannot erase r={} positions of length {} words'.format(r, n))
    budget = configs.ENUMERATION_BUDGET if budget is None else budget
    patterns = math.comb(n, r)
    pairs = m * patterns
    if pairs > budget:
        raise AssocmemError('Enumerating {} (word, pattern) pairs exceeds budget {}'.format(pairs, budget),
                            AssocmemError.RESOURCE_LIMIT, 'exact_success_probability')

    distinct = 0
    reciprocal_sum = Fraction(0)
    cross_check = pairs * m <= _CROSS_CHECK_LIMIT
    for positions, erased in _erased_copies(word_set, r):
        distinct += len(np.unique(erased, axis=0))
        if cross_check:
            known = np.ones(n, dtype=bool)
            known[list(positions)] = False
            # |S(w_bar)| for each stored word under this pattern
            counts = np.all(erased[:, None, known] == word_set.array[None, :, known], axis=2).sum(axis=1)
            reciprocal_sum += sum(Fraction(1, int(count)) for count in counts)

    probability = Fraction(distinct, pairs)
    if cross_check and reciprocal_sum / pairs != probability:
        raise RuntimeError('Oracle disagreement for {}: |S_r| gives {}, candidate counts give {}'.format(
            word_set, probability, reciprocal_sum / pairs))
    return probability


def all_sets_mean_success(l, n, m, r, max_sets=10 ** 5):
    """
    Mean of `exact_success_probability` over every m-subset of the l^n words, the exhaustive counterpart of the
    expected success probability over uniformly drawn sets.

    :type l: int
    :param l: Alphabet size
    :type n: int
    :param n: Word length
    :type m: int
    :param m: Set size
    :type r: int
    :param r: Number of erasures
    :type max_sets: int
    :param max_sets: Maximum number of sets enumerated
    :rtype: fractions.Fraction
    :return: Exact mean success probability
    """
    universe = l ** n
    if m < 1 or m > universe:
        raise ValueError('Cannot draw m={} distinct words out of {}'.format(m, universe))
    set_count = math.comb(universe, m)
    if set_count > max_sets:
        raise AssocmemError('Enumerating {} sets exceeds budget {}'.format(set_count, max_sets),
                            AssocmemError.RESOURCE_LIMIT, 'all_sets_mean_success')

    words = index_to_words(np.arange(universe), l, n)
    total = Fraction(0)
    for subset in itertools.combinations(range(universe), m):
        total += exact_success_probability(WordSet._trusted(words[list(subset)], l), r)
    logger.debug('Averaged exact success over {} sets for l={} n={} m={} r={}'.format(set_count, l, n, m, r))
    return total / set_count


def success_frequency(memory, r, trials, seed=None, tie_policy=UNIFORM_RANDOM):
    """
    Empirical success frequency of `memory.retrieve` on one fixed set: each trial draws a stored word uniformly,
    erases r positions and checks that the stored word is returned.

    :type memory: BruteForceMemory
    :param memory: Memory to probe
    :type r: int
    :param r: Number of erasures
    :type trials: int
    :param trials: Number of trials
    :type seed: int
    :param seed: Base seed
    :type tie_policy: str
    :param tie_policy: Tie policy passed to retrieve
    :rtype: float
    :return: Success frequency
    """
    rng = make_rng(seed)
    successes = 0
    for _ in range(trials):
        word = memory.store.word(rng.integers(memory.m))
        result = memory.retrieve(erase(word, r, rng), tie_policy=tie_policy, seed=rng)
        successes += result.word == word
    return successes / trials
