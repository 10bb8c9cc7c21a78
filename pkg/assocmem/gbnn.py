import logging

import numpy as np

from . import analytics
from . import configs
from .core import Alphabet, ERASED, RetrievalResult, Word, make_rng
from .decorators import require_query_length

logger = logging.getLogger(__name__)

# Self pair modes
INCLUDED = 'Included'
EXCLUDED = 'Excluded'

SELF_PAIR_MODES = (INCLUDED, EXCLUDED)


class GBNNetwork:
    """
    Clustered clique network: n clusters of l neurons, neuron (i, j) meaning "position i holds letter j", binary
    symmetric connections W and memory coefficient gamma.

    W is held as an unpacked boolean matrix indexed by i * l + j; `packed_weights` gives the bit-packed form.
    """

    def __init__(self, weights, n, l, gamma=None, self_pairs=INCLUDED, m_stored=0):
        """
        :type weights: numpy.ndarray
        :param weights: Symmetric boolean (n*l) x (n*l) matrix
        :type n: int
        :param n: Number of clusters
        :type l: int
        :param l: Letters per cluster
        :type gamma: int
        :param gamma: Memory coefficient, n * l when None
        :type self_pairs: str
        :param self_pairs: `INCLUDED` or `EXCLUDED`
        :type m_stored: int
        :param m_stored: Number of words stored
        """
        if weights is None:
            raise ValueError('weights is None')
        if self_pairs not in SELF_PAIR_MODES:
            raise ValueError('Unrecognised self pair mode {}'.format(self_pairs))
        Alphabet(l)
        weights = np.asarray(weights, dtype=bool)
        if weights.shape != (n * l, n * l):
            raise ValueError('Weight matrix shape {} does not match {} clusters of {} letters'.format(
                weights.shape, n, l))
        if not np.array_equal(weights, weights.T):
            raise ValueError('Weight matrix is not symmetric')
        weights.setflags(write=False)
        self.weights = weights
        self.n = n
        self.l = l
        self.gamma = n * l if gamma is None else gamma
        self.self_pairs = self_pairs
        self.m_stored = m_stored
        self.store_op_count = m_stored * n * n

    def packed_weights(self):
        """
        :rtype: numpy.ndarray
        :return: W bit-packed row-major, (n*l)^2 bits
        """
        return np.packbits(self.weights, axis=None)

    def memory_bits(self, dense=False):
        """
        :type dense: bool
        :param dense: Count the whole (n*l)^2 matrix instead of cross-cluster connections only
        :rtype: int
        :return: Bits of W
        """
        if dense:
            return (self.n * self.l) ** 2
        return analytics.gbnn_memory_bits(self.l, self.n)

    def initial_state(self, q):
        """
        :type q: PartialWord
        :param q: Query
        :rtype: numpy.ndarray
        :return: v_0, one active neuron per unerased cluster, erased clusters all zero
        """
        state = np.zeros(self.n * self.l, dtype=np.int64)
        for i, symbol in enumerate(q):
            if symbol == ERASED:
                continue
            if not 0 <= symbol < self.l:
                raise ValueError('Symbol {} out of range [0, {})'.format(symbol, self.l))
            state[i * self.l + symbol] = 1
        return state

    def update(self, state, gamma=None):
        """
        One application of v_{t+1} = s(W v_t + gamma v_t): in each cluster, the neurons reaching the cluster
        maximum become active.

        :type state: numpy.ndarray
        :param state: Binary activation vector
        :type gamma: int
        :param gamma: Memory coefficient, the network's when None
        :rtype: numpy.ndarray
        :return: Next activation vector
        """
        gamma = self.gamma if gamma is None else gamma
        # v is binary, so W v is the sum of the active columns
        scores = self.weights[:, state.astype(bool)].sum(axis=1, dtype=np.int64) + gamma * state
        scores = scores.reshape(self.n, self.l)
        return (scores == scores.max(axis=1, keepdims=True)).astype(np.int64).reshape(-1)

    @require_query_length
    def retrieve(self, q, iterations=None, seed=None, gamma=None, stored=None):
        """
        Iterate the winner-take-all update then decode one letter per cluster, drawing uniformly among active
        neurons when a cluster keeps several.

        :type q: PartialWord
        :param q: Query
        :type iterations: int
        :param iterations: Maximum number of updates, `GBNN_ITERATIONS` when None; stops early at a fixed point
        :type seed: int or numpy.random.Generator
        :param seed: Seed or generator for ambiguity resolution
        :type gamma: int
        :param gamma: Memory coefficient override, at least n * l
        :type stored: WordSet or None
        :param stored: Stored set used to flag outputs outside S
        :rtype: RetrievalResult
        :return: Decoded word; op_count counts dense score accumulations, (n*l)^2 per update
        """
        iterations = configs.GBNN_ITERATIONS if iterations is None else iterations
        gamma = self.gamma if gamma is None else gamma
        if iterations < 1:
            raise ValueError('iterations {} is below 1'.format(iterations))
        if gamma < self.n * self.l:
            raise ValueError('gamma {} is below n * l = {}'.format(gamma, self.n * self.l))

        state = self.initial_state(q)
        performed = 0
        converged = False
        while performed < iterations:
            next_state = self.update(state, gamma)
            performed += 1
            if np.array_equal(next_state, state):
                converged = True
                break
            state = next_state

        rng = make_rng(seed)
        active = state.reshape(self.n, self.l)
        letters = []
        candidate_count = 1
        for cluster in active:
            winners = np.flatnonzero(cluster)
            candidate_count *= len(winners)
            letters.append(int(winners[0] if len(winners) == 1 else winners[rng.integers(len(winners))]))
        word = Word(letters)

        if stored is not None and word not in stored:
            status = RetrievalResult.MISMATCH
        elif candidate_count == 1:
            status = RetrievalResult.UNIQUE
        else:
            status = RetrievalResult.AMBIGUOUS
        return RetrievalResult(word, status, candidate_count, performed * (self.n * self.l) ** 2,
                               converged=converged, iterations=performed)


def store(word_set, self_pairs=INCLUDED, gamma=None):
    """
    W_{(i1,j1)(i2,j2)} = 1 iff some stored word has w(i1) = j1 and w(i2) = j2.

    :type word_set: WordSet
    :param word_set: Words to store
    :type self_pairs: str
    :param self_pairs: `INCLUDED` also sets W_{(i,j)(i,j)} for used letters, `EXCLUDED` keeps distinct clusters only
    :type gamma: int
    :param gamma: Memory coefficient, n * l when None
    :rtype: GBNNetwork
    :return: Network
    """
    if self_pairs not in SELF_PAIR_MODES:
        raise ValueError('Unrecognised self pair mode {}'.format(self_pairs))
    n, l = word_set.n, word_set.l
    neurons = word_set.array + np.arange(n, dtype=np.int64) * l
    weights = np.zeros((n * l, n * l), dtype=bool)
    for i1 in range(n):
        for i2 in range(i1 if self_pairs == INCLUDED else i1 + 1, n):
            weights[neurons[:, i1], neurons[:, i2]] = True
            weights[neurons[:, i2], neurons[:, i1]] = True
    logger.debug('Stored {} words in {} clusters of {} letters'.format(word_set.m, n, l))
    return GBNNetwork(weights, n, l, gamma, self_pairs, word_set.m)
