import logging

import numpy as np

from . import analytics
from . import configs
from .core import Alphabet, ERASED, RetrievalResult, Word, PartialWord
from .decorators import require_query_length

logger = logging.getLogger(__name__)

# Diagonal modes
SUMMED = 'Summed'
ZEROED = 'Zeroed'

DIAGONAL_MODES = (SUMMED, ZEROED)


def _bit_shifts(l):
    bits = max(Alphabet(l).bits_per_symbol, 1)
    return np.arange(bits - 1, -1, -1, dtype=np.int64)


def encode_array(array, l):
    """
    Bipolar encoding of an array of words or partial words: each symbol becomes its ceil(log2 l)-bit big-endian
    expansion with bit 0 -> -1 and bit 1 -> +1; erased symbols become all-zero groups.

    :type array: numpy.ndarray
    :param array: k x n symbols, `ERASED` allowed
    :type l: int
    :param l: Alphabet size
    :rtype: numpy.ndarray
    :return: k x (n * ceil(log2 l)) array over {-1, 0, +1}
    """
    array = np.asarray(array, dtype=np.int64)
    shifts = _bit_shifts(l)
    bits = (np.maximum(array, 0)[..., None] >> shifts) & 1
    bipolar = 2 * bits - 1
    bipolar[array == ERASED] = 0
    return bipolar.reshape(array.shape[:-1] + (array.shape[-1] * len(shifts),))


def encode_bipolar(w, l):
    """
    :type w: PartialWord
    :param w: Word or partial word
    :type l: int
    :param l: Alphabet size
    :rtype: numpy.ndarray
    :return: Bipolar vector of length n * ceil(log2 l), zero on erased symbols
    """
    return encode_array(np.asarray(PartialWord(w), dtype=np.int64), l)


def decode_bipolar(v, l):
    """
    Inverse of `encode_bipolar` on complete states.

    :type v: numpy.ndarray
    :param v: Bipolar vector
    :type l: int
    :param l: Alphabet size
    :rtype: Word or None
    :return: Decoded word, None when a bit group is zero or decodes to a symbol >= l
    """
    bits = len(_bit_shifts(l))
    v = np.asarray(v, dtype=np.int64)
    if v.size % bits or np.any(v == 0):
        return None
    groups = ((v.reshape(-1, bits) + 1) // 2) << _bit_shifts(l)
    symbols = groups.sum(axis=1)
    if np.any(symbols >= l):
        return None
    return Word(symbols.tolist())


def sign(values):
    """
    Componentwise sign with sign(0) = +1.
    """
    return np.where(values >= 0, 1, -1).astype(np.int64)


class HopfieldNetwork:
    """
    Hopfield network over n' = n * ceil(log2 l) bipolar neurons with integer correlation weights.
    """

    def __init__(self, weights, m_stored, diagonal_mode=SUMMED, l=2):
        """
        :type weights: numpy.ndarray
        :param weights: Symmetric integer n' x n' weight matrix
        :type m_stored: int
        :param m_stored: Number of stored words
        :type diagonal_mode: str
        :param diagonal_mode: `SUMMED` or `ZEROED`
        :type l: int
        :param l: Alphabet size of the encoded words
        """
        if weights is None:
            raise ValueError('weights is None')
        if diagonal_mode not in DIAGONAL_MODES:
            raise ValueError('Unrecognised diagonal mode {}'.format(diagonal_mode))
        weights = np.asarray(weights, dtype=np.int64)
        if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
            raise ValueError('Weight matrix is not square')
        if not np.array_equal(weights, weights.T):
            raise ValueError('Weight matrix is not symmetric')
        weights.setflags(write=False)
        self.weights = weights
        self.m_stored = m_stored
        self.diagonal_mode = diagonal_mode
        self.alphabet = Alphabet(l)
        self.store_op_count = m_stored * weights.shape[0] ** 2

    @property
    def neuron_count(self):
        return self.weights.shape[0]

    @property
    def n(self):
        """
        :rtype: int
        :return: Number of alphabet symbols encoded by the neurons
        """
        return self.neuron_count // max(self.alphabet.bits_per_symbol, 1)

    def memory_bits(self):
        """
        :rtype: int
        :return: Upper-triangular weight bits, plus the diagonal when it is kept
        """
        bits = analytics.hnn_weight_bits(self.neuron_count, self.m_stored)
        if self.diagonal_mode == SUMMED:
            bits += self.neuron_count * self.m_stored.bit_length()
        return bits

    def iterate(self, q, max_iters=None, clamp_known=False):
        """
        Synchronous updates v_{t+1} = sign(M v_t) from v_0 = q, until a fixed point or `max_iters` updates.

        The state stops at the first v_t with sign(M v_t) = v_t. op_count is iterations * n'^2: the product that finds
        the fixed point applies no update and is not counted.

        :type q: numpy.ndarray
        :param q: Bipolar query over {-1, 0, +1}, 0 marking erased entries
        :type max_iters: int
        :param max_iters: Maximum number of updates, `HOPFIELD_MAX_ITERS` when None
        :type clamp_known: bool
        :param clamp_known: Reset unerased entries to their query values after each update
        :rtype: numpy.ndarray, bool, int, int
        :return: Final state, converged, iterations, op_count (multiply-accumulates)
        """
        max_iters = configs.HOPFIELD_MAX_ITERS if max_iters is None else max_iters
        if max_iters < 1:
            raise ValueError('max_iters {} is below 1'.format(max_iters))
        q = np.asarray(q, dtype=np.int64)
        if q.shape != (self.neuron_count,):
            raise ValueError('Query has {} entries, network has {} neurons'.format(q.size, self.neuron_count))
        known = q != 0

        state = q.copy()
        iterations = 0
        while True:
            next_state = sign(self.weights @ state)
            if clamp_known:
                next_state[known] = q[known]
            if np.array_equal(next_state, state):
                converged = True
                break
            if iterations == max_iters:
                converged = False
                break
            state = next_state
            iterations += 1

        return state, converged, iterations, iterations * self.neuron_count ** 2

    @require_query_length
    def retrieve_word(self, q, max_iters=None, clamp_known=False, stored=None):
        """
        Encode a partial word, iterate and decode the final state.

        :type q: PartialWord
        :param q: Query
        :type max_iters: int
        :param max_iters: Maximum number of updates
        :type clamp_known: bool
        :param clamp_known: Clamp unerased entries
        :type stored: WordSet or None
        :param stored: Stored set used to flag outputs outside S
        :rtype: RetrievalResult
        :return: Unique when the state decodes (to a stored word, if `stored` is given), Mismatch otherwise
        """
        state, converged, iterations, op_count = self.iterate(
            encode_bipolar(q, self.alphabet.size), max_iters, clamp_known)
        if not converged:
            logger.debug('No fixed point after {} iterations'.format(iterations))

        word = decode_bipolar(state, self.alphabet.size)
        if word is None or (stored is not None and word not in stored):
            status = RetrievalResult.MISMATCH
            candidate_count = None
        else:
            status = RetrievalResult.UNIQUE
            candidate_count = 1
        return RetrievalResult(word, status, candidate_count, op_count, converged=converged, iterations=iterations)


def trajectory_period(net, q, max_iters=None, clamp_known=False):
    """
    Detect the limit behaviour of synchronous updates from q.

    :type net: HopfieldNetwork
    :param net: Network
    :type q: numpy.ndarray
    :param q: Bipolar query
    :type max_iters: int
    :param max_iters: Number of updates observed
    :type clamp_known: bool
    :param clamp_known: Clamp unerased entries
    :rtype: int or None
    :return: 1 for a fixed point, 2 for a two-cycle, None when neither appears within max_iters updates
    """
    max_iters = configs.HOPFIELD_MAX_ITERS if max_iters is None else max_iters
    q = np.asarray(q, dtype=np.int64)
    known = q != 0
    previous, state = None, q.copy()
    for _ in range(max_iters + 1):
        next_state = sign(net.weights @ state)
        if clamp_known:
            next_state[known] = q[known]
        if np.array_equal(next_state, state):
            return 1
        if previous is not None and np.array_equal(next_state, previous):
            logger.warning('Synchronous updates entered a two-cycle')
            return 2
        previous, state = state, next_state
    return None


def store_bipolar(vectors, diagonal_mode=SUMMED, l=2):
    """
    Correlation storage of already bipolar words: M = sum of outer products.

    :type vectors: numpy.ndarray
    :param vectors: m x n' array over {-1, +1}
    :type diagonal_mode: str
    :param diagonal_mode: `SUMMED` keeps M_ii = m, `ZEROED` nulls the diagonal
    :type l: int
    :param l: Alphabet size the vectors encode
    :rtype: HopfieldNetwork
    :return: Network
    """
    vectors = np.asarray(vectors, dtype=np.int64)
    if vectors.ndim != 2:
        raise ValueError('Expected an m x n\' array')
    if not np.all(np.abs(vectors) == 1):
        raise ValueError('Stored vectors must be over {-1, +1}')
    weights = vectors.T @ vectors
    if diagonal_mode == ZEROED:
        np.fill_diagonal(weights, 0)
    return HopfieldNetwork(weights, vectors.shape[0], diagonal_mode, l)


def store(word_set, diagonal_mode=SUMMED):
    """
    :type word_set: WordSet
    :param word_set: Words to store
    :type diagonal_mode: str
    :param diagonal_mode: `SUMMED` or `ZEROED`
    :rtype: HopfieldNetwork
    :return: Network holding the bipolar encodings of word_set
    """
    return store_bipolar(encode_array(word_set.array, word_set.l), diagonal_mode, word_set.l)
