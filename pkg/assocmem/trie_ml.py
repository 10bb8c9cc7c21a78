import logging
import threading

import numpy as np

from . import configs
from .core import AssocmemError, ERASED, RetrievalResult, Word, make_rng
from .decorators import require_query_length

logger = logging.getLogger(__name__)

# Build modes
EAGER = 'Eager'
LAZY = 'Lazy'

MODES = (EAGER, LAZY)

# Path policies below the first erased symbol
LEAF_WEIGHTED = 'LeafWeighted'
FIRST_CHILD = 'FirstChild'

PATH_POLICIES = (LEAF_WEIGHTED, FIRST_CHILD)


def permutation_for_mask(mask, n):
    """
    :type mask: int
    :param mask: Erasure bitmask, bit i set when position i is erased
    :type n: int
    :param n: Word length
    :rtype: list[int]
    :return: Unerased positions in increasing order followed by erased positions in increasing order
    """
    known = [i for i in range(n) if not mask >> i & 1]
    erased = [i for i in range(n) if mask >> i & 1]
    return known + erased


def permutation_for(q):
    """
    Stable partition of the positions of q: unerased positions first, then erased ones, each block in increasing
    order. Under this permutation the unerased symbols of q form a trie prefix.

    :type q: PartialWord
    :param q: Query
    :rtype: list[int]
    :return: Permutation sigma, sigma[d] being the word position read at trie depth d
    """
    return [i for i, symbol in enumerate(q) if symbol != ERASED] + [i for i, symbol in enumerate(q) if symbol == ERASED]


class PermutationTrie:
    """
    Trie of the stored words read in the order of a permutation sigma, with per-node leaf counts.

    Nodes live in an arena: node k has `children[k]` (symbol -> node index, ascending symbol order) and
    `leaf_counts[k]`. Node 0 is the root.
    """

    def __init__(self, permutation, word_set):
        """
        :type permutation: list[int]
        :param permutation: Position read at each depth
        :type word_set: WordSet
        :param word_set: Words to insert
        """
        if sorted(permutation) != list(range(word_set.n)):
            raise ValueError('{} is not a permutation of [0, {})'.format(permutation, word_set.n))
        self.permutation = list(permutation)
        self.depth = word_set.n
        self.children = [{}]
        self.leaf_counts = [0]
        self.insert_op_count = 0

        permuted = word_set.array[:, self.permutation]
        # Insert in lexicographic order so that every child map is filled in ascending symbol order
        order = np.lexsort(permuted.T[::-1])
        for row in permuted[order].tolist():
            self._insert(row)

    def _insert(self, symbols):
        node = 0
        self.leaf_counts[0] += 1
        for symbol in symbols:
            child = self.children[node].get(symbol)
            if child is None:
                child = len(self.children)
                self.children.append({})
                self.leaf_counts.append(0)
                self.children[node][symbol] = child
            self.leaf_counts[child] += 1
            node = child
        self.insert_op_count += len(symbols) + 1

    @property
    def node_count(self):
        return len(self.children)

    @property
    def root_leaf_count(self):
        return self.leaf_counts[0]


class TrieMemory:
    """
    Trie-based maximum likelihood memory: one permutation trie per erasure pattern, so that retrieval reads each
    query symbol once.

    Eager memories build all 2^n tries up front and are read-only afterwards. Lazy memories build the trie of a
    pattern on its first query and publish it once under a lock.
    """

    _logger = logging.getLogger('{}.{}'.format(__name__, __qualname__))

    def __init__(self, word_set, mode=LAZY, max_eager_n=None):
        """
        :type word_set: WordSet
        :param word_set: Stored words
        :type mode: str
        :param mode: `EAGER` or `LAZY`
        :type max_eager_n: int
        :param max_eager_n: Largest n accepted by eager builds, `EAGER_TRIE_MAX_N` when None
        """
        if word_set is None:
            raise ValueError('word_set is None')
        if mode not in MODES:
            raise ValueError('Unrecognised trie mode {}'.format(mode))
        max_eager_n = configs.EAGER_TRIE_MAX_N if max_eager_n is None else max_eager_n

        self.word_set = word_set
        self.mode = mode
        self.tries = {}
        self._build_lock = threading.Lock()

        if mode == EAGER:
            if word_set.n > max_eager_n:
                raise AssocmemError(
                    'Eager build of 2^{} tries exceeds the cap n <= {}'.format(word_set.n, max_eager_n),
                    AssocmemError.RESOURCE_LIMIT, 'TrieMemory.build')
            for mask in range(2 ** word_set.n):
                self.tries[mask] = PermutationTrie(permutation_for_mask(mask, word_set.n), word_set)
            self._logger.info('Built {} tries with {} nodes for {}'.format(
                len(self.tries), self.node_count(), word_set))

    @property
    def n(self):
        return self.word_set.n

    @property
    def l(self):
        return self.word_set.l

    @property
    def m(self):
        return self.word_set.m

    def trie_for_mask(self, mask):
        """
        :type mask: int
        :param mask: Erasure bitmask
        :rtype: PermutationTrie
        :return: Trie whose permutation puts the pattern's unerased positions first
        """
        trie = self.tries.get(mask)
        if trie is None:
            with self._build_lock:
                trie = self.tries.get(mask)
                if trie is None:
                    trie = PermutationTrie(permutation_for_mask(mask, self.n), self.word_set)
                    self.tries[mask] = trie
                    self._logger.debug('Built trie for erasure mask {:b}'.format(mask))
        return trie

    def node_count(self):
        return sum(trie.node_count for trie in list(self.tries.values()))

    def store_op_count(self):
        """
        :rtype: int
        :return: Node visits spent inserting words into the tries built so far
        """
        return sum(trie.insert_op_count for trie in list(self.tries.values()))

    def stats(self):
        """
        Build statistics. Each node is charged one symbol label and one leaf counter.

        :rtype: dict
        :return: trie_count, node_count, estimated_bits, store_op_count
        """
        node_count = self.node_count()
        bits_per_node = self.word_set.alphabet.bits_per_symbol + self.m.bit_length()
        return {
            'trie_count': len(self.tries),
            'node_count': node_count,
            'estimated_bits': node_count * bits_per_node,
            'store_op_count': self.store_op_count(),
        }

    @require_query_length
    def retrieve(self, q, path_policy=LEAF_WEIGHTED, seed=None):
        """
        Follow the query's unerased symbols down the pattern's trie, then pick a path to a leaf.

        `LEAF_WEIGHTED` draws a leaf uniformly below the node reached (each child taken with probability
        proportional to its leaf count), so the returned word is uniform over the candidates. `FIRST_CHILD` follows
        the smallest symbol.

        op_count counts nodes only. Below the known prefix each level also scans the child map, up to l entries, to
        place the drawn rank.

        :type q: PartialWord
        :param q: Query
        :type path_policy: str
        :param path_policy: `LEAF_WEIGHTED` or `FIRST_CHILD`
        :type seed: int or numpy.random.Generator
        :param seed: Seed or generator for `LEAF_WEIGHTED`
        :rtype: RetrievalResult
        :return: Retrieved word; op_count counts the trie nodes visited, root included
        """
        if path_policy not in PATH_POLICIES:
            raise ValueError('Unrecognised path policy {}'.format(path_policy))

        trie = self.trie_for_mask(q.erasure_mask())
        permutation = trie.permutation
        known_count = self.n - q.erased_count()

        node = 0
        visited = 1
        for depth in range(known_count):
            node = trie.children[node].get(q[permutation[depth]])
            if node is None:
                return RetrievalResult(None, RetrievalResult.NO_MATCH, 0, visited)
            visited += 1

        count = trie.leaf_counts[node]
        symbols = [q[position] for position in permutation[:known_count]]
        # Rank of the chosen leaf among the leaves below node
        rank = make_rng(seed).integers(count) if path_policy == LEAF_WEIGHTED and count > 1 else 0
        for depth in range(known_count, self.n):
            for symbol, child in trie.children[node].items():
                if rank < trie.leaf_counts[child]:
                    break
                rank -= trie.leaf_counts[child]
            symbols.append(symbol)
            node = child
            visited += 1

        word = [0] * self.n
        for depth, position in enumerate(permutation):
            word[position] = symbols[depth]
        status = RetrievalResult.UNIQUE if count == 1 else RetrievalResult.AMBIGUOUS
        return RetrievalResult(Word(word), status, count, visited)


def build(word_set, mode=LAZY, max_eager_n=None):
    """
    :type word_set: WordSet
    :param word_set: Words to store
    :type mode: str
    :param mode: `EAGER` or `LAZY`
    :type max_eager_n: int
    :param max_eager_n: Largest n accepted by eager builds
    :rtype: TrieMemory
    :return: Trie memory
    """
    return TrieMemory(word_set, mode, max_eager_n)
