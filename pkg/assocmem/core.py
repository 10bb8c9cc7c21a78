import logging

import numpy as np

from . import configs

logger = logging.getLogger(__name__)

# Internal erasure sentinel, outside every alphabet [0, l)
ERASED = -1

# Erasure mark in word and query files
ERASE_MARK = '?'


class AssocmemError(Exception):
    """
    Error raised by assocmem operations that fail for reasons other than a bad argument.
    """

    # Error codes
    RESOURCE_LIMIT = 1
    PARSE_ERROR = 2

    def __init__(self, message, error_code, source='Unknown'):
        """
        :type message: str
        :param message: Error message
        :type error_code: int
        :param error_code: Error code
        :type source: str
        :param source: Function that error is raised from
        """

        super(AssocmemError, self).__init__(message)
        self.error_code = error_code
        self.source = source


def make_rng(seed=None, *stream):
    """
    Build a numpy `Generator` for a seed and an optional stream path.

    Stream derivation rule: the generator for stream (i, j, ...) of base seed s is seeded with
    `SeedSequence(entropy=[s, i, j, ...])`, which hashes the whole entropy list. Identical (seed, stream) pairs
    always give identical generators, whatever process builds them.

    An existing `Generator` is returned unchanged when no stream is requested.

    :type seed: int or numpy.random.Generator or None
    :param seed: Base seed. None means seed 0, never wall-clock entropy.
    :type stream: int
    :param stream: Stream indexes
    :rtype: numpy.random.Generator
    :return: Seeded generator
    """
    if isinstance(seed, np.random.Generator):
        if stream:
            raise ValueError('Cannot derive a stream from an existing generator')
        return seed
    if seed is None:
        seed = 0
    if seed < 0:
        raise ValueError('Negative seed {}'.format(seed))
    return np.random.default_rng(np.random.SeedSequence(entropy=[int(seed)] + [int(i) for i in stream]))


class Alphabet:
    """
    Alphabet of `size` integer symbols 0..size-1.
    """

    def __init__(self, size):
        """
        :type size: int
        :param size: Number of symbols, at least 2
        """
        if size is None:
            raise ValueError('size is None')
        if size < 2:
            raise ValueError('Alphabet size {} is below 2'.format(size))
        self.size = int(size)

    @property
    def bits_per_symbol(self):
        """
        :rtype: int
        :return: ceil(log2(size)), the width of one symbol in a binary expansion
        """
        return (self.size - 1).bit_length()

    def contains(self, symbol):
        return 0 <= symbol < self.size

    def __eq__(self, other):
        return isinstance(other, Alphabet) and other.size == self.size

    def __hash__(self):
        return hash(self.size)

    def __repr__(self):
        return 'Alphabet({})'.format(self.size)


class PartialWord(tuple):
    """
    Word of fixed length whose entries are alphabet symbols or the erasure sentinel `ERASED`.

    Accepts `None` or '?' as erasure marks on construction.
    """

    def __new__(cls, symbols):
        values = []
        for symbol in symbols:
            if symbol is None or (isinstance(symbol, str) and symbol == ERASE_MARK):
                values.append(ERASED)
                continue
            value = int(symbol)
            if value < ERASED:
                raise ValueError('Invalid symbol {}'.format(symbol))
            values.append(value)
        return super(PartialWord, cls).__new__(cls, values)

    def erased_count(self):
        return sum(1 for symbol in self if symbol == ERASED)

    def erased_positions(self):
        """
        :rtype: list[int]
        :return: Erased positions in increasing order
        """
        return [i for i, symbol in enumerate(self) if symbol == ERASED]

    def known_positions(self):
        """
        :rtype: list[int]
        :return: Unerased positions in increasing order
        """
        return [i for i, symbol in enumerate(self) if symbol != ERASED]

    def erasure_mask(self):
        """
        :rtype: int
        :return: Bitmask with bit i set when position i is erased
        """
        mask = 0
        for i in self.erased_positions():
            mask |= 1 << i
        return mask

    def is_complete(self):
        return ERASED not in self

    def __str__(self):
        return ' '.join(ERASE_MARK if symbol == ERASED else str(symbol) for symbol in self)

    def __repr__(self):
        return '{}({})'.format(type(self).__name__, str(self))


class Word(PartialWord):
    """
    Word of fixed length without erasures.
    """

    def __new__(cls, symbols):
        word = super(Word, cls).__new__(cls, symbols)
        if ERASED in word:
            raise ValueError('Word {} contains an erasure'.format(tuple(word)))
        return word


class ErasurePattern:
    """
    Set of r distinct erased positions in [0, n).
    """

    def __init__(self, positions, n):
        """
        :type positions: iterable[int]
        :param positions: Erased positions
        :type n: int
        :param n: Word length
        """
        if positions is None:
            raise ValueError('positions is None')
        positions = sorted(int(i) for i in positions)
        if len(set(positions)) != len(positions):
            raise ValueError('Duplicate erased positions {}'.format(positions))
        if positions and (positions[0] < 0 or positions[-1] >= n):
            raise ValueError('Erased positions {} out of range for length {}'.format(positions, n))
        self.positions = tuple(positions)
        self.n = n

    @property
    def r(self):
        return len(self.positions)

    @property
    def mask(self):
        mask = 0
        for i in self.positions:
            mask |= 1 << i
        return mask

    def apply(self, word):
        """
        :type word: PartialWord
        :param word: Word to erase
        :rtype: PartialWord
        :return: Copy of word with every pattern position erased
        """
        if len(word) != self.n:
            raise ValueError('Word length {} does not match pattern length {}'.format(len(word), self.n))
        erased = set(self.positions)
        return PartialWord(ERASED if i in erased else symbol for i, symbol in enumerate(word))

    def __eq__(self, other):
        return isinstance(other, ErasurePattern) and other.positions == self.positions and other.n == self.n

    def __hash__(self):
        return hash((self.positions, self.n))

    def __repr__(self):
        return 'ErasurePattern({}, n={})'.format(list(self.positions), self.n)


class WordSet:
    """
    Set S of m distinct words of length n over an alphabet of size l.

    Words are held as an m x n integer array in stored order; `Word` objects are materialised on demand.
    """

    def __init__(self, words, l, n=None):
        """
        :type words: iterable or numpy.ndarray
        :param words: Stored words, in stored order
        :type l: int
        :param l: Alphabet size
        :type n: int
        :param n: Word length. Inferred from the words when None.
        """
        if words is None:
            raise ValueError('words is None')
        alphabet = Alphabet(l)
        array = np.array([tuple(word) for word in words] if not isinstance(words, np.ndarray) else words,
                         dtype=np.int64)
        if array.ndim == 1 and array.size == 0:
            raise ValueError('Word set is empty')
        if array.ndim != 2:
            raise ValueError('Words have inconsistent lengths')
        if n is not None and array.shape[1] != n:
            raise ValueError('Word length {} does not match n={}'.format(array.shape[1], n))
        if array.shape[0] == 0:
            raise ValueError('Word set is empty')
        if array.min() < 0 or array.max() >= alphabet.size:
            raise ValueError('Symbol out of range [0, {})'.format(alphabet.size))
        if len(np.unique(array, axis=0)) != len(array):
            raise ValueError('Word set contains duplicate words')
        array.setflags(write=False)
        self._array = array
        self._words = None
        self._index = None
        self.alphabet = alphabet

    @classmethod
    def _trusted(cls, array, l):
        """
        Internal constructor for arrays already known to be valid and distinct.
        """
        word_set = cls.__new__(cls)
        array = np.ascontiguousarray(array, dtype=np.int64)
        array.setflags(write=False)
        word_set._array = array
        word_set._words = None
        word_set._index = None
        word_set.alphabet = Alphabet(l)
        return word_set

    @property
    def l(self):
        return self.alphabet.size

    @property
    def n(self):
        return self._array.shape[1]

    @property
    def m(self):
        return self._array.shape[0]

    @property
    def array(self):
        """
        :rtype: numpy.ndarray
        :return: Read-only m x n array of the stored words
        """
        return self._array

    @property
    def words(self):
        """
        :rtype: tuple[Word]
        :return: Stored words in stored order
        """
        if self._words is None:
            self._words = tuple(Word(row) for row in self._array.tolist())
        return self._words

    def word(self, index):
        return Word(self._array[index].tolist())

    def index_of(self, word):
        """
        :type word: PartialWord
        :param word: Complete word to look up
        :rtype: int
        :return: Stored index of word, None when not stored
        """
        if self._index is None:
            self._index = {tuple(row): i for i, row in enumerate(self._array.tolist())}
        return self._index.get(tuple(word))

    def __contains__(self, word):
        return len(word) == self.n and self.index_of(word) is not None

    def __len__(self):
        return self.m

    def __iter__(self):
        return iter(self.words)

    def __eq__(self, other):
        return isinstance(other, WordSet) and other.l == self.l and np.array_equal(other.array, self.array)

    def __repr__(self):
        return 'WordSet(m={}, n={}, l={})'.format(self.m, self.n, self.l)


class RetrievalResult:
    """
    Output f(q) of an associative memory plus instrumentation.
    """

    UNIQUE = 'Unique'
    AMBIGUOUS = 'Ambiguous'
    NO_MATCH = 'NoMatch'
    MISMATCH = 'Mismatch'

    STATUSES = (UNIQUE, AMBIGUOUS, NO_MATCH, MISMATCH)

    def __init__(self, word, status, candidate_count, op_count, converged=None, iterations=None):
        """
        :type word: Word or None
        :param word: Retrieved word, None when nothing matched
        :type status: str
        :param status: One of `STATUSES`
        :type candidate_count: int or None
        :param candidate_count: Number of candidate words, None when unknown
        :type op_count: int
        :param op_count: Elementary operations performed, in the backend's unit
        :type converged: bool or None
        :param converged: Whether the iteration reached a fixed point (network backends only)
        :type iterations: int or None
        :param iterations: Iterations performed (network backends only)
        """
        if status not in self.STATUSES:
            raise ValueError('Unrecognised status {}'.format(status))
        if status == self.UNIQUE and candidate_count not in (None, 1):
            raise ValueError('Unique result with candidate_count {}'.format(candidate_count))
        if status == self.NO_MATCH and word is not None:
            raise ValueError('NoMatch result carries a word')
        if op_count < 0:
            raise ValueError('Negative op_count {}'.format(op_count))
        self.word = word
        self.status = status
        self.candidate_count = candidate_count
        self.op_count = int(op_count)
        self.converged = converged
        self.iterations = iterations

    def format_line(self):
        """
        :rtype: str
        :return: `word status candidate_count op_count` line, `-` standing for a missing word or count
        """
        return '{} {} {} {}'.format(
            '-' if self.word is None else str(self.word),
            self.status,
            '-' if self.candidate_count is None else self.candidate_count,
            self.op_count)

    def __repr__(self):
        return 'RetrievalResult({!r}, {}, candidate_count={}, op_count={})'.format(
            self.word, self.status, self.candidate_count, self.op_count)


def masked_eq(w1, w2):
    """
    Equality up to erased symbols: true iff at every position the symbols agree or at least one is erased.

    :type w1: PartialWord
    :param w1: First word
    :type w2: PartialWord
    :param w2: Second word
    :rtype: bool
    :return: True iff d(w1, w2) = 0
    """
    if len(w1) != len(w2):
        raise ValueError('Length mismatch {} != {}'.format(len(w1), len(w2)))
    return all(a == b or a == ERASED or b == ERASED for a, b in zip(PartialWord(w1), PartialWord(w2)))


def index_to_words(indexes, l, n):
    """
    Convert word indexes in [0, l^n) into an array of words (big-endian base-l digits).
    """
    indexes = np.asarray(indexes, dtype=np.int64)
    powers = l ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (indexes[:, None] // powers[None, :]) % l


def sample_word_set(l, n, m, seed=None):
    """
    Draw m distinct words uniformly from all m-subsets of the l^n words.

    Small universes (up to `EXACT_SAMPLING_MAX_UNIVERSE`) draw m word indexes without replacement. Larger ones
    rejection-sample distinct words, which keeps the set law exactly uniform.

    :type l: int
    :param l: Alphabet size
    :type n: int
    :param n: Word length
    :type m: int
    :param m: Number of words
    :type seed: int or numpy.random.Generator
    :param seed: Seed or generator
    :rtype: WordSet
    :return: Sampled word set, words in draw order
    """
    Alphabet(l)
    if n < 1:
        raise ValueError('Word length {} is below 1'.format(n))
    universe = l ** n
    if m < 1 or m > universe:
        raise ValueError('Cannot draw m={} distinct words out of {}'.format(m, universe))
    rng = make_rng(seed)

    if universe <= configs.EXACT_SAMPLING_MAX_UNIVERSE:
        return WordSet._trusted(index_to_words(rng.choice(universe, size=m, replace=False), l, n), l)

    if universe < 2 ** 62:
        # Draw integer indexes, keep first occurrences, top up until m distinct
        chosen = np.empty(0, dtype=np.int64)
        while len(chosen) < m:
            batch = rng.integers(0, universe, size=m - len(chosen), dtype=np.int64)
            merged = np.concatenate([chosen, batch])
            _, first = np.unique(merged, return_index=True)
            chosen = merged[np.sort(first)]
        return WordSet._trusted(index_to_words(chosen, l, n), l)

    rows = []
    seen = set()
    while len(rows) < m:
        row = tuple(rng.integers(0, l, size=n).tolist())
        if row not in seen:
            seen.add(row)
            rows.append(row)
    return WordSet._trusted(np.array(rows, dtype=np.int64), l)


def erase(w, r, seed=None):
    """
    Erasure channel: erase exactly r positions, the r-subset uniform over all C(n, r) subsets.

    :type w: PartialWord
    :param w: Word to erase
    :type r: int
    :param r: Number of erasures
    :type seed: int or numpy.random.Generator
    :param seed: Seed or generator
    :rtype: PartialWord
    :return: Erased word
    """
    n = len(w)
    if r < 0 or r > n:
        raise ValueError('Cannot erase r={} positions of a length {} word'.format(r, n))
    rng = make_rng(seed)
    positions = rng.choice(n, size=r, replace=False) if r else ()
    return ErasurePattern(positions, n).apply(w)


def match_mask(S, q):
    """
    :type S: WordSet
    :param S: Stored words
    :type q: PartialWord
    :param q: Query
    :rtype: numpy.ndarray
    :return: Boolean vector, true for stored words matching q up to erasures
    """
    if len(q) != S.n:
        raise ValueError('Query length {} does not match word length {}'.format(len(q), S.n))
    query = np.asarray(q, dtype=np.int64)
    known = query != ERASED
    return np.all(S.array[:, known] == query[known], axis=1)


def candidates(S, q):
    """
    Stored words matching q up to erasures, in stored order.

    :type S: WordSet
    :param S: Stored words
    :type q: PartialWord
    :param q: Query
    :rtype: list[Word]
    :return: Candidates S(q)
    """
    return [S.word(i) for i in np.flatnonzero(match_mask(S, PartialWord(q)))]


def _parse_symbols(tokens, l, line_number, allow_erasures, source):
    symbols = []
    for token in tokens:
        if token == ERASE_MARK:
            if not allow_erasures:
                raise AssocmemError('Line {}: erasure mark in a word file'.format(line_number),
                                    AssocmemError.PARSE_ERROR, source)
            symbols.append(ERASED)
            continue
        try:
            symbol = int(token)
        except ValueError:
            raise AssocmemError('Line {}: invalid symbol "{}"'.format(line_number, token),
                                AssocmemError.PARSE_ERROR, source)
        if not 0 <= symbol < l:
            raise AssocmemError('Line {}: symbol {} out of range [0, {})'.format(line_number, symbol, l),
                                AssocmemError.PARSE_ERROR, source)
        symbols.append(symbol)
    return symbols


def _read_lines(path, allow_erasures, source):
    """
    Read a `n l` header then one word per line. Blank lines and lines starting with '#' are skipped.

    :rtype: int, int, list[list[int]]
    :return: n, l, parsed rows
    """
    with open(path) as file:
        lines = [(i + 1, line.split()) for i, line in enumerate(file)]
    lines = [(number, tokens) for number, tokens in lines if tokens and not tokens[0].startswith('#')]
    if not lines:
        raise AssocmemError('{}: missing "n l" header'.format(path), AssocmemError.PARSE_ERROR, source)

    header_number, header = lines[0]
    try:
        n, l = (int(token) for token in header)
    except ValueError:
        raise AssocmemError('Line {}: header must be "n l"'.format(header_number), AssocmemError.PARSE_ERROR, source)
    if n < 1 or l < 2:
        raise AssocmemError('Line {}: invalid header n={} l={}'.format(header_number, n, l),
                            AssocmemError.PARSE_ERROR, source)

    rows = []
    for number, tokens in lines[1:]:
        if len(tokens) != n:
            raise AssocmemError('Line {}: expected {} symbols, got {}'.format(number, n, len(tokens)),
                                AssocmemError.PARSE_ERROR, source)
        rows.append(_parse_symbols(tokens, l, number, allow_erasures, source))
    return n, l, rows


def read_word_file(path):
    """
    :type path: str
    :param path: Word-set file
    :rtype: WordSet
    :return: Parsed word set
    """
    n, l, rows = _read_lines(path, False, 'read_word_file')
    if not rows:
        raise AssocmemError('{}: no words'.format(path), AssocmemError.PARSE_ERROR, 'read_word_file')
    try:
        word_set = WordSet(rows, l, n)
    except ValueError as error:
        raise AssocmemError('{}: {}'.format(path, error), AssocmemError.PARSE_ERROR, 'read_word_file')
    logger.debug('Read {} words of length {} over {} symbols from {}'.format(word_set.m, n, l, path))
    return word_set


def read_query_file(path):
    """
    :type path: str
    :param path: Query file, `?` marking erased symbols
    :rtype: int, int, list[PartialWord]
    :return: n, l, queries in file order
    """
    n, l, rows = _read_lines(path, True, 'read_query_file')
    return n, l, [PartialWord(row) for row in rows]


def write_word_file(path, words, n, l):
    """
    Write words (complete or partial) with a `n l` header.

    :type path: str
    :param path: Output path
    :type words: iterable[PartialWord]
    :param words: Words to write
    :type n: int
    :param n: Word length
    :type l: int
    :param l: Alphabet size
    """
    with open(path, 'w') as file:
        file.write('{} {}\n'.format(n, l))
        for word in words:
            file.write('{}\n'.format(PartialWord(word)))
