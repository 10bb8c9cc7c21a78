import csv
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor

from . import analytics
from . import configs
from . import exact_ml
from . import gbnn
from . import hopfield
from . import trie_ml
from .core import AssocmemError, WordSet, erase, make_rng, sample_word_set

logger = logging.getLogger(__name__)

EXPERIMENT_KINDS = ('fig1', 'error', 'memory', 'capacity', 'complexity')

OP_COUNT_UNITS = {
    'exact': 'symbol comparisons',
    'trie': 'trie nodes visited',
    'hopfield': 'multiply-accumulates',
    'gbnn': 'score accumulations',
}


class _Backend:
    """
    Adapter giving every memory the same build / retrieve / accounting surface in experiments.
    """

    name = None

    def variant(self):
        return ''

    def check_feasible(self, l, n, m):
        pass

    def build(self, word_set):
        raise NotImplementedError

    def retrieve(self, memory, query, rng, word_set):
        raise NotImplementedError

    def memory_bits(self, l, n, m):
        raise NotImplementedError

    def store_op_count(self, memory):
        raise NotImplementedError

    def __repr__(self):
        return '{}[{}]'.format(self.name, self.variant())


class _ExactBackend(_Backend):
    name = 'exact'

    def __init__(self, tie_policy=exact_ml.UNIFORM_RANDOM):
        if tie_policy not in exact_ml.TIE_POLICIES:
            raise ValueError('Unrecognised tie policy {}'.format(tie_policy))
        self.tie_policy = tie_policy

    def variant(self):
        return 'ties={}'.format(self.tie_policy)

    def build(self, word_set):
        return exact_ml.store(word_set)

    def retrieve(self, memory, query, rng, word_set):
        return memory.retrieve(query, tie_policy=self.tie_policy, seed=rng)

    def memory_bits(self, l, n, m):
        return analytics.ordered_list_bits(l, n, m)

    def store_op_count(self, memory):
        return memory.m * memory.n


class _TrieBackend(_Backend):
    name = 'trie'

    def __init__(self, mode=trie_ml.LAZY, path_policy=trie_ml.LEAF_WEIGHTED):
        if mode not in trie_ml.MODES:
            raise ValueError('Unrecognised trie mode {}'.format(mode))
        if path_policy not in trie_ml.PATH_POLICIES:
            raise ValueError('Unrecognised path policy {}'.format(path_policy))
        self.mode = mode
        self.path_policy = path_policy

    def variant(self):
        return 'mode={};paths={}'.format(self.mode, self.path_policy)

    def check_feasible(self, l, n, m):
        if self.mode == trie_ml.EAGER and n > configs.EAGER_TRIE_MAX_N:
            raise AssocmemError('Eager trie build at l={} n={} m={} exceeds the cap n <= {}'.format(
                l, n, m, configs.EAGER_TRIE_MAX_N), AssocmemError.RESOURCE_LIMIT, 'harness')

    def build(self, word_set):
        return trie_ml.build(word_set, self.mode)

    def retrieve(self, memory, query, rng, word_set):
        return memory.retrieve(query, path_policy=self.path_policy, seed=rng)

    def memory_bits(self, l, n, m):
        # Upper bound of an eager build: 2^n tries of at most m * n + 1 nodes
        return 2 ** n * (m * n + 1) * ((l - 1).bit_length() + m.bit_length())

    def store_op_count(self, memory):
        if memory.mode == trie_ml.EAGER:
            return memory.store_op_count()
        # Every trie inserts the same m words, so one lazily built trie gives the eager total
        per_trie = max(trie.insert_op_count for trie in memory.tries.values())
        return per_trie * 2 ** memory.n


class _HopfieldBackend(_Backend):
    name = 'hopfield'

    def __init__(self, diagonal_mode=hopfield.SUMMED, max_iters=None, clamp_known=False):
        if diagonal_mode not in hopfield.DIAGONAL_MODES:
            raise ValueError('Unrecognised diagonal mode {}'.format(diagonal_mode))
        self.diagonal_mode = diagonal_mode
        self.max_iters = configs.HOPFIELD_MAX_ITERS if max_iters is None else max_iters
        if self.max_iters < 1:
            raise ValueError('max_iters {} is below 1'.format(self.max_iters))
        self.clamp_known = clamp_known

    def variant(self):
        return 'diag={};iters={};clamp={}'.format(self.diagonal_mode, self.max_iters, int(self.clamp_known))

    def check_feasible(self, l, n, m):
        neurons = n * max((l - 1).bit_length(), 1)
        if neurons > configs.NETWORK_MAX_NEURONS:
            raise AssocmemError('Hopfield network at l={} n={} m={} needs {} neurons, cap is {}'.format(
                l, n, m, neurons, configs.NETWORK_MAX_NEURONS), AssocmemError.RESOURCE_LIMIT, 'harness')

    def build(self, word_set):
        return hopfield.store(word_set, self.diagonal_mode)

    def retrieve(self, memory, query, rng, word_set):
        return memory.retrieve_word(query, self.max_iters, self.clamp_known, stored=word_set)

    def memory_bits(self, l, n, m):
        return analytics.hnn_memory_bits(l, n, m)

    def store_op_count(self, memory):
        return memory.store_op_count


class _GBNNBackend(_Backend):
    name = 'gbnn'

    def __init__(self, self_pairs=gbnn.INCLUDED, iterations=None, gamma=None):
        if self_pairs not in gbnn.SELF_PAIR_MODES:
            raise ValueError('Unrecognised self pair mode {}'.format(self_pairs))
        self.self_pairs = self_pairs
        self.iterations = configs.GBNN_ITERATIONS if iterations is None else iterations
        if self.iterations < 1:
            raise ValueError('iterations {} is below 1'.format(self.iterations))
        self.gamma = gamma

    def variant(self):
        return 'self={};iters={};gamma={}'.format(
            self.self_pairs, self.iterations, 'nl' if self.gamma is None else self.gamma)

    def check_feasible(self, l, n, m):
        if self.gamma is not None and self.gamma < n * l:
            raise ValueError('gamma {} is below n * l = {} at l={} n={}'.format(self.gamma, n * l, l, n))
        if n * l > configs.NETWORK_MAX_NEURONS:
            raise AssocmemError('Clique network at l={} n={} m={} needs {} neurons, cap is {}'.format(
                l, n, m, n * l, configs.NETWORK_MAX_NEURONS), AssocmemError.RESOURCE_LIMIT, 'harness')

    def build(self, word_set):
        return gbnn.store(word_set, self.self_pairs, self.gamma)

    def retrieve(self, memory, query, rng, word_set):
        return memory.retrieve(query, self.iterations, rng, stored=word_set)

    def memory_bits(self, l, n, m):
        return analytics.gbnn_memory_bits(l, n)

    def store_op_count(self, memory):
        return memory.store_op_count


def _as_list(value):
    if value is None:
        return []
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _as_pairs(value):
    pairs = []
    for pair in value or ():
        if len(pair) != 2:
            raise ValueError('Expected an (l, n) pair, got {}'.format(pair))
        pairs.append((int(pair[0]), int(pair[1])))
    return pairs


class ExperimentConfig:
    """
    Sweep, backends, trial count, seed and backend options of one experiment.

    List-valued backend options (`diagonal_modes`, `hopfield_iters`, `self_pairs`, `gbnn_iters`) expand into one
    backend variant per combination. `pairs`, a list of (l, n), replaces the l x n product when given.
    """

    def __init__(self, kind='error', l=(2,), n=(4,), m=(4,), r=(1,), backends=('exact',), trials=1000, seed=0,
                 workers=1, p0=0.01, fixed_set=False, tie_policy=exact_ml.UNIFORM_RANDOM, trie_mode=trie_ml.LAZY,
                 path_policy=trie_ml.LEAF_WEIGHTED, diagonal_modes=(hopfield.SUMMED,), hopfield_iters=(None,),
                 clamp_known=False, self_pairs=(gbnn.INCLUDED,), gbnn_iters=(None,), gamma=None, pairs=None,
                 name=None):
        if kind not in EXPERIMENT_KINDS:
            raise ValueError('Unrecognised experiment kind {}'.format(kind))
        self.kind = kind
        self.name = name or kind
        self.pairs = _as_pairs(pairs)
        self.l = sorted({pair[0] for pair in self.pairs}) if self.pairs else _as_list(l)
        self.n = sorted({pair[1] for pair in self.pairs}) if self.pairs else _as_list(n)
        self.m = _as_list(m)
        self.r = _as_list(r)
        self.backends = _as_list(backends)
        self.trials = trials
        self.seed = 0 if seed is None else seed
        self.workers = max(int(workers or 1), 1)
        self.p0 = p0
        self.fixed_set = fixed_set
        self.tie_policy = tie_policy
        self.trie_mode = trie_mode
        self.path_policy = path_policy
        self.diagonal_modes = _as_list(diagonal_modes)
        self.hopfield_iters = _as_list(hopfield_iters)
        self.clamp_known = clamp_known
        self.self_pairs = _as_list(self_pairs)
        self.gbnn_iters = _as_list(gbnn_iters)
        self.gamma = gamma

        if self.trials is None or self.trials < 1:
            raise ValueError('trials {} is below 1'.format(self.trials))
        if self.seed < 0:
            raise ValueError('Negative seed {}'.format(self.seed))
        if not 0 < self.p0 < 1:
            raise ValueError('Target error {} outside (0, 1)'.format(self.p0))
        if not self.l or not self.n:
            raise ValueError('Empty sweep')
        if kind in ('fig1', 'error', 'memory', 'complexity') and not self.m:
            raise ValueError('Empty m sweep')
        if kind in ('fig1', 'error', 'capacity', 'complexity') and not self.r:
            raise ValueError('Empty r sweep')
        if kind in ('error', 'capacity', 'complexity') and not self.backends:
            raise ValueError('No backend selected')
        unknown = [backend for backend in self.backends if backend not in configs.BACKENDS]
        if unknown:
            raise ValueError('Unrecognised backends {}'.format(unknown))
        if any(l < 2 or n < 1 for l, n in self.shapes()) or any(m < 1 for m in self.m):
            raise ValueError('Sweep values out of range')
        # Builds every variant once so that invalid options fail before any computation
        self.backend_variants()

    @classmethod
    def from_preset(cls, preset, **overrides):
        """
        :type preset: str
        :param preset: Key of `configs.EXPERIMENT_PRESETS`
        :param overrides: Values replacing preset entries; None values are ignored, and an l or n override drops the
            preset pairs
        :rtype: ExperimentConfig
        :return: Config
        """
        if preset not in configs.EXPERIMENT_PRESETS:
            raise ValueError('Unrecognised experiment {}'.format(preset))
        options = dict(configs.EXPERIMENT_PRESETS[preset])
        if overrides.get('pairs') is None and (overrides.get('l') is not None or overrides.get('n') is not None):
            options.pop('pairs', None)
        options.update({key: value for key, value in overrides.items() if value is not None})
        options.setdefault('name', preset)
        return cls(**options)

    def backend_variants(self):
        """
        :rtype: list[_Backend]
        :return: One adapter per backend and option combination
        """
        variants = []
        for backend in self.backends:
            if backend == 'exact':
                variants.append(_ExactBackend(self.tie_policy))
            elif backend == 'trie':
                variants.append(_TrieBackend(self.trie_mode, self.path_policy))
            elif backend == 'hopfield':
                for diagonal_mode, max_iters in itertools.product(self.diagonal_modes, self.hopfield_iters):
                    variants.append(_HopfieldBackend(diagonal_mode, max_iters, self.clamp_known))
            elif backend == 'gbnn':
                for self_pairs, iterations in itertools.product(self.self_pairs, self.gbnn_iters):
                    variants.append(_GBNNBackend(self_pairs, iterations, self.gamma))
        return variants

    def shapes(self):
        """
        :rtype: list[tuple]
        :return: (l, n) pairs of the sweep
        """
        return list(self.pairs) if self.pairs else list(itertools.product(self.l, self.n))

    def points(self):
        """
        :rtype: list[tuple]
        :return: Feasible (l, n, m, r) points in sweep order
        """
        return [(l, n, m, r) for (l, n), m, r in itertools.product(self.shapes(), self.m, self.r)
                if m <= l ** n and r <= n]

    def provenance(self):
        """
        :rtype: list[str]
        :return: `key=value` lines describing the run, without wall-clock data
        """
        lines = [
            'experiment={}'.format(self.name),
            'kind={}'.format(self.kind),
            'seed={}'.format(self.seed),
            'version={}'.format(configs.CSV_VERSION),
            'trials={}'.format(self.trials),
        ]
        if self.pairs:
            lines.append('sweep=pairs:{} m:{} r:{}'.format(
                ' '.join('{}x{}'.format(l, n) for l, n in self.pairs), self.m, self.r))
        else:
            lines.append('sweep=l:{} n:{} m:{} r:{}'.format(self.l, self.n, self.m, self.r))
        if self.kind == 'capacity':
            lines.append('p0={} window={}'.format(self.p0, configs.TABLE_ONE_WINDOW))
        if self.fixed_set:
            lines.append('fixed_set=1')
        for variant in self.backend_variants():
            lines.append('backend={} {} op_count_unit={}'.format(
                variant.name, variant.variant(), OP_COUNT_UNITS[variant.name]))
        return lines


class _Row:
    """
    CSV row with a fixed column list.
    """

    FIELDS = ()

    def __init__(self, **values):
        missing = set(self.FIELDS) - set(values)
        if missing:
            raise ValueError('Missing row fields {}'.format(sorted(missing)))
        for field in self.FIELDS:
            setattr(self, field, values[field])

    def as_list(self):
        return [format_value(getattr(self, field)) for field in self.FIELDS]

    def __repr__(self):
        return '{}({})'.format(type(self).__name__, ', '.join(
            '{}={}'.format(field, getattr(self, field)) for field in self.FIELDS))


class ResultRow(_Row):
    FIELDS = ('backend', 'l', 'n', 'm', 'r', 'trials', 'word_error_rate', 'stderr', 'analytic_error',
              'mean_op_count', 'memory_bits', 'seed', 'variant', 'log10_error')


class Fig1Row(_Row):
    FIELDS = ('l', 'n', 'm', 'r', 'residual_error', 'log10_error', 'asymptotic_error')


class MemoryRow(_Row):
    FIELDS = ('l', 'n', 'm', 'entropy_bits', 'entropy_small_m', 'entropy_stirling', 'ordered_bits', 'hnn_bits',
              'gbnn_bits')


class CapacityRow(_Row):
    FIELDS = ('backend', 'l', 'n', 'r', 'p0', 'max_m', 'memory_bits', 'entropy_bits', 'ratio', 'bracketed',
              'variant')


class ComplexityRow(_Row):
    FIELDS = ('backend', 'l', 'n', 'm', 'r', 'trials', 'mean_op_count', 'ops_per_n', 'store_op_count', 'growth',
              'variant')


def format_value(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, float):
        return repr(value)
    return value


def _run_chunk(backend, l, n, m, r, seed, stream, start, stop, word_set):
    """
    Run trials [start, stop) of one point. Trial t draws from the generator of stream (*stream, t), so that every
    backend sees the same sets, words and erasures, and results do not depend on how trials are split.

    :rtype: int, int, int
    :return: Successes, total retrieval op_count, total store op_count
    """
    successes = 0
    op_total = 0
    store_total = 0
    for trial in range(start, stop):
        rng = make_rng(seed, *(stream + (trial,)))
        trial_set = word_set if word_set is not None else sample_word_set(l, n, m, rng)
        word = trial_set.word(rng.integers(trial_set.m))
        query = erase(word, r, rng)
        memory = backend.build(trial_set)
        result = backend.retrieve(memory, query, rng, trial_set)
        successes += int(result.word is not None and result.word == word)
        op_total += result.op_count
        store_total += backend.store_op_count(memory)
    return successes, op_total, store_total


def _run_chunk_args(args):
    return _run_chunk(*args)


def _execute(chunks, workers):
    """
    Run chunk argument tuples, in parallel when workers > 1, returning results in chunk order.
    """
    if workers <= 1 or len(chunks) <= 1:
        return [_run_chunk(*chunk) for chunk in chunks]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(_run_chunk_args, chunks))


def _split(trials, workers):
    size = max(int(math.ceil(trials / float(workers * 4))), 1) if workers > 1 else trials
    return [(start, min(start + size, trials)) for start in range(0, trials, size)]


def _simulate(jobs, trials, seed, workers):
    """
    :type jobs: list[tuple]
    :param jobs: (backend, l, n, m, r, stream, word_set) per point
    :rtype: list[tuple]
    :return: (successes, op_total, store_total) per job, summed over its chunks
    """
    chunks = []
    owners = []
    for index, (backend, l, n, m, r, stream, word_set) in enumerate(jobs):
        for start, stop in _split(trials, workers):
            chunks.append((backend, l, n, m, r, seed, stream, start, stop, word_set))
            owners.append(index)
    totals = [[0, 0, 0] for _ in jobs]
    for owner, result in zip(owners, _execute(chunks, workers)):
        for k in range(3):
            totals[owner][k] += result[k]
    return [tuple(total) for total in totals]


def _error_stats(successes, trials):
    error = 1.0 - successes / float(trials)
    return error, math.sqrt(error * (1.0 - error) / trials)


def run_error_experiment(cfg):
    """
    Monte Carlo word error rate per (point, backend variant). Each trial samples a fresh set (or reuses the point's
    set in fixed-set mode), draws a stored word uniformly, erases r symbols and counts a success only when the
    backend returns exactly that word.

    The `analytic_error` column is the expected residual error over uniform sets, or 1 - exact success of the
    point's set in fixed-set mode (empty when the enumeration budget is exceeded).

    :type cfg: ExperimentConfig
    :param cfg: Config
    :rtype: list[ResultRow]
    :return: Rows sorted by backend, variant and point
    """
    variants = cfg.backend_variants()
    points = cfg.points()
    for backend in variants:
        for l, n, m, r in points:
            backend.check_feasible(l, n, m)

    references = {}
    fixed_sets = {}
    for index, (l, n, m, r) in enumerate(points):
        if cfg.fixed_set:
            word_set = sample_word_set(l, n, m, make_rng(cfg.seed, index))
            fixed_sets[index] = word_set
            try:
                references[index] = float(1 - exact_ml.exact_success_probability(word_set, r))
            except AssocmemError:
                logger.warning('No exact reference for l={} n={} m={} r={}: enumeration budget exceeded'.format(
                    l, n, m, r))
                references[index] = None
        else:
            references[index] = float(analytics.residual_error(analytics.ScenarioParams(l, n, m, r)))

    jobs = [(backend, l, n, m, r, (index,), fixed_sets.get(index))
            for backend in variants for index, (l, n, m, r) in enumerate(points)]
    logger.info('Running {} with {} points x {} variants x {} trials on {} workers'.format(
        cfg.name, len(points), len(variants), cfg.trials, cfg.workers))
    totals = _simulate(jobs, cfg.trials, cfg.seed, cfg.workers)

    rows = []
    for (backend, l, n, m, r, stream, _), (successes, op_total, _) in zip(jobs, totals):
        error, stderr = _error_stats(successes, cfg.trials)
        rows.append(ResultRow(
            backend=backend.name, l=l, n=n, m=m, r=r, trials=cfg.trials, word_error_rate=error, stderr=stderr,
            analytic_error=references[stream[0]], mean_op_count=op_total / float(cfg.trials),
            memory_bits=backend.memory_bits(l, n, m), seed=cfg.seed, variant=backend.variant(),
            log10_error=analytics.log10_probability(error)))
    return sorted(rows, key=lambda row: (row.backend, row.variant, row.l, row.n, row.r, row.m))


def fig1_rows(cfg):
    """
    Analytic residual error curves: one row per (l, n, r, m) with the exact and asymptotic predictions.

    :type cfg: ExperimentConfig
    :param cfg: Config
    :rtype: list[Fig1Row]
    :return: Rows sorted by (l, n, r, m)
    """
    rows = []
    for l, n, m, r in cfg.points():
        params = analytics.ScenarioParams(l, n, m, r)
        error = float(analytics.residual_error(params))
        rows.append(Fig1Row(l=l, n=n, m=m, r=r, residual_error=error,
                            log10_error=analytics.log10_probability(max(error, 0.0)),
                            asymptotic_error=1.0 - analytics.expected_success_asymptotic(params)))
    return sorted(rows, key=lambda row: (row.l, row.n, row.r, row.m))


def run_memory_experiment(cfg):
    """
    Bits needed to represent the stored set: entropy H (exact and asymptotic forms), the ordered list of words,
    and the Hopfield and clique network models.

    :type cfg: ExperimentConfig
    :param cfg: Config
    :rtype: list[MemoryRow]
    :return: Rows sorted by (l, n, m)
    """
    rows = []
    for (l, n), m in itertools.product(cfg.shapes(), cfg.m):
        if m > l ** n:
            continue
        entropy = analytics.set_entropy_bits(l, n, m)
        ordered = analytics.ordered_list_bits(l, n, m)
        if entropy > ordered * (1 + 1e-12):
            raise RuntimeError('Entropy {} exceeds ordered list bits {} at l={} n={} m={}'.format(
                entropy, ordered, l, n, m))
        rows.append(MemoryRow(
            l=l, n=n, m=m, entropy_bits=entropy, entropy_small_m=analytics.entropy_asymptotic_small_m(l, n, m),
            entropy_stirling=analytics.entropy_stirling(l, n, m), ordered_bits=ordered,
            hnn_bits=analytics.hnn_memory_bits(l, n, m), gbnn_bits=analytics.gbnn_memory_bits(l, n)))
    return sorted(rows, key=lambda row: (row.l, row.n, row.m))


def _probe_error(backend, l, n, r, m, cfg, stream):
    (successes, _, _), = _simulate([(backend, l, n, m, r, stream + (m,), None)], cfg.trials, cfg.seed, cfg.workers)
    error, _ = _error_stats(successes, cfg.trials)
    logger.debug('{} at l={} n={} r={} m={}: error {}'.format(backend, l, n, r, m, error))
    return error


def max_set_size(backend, l, n, r, cfg, stream=()):
    """
    Largest m whose empirical error stays at most cfg.p0: doubling from m = 1 until a probe fails, then bisection
    until the bracket [pass, fail] is within `TABLE_ONE_WINDOW` relative width.

    :rtype: int, bool
    :return: Largest passing m (0 when m = 1 already fails), whether a failing m was found
    """
    if _probe_error(backend, l, n, r, 1, cfg, stream) > cfg.p0:
        logger.warning('{} fails the target error at m=1 for l={} n={} r={}'.format(backend, l, n, r))
        return 0, False

    cap = min(configs.TABLE_ONE_MAX_M, l ** n)
    passing, failing = 1, None
    while failing is None:
        candidate = min(passing * 2, cap)
        if candidate == passing:
            logger.warning('{} never exceeded the target error up to m={} for l={} n={} r={}'.format(
                backend, cap, l, n, r))
            return passing, False
        if _probe_error(backend, l, n, r, candidate, cfg, stream) > cfg.p0:
            failing = candidate
        else:
            passing = candidate

    while failing - passing > 1 and failing > passing * (1 + configs.TABLE_ONE_WINDOW):
        middle = (passing + failing) // 2
        if _probe_error(backend, l, n, r, middle, cfg, stream) > cfg.p0:
            failing = middle
        else:
            passing = middle
    return passing, True


def run_capacity_experiment(cfg):
    """
    Capacity search: per backend and (l, n, r), the largest m reaching error at most p0 by simulation, the
    memory the backend needs at that m, and its ratio to the entropy H of the stored set.

    :type cfg: ExperimentConfig
    :param cfg: Config
    :rtype: list[CapacityRow]
    :return: Rows sorted by backend, variant and point
    """
    rows = []
    points = [(l, n, r) for (l, n), r in itertools.product(cfg.shapes(), cfg.r) if r <= n]
    for backend in cfg.backend_variants():
        for index, (l, n, r) in enumerate(points):
            backend.check_feasible(l, n, 1)
            max_m, bracketed = max_set_size(backend, l, n, r, cfg, (index,))
            if max_m == 0:
                rows.append(CapacityRow(backend=backend.name, l=l, n=n, r=r, p0=cfg.p0, max_m=0, memory_bits=None,
                                        entropy_bits=None, ratio=None, bracketed=False, variant=backend.variant()))
                continue
            memory_bits = backend.memory_bits(l, n, max_m)
            entropy = analytics.set_entropy_bits(l, n, max_m)
            rows.append(CapacityRow(
                backend=backend.name, l=l, n=n, r=r, p0=cfg.p0, max_m=max_m, memory_bits=memory_bits,
                entropy_bits=entropy, ratio=memory_bits / entropy if entropy > 0 else None, bracketed=bracketed,
                variant=backend.variant()))
            logger.info('{} at l={} n={} r={}: max m {}, memory/H {}'.format(
                backend, l, n, r, max_m, rows[-1].ratio))
    return sorted(rows, key=lambda row: (row.backend, row.variant, row.l, row.n, row.r))


def run_complexity_experiment(cfg):
    """
    Retrieval cost scaling: mean retrieval op_count and store op_count per backend over an n sweep, with the
    op_count growth between successive n of the same (backend, l, m, r) series.

    :type cfg: ExperimentConfig
    :param cfg: Config
    :rtype: list[ComplexityRow]
    :return: Rows sorted by backend, variant, l, m, r, n
    """
    variants = cfg.backend_variants()
    points = cfg.points()
    for backend in variants:
        for l, n, m, r in points:
            backend.check_feasible(l, n, m)

    jobs = [(backend, l, n, m, r, (index,), None)
            for backend in variants for index, (l, n, m, r) in enumerate(points)]
    totals = _simulate(jobs, cfg.trials, cfg.seed, cfg.workers)

    rows = []
    for (backend, l, n, m, r, _, _), (_, op_total, store_total) in zip(jobs, totals):
        mean_op_count = op_total / float(cfg.trials)
        rows.append(ComplexityRow(
            backend=backend.name, l=l, n=n, m=m, r=r, trials=cfg.trials, mean_op_count=mean_op_count,
            ops_per_n=mean_op_count / n, store_op_count=store_total / float(cfg.trials), growth=None,
            variant=backend.variant()))
    rows.sort(key=lambda row: (row.backend, row.variant, row.l, row.m, row.r, row.n))

    for previous, row in zip(rows, rows[1:]):
        same_series = (previous.backend, previous.variant, previous.l, previous.m, previous.r) == \
                      (row.backend, row.variant, row.l, row.m, row.r)
        if same_series and previous.mean_op_count > 0:
            row.growth = row.mean_op_count / previous.mean_op_count
    return rows


def adversarial_set(l, n):
    """
    All words with a single symbol b at some position k on an all-a background, over every k and a != b.

    :type l: int
    :param l: Alphabet size
    :type n: int
    :param n: Word length, at least 2
    :rtype: WordSet
    :return: Set of n * l * (l - 1) words (fewer for n = 2, where constructions coincide)
    """
    if l < 2:
        raise ValueError('Alphabet size {} is below 2'.format(l))
    if n < 2:
        raise ValueError('Word length {} is below 2'.format(n))
    words = {}
    for k in range(n):
        for a in range(l):
            for b in range(l):
                if a != b:
                    word = [a] * n
                    word[k] = b
                    words.setdefault(tuple(word), None)
    return WordSet(list(words), l, n)


def hiding_queries(word_set):
    """
    Single-erasure queries that hide a symbol occurring exactly once in its word (the b of an adversarial word).

    :type word_set: WordSet
    :param word_set: Stored words
    :rtype: list[tuple]
    :return: (word, query) pairs
    """
    pairs = []
    for word in word_set:
        for position, symbol in enumerate(word):
            if word.count(symbol) == 1:
                query = list(word)
                query[position] = None
                pairs.append((word, query))
    return pairs


def run_experiment(cfg):
    """
    :type cfg: ExperimentConfig
    :param cfg: Config
    :rtype: list[_Row]
    :return: Rows of the experiment kind
    """
    if cfg.kind == 'fig1':
        return fig1_rows(cfg)
    elif cfg.kind == 'error':
        return run_error_experiment(cfg)
    elif cfg.kind == 'memory':
        return run_memory_experiment(cfg)
    elif cfg.kind == 'capacity':
        return run_capacity_experiment(cfg)
    elif cfg.kind == 'complexity':
        return run_complexity_experiment(cfg)
    else:
        raise RuntimeError('Undetected mistake in experiment kind {}'.format(cfg.kind))


def write_csv(file, rows, cfg):
    """
    Write `#` provenance comments, the header row and one line per row.

    :type file: file
    :param file: Text file open for writing
    :type rows: list[_Row]
    :param rows: Rows of a single type
    :type cfg: ExperimentConfig
    :param cfg: Config echoed as comments
    """
    for line in cfg.provenance():
        file.write('# {}\n'.format(line))
    fields = type(rows[0]).FIELDS if rows else ()
    writer = csv.writer(file, lineterminator='\n')
    writer.writerow(fields)
    for row in rows:
        writer.writerow(row.as_list())
