import argparse
import csv
import io
import logging

from django.core.management.base import BaseCommand, CommandError

from ... import analytics
from ... import configs
from ... import exact_ml
from ... import gbnn
from ... import harness
from ... import hopfield
from ... import trie_ml
from ...core import (AssocmemError, erase, make_rng, read_query_file, read_word_file, sample_word_set,
                     write_word_file)

logger = logging.getLogger(__name__)

ANALYTIC_QUANTITIES = ('eq2', 'eq4', 'capacity', 'entropy', 'ratio', 'membits')

TIE_POLICY_CHOICES = {'uniform': exact_ml.UNIFORM_RANDOM, 'first': exact_ml.FIRST_STORED}
PATH_POLICY_CHOICES = {'leaf': trie_ml.LEAF_WEIGHTED, 'first': trie_ml.FIRST_CHILD}
TRIE_MODE_CHOICES = {'eager': trie_ml.EAGER, 'lazy': trie_ml.LAZY}
DIAGONAL_CHOICES = {'sum': hopfield.SUMMED, 'zero': hopfield.ZEROED}
SELF_PAIR_CHOICES = {'include': gbnn.INCLUDED, 'exclude': gbnn.EXCLUDED}

_VERBOSITY_LEVELS = {0: logging.ERROR, 1: logging.WARNING, 2: logging.INFO, 3: logging.DEBUG}

CSV_SCHEMAS = '''CSV schemas (every file starts with "#" provenance lines):
  fig1        {}
  fig2, calibrate  {}
  fig3        {}
  table1      {}
  table2      {}'''.format(*(','.join(row.FIELDS) for row in (
    harness.Fig1Row, harness.ResultRow, harness.MemoryRow, harness.CapacityRow, harness.ComplexityRow)))


def _add_backend_options(parser):
    parser.add_argument('--backend', choices=configs.BACKENDS, default='exact', help='Memory backend')
    parser.add_argument('--ties', choices=sorted(TIE_POLICY_CHOICES), default='uniform',
                        help='exact: tie policy among candidates')
    parser.add_argument('--trie-mode', choices=sorted(TRIE_MODE_CHOICES), default='lazy',
                        help='trie: build every permutation trie up front or on demand')
    parser.add_argument('--paths', choices=sorted(PATH_POLICY_CHOICES), default='leaf',
                        help='trie: leaf-weighted random path or smallest symbol first')
    parser.add_argument('--max-iters', type=int, default=None,
                        help='hopfield: maximum synchronous updates (default {})'.format(configs.HOPFIELD_MAX_ITERS))
    parser.add_argument('--diag', choices=sorted(DIAGONAL_CHOICES), default='sum',
                        help='hopfield: keep the summed diagonal or zero it')
    parser.add_argument('--clamp', action='store_true', help='hopfield: clamp unerased neurons to the query')
    parser.add_argument('--gamma', type=int, default=None, help='gbnn: memory coefficient, at least n * l')
    parser.add_argument('--iters', type=int, default=None,
                        help='gbnn: maximum updates (default {})'.format(configs.GBNN_ITERATIONS))
    parser.add_argument('--self', dest='self_pairs', choices=sorted(SELF_PAIR_CHOICES), default='include',
                        help='gbnn: connect each used neuron to itself')


def _add_variant_options(parser):
    parser.add_argument('--ties', choices=sorted(TIE_POLICY_CHOICES), default=None, help='exact: tie policy')
    parser.add_argument('--trie-mode', choices=sorted(TRIE_MODE_CHOICES), default=None, help='trie: build mode')
    parser.add_argument('--paths', choices=sorted(PATH_POLICY_CHOICES), default=None, help='trie: path policy')
    parser.add_argument('--diag', nargs='+', choices=sorted(DIAGONAL_CHOICES), default=None,
                        help='hopfield: diagonal modes, one variant each')
    parser.add_argument('--max-iters', nargs='+', type=int, default=None,
                        help='hopfield: maximum update counts, one variant each')
    parser.add_argument('--clamp', action='store_true', help='hopfield: clamp unerased neurons to the query')
    parser.add_argument('--self', dest='self_pairs', nargs='+', choices=sorted(SELF_PAIR_CHOICES), default=None,
                        help='gbnn: self pair modes, one variant each')
    parser.add_argument('--iters', nargs='+', type=int, default=None, help='gbnn: iteration counts, one variant each')
    parser.add_argument('--gamma', type=int, default=None, help='gbnn: memory coefficient, at least n * l')
    parser.add_argument('--pair', dest='pairs', nargs=2, type=int, action='append', metavar=('L', 'N'), default=None,
                        help='Sweep this (l, n) pair instead of the l x n product; repeatable')


def _choices(mapping, keys):
    return None if keys is None else [mapping[key] for key in keys]


def _add_scenario_options(parser, nargs=None):
    for flag in ('l', 'n', 'm', 'r'):
        parser.add_argument('--{}'.format(flag), type=int, nargs=nargs, default=None)
    parser.add_argument('--p0', type=float, default=None, help='Target residual error')


def _add_seed_option(parser):
    parser.add_argument('--seed', type=int, default=0, help='Base seed; absent means 0, never wall-clock entropy')


def _csv_line(values):
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator='').writerow(values)
    return buffer.getvalue()


class Command(BaseCommand):
    help = 'Build, query and evaluate maximum likelihood, trie, Hopfield and clique associative memories.'

    requires_system_checks = []
    requires_migrations_checks = False

    def add_arguments(self, parser):
        verbs = parser.add_subparsers(dest='verb', required=True, metavar='verb')

        build = verbs.add_parser('build', help='Sample or read a word set and write it with optional queries')
        _add_scenario_options(build)
        build.add_argument('--in', dest='input', default=None, help='Read the word set instead of sampling it')
        build.add_argument('--out', default=None, help='Word file to write (stdout when absent)')
        build.add_argument('--queries', default=None, help='Query file to write with r erasures per query')
        build.add_argument('--count', type=int, default=None, help='Number of queries (default m)')
        build.add_argument('--stats', action='store_true', help='Print build statistics of --backend')
        _add_backend_options(build)
        _add_seed_option(build)

        query = verbs.add_parser('query', help='Retrieve each query of a query file')
        query.add_argument('words', help='Word-set file')
        query.add_argument('queries', help='Query file, "?" marking erased symbols')
        _add_backend_options(query)
        _add_seed_option(query)

        analytic = verbs.add_parser('analytic', help='Print one closed-form prediction as CSV')
        analytic.add_argument('quantity', choices=ANALYTIC_QUANTITIES)
        _add_scenario_options(analytic)
        analytic.add_argument('--mode', choices=analytics.MODES, default=None,
                              help='Evaluation mode (automatic when absent)')

        experiment = verbs.add_parser('experiment', help='Run a named experiment and write its CSV',
                                      epilog=CSV_SCHEMAS, formatter_class=argparse.RawDescriptionHelpFormatter)
        experiment.add_argument('name', choices=sorted(configs.EXPERIMENT_PRESETS))
        experiment.add_argument('--out', default=None, help='CSV path (stdout when absent)')
        experiment.add_argument('--trials', type=int, default=None)
        experiment.add_argument('--workers', type=int, default=configs.DEFAULT_WORKERS)
        experiment.add_argument('--backends', nargs='+', choices=configs.BACKENDS, default=None)
        experiment.add_argument('--fixed-set', action='store_true',
                                help='One set per point, referenced against its exact success probability')
        _add_scenario_options(experiment, nargs='+')
        _add_variant_options(experiment)
        _add_seed_option(experiment)

        adversarial = verbs.add_parser('adversarial', help='Write the single-symbol adversarial set')
        adversarial.add_argument('--l', type=int, required=True)
        adversarial.add_argument('--n', type=int, required=True)
        adversarial.add_argument('--out', default=None, help='Word file to write (stdout when absent)')
        adversarial.add_argument('--queries', default=None, help='Query file of single erasures hiding b')

    def handle(self, *args, **options):
        level = _VERBOSITY_LEVELS.get(options['verbosity'], logging.DEBUG)
        logging.getLogger('assocmem').setLevel(level)

        handler = getattr(self, 'handle_{}'.format(options['verb']))
        try:
            handler(options)
        except AssocmemError as error:
            returncode = 2 if error.error_code == AssocmemError.RESOURCE_LIMIT else 1
            logger.error('{} failed in {}: {}'.format(options['verb'], error.source, error))
            raise CommandError(str(error), returncode=returncode)
        except ValueError as error:
            raise CommandError(str(error), returncode=1)
        except OSError as error:
            raise CommandError(str(error), returncode=1)

    def _write_lines(self, lines):
        for line in lines:
            self.stdout.write(line)

    def _write_words(self, path, words, n, l):
        if path is None:
            self._write_lines(['{} {}'.format(n, l)] + [str(word) for word in words])
        else:
            write_word_file(path, words, n, l)
            logger.info('Wrote {} words to {}'.format(len(words), path))

    def _build_memory(self, word_set, options):
        backend = options['backend']
        if backend == 'exact':
            return exact_ml.store(word_set)
        elif backend == 'trie':
            return trie_ml.build(word_set, TRIE_MODE_CHOICES[options['trie_mode']])
        elif backend == 'hopfield':
            return hopfield.store(word_set, DIAGONAL_CHOICES[options['diag']])
        elif backend == 'gbnn':
            return gbnn.store(word_set, SELF_PAIR_CHOICES[options['self_pairs']], options['gamma'])
        else:
            raise RuntimeError('Undetected mistake in backend {}'.format(backend))

    def _retrieve(self, memory, query, rng, word_set, options):
        backend = options['backend']
        if backend == 'exact':
            return memory.retrieve(query, tie_policy=TIE_POLICY_CHOICES[options['ties']], seed=rng)
        elif backend == 'trie':
            return memory.retrieve(query, path_policy=PATH_POLICY_CHOICES[options['paths']], seed=rng)
        elif backend == 'hopfield':
            return memory.retrieve_word(query, options['max_iters'], options['clamp'], stored=word_set)
        elif backend == 'gbnn':
            return memory.retrieve(query, options['iters'], rng, stored=word_set)
        else:
            raise RuntimeError('Undetected mistake in backend {}'.format(backend))

    @staticmethod
    def _check_backend_options(options):
        if options['max_iters'] is not None and options['max_iters'] < 1:
            raise ValueError('--max-iters must be at least 1')
        if options['iters'] is not None and options['iters'] < 1:
            raise ValueError('--iters must be at least 1')

    def _stats(self, memory, options):
        backend = options['backend']
        if backend == 'exact':
            stats = {'memory_bits': memory.storage_bits(), 'store_op_count': memory.m * memory.n}
        elif backend == 'trie':
            stats = memory.stats()
        elif backend == 'hopfield':
            stats = {'neuron_count': memory.neuron_count, 'memory_bits': memory.memory_bits(),
                     'store_op_count': memory.store_op_count}
        else:
            stats = {'neuron_count': memory.n * memory.l, 'memory_bits': memory.memory_bits(),
                     'dense_bits': memory.memory_bits(dense=True), 'store_op_count': memory.store_op_count}
        fields = ['backend'] + list(stats)
        return [_csv_line(fields), _csv_line([backend] + list(stats.values()))]

    def handle_build(self, options):
        self._check_backend_options(options)
        if options['input'] is not None:
            word_set = read_word_file(options['input'])
        else:
            for flag in ('l', 'n', 'm'):
                if options[flag] is None:
                    raise ValueError('--{} is required unless --in is given'.format(flag))
            word_set = sample_word_set(options['l'], options['n'], options['m'], make_rng(options['seed'], 0))

        queries_path = options['queries']
        r = options['r'] if options['r'] is not None else 0
        count = options['count'] if options['count'] is not None else word_set.m
        if not 0 <= r <= word_set.n:
            raise ValueError('--r {} outside [0, {}]'.format(r, word_set.n))
        if count < 0:
            raise ValueError('--count {} is negative'.format(count))

        if options['input'] is None:
            self._write_words(options['out'], word_set.words, word_set.n, word_set.l)
        if queries_path is not None:
            rng = make_rng(options['seed'], 1)
            queries = [erase(word_set.word(rng.integers(word_set.m)), r, rng) for _ in range(count)]
            write_word_file(queries_path, queries, word_set.n, word_set.l)
            logger.info('Wrote {} queries with {} erasures to {}'.format(count, r, queries_path))
        if options['stats']:
            self._write_lines(self._stats(self._build_memory(word_set, options), options))

    def handle_query(self, options):
        self._check_backend_options(options)
        word_set = read_word_file(options['words'])
        n, l, queries = read_query_file(options['queries'])
        if (n, l) != (word_set.n, word_set.l):
            raise ValueError('Query file header "{} {}" does not match word file header "{} {}"'.format(
                n, l, word_set.n, word_set.l))
        if options['backend'] == 'gbnn' and options['gamma'] is not None and options['gamma'] < n * l:
            raise ValueError('--gamma {} is below n * l = {}'.format(options['gamma'], n * l))

        memory = self._build_memory(word_set, options)
        rng = make_rng(options['seed'])
        for query in queries:
            self.stdout.write(self._retrieve(memory, query, rng, word_set, options).format_line())

    def handle_analytic(self, options):
        quantity = options['quantity']
        l, n, m, r, p0 = (options[key] for key in ('l', 'n', 'm', 'r', 'p0'))
        r = 0 if r is None else r
        p0 = 0.01 if p0 is None else p0
        mode = options['mode']
        if l is None or n is None:
            raise ValueError('--l and --n are required')
        if m is None and quantity != 'capacity':
            raise ValueError('--m is required for {}'.format(quantity))

        if quantity == 'eq2':
            params = analytics.ScenarioParams(l, n, m, r, p0)
            success = float(analytics.expected_success_exact(params, mode))
            error = float(analytics.residual_error(params, mode))
            fields = ['l', 'n', 'm', 'r', 'expected_success', 'residual_error', 'log10_error']
            values = [l, n, m, r, success, error, analytics.log10_probability(max(error, 0.0))]
        elif quantity == 'eq4':
            params = analytics.ScenarioParams(l, n, m, r, p0)
            success = analytics.expected_success_asymptotic(params)
            fields = ['l', 'n', 'm', 'r', 'expected_success_asymptotic', 'residual_error_asymptotic']
            values = [l, n, m, r, success, 1.0 - success]
        elif quantity == 'capacity':
            estimate = analytics.capacity_estimate(l, n, r, p0)
            error = ''
            if 1 <= estimate <= l ** n:
                error = float(analytics.residual_error(analytics.ScenarioParams(l, n, estimate, r, p0), mode))
            fields = ['l', 'n', 'r', 'p0', 'm', 'residual_error_at_m']
            values = [l, n, r, p0, estimate, error]
        elif quantity == 'entropy':
            fields = ['l', 'n', 'm', 'entropy_bits', 'entropy_small_m', 'entropy_stirling', 'ordered_bits']
            values = [l, n, m, analytics.set_entropy_bits(l, n, m, mode), analytics.entropy_asymptotic_small_m(l, n, m),
                      analytics.entropy_stirling(l, n, m), analytics.ordered_list_bits(l, n, m)]
        elif quantity == 'ratio':
            c = l ** n / float(m)
            fields = ['l', 'n', 'm', 'c', 'entropy_constant_c', 'ratio']
            values = [l, n, m, c, analytics.entropy_asymptotic_constant_c(m, c),
                      analytics.ordered_to_unordered_ratio(c, n, l)]
        elif quantity == 'membits':
            fields = ['l', 'n', 'm', 'hnn_bits', 'gbnn_bits', 'ordered_bits', 'entropy_bits']
            values = [l, n, m, analytics.hnn_memory_bits(l, n, m), analytics.gbnn_memory_bits(l, n),
                      analytics.ordered_list_bits(l, n, m), analytics.set_entropy_bits(l, n, m, mode)]
        else:
            raise RuntimeError('Undetected mistake in analytic quantity {}'.format(quantity))
        self._write_lines([_csv_line(fields), _csv_line([harness.format_value(value) for value in values])])

    def handle_experiment(self, options):
        cfg = harness.ExperimentConfig.from_preset(
            options['name'], seed=options['seed'], trials=options['trials'], workers=options['workers'],
            backends=options['backends'], l=options['l'], n=options['n'], m=options['m'], r=options['r'],
            p0=options['p0'], fixed_set=options['fixed_set'] or None, pairs=options['pairs'],
            tie_policy=TIE_POLICY_CHOICES.get(options['ties']), trie_mode=TRIE_MODE_CHOICES.get(options['trie_mode']),
            path_policy=PATH_POLICY_CHOICES.get(options['paths']),
            diagonal_modes=_choices(DIAGONAL_CHOICES, options['diag']), hopfield_iters=options['max_iters'],
            clamp_known=options['clamp'] or None, self_pairs=_choices(SELF_PAIR_CHOICES, options['self_pairs']),
            gbnn_iters=options['iters'], gamma=options['gamma'])
        rows = harness.run_experiment(cfg)
        if options['out'] is None:
            buffer = io.StringIO()
            harness.write_csv(buffer, rows, cfg)
            self.stdout.write(buffer.getvalue(), ending='')
        else:
            with open(options['out'], 'w', newline='') as file:
                harness.write_csv(file, rows, cfg)
            logger.info('Wrote {} rows to {}'.format(len(rows), options['out']))

    def handle_adversarial(self, options):
        word_set = harness.adversarial_set(options['l'], options['n'])
        self._write_words(options['out'], word_set.words, word_set.n, word_set.l)
        if options['queries'] is not None:
            queries = [query for _, query in harness.hiding_queries(word_set)]
            write_word_file(options['queries'], queries, word_set.n, word_set.l)