import io
import math
import os
from unittest import mock, skipUnless

from django.test import SimpleTestCase, tag

from assocmem import analytics
from assocmem import configs
from assocmem import exact_ml
from assocmem import harness
from assocmem import trie_ml
from assocmem.core import AssocmemError, make_rng, sample_word_set
from assocmem.harness import ExperimentConfig

SLOW_TESTS = bool(os.environ.get('ASSOCMEM_SLOW_TESTS'))


def by_backend(rows):
    return {row.backend: row for row in rows}


def best_by_backend(rows, key, pick=min):
    """
    The row of each backend whose `key` column is best over its variants.
    """
    best = {}
    for row in rows:
        best[row.backend] = pick(best.get(row.backend, row), row, key=lambda candidate: getattr(candidate, key))
    return best


def csv_text(cfg):
    buffer = io.StringIO()
    harness.write_csv(buffer, harness.run_experiment(cfg), cfg)
    return buffer.getvalue()


class ExperimentConfigTests(SimpleTestCase):

    def test_points_skip_infeasible(self):
        cfg = ExperimentConfig(l=[2], n=[2], m=[2, 4, 5], r=[0, 2, 3])
        self.assertEqual(cfg.points(), [(2, 2, 2, 0), (2, 2, 2, 2), (2, 2, 4, 0), (2, 2, 4, 2)])

    def test_validation(self):
        with self.assertRaises(ValueError):
            ExperimentConfig(kind='speed')
        with self.assertRaises(ValueError):
            ExperimentConfig(trials=0)
        with self.assertRaises(ValueError):
            ExperimentConfig(backends=['bloom'])
        with self.assertRaises(ValueError):
            ExperimentConfig(seed=-3)
        with self.assertRaises(ValueError):
            ExperimentConfig(p0=1.5)
        with self.assertRaises(ValueError):
            ExperimentConfig(backends=['trie'], trie_mode='Sometimes')
        with self.assertRaises(ValueError):
            ExperimentConfig(backends=['hopfield'], hopfield_iters=[0])

    def test_from_preset(self):
        cfg = ExperimentConfig.from_preset('fig2', trials=10, seed=None, m=[500])
        self.assertEqual(cfg.name, 'fig2')
        self.assertEqual(cfg.kind, 'error')
        self.assertEqual(cfg.trials, 10)
        self.assertEqual(cfg.seed, 0)
        self.assertEqual(cfg.m, [500])
        self.assertEqual(cfg.backends, ['exact', 'gbnn', 'hopfield'])
        with self.assertRaises(ValueError):
            ExperimentConfig.from_preset('fig9')

    def test_every_preset_builds(self):
        for preset in configs.EXPERIMENT_PRESETS:
            cfg = ExperimentConfig.from_preset(preset)
            self.assertIn(cfg.kind, harness.EXPERIMENT_KINDS)

    def test_pairs_replace_product(self):
        cfg = ExperimentConfig(pairs=[(4, 2), [2, 3]], m=[2], r=[1])
        self.assertEqual(cfg.shapes(), [(4, 2), (2, 3)])
        self.assertEqual(cfg.points(), [(4, 2, 2, 1), (2, 3, 2, 1)])
        self.assertEqual((cfg.l, cfg.n), ([2, 4], [2, 3]))
        self.assertIn('sweep=pairs:4x2 2x3 m:[2] r:[1]', cfg.provenance())
        with self.assertRaises(ValueError):
            ExperimentConfig(pairs=[(4, 2, 1)])
        with self.assertRaises(ValueError):
            ExperimentConfig(pairs=[(1, 2)])

    def test_table1_preset(self):
        cfg = ExperimentConfig.from_preset('table1')
        self.assertEqual(cfg.shapes(), [(256, 4), (64, 10), (256, 12)])
        self.assertEqual(len(cfg.backend_variants()), 8)
        self.assertEqual(ExperimentConfig.from_preset('table1', l=[64], n=[10]).shapes(), [(64, 10)])
        self.assertEqual(ExperimentConfig.from_preset('table1', pairs=[(16, 4)]).shapes(), [(16, 4)])

    def test_fig2_preset_sweeps_network_variants(self):
        variants = {variant.variant() for variant in ExperimentConfig.from_preset('fig2').backend_variants()}
        self.assertEqual(len(variants), 9)
        summed = 'diag=Summed;iters={};clamp=0'.format(configs.HOPFIELD_MAX_ITERS)
        for expected in (summed, 'diag=Zeroed;iters=1;clamp=0',
                         'self=Included;iters=1;gamma=nl', 'self=Excluded;iters=3;gamma=nl'):
            self.assertIn(expected, variants)

    def test_variants_expand_option_lists(self):
        cfg = ExperimentConfig(backends=['hopfield', 'gbnn'], diagonal_modes=['Summed', 'Zeroed'],
                               hopfield_iters=[1, 10], gbnn_iters=[1, 2])
        variants = cfg.backend_variants()
        self.assertEqual([variant.name for variant in variants], ['hopfield'] * 4 + ['gbnn'] * 2)
        self.assertEqual(len({variant.variant() for variant in variants}), 6)

    def test_provenance(self):
        cfg = ExperimentConfig(backends=['exact', 'trie'], seed=7, trials=20, fixed_set=True, name='probe')
        lines = cfg.provenance()
        self.assertEqual(lines[0], 'experiment=probe')
        self.assertIn('seed=7', lines)
        self.assertIn('version={}'.format(configs.CSV_VERSION), lines)
        self.assertIn('fixed_set=1', lines)
        self.assertEqual(len([line for line in lines if line.startswith('backend=')]), 2)
        self.assertTrue(any('op_count_unit=trie nodes visited' in line for line in lines))


class ErrorExperimentTests(SimpleTestCase):

    def test_exact_matches_closed_form(self):
        cfg = ExperimentConfig.from_preset('calibrate', backends=['exact'])
        row, = harness.run_error_experiment(cfg)
        expected = float(analytics.residual_error(analytics.ScenarioParams(4, 4, 32, 1)))
        self.assertEqual(row.trials, 20000)
        self.assertAlmostEqual(row.analytic_error, expected, places=12)
        self.assertLessEqual(abs(row.word_error_rate - expected), 3 * math.sqrt(expected * (1 - expected) / 20000))

    def test_trie_agrees_with_exact(self):
        cfg = ExperimentConfig(backends=['exact', 'trie'], l=[4], n=[4], m=[32], r=[1, 2], trials=4000, seed=3)
        rows = harness.run_error_experiment(cfg)
        for r in (1, 2):
            exact, trie = [row for row in rows if row.r == r and row.backend in ('exact', 'trie')]
            spread = math.sqrt(exact.stderr ** 2 + trie.stderr ** 2)
            self.assertLessEqual(abs(exact.word_error_rate - trie.word_error_rate), 3 * spread + 1e-9,
                                 msg='r={}'.format(r))

    def test_no_erasure_never_fails(self):
        cfg = ExperimentConfig(backends=['exact', 'trie'], l=[2, 16], n=[4], m=[1, 10], r=[0], trials=100)
        for row in harness.run_error_experiment(cfg):
            self.assertEqual(row.word_error_rate, 0.0)
            self.assertEqual(row.stderr, 0.0)
            self.assertEqual(row.analytic_error, 0.0)
            self.assertEqual(row.log10_error, -math.inf)

    def test_networks_recall_a_single_word(self):
        cfg = ExperimentConfig(backends=['hopfield', 'gbnn'], l=[4], n=[4], m=[1], r=[0, 1, 2, 3], trials=50)
        for row in harness.run_error_experiment(cfg):
            self.assertEqual(row.word_error_rate, 0.0, msg=repr(row))

    def test_row_columns(self):
        cfg = ExperimentConfig(backends=['exact', 'gbnn'], l=[4], n=[3], m=[5], r=[1], trials=30, seed=2)
        rows = by_backend(harness.run_error_experiment(cfg))
        self.assertEqual(rows['exact'].memory_bits, analytics.ordered_list_bits(4, 3, 5))
        self.assertEqual(rows['gbnn'].memory_bits, analytics.gbnn_memory_bits(4, 3))
        self.assertEqual(rows['exact'].mean_op_count, 5 * 3)
        # One dense update over n * l neurons
        self.assertEqual(rows['gbnn'].mean_op_count, (3 * 4) ** 2)
        self.assertEqual(rows['gbnn'].variant, 'self=Included;iters=1;gamma=nl')

    def test_workers_do_not_change_results(self):
        options = dict(backends=['exact', 'trie', 'gbnn'], l=[4], n=[4], m=[8, 32], r=[1, 2], trials=97, seed=11)
        serial = csv_text(ExperimentConfig(workers=1, **options))
        parallel = csv_text(ExperimentConfig(workers=2, **options))
        self.assertEqual(serial, parallel)
        self.assertEqual(serial, csv_text(ExperimentConfig(workers=1, **options)))
        self.assertNotEqual(serial, csv_text(ExperimentConfig(workers=1, **dict(options, seed=12))))

    def test_fixed_set_reference(self):
        cfg = ExperimentConfig(backends=['exact'], l=[2], n=[4], m=[6], r=[2], trials=3000, seed=5, fixed_set=True)
        row, = harness.run_error_experiment(cfg)
        word_set = sample_word_set(2, 4, 6, make_rng(5, 0))
        expected = float(1 - exact_ml.exact_success_probability(word_set, 2))
        self.assertAlmostEqual(row.analytic_error, expected, places=12)
        self.assertLessEqual(abs(row.word_error_rate - expected), 3 * math.sqrt(expected * (1 - expected) / 3000))

    def test_fixed_set_without_reference(self):
        cfg = ExperimentConfig(backends=['exact'], l=[16], n=[6], m=[500], r=[3], trials=5, fixed_set=True)
        with mock.patch.object(configs, 'ENUMERATION_BUDGET', 10):
            row, = harness.run_error_experiment(cfg)
        self.assertIsNone(row.analytic_error)

    def test_resource_limits(self):
        eager = ExperimentConfig(backends=['trie'], trie_mode=trie_ml.EAGER, l=[2], n=[configs.EAGER_TRIE_MAX_N + 1],
                                 m=[4], r=[1], trials=1)
        with self.assertRaises(AssocmemError) as context:
            harness.run_error_experiment(eager)
        self.assertEqual(context.exception.error_code, AssocmemError.RESOURCE_LIMIT)
        self.assertIn('n={}'.format(configs.EAGER_TRIE_MAX_N + 1), str(context.exception))

        clique = ExperimentConfig(backends=['gbnn'], l=[256], n=[40], m=[4], r=[1], trials=1)
        with self.assertRaises(AssocmemError) as context:
            harness.run_error_experiment(clique)
        self.assertEqual(context.exception.error_code, AssocmemError.RESOURCE_LIMIT)

    def test_gamma_below_neuron_count(self):
        cfg = ExperimentConfig(backends=['gbnn'], l=[4], n=[4], m=[4], r=[1], trials=1, gamma=8)
        with self.assertRaises(ValueError):
            harness.run_error_experiment(cfg)

    def test_reduced_error_ordering(self):
        cfg = ExperimentConfig.from_preset('fig2', m=[2000, 8000], trials=300, seed=1)
        rows = harness.run_error_experiment(cfg)
        self.assertEqual(len(rows), 2 * 9)
        for m in (2000, 8000):
            errors = best_by_backend([row for row in rows if row.m == m], 'word_error_rate')
            self.assertLessEqual(errors['exact'].word_error_rate, errors['gbnn'].word_error_rate,
                                 msg='m={}'.format(m))
            self.assertLess(errors['gbnn'].word_error_rate, errors['hopfield'].word_error_rate,
                            msg='m={}'.format(m))
        exact = [row for row in rows if row.backend == 'exact']
        self.assertLess(exact[0].analytic_error, exact[1].analytic_error)

    @tag('slow')
    @skipUnless(SLOW_TESTS, 'set ASSOCMEM_SLOW_TESTS to run full-scale experiments')
    def test_full_error_ordering(self):
        rows = harness.run_error_experiment(ExperimentConfig.from_preset('fig2', workers=configs.DEFAULT_WORKERS))
        for m in (500, 2000, 8000, 32000):
            errors = best_by_backend([row for row in rows if row.m == m], 'word_error_rate')
            self.assertLessEqual(errors['exact'].word_error_rate, errors['gbnn'].word_error_rate + 0.02)
            self.assertLessEqual(errors['gbnn'].word_error_rate, errors['hopfield'].word_error_rate + 0.04)
            exact = errors['exact']
            self.assertLessEqual(abs(exact.word_error_rate - exact.analytic_error), 3 * exact.stderr + 1e-12)


class AnalyticExperimentTests(SimpleTestCase):

    def test_fig1_curves(self):
        rows = harness.run_experiment(ExperimentConfig.from_preset('fig1'))
        self.assertEqual(len(rows), 3 * 25)
        curves = {r: [row.residual_error for row in rows if row.r == r] for r in (1, 2, 3)}
        for r, curve in curves.items():
            for smaller, larger in zip(curve, curve[1:]):
                self.assertLessEqual(smaller, larger + 1e-12, msg='r={}'.format(r))
        for r in (1, 2):
            for low, high in zip(curves[r], curves[r + 1]):
                self.assertLessEqual(low, high + 1e-12)

    def test_memory_rows(self):
        rows = harness.run_experiment(ExperimentConfig.from_preset('fig3'))
        self.assertTrue(rows)
        for row in rows:
            self.assertLessEqual(row.entropy_bits, row.ordered_bits * (1 + 1e-12), msg=repr(row))
            self.assertEqual(row.gbnn_bits, analytics.gbnn_memory_bits(row.l, row.n))
        self.assertFalse(any(row.m > row.l ** row.n for row in rows))

        row, = harness.run_experiment(ExperimentConfig(kind='memory', l=[2], n=[2], m=[2]))
        self.assertAlmostEqual(row.entropy_bits, math.log2(6), delta=1e-12)
        self.assertEqual(row.ordered_bits, 4)


class CapacityExperimentTests(SimpleTestCase):

    def test_reduced_capacity_ordering(self):
        cfg = ExperimentConfig(kind='capacity', backends=['hopfield', 'gbnn'], l=[16], n=[6], r=[1], p0=0.05,
                               trials=200, seed=4)
        rows = by_backend(harness.run_capacity_experiment(cfg))
        self.assertGreater(rows['gbnn'].max_m, rows['hopfield'].max_m)
        self.assertGreater(rows['hopfield'].ratio, rows['gbnn'].ratio)
        self.assertGreater(rows['gbnn'].ratio, 1)
        self.assertTrue(rows['gbnn'].bracketed)
        gbnn_row = rows['gbnn']
        self.assertEqual(gbnn_row.memory_bits, analytics.gbnn_memory_bits(16, 6))
        self.assertAlmostEqual(gbnn_row.ratio, gbnn_row.memory_bits / gbnn_row.entropy_bits)

    def test_search_brackets_the_target(self):
        cfg = ExperimentConfig(kind='capacity', backends=['exact'], l=[4], n=[4], r=[1], p0=0.05, trials=2000,
                               seed=6)
        backend, = cfg.backend_variants()
        max_m, bracketed = harness.max_set_size(backend, 4, 4, 1, cfg)
        self.assertTrue(bracketed)
        self.assertLessEqual(harness._probe_error(backend, 4, 4, 1, max_m, cfg, ()), cfg.p0)
        # The closed form crosses p0 = 0.05 between m = 9 and m = 10 for l = n = 4, r = 1
        self.assertGreaterEqual(max_m, 6)
        self.assertLessEqual(max_m, 13)

    def test_never_failing_backend(self):
        cfg = ExperimentConfig(kind='capacity', backends=['exact'], l=[2], n=[3], r=[0], trials=20)
        row, = harness.run_capacity_experiment(cfg)
        self.assertEqual(row.max_m, 8)
        self.assertFalse(row.bracketed)

    def test_paired_points(self):
        cfg = ExperimentConfig(kind='capacity', backends=['exact'], pairs=[(4, 2), (2, 3)], r=[0], trials=10)
        rows = harness.run_capacity_experiment(cfg)
        self.assertEqual([(row.l, row.n, row.max_m) for row in rows], [(2, 3, 8), (4, 2, 16)])

    @tag('slow')
    @skipUnless(SLOW_TESTS, 'set ASSOCMEM_SLOW_TESTS to run full-scale experiments')
    def test_full_capacity_ordering(self):
        cfg = ExperimentConfig.from_preset('table1', pairs=[(64, 10)], workers=configs.DEFAULT_WORKERS)
        rows = best_by_backend(harness.run_capacity_experiment(cfg), 'max_m', pick=max)
        self.assertGreater(rows['gbnn'].max_m, rows['hopfield'].max_m)
        self.assertGreater(rows['hopfield'].ratio, rows['gbnn'].ratio)
        self.assertGreater(rows['gbnn'].ratio, 1)


class ComplexityExperimentTests(SimpleTestCase):

    def test_op_count_scaling(self):
        cfg = ExperimentConfig(kind='complexity', backends=['exact', 'trie'], l=[4], n=[4, 6, 8, 10, 12],
                               m=[10, 100], r=[1], trials=40, seed=8)
        rows = harness.run_complexity_experiment(cfg)
        for row in rows:
            if row.backend == 'exact':
                self.assertEqual(row.mean_op_count, row.m * row.n)
                self.assertEqual(row.store_op_count, row.m * row.n)
            else:
                self.assertEqual(row.store_op_count, row.m * (row.n + 1) * 2 ** row.n)
        for m in (10, 100):
            ratios = [row.ops_per_n for row in rows if row.backend == 'trie' and row.m == m]
            mean = sum(ratios) / len(ratios)
            for ratio in ratios:
                self.assertLessEqual(abs(ratio - mean) / mean, 0.2)

    def test_growth_within_series(self):
        cfg = ExperimentConfig(kind='complexity', backends=['exact'], l=[4], n=[4, 8], m=[10], r=[1], trials=5)
        first, second = harness.run_complexity_experiment(cfg)
        self.assertIsNone(first.growth)
        self.assertEqual(second.growth, 2.0)

    def test_clique_cost_quadruples_with_alphabet(self):
        cfg = ExperimentConfig(kind='complexity', backends=['gbnn'], l=[4, 8], n=[4], m=[10], r=[1], trials=5)
        small, large = harness.run_complexity_experiment(cfg)
        self.assertEqual(large.mean_op_count, 4 * small.mean_op_count)

    def test_csv_output(self):
        cfg = ExperimentConfig(kind='complexity', backends=['trie'], l=[4], n=[4], m=[10], r=[1], trials=5,
                               name='probe')
        lines = csv_text(cfg).splitlines()
        comments = [line for line in lines if line.startswith('# ')]
        self.assertEqual(comments[0], '# experiment=probe')
        header = lines[len(comments)]
        self.assertEqual(header.split(','), list(harness.ComplexityRow.FIELDS))
        self.assertEqual(len(lines), len(comments) + 2)
        self.assertTrue(lines[-1].startswith('trie,4,4,10,1,5,'))


class AdversarialSetTests(SimpleTestCase):

    def test_sizes(self):
        self.assertEqual(len(harness.adversarial_set(2, 3)), 6)
        self.assertEqual(len(harness.adversarial_set(3, 4)), 4 * 3 * 2)
        self.assertEqual(sorted(harness.adversarial_set(2, 2).words), [(0, 1), (1, 0)])

    def test_arguments(self):
        with self.assertRaises(ValueError):
            harness.adversarial_set(1, 4)
        with self.assertRaises(ValueError):
            harness.adversarial_set(2, 1)

    def test_hiding_queries(self):
        word_set = harness.adversarial_set(3, 4)
        pairs = harness.hiding_queries(word_set)
        self.assertEqual(len(pairs), len(word_set))
        for word, query in pairs:
            self.assertEqual(query.count(None), 1)
            hidden = query.index(None)
            self.assertEqual(word.count(word[hidden]), 1)
