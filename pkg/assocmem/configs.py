import os

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

from . import __version__


def _setting(name, default):
    """
    Read an `ASSOCMEM_<name>` override from Django settings, falling back to the default when the setting is
    absent or when no settings module is configured (plain library use).

    :type name: str
    :param name: Setting name without the `ASSOCMEM_` prefix
    :type default: Any
    :param default: Default value
    :rtype: Any
    :return: Configured value
    """
    try:
        return getattr(settings, 'ASSOCMEM_{}'.format(name), default)
    except ImproperlyConfigured:
        return default


# Maximum number of (word, erasure pattern) pairs enumerated by the exact success oracle
ENUMERATION_BUDGET = _setting('ENUMERATION_BUDGET', 10 ** 7)

# Universes up to this size are sampled by index enumeration and evaluated with exact integers
EXACT_SAMPLING_MAX_UNIVERSE = _setting('EXACT_SAMPLING_MAX_UNIVERSE', 2 ** 20)

# Longest product evaluated term by term in the log-domain hypergeometric tail
LOG_SPACE_MAX_TERMS = _setting('LOG_SPACE_MAX_TERMS', 10 ** 6)

EAGER_TRIE_MAX_N = _setting('EAGER_TRIE_MAX_N', 16)

HOPFIELD_MAX_ITERS = _setting('HOPFIELD_MAX_ITERS', 10)

GBNN_ITERATIONS = _setting('GBNN_ITERATIONS', 1)

# Largest neuron count accepted by the Hopfield and clique network backends in experiments
NETWORK_MAX_NEURONS = _setting('NETWORK_MAX_NEURONS', 8192)

# Capacity search: probe trials, bracket width and the largest m tried
TABLE_ONE_PROBE_TRIALS = _setting('TABLE_ONE_PROBE_TRIALS', 2000)
TABLE_ONE_WINDOW = _setting('TABLE_ONE_WINDOW', 0.2)
TABLE_ONE_MAX_M = _setting('TABLE_ONE_MAX_M', 2 ** 20)

DEFAULT_WORKERS = _setting('DEFAULT_WORKERS', os.cpu_count() or 1)

CSV_VERSION = __version__

BACKENDS = ('exact', 'trie', 'hopfield', 'gbnn')

# Named experiment sweeps. Every key can be overridden from the command line. Variant lists hold the values of
# hopfield.DIAGONAL_MODES and gbnn.SELF_PAIR_MODES.
EXPERIMENT_PRESETS = _setting('EXPERIMENT_PRESETS', {
    'fig1': {
        'kind': 'fig1',
        'l': [256],
        'n': [4],
        'r': [1, 2, 3],
        'm': [2 ** k for k in range(0, 25)],
    },
    'fig2': {
        'kind': 'error',
        'backends': ['exact', 'gbnn', 'hopfield'],
        'l': [256],
        'n': [4],
        'r': [2],
        'm': [500, 2000, 8000, 32000],
        'trials': 5000,
        'diagonal_modes': ['Summed', 'Zeroed'],
        'hopfield_iters': [1, HOPFIELD_MAX_ITERS],
        'self_pairs': ['Included', 'Excluded'],
        'gbnn_iters': [1, 3],
    },
    'calibrate': {
        'kind': 'error',
        'backends': ['exact', 'trie'],
        'l': [4],
        'n': [4],
        'r': [1],
        'm': [32],
        'trials': 20000,
    },
    'fig3': {
        'kind': 'memory',
        'l': [2, 16, 256],
        'n': [4, 8, 16],
        'm': [2 ** k for k in range(0, 21)],
    },
    'table1': {
        'kind': 'capacity',
        'backends': ['hopfield', 'gbnn'],
        'pairs': [(256, 4), (64, 10), (256, 12)],
        'r': [1],
        'p0': 0.01,
        'trials': TABLE_ONE_PROBE_TRIALS,
        'diagonal_modes': ['Summed', 'Zeroed'],
        'hopfield_iters': [1, HOPFIELD_MAX_ITERS],
        'self_pairs': ['Included', 'Excluded'],
        'gbnn_iters': [1, 3],
    },
    'table2': {
        'kind': 'complexity',
        'backends': ['exact', 'trie', 'hopfield', 'gbnn'],
        'l': [4],
        'n': [4, 6, 8, 10, 12],
        'm': [10, 100, 1000],
        'r': [1],
        'trials': 200,
    },
})
