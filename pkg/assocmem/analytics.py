"""
Closed-form predictions for maximum likelihood associative memories on uniformly drawn sets: expected success
probability (exact and asymptotic), capacity at a target residual error, set entropy in its exact and asymptotic
forms, and the memory models of the Hopfield and clique networks.

Binomials such as C(l^n, l^r) overflow every fixed-width type, so each function evaluates either with exact
integers (`EXACT_BIG_INT`) or in the log domain (`LOG_GAMMA`). With no mode given, exact integers are used while
l^n stays below `configs.EXACT_SAMPLING_MAX_UNIVERSE`.
"""
import logging
import math
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

from . import configs

logger = logging.getLogger(__name__)

# Evaluation modes
EXACT_BIG_INT = 'ExactBigInt'
LOG_GAMMA = 'LogGamma'

MODES = (EXACT_BIG_INT, LOG_GAMMA)

_LN2 = math.log(2)


class ScenarioParams:
    """
    Alphabet size l, word length n, set size m, erasure count r and target residual error p0.
    """

    def __init__(self, l, n, m, r=0, p0=0.01):
        if l is None or n is None or m is None:
            raise ValueError('l, n and m are required')
        if l < 2:
            raise ValueError('Alphabet size {} is below 2'.format(l))
        if n < 1:
            raise ValueError('Word length {} is below 1'.format(n))
        if m < 1 or m > l ** n:
            raise ValueError('Set size {} outside [1, {}]'.format(m, l ** n))
        if r < 0 or r > n:
            raise ValueError('Erasure count {} outside [0, {}]'.format(r, n))
        if not 0 < p0 < 1:
            raise ValueError('Target error {} outside (0, 1)'.format(p0))
        self.l = l
        self.n = n
        self.m = m
        self.r = r
        self.p0 = p0

    @property
    def universe(self):
        return self.l ** self.n

    def __repr__(self):
        return 'ScenarioParams(l={}, n={}, m={}, r={}, p0={})'.format(self.l, self.n, self.m, self.r, self.p0)


def _resolve_mode(mode, universe):
    if mode is None:
        if universe <= configs.EXACT_SAMPLING_MAX_UNIVERSE:
            return EXACT_BIG_INT
        logger.debug('Universe {} above {}, evaluating in log-gamma mode'.format(
            universe, configs.EXACT_SAMPLING_MAX_UNIVERSE))
        return LOG_GAMMA
    if mode not in MODES:
        raise ValueError('Unrecognised evaluation mode {}'.format(mode))
    return mode


def log_comb(total, k):
    """
    Natural log of C(total, k) in floating point, summing log terms while the product is short enough and falling
    back to log-gamma differences otherwise.

    :type total: int
    :param total: Population size
    :type k: int
    :param k: Number drawn
    :rtype: float
    :return: log C(total, k), -inf when k is outside [0, total]
    """
    if k < 0 or k > total:
        return -math.inf
    k = min(k, total - k)
    if k == 0:
        return 0.0
    if k <= configs.LOG_SPACE_MAX_TERMS:
        terms = float(total) - np.arange(k, dtype=float)
        return float(np.sum(np.log(terms)) - gammaln(k + 1))
    return float(gammaln(total + 1) - gammaln(k + 1) - gammaln(total - k + 1))


def hypergeometric_miss_log(universe, matches, m):
    """
    log of C(universe - m, matches) / C(universe, matches), the probability that none of `matches` given words is
    among m words drawn without replacement. Evaluated as the sum over k < m of log((universe - matches - k) /
    (universe - k)), or with log-gamma for products longer than `LOG_SPACE_MAX_TERMS`.

    :rtype: float
    :return: Log probability, -inf when the event is impossible
    """
    if m > universe - matches:
        return -math.inf
    if m <= configs.LOG_SPACE_MAX_TERMS:
        k = np.arange(m, dtype=float)
        return float(np.sum(np.log1p(-matches / (float(universe) - k))))
    return float(gammaln(universe - matches + 1) - gammaln(universe - matches - m + 1)
                 - gammaln(universe + 1) + gammaln(universe - m + 1))


def _hypergeometric_miss_exact(universe, matches, m):
    # C(N - m, K) / C(N, K) == C(N - K, m) / C(N, m); use the side with the shorter binomials
    if m <= matches:
        return Fraction(math.comb(universe - matches, m), math.comb(universe, m))
    return Fraction(math.comb(universe - m, matches), math.comb(universe, matches))


def expected_success_exact(p, mode=None):
    """
    Expected success probability of the ML memory over uniformly drawn sets of m words with exactly r erasures:

        E[P_S(f*)] = (l^(n-r) / m) * (1 - C(l^n - m, l^r) / C(l^n, l^r))

    :type p: ScenarioParams
    :param p: Scenario
    :type mode: str
    :param mode: `EXACT_BIG_INT`, `LOG_GAMMA` or None for automatic
    :rtype: fractions.Fraction or float
    :return: Exact rational with `EXACT_BIG_INT`, float in [0, 1] with `LOG_GAMMA`
    """
    mode = _resolve_mode(mode, p.universe)
    matches = p.l ** p.r
    if mode == EXACT_BIG_INT:
        return Fraction(p.l ** (p.n - p.r), p.m) * (1 - _hypergeometric_miss_exact(p.universe, matches, p.m))

    hit = -math.expm1(hypergeometric_miss_log(p.universe, matches, p.m))
    return min(max(float(p.l ** (p.n - p.r)) / p.m * hit, 0.0), 1.0)


def residual_error(p, mode=None):
    """
    :type p: ScenarioParams
    :param p: Scenario
    :type mode: str
    :param mode: Evaluation mode
    :rtype: fractions.Fraction or float
    :return: 1 - E[P_S(f*)]
    """
    return 1 - expected_success_exact(p, mode)


def expected_success_asymptotic(p):
    """
    Large-n approximation (l^(n-r) / m) * (1 - exp(-m * l^(r-n))), valid while m is negligible against
    l^n - l^r. The caller judges the regime.

    :type p: ScenarioParams
    :param p: Scenario
    :rtype: float
    :return: Approximate expected success probability
    """
    x = p.m / float(p.l ** (p.n - p.r))
    return -math.expm1(-x) / x


def capacity_estimate(l, n, r, p0):
    """
    :rtype: int
    :return: round(2 * p0 * l^(n-r)), the set size reaching residual error about p0
    """
    if not 0 < p0 < 1:
        raise ValueError('Target error {} outside (0, 1)'.format(p0))
    return int(round(2 * p0 * l ** (n - r)))


def set_entropy_bits(l, n, m, mode=None):
    """
    :rtype: float
    :return: H = log2 C(l^n, m), bits needed to represent an unordered set of m words
    """
    universe = l ** n
    if m < 0 or m > universe:
        raise ValueError('Set size {} outside [0, {}]'.format(m, universe))
    if _resolve_mode(mode, universe) == EXACT_BIG_INT:
        return math.log2(math.comb(universe, m))
    return log_comb(universe, m) / _LN2


def entropy_asymptotic_small_m(l, n, m):
    """
    :rtype: float
    :return: m * n * log2 l, the entropy when m is negligible against l^n
    """
    return m * n * math.log2(l)


def entropy_stirling(l, n, m):
    """
    Stirling estimate N log2 N - m log2 m - (N - m) log2 (N - m), N = l^n, rearranged to avoid cancellation.

    :rtype: float
    :return: Approximate entropy in bits
    """
    universe = l ** n
    if m < 0 or m > universe:
        raise ValueError('Set size {} outside [0, {}]'.format(m, universe))
    if m == 0 or m == universe:
        return 0.0
    nats = m * math.log(universe - m) - universe * math.log1p(-m / universe) - m * math.log(m)
    return nats / _LN2


def _constant_c_bracket(c):
    if c <= 1:
        raise ValueError('c = l^n / m must exceed 1, got {}'.format(c))
    return c * math.log2(c) - c * math.log2(c - 1) + math.log2(c - 1)


def entropy_asymptotic_constant_c(m, c):
    """
    :type m: int
    :param m: Set size
    :type c: float
    :param c: l^n / m, held constant
    :rtype: float
    :return: m * (c log2 c - c log2 (c - 1) + log2 (c - 1))
    """
    return m * _constant_c_bracket(c)


def ordered_to_unordered_ratio(c, n, l):
    """
    :rtype: float
    :return: Bits per word of the unordered set over bits per word of the ordered list, at constant c
    """
    return _constant_c_bracket(c) / (n * math.log2(l))


def ordered_list_bits(l, n, m):
    """
    :rtype: int
    :return: m * n * ceil(log2 l), the size of the stored words written out one after another
    """
    return m * n * (l - 1).bit_length()


def hnn_weight_bits(neurons, m):
    """
    :rtype: int
    :return: C(neurons, 2) * ceil(log2 (2m + 1)), weights in [-m, m], upper triangle only
    """
    return math.comb(neurons, 2) * (2 * m).bit_length()


def hnn_memory_bits(l, n, m):
    """
    :rtype: int
    :return: Upper-triangular weight bits of a Hopfield network storing m words over n * ceil(log2 l) neurons
    """
    return hnn_weight_bits(n * max((l - 1).bit_length(), 1), m)


def gbnn_memory_bits(l, n):
    """
    :rtype: int
    :return: C(n, 2) * l^2, the cross-cluster connections of a clique network
    """
    return math.comb(n, 2) * l * l


def log10_probability(probability):
    """
    :rtype: float
    :return: log10 of a probability, -inf for 0
    """
    probability = float(probability)
    if probability < 0:
        raise ValueError('Negative probability {}'.format(probability))
    return math.log10(probability) if probability > 0 else -math.inf
