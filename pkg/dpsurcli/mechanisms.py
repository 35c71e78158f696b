#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: mechanisms.py
#
# Copyright 2026 Willem Kuipers
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
#  of this software and associated documentation files (the "Software"), to
#  deal in the Software without restriction, including without limitation the
#  rights to use, copy, modify, merge, publish, distribute, sublicense, and/or
#  sell copies of the Software, and to permit persons to whom the Software is
#  furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in
#  all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
#  IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
#  FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
#  AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
#  LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING
#  FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
#  DEALINGS IN THE SOFTWARE.
#

"""
Randomization used by the selective update step.

Clipping of loss differences, the noisy threshold test that accepts or
rejects a candidate model, the Gaussian mechanism with selective release
and the Renyi divergence of the two truncated normals that certifies it.

Randomized functions take an explicit :class:`numpy.random.Generator`; a
generator must not be shared between threads.

.. _Google Python Style Guide:
   https://google.github.io/styleguide/pyguide.html

"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy import special, stats

from dpsurcli.conf import (CDF_SATURATION,
                           DEFAULT_BETA,
                           DEFAULT_VALID_CLIP_BOUND,
                           MAX_RELEASE_DRAWS,
                           MIN_WINDOW_MASS)
from dpsurcli.dpsurcliexceptions import (InvalidParameterError,
                                         NonFiniteValueError,
                                         EmptyWindowError)

__author__ = '''Willem Kuipers <willem@kuipers.co.uk>'''
__docformat__ = '''google'''
__date__ = '''17-10-2026'''
__copyright__ = '''Copyright 2026, Willem Kuipers'''
__credits__ = ["Willem Kuipers"]
__license__ = '''MIT'''
__maintainer__ = '''Willem Kuipers'''
__email__ = '''<willem@kuipers.co.uk>'''
__status__ = '''Development'''  # "Prototype", "Development", "Production".


# This is the main prefix used for logging
LOGGER_BASENAME = '''dpsurcli.mechanisms'''
LOGGER = logging.getLogger(LOGGER_BASENAME)
LOGGER.addHandler(logging.NullHandler())


class ClipMode(str, Enum):
    MINIMAL = 'minimal'
    INTERVAL = 'interval'


class LossSign(str, Enum):
    NEGATIVE = 'negative'
    POSITIVE = 'positive'


class DivergenceDirection(str, Enum):
    ZERO_VS_MU = 'zero_vs_mu'
    MU_VS_ZERO = 'mu_vs_zero'


class ThresholdTest(NamedTuple):
    accepted: bool
    noisy_value: float


@dataclass(frozen=True)
class ValidationMechanismSpec:
    """Clipping bound, noise multiplier and threshold of the validation test.

    A noise multiplier of zero turns the test into a plain sign test; such a
    test gives no privacy and cannot be accounted for.
    """

    clip_bound: float = DEFAULT_VALID_CLIP_BOUND
    noise_multiplier: float = 1.0
    threshold_beta: float = DEFAULT_BETA
    clipping: ClipMode = ClipMode.MINIMAL

    def __post_init__(self):
        if not self.clip_bound > 0 or not math.isfinite(self.clip_bound):
            raise InvalidParameterError(f'Clip bound must be positive, got {self.clip_bound}')
        if not self.noise_multiplier >= 0 or not math.isfinite(self.noise_multiplier):
            raise InvalidParameterError(f'Noise multiplier cannot be negative, got {self.noise_multiplier}')
        if math.isnan(self.threshold_beta):
            raise InvalidParameterError('Threshold parameter beta is not a number')
        object.__setattr__(self, 'clipping', ClipMode(self.clipping))

    @property
    def threshold(self):
        return self.threshold_beta * self.clip_bound

    @property
    def sensitivity(self):
        return 2 * self.clip_bound

    @property
    def noise_std(self):
        return self.sensitivity * self.noise_multiplier

    def clip(self, delta_e):
        return minimal_clip(delta_e, self.clip_bound, interval=self.clipping is ClipMode.INTERVAL)


@dataclass(frozen=True)
class TruncatedGaussianSpec:
    """Normal distribution of ``mean`` and ``scale`` restricted to [lower, upper]."""

    mean: float
    scale: float
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if not self.scale > 0:
            raise InvalidParameterError(f'Scale must be positive, got {self.scale}')
        if not self.lower < self.upper:
            raise InvalidParameterError(f'Empty interval [{self.lower}, {self.upper}]')

    @property
    def distribution(self):
        return stats.truncnorm((self.lower - self.mean) / self.scale,
                               (self.upper - self.mean) / self.scale,
                               loc=self.mean,
                               scale=self.scale)


def truncated_normal_pdf(values, spec):
    """Density of the TruncatedGaussianSpec ``spec`` at ``values``, zero outside its interval."""
    return spec.distribution.pdf(values)


def truncated_normal_cdf(values, spec):
    return spec.distribution.cdf(values)


def truncated_normal_mean(spec):
    return float(spec.distribution.mean())


def std_normal_cdf(x):
    """Standard normal CDF, saturating to 0 and 1 beyond |x| > 40.

    Accepts scalars or arrays; scalars come back as float.
    """
    values = np.asarray(x, dtype=float)
    result = np.where(values > CDF_SATURATION,
                      1.0,
                      np.where(values < -CDF_SATURATION, 0.0, special.ndtr(values)))
    return float(result) if result.ndim == 0 else result


def log_window_mass(lower, upper):
    """log(Phi(upper) - Phi(lower)) for standardized bounds.

    Windows lying in the upper tail are mirrored so the difference is taken
    between two small numbers instead of two numbers close to one.
    """
    if not lower < upper:
        raise InvalidParameterError(f'Empty window [{lower}, {upper}]')
    if lower > 0:
        lower, upper = -upper, -lower
    log_upper = float(special.log_ndtr(upper))
    log_lower = float(special.log_ndtr(lower))
    if log_lower == -math.inf:
        return log_upper
    if log_lower >= log_upper:
        return -math.inf
    return log_upper + math.log1p(-math.exp(log_lower - log_upper))


def minimal_clip(delta_e, clip_bound, interval=False):
    """Clips a loss difference.

    By default the difference is discretized to its sign times the bound,
    zero counting as positive. With ``interval`` the difference is clamped
    to [-clip_bound, clip_bound] instead.
    """
    if not clip_bound > 0:
        raise InvalidParameterError(f'Clip bound must be positive, got {clip_bound}')
    if not math.isfinite(delta_e):
        raise NonFiniteValueError(f'Loss difference is not finite: {delta_e}')
    if interval:
        return min(max(float(delta_e), -clip_bound), clip_bound)
    return -clip_bound if delta_e < 0 else clip_bound


def interval_clip(delta_e, clip_bound):
    return minimal_clip(delta_e, clip_bound, interval=True)


def noisy_threshold_test(delta_e, spec, rng):
    """Clips ``delta_e``, adds N(0, (2 C_v sigma_v)^2) and compares with beta * C_v.

    One standard normal is drawn on every call, noiseless or not.
    """
    noise = rng.standard_normal()
    noisy_value = spec.clip(delta_e) + spec.noise_std * noise
    return ThresholdTest(bool(noisy_value < spec.threshold), float(noisy_value))


def threshold_test_frequency(delta_e, spec, rng, size):
    """Fraction of ``size`` independent threshold tests of ``delta_e`` that accept."""
    noisy = spec.clip(delta_e) + spec.noise_std * rng.standard_normal(size)
    return float(np.mean(noisy < spec.threshold))


def acceptance_probability(sign, beta, sigma_v):
    """Probability that the threshold test accepts a minimally clipped difference."""
    if not sigma_v > 0:
        raise InvalidParameterError(f'Noise multiplier must be positive, got {sigma_v}')
    sign = LossSign(sign)
    clipped = -1.0 if sign is LossSign.NEGATIVE else 1.0
    return std_normal_cdf((beta - clipped) / (2 * sigma_v))


def analytic_acceptance_rate(delta_e, spec):
    """Exact acceptance probability of the threshold test for ``delta_e``.

    Works in units of C_v, which cancel, so the result does not depend on
    the clip bound under minimal clipping.
    """
    normalized = spec.clip(delta_e) / spec.clip_bound
    if spec.noise_multiplier == 0:
        return 1.0 if normalized < spec.threshold_beta else 0.0
    return std_normal_cdf((spec.threshold_beta - normalized) / (2 * spec.noise_multiplier))


def _release_window(true_value, sensitivity, sigma, lower, upper):
    if not sensitivity > 0:
        raise InvalidParameterError(f'Sensitivity must be positive, got {sensitivity}')
    if not sigma > 0:
        raise InvalidParameterError(f'Noise multiplier must be positive, got {sigma}')
    if not lower < upper:
        raise InvalidParameterError(f'Empty release interval [{lower}, {upper}]')
    if not math.isfinite(true_value):
        raise NonFiniteValueError(f'Query value is not finite: {true_value}')
    value = min(max(float(true_value), 0.0), sensitivity)
    scale = sensitivity * sigma
    log_mass = log_window_mass((lower - value) / scale, (upper - value) / scale)
    if log_mass < math.log(MIN_WINDOW_MASS):
        raise EmptyWindowError(f'Release interval [{lower}, {upper}] holds probability '
                               f'{math.exp(log_mass):.3e} around {value}; sampling would not terminate')
    return value, scale, math.exp(log_mass)


def selective_release(true_value,
                      sensitivity,
                      sigma,
                      rng,
                      lower=-math.inf,
                      upper=math.inf,
                      max_draws=MAX_RELEASE_DRAWS):
    """Gaussian mechanism that only releases a draw inside [lower, upper].

    The query value is clipped to [0, sensitivity] first. Draws of
    value + N(0, (sensitivity * sigma)^2) are repeated until one lands in
    the interval; only that draw is returned.

    Raises:
        EmptyWindowError: When the interval mass is below 1e-12 or
            ``max_draws`` draws all miss.

    """
    value, scale, _ = _release_window(true_value, sensitivity, sigma, lower, upper)
    for _ in range(max_draws):
        draw = value + scale * rng.standard_normal()
        if lower <= draw <= upper:
            return float(draw)
    raise EmptyWindowError(f'No draw landed in [{lower}, {upper}] after {max_draws} attempts')


def selective_release_many(true_value,
                           sensitivity,
                           sigma,
                           rng,
                           size,
                           lower=-math.inf,
                           upper=math.inf,
                           max_draws=MAX_RELEASE_DRAWS):
    """``size`` independent selective releases, sampled in vectorized batches."""
    value, scale, mass = _release_window(true_value, sensitivity, sigma, lower, upper)
    released = np.empty(size, dtype=float)
    filled = 0
    budget = max_draws * size
    while filled < size:
        batch = int(min(max((size - filled) / mass * 1.1, 1024), 10 ** 7, budget))
        if batch <= 0:
            raise EmptyWindowError(f'Exhausted {max_draws * size} draws for {size} releases')
        budget -= batch
        draws = value + scale * rng.standard_normal(batch)
        kept = draws[(draws >= lower) & (draws <= upper)][:size - filled]
        released[filled:filled + kept.size] = kept
        filled += kept.size
    return released


def _divergence_means(direction, mu, alpha):
    direction = DivergenceDirection(direction)
    if direction is DivergenceDirection.ZERO_VS_MU:
        first, second = 0.0, mu
    else:
        first, second = mu, 0.0
    return first, second, alpha * first + (1 - alpha) * second


def truncated_renyi_divergence(direction, mu, sigma, lower, upper, alpha):
    """Renyi divergence of order alpha between two truncated normals.

    The distributions are N(0, (mu sigma)^2) and N(mu, (mu sigma)^2), both
    restricted to [lower, upper]. ``zero_vs_mu`` measures the one centered
    at zero against the one centered at mu, ``mu_vs_zero`` the reverse.

    Args:
        direction: ``zero_vs_mu`` or ``mu_vs_zero``.
        mu: Sensitivity, positive.
        sigma: Noise multiplier, positive.
        lower: Lower truncation, may be -inf.
        upper: Upper truncation.
        alpha: Order, any real above 1.

    Returns:
        float: The divergence in nats.

    """
    if not mu > 0 or not sigma > 0:
        raise InvalidParameterError(f'Sensitivity and noise must be positive, got {mu}, {sigma}')
    if not alpha > 1:
        raise InvalidParameterError(f'Order must exceed 1, got {alpha}')
    if not lower < upper:
        raise InvalidParameterError(f'Empty truncation window [{lower}, {upper}]')
    scale = mu * sigma
    first, second, shifted = _divergence_means(direction, mu, alpha)

    def log_mass(mean):
        return log_window_mass((lower - mean) / scale, (upper - mean) / scale)

    log_first, log_second, log_shifted = log_mass(first), log_mass(second), log_mass(shifted)
    if -math.inf in (log_first, log_second, log_shifted):
        raise EmptyWindowError(f'Truncation window [{lower}, {upper}] is numerically empty')
    log_ratio = log_shifted - alpha * log_first + (alpha - 1) * log_second
    return alpha / (2 * sigma ** 2) + log_ratio / (alpha - 1)


def selective_release_bounds(mu, sigma, upper, alpha):
    """The two CDF ratios bounding the divergence when the window is (-inf, upper].

    Both are at most one for every mu, sigma > 0 and alpha > 1, which keeps
    the release at the RDP of the plain Gaussian mechanism.

    Returns:
        tuple: (A, B)

    """
    scale = mu * sigma
    log_cdf = special.log_ndtr
    log_a = ((alpha - 1) * log_cdf((upper - mu) / scale)
             + log_cdf((upper + (alpha - 1) * mu) / scale)
             - alpha * log_cdf(upper / scale))
    log_b = ((alpha - 1) * log_cdf(upper / scale)
             + log_cdf((upper - alpha * mu) / scale)
             - alpha * log_cdf((upper - mu) / scale))
    return float(np.exp(log_a)), float(np.exp(log_b))
