#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: accountant.py
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
Renyi differential privacy accounting.

Per step RDP of the Poisson subsampled Gaussian mechanism, additive
composition over accepted updates, conversion to (epsilon, delta) and the
search for the largest number of updates a budget affords. Everything in
here is a pure function of its arguments.

.. _Google Python Style Guide:
   https://google.github.io/styleguide/pyguide.html

"""

import logging
import math
import numbers
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy import special

from dpsurcli.conf import DEFAULT_ORDERS, DEFAULT_DELTA, MAX_CALIBRATION_UPDATES
from dpsurcli.dpsurcliexceptions import (InvalidParameterError,
                                         MismatchedOrdersError,
                                         InfeasibleBudgetError)

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
LOGGER_BASENAME = '''dpsurcli.accountant'''
LOGGER = logging.getLogger(LOGGER_BASENAME)
LOGGER.addHandler(logging.NullHandler())


def _validate_order(alpha):
    if isinstance(alpha, bool) or not isinstance(alpha, numbers.Integral):
        raise InvalidParameterError(f'RDP order must be an integer, got {alpha!r}')
    if alpha < 2:
        raise InvalidParameterError(f'RDP order must be at least 2, got {alpha}')
    return int(alpha)


@dataclass(frozen=True)
class RdpCurve:
    """RDP epsilon per integer order, in nats."""

    orders: Tuple[int, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        orders = tuple(_validate_order(order) for order in self.orders)
        values = tuple(float(value) for value in self.values)
        if not orders:
            raise MismatchedOrdersError('An RDP curve needs at least one order')
        if len(orders) != len(values):
            raise InvalidParameterError(f'{len(orders)} orders but {len(values)} values')
        if any(later <= earlier for earlier, later in zip(orders, orders[1:])):
            raise InvalidParameterError('Orders must be strictly increasing')
        if any(not math.isfinite(value) or value < 0 for value in values):
            raise InvalidParameterError('RDP values must be finite non negative numbers')
        object.__setattr__(self, 'orders', orders)
        object.__setattr__(self, 'values', values)

    def as_dict(self):
        return {order: value for order, value in zip(self.orders, self.values)}


@dataclass(frozen=True)
class SubsampledGaussianSpec:
    """Sampling rate q and noise multiplier sigma of one Gaussian release."""

    q: float
    sigma: float

    def __post_init__(self):
        if not 0 < self.q <= 1:
            raise InvalidParameterError(f'Sampling rate must lie in (0, 1], got {self.q}')
        if not self.sigma > 0 or math.isnan(self.sigma):
            raise InvalidParameterError(f'Noise multiplier must be positive, got {self.sigma}')


@dataclass(frozen=True)
class PrivacyLedger:
    """Accepted update count plus the mechanisms every accepted update pays for.

    ``valid_spec`` is None for plain DPSGD, where only the training phase is
    released.
    """

    accepted_updates: int
    train_spec: SubsampledGaussianSpec
    valid_spec: Optional[SubsampledGaussianSpec] = None
    delta: float = DEFAULT_DELTA
    orders: Tuple[int, ...] = DEFAULT_ORDERS

    def __post_init__(self):
        if self.accepted_updates < 0:
            raise InvalidParameterError('Accepted update count cannot be negative')
        _validate_delta(self.delta)

    def charge(self):
        """Returns the ledger after one more accepted update."""
        return replace(self, accepted_updates=self.accepted_updates + 1)


def _validate_delta(delta):
    if not 0 < delta < 1:
        raise InvalidParameterError(f'Delta must lie in (0, 1), got {delta}')


@lru_cache(maxsize=4096)
def _log_a(q, sigma, alpha):
    """log A_alpha of the sampled Gaussian mechanism, for 0 < q < 1."""
    k = np.arange(alpha + 1, dtype=float)
    log_binomial = special.gammaln(alpha + 1) - special.gammaln(k + 1) - special.gammaln(alpha - k + 1)
    terms = (log_binomial
             + (alpha - k) * math.log1p(-q)
             + k * math.log(q)
             + (k * k - k) / (2 * sigma ** 2))
    return float(special.logsumexp(terms))


def sgm_rdp(spec, alpha):
    """RDP of one invocation of the Poisson subsampled Gaussian mechanism.

    Args:
        spec: The sampling rate and noise multiplier.
        alpha: Integer order, at least 2.

    Returns:
        float: ln(A_alpha) / (alpha - 1) in nats.

    """
    alpha = _validate_order(alpha)
    if spec.q == 1:
        return gaussian_rdp(spec.sigma, alpha)
    return max(0.0, _log_a(float(spec.q), float(spec.sigma), alpha) / (alpha - 1))


def gaussian_rdp(sigma, alpha):
    """RDP of the Gaussian mechanism with sensitivity one, alpha / (2 sigma^2)."""
    if not sigma > 0:
        raise InvalidParameterError(f'Noise multiplier must be positive, got {sigma}')
    if not alpha > 1:
        raise InvalidParameterError(f'RDP order must exceed 1, got {alpha}')
    return alpha / (2 * sigma ** 2)


def rdp_curve(spec, orders=DEFAULT_ORDERS):
    """Per invocation RDP of ``spec`` over ``orders``."""
    return RdpCurve(tuple(orders), tuple(sgm_rdp(spec, order) for order in orders))


def zero_curve(orders=DEFAULT_ORDERS):
    return RdpCurve(tuple(orders), (0.0,) * len(orders))


def scale_curve(curve, times):
    """Composes ``curve`` with itself ``times`` times."""
    if times < 0:
        raise InvalidParameterError(f'Cannot compose a negative number of times, got {times}')
    return RdpCurve(curve.orders, tuple(times * value for value in curve.values))


def compose(first, second):
    """Pointwise sum of two curves on the same order grid."""
    if first.orders != second.orders:
        raise MismatchedOrdersError('Cannot compose RDP curves over different orders')
    return RdpCurve(first.orders, tuple(a + b for a, b in zip(first.values, second.values)))


def _conversion(orders, values, delta):
    orders = np.asarray(orders, dtype=float)
    values = np.asarray(values, dtype=float)
    return (values
            + np.log((orders - 1) / orders)
            - (math.log(delta) + np.log(orders)) / (orders - 1))


_EDGE_ORDERS_REPORTED = set()


def _warn_edge_order(orders, order):
    """Warns the first time an order of a grid wins from its edge, debug after that."""
    if (orders[0], orders[-1], order) in _EDGE_ORDERS_REPORTED:
        LOGGER.debug('Best RDP order %s sits on the edge of the order grid', order)
        return
    _EDGE_ORDERS_REPORTED.add((orders[0], orders[-1], order))
    LOGGER.warning('Best RDP order %s sits on the edge of the order grid, a wider grid may give a smaller '
                   'epsilon', order)


def rdp_to_dp(curve, delta):
    """Converts an RDP curve to (epsilon, delta)-DP.

    Every order gives a valid epsilon, the smallest one is reported. Epsilon
    is floored at zero.

    Returns:
        tuple: (epsilon, best_alpha)

    """
    _validate_delta(delta)
    if not curve.orders:
        raise MismatchedOrdersError('Cannot convert an empty RDP curve')
    epsilons = _conversion(curve.orders, curve.values, delta)
    index = int(np.argmin(epsilons))
    best_alpha = curve.orders[index]
    if len(curve.orders) > 1 and best_alpha in (curve.orders[0], curve.orders[-1]):
        _warn_edge_order(curve.orders, best_alpha)
    return max(0.0, float(epsilons[index])), best_alpha


def per_update_curve(train_spec, valid_spec=None, orders=DEFAULT_ORDERS):
    """RDP paid by a single accepted update."""
    curve = rdp_curve(train_spec, orders)
    if valid_spec is not None:
        curve = compose(curve, rdp_curve(valid_spec, orders))
    return curve


def ledger_curve(ledger):
    return scale_curve(per_update_curve(ledger.train_spec, ledger.valid_spec, ledger.orders),
                       ledger.accepted_updates)


def ledger_epsilon_and_order(ledger):
    return rdp_to_dp(ledger_curve(ledger), ledger.delta)


def ledger_epsilon(ledger):
    """Epsilon of the composed training and validation curves of ``ledger``."""
    epsilon, _ = ledger_epsilon_and_order(ledger)
    return epsilon


def epsilon_after(train_spec, valid_spec, updates, delta=DEFAULT_DELTA, orders=DEFAULT_ORDERS):
    return ledger_epsilon(PrivacyLedger(updates, train_spec, valid_spec, delta, tuple(orders)))


def calibrate_max_updates(train_spec,
                          valid_spec,
                          epsilon_target,
                          delta=DEFAULT_DELTA,
                          orders=DEFAULT_ORDERS,
                          cap=MAX_CALIBRATION_UPDATES):
    """Largest number of accepted updates whose epsilon stays within budget.

    Args:
        train_spec: Training phase mechanism.
        valid_spec: Validation phase mechanism, None for plain DPSGD.
        epsilon_target: The budget.
        delta: Target delta.
        orders: The order grid.
        cap: Upper bound of the search.

    Returns:
        int: 0 when not even one update is affordable.

    Raises:
        InfeasibleBudgetError: When the budget is below the conversion floor of t = 0.

    """
    if not epsilon_target > 0:
        raise InvalidParameterError(f'Target epsilon must be positive, got {epsilon_target}')
    _validate_delta(delta)
    step = np.asarray(per_update_curve(train_spec, valid_spec, orders).values)

    def epsilon(updates):
        return max(0.0, float(np.min(_conversion(orders, updates * step, delta))))

    floor = epsilon(0)
    if epsilon_target < floor:
        raise InfeasibleBudgetError(f'Target epsilon {epsilon_target} is below the conversion '
                                    f'floor {floor:.6f} at delta {delta}')
    if epsilon(1) > epsilon_target:
        return 0
    if epsilon(cap) <= epsilon_target:
        LOGGER.warning('Budget affords more than %s updates, capping the search', cap)
        return cap
    low, high = 1, 2
    while high < cap and epsilon(high) <= epsilon_target:
        low, high = high, min(2 * high, cap)
    while high - low > 1:
        middle = (low + high) // 2
        if epsilon(middle) <= epsilon_target:
            low = middle
        else:
            high = middle
    LOGGER.debug('Budget %s affords %s accepted updates', epsilon_target, low)
    return low
