#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: verification.py
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
Checks of the mechanisms and the accountant against independent oracles.

Every suite compares an analytic value with an empirical or numerically
integrated one and records the tolerance it was held to. Monte-Carlo suites
run with fewer than 10^5 samples are reported as underpowered instead of
being allowed to fail.

.. _Google Python Style Guide:
   https://google.github.io/styleguide/pyguide.html

"""

import csv
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy import integrate, special, stats

from dpsurcli.accountant import SubsampledGaussianSpec, gaussian_rdp, sgm_rdp
from dpsurcli.conf import DEFAULT_VERIFICATION_BUDGET, ENCODING, MIN_VERIFICATION_BUDGET
from dpsurcli.mechanisms import (DivergenceDirection,
                                 LossSign,
                                 TruncatedGaussianSpec,
                                 ValidationMechanismSpec,
                                 acceptance_probability,
                                 analytic_acceptance_rate,
                                 selective_release_bounds,
                                 selective_release_many,
                                 threshold_test_frequency,
                                 truncated_normal_cdf,
                                 truncated_normal_mean,
                                 truncated_renyi_divergence)

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
LOGGER_BASENAME = '''dpsurcli.verification'''
LOGGER = logging.getLogger(LOGGER_BASENAME)
LOGGER.addHandler(logging.NullHandler())

REPORT_COLUMNS = ('suite', 'label', 'analytic', 'empirical', 'tolerance', 'passed')

ACCEPTANCE_BETAS = (-3.0, -1.0, 0.0, 0.5)
ACCEPTANCE_SIGMAS = (0.8, 1.0, 1.3)
INVARIANCE_CLIP_BOUNDS = (1e-1, 1e-3, 1e-5)
BOUND_GRID = {'mu': (0.5, 1.0, 2.0), 'sigma': (0.5, 1.0, 2.0), 'upper': (-2.0, 0.0, 2.0), 'alpha': (2, 4, 16, 64)}
ACCOUNTANT_GRID = {'q': (0.01, 0.1), 'sigma': (1.0, 2.0), 'alpha': (2, 4, 8)}
RELEASE_SETTINGS = ((1.0, 1.0, 1.0, -math.inf, 0.5),
                    (0.3, 1.0, 0.5, 0.0, 1.5),
                    (2.0, 2.0, 1.0, -1.0, math.inf))
QUADRATURE_SETS = 20
CHI_SQUARE_BINS = 100
CHI_SQUARE_MIN_P = 0.01
FREQUENCY_FLOOR = 0.002
BOUND_SLACK = 1e-12
QUADRATURE_TOLERANCE = 1e-8
IMPORTANCE_CHUNK = 10 ** 5


@dataclass(frozen=True)
class Check:
    suite: str
    label: str
    analytic: float
    empirical: float
    tolerance: float
    passed: bool

    def as_row(self):
        return [self.suite, self.label, repr(self.analytic), repr(self.empirical), repr(self.tolerance),
                str(self.passed).lower()]


@dataclass
class SuiteResult:
    name: str
    checks: List[Check] = field(default_factory=list)
    underpowered: bool = False

    def add(self, label, analytic, empirical, tolerance, passed=None):
        if passed is None:
            passed = abs(empirical - analytic) <= tolerance
        self.checks.append(Check(self.name, label, float(analytic), float(empirical), float(tolerance),
                                 bool(passed)))

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def status(self):
        if self.underpowered:
            return 'underpowered'
        return 'pass' if self.passed else 'fail'


@dataclass
class VerificationReport:
    budget: int
    seed: int
    suites: List[SuiteResult] = field(default_factory=list)

    @property
    def passed(self):
        return all(suite.passed for suite in self.suites if not suite.underpowered)

    @property
    def underpowered(self):
        return [suite.name for suite in self.suites if suite.underpowered]

    @property
    def checks(self):
        return [check for suite in self.suites for check in suite.checks]

    def write_csv(self, path):
        with open(path, 'w', encoding=ENCODING, newline='') as report:
            writer = csv.writer(report)
            writer.writerow(REPORT_COLUMNS)
            writer.writerows(check.as_row() for check in self.checks)
        LOGGER.info('Wrote %s checks to %s', len(self.checks), path)

    def summary(self):
        return {suite.name: suite.status for suite in self.suites}


def _frequency_tolerance(probability, samples):
    return max(3 * math.sqrt(probability * (1 - probability) / samples), FREQUENCY_FLOOR)


def acceptance_suite(budget, rng):
    """Acceptance probabilities of the threshold test, analytic and simulated."""
    suite = SuiteResult('acceptance', underpowered=budget < MIN_VERIFICATION_BUDGET)
    for sign, beta, expected in ((LossSign.NEGATIVE, 0.0, 0.6914624612740131),
                                 (LossSign.POSITIVE, 0.0, 0.3085375387259869),
                                 (LossSign.NEGATIVE, -1.0, 0.5),
                                 (LossSign.POSITIVE, -1.0, 0.15865525393145707)):
        suite.add(f'closed form {sign.value} beta={beta} sigma_v=1',
                  expected, acceptance_probability(sign, beta, 1.0), 5e-4)
    for beta, sigma, delta_e in itertools.product(ACCEPTANCE_BETAS, ACCEPTANCE_SIGMAS, (-0.5, 0.5)):
        spec = ValidationMechanismSpec(0.1, sigma, beta)
        analytic = analytic_acceptance_rate(delta_e, spec)
        empirical = threshold_test_frequency(delta_e, spec, rng, budget)
        suite.add(f'frequency delta_e={delta_e} beta={beta} sigma_v={sigma}',
                  analytic, empirical, _frequency_tolerance(analytic, budget))
    return suite


def clip_bound_invariance_suite():
    """Acceptance rates must come out bitwise equal for every clip bound."""
    suite = SuiteResult('clip_bound_invariance')
    for beta, sigma, delta_e in itertools.product((-1.0, 0.0, 0.5), ACCEPTANCE_SIGMAS, (-0.5, 0.0, 0.5)):
        rates = [analytic_acceptance_rate(delta_e, ValidationMechanismSpec(bound, sigma, beta))
                 for bound in INVARIANCE_CLIP_BOUNDS]
        for bound, rate in zip(INVARIANCE_CLIP_BOUNDS[1:], rates[1:]):
            suite.add(f'delta_e={delta_e} beta={beta} sigma_v={sigma} C_v={bound:g}',
                      rates[0], rate, 0.0, passed=rate == rates[0])
    return suite


def release_bounds_suite():
    """Both CDF ratios bounding the selective release stay at or below one."""
    suite = SuiteResult('release_bounds')
    for mu, sigma, upper, alpha in itertools.product(*BOUND_GRID.values()):
        first, second = selective_release_bounds(mu, sigma, upper, alpha)
        label = f'mu={mu} sigma={sigma} b={upper} alpha={alpha}'
        suite.add(f'A {label}', 1.0, first, BOUND_SLACK, passed=first <= 1.0 + BOUND_SLACK)
        suite.add(f'B {label}', 1.0, second, BOUND_SLACK, passed=second <= 1.0 + BOUND_SLACK)
    return suite


def quadrature_divergence(direction, mu, sigma, lower, upper, alpha):
    """Renyi divergence of the truncated normals by adaptive quadrature.

    The integrand is a Gaussian bump around alpha m1 + (1 - alpha) m2; it is
    shifted by its value at the point of the window closest to that center
    and integrated over the region holding all but a negligible part of it.
    """
    scale = mu * sigma
    zero_first = DivergenceDirection(direction) is DivergenceDirection.ZERO_VS_MU
    first_mean, second_mean = (0.0, mu) if zero_first else (mu, 0.0)
    first = TruncatedGaussianSpec(first_mean, scale, lower, upper).distribution
    second = TruncatedGaussianSpec(second_mean, scale, lower, upper).distribution

    def exponent(x):
        return alpha * first.logpdf(x) + (1 - alpha) * second.logpdf(x)

    center = alpha * first_mean + (1 - alpha) * second_mean
    peak = min(max(center, lower), upper)
    distance = abs(center - peak)
    width = scale if distance == 0 else min(scale, scale ** 2 / distance)
    start, stop = max(lower, peak - 40 * width), min(upper, peak + 40 * width)
    shift = exponent(peak)
    value, _ = integrate.quad(lambda x: math.exp(exponent(x) - shift), start, stop,
                              points=[peak] if start < peak < stop else None,
                              epsabs=0.0, epsrel=1e-13, limit=500)
    return (math.log(value) + shift) / (alpha - 1)


def divergence_parameter_sets(rng, count=QUADRATURE_SETS):
    """Seeded (direction, mu, sigma, lower, upper, alpha) tuples, half of them with lower = -inf."""
    sets = []
    for index in range(count):
        direction = DivergenceDirection.ZERO_VS_MU if index % 2 == 0 else DivergenceDirection.MU_VS_ZERO
        mu, sigma, alpha = rng.uniform(0.5, 2.0), rng.uniform(0.7, 2.0), rng.uniform(1.5, 8.0)
        if index % 4 < 2:
            lower = -math.inf
            upper = rng.uniform(-0.5, 2.0) * mu
        else:
            lower = rng.uniform(-1.5, 0.5) * mu
            upper = lower + rng.uniform(1.0, 4.0) * mu * sigma
        sets.append((direction, mu, sigma, lower, upper, alpha))
    return sets


def divergence_suite(rng):
    """Closed form truncated divergence against quadrature, and its Gaussian ceiling."""
    suite = SuiteResult('truncated_divergence')
    for direction, mu, sigma, lower, upper, alpha in divergence_parameter_sets(rng):
        label = f'{direction.value} mu={mu:.4f} sigma={sigma:.4f} a={lower:.4f} b={upper:.4f} alpha={alpha:.4f}'
        closed = truncated_renyi_divergence(direction, mu, sigma, lower, upper, alpha)
        suite.add(f'quadrature {label}', quadrature_divergence(direction, mu, sigma, lower, upper, alpha),
                  closed, QUADRATURE_TOLERANCE)
        if lower == -math.inf:
            ceiling = alpha / (2 * sigma ** 2)
            suite.add(f'ceiling {label}', ceiling, closed, BOUND_SLACK, passed=closed <= ceiling + BOUND_SLACK)
    return suite


def chi_square_pvalue(samples, spec, bins=CHI_SQUARE_BINS):
    """Goodness of fit of ``samples`` to a truncated normal over equiprobable bins."""
    positions = np.floor(truncated_normal_cdf(samples, spec) * bins).astype(int)
    observed = np.bincount(np.clip(positions, 0, bins - 1), minlength=bins)
    return float(stats.chisquare(observed).pvalue)


def selective_release_suite(budget, rng):
    """Distribution and mean of selective releases against the truncated normal.

    One setting is also drawn from two freshly seeded generators, which miss
    the window a different number of times; both samples have to fit and
    agree with each other.
    """
    suite = SuiteResult('selective_release', underpowered=budget < MIN_VERIFICATION_BUDGET)
    for true_value, sensitivity, sigma, lower, upper in RELEASE_SETTINGS:
        samples = selective_release_many(true_value, sensitivity, sigma, rng, budget, lower, upper)
        spec = TruncatedGaussianSpec(min(max(true_value, 0.0), sensitivity), sensitivity * sigma, lower, upper)
        pvalue = chi_square_pvalue(samples, spec)
        suite.add(f'chi-square p-value value={true_value} mu={sensitivity} sigma={sigma} a={lower} b={upper}',
                  CHI_SQUARE_MIN_P, pvalue, 0.0, passed=pvalue > CHI_SQUARE_MIN_P)
    true_value, sensitivity, sigma, lower, upper = RELEASE_SETTINGS[0]
    spec = TruncatedGaussianSpec(min(max(true_value, 0.0), sensitivity), sensitivity * sigma, lower, upper)
    seeded = []
    for seed in rng.integers(0, 2 ** 32, size=2):
        samples = selective_release_many(true_value, sensitivity, sigma, np.random.default_rng(seed), budget,
                                         lower, upper)
        pvalue = chi_square_pvalue(samples, spec)
        suite.add(f'chi-square p-value seed={seed}', CHI_SQUARE_MIN_P, pvalue, 0.0, passed=pvalue > CHI_SQUARE_MIN_P)
        seeded.append(samples)
    pvalue = float(stats.ks_2samp(*seeded).pvalue)
    suite.add('two sample p-value across seeds', CHI_SQUARE_MIN_P, pvalue, 0.0, passed=pvalue > CHI_SQUARE_MIN_P)
    samples = selective_release_many(0.0, 1.0, 1.0, rng, budget, -math.inf, 0.0)
    spec = TruncatedGaussianSpec(0.0, 1.0, -math.inf, 0.0)
    half_normal_mean = -math.sqrt(2 / math.pi)
    suite.add('half-normal mean closed form', half_normal_mean, truncated_normal_mean(spec), 1e-9)
    standard_error = math.sqrt(1 - 2 / math.pi) / math.sqrt(budget)
    suite.add('half-normal mean empirical', half_normal_mean, float(np.mean(samples)),
              max(4 * standard_error, 1e-4))
    return suite


def importance_sampled_log_moment(spec, alpha, samples, rng):
    """Monte-Carlo estimate of log E_{z~N(0, s^2)}[(mu(z) / mu0(z))^alpha] and its relative error.

    ``mu`` is the mixture (1 - q) N(0, s^2) + q N(1, s^2). Sampling from
    N(0, s^2) almost never visits the region that dominates the moment, so
    the draws come from an equal mixture of N(k, s^2), k = 0..alpha,
    against which the weights are bounded.

    Returns:
        tuple: (log estimate, standard error of the estimate relative to itself)

    """
    q, sigma = spec.q, spec.sigma
    centers = np.arange(alpha + 1, dtype=float)
    log_weights = []
    remaining = samples
    while remaining > 0:
        size = min(remaining, IMPORTANCE_CHUNK)
        remaining -= size
        z = rng.choice(centers, size) + sigma * rng.standard_normal(size)
        log_base = stats.norm.logpdf(z, 0.0, sigma)
        log_ratio = np.logaddexp(math.log1p(-q), math.log(q) + (2 * z - 1) / (2 * sigma ** 2))
        log_proposal = (special.logsumexp(stats.norm.logpdf(z[:, None], centers[None, :], sigma), axis=1)
                        - math.log(alpha + 1))
        log_weights.append(log_base + alpha * log_ratio - log_proposal)
    log_weights = np.concatenate(log_weights)
    peak = float(np.max(log_weights))
    scaled = np.exp(log_weights - peak)
    mean = float(np.mean(scaled))
    relative_error = float(np.std(scaled, ddof=1) / math.sqrt(samples) / mean)
    return peak + math.log(mean), relative_error


def accountant_suite(budget, rng):
    """sgm_rdp against an importance-sampled moment, and the exact q = 1 case."""
    suite = SuiteResult('accountant', underpowered=budget < MIN_VERIFICATION_BUDGET)
    for q, sigma, alpha in itertools.product(*ACCOUNTANT_GRID.values()):
        spec = SubsampledGaussianSpec(q, sigma)
        analytic = sgm_rdp(spec, alpha) * (alpha - 1)
        estimate, relative_error = importance_sampled_log_moment(spec, alpha, budget, rng)
        # In log space a relative standard error is an absolute one.
        suite.add(f'log moment q={q} sigma={sigma} alpha={alpha}', analytic, estimate, 3 * relative_error)
    for sigma, alpha in itertools.product(ACCOUNTANT_GRID['sigma'], ACCOUNTANT_GRID['alpha']):
        suite.add(f'full batch sigma={sigma} alpha={alpha}', gaussian_rdp(sigma, alpha),
                  sgm_rdp(SubsampledGaussianSpec(1.0, sigma), alpha), 0.0)
    return suite


SUITES = ('acceptance', 'clip_bound_invariance', 'release_bounds', 'truncated_divergence',
          'selective_release', 'accountant')


def run_verification(budget=DEFAULT_VERIFICATION_BUDGET, seed=0, suites=SUITES):
    """Runs the named suites with ``budget`` Monte-Carlo samples per check.

    Every suite draws from its own generator spawned from ``seed``, so the
    report of a suite does not depend on which other suites ran.
    """
    unknown = sorted(set(suites) - set(SUITES))
    if unknown:
        raise ValueError(f'Unknown suites: {", ".join(unknown)}')
    generators = dict(zip(SUITES, (np.random.default_rng(child)
                                   for child in np.random.SeedSequence(seed).spawn(len(SUITES)))))
    runners = {'acceptance': lambda: acceptance_suite(budget, generators['acceptance']),
               'clip_bound_invariance': clip_bound_invariance_suite,
               'release_bounds': release_bounds_suite,
               'truncated_divergence': lambda: divergence_suite(generators['truncated_divergence']),
               'selective_release': lambda: selective_release_suite(budget, generators['selective_release']),
               'accountant': lambda: accountant_suite(budget, generators['accountant'])}
    report = VerificationReport(budget, seed)
    for name in SUITES:
        if name not in suites:
            continue
        result = runners[name]()
        report.suites.append(result)
        if result.underpowered:
            LOGGER.warning('Suite %s ran with %s samples, below the %s needed for a verdict',
                           name, budget, MIN_VERIFICATION_BUDGET)
        else:
            LOGGER.info('Suite %s: %s', name, result.status)
    return report
