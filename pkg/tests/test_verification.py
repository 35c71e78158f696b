#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: test_verification.py
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
test_verification
----------------------------------
Tests for `verification` module.

.. _Google Python Style Guide:
   http://google.github.io/styleguide/pyguide.html

"""

import csv
import math
import os
import tempfile
import unittest

import numpy as np
from scipy import stats

from dpsurcli.accountant import SubsampledGaussianSpec, sgm_rdp
from dpsurcli.mechanisms import TruncatedGaussianSpec, selective_release, selective_release_many
from dpsurcli.verification import (SUITES,
                                   acceptance_suite,
                                   chi_square_pvalue,
                                   clip_bound_invariance_suite,
                                   divergence_suite,
                                   importance_sampled_log_moment,
                                   release_bounds_suite,
                                   run_verification,
                                   selective_release_suite)

__author__ = '''Willem Kuipers <willem@kuipers.co.uk>'''
__docformat__ = '''google'''
__date__ = '''17-10-2026'''
__copyright__ = '''Copyright 2026, Willem Kuipers'''
__credits__ = ["Willem Kuipers"]
__license__ = '''MIT'''
__maintainer__ = '''Willem Kuipers'''
__email__ = '''<willem@kuipers.co.uk>'''
__status__ = '''Development'''  # "Prototype", "Development", "Production".

SLOW = bool(os.environ.get('DPSUR_SLOW_TESTS'))


class TestAnalyticSuites(unittest.TestCase):

    def test_clip_bound_invariance(self):
        suite = clip_bound_invariance_suite()
        self.assertTrue(suite.passed)
        self.assertEqual(suite.status, 'pass')

    def test_release_bounds(self):
        suite = release_bounds_suite()
        self.assertEqual(len(suite.checks), 2 * 3 * 3 * 3 * 4)
        self.assertTrue(suite.passed)

    def test_divergence_against_quadrature(self):
        suite = divergence_suite(np.random.default_rng(0))
        failed = [check.label for check in suite.checks if not check.passed]
        self.assertEqual(failed, [])


class TestMonteCarloSuites(unittest.TestCase):

    def test_acceptance_frequencies(self):
        suite = acceptance_suite(2 * 10 ** 5, np.random.default_rng(1))
        self.assertFalse(suite.underpowered)
        for check in suite.checks:
            # tolerances are three standard errors, allow five here
            self.assertLessEqual(abs(check.empirical - check.analytic), check.tolerance * 5 / 3, check.label)

    def test_small_budgets_are_flagged(self):
        report = run_verification(budget=1000, seed=0, suites=('acceptance', 'accountant'))
        self.assertEqual(report.underpowered, ['acceptance', 'accountant'])
        self.assertTrue(report.passed)
        self.assertEqual(set(report.summary().values()), {'underpowered'})

    def test_chi_square_accepts_matching_samples(self):
        rng = np.random.default_rng(2)
        samples = selective_release_many(0.5, 1.0, 1.0, rng, 10 ** 5, -1.0, 1.5)
        self.assertGreater(chi_square_pvalue(samples, TruncatedGaussianSpec(0.5, 1.0, -1.0, 1.5)), 1e-4)

    def test_chi_square_rejects_the_wrong_distribution(self):
        rng = np.random.default_rng(3)
        samples = selective_release_many(0.5, 1.0, 1.0, rng, 10 ** 5, -1.0, 1.5)
        self.assertLess(chi_square_pvalue(samples, TruncatedGaussianSpec(0.0, 1.0, -1.0, 1.5)), 1e-6)

    def test_release_does_not_depend_on_the_missed_draws(self):
        spec = TruncatedGaussianSpec(0.5, 1.0, 2.0, 3.0)
        seeded = [selective_release_many(0.5, 1.0, 1.0, np.random.default_rng(seed), 5 * 10 ** 4, 2.0, 3.0)
                  for seed in (11, 12)]
        for samples in seeded:
            self.assertGreater(chi_square_pvalue(samples, spec), 1e-4)
        self.assertGreater(stats.ks_2samp(*seeded).pvalue, 1e-4)
        rng = np.random.default_rng(13)
        one_at_a_time = [selective_release(0.5, 1.0, 1.0, rng, 2.0, 3.0) for _ in range(2000)]
        self.assertGreater(stats.ks_2samp(one_at_a_time, seeded[0]).pvalue, 1e-4)

    def test_release_suite_compares_two_seeds(self):
        suite = selective_release_suite(2 * 10 ** 4, np.random.default_rng(6))
        labels = [check.label for check in suite.checks]
        self.assertEqual(sum(label.startswith('chi-square p-value seed=') for label in labels), 2)
        self.assertIn('two sample p-value across seeds', labels)

    def test_importance_sampled_moment(self):
        rng = np.random.default_rng(4)
        for q, sigma, alpha in ((0.01, 1.0, 8), (0.1, 2.0, 4), (0.1, 1.0, 2)):
            spec = SubsampledGaussianSpec(q, sigma)
            estimate, relative_error = importance_sampled_log_moment(spec, alpha, 2 * 10 ** 5, rng)
            self.assertLess(abs(estimate - sgm_rdp(spec, alpha) * (alpha - 1)), max(4 * relative_error, 1e-6))


class TestReports(unittest.TestCase):

    def setUp(self):
        """
        Test set up

        This is where you can setup things that you use throughout the tests. This method is called before every test.
        """
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        """
        Test tear down

        This is where you should tear down what you've setup in setUp before. This method is called after every test.
        """
        self.directory.cleanup()

    def test_same_seed_same_report(self):
        first = run_verification(budget=2000, seed=5, suites=('acceptance',))
        second = run_verification(budget=2000, seed=5, suites=('acceptance',))
        self.assertEqual(first.checks, second.checks)

    def test_suites_do_not_depend_on_each_other(self):
        alone = run_verification(budget=2000, seed=5, suites=('accountant',))
        together = run_verification(budget=2000, seed=5, suites=('acceptance', 'accountant'))
        self.assertEqual(alone.checks, [check for check in together.checks if check.suite == 'accountant'])

    def test_unknown_suites(self):
        with self.assertRaises(ValueError):
            run_verification(budget=1000, suites=('telepathy',))

    def test_csv_report(self):
        report = run_verification(budget=1000, seed=0, suites=('clip_bound_invariance',))
        path = os.path.join(self.directory.name, 'report.csv')
        report.write_csv(path)
        with open(path, encoding='utf-8') as report_file:
            rows = list(csv.reader(report_file))
        self.assertEqual(rows[0], ['suite', 'label', 'analytic', 'empirical', 'tolerance', 'passed'])
        self.assertEqual(len(rows) - 1, len(report.checks))
        self.assertTrue(all(row[-1] == 'true' for row in rows[1:]))

    @unittest.skipUnless(SLOW, 'set DPSUR_SLOW_TESTS to run the full verification')
    def test_full_verification_passes(self):
        report = run_verification(seed=0, suites=SUITES)
        self.assertEqual(report.underpowered, [])
        self.assertTrue(report.passed, [check.label for check in report.checks if not check.passed])
        self.assertTrue(math.isfinite(sum(check.empirical for check in report.checks)))


if __name__ == '__main__':
    unittest.main()
