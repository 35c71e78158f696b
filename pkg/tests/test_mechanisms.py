#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: test_mechanisms.py
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
test_mechanisms
----------------------------------
Tests for `mechanisms` module.

.. _Google Python Style Guide:
   http://google.github.io/styleguide/pyguide.html

"""

import math
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st
from scipy import stats

from dpsurcli.dpsurcliexceptions import (EmptyWindowError,
                                         InvalidParameterError,
                                         NonFiniteValueError)
from dpsurcli.mechanisms import (ClipMode,
                                 DivergenceDirection,
                                 LossSign,
                                 TruncatedGaussianSpec,
                                 ValidationMechanismSpec,
                                 acceptance_probability,
                                 analytic_acceptance_rate,
                                 interval_clip,
                                 log_window_mass,
                                 minimal_clip,
                                 noisy_threshold_test,
                                 selective_release,
                                 selective_release_bounds,
                                 selective_release_many,
                                 std_normal_cdf,
                                 threshold_test_frequency,
                                 truncated_normal_cdf,
                                 truncated_normal_mean,
                                 truncated_normal_pdf,
                                 truncated_renyi_divergence)
from dpsurcli.verification import quadrature_divergence

__author__ = '''Willem Kuipers <willem@kuipers.co.uk>'''
__docformat__ = '''google'''
__date__ = '''17-10-2026'''
__copyright__ = '''Copyright 2026, Willem Kuipers'''
__credits__ = ["Willem Kuipers"]
__license__ = '''MIT'''
__maintainer__ = '''Willem Kuipers'''
__email__ = '''<willem@kuipers.co.uk>'''
__status__ = '''Development'''  # "Prototype", "Development", "Production".


class TestClipping(unittest.TestCase):

    def test_minimal_clip_keeps_only_the_sign(self):
        self.assertEqual(minimal_clip(-0.3, 0.1), -0.1)
        self.assertEqual(minimal_clip(-1e-12, 0.1), -0.1)
        self.assertEqual(minimal_clip(5.0, 0.1), 0.1)
        self.assertEqual(minimal_clip(1e-9, 0.1), 0.1)

    def test_zero_counts_as_positive(self):
        self.assertEqual(minimal_clip(0.0, 0.1), 0.1)

    def test_interval_clip_clamps(self):
        self.assertEqual(interval_clip(0.05, 0.1), 0.05)
        self.assertEqual(interval_clip(-3.0, 0.1), -0.1)
        self.assertEqual(interval_clip(3.0, 0.1), 0.1)

    def test_spec_follows_its_clipping_mode(self):
        self.assertEqual(ValidationMechanismSpec(0.1, 1.0, -1.0).clip(0.05), 0.1)
        self.assertEqual(ValidationMechanismSpec(0.1, 1.0, -1.0, ClipMode.INTERVAL).clip(0.05), 0.05)
        self.assertEqual(ValidationMechanismSpec(0.1, 1.0, -1.0, 'interval').clipping, ClipMode.INTERVAL)

    def test_rejects_bad_input(self):
        with self.assertRaises(NonFiniteValueError):
            minimal_clip(math.nan, 0.1)
        with self.assertRaises(NonFiniteValueError):
            minimal_clip(math.inf, 0.1)
        with self.assertRaises(InvalidParameterError):
            minimal_clip(0.3, 0.0)

    def test_spec_rejects_bad_parameters(self):
        for bound, sigma, beta in ((0.0, 1.0, -1.0), (-1.0, 1.0, -1.0), (0.1, -1.0, -1.0), (0.1, 1.0, math.nan)):
            with self.assertRaises(InvalidParameterError):
                ValidationMechanismSpec(bound, sigma, beta)

    def test_spec_derived_quantities(self):
        spec = ValidationMechanismSpec(0.001, 0.8, -1.0)
        self.assertEqual(spec.threshold, -0.001)
        self.assertEqual(spec.sensitivity, 0.002)
        self.assertAlmostEqual(spec.noise_std, 0.0016, places=15)


class TestThresholdTest(unittest.TestCase):

    def setUp(self):
        """
        Test set up

        This is where you can setup things that you use throughout the tests. This method is called before every test.
        """
        self.rng = np.random.default_rng(1234)

    def tearDown(self):
        """
        Test tear down

        This is where you should tear down what you've setup in setUp before. This method is called after every test.
        """
        pass

    def test_closed_form_acceptance(self):
        self.assertAlmostEqual(acceptance_probability(LossSign.NEGATIVE, 0.0, 1.0), 0.6915, delta=5e-4)
        self.assertAlmostEqual(acceptance_probability('positive', 0.0, 1.0), 0.3085, delta=5e-4)
        self.assertAlmostEqual(acceptance_probability(LossSign.NEGATIVE, -1.0, 1.0), 0.5, places=12)

    def test_noiseless_test_is_a_sign_test(self):
        spec = ValidationMechanismSpec(0.1, 0.0, 0.0)
        self.assertTrue(noisy_threshold_test(-0.2, spec, self.rng).accepted)
        self.assertFalse(noisy_threshold_test(0.2, spec, self.rng).accepted)
        self.assertFalse(noisy_threshold_test(0.0, spec, self.rng).accepted)
        self.assertEqual(noisy_threshold_test(-0.2, spec, self.rng).noisy_value, -0.1)

    def test_every_test_draws_exactly_one_normal(self):
        noisy, quiet = np.random.default_rng(7), np.random.default_rng(7)
        noisy_threshold_test(0.3, ValidationMechanismSpec(0.1, 1.0, -1.0), noisy)
        noisy_threshold_test(0.3, ValidationMechanismSpec(0.1, 0.0, -1.0), quiet)
        self.assertEqual(noisy.standard_normal(), quiet.standard_normal())

    def test_frequency_matches_closed_form(self):
        spec = ValidationMechanismSpec(0.001, 1.0, -1.0)
        frequency = threshold_test_frequency(-0.5, spec, self.rng, 10 ** 5)
        expected = acceptance_probability(LossSign.NEGATIVE, -1.0, 1.0)
        self.assertLess(abs(frequency - expected), 4 * math.sqrt(expected * (1 - expected) / 10 ** 5))

    def test_acceptance_is_invariant_to_the_clip_bound(self):
        for beta in (-3.0, -1.0, 0.0, 0.5):
            for sigma in (0.8, 1.0, 1.3):
                for delta_e in (-0.5, 0.0, 0.5):
                    rates = {analytic_acceptance_rate(delta_e, ValidationMechanismSpec(bound, sigma, beta))
                             for bound in (1e-1, 1e-3, 1e-5)}
                    self.assertEqual(len(rates), 1)

    def test_zero_noise_rate_is_deterministic(self):
        self.assertEqual(analytic_acceptance_rate(-0.5, ValidationMechanismSpec(0.1, 0.0, 0.0)), 1.0)
        self.assertEqual(analytic_acceptance_rate(0.5, ValidationMechanismSpec(0.1, 0.0, 0.0)), 0.0)


class TestNormalHelpers(unittest.TestCase):

    def test_cdf_values_and_saturation(self):
        self.assertAlmostEqual(std_normal_cdf(0.5), 0.6914624612740131, places=14)
        self.assertEqual(std_normal_cdf(41.0), 1.0)
        self.assertEqual(std_normal_cdf(-41.0), 0.0)
        np.testing.assert_allclose(std_normal_cdf(np.array([-1.0, 0.0, 1.0])),
                                   [0.15865525393145707, 0.5, 0.8413447460685429])

    def test_window_mass_in_the_upper_tail(self):
        expected = math.log(stats.norm.sf(10.0) - stats.norm.sf(11.0))
        self.assertAlmostEqual(log_window_mass(10.0, 11.0), expected, delta=1e-10 * abs(expected))

    def test_window_mass_of_a_half_line(self):
        self.assertAlmostEqual(log_window_mass(-math.inf, 0.0), math.log(0.5), places=14)
        self.assertEqual(log_window_mass(-math.inf, math.inf), 0.0)

    def test_window_mass_rejects_empty_windows(self):
        with self.assertRaises(InvalidParameterError):
            log_window_mass(1.0, 1.0)

    def test_truncated_gaussian_moments(self):
        spec = TruncatedGaussianSpec(0.0, 1.0, -math.inf, 0.0)
        self.assertAlmostEqual(truncated_normal_mean(spec), -math.sqrt(2 / math.pi), places=10)
        self.assertAlmostEqual(float(truncated_normal_cdf(0.0, spec)), 1.0, places=12)
        self.assertAlmostEqual(float(truncated_normal_pdf(-1.0, spec)), 2 * math.exp(-0.5) / math.sqrt(2 * math.pi),
                               places=12)
        self.assertEqual(float(truncated_normal_pdf(0.5, spec)), 0.0)
        with self.assertRaises(InvalidParameterError):
            TruncatedGaussianSpec(0.0, 1.0, 2.0, 1.0)


class TestSelectiveRelease(unittest.TestCase):

    def setUp(self):
        """
        Test set up

        This is where you can setup things that you use throughout the tests. This method is called before every test.
        """
        self.rng = np.random.default_rng(99)

    def tearDown(self):
        """
        Test tear down

        This is where you should tear down what you've setup in setUp before. This method is called after every test.
        """
        pass

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-3.0, 3.0), st.floats(0.1, 2.0), st.floats(0.5, 3.0), st.floats(-1.0, 0.0), st.floats(0.0, 1.0))
    def test_release_always_lands_in_the_window(self, value, sensitivity, sigma, lower, margin):
        rng = np.random.default_rng(0)
        upper = sensitivity + margin
        released = selective_release(value, sensitivity, sigma, rng, lower, upper)
        self.assertGreaterEqual(released, lower)
        self.assertLessEqual(released, upper)

    def test_half_normal_mean(self):
        samples = selective_release_many(0.0, 1.0, 1.0, self.rng, 2 * 10 ** 5, -math.inf, 0.0)
        self.assertTrue(np.all(samples <= 0.0))
        standard_error = math.sqrt(1 - 2 / math.pi) / math.sqrt(samples.size)
        self.assertLess(abs(np.mean(samples) + math.sqrt(2 / math.pi)), 4 * standard_error)

    def test_query_value_is_clipped_to_the_sensitivity(self):
        samples = selective_release_many(10.0, 1.0, 0.5, self.rng, 10 ** 5)
        self.assertLess(abs(np.mean(samples) - 1.0), 4 * 0.5 / math.sqrt(10 ** 5))

    def test_unreachable_window_raises(self):
        with self.assertRaises(EmptyWindowError):
            selective_release(0.0, 1.0, 0.01, self.rng, 50.0, 51.0)
        with self.assertRaises(EmptyWindowError):
            selective_release_many(0.0, 1.0, 0.01, self.rng, 10, 50.0, 51.0)

    def test_rejects_bad_parameters(self):
        with self.assertRaises(InvalidParameterError):
            selective_release(0.0, 0.0, 1.0, self.rng)
        with self.assertRaises(InvalidParameterError):
            selective_release(0.0, 1.0, 1.0, self.rng, 1.0, 0.0)
        with self.assertRaises(NonFiniteValueError):
            selective_release(math.nan, 1.0, 1.0, self.rng)


class TestTruncatedDivergence(unittest.TestCase):

    def test_untruncated_divergence_is_the_gaussian_one(self):
        for direction in DivergenceDirection:
            for sigma, alpha in ((1.0, 2.0), (0.7, 5.5), (2.0, 32.0)):
                self.assertAlmostEqual(truncated_renyi_divergence(direction, 1.3, sigma, -math.inf, math.inf, alpha),
                                       alpha / (2 * sigma ** 2), places=12)

    def test_agrees_with_quadrature(self):
        cases = ((DivergenceDirection.ZERO_VS_MU, 1.0, 1.0, -math.inf, 0.5, 3.0),
                 (DivergenceDirection.MU_VS_ZERO, 1.0, 1.0, -math.inf, 0.5, 3.0),
                 (DivergenceDirection.ZERO_VS_MU, 0.8, 1.5, -0.4, 1.6, 2.5),
                 (DivergenceDirection.MU_VS_ZERO, 1.7, 0.9, -1.0, 2.0, 6.0))
        for case in cases:
            self.assertAlmostEqual(truncated_renyi_divergence(*case), quadrature_divergence(*case), delta=1e-8)

    def test_half_line_divergence_matches_the_cdf_ratios(self):
        for mu, sigma, upper, alpha in ((1.0, 1.0, 0.5, 3), (0.5, 2.0, -2.0, 16), (2.0, 0.5, 2.0, 4)):
            first, second = selective_release_bounds(mu, sigma, upper, alpha)
            ceiling = alpha / (2 * sigma ** 2)
            self.assertAlmostEqual(
                truncated_renyi_divergence(DivergenceDirection.ZERO_VS_MU, mu, sigma, -math.inf, upper, alpha),
                ceiling + math.log(first) / (alpha - 1), delta=1e-10)
            self.assertAlmostEqual(
                truncated_renyi_divergence(DivergenceDirection.MU_VS_ZERO, mu, sigma, -math.inf, upper, alpha),
                ceiling + math.log(second) / (alpha - 1), delta=1e-10)

    def test_cdf_ratios_never_exceed_one(self):
        for mu in (0.5, 1.0, 2.0):
            for sigma in (0.5, 1.0, 2.0):
                for upper in (-2.0, 0.0, 2.0):
                    for alpha in (2, 4, 16, 64):
                        first, second = selective_release_bounds(mu, sigma, upper, alpha)
                        self.assertLessEqual(first, 1.0 + 1e-12)
                        self.assertLessEqual(second, 1.0 + 1e-12)

    def test_rejects_bad_parameters(self):
        with self.assertRaises(InvalidParameterError):
            truncated_renyi_divergence('zero_vs_mu', 1.0, 1.0, -math.inf, 0.0, 1.0)
        with self.assertRaises(InvalidParameterError):
            truncated_renyi_divergence('zero_vs_mu', 0.0, 1.0, -math.inf, 0.0, 2.0)
        with self.assertRaises(ValueError):
            truncated_renyi_divergence('sideways', 1.0, 1.0, -math.inf, 0.0, 2.0)


if __name__ == '__main__':
    unittest.main()
