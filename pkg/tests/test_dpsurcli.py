#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: test_dpsurcli.py
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
test_dpsurcli
----------------------------------
Tests for `dpsurcli` module.

.. _Google Python Style Guide:
   http://google.github.io/styleguide/pyguide.html

"""

import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout

from dpsurcli.conf import EXIT_CONFIG_ERROR, EXIT_FAILURE, EXIT_INFEASIBLE_BUDGET
from dpsurcli.dpsurcli import get_arguments, main

__author__ = '''Willem Kuipers <willem@kuipers.co.uk>'''
__docformat__ = '''google'''
__date__ = '''17-10-2026'''
__copyright__ = '''Copyright 2026, Willem Kuipers'''
__credits__ = ["Willem Kuipers"]
__license__ = '''MIT'''
__maintainer__ = '''Willem Kuipers'''
__email__ = '''<willem@kuipers.co.uk>'''
__status__ = '''Development'''  # "Prototype", "Development", "Production".

SMALL_RUN = ['--data-n', '400', '--data-d', '4', '--data-k', '2', '--train-batch-size', '50',
             '--valid-batch-size', '50', '--train-noise-multiplier', '1.5', '--valid-noise-multiplier', '1.5',
             '--max-iterations', '20']


def run_cli(*arguments):
    """Runs the cli quietly and returns what it printed."""
    output = io.StringIO()
    with redirect_stdout(output), redirect_stderr(io.StringIO()):
        main(['-L', 'critical'] + list(arguments))
    return output.getvalue()


class TestDpsurcli(unittest.TestCase):

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

    def _exit_code(self, *arguments):
        with self.assertRaises(SystemExit) as context:
            run_cli(*arguments)
        return context.exception.code

    def test_data_flags_are_not_prefixed_twice(self):
        args = get_arguments(['show-config', '--data-seed', '5', '--data-n', '300'])
        self.assertEqual((args.data_data_seed, args.data_n), (5, 300))
        self.assertIsNone(args.eta)

    def test_account_grows_with_the_updates(self):
        arguments = ['account', '-q', '0.01', '-s', '1.0', '--valid-rate', '0.01', '--valid-noise', '0.8', '--json']
        short = json.loads(run_cli(*arguments, '-t', '100'))
        long = json.loads(run_cli(*arguments, '-t', '200'))
        self.assertGreater(long['epsilon'], short['epsilon'])
        self.assertEqual(short['updates'], 100)
        self.assertIn(str(short['best_order']), short['rdp'])

    def test_account_needs_both_validation_flags(self):
        self.assertEqual(self._exit_code('account', '-q', '0.01', '-s', '1.0', '--valid-rate', '0.01', '-t', '1'),
                         EXIT_CONFIG_ERROR)

    def test_calibrate_prints_the_count(self):
        updates = int(run_cli('calibrate', '-q', '0.01', '-s', '1.0', '-e', '3.0').strip())
        self.assertGreater(updates, 0)
        summary = json.loads(run_cli('calibrate', '-q', '0.01', '-s', '1.0', '-e', '3.0', '--json'))
        self.assertEqual(summary['max_updates'], updates)

    def test_calibrate_infeasible_budget(self):
        self.assertEqual(self._exit_code('calibrate', '-q', '1.0', '-s', '0.5', '-e', '0.01'),
                         EXIT_INFEASIBLE_BUDGET)

    def test_show_config_needs_no_seed(self):
        output = run_cli('show-config', '--preset', 'mnist:2')
        self.assertIn('target_epsilon = 2.0', output)
        self.assertIn('[data]', output)

    def test_train_needs_a_seed(self):
        self.assertEqual(self._exit_code('train'), 2)

    def test_invalid_configuration(self):
        self.assertEqual(self._exit_code('show-config', '--eta', '-1'), EXIT_CONFIG_ERROR)
        config = os.path.join(self.directory.name, 'broken.toml')
        with open(config, 'w', encoding='utf-8') as config_file:
            config_file.write('[train]\nwarp_speed = 9\n')
        self.assertEqual(self._exit_code('train', '--seed', '1', '-c', config), EXIT_CONFIG_ERROR)
        with open(config, 'w', encoding='utf-8') as config_file:
            config_file.write('[train]\nmomentum = "0.9"\n\n[data]\nnoise = "x"\n')
        self.assertEqual(self._exit_code('train', '--seed', '1', '-c', config), EXIT_CONFIG_ERROR)

    def test_train_writes_the_run(self):
        output_dir = os.path.join(self.directory.name, 'run')
        summary = json.loads(run_cli('train', '--seed', '1', '--target-epsilon', '4.0', '-o', output_dir, *SMALL_RUN))
        self.assertLessEqual(summary['epsilon'], 4.0)
        self.assertTrue(os.path.exists(os.path.join(output_dir, 'result.json')))

    def test_train_infeasible_budget(self):
        output_dir = os.path.join(self.directory.name, 'run')
        self.assertEqual(self._exit_code('train', '--seed', '1', '--target-epsilon', '0.01', '-o', output_dir,
                                         *SMALL_RUN),
                         EXIT_INFEASIBLE_BUDGET)

    def test_underpowered_verification_does_not_fail(self):
        output = run_cli('verify-mechanism', '--budget', '1000', '--suite', 'acceptance')
        self.assertIn('underpowered', output)

    def test_verification_csv(self):
        path = os.path.join(self.directory.name, 'report.csv')
        run_cli('verify-mechanism', '--suite', 'clip_bound_invariance', '--csv', path)
        self.assertTrue(os.path.exists(path))

    def test_generate_data(self):
        output_dir = os.path.join(self.directory.name, 'data')
        run_cli('generate-data', '--n', '100', '--d', '3', '--k', '2', '-o', output_dir)
        for name in ('train.csv', 'test.csv', 'ground_truth.json'):
            self.assertTrue(os.path.exists(os.path.join(output_dir, name)), name)
        with open(os.path.join(output_dir, 'ground_truth.json'), encoding='utf-8') as truth_file:
            truth = json.load(truth_file)
        self.assertEqual((truth['input_dim'], truth['output_dim']), (3, 2))

    def test_invalid_logging_config(self):
        path = os.path.join(self.directory.name, 'logging.json')
        with open(path, 'w', encoding='utf-8') as config_file:
            config_file.write('{not json')
        self.assertEqual(self._exit_code('-l', path, 'generate-data', '--n', '100', '--d', '3', '--k', '2',
                                         '-o', self.directory.name),
                         EXIT_FAILURE)


if __name__ == '__main__':
    unittest.main()
