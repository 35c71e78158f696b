#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: configuration.py
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
Constants and defaults for dpsurcli.

.. _Google Python Style Guide:
   https://google.github.io/styleguide/pyguide.html

"""

__author__ = '''Willem Kuipers <willem@kuipers.co.uk>'''
__docformat__ = '''google'''
__date__ = '''17-10-2026'''
__copyright__ = '''Copyright 2026, Willem Kuipers'''
__credits__ = ["Willem Kuipers"]
__license__ = '''MIT'''
__maintainer__ = '''Willem Kuipers'''
__email__ = '''<willem@kuipers.co.uk>'''
__status__ = '''Development'''  # "Prototype", "Development", "Production".

ENCODING = 'utf-8'

# Renyi orders used by the accountant, integers only.
DEFAULT_ORDERS = tuple(range(2, 65))
DEFAULT_DELTA = 1e-5

# Upper bound for the accepted update search of the calibration.
MAX_CALIBRATION_UPDATES = 10 ** 7

# Hard cap on loop iterations, accepted or not.
MAX_TRAINING_ITERATIONS = 10 ** 6

# Selective release aborts when the window holds less mass than this.
MIN_WINDOW_MASS = 1e-12
MAX_RELEASE_DRAWS = 10 ** 6

# Phi saturates to exactly 0 or 1 beyond this.
CDF_SATURATION = 40.0

DEFAULT_VALID_CLIP_BOUND = 0.001
DEFAULT_BETA = -1.0
DEFAULT_VALID_BATCH_SIZE = 256
DEFAULT_MOMENTUM = 0.9

# Noise multiplier of the validation phase per dataset and target epsilon.
VALIDATION_NOISE_PRESETS = {'mnist': {1: 1.3, 2: 1.0, 3: 0.9, 4: 0.8},
                            'fmnist': {1: 1.3, 2: 1.3, 3: 0.8, 4: 0.8},
                            'cifar10': {1: 1.3, 2: 1.3, 3: 1.1, 4: 1.1},
                            'imdb': {1: 1.3, 2: 1.2, 3: 1.0, 4: 0.9}}
PRESET_VALID_BATCH_SIZES = {'imdb': 128}

CHECKPOINT_MAGIC = b'DPSURCKP'
CHECKPOINT_VERSION = 1

TRACE_FILENAME = 'trace.jsonl'
TRAJECTORY_FILENAME = 'trajectory.csv'
RESULT_FILENAME = 'result.json'
CHECKPOINT_FILENAME = 'checkpoint.bin'
CONFIG_FILENAME = 'config.toml'

# Monte-Carlo suites below this sample budget are reported as underpowered.
MIN_VERIFICATION_BUDGET = 10 ** 5
DEFAULT_VERIFICATION_BUDGET = 10 ** 6

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_INFEASIBLE_BUDGET = 3
EXIT_VERIFICATION_FAILURE = 4
