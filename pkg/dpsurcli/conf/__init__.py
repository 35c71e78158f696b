#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: __init__.py
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
from .configuration import (ENCODING,
                            DEFAULT_ORDERS,
                            DEFAULT_DELTA,
                            MAX_CALIBRATION_UPDATES,
                            MAX_TRAINING_ITERATIONS,
                            MIN_WINDOW_MASS,
                            MAX_RELEASE_DRAWS,
                            CDF_SATURATION,
                            DEFAULT_VALID_CLIP_BOUND,
                            DEFAULT_BETA,
                            DEFAULT_VALID_BATCH_SIZE,
                            DEFAULT_MOMENTUM,
                            VALIDATION_NOISE_PRESETS,
                            PRESET_VALID_BATCH_SIZES,
                            CHECKPOINT_MAGIC,
                            CHECKPOINT_VERSION,
                            TRACE_FILENAME,
                            TRAJECTORY_FILENAME,
                            RESULT_FILENAME,
                            CHECKPOINT_FILENAME,
                            CONFIG_FILENAME,
                            MIN_VERIFICATION_BUDGET,
                            DEFAULT_VERIFICATION_BUDGET,
                            EXIT_SUCCESS,
                            EXIT_FAILURE,
                            EXIT_CONFIG_ERROR,
                            EXIT_INFEASIBLE_BUDGET,
                            EXIT_VERIFICATION_FAILURE)
