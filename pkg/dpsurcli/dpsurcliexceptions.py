#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: dpsurcliexceptions.py
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
Custom exception code for dpsurcli.

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


class InvalidParameterError(ValueError):
    """A parameter is outside of the domain of the operation."""


class MismatchedOrdersError(InvalidParameterError):
    """Two RDP curves do not share an order grid, or a curve is empty."""


class ShapeMismatchError(ValueError):
    """Model parameters, batches or gradients do not agree in shape."""


class NonFiniteValueError(ArithmeticError):
    def __init__(self, message, iteration=None):
        self.iteration = iteration
        if iteration is not None:
            message = f'{message} (iteration {iteration})'
        super().__init__(message)


class EmptyWindowError(ArithmeticError):
    """The truncation window holds (numerically) no probability mass."""


class InfeasibleBudgetError(ValueError):
    """The privacy budget cannot pay for a single accepted update."""


class ConfigurationError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__('Invalid configuration: ' + '; '.join(self.errors))


class DatasetFormatError(ValueError):
    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f'row {row}: {message}'
        super().__init__(message)


class CheckpointFormatError(ValueError):
    """A checkpoint file is corrupt or written by an unsupported version."""
