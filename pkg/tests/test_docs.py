#!/usr/bin/env python
# -*- coding: utf-8 -*-
# File: test_docs.py
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
test_docs
----------------------------------
Tests for the sphinx configuration in `docs`.

.. _Google Python Style Guide:
   http://google.github.io/styleguide/pyguide.html

"""

import ast
import unittest
from pathlib import Path

__author__ = '''Willem Kuipers <willem@kuipers.co.uk>'''
__docformat__ = '''google'''
__date__ = '''17-10-2026'''
__copyright__ = '''Copyright 2026, Willem Kuipers'''
__credits__ = ["Willem Kuipers"]
__license__ = '''MIT'''
__maintainer__ = '''Willem Kuipers'''
__email__ = '''<willem@kuipers.co.uk>'''
__status__ = '''Development'''  # "Prototype", "Development", "Production".

CONF_FILE = Path(__file__).resolve().parent.parent / 'docs' / 'conf.py'


def assigned_names(tree):
    return {target.id for node in tree.body if isinstance(node, ast.Assign)
            for target in node.targets if isinstance(target, ast.Name)}


class TestSphinxConfiguration(unittest.TestCase):

    def setUp(self):
        """
        Test set up

        This is where you can setup things that you use throughout the tests. This method is called before every test.
        """
        self.tree = ast.parse(CONF_FILE.read_text(encoding='utf-8'))
        self.names = assigned_names(self.tree)

    def tearDown(self):
        """
        Test tear down

        This is where you should tear down what you've setup in setUp before. This method is called after every test.
        """
        pass

    def test_extensions_are_the_ones_the_docs_use(self):
        extensions = next(node.value for node in self.tree.body if isinstance(node, ast.Assign)
                          and any(getattr(target, 'id', None) == 'extensions' for target in node.targets))
        self.assertEqual(ast.literal_eval(extensions),
                         ['sphinx.ext.autodoc', 'sphinx.ext.viewcode', 'sphinx.ext.napoleon'])

    def test_only_html_output_is_configured(self):
        self.assertTrue({'project', 'version', 'release', 'master_doc', 'html_theme'} <= self.names)
        for unused in ('latex_documents', 'man_pages', 'texinfo_documents', 'latex_elements', 'templates_path'):
            self.assertNotIn(unused, self.names)

    def test_version_comes_from_the_package(self):
        source = CONF_FILE.read_text(encoding='utf-8')
        self.assertIn('version = dpsurcli.__version__', source)
        self.assertNotIn('wikiseries', source)
