#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Sphinx configuration of the dpsurcli documentation.

import os
import sys

import sphinx.ext.apidoc
import sphinx_rtd_theme

project_root = os.path.dirname(os.path.abspath(os.path.dirname(__file__)))

# The api pages are regenerated on every build so new modules show up.
sphinx.ext.apidoc.main(argv=['-f', '-o', os.path.join(project_root, 'docs'),
                             os.path.join(project_root, 'dpsurcli')])

sys.path.insert(0, project_root)

import dpsurcli  # noqa: E402

extensions = ['sphinx.ext.autodoc',
              'sphinx.ext.viewcode',
              'sphinx.ext.napoleon']
napoleon_google_docstring = True

source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = ['_build']

project = 'dpsurcli'
copyright = '2026, Willem Kuipers'
version = dpsurcli.__version__
release = dpsurcli.__version__

pygments_style = 'sphinx'
html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
htmlhelp_basename = 'dpsurclidoc'
