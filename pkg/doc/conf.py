# Copyright (c) 2014 Scality
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
# implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# Sphinx configuration for the blockverify documentation

import os
import sys

from importlib import metadata

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__),
                                                os.path.pardir)))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.intersphinx',
    'sphinx.ext.viewcode',
]

master_doc = 'index'
source_suffix = '.rst'
exclude_patterns = ['_build']

project = u'blockverify'
copyright = u'2015, Scality'


def get_version():
    '''Version of the installed distribution, if any'''

    try:
        return metadata.version(project)
    except metadata.PackageNotFoundError:
        return '999.0.0-dev'


release = get_version()
version = '.'.join(release.split('.')[:2])

autodoc_member_order = 'bysource'
autodoc_default_options = {'members': True, 'show-inheritance': True}

pygments_style = 'sphinx'
html_theme = 'alabaster'
htmlhelp_basename = 'blockverifydoc'

man_pages = [
    ('usage', 'blockverify', u'run, check and verify block programs',
     [u'Scality'], 1),
]

intersphinx_mapping = {'python': ('https://docs.python.org/3', None)}
