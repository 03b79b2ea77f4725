# Copyright (c) 2015 Scality
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

'''Tests for `blockverify.configuration`'''

import io
import os.path
import shutil
import tempfile
import unittest

from blockverify import configuration
from blockverify.configuration import ConfigurationError, RunConfig


def from_string(text, base=None):
    return RunConfig.from_stream(io.StringIO(text), 'test.ini', base=base)


class TestRunConfig(unittest.TestCase):
    def test_defaults(self):
        config = RunConfig()

        self.assertIsNone(config.entry)
        self.assertEqual((), config.args)
        self.assertIsNone(config.boogie_path)
        self.assertEqual('text', config.format)

    def test_unknown_setting(self):
        self.assertRaises(ConfigurationError, RunConfig, verbose=True)

    def test_positive_settings(self):
        for value in (0, -1, '10'):
            self.assertRaises(ConfigurationError, RunConfig,
                              depth_limit=value)
            self.assertRaises(ConfigurationError, RunConfig,
                              timeout_secs=value)

    def test_invalid_format(self):
        self.assertRaises(ConfigurationError, RunConfig, format='xml')

    def test_replace_ignores_none(self):
        config = RunConfig(depth_limit=5).replace(depth_limit=None,
                                                   entry='main')

        self.assertEqual(5, config.depth_limit)
        self.assertEqual('main', config.entry)

    def test_equality(self):
        self.assertEqual(RunConfig(seed=1), RunConfig(seed=1))
        self.assertNotEqual(RunConfig(seed=1), RunConfig(seed=2))
        self.assertFalse(RunConfig() == object())

    def test_unknown_attribute(self):
        self.assertRaises(AttributeError, getattr, RunConfig(), 'verbose')


class TestFromStream(unittest.TestCase):
    def test_settings(self):
        config = from_string(
            u'[run]\n'
            u'depth_limit = 50\n'
            u'seed = 7\n'
            u'[boogie]\n'
            u'path = /opt/boogie/Boogie\n'
            u'timeout_secs = 5\n')

        self.assertEqual(50, config.depth_limit)
        self.assertEqual(7, config.seed)
        self.assertEqual('/opt/boogie/Boogie', config.boogie_path)
        self.assertEqual(5, config.timeout_secs)

    def test_base(self):
        config = from_string(u'[run]\nseed = 3\n',
                             base=RunConfig(depth_limit=20))

        self.assertEqual(20, config.depth_limit)
        self.assertEqual(3, config.seed)

    def test_unknown_section(self):
        self.assertRaises(ConfigurationError, from_string,
                          u'[ring:paris]\nlocation = paris\n')

    def test_unknown_option(self):
        self.assertRaises(ConfigurationError, from_string,
                          u'[run]\nentry = main\n')

    def test_invalid_integer(self):
        self.assertRaises(ConfigurationError, from_string,
                          u'[run]\ndepth_limit = many\n')

    def test_empty_path(self):
        self.assertRaises(ConfigurationError, from_string,
                          u'[boogie]\npath =\n')

    def test_unparsable(self):
        self.assertRaises(ConfigurationError, from_string, u'depth_limit = 1')

    def test_error_code(self):
        try:
            from_string(u'[run]\ndepth_limit = 0\n')
        except ConfigurationError as exc:
            self.assertEqual('E_CONFIG', exc.code)
        else:
            self.fail('ConfigurationError not raised')


class TestLoad(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def write(self, text):
        path = os.path.join(self.tmpdir, 'blockverify.ini')
        with io.open(path, 'w', encoding='utf-8') as fd:
            fd.write(text)
        return path

    def test_environment_overrides_file(self):
        path = self.write(u'[boogie]\npath = /from/file\n')

        config = configuration.load(
            path, environ={configuration.BOOGIE_ENVIRONMENT_VARIABLE:
                           '/from/env'})

        self.assertEqual('/from/env', config.boogie_path)

    def test_file_only(self):
        path = self.write(u'[boogie]\npath = /from/file\n')

        self.assertEqual('/from/file',
                         configuration.load(path, environ={}).boogie_path)

    def test_empty_environment_variable(self):
        config = configuration.load(
            self.write(u''),
            environ={configuration.BOOGIE_ENVIRONMENT_VARIABLE: ''})

        self.assertIsNone(config.boogie_path)

    def test_missing_explicit_file(self):
        self.assertRaises(ConfigurationError, configuration.load,
                          os.path.join(self.tmpdir, 'missing.ini'),
                          environ={})

    def test_flags_override_everything(self):
        path = self.write(u'[run]\ndepth_limit = 50\n')

        config = configuration.load(path, environ={}).replace(depth_limit=9)

        self.assertEqual(9, config.depth_limit)
