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

'''Tests for `blockverify.utils`'''

import logging
import unittest

import mock

from blockverify import utils


class TestSplitList(unittest.TestCase):
    def test_empty_string(self):
        self.assertEqual(
            [],
            list(utils.split_list('')))

    def test_basic(self):
        self.assertEqual(
            ['/nologo', '/timeLimit:10'],
            list(utils.split_list('/nologo, /timeLimit:10')))

    def test_surrounding_spaces(self):
        self.assertEqual(
            ['1', '2'],
            list(utils.split_list('   1, 2   ')))


class TestStripSuffix(unittest.TestCase):
    def test_first_matching_suffix_wins(self):
        self.assertEqual(
            'a/b',
            utils.strip_suffix('a/b.blocks.json', ('.blocks.json', '.json')))

    def test_no_match(self):
        self.assertEqual('a.bpl', utils.strip_suffix('a.bpl', ('.json',)))


class Traced(object):
    def __init__(self, logger):
        self.logger = logger

    @utils.trace
    def double(self, x):
        return 2 * x

    @utils.trace
    def fail(self):
        raise ValueError('boom')


class TestTrace(unittest.TestCase):
    def test_logs_call_and_return(self):
        logger = mock.Mock()
        logger.isEnabledFor.return_value = True

        self.assertEqual(4, Traced(logger).double(2))

        messages = [call[0][0] for call in logger.debug.call_args_list]
        self.assertEqual(['==> %s (%d): call %s', '<== %s (%d): return %s'],
                         messages)
        self.assertEqual("{'x': 2}", logger.debug.call_args_list[0][0][3])

    def test_logs_exceptions(self):
        logger = mock.Mock()
        logger.isEnabledFor.return_value = True

        self.assertRaises(ValueError, Traced(logger).fail)
        self.assertEqual('<== %s (%d): exception %r',
                         logger.debug.call_args_list[-1][0][0])

    def test_silent_without_debug(self):
        logger = mock.Mock()
        logger.isEnabledFor.return_value = False

        self.assertEqual(6, Traced(logger).double(3))
        logger.isEnabledFor.assert_called_once_with(logging.DEBUG)
        self.assertFalse(logger.debug.called)

    def test_abbreviates_long_values(self):
        logger = mock.Mock()
        logger.isEnabledFor.return_value = True

        Traced(logger).double(list(range(100)))

        self.assertIn('...', logger.debug.call_args_list[0][0][3])
