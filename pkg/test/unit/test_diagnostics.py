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

'''Tests for `blockverify.diagnostics`'''

import json
import unittest

from blockverify import diagnostics
from blockverify.diagnostics import Diagnostic


def make(code='E_STATIC_POST', severity=diagnostics.ERROR, **kwargs):
    return Diagnostic(severity, diagnostics.PHASE_STATIC, code, 'message',
                      **kwargs)


class TestDiagnostic(unittest.TestCase):
    def test_equality(self):
        self.assertEqual(make(block_id='f#1'), make(block_id='f#1'))
        self.assertNotEqual(make(block_id='f#1'), make(block_id='f#2'))
        self.assertFalse(make() == 'E_STATIC_POST')
        self.assertEqual(hash(make(slot_index=1)), hash(make(slot_index=1)))

    def test_call_chain_is_a_tuple(self):
        d = make(call_chain=['main#0', 'f#0'])
        self.assertEqual(('main#0', 'f#0'), d.call_chain)

    def test_str_without_location(self):
        self.assertEqual('warning W_DIV_SEMANTICS [static]: message',
                         str(make('W_DIV_SEMANTICS', diagnostics.WARNING)))

    def test_to_dict(self):
        self.assertEqual({
            'severity': 'error',
            'phase': 'static',
            'code': 'E_STATIC_POST',
            'blockId': 'f#4',
            'slotIndex': 2,
            'message': 'message',
            'callChain': None,
        }, make(block_id='f#4', slot_index=2).to_dict())

    def test_invalid_severity(self):
        self.assertRaises(ValueError, Diagnostic, 'fatal',
                          diagnostics.PHASE_STATIC, 'E_X', '')


class TestRender(unittest.TestCase):
    def test_text_is_one_line_per_diagnostic(self):
        text = diagnostics.render([make(block_id='f#1'), make()])
        self.assertEqual(2, len(text.splitlines()))

    def test_json(self):
        data = json.loads(diagnostics.render([make(block_id='f#1')],
                                             diagnostics.FORMAT_JSON))
        self.assertEqual('f#1', data[0]['blockId'])

    def test_unknown_format(self):
        self.assertRaises(ValueError, diagnostics.render, [], 'xml')

    def test_summary_counts(self):
        self.assertEqual(
            'blockverify: 1 error(s), 1 warning(s)',
            diagnostics.summary([
                make(), make('W_DIV_SEMANTICS', diagnostics.WARNING)]))


class TestErrors(unittest.TestCase):
    def test_block_verify_error_diagnostics(self):
        exc = diagnostics.BlockVerifyError('oops', block_id='f#0',
                                           code='E_X')
        [d] = exc.diagnostics
        self.assertEqual(('E_X', 'f#0', 'oops'),
                         (d.code, d.block_id, d.message))

    def test_diagnostics_error_message_lists_errors_only(self):
        exc = diagnostics.DiagnosticsError([
            make(), make('W_DIV_SEMANTICS', diagnostics.WARNING)])

        self.assertTrue(str(exc).startswith('1 error(s): '))
        self.assertEqual(2, len(exc.diagnostics))
