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

'''
Block-located diagnostics shared by every verification phase, and their
rendering.
'''

import json
import operator

ERROR = 'error'
WARNING = 'warning'

SEVERITIES = (ERROR, WARNING)

PHASE_PARSE = 'parse'
PHASE_WELLFORMED = 'wellformed'
PHASE_RUNTIME = 'runtime'
PHASE_TYPECHECK = 'typecheck'
PHASE_COMPILE = 'compile'
PHASE_STATIC = 'static'

PHASES = (PHASE_PARSE, PHASE_WELLFORMED, PHASE_RUNTIME, PHASE_TYPECHECK,
          PHASE_COMPILE, PHASE_STATIC)

FORMAT_TEXT = 'text'
FORMAT_JSON = 'json'


class Diagnostic(object):  # pylint: disable=R0903
    '''A phase-tagged report attached to a block

    A :class:`Diagnostic` names the phase that produced it, a stable code and
    optionally the block (and contract slot) it is about::

        >>> d = Diagnostic(ERROR, PHASE_WELLFORMED, 'E_OLD_OUTSIDE_POST',
        ...                'old() may only be used in a postcondition',
        ...                block_id='increment#1')
        >>> d.code, d.block_id, d.slot_index
        ('E_OLD_OUTSIDE_POST', 'increment#1', None)
        >>> print(d)
        error E_OLD_OUTSIDE_POST [wellformed] at increment#1: old() may only be used in a postcondition

    :param severity: One of :const:`ERROR` or :const:`WARNING`
    :type severity: `str`
    :param phase: Phase which produced the diagnostic
    :type phase: `str`
    :param code: Stable identifier (`E_*` or `W_*`)
    :type code: `str`
    :param message: Human-readable text
    :type message: `str`
    :param block_id: Block the diagnostic is about
    :type block_id: `str`
    :param slot_index: 1-based contract slot, when applicable
    :type slot_index: `int`
    :param call_chain: Block identifiers of the active calls, outermost first
    :type call_chain: Iterable of `str`

    :raise ValueError: Unknown severity or phase
    '''

    __slots__ = ('_severity', '_phase', '_code', '_message', '_block_id',
                 '_slot_index', '_call_chain')

    def __init__(self, severity, phase, code, message, block_id=None,
                 slot_index=None, call_chain=None):
        if severity not in SEVERITIES:
            raise ValueError('Invalid severity: %r' % severity)

        if phase not in PHASES:
            raise ValueError('Invalid phase: %r' % phase)

        self._severity = severity
        self._phase = phase
        self._code = code
        self._message = message
        self._block_id = block_id
        self._slot_index = slot_index
        self._call_chain = tuple(call_chain) if call_chain is not None \
            else None

    severity = property(operator.attrgetter('_severity'))
    phase = property(operator.attrgetter('_phase'))
    code = property(operator.attrgetter('_code'))
    message = property(operator.attrgetter('_message'))
    block_id = property(operator.attrgetter('_block_id'))
    slot_index = property(operator.attrgetter('_slot_index'))
    call_chain = property(operator.attrgetter('_call_chain'))

    @property
    def is_error(self):
        return self.severity == ERROR

    def _values(self):
        return (self.severity, self.phase, self.code, self.message,
                self.block_id, self.slot_index, self.call_chain)

    def __eq__(self, other):
        if not isinstance(other, Diagnostic):
            return NotImplemented

        return self._values() == other._values()

    def __ne__(self, other):
        equal = self.__eq__(other)

        if equal is NotImplemented:
            return NotImplemented
        else:
            return not equal

    def __hash__(self):
        return hash(self._values())

    def __repr__(self):
        return ('Diagnostic(severity=%r, phase=%r, code=%r, message=%r, '
                'block_id=%r, slot_index=%r, call_chain=%r)' %
                self._values())

    def __str__(self):
        location = ''
        if self.block_id is not None:
            location = ' at %s' % self.block_id
            if self.slot_index is not None:
                location += ' (slot %d)' % self.slot_index

        return '%s %s [%s]%s: %s' % (
            self.severity, self.code, self.phase, location, self.message)

    def to_dict(self):
        '''Turn the diagnostic into a JSON-compatible `dict`.'''

        return {
            'severity': self.severity,
            'phase': self.phase,
            'code': self.code,
            'blockId': self.block_id,
            'slotIndex': self.slot_index,
            'message': self.message,
            'callChain': list(self.call_chain)
            if self.call_chain is not None else None,
        }


class BlockVerifyError(Exception):
    '''Base class of every error raised by `blockverify`

    Subclasses set :attr:`code` and :attr:`phase`. An error knows how to
    present itself as a list of :class:`Diagnostic`.
    '''

    code = 'E_INTERNAL'
    phase = PHASE_RUNTIME

    def __init__(self, message, block_id=None, code=None):
        super(BlockVerifyError, self).__init__(message)

        self.message = message
        self.block_id = block_id

        if code is not None:
            self.code = code

    @property
    def diagnostics(self):
        return [Diagnostic(ERROR, self.phase, self.code, self.message,
                           block_id=self.block_id)]


class DiagnosticsError(BlockVerifyError):
    '''An error wrapping several :class:`Diagnostic` values.'''

    def __init__(self, diagnostics, message=None):
        self._diagnostics = list(diagnostics)

        errors = [d for d in self._diagnostics if d.is_error]
        if message is None:
            message = '%d error(s): %s' % (
                len(errors), '; '.join(str(d) for d in errors))

        super(DiagnosticsError, self).__init__(message)

    @property
    def diagnostics(self):
        return list(self._diagnostics)


def count(diagnostics):
    '''Count errors and warnings

        >>> count([Diagnostic(WARNING, PHASE_TYPECHECK, 'W_DIV_SEMANTICS', '')])
        (0, 1)

    :return: `(errors, warnings)`
    :rtype: `tuple` of `int`
    '''

    errors = sum(1 for d in diagnostics if d.is_error)
    return errors, len(diagnostics) - errors


def render(diagnostics, fmt=FORMAT_TEXT):
    '''Render a list of diagnostics

    The result only depends on its arguments, so rendered text can be used
    in golden tests::

        >>> print(render([Diagnostic(ERROR, PHASE_STATIC, 'E_STATIC_POST',
        ...                          'the postcondition might not hold',
        ...                          block_id='inc#5', slot_index=1)]))
        error E_STATIC_POST [static] at inc#5 (slot 1): the postcondition might not hold
        >>> print(render([], fmt=FORMAT_JSON))
        []

    :param diagnostics: Diagnostics to render
    :type diagnostics: Iterable of :class:`Diagnostic`
    :param fmt: :const:`FORMAT_TEXT` or :const:`FORMAT_JSON`
    :type fmt: `str`

    :raise ValueError: Unknown format
    '''

    if fmt == FORMAT_TEXT:
        return '\n'.join(str(d) for d in diagnostics)
    elif fmt == FORMAT_JSON:
        return json.dumps([d.to_dict() for d in diagnostics], indent=2,
                          sort_keys=True)
    else:
        raise ValueError('Invalid format: %r' % fmt)


def summary(diagnostics):
    '''One-line summary, as printed on standard error

        >>> summary([])
        'blockverify: 0 error(s), 0 warning(s)'
    '''

    return 'blockverify: %d error(s), %d warning(s)' % count(diagnostics)
