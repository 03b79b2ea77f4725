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
Compilation of typed block programs to Boogie, and mapping of the verdicts
Boogie prints back to blocks.

Every block becomes a `procedure`. A list of integers `L` is encoded as a
map `L_data` indexed from 1 and a length `L_len`. Every proof obligation
line ends with a `// @src <blockId> <kind>` comment, mirrored by a
:class:`SourceMap` entry.
'''

import collections
import json
import logging
import operator
import re

import eventlet
import eventlet.green.subprocess

from blockverify import diagnostics
from blockverify import language_model as lm
from blockverify import static_frontend
from blockverify import utils

LOGGER = logging.getLogger(__name__)

PRELUDE_VERSION = 1

PRELUDE = (
    '// blockverify prelude v%d' % PRELUDE_VERSION,
    '// A list of integers L is encoded as the map L_data, indexed from 1,',
    '// and the length L_len, which is never negative.',
    '// Proof obligations end with a "// @src <blockId> <kind>" comment.',
)

BPL_SUFFIX = '.bpl'
SRCMAP_SUFFIX = '.srcmap.json'

INDENT = '  '

PRE = 'pre'
POST = 'post'
ASSERT = 'assert'
INVARIANT_ENTRY = 'invariantEntry'
INVARIANT_MAINTAIN = 'invariantMaintain'
CALL_PRE = 'callPre'
INDEX_BOUNDS = 'indexBounds'
REPEAT_COUNT = 'repeatCount'
DIVISOR = 'divisor'
MISSING_REPORT = 'missingReport'

OBLIGATION_KINDS = (PRE, POST, ASSERT, INVARIANT_ENTRY, INVARIANT_MAINTAIN,
                    CALL_PRE, INDEX_BOUNDS, REPEAT_COUNT, DIVISOR,
                    MISSING_REPORT)

STATIC_CODES = {
    PRE: 'E_STATIC_PRE',
    POST: 'E_STATIC_POST',
    ASSERT: 'E_STATIC_ASSERT',
    INVARIANT_ENTRY: 'E_STATIC_INVARIANT_ENTRY',
    INVARIANT_MAINTAIN: 'E_STATIC_INVARIANT_MAINTAIN',
    CALL_PRE: 'E_STATIC_CALL_PRE',
    INDEX_BOUNDS: 'E_STATIC_INDEX_BOUNDS',
    REPEAT_COUNT: 'E_STATIC_REPEAT_COUNT',
    DIVISOR: 'E_STATIC_DIVISOR',
    MISSING_REPORT: 'E_STATIC_MISSING_REPORT',
}

BOOGIE_KEYWORDS = frozenset([
    'assert', 'assume', 'axiom', 'bool', 'break', 'call', 'complete',
    'const', 'div', 'else', 'ensures', 'exists', 'extends', 'false',
    'finite', 'forall', 'free', 'function', 'goto', 'havoc', 'if',
    'implementation', 'int', 'invariant', 'lambda', 'mod', 'modifies',
    'old', 'procedure', 'real', 'requires', 'return', 'returns', 'then',
    'true', 'type', 'unique', 'var', 'where', 'while', 'yield',
    # Out-parameter of reporters and predicates
    'result',
])

VERIFIED = 'verified'
ERRORS = 'errors'
TOOL_FAILURE = 'toolFailure'

# Operator precedence levels, loosest first
IFF, IMPLIES, LOGICAL, RELATIONAL, ADDITIVE, MULTIPLICATIVE, UNARY, ATOM = \
    range(8)

ARITH_SYNTAX = {
    'add': ('+', ADDITIVE),
    'sub': ('-', ADDITIVE),
    'mul': ('*', MULTIPLICATIVE),
    'div': ('div', MULTIPLICATIVE),
    'mod': ('mod', MULTIPLICATIVE),
}

COMPARE_SYNTAX = {
    'eq': '==',
    'neq': '!=',
    'lt': '<',
    'le': '<=',
    'gt': '>',
    'ge': '>=',
}

BOOGIE_TYPES = {
    static_frontend.INT: 'int',
    static_frontend.BOOL: 'bool',
}


class CompileError(diagnostics.DiagnosticsError):
    '''Exception raised when a program uses constructs Boogie can't express.'''

    code = 'E_UNSUPPORTED_CONSTRUCT'
    phase = diagnostics.PHASE_COMPILE


class ToolError(diagnostics.BlockVerifyError):
    '''Exception raised when the Boogie executable can't be run.'''

    code = 'E_BOOGIE_EXEC'
    phase = diagnostics.PHASE_STATIC


class SourceEntry(object):  # pylint: disable=R0903
    '''Location of one proof obligation in emitted Boogie text

    :param line: 1-based line number
    :param col: 1-based column of the first token of the line
    :param block_id: Block the obligation comes from
    :param kind: One of :const:`OBLIGATION_KINDS`
    :param slot: 1-based contract or invariant slot, if any
    '''

    __slots__ = '_line', '_col', '_block_id', '_kind', '_slot',

    def __init__(self, line, col, block_id, kind, slot=None):
        if kind not in OBLIGATION_KINDS:
            raise ValueError('Invalid obligation kind: %r' % kind)

        self._line = line
        self._col = col
        self._block_id = block_id
        self._kind = kind
        self._slot = slot

    line = property(operator.attrgetter('_line'))
    col = property(operator.attrgetter('_col'))
    block_id = property(operator.attrgetter('_block_id'))
    kind = property(operator.attrgetter('_kind'))
    slot = property(operator.attrgetter('_slot'))

    def _values(self):
        return (self.line, self.col, self.block_id, self.kind, self.slot)

    def __eq__(self, other):
        if not isinstance(other, SourceEntry):
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
        return ('SourceEntry(line=%r, col=%r, block_id=%r, kind=%r, '
                'slot=%r)' % self._values())

    @property
    def owner(self):
        '''Name of the block or script owning :attr:`block_id`.'''

        return self.block_id.split('#', 1)[0]

    def to_dict(self):
        return {
            'line': self.line,
            'col': self.col,
            'blockId': self.block_id,
            'kind': self.kind,
            'slot': self.slot,
        }


class SourceMap(object):
    '''Maps Boogie locations back to blocks

        >>> sm = SourceMap([SourceEntry(12, 3, 'f#7', ASSERT)])
        >>> sm.lookup(12, 3).block_id
        'f#7'
        >>> sm.lookup(12, 9).block_id
        'f#7'
        >>> sm.lookup(13, 3) is None
        True
    '''

    def __init__(self, entries=()):
        self._entries = list(entries)
        self._by_position = dict(
            ((entry.line, entry.col), entry) for entry in self._entries)
        self._by_line = {}
        for entry in self._entries:
            self._by_line.setdefault(entry.line, entry)

    entries = property(lambda self: list(self._entries))

    def lookup(self, line, col=None):
        '''Find the entry at `(line, col)`, falling back to the line only.'''

        entry = self._by_position.get((line, col))
        if entry is None:
            entry = self._by_line.get(line)

        return entry

    def __eq__(self, other):
        if not isinstance(other, SourceMap):
            return NotImplemented

        return self._entries == other._entries

    def __ne__(self, other):
        equal = self.__eq__(other)

        if equal is NotImplemented:
            return NotImplemented
        else:
            return not equal

    __hash__ = None

    def __len__(self):
        return len(self._entries)

    def to_json(self):
        return json.dumps({
            'preludeVersion': PRELUDE_VERSION,
            'entries': [entry.to_dict() for entry in self._entries],
        }, indent=2, sort_keys=True) + '\n'

    @classmethod
    def from_json(cls, text):
        '''Load a sidecar written by :meth:`to_json`

        :raise ValueError: Invalid document or prelude version mismatch
        '''

        data = json.loads(text)

        if data.get('preludeVersion') != PRELUDE_VERSION:
            raise ValueError('Unsupported prelude version: %r' %
                             data.get('preludeVersion'))

        return cls(
            SourceEntry(e['line'], e['col'], e['blockId'], e['kind'],
                        e.get('slot'))
            for e in data['entries'])


class BoogieUnit(object):  # pylint: disable=R0903
    '''Compiled Boogie text together with its :class:`SourceMap`.'''

    __slots__ = '_text', '_source_map',

    def __init__(self, text, source_map):
        self._text = text
        self._source_map = source_map

    text = property(operator.attrgetter('_text'), doc='Boogie source')
    source_map = property(operator.attrgetter('_source_map'))
    prelude_version = PRELUDE_VERSION

    def write(self, bpl_path):
        '''Write the `.bpl` file and its `.srcmap.json` sidecar

        :return: Path of the sidecar
        :raise IOError: Files can't be written
        '''

        srcmap_path = sidecar_path(bpl_path)

        with open(bpl_path, 'w', encoding='utf-8', newline='\n') as fd:
            fd.write(self.text)

        with open(srcmap_path, 'w', encoding='utf-8', newline='\n') as fd:
            fd.write(self.source_map.to_json())

        return srcmap_path


def sidecar_path(bpl_path):
    '''Path of the source map sidecar of a `.bpl` file

        >>> sidecar_path('lessons/increment.bpl')
        'lessons/increment.srcmap.json'
    '''

    return utils.strip_suffix(bpl_path, (BPL_SUFFIX,)) + SRCMAP_SUFFIX


_Term = collections.namedtuple('_Term', 'text level')
_ListRef = collections.namedtuple('_ListRef', 'data length')


def _wrap(term, level):
    if term.level >= level:
        return term.text
    else:
        return '(%s)' % term.text


class _Unsupported(Exception):
    def __init__(self, block_id, message):
        super(_Unsupported, self).__init__(message)
        self.block_id = block_id
        self.message = message


class _Context(object):  # pylint: disable=R0903
    '''Where an expression is compiled

    Pure contexts (contracts, invariants, loop conditions, quantifier
    bodies) can't run statements, so calls are rejected and no obligation
    is emitted for them.
    '''

    __slots__ = ('pure', 'where', 'bound')

    def __init__(self, pure, where, bound=None):
        self.pure = pure
        self.where = where
        self.bound = dict(bound or {})

    def bind(self, name, text):
        bound = dict(self.bound)
        bound[name] = text
        return _Context(True, 'quantifier bodies', bound)


STATEMENT = _Context(False, 'statements')


class _ProcedureCompiler(object):
    '''Compiles one block to a Boogie procedure.'''

    def __init__(self, typed, block):
        self.typed = typed
        self.program = typed.program
        self.block = block
        self.lines = []
        self.fresh_vars = []
        self.counters = collections.defaultdict(int)
        self.depth = 1

    def emit(self, text, src=None):
        self.lines.append((self.depth, text, src))

    def fresh(self, prefix, type_):
        self.counters[prefix] += 1
        name = '__%s%d' % (prefix, self.counters[prefix])

        if type_ is static_frontend.INTLIST:
            self.fresh_vars.append(('%s_data' % name, '[int]int'))
            self.fresh_vars.append(('%s_len' % name, 'int'))
        elif type_ is not None:
            self.fresh_vars.append((name, BOOGIE_TYPES[type_]))

        return name

    def var_type(self, name):
        return self.typed.type_of_var(self.block.name, name)

    def param_type(self, block, name):
        return self.typed.type_of_var(block.name, name)

    def is_list(self, expr):
        return self.typed.type_of_expr(expr) is static_frontend.INTLIST

    # Expressions

    def expr(self, expr, ctx):
        if self.is_list(expr):
            raise _Unsupported(expr.block_id,
                               'a list cannot be used as a value here')

        method = getattr(self, '_expr_%s' % type(expr).__name__)
        return method(expr, ctx)

    def text(self, expr, ctx):
        return self.expr(expr, ctx).text

    def _expr_Literal(self, expr, ctx):
        value = expr.value

        if lm.kind_of(value) == lm.BOOL:
            return _Term('true' if value else 'false', ATOM)

        value = int(value)
        return _Term('%d' % value, ATOM if value >= 0 else UNARY)

    def _expr_VarRef(self, expr, ctx):
        return _Term(ctx.bound.get(expr.name, expr.name), ATOM)

    def _expr_Arith(self, expr, ctx):
        symbol, level = ARITH_SYNTAX[expr.op]
        left = self.expr(expr.left, ctx)
        right = self.expr(expr.right, ctx)

        if expr.op in ('div', 'mod') and not ctx.pure:
            self.emit('assert %s != 0;' % _wrap(right, ADDITIVE),
                      (expr.block_id, DIVISOR, None))

        return _Term('%s %s %s' % (_wrap(left, level), symbol,
                                   _wrap(right, level + 1)), level)

    def _expr_Compare(self, expr, ctx):
        if self.is_list(expr.left) or self.is_list(expr.right):
            raise _Unsupported(expr.block_id,
                               'lists cannot be compared with each other')

        left = self.expr(expr.left, ctx)
        right = self.expr(expr.right, ctx)

        return _Term('%s %s %s' % (_wrap(left, ADDITIVE),
                                   COMPARE_SYNTAX[expr.op],
                                   _wrap(right, ADDITIVE)), RELATIONAL)

    def _expr_BoolOp(self, expr, ctx):
        operands = [self.expr(operand, ctx) for operand in expr.operands]
        op = expr.op

        if op in ('and', 'or'):
            if not operands:
                return _Term('true' if op == 'and' else 'false', ATOM)
            elif len(operands) == 1:
                return operands[0]

            symbol = ' && ' if op == 'and' else ' || '
            return _Term(symbol.join(_wrap(o, RELATIONAL) for o in operands),
                         LOGICAL)
        elif op == 'not':
            return _Term('!%s' % _wrap(operands[0], UNARY), UNARY)
        elif op == 'implies':
            return _Term('%s ==> %s' % (_wrap(operands[0], LOGICAL),
                                        _wrap(operands[1], IMPLIES)),
                         IMPLIES)
        elif op == 'iff':
            return _Term('%s <==> %s' % (_wrap(operands[0], IMPLIES),
                                         _wrap(operands[1], IMPLIES)), IFF)
        elif op == 'xor':
            return _Term('%s != %s' % (_wrap(operands[0], ADDITIVE),
                                       _wrap(operands[1], ADDITIVE)),
                         RELATIONAL)
        else:
            raise AssertionError('Unknown operator %r' % op)

    def _expr_Old(self, expr, ctx):
        return _Term('old(%s)' % expr.var, ATOM)

    def _expr_Result(self, expr, ctx):
        return _Term('result', ATOM)

    def _expr_Quantifier(self, expr, ctx):
        domain = expr.domain

        if isinstance(domain, lm.IntRange):
            var = expr.var
            lo = _wrap(self.expr(domain.lo, ctx), ADDITIVE)
            hi = _wrap(self.expr(domain.hi, ctx), ADDITIVE)
            inner = ctx.bind(expr.var, var)
        else:
            items = self.list_ref(domain.list, ctx)
            var = self.fresh('q', None)
            lo, hi = '1', items.length
            inner = ctx.bind(expr.var, '%s[%s]' % (items.data, var))

        body = self.expr(expr.body, inner)
        bounds = '%s <= %s && %s <= %s' % (lo, var, var, hi)

        if expr.quantifier == 'forall':
            text = '(forall %s: int :: %s ==> %s)' % (
                var, bounds, _wrap(body, IMPLIES))
        else:
            text = '(exists %s: int :: %s && %s)' % (
                var, bounds, _wrap(body, RELATIONAL))

        return _Term(text, ATOM)

    def _expr_Item(self, expr, ctx):
        items = self.list_ref(expr.list, ctx)
        index = self.expr(expr.index, ctx)

        if not ctx.pure:
            self.emit('assert 1 <= %s && %s <= %s;' %
                      (_wrap(index, ADDITIVE), _wrap(index, ADDITIVE),
                       items.length),
                      (expr.block_id, INDEX_BOUNDS, None))

        return _Term('%s[%s]' % (items.data, index.text), ATOM)

    def _expr_LengthOf(self, expr, ctx):
        return _Term(self.list_ref(expr.list, ctx).length, ATOM)

    def _expr_Contains(self, expr, ctx):
        items = self.list_ref(expr.list, ctx)
        elem = self.expr(expr.elem, ctx)
        var = self.fresh('q', None)

        return _Term(
            '(exists %s: int :: 1 <= %s && %s <= %s && %s[%s] == %s)' %
            (var, var, var, items.length, items.data, var,
             _wrap(elem, ADDITIVE)), ATOM)

    def _expr_Call(self, expr, ctx):
        return _Term(self.call(expr, ctx), ATOM)

    def list_ref(self, expr, ctx):
        '''Compile a list-valued expression to its map and length.'''

        if isinstance(expr, lm.VarRef) and expr.name not in ctx.bound:
            return _ListRef('%s_data' % expr.name, '%s_len' % expr.name)
        elif isinstance(expr, lm.Old):
            return _ListRef('old(%s_data)' % expr.var,
                            'old(%s_len)' % expr.var)
        elif isinstance(expr, lm.Result):
            return _ListRef('result_data', 'result_len')
        elif isinstance(expr, lm.Literal) and \
                lm.kind_of(expr.value) == lm.LIST:
            if ctx.pure:
                raise _Unsupported(expr.block_id,
                                   'list literals are not supported in %s' %
                                   ctx.where)

            name = self.fresh('tmp', static_frontend.INTLIST)
            self.emit('%s_len := %d;' % (name, len(expr.value)))
            for (index, item) in enumerate(expr.value):
                self.emit('%s_data[%d] := %d;' % (name, index + 1, item))
            return _ListRef('%s_data' % name, '%s_len' % name)
        elif isinstance(expr, lm.Call):
            name = self.call(expr, ctx)
            return _ListRef('%s_data' % name, '%s_len' % name)
        else:
            raise _Unsupported(expr.block_id,
                               'this list expression is not supported')

    def call_args(self, callee, args, ctx):
        texts = []

        for (param, arg) in zip(callee.params, args):
            if self.param_type(callee, param.name) is \
                    static_frontend.INTLIST:
                texts.extend(self.list_ref(arg, ctx))
            else:
                texts.append(self.text(arg, ctx))

        return ', '.join(texts)

    def call(self, node, ctx):
        '''Hoist a reporter call into a fresh variable, returning its name.'''

        if ctx.pure:
            raise _Unsupported(node.block_id,
                               'calling %r is not supported in %s' %
                               (node.block, ctx.where))

        callee = self.program.get_block(node.block)
        args = self.call_args(callee, node.args, ctx)
        result_type = self.typed.result_type(callee.name)
        name = self.fresh('tmp', result_type)

        if result_type is static_frontend.INTLIST:
            targets = '%s_data, %s_len' % (name, name)
        else:
            targets = name

        self.emit('call %s := %s(%s);' % (targets, callee.name, args),
                  (node.block_id, CALL_PRE, None))

        return name

    # Statements

    def stmts(self, stmts):
        for stmt in stmts:
            method = getattr(self, '_stmt_%s' % type(stmt).__name__)
            method(stmt)

    def block_of(self, stmts):
        self.depth += 1
        try:
            self.stmts(stmts)
        finally:
            self.depth -= 1

    def _stmt_DeclareLocals(self, stmt):
        for name in stmt.names:
            type_ = self.var_type(name)
            if type_ is static_frontend.INT:
                self.emit('%s := 0;' % name)
            elif type_ is static_frontend.BOOL:
                self.emit('%s := false;' % name)
            elif type_ is static_frontend.INTLIST:
                self.emit('%s_len := 0;' % name)

    def _stmt_SetVar(self, stmt):
        if self.var_type(stmt.name) is static_frontend.INTLIST:
            items = self.list_ref(stmt.value, STATEMENT)
            self.emit('%s_data := %s;' % (stmt.name, items.data))
            self.emit('%s_len := %s;' % (stmt.name, items.length))
        else:
            self.emit('%s := %s;' % (stmt.name,
                                     self.text(stmt.value, STATEMENT)))

    def _stmt_ChangeVar(self, stmt):
        delta = self.expr(stmt.delta, STATEMENT)
        self.emit('%s := %s + %s;' % (stmt.name, stmt.name,
                                      _wrap(delta, MULTIPLICATIVE)))

    def _stmt_IfElse(self, stmt):
        cond = self.text(stmt.cond, STATEMENT)

        self.emit('if (%s) {' % cond)
        self.block_of(stmt.then_branch)
        if stmt.else_branch:
            self.emit('} else {')
            self.block_of(stmt.else_branch)
        self.emit('}')

    def invariants(self, loop):
        ctx = _Context(True, 'loop invariants')
        texts = [self.text(slot, ctx) for slot in loop.invariant]

        for (index, (slot, text)) in enumerate(zip(loop.invariant, texts)):
            self.emit('assert %s;' % text,
                      (slot.block_id, INVARIANT_ENTRY, index + 1))

        return texts

    def loop(self, loop, cond, counter_invariant, texts, tail=None):
        self.emit('while (%s)' % cond)

        self.depth += 1
        if counter_invariant is not None:
            self.emit('invariant %s;' % counter_invariant,
                      (loop.block_id, INVARIANT_MAINTAIN, None))
        for (index, (slot, text)) in enumerate(zip(loop.invariant, texts)):
            self.emit('invariant %s;' % text,
                      (slot.block_id, INVARIANT_MAINTAIN, index + 1))
        self.depth -= 1

        self.emit('{')
        self.block_of(loop.body)
        if tail is not None:
            self.depth += 1
            self.emit(tail)
            self.depth -= 1
        self.emit('}')

    def _stmt_RepeatN(self, stmt):
        count = self.text(stmt.count, STATEMENT)
        limit = self.fresh('tmp', static_frontend.INT)
        self.emit('%s := %s;' % (limit, count))
        self.emit('assert 0 <= %s;' % limit,
                  (stmt.block_id, REPEAT_COUNT, None))

        counter = self.fresh('k', static_frontend.INT)
        self.emit('%s := 0;' % counter)

        texts = self.invariants(stmt)
        self.loop(stmt, '%s < %s' % (counter, limit),
                  '0 <= %s && %s <= %s' % (counter, counter, limit), texts,
                  tail='%s := %s + 1;' % (counter, counter))

    def _stmt_RepeatUntil(self, stmt):
        texts = self.invariants(stmt)
        cond = self.expr(stmt.cond, _Context(True, 'loop conditions'))
        self.loop(stmt, '!%s' % _wrap(cond, UNARY), None, texts)

    def _stmt_Assert(self, stmt):
        cond = self.text(stmt.cond, STATEMENT)
        self.emit('assert %s;' % cond, (stmt.block_id, ASSERT, None))

    def _stmt_Report(self, stmt):
        if self.typed.result_type(self.block.name) is \
                static_frontend.INTLIST:
            items = self.list_ref(stmt.value, STATEMENT)
            self.emit('result_data := %s;' % items.data)
            self.emit('result_len := %s;' % items.length)
        else:
            self.emit('result := %s;' % self.text(stmt.value, STATEMENT))

        self.emit('return;')

    def _stmt_CallCommand(self, stmt):
        callee = self.program.get_block(stmt.block)
        args = self.call_args(callee, stmt.args, STATEMENT)
        self.emit('call %s(%s);' % (callee.name, args),
                  (stmt.block_id, CALL_PRE, None))

    def _stmt_AddToList(self, stmt):
        elem = self.text(stmt.elem, STATEMENT)
        self.emit('%s_data[%s_len + 1] := %s;' % (stmt.list, stmt.list,
                                                  elem))
        self.emit('%s_len := %s_len + 1;' % (stmt.list, stmt.list))

    def _stmt_ReplaceItem(self, stmt):
        index = self.expr(stmt.index, STATEMENT)
        elem = self.text(stmt.elem, STATEMENT)

        self.emit('assert 1 <= %s && %s <= %s_len;' %
                  (_wrap(index, ADDITIVE), _wrap(index, ADDITIVE), stmt.list),
                  (stmt.block_id, INDEX_BOUNDS, None))
        self.emit('%s_data[%s] := %s;' % (stmt.list, index.text, elem))

    # Procedure

    def check_names(self):
        block = self.block
        list_names = [name for name in self.program.global_names
                      if self.typed.global_type(name) is
                      static_frontend.INTLIST]
        names = [block.name] + list(block.param_names) + \
            list(block.local_names())

        for name in block.param_names + block.local_names():
            if self.var_type(name) is static_frontend.INTLIST:
                list_names.append(name)

        for node in lm.walk(block):
            if isinstance(node, lm.Quantifier):
                names.append(node.var)

        components = set()
        for name in list_names:
            components.update(['%s_data' % name, '%s_len' % name])
        if self.typed.result_type(block.name) is static_frontend.INTLIST:
            components.update(['result_data', 'result_len'])

        for name in names:
            if name in BOOGIE_KEYWORDS:
                raise _Unsupported(block.block_id,
                                   '%r is a reserved word in Boogie' % name)
            if name in components:
                raise _Unsupported(block.block_id,
                                   '%r clashes with the encoding of a list' %
                                   name)

    def declarations(self, name, type_):
        if type_ is static_frontend.INTLIST:
            return ['%s_data: [int]int' % name, '%s_len: int' % name]
        else:
            return ['%s: %s' % (name, BOOGIE_TYPES[type_])]

    def compile(self):
        '''Compile the block, returning `(text, src)` lines.'''

        block = self.block
        self.check_names()

        params = []
        for name in block.param_names:
            params.extend(self.declarations(name, self.var_type(name)))

        signature = 'procedure %s(%s)' % (block.name, ', '.join(params))
        result_type = self.typed.result_type(block.name)
        if block.returns_value:
            signature += ' returns (%s)' % ', '.join(
                self.declarations('result', result_type))

        contract = _Context(True, 'contracts')
        pre = [self.text(slot, contract) for slot in block.pre]
        post = [self.text(slot, contract) for slot in block.post]

        self.stmts(block.body)
        if block.kind == lm.REPORTER and \
                not (block.body and isinstance(block.body[-1], lm.Report)):
            self.emit('assert false;', (block.block_id, MISSING_REPORT, None))

        header = [(0, signature, None)]

        modifies = []
        for name in self.typed.modifies(block.name):
            if self.typed.global_type(name) is static_frontend.INTLIST:
                modifies.extend(['%s_data' % name, '%s_len' % name])
            else:
                modifies.append(name)
        if modifies:
            header.append((1, 'modifies %s;' % ', '.join(modifies), None))

        for name in block.param_names:
            if self.var_type(name) is static_frontend.INTLIST:
                header.append((1, 'free requires %s_len >= 0;' % name, None))
        for name in self.program.global_names:
            if self.typed.global_type(name) is static_frontend.INTLIST:
                header.append((1, 'free requires %s_len >= 0;' % name, None))

        for (index, (slot, text)) in enumerate(zip(block.pre, pre)):
            header.append((1, 'requires %s;' % text,
                           (slot.block_id, PRE, index + 1)))

        for name in self.typed.modifies(block.name):
            if self.typed.global_type(name) is static_frontend.INTLIST:
                header.append((1, 'free ensures %s_len >= 0;' % name, None))
        if result_type is static_frontend.INTLIST:
            header.append((1, 'free ensures result_len >= 0;', None))

        for (index, (slot, text)) in enumerate(zip(block.post, post)):
            header.append((1, 'ensures %s;' % text,
                           (slot.block_id, POST, index + 1)))

        header.append((0, '{', None))

        for name in block.local_names():
            for decl in self.declarations(name, self.var_type(name)):
                header.append((1, 'var %s;' % decl, None))
        for (name, type_) in self.fresh_vars:
            header.append((1, 'var %s: %s;' % (name, type_), None))

        if block.kind == lm.PREDICATE:
            header.append((1, 'result := false;', None))

        return header + self.lines + [(0, '}', None)]


class Compiler(object):
    '''Compiles a :class:`blockverify.static_frontend.TypedProgram`

    :param logger: Logger to use
    :type logger: `logging.Logger`
    '''

    def __init__(self, logger=None):
        self._logger = logger or LOGGER

    logger = property(operator.attrgetter('_logger'))

    @utils.trace
    def compile_block(self, typed, block):
        '''Compile one block to `(depth, text, src)` lines

        :raise _Unsupported: The block uses a construct outside the fragment
        '''

        return _ProcedureCompiler(typed, block).compile()

    def global_lines(self, typed):
        lines = []
        names = typed.program.global_names
        components = set()
        for name in names:
            if typed.global_type(name) is static_frontend.INTLIST:
                components.update(['%s_data' % name, '%s_len' % name])

        for name in names:
            type_ = typed.global_type(name)
            if name in BOOGIE_KEYWORDS:
                raise _Unsupported(None,
                                   '%r is a reserved word in Boogie' % name)
            if name in components:
                raise _Unsupported(None,
                                   '%r clashes with the encoding of a list' %
                                   name)

            if type_ is static_frontend.INTLIST:
                lines.append((0, 'var %s_data: [int]int;' % name, None))
                lines.append((0, 'var %s_len: int;' % name, None))
            else:
                lines.append((0, 'var %s: %s;' % (name, BOOGIE_TYPES[type_]),
                              None))

        return lines

    def compile(self, typed):
        '''Compile a typed program to a :class:`BoogieUnit`

        The result only depends on `typed`: compiling twice gives identical
        text.

        :raise CompileError: Some blocks use constructs outside the fragment
        '''

        if not typed.has_modifies:
            typed = static_frontend.compute_modifies(typed)

        found = []
        chunks = [[(0, line, None) for line in PRELUDE]]

        try:
            lines = self.global_lines(typed)
            if lines:
                chunks.append(lines)
        except _Unsupported as exc:
            found.append(exc)

        for block in typed.program.blocks:
            try:
                chunks.append(self.compile_block(typed, block))
            except _Unsupported as exc:
                found.append(exc)

        if found:
            raise CompileError([
                diagnostics.Diagnostic(
                    diagnostics.ERROR, diagnostics.PHASE_COMPILE,
                    CompileError.code, exc.message, block_id=exc.block_id)
                for exc in found])

        texts = []
        entries = []
        for chunk in chunks:
            if texts:
                texts.append('')

            for (depth, text, src) in chunk:
                if src is not None:
                    (block_id, kind, slot) = src
                    entries.append(SourceEntry(
                        len(texts) + 1, len(INDENT) * depth + 1, block_id,
                        kind, slot))
                    text = '%s // @src %s %s' % (text, block_id, kind)
                texts.append(INDENT * depth + text)

        self.logger.debug('Compiled %d block(s) to %d line(s)',
                          len(typed.program.blocks), len(texts))

        return BoogieUnit('\n'.join(texts) + '\n', SourceMap(entries))


def compile_program(typed):
    '''Compile `typed` with a default :class:`Compiler`.'''

    return Compiler().compile(typed)


class StaticVerdict(object):  # pylint: disable=R0903
    '''Outcome of one Boogie run, mapped back to blocks

    :param outcome: :const:`VERIFIED`, :const:`ERRORS` or
                    :const:`TOOL_FAILURE`
    :param verified: Number of verified procedures
    :param errors: Number of errors Boogie reported
    :param diagnostics: Mapped diagnostics
    '''

    __slots__ = '_outcome', '_verified', '_errors', '_diagnostics',

    def __init__(self, outcome, verified, errors, diagnostics_):
        self._outcome = outcome
        self._verified = verified
        self._errors = errors
        self._diagnostics = list(diagnostics_)

    outcome = property(operator.attrgetter('_outcome'))
    verified = property(operator.attrgetter('_verified'))
    errors = property(operator.attrgetter('_errors'))
    diagnostics = property(lambda self: list(self._diagnostics))

    @property
    def counts(self):
        return (self.verified, self.errors)

    def __repr__(self):
        return 'StaticVerdict(outcome=%r, counts=%r, diagnostics=%r)' % \
            (self.outcome, self.counts, self.diagnostics)


SUMMARY_RE = re.compile(
    r'Boogie program verifier finished with (?P<verified>\d+) verified, '
    r'(?P<errors>\d+) errors?(?P<rest>.*)$', re.MULTILINE)

INCONCLUSIVE_RE = re.compile(
    r'(\d+) (?:inconclusive|time outs?|out of memory|out of resource)')

LOCATION_RE = re.compile(
    r'^(?P<file>.*)\((?P<line>\d+),(?P<col>\d+)\): '
    r'(?P<what>Error(?: [A-Z]+\d+)?|Related location): ?(?P<message>.*)$')


class _BoogieError(object):  # pylint: disable=R0903
    __slots__ = ('line', 'col', 'message', 'related')

    def __init__(self, line, col, message):
        self.line = line
        self.col = col
        self.message = message
        self.related = []


def _static(code, message, block_id=None, slot_index=None):
    return diagnostics.Diagnostic(diagnostics.ERROR, diagnostics.PHASE_STATIC,
                                  code, message, block_id=block_id,
                                  slot_index=slot_index)


def _error_message(kind, slot, callee=None):
    if kind == PRE:
        return 'the precondition (slot %d) might not hold' % slot
    elif kind == POST:
        return 'the postcondition (slot %d) might not hold for some ' \
            'inputs' % slot
    elif kind == ASSERT:
        return 'this assertion might not hold for some inputs'
    elif kind == INVARIANT_ENTRY:
        return 'the loop invariant (slot %d) might not hold before the ' \
            'first iteration' % slot
    elif kind == INVARIANT_MAINTAIN:
        if slot is None:
            return 'the loop counter might leave its range'
        return 'the loop invariant (slot %d) might not be preserved by an ' \
            'iteration' % slot
    elif kind == CALL_PRE:
        if slot is None:
            return 'a precondition of the called block might not hold at ' \
                'this call'
        return 'the precondition (slot %d) of %s might not hold at this ' \
            'call' % (slot, callee)
    elif kind == INDEX_BOUNDS:
        return 'the list index might be out of range'
    elif kind == REPEAT_COUNT:
        return 'the repeat count might be negative'
    elif kind == DIVISOR:
        return 'the divisor might be zero'
    elif kind == MISSING_REPORT:
        return 'the block might finish without reporting a value'
    else:
        raise AssertionError('Unknown obligation kind %r' % kind)


def _map_error(error, source_map):
    entry = source_map.lookup(error.line, error.col)
    related = [source_map.lookup(line, col)
               for (line, col, _) in error.related]
    related = [r for r in related if r is not None]

    if entry is None:
        if not related:
            return _static(
                'E_UNMAPPED_LOCATION', 'Boogie reported an error at line %d '
                'which no block accounts for: %s' % (error.line,
                                                     error.message))
        entry, related = related[0], related[1:]

    kind, slot = entry.kind, entry.slot

    if kind == INVARIANT_MAINTAIN and 'entry' in error.message.lower():
        kind = INVARIANT_ENTRY

    callee = None
    if kind == CALL_PRE:
        for other in related:
            if other.kind == PRE:
                slot, callee = other.slot, other.owner
                break

    return _static(STATIC_CODES[kind], _error_message(kind, slot, callee),
                   block_id=entry.block_id, slot_index=slot)


def parse_boogie_output(output, source_map):
    '''Translate the standard output of one Boogie run

        >>> verdict = parse_boogie_output(
        ...     'Boogie program verifier finished with 3 verified, 0 errors\\n',
        ...     SourceMap())
        >>> verdict.outcome, verdict.counts
        ('verified', (3, 0))
        >>> parse_boogie_output('', SourceMap()).outcome
        'toolFailure'

    :param output: Complete output of Boogie
    :type output: `str`
    :param source_map: Source map of the verified file
    :type source_map: :class:`SourceMap`

    :rtype: :class:`StaticVerdict`
    '''

    summary = SUMMARY_RE.search(output)
    if summary is None:
        LOGGER.warning('No summary line in Boogie output')
        return StaticVerdict(TOOL_FAILURE, 0, 0, [_static(
            'E_BOOGIE_OUTPUT', 'Boogie output could not be understood')])

    verified = int(summary.group('verified'))
    error_count = int(summary.group('errors'))

    errors = []
    for line in output.splitlines():
        match = LOCATION_RE.match(line.strip())
        if match is None:
            continue

        position = (int(match.group('line')), int(match.group('col')))
        if match.group('what') == 'Related location':
            if errors:
                errors[-1].related.append(
                    position + (match.group('message'),))
        else:
            errors.append(_BoogieError(position[0], position[1],
                                       match.group('message')))

    found = [_map_error(error, source_map) for error in errors]

    inconclusive = sum(int(n) for n in
                       INCONCLUSIVE_RE.findall(summary.group('rest')))
    if inconclusive:
        found.append(_static(
            'E_BOOGIE_OUTPUT', 'Boogie could not decide %d procedure(s)' %
            inconclusive))
        return StaticVerdict(TOOL_FAILURE, verified, error_count, found)

    if error_count and not found:
        found.append(_static(
            'E_BOOGIE_OUTPUT', 'Boogie reported %d error(s) without a '
            'location' % error_count))
        return StaticVerdict(TOOL_FAILURE, verified, error_count, found)

    outcome = ERRORS if (error_count or found) else VERIFIED
    return StaticVerdict(outcome, verified, error_count, found)


class BoogieRunner(object):
    '''Runs the external Boogie executable

    :param boogie_path: Path of the executable
    :type boogie_path: `str`
    :param options: Extra command-line options
    :type options: Iterable of `str`
    :param timeout: Timeout, in seconds
    :type timeout: `int`
    :param logger: Logger to use
    :type logger: `logging.Logger`
    '''

    def __init__(self, boogie_path, options=(), timeout=60, logger=None):
        self._boogie_path = boogie_path
        self._options = tuple(options)
        self._timeout = timeout
        self._logger = logger or LOGGER

    boogie_path = property(operator.attrgetter('_boogie_path'))
    options = property(operator.attrgetter('_options'))
    timeout = property(operator.attrgetter('_timeout'))
    logger = property(operator.attrgetter('_logger'))

    @utils.trace
    def run(self, bpl_path):
        '''Verify a `.bpl` file, returning Boogie's output

        :raise ToolError: `E_BOOGIE_EXEC` when the executable can't be
                          started, `E_BOOGIE_TIMEOUT` when it takes too long,
                          `E_BOOGIE_STATUS` when it fails without a verdict
        '''

        command = [self.boogie_path] + list(self.options) + [bpl_path]
        self.logger.info('Running %s', ' '.join(command))

        try:
            proc = eventlet.green.subprocess.Popen(
                command, stdout=eventlet.green.subprocess.PIPE,
                stderr=eventlet.green.subprocess.STDOUT)
        except OSError as exc:
            raise ToolError('Unable to run %s: %s' % (self.boogie_path, exc))

        try:
            with eventlet.Timeout(self.timeout):
                output, _ = proc.communicate()
        except eventlet.Timeout:
            proc.kill()
            proc.wait()
            raise ToolError('Boogie did not finish within %d second(s)' %
                            self.timeout, code='E_BOOGIE_TIMEOUT')

        self.logger.debug('Boogie exited with status %d', proc.returncode)

        text = output.decode('utf-8', 'replace')
        if proc.returncode and SUMMARY_RE.search(text) is None:
            lines = text.strip().splitlines()
            raise ToolError('Boogie exited with status %d%s' % (
                proc.returncode, (': %s' % lines[-1]) if lines else ''),
                code='E_BOOGIE_STATUS')

        return text

    def verify(self, unit, bpl_path):
        '''Write `unit` to `bpl_path`, run Boogie and map its verdict.

        :rtype: :class:`StaticVerdict`
        '''

        unit.write(bpl_path)
        verdict = parse_boogie_output(self.run(bpl_path), unit.source_map)

        self.logger.info('%s: %s (%d verified, %d error(s))', bpl_path,
                         verdict.outcome, verdict.verified, verdict.errors)

        return verdict
