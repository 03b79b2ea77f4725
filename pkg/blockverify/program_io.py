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
Parsing and serialization of block programs in the `.blocks.json` project
format.

A document is a JSON object with the keys `formatVersion` (always 1),
`globals`, `blocks` and `entryScripts`. Every expression and statement is an
object with a `kind` discriminator; see `doc/format.rst` for the schema.
'''

import io
import json
import logging
import math

from blockverify import diagnostics
from blockverify import language_model as lm

LOGGER = logging.getLogger(__name__)

FORMAT_VERSION = 1

FILE_SUFFIX = '.blocks.json'


class SchemaError(diagnostics.BlockVerifyError):
    '''Exception raised when a document doesn't follow the schema.'''

    code = 'E_SCHEMA'
    phase = diagnostics.PHASE_PARSE

    def __init__(self, message, path):
        super(SchemaError, self).__init__('%s: %s' % (path, message))
        self.path = path


class WellFormednessError(diagnostics.DiagnosticsError):
    '''Exception raised when a parsed program fails validation.'''

    code = 'E_WELLFORMED'
    phase = diagnostics.PHASE_WELLFORMED


class UnserializableError(diagnostics.BlockVerifyError):
    '''Exception raised when a program holds nodes outside the schema.'''

    code = 'E_UNSERIALIZABLE'
    phase = diagnostics.PHASE_PARSE


# Node kind -> (class, [(json key, field name, field type)])
#
# Field types: 'expr', 'exprs', 'stmts', 'domain', 'ident', 'idents',
# 'value', or a tuple of allowed string values.
EXPRESSION_SCHEMA = {
    'literal': (lm.Literal, [('value', 'value', 'value')]),
    'var': (lm.VarRef, [('name', 'name', 'ident')]),
    'arith': (lm.Arith, [('op', 'op', lm.ARITH_OPS),
                         ('left', 'left', 'expr'),
                         ('right', 'right', 'expr')]),
    'compare': (lm.Compare, [('op', 'op', lm.COMPARE_OPS),
                             ('left', 'left', 'expr'),
                             ('right', 'right', 'expr')]),
    'bool': (lm.BoolOp, [('op', 'op', lm.BOOL_OPS),
                         ('operands', 'operands', 'exprs')]),
    'old': (lm.Old, [('var', 'var', 'ident')]),
    'result': (lm.Result, []),
    'quantifier': (lm.Quantifier, [('quantifier', 'quantifier',
                                    lm.QUANTIFIERS),
                                   ('var', 'var', 'ident'),
                                   ('domain', 'domain', 'domain'),
                                   ('body', 'body', 'expr')]),
    'item': (lm.Item, [('index', 'index', 'expr'),
                       ('list', 'list', 'expr')]),
    'length': (lm.LengthOf, [('list', 'list', 'expr')]),
    'contains': (lm.Contains, [('list', 'list', 'expr'),
                               ('elem', 'elem', 'expr')]),
    'call': (lm.Call, [('block', 'block', 'ident'),
                       ('args', 'args', 'exprs')]),
}

DOMAIN_SCHEMA = {
    'range': (lm.IntRange, [('lo', 'lo', 'expr'), ('hi', 'hi', 'expr')]),
    'elements': (lm.Elements, [('list', 'list', 'expr')]),
}

STATEMENT_SCHEMA = {
    'declare': (lm.DeclareLocals, [('names', 'names', 'idents')]),
    'set': (lm.SetVar, [('name', 'name', 'ident'),
                        ('value', 'value', 'expr')]),
    'change': (lm.ChangeVar, [('name', 'name', 'ident'),
                              ('delta', 'delta', 'expr')]),
    'if': (lm.IfElse, [('cond', 'cond', 'expr'),
                       ('then', 'then_branch', 'stmts'),
                       ('else', 'else_branch', 'stmts')]),
    'repeat': (lm.RepeatN, [('count', 'count', 'expr'),
                            ('invariant', 'invariant', 'exprs'),
                            ('body', 'body', 'stmts')]),
    'repeatUntil': (lm.RepeatUntil, [('cond', 'cond', 'expr'),
                                     ('invariant', 'invariant', 'exprs'),
                                     ('body', 'body', 'stmts')]),
    'assert': (lm.Assert, [('cond', 'cond', 'expr')]),
    'report': (lm.Report, [('value', 'value', 'expr')]),
    'run': (lm.CallCommand, [('block', 'block', 'ident'),
                             ('args', 'args', 'exprs')]),
    'addToList': (lm.AddToList, [('elem', 'elem', 'expr'),
                                 ('list', 'list', 'ident')]),
    'replaceItem': (lm.ReplaceItem, [('index', 'index', 'expr'),
                                     ('list', 'list', 'ident'),
                                     ('elem', 'elem', 'expr')]),
}

# Keys which may be left out on input
OPTIONAL_KEYS = {
    ('if', 'else'): [],
    ('repeat', 'invariant'): [],
    ('repeatUntil', 'invariant'): [],
}

_KIND_OF_CLASS = dict(
    (cls, kind)
    for schema in (EXPRESSION_SCHEMA, DOMAIN_SCHEMA, STATEMENT_SCHEMA)
    for (kind, (cls, _)) in schema.items())


def _reject_constant(name):
    raise ValueError('%s is not a valid number' % name)


class _Parser(object):
    def fail(self, message, path):
        raise SchemaError(message, path)

    def expect_object(self, data, keys, path, optional=()):
        if not isinstance(data, dict):
            self.fail('expected an object', path)

        for key in data:
            if key not in keys:
                self.fail('unknown field %r' % key, path)

        for key in keys:
            if key not in data and key not in optional:
                self.fail('missing field %r' % key, path)

    def expect_list(self, data, path):
        if not isinstance(data, list):
            self.fail('expected a list', path)

        return data

    def ident(self, data, path):
        if not lm.is_identifier(data):
            self.fail('expected an identifier, got %s' % json.dumps(data),
                      path)

        return data

    def value(self, data, path):
        if isinstance(data, bool) or isinstance(data, str):
            return data
        elif isinstance(data, (int, float)):
            if isinstance(data, float) and not math.isfinite(data):
                self.fail('numbers must be finite', path)
            return data
        elif isinstance(data, list):
            return [self.value(item, '%s[%d]' % (path, idx))
                    for (idx, item) in enumerate(data)]
        else:
            self.fail('expected a number, boolean, text or list', path)

    def node(self, data, schema, what, path):
        if not isinstance(data, dict) or 'kind' not in data:
            self.fail('expected %s node with a "kind"' % what, path)

        kind = data['kind']
        if not isinstance(kind, str) or kind not in schema:
            self.fail('unknown %s kind %s' % (what, json.dumps(kind)), path)

        cls, fields = schema[kind]
        keys = ['kind'] + [key for (key, _, _) in fields]
        optional = [key for (key, _, _) in fields
                    if (kind, key) in OPTIONAL_KEYS]
        self.expect_object(data, keys, path, optional)

        values = {}
        for (key, name, ftype) in fields:
            if key in data:
                values[name] = self.field(data[key], ftype,
                                          '%s.%s' % (path, key))
            else:
                values[name] = list(OPTIONAL_KEYS[(kind, key)])

        if cls is lm.BoolOp:
            arity = lm.BOOL_OP_ARITY.get(values['op'])
            if arity is not None and len(values['operands']) != arity:
                self.fail('%r takes %d operand(s), got %d' %
                          (values['op'], arity, len(values['operands'])),
                          '%s.operands' % path)

        return cls(**values)

    def field(self, data, ftype, path):
        if isinstance(ftype, tuple):
            if data not in ftype:
                self.fail('expected one of %s, got %s' %
                          (', '.join(ftype), json.dumps(data)), path)
            return data
        elif ftype == 'expr':
            return self.expr(data, path)
        elif ftype == 'exprs':
            return [self.expr(item, '%s[%d]' % (path, idx))
                    for (idx, item) in enumerate(self.expect_list(data, path))]
        elif ftype == 'stmts':
            return self.stmts(data, path)
        elif ftype == 'domain':
            return self.node(data, DOMAIN_SCHEMA, 'domain', path)
        elif ftype == 'ident':
            return self.ident(data, path)
        elif ftype == 'idents':
            return [self.ident(item, '%s[%d]' % (path, idx))
                    for (idx, item) in enumerate(self.expect_list(data, path))]
        elif ftype == 'value':
            return self.value(data, path)
        else:
            raise AssertionError('Unknown field type %r' % ftype)

    def expr(self, data, path):
        return self.node(data, EXPRESSION_SCHEMA, 'expression', path)

    def stmts(self, data, path):
        return [self.node(item, STATEMENT_SCHEMA, 'statement',
                          '%s[%d]' % (path, idx))
                for (idx, item) in enumerate(self.expect_list(data, path))]

    def param(self, data, path):
        self.expect_object(data, ['name', 'type'], path, optional=['type'])

        declared = data.get('type')
        if declared is not None and declared not in lm.DECLARED_TYPES:
            self.fail('expected one of %s, got %s' %
                      (', '.join(lm.DECLARED_TYPES), json.dumps(declared)),
                      '%s.type' % path)

        return lm.Param(self.ident(data['name'], '%s.name' % path), declared)

    def block(self, data, path):
        keys = ['name', 'kind', 'params', 'pre', 'post', 'body']
        self.expect_object(data, keys, path)

        kind = self.field(data['kind'], lm.BLOCK_KINDS, '%s.kind' % path)
        params = [self.param(item, '%s.params[%d]' % (path, idx))
                  for (idx, item) in enumerate(
                      self.expect_list(data['params'], '%s.params' % path))]

        return lm.BlockDef(
            self.ident(data['name'], '%s.name' % path), kind, params,
            self.field(data['pre'], 'exprs', '%s.pre' % path),
            self.field(data['post'], 'exprs', '%s.post' % path),
            self.stmts(data['body'], '%s.body' % path))

    def script(self, data, path):
        self.expect_object(data, ['name', 'body'], path)

        return lm.Script(self.ident(data['name'], '%s.name' % path),
                         self.stmts(data['body'], '%s.body' % path))

    def global_(self, data, path):
        self.expect_object(data, ['name', 'value'], path)

        return (self.ident(data['name'], '%s.name' % path),
                self.value(data['value'], '%s.value' % path))

    def document(self, data):
        keys = ['formatVersion', 'globals', 'blocks', 'entryScripts']
        self.expect_object(data, keys, '$')

        version = data['formatVersion']
        if isinstance(version, bool) or version != FORMAT_VERSION:
            self.fail('unsupported format version %s' % json.dumps(version),
                      '$.formatVersion')

        def items(key, parse):
            path = '$.%s' % key
            return [parse(item, '%s[%d]' % (path, idx))
                    for (idx, item) in enumerate(
                        self.expect_list(data[key], path))]

        return lm.Program(items('globals', self.global_),
                          items('blocks', self.block),
                          items('entryScripts', self.script))


def parse_program(text):
    '''Parse and validate a `.blocks.json` document

        >>> p = parse_program(
        ...     '{"formatVersion":1,"globals":[],"blocks":[],"entryScripts":[]}')
        >>> p.blocks, p.scripts
        ((), ())

    Node identifiers are assigned from document order, so parsing an
    unchanged document twice yields the same identifiers.

    :param text: Document text
    :type text: `str`

    :return: Well-formed program
    :rtype: :class:`blockverify.language_model.Program`

    :raise SchemaError: Malformed document
    :raise WellFormednessError: The program breaks a well-formedness rule
    '''

    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except ValueError as exc:
        raise SchemaError('invalid JSON: %s' % exc, '$')

    program = _Parser().document(data)

    found = lm.validate(program)
    if found:
        raise WellFormednessError(found)

    LOGGER.debug('Parsed program with %d block(s), %d script(s)',
                 len(program.blocks), len(program.scripts))

    return program


def load_program(path):
    '''Read and parse a `.blocks.json` file (UTF-8).

    :raise IOError: File can't be read
    '''

    with io.open(path, 'r', encoding='utf-8') as fd:
        return parse_program(fd.read())


class _Serializer(object):
    def value(self, value):
        if lm.kind_of(value) == lm.LIST:
            return [self.value(item) for item in value]

        return value

    def node(self, node):
        kind = _KIND_OF_CLASS.get(type(node))
        if kind is None:
            raise UnserializableError(
                'node %r has no document form' % type(node).__name__,
                block_id=getattr(node, 'block_id', None))

        schema = STATEMENT_SCHEMA if isinstance(node, lm.STATEMENT_TYPES) \
            else DOMAIN_SCHEMA if isinstance(node, lm.DOMAIN_TYPES) \
            else EXPRESSION_SCHEMA

        data = {'kind': kind}
        for (key, name, ftype) in schema[kind][1]:
            data[key] = self.field(getattr(node, name), ftype)

        return data

    def field(self, value, ftype):
        if ftype in ('expr', 'domain'):
            return self.node(value)
        elif ftype in ('exprs', 'stmts'):
            return [self.node(item) for item in value]
        elif ftype == 'idents':
            return list(value)
        elif ftype == 'value':
            return self.value(value)
        else:
            return value

    def param(self, param):
        data = {'name': param.name}
        if param.declared_type is not None:
            data['type'] = param.declared_type

        return data

    def document(self, program):
        return {
            'formatVersion': FORMAT_VERSION,
            'globals': [{'name': name, 'value': self.value(value)}
                        for (name, value) in program.globals],
            'blocks': [{
                'name': block.name,
                'kind': block.kind,
                'params': [self.param(p) for p in block.params],
                'pre': [self.node(e) for e in block.pre],
                'post': [self.node(e) for e in block.post],
                'body': [self.node(s) for s in block.body],
            } for block in program.blocks],
            'entryScripts': [{
                'name': script.name,
                'body': [self.node(s) for s in script.body],
            } for script in program.scripts],
        }


def serialize_program(program):
    '''Serialize a program into its canonical document

    Keys come out in schema order (`kind` first), indented by two spaces,
    followed by a newline::

        >>> print(serialize_program(lm.Program([], [], [])), end='')
        {
          "formatVersion": 1,
          "globals": [],
          "blocks": [],
          "entryScripts": []
        }

    :param program: Program to serialize
    :type program: :class:`blockverify.language_model.Program`

    :rtype: `str`

    :raise UnserializableError: The program holds nodes outside the schema
    '''

    return json.dumps(_Serializer().document(program), indent=2,
                      separators=(',', ': '), ensure_ascii=False) + '\n'


def dump_program(program, path):
    '''Write the canonical document of `program` to `path` (UTF-8).'''

    text = serialize_program(program)

    with io.open(path, 'w', encoding='utf-8', newline='\n') as fd:
        fd.write(text)


def _check_value(value, text):
    if isinstance(value, list):
        for item in value:
            _check_value(item, text)
    elif value is None or isinstance(value, dict):
        raise ValueError('Invalid value: %r' % text)


def parse_value(text):
    '''Parse a value written on the command line or in a lesson manifest

    Integers and decimals, `true`/`false`, `[...]` lists and quoted text are
    accepted::

        >>> parse_value('-3'), parse_value('true'), parse_value('[1,2,3]')
        (-3, True, [1, 2, 3])
        >>> parse_value("'hello'"), parse_value('"hello"')
        ('hello', 'hello')
        >>> parse_value('hello')
        Traceback (most recent call last):
        ...
        ValueError: Invalid value: 'hello'

    :raise ValueError: Malformed value
    '''

    text = text.strip()

    if len(text) >= 2 and text[0] == text[-1] == "'":
        return text[1:-1]

    try:
        value = json.loads(text, parse_constant=_reject_constant)
    except ValueError:
        raise ValueError('Invalid value: %r' % text)

    _check_value(value, text)
    return value
