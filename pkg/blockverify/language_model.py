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
Abstract syntax of the block language, its specification constructs, and the
well-formedness rules every other module relies on.

Runtime values are plain Python values:

- numbers are `int` or `float` (never `bool`),
- booleans are `bool`,
- texts are `str`,
- lists are `list` (or `tuple`, inside literals), indexed from 1.
'''

import copy
import operator
import re

from blockverify import diagnostics
from blockverify.diagnostics import Diagnostic

NUMBER = 'number'
BOOL = 'bool'
TEXT = 'text'
LIST = 'list'

COMMAND = 'command'
REPORTER = 'reporter'
PREDICATE = 'predicate'

BLOCK_KINDS = (COMMAND, REPORTER, PREDICATE)

ARITH_OPS = ('add', 'sub', 'mul', 'div', 'mod')
COMPARE_OPS = ('eq', 'neq', 'lt', 'le', 'gt', 'ge')
BOOL_OPS = ('and', 'or', 'not', 'implies', 'iff', 'xor')
QUANTIFIERS = ('forall', 'exists')

# Fixed operand counts; `and` and `or` are variadic
BOOL_OP_ARITY = {
    'not': 1,
    'implies': 2,
    'iff': 2,
    'xor': 2,
}

DECLARED_TYPES = ('int', 'bool', 'intlist')

RESERVED_PREFIX = '__'

IDENTIFIER_RE = re.compile(r'\A[A-Za-z_][A-Za-z0-9_]*\Z')


def is_identifier(name):
    '''Check whether `name` is a valid identifier

        >>> is_identifier('x1'), is_identifier('1x'), is_identifier(5)
        (True, False, False)
    '''

    return isinstance(name, str) and IDENTIFIER_RE.match(name) is not None


def kind_of(value):
    '''Observable kind of a runtime value

        >>> kind_of(3), kind_of(True), kind_of('hi'), kind_of([1, [2]])
        ('number', 'bool', 'text', 'list')

    :raise ValueError: Not a block-language value
    '''

    if isinstance(value, bool):
        return BOOL
    elif isinstance(value, (int, float)):
        return NUMBER
    elif isinstance(value, str):
        return TEXT
    elif isinstance(value, (list, tuple)):
        return LIST
    else:
        raise ValueError('Not a block value: %r' % (value,))


def is_integral(value):
    '''Check whether `value` is a number with an integer value

        >>> is_integral(3), is_integral(3.0), is_integral(3.5), is_integral(True)
        (True, True, False, False)
    '''

    if kind_of(value) != NUMBER:
        return False

    return isinstance(value, int) or value.is_integer()


def values_equal(left, right):
    '''Block-language equality

    Values of different kinds are never equal, lists compare item-wise::

        >>> values_equal(1, 1.0), values_equal(1, True), values_equal([1, 2], (1, 2))
        (True, False, True)
    '''

    lkind, rkind = kind_of(left), kind_of(right)

    if lkind != rkind:
        return False

    if lkind == LIST:
        return len(left) == len(right) and \
            all(values_equal(l, r) for (l, r) in zip(left, right))

    return left == right


def freeze_value(value):
    '''Turn a value into an immutable, hashable equivalent (lists to tuples).'''

    if kind_of(value) == LIST:
        return tuple(freeze_value(v) for v in value)

    return value


def thaw_value(value):
    '''Turn a frozen value into a fresh mutable one (tuples to lists).'''

    if kind_of(value) == LIST:
        return [thaw_value(v) for v in value]

    return value


def copy_value(value):
    '''Deep copy of a value, sharing nothing with the original.'''

    return copy.deepcopy(value)


def value_key(value):
    '''Kind-tagged comparison key, so that `1` and `True` stay distinct.'''

    kind = kind_of(value)

    if kind == LIST:
        return (kind, tuple(value_key(v) for v in value))

    return (kind, value)


def format_value(value):
    '''Render a value the way reports print it

        >>> print(format_value([1, True, 'a', 2.5]))
        [1, true, "a", 2.5]
    '''

    kind = kind_of(value)

    if kind == BOOL:
        return 'true' if value else 'false'
    elif kind == TEXT:
        return '"%s"' % value.replace('"', '\\"')
    elif kind == LIST:
        return '[%s]' % ', '.join(format_value(v) for v in value)
    else:
        return repr(value)


class Node(object):
    '''Base class of every syntax node

    Subclasses list their fields in :attr:`_fields`; sequence-valued fields
    are stored as tuples. Every node also carries a :attr:`block_id`, which
    is assigned when the enclosing :class:`Program` is built. Nodes compare
    structurally, :attr:`block_id` excluded::

        >>> VarRef('x') == VarRef('x', block_id='f#3')
        True
        >>> Arith('add', VarRef('x'), Literal(1))
        Arith(op='add', left=VarRef(name='x'), right=Literal(value=1))
    '''

    __slots__ = ('block_id',)

    _fields = ()
    _sequence_fields = ()

    def __init__(self, *args, **kwargs):
        block_id = kwargs.pop('block_id', None)

        if len(args) > len(self._fields):
            raise TypeError('%s takes %d fields' %
                            (type(self).__name__, len(self._fields)))

        values = dict(zip(self._fields, args))
        for (name, value) in kwargs.items():
            if name not in self._fields or name in values:
                raise TypeError('Unexpected field %r for %s' %
                                (name, type(self).__name__))
            values[name] = value

        for name in self._fields:
            if name not in values:
                raise TypeError('Missing field %r for %s' %
                                (name, type(self).__name__))

            value = values[name]
            if name in self._sequence_fields:
                value = tuple(value)
            setattr(self, name, value)

        self.block_id = block_id

    def _key(self):
        return (type(self),) + tuple(getattr(self, name)
                                     for name in self._fields)

    def __eq__(self, other):
        if not isinstance(other, Node):
            return NotImplemented

        return self._key() == other._key()

    def __ne__(self, other):
        equal = self.__eq__(other)

        if equal is NotImplemented:
            return NotImplemented
        else:
            return not equal

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return '%s(%s)' % (
            type(self).__name__,
            ', '.join('%s=%r' % (name, getattr(self, name))
                      for name in self._fields))

    def children(self):
        '''Child nodes, in document order.'''

        for name in self._fields:
            value = getattr(self, name)
            if isinstance(value, Node):
                yield value
            elif isinstance(value, tuple):
                for item in value:
                    if isinstance(item, Node):
                        yield item


def walk(node):
    '''Pre-order traversal of `node` and all its descendants.'''

    yield node
    for child in node.children():
        for descendant in walk(child):
            yield descendant


def walk_all(nodes):
    for node in nodes:
        for descendant in walk(node):
            yield descendant


# Expressions

class Literal(Node):
    __slots__ = ('value',)
    _fields = ('value',)

    def __init__(self, *args, **kwargs):
        super(Literal, self).__init__(*args, **kwargs)
        self.value = freeze_value(self.value)

    def _key(self):
        return (type(self), value_key(self.value))


class VarRef(Node):
    __slots__ = ('name',)
    _fields = ('name',)


class Arith(Node):
    __slots__ = ('op', 'left', 'right')
    _fields = ('op', 'left', 'right')


class Compare(Node):
    __slots__ = ('op', 'left', 'right')
    _fields = ('op', 'left', 'right')


class BoolOp(Node):
    __slots__ = ('op', 'operands')
    _fields = ('op', 'operands')
    _sequence_fields = ('operands',)


class Old(Node):
    '''Value of a variable when the enclosing block was called.'''

    __slots__ = ('var',)
    _fields = ('var',)


class Result(Node):
    '''Value reported by the enclosing reporter or predicate.'''

    __slots__ = ()
    _fields = ()


class IntRange(Node):
    '''Integers from `lo` to `hi`, both included.'''

    __slots__ = ('lo', 'hi')
    _fields = ('lo', 'hi')


class Elements(Node):
    '''Items of a list, in order.'''

    __slots__ = ('list',)
    _fields = ('list',)


class Quantifier(Node):
    __slots__ = ('quantifier', 'var', 'domain', 'body')
    _fields = ('quantifier', 'var', 'domain', 'body')


class Item(Node):
    __slots__ = ('index', 'list')
    _fields = ('index', 'list')


class LengthOf(Node):
    __slots__ = ('list',)
    _fields = ('list',)


class Contains(Node):
    __slots__ = ('list', 'elem')
    _fields = ('list', 'elem')


class Call(Node):
    '''Reporter or predicate call.'''

    __slots__ = ('block', 'args')
    _fields = ('block', 'args')
    _sequence_fields = ('args',)


EXPRESSION_TYPES = (Literal, VarRef, Arith, Compare, BoolOp, Old, Result,
                    Quantifier, Item, LengthOf, Contains, Call)
DOMAIN_TYPES = (IntRange, Elements)


# Statements

class DeclareLocals(Node):
    __slots__ = ('names',)
    _fields = ('names',)
    _sequence_fields = ('names',)


class SetVar(Node):
    __slots__ = ('name', 'value')
    _fields = ('name', 'value')


class ChangeVar(Node):
    __slots__ = ('name', 'delta')
    _fields = ('name', 'delta')


class IfElse(Node):
    __slots__ = ('cond', 'then_branch', 'else_branch')
    _fields = ('cond', 'then_branch', 'else_branch')
    _sequence_fields = ('then_branch', 'else_branch')


class RepeatN(Node):
    __slots__ = ('count', 'invariant', 'body')
    _fields = ('count', 'invariant', 'body')
    _sequence_fields = ('invariant', 'body')


class RepeatUntil(Node):
    __slots__ = ('cond', 'invariant', 'body')
    _fields = ('cond', 'invariant', 'body')
    _sequence_fields = ('invariant', 'body')


class Assert(Node):
    __slots__ = ('cond',)
    _fields = ('cond',)


class Report(Node):
    __slots__ = ('value',)
    _fields = ('value',)


class CallCommand(Node):
    __slots__ = ('block', 'args')
    _fields = ('block', 'args')
    _sequence_fields = ('args',)


class AddToList(Node):
    '''Append `elem` to the list held by variable `list`.'''

    __slots__ = ('elem', 'list')
    _fields = ('elem', 'list')


class ReplaceItem(Node):
    '''Replace item `index` of the list held by variable `list`.'''

    __slots__ = ('index', 'list', 'elem')
    _fields = ('index', 'list', 'elem')


STATEMENT_TYPES = (DeclareLocals, SetVar, ChangeVar, IfElse, RepeatN,
                   RepeatUntil, Assert, Report, CallCommand, AddToList,
                   ReplaceItem)

LOOP_TYPES = (RepeatN, RepeatUntil)

# Statements assigning to the variable named in their `name`/`list` field
ASSIGNMENT_TYPES = (SetVar, ChangeVar, AddToList, ReplaceItem)


def assigned_name(stmt):
    '''Name of the variable assigned (or mutated) by `stmt`, if any.'''

    if isinstance(stmt, (SetVar, ChangeVar)):
        return stmt.name
    elif isinstance(stmt, (AddToList, ReplaceItem)):
        return stmt.list
    else:
        return None


# Definitions

class Param(object):  # pylint: disable=R0903
    '''A block parameter, with an optional declared type

        >>> Param('x', 'int')
        Param(name='x', declared_type='int')
    '''

    __slots__ = '_name', '_declared_type',

    def __init__(self, name, declared_type=None):
        self._name = name
        self._declared_type = declared_type

    name = property(operator.attrgetter('_name'), doc='Parameter name')
    declared_type = property(operator.attrgetter('_declared_type'),
                             doc='Declared type name, or `None`')

    def __repr__(self):
        return 'Param(name=%r, declared_type=%r)' % \
            (self.name, self.declared_type)

    def __eq__(self, other):
        if not isinstance(other, Param):
            return NotImplemented

        return (self.name, self.declared_type) == \
            (other.name, other.declared_type)

    def __ne__(self, other):
        equal = self.__eq__(other)

        if equal is NotImplemented:
            return NotImplemented
        else:
            return not equal

    def __hash__(self):
        return hash((self.name, self.declared_type))


class BlockDef(Node):
    '''A custom block: hat block with contract slots, parameters and body

    Empty :attr:`pre` and :attr:`post` stand for the contract `true`;
    several slots are conjoined in order.
    '''

    __slots__ = ('name', 'kind', 'params', 'pre', 'post', 'body')
    _fields = ('name', 'kind', 'params', 'pre', 'post', 'body')
    _sequence_fields = ('params', 'pre', 'post', 'body')

    def __init__(self, *args, **kwargs):
        super(BlockDef, self).__init__(*args, **kwargs)
        self.params = tuple(
            p if isinstance(p, Param) else Param(p) for p in self.params)

    @property
    def param_names(self):
        return tuple(p.name for p in self.params)

    @property
    def returns_value(self):
        return self.kind in (REPORTER, PREDICATE)

    def local_names(self):
        return declared_locals(self.body)


class Script(Node):
    '''A top-level script, run as an entry point.'''

    __slots__ = ('name', 'body')
    _fields = ('name', 'body')
    _sequence_fields = ('body',)

    def local_names(self):
        return declared_locals(self.body)


def declared_locals(stmts):
    '''Names declared by `DeclareLocals` anywhere in `stmts`, in order.'''

    names = []
    for node in walk_all(stmts):
        if isinstance(node, DeclareLocals):
            for name in node.names:
                if name not in names:
                    names.append(name)

    return tuple(names)


def old_names(block):
    '''Variables whose entry value is referenced under `Old` in the post.'''

    names = []
    for node in walk_all(block.post):
        if isinstance(node, Old) and node.var not in names:
            names.append(node.var)

    return tuple(names)


class Program(object):
    '''A complete block program

    Building a :class:`Program` numbers every node lacking a
    :attr:`Node.block_id` as `<owner>#<ordinal>`, in document order: the hat
    block (or script) is ordinal 0, followed by the pre slots, post slots
    and body in pre-order::

        >>> p = Program([], [BlockDef('f', COMMAND, [], [], [], [
        ...     Assert(Literal(True))])], [])
        >>> [n.block_id for n in walk(p.blocks[0])]
        ['f#0', 'f#1', 'f#2']

    :param globals: Global variables and their initial values
    :type globals: Iterable of `(str, value)`
    :param blocks: Custom blocks
    :type blocks: Iterable of :class:`BlockDef`
    :param scripts: Entry scripts
    :type scripts: Iterable of :class:`Script`
    '''

    __slots__ = '_globals', '_blocks', '_scripts',

    def __init__(self, globals, blocks, scripts):  # pylint: disable=W0622
        self._globals = tuple(
            (name, freeze_value(value)) for (name, value) in globals)
        self._blocks = tuple(blocks)
        self._scripts = tuple(scripts)

        for owner in self._blocks + self._scripts:
            number_nodes(owner)

    globals = property(operator.attrgetter('_globals'),
                       doc='Globals as `(name, frozen initial value)` pairs')
    blocks = property(operator.attrgetter('_blocks'), doc='Custom blocks')
    scripts = property(operator.attrgetter('_scripts'), doc='Entry scripts')

    @property
    def global_names(self):
        return tuple(name for (name, _) in self.globals)

    def get_block(self, name):
        '''Look up a block by name, `None` when absent.'''

        for block in self.blocks:
            if block.name == name:
                return block

        return None

    def get_script(self, name):
        '''Look up a script by name, `None` when absent.'''

        for script in self.scripts:
            if script.name == name:
                return script

        return None

    def owners(self):
        return self.blocks + self.scripts

    def find_node(self, block_id):
        '''Look up any node by :attr:`Node.block_id`, `None` when absent.'''

        for owner in self.owners():
            for node in walk(owner):
                if node.block_id == block_id:
                    return node

        return None

    def _key(self):
        return (tuple((name, value_key(value))
                      for (name, value) in self.globals),
                self.blocks, self.scripts)

    def __eq__(self, other):
        if not isinstance(other, Program):
            return NotImplemented

        return self._key() == other._key()

    def __ne__(self, other):
        equal = self.__eq__(other)

        if equal is NotImplemented:
            return NotImplemented
        else:
            return not equal

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return 'Program(globals=%r, blocks=%r, scripts=%r)' % \
            (self.globals, self.blocks, self.scripts)


def number_nodes(owner):
    '''Assign `<owner>#<ordinal>` identifiers to unnumbered nodes.'''

    for (ordinal, node) in enumerate(walk(owner)):
        if node.block_id is None:
            node.block_id = '%s#%d' % (owner.name, ordinal)


def free_variables(expr):
    '''Variables read by `expr`, quantifier-bound names excluded

        >>> sorted(free_variables(Quantifier(
        ...     'forall', 'i', IntRange(Literal(1), VarRef('n')),
        ...     Compare('le', VarRef('i'), VarRef('n')))))
        ['n']
        >>> free_variables(Old('g'))
        {'g'}
    '''

    if isinstance(expr, VarRef):
        return {expr.name}
    elif isinstance(expr, Old):
        return {expr.var}
    elif isinstance(expr, Quantifier):
        return free_variables(expr.domain) | \
            (free_variables(expr.body) - {expr.var})
    else:
        result = set()
        for child in expr.children():
            result |= free_variables(child)
        return result


def _error(code, message, block_id):
    return Diagnostic(diagnostics.ERROR, diagnostics.PHASE_WELLFORMED, code,
                      message, block_id=block_id)


class _Scope(object):
    '''Names visible at some point of a block or script.'''

    __slots__ = ('owner', 'where', 'params', 'locals', 'globals', 'bound')

    def __init__(self, owner, where, params, locals_, globals_, bound=()):
        self.owner = owner
        self.where = where
        self.params = frozenset(params)
        self.locals = frozenset(locals_)
        self.globals = frozenset(globals_)
        self.bound = frozenset(bound)

    def bind(self, name):
        return _Scope(self.owner, self.where, self.params, self.locals,
                      self.globals, self.bound | {name})

    def sees(self, name):
        return name in self.bound or name in self.locals or \
            name in self.params or name in self.globals


class _Validator(object):
    def __init__(self, program):
        self.program = program
        self.found = []

    def report(self, code, message, block_id):
        self.found.append(_error(code, message, block_id))

    def check_name(self, name, what, block_id):
        if name.startswith(RESERVED_PREFIX):
            self.report('E_RESERVED_NAME',
                        '%s %r uses the reserved %r prefix' %
                        (what, name, RESERVED_PREFIX), block_id)

    def run(self):
        globals_ = []
        for (name, _) in self.program.globals:
            self.check_name(name, 'global', None)
            if name in globals_:
                self.report('E_DUPLICATE_GLOBAL',
                            'global %r is declared twice' % name, None)
            globals_.append(name)

        seen = set()
        for block in self.program.blocks:
            if block.name in seen:
                self.report('E_DUPLICATE_BLOCK',
                            'block %r is defined twice' % block.name,
                            block.block_id)
            seen.add(block.name)
            self.check_block(block, globals_)

        seen = set()
        for script in self.program.scripts:
            if script.name in seen:
                self.report('E_DUPLICATE_SCRIPT',
                            'script %r is defined twice' % script.name,
                            script.block_id)
            seen.add(script.name)
            self.check_name(script.name, 'script', script.block_id)

            scope = _Scope(script, 'body', (), script.local_names(),
                           globals_)
            self.check_locals(script, (), globals_)
            self.check_stmts(script.body, scope)

        return self.found

    def check_block(self, block, globals_):
        self.check_name(block.name, 'block', block.block_id)

        params = []
        for param in block.params:
            self.check_name(param.name, 'parameter', block.block_id)
            if param.name in params:
                self.report('E_DUPLICATE_PARAM',
                            'parameter %r of %r is declared twice' %
                            (param.name, block.name), block.block_id)
            if param.name in globals_:
                self.report('E_PARAM_SHADOWS_GLOBAL',
                            'parameter %r of %r shadows a global' %
                            (param.name, block.name), block.block_id)
            params.append(param.name)

        self.check_locals(block, params, globals_)

        for (where, slots) in (('pre', block.pre), ('post', block.post)):
            scope = _Scope(block, where, params, (), globals_)
            for expr in slots:
                self.check_expr(expr, scope)

        scope = _Scope(block, 'body', params, block.local_names(), globals_)
        self.check_stmts(block.body, scope)

    def check_locals(self, owner, params, globals_):
        for node in walk_all(owner.body):
            if not isinstance(node, DeclareLocals):
                continue

            for name in node.names:
                self.check_name(name, 'variable', node.block_id)
                if name in params:
                    self.report('E_DUPLICATE_PARAM',
                                'local %r duplicates a parameter of %r' %
                                (name, owner.name), node.block_id)

    def check_call(self, node, expected_kinds, scope):
        block = self.program.get_block(node.block)

        if block is None:
            self.report('E_UNKNOWN_BLOCK',
                        'no block named %r' % node.block, node.block_id)
        else:
            if block.kind not in expected_kinds:
                self.report('E_CALL_KIND',
                            '%r is a %s block and cannot be used here' %
                            (block.name, block.kind), node.block_id)
            if len(block.params) != len(node.args):
                self.report('E_CALL_ARITY',
                            '%r expects %d argument(s), got %d' %
                            (block.name, len(block.params), len(node.args)),
                            node.block_id)

        for arg in node.args:
            self.check_expr(arg, scope)

    def check_target(self, name, scope, block_id):
        if name in scope.params:
            self.report('E_ASSIGN_TO_PARAM',
                        'parameter %r cannot be changed' % name, block_id)
        elif name not in scope.locals and name not in scope.globals:
            self.report('E_UNBOUND_NAME',
                        'no variable named %r' % name, block_id)

    def check_expr(self, expr, scope):
        if isinstance(expr, VarRef):
            if not scope.sees(expr.name):
                self.report('E_UNBOUND_NAME',
                            'no variable named %r' % expr.name,
                            expr.block_id)
        elif isinstance(expr, Old):
            if scope.where != 'post':
                self.report('E_OLD_OUTSIDE_POST',
                            'old() may only be used in a postcondition',
                            expr.block_id)
            elif expr.var not in scope.params and \
                    expr.var not in scope.globals:
                self.report('E_UNBOUND_NAME',
                            'old() needs a parameter or global, got %r' %
                            expr.var, expr.block_id)
        elif isinstance(expr, Result):
            if scope.where != 'post':
                self.report('E_RESULT_OUTSIDE_POST',
                            'result may only be used in a postcondition',
                            expr.block_id)
            elif not scope.owner.returns_value:
                self.report('E_RESULT_IN_COMMAND',
                            'command %r reports no result' %
                            scope.owner.name, expr.block_id)
        elif isinstance(expr, Quantifier):
            self.check_name(expr.var, 'variable', expr.block_id)
            self.check_expr(expr.domain, scope)
            self.check_expr(expr.body, scope.bind(expr.var))
        elif isinstance(expr, Call):
            self.check_call(expr, (REPORTER, PREDICATE), scope)
        else:
            for child in expr.children():
                self.check_expr(child, scope)

    def check_stmts(self, stmts, scope):
        for stmt in stmts:
            self.check_stmt(stmt, scope)

    def check_stmt(self, stmt, scope):
        name = assigned_name(stmt)
        if name is not None:
            self.check_target(name, scope, stmt.block_id)

        if isinstance(stmt, Report):
            if not isinstance(scope.owner, BlockDef) or \
                    not scope.owner.returns_value:
                self.report('E_REPORT_OUTSIDE_REPORTER',
                            'report may only be used in a reporter or '
                            'predicate', stmt.block_id)
            self.check_expr(stmt.value, scope)
        elif isinstance(stmt, CallCommand):
            self.check_call(stmt, (COMMAND,), scope)
        else:
            for child in stmt.children():
                if isinstance(child, STATEMENT_TYPES):
                    self.check_stmt(child, scope)
                else:
                    self.check_expr(child, scope)


def validate(program):
    '''Check the well-formedness rules of a program

    The result is a list of :class:`blockverify.diagnostics.Diagnostic`, in
    document order; an empty list means the program is well-formed::

        >>> validate(Program([], [], []))
        []
        >>> [d.code for d in validate(Program([], [BlockDef(
        ...     'f', COMMAND, [], [], [Compare('eq', Result(), Literal(1))],
        ...     [])], []))]
        ['E_RESULT_IN_COMMAND']

    :param program: Program to check
    :type program: :class:`Program`

    :rtype: `list` of :class:`blockverify.diagnostics.Diagnostic`
    '''

    return _Validator(program).run()
