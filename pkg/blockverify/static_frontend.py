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
Type inference for the statically verifiable fragment.

Static verification only handles integers, booleans and lists of integers,
and every variable must keep a single type. Types are inferred by
unification over assignments, uses, contracts and calls; declared parameter
types are checked like any other constraint.

Entry scripts only drive runtime checking and are not type checked.
'''

import logging
import operator

from blockverify import diagnostics
from blockverify import language_model as lm

LOGGER = logging.getLogger(__name__)

GLOBAL_SCOPE = ''
RESULT_NAME = '<result>'


class StaticType(object):  # pylint: disable=R0903
    '''One of the three static types

        >>> INT, StaticType.from_declared('intlist')
        (StaticType('Int'), StaticType('IntList'))
    '''

    __slots__ = '_name', '_declared',

    def __init__(self, name, declared):
        self._name = name
        self._declared = declared

    name = property(operator.attrgetter('_name'), doc='Display name')
    declared = property(operator.attrgetter('_declared'),
                        doc='Name used in parameter type declarations')

    @classmethod
    def from_declared(cls, declared):
        for type_ in ALL_TYPES:
            if type_.declared == declared:
                return type_

        raise ValueError('Unknown type %r' % declared)

    def __repr__(self):
        return 'StaticType(%r)' % self.name

    def __str__(self):
        return self.name


INT = StaticType('Int', 'int')
BOOL = StaticType('Bool', 'bool')
INTLIST = StaticType('IntList', 'intlist')

ALL_TYPES = (INT, BOOL, INTLIST)


class TypeCheckError(diagnostics.DiagnosticsError):
    '''Exception raised when a program is outside the static fragment.'''

    code = 'E_TYPECHECK'
    phase = diagnostics.PHASE_TYPECHECK


class TypedProgram(object):
    '''A :class:`blockverify.language_model.Program` with its static types

    Variables are keyed `(scope, name)`, where `scope` is a block name or
    :const:`GLOBAL_SCOPE`; quantifier-bound variables use the quantifier
    block id as scope. Expression types are keyed by block id.
    '''

    __slots__ = ('_program', '_var_types', '_expr_types', '_modifies',
                 '_warnings')

    def __init__(self, program, var_types, expr_types, modifies=None,
                 warnings=()):
        self._program = program
        self._var_types = dict(var_types)
        self._expr_types = dict(expr_types)
        self._modifies = dict(modifies) if modifies is not None else None
        self._warnings = tuple(warnings)

    program = property(operator.attrgetter('_program'))
    var_types = property(operator.attrgetter('_var_types'))
    expr_types = property(operator.attrgetter('_expr_types'))
    warnings = property(operator.attrgetter('_warnings'),
                        doc='Non-fatal diagnostics, e.g. `W_DIV_SEMANTICS`')

    def type_of_var(self, scope, name):
        '''Type of `name` as seen from `scope`, globals included.'''

        if (scope, name) in self._var_types:
            return self._var_types[(scope, name)]

        return self._var_types.get((GLOBAL_SCOPE, name))

    def global_type(self, name):
        return self._var_types.get((GLOBAL_SCOPE, name))

    def result_type(self, block_name):
        return self._var_types.get((block_name, RESULT_NAME))

    def type_of_expr(self, expr):
        return self._expr_types.get(expr.block_id)

    @property
    def has_modifies(self):
        return self._modifies is not None

    def modifies(self, block_name):
        '''Globals transitively assigned by a block, sorted.

        :raise ValueError: :func:`compute_modifies` didn't run yet
        '''

        if self._modifies is None:
            raise ValueError('Modifies sets were not computed')

        return tuple(sorted(self._modifies[block_name]))

    def with_modifies(self, modifies):
        return TypedProgram(self.program, self.var_types, self.expr_types,
                            modifies=modifies, warnings=self.warnings)


class _TypeVar(object):
    __slots__ = ('parent', 'type', 'witness', 'label', 'broken')

    def __init__(self, label=None):
        self.parent = None
        self.type = None
        self.witness = None
        self.label = label
        self.broken = False


class _Solver(object):
    '''Union-find over type variables, recording conflicts.'''

    def __init__(self, report):
        self._report = report

    @staticmethod
    def find(var):
        root = var
        while root.parent is not None:
            root = root.parent

        while var is not root:
            var.parent, var = root, var.parent

        return root

    def fixed(self, type_, block_id):
        var = _TypeVar()
        var.type = type_
        var.witness = block_id
        return var

    def resolve(self, var):
        return self.find(var).type

    def conflict(self, root, type_, block_id, other_label=None):
        if root.broken:
            return

        root.broken = True
        label = root.label or other_label
        subject = ('variable %r' % label) if label else 'this expression'
        first = ('at %s' % root.witness) if root.witness else \
            'by its initial value'
        self._report(
            'E_DYNAMIC_TYPING', '%s is used as %s %s and as %s at %s' %
            (subject, root.type, first, type_, block_id), block_id)

    def require(self, var, type_, block_id):
        root = self.find(var)

        if root.type is None:
            root.type = type_
            root.witness = block_id
        elif root.type is not type_:
            self.conflict(root, type_, block_id)

    def unify(self, left, right, block_id):
        left, right = self.find(left), self.find(right)
        if left is right:
            return

        if left.type is not None and right.type is not None and \
                left.type is not right.type:
            if not right.broken:
                self.conflict(left, right.type, block_id, right.label)
            right.broken = True
            return

        type_ = left.type or right.type
        label = left.label or right.label
        broken = left.broken or right.broken

        right.parent = left
        if left.type is None or left.label is None:
            left.witness = block_id
        left.type = type_
        left.label = label
        left.broken = broken


class _Inferer(object):
    def __init__(self, program):
        self.program = program
        self.found = []
        self.solver = _Solver(self.report_error)
        self.vars = {}
        self.var_origins = {}
        self.exprs = {}
        self.deferred = []
        self.unassigned = set()

    def report(self, severity, code, message, block_id):
        self.found.append(diagnostics.Diagnostic(
            severity, diagnostics.PHASE_TYPECHECK, code, message,
            block_id=block_id))

    def report_error(self, code, message, block_id):
        self.report(diagnostics.ERROR, code, message, block_id)

    def var(self, key, origin=None):
        if key not in self.vars:
            self.vars[key] = _TypeVar(key[1])
            self.var_origins[key] = origin

        return self.vars[key]

    def key(self, owner, name, bound):
        if name in bound:
            return bound[name]
        elif isinstance(owner, lm.BlockDef) and \
                (name in owner.param_names or name in owner.local_names()):
            return (owner.name, name)
        else:
            return (GLOBAL_SCOPE, name)

    def literal_type(self, value, block_id):
        '''Type of a literal value, `None` when outside the fragment.'''

        kind = lm.kind_of(value)

        if kind == lm.BOOL:
            return BOOL
        elif kind == lm.NUMBER:
            if lm.is_integral(value):
                return INT
            self.report_error('E_NONINT_LITERAL',
                              'only whole numbers can be verified, got %s' %
                              lm.format_value(value), block_id)
        elif kind == lm.TEXT:
            self.report_error('E_TEXT_UNSUPPORTED',
                              'text values cannot be verified', block_id)
        else:
            for item in value:
                item_kind = lm.kind_of(item)
                if item_kind == lm.LIST:
                    self.report_error('E_NESTED_LIST',
                                      'lists of lists cannot be verified',
                                      block_id)
                    return None
                elif item_kind != lm.NUMBER or not lm.is_integral(item):
                    self.report_error(
                        'E_NON_INT_LIST', 'only lists of whole numbers can '
                        'be verified, got %s' % lm.format_value(item),
                        block_id)
                    return None
            return INTLIST

        return None

    def expr(self, owner, expr, bound):
        '''Infer the type variable of `expr`.'''

        method = getattr(self, '_expr_%s' % type(expr).__name__)
        var = method(owner, expr, bound)
        self.exprs[expr.block_id] = var
        return var

    def require(self, owner, expr, type_, bound):
        self.solver.require(self.expr(owner, expr, bound), type_,
                            expr.block_id)

    def _expr_Literal(self, owner, expr, bound):
        type_ = self.literal_type(expr.value, expr.block_id)

        if type_ is None:
            var = _TypeVar()
            var.broken = True
            return var

        return self.solver.fixed(type_, expr.block_id)

    def _expr_VarRef(self, owner, expr, bound):
        var = self.var(self.key(owner, expr.name, bound), expr.block_id)
        if expr.name not in bound:
            self.read_local(var, expr.name, expr.block_id)
        return var

    def _expr_Arith(self, owner, expr, bound):
        self.require(owner, expr.left, INT, bound)
        self.require(owner, expr.right, INT, bound)

        if expr.op == 'div':
            self.report(diagnostics.WARNING, 'W_DIV_SEMANTICS',
                        'verification uses whole-number division, running '
                        'the block may produce fractions', expr.block_id)
        elif expr.op == 'mod':
            self.report(diagnostics.WARNING, 'W_DIV_SEMANTICS',
                        'verification uses a remainder that is never '
                        'negative, running the block takes the sign of the '
                        'divisor', expr.block_id)

        return self.solver.fixed(INT, expr.block_id)

    def _expr_Compare(self, owner, expr, bound):
        if expr.op in ('eq', 'neq'):
            left = self.expr(owner, expr.left, bound)
            right = self.expr(owner, expr.right, bound)
            self.solver.unify(left, right, expr.block_id)
        else:
            self.require(owner, expr.left, INT, bound)
            self.require(owner, expr.right, INT, bound)

        return self.solver.fixed(BOOL, expr.block_id)

    def _expr_BoolOp(self, owner, expr, bound):
        for operand in expr.operands:
            self.require(owner, operand, BOOL, bound)

        return self.solver.fixed(BOOL, expr.block_id)

    def _expr_Old(self, owner, expr, bound):
        return self.var(self.key(owner, expr.var, {}), expr.block_id)

    def _expr_Result(self, owner, expr, bound):
        return self.var((owner.name, RESULT_NAME), expr.block_id)

    def _expr_Quantifier(self, owner, expr, bound):
        bound_key = (expr.block_id, expr.var)
        bound_var = self.var(bound_key, expr.block_id)

        domain = expr.domain
        if isinstance(domain, lm.IntRange):
            self.require(owner, domain.lo, INT, bound)
            self.require(owner, domain.hi, INT, bound)
        else:
            self.require(owner, domain.list, INTLIST, bound)
        self.solver.require(bound_var, INT, domain.block_id)

        inner = dict(bound)
        inner[expr.var] = bound_key
        self.require(owner, expr.body, BOOL, inner)

        return self.solver.fixed(BOOL, expr.block_id)

    def _expr_Item(self, owner, expr, bound):
        self.require(owner, expr.index, INT, bound)
        self.require(owner, expr.list, INTLIST, bound)
        return self.solver.fixed(INT, expr.block_id)

    def _expr_LengthOf(self, owner, expr, bound):
        self.require(owner, expr.list, INTLIST, bound)
        return self.solver.fixed(INT, expr.block_id)

    def _expr_Contains(self, owner, expr, bound):
        self.require(owner, expr.list, INTLIST, bound)
        self.element(owner, expr.elem, bound)
        return self.solver.fixed(BOOL, expr.block_id)

    def _expr_Call(self, owner, expr, bound):
        self.call(owner, expr, bound)
        return self.var((expr.block, RESULT_NAME), expr.block_id)

    def element(self, owner, expr, bound):
        # List elements are checked once every other constraint is known, so
        # a list put into a list is reported as such
        self.deferred.append((self.expr(owner, expr, bound), expr.block_id))

    def call(self, owner, node, bound):
        callee = self.program.get_block(node.block)

        for (param, arg) in zip(callee.params, node.args):
            self.solver.unify(
                self.var((callee.name, param.name), callee.block_id),
                self.expr(owner, arg, bound), arg.block_id)

    def stmts(self, owner, stmts):
        for stmt in stmts:
            method = getattr(self, '_stmt_%s' % type(stmt).__name__)
            method(owner, stmt)

    def target(self, owner, name, block_id):
        return self.var(self.key(owner, name, {}), block_id)

    def read_local(self, var, name, block_id):
        '''A local read before any assignment holds its initial 0.'''

        if name in self.unassigned:
            witness = None if self.solver.resolve(var) is None else block_id
            self.solver.require(var, INT, witness)

    def branch(self, owner, stmts):
        '''Run `stmts` on a copy of the unassigned locals, return the copy.'''

        before = self.unassigned
        self.unassigned = set(before)
        try:
            self.stmts(owner, stmts)
            return self.unassigned
        finally:
            self.unassigned = before

    def _stmt_DeclareLocals(self, owner, stmt):
        for name in stmt.names:
            self.target(owner, name, stmt.block_id)
        self.unassigned.update(stmt.names)

    def _stmt_SetVar(self, owner, stmt):
        self.solver.unify(self.target(owner, stmt.name, stmt.block_id),
                          self.expr(owner, stmt.value, {}), stmt.block_id)
        self.unassigned.discard(stmt.name)

    def _stmt_ChangeVar(self, owner, stmt):
        self.solver.require(self.target(owner, stmt.name, stmt.block_id),
                            INT, stmt.block_id)
        self.require(owner, stmt.delta, INT, {})

    def _stmt_IfElse(self, owner, stmt):
        self.require(owner, stmt.cond, BOOL, {})
        self.unassigned = self.branch(owner, stmt.then_branch) | \
            self.branch(owner, stmt.else_branch)

    def _stmt_RepeatN(self, owner, stmt):
        self.require(owner, stmt.count, INT, {})
        for slot in stmt.invariant:
            self.require(owner, slot, BOOL, {})
        # The body may run zero times
        self.unassigned |= self.branch(owner, stmt.body)

    def _stmt_RepeatUntil(self, owner, stmt):
        self.require(owner, stmt.cond, BOOL, {})
        for slot in stmt.invariant:
            self.require(owner, slot, BOOL, {})
        self.unassigned |= self.branch(owner, stmt.body)

    def _stmt_Assert(self, owner, stmt):
        self.require(owner, stmt.cond, BOOL, {})

    def _stmt_Report(self, owner, stmt):
        self.solver.unify(self.var((owner.name, RESULT_NAME), stmt.block_id),
                          self.expr(owner, stmt.value, {}), stmt.block_id)

    def _stmt_CallCommand(self, owner, stmt):
        self.call(owner, stmt, {})

    def _stmt_AddToList(self, owner, stmt):
        var = self.target(owner, stmt.list, stmt.block_id)
        self.read_local(var, stmt.list, stmt.block_id)
        self.solver.require(var, INTLIST, stmt.block_id)
        self.element(owner, stmt.elem, {})

    def _stmt_ReplaceItem(self, owner, stmt):
        self.require(owner, stmt.index, INT, {})
        var = self.target(owner, stmt.list, stmt.block_id)
        self.read_local(var, stmt.list, stmt.block_id)
        self.solver.require(var, INTLIST, stmt.block_id)
        self.element(owner, stmt.elem, {})

    def block(self, block):
        self.unassigned = set()

        for param in block.params:
            var = self.var((block.name, param.name), block.block_id)
            if param.declared_type is not None:
                self.solver.require(
                    var, StaticType.from_declared(param.declared_type),
                    block.block_id)

        if block.kind == lm.PREDICATE:
            self.solver.require(
                self.var((block.name, RESULT_NAME), block.block_id), BOOL,
                block.block_id)

        for slot in block.pre + block.post:
            self.require(block, slot, BOOL, {})

        self.stmts(block, block.body)

    def run(self):
        for (name, value) in self.program.globals:
            var = self.var((GLOBAL_SCOPE, name))
            type_ = self.literal_type(value, None)
            if type_ is not None:
                self.solver.require(var, type_, None)

        # Parameters and results exist before any call refers to them
        for block in self.program.blocks:
            for param in block.params:
                self.var((block.name, param.name), block.block_id)
            if block.returns_value:
                self.var((block.name, RESULT_NAME), block.block_id)

        for block in self.program.blocks:
            self.block(block)

        for (var, block_id) in self.deferred:
            if self.solver.resolve(var) is INTLIST:
                self.report_error('E_NESTED_LIST',
                                  'lists of lists cannot be verified',
                                  block_id)
            else:
                self.solver.require(var, INT, block_id)

        var_types = {}
        for (key, var) in sorted(self.vars.items()):
            type_ = self.solver.resolve(var)
            if type_ is None:
                self.report_error(
                    'E_UNTYPEABLE', 'the type of %r cannot be determined, '
                    'declare it or use it' % key[1], self.var_origins[key])
            else:
                var_types[key] = type_

        expr_types = {}
        untyped = []
        for (block_id, var) in self.exprs.items():
            type_ = self.solver.resolve(var)
            if type_ is None:
                untyped.append(block_id)
            else:
                expr_types[block_id] = type_

        errors, _ = diagnostics.count(self.found)
        if not errors:
            for block_id in sorted(untyped):
                self.report_error('E_UNTYPEABLE',
                                  'the type of this expression cannot be '
                                  'determined', block_id)

        return var_types, expr_types


def infer_types(program):
    '''Infer one static type per variable, result and expression

        >>> p = lm.Program([], [lm.BlockDef('isPos', lm.PREDICATE, ['x'],
        ...     [], [], [lm.Report(lm.Compare('gt', lm.VarRef('x'),
        ...                                   lm.Literal(0)))])], [])
        >>> typed = infer_types(p)
        >>> typed.type_of_var('isPos', 'x'), typed.result_type('isPos')
        (StaticType('Int'), StaticType('Bool'))

    :param program: Well-formed program
    :type program: :class:`blockverify.language_model.Program`

    :rtype: :class:`TypedProgram`, without modifies sets

    :raise TypeCheckError: The program is outside the static fragment
    '''

    inferer = _Inferer(program)
    var_types, expr_types = inferer.run()

    errors, warnings = diagnostics.count(inferer.found)
    LOGGER.debug('Type inference: %d error(s), %d warning(s)',
                 errors, warnings)

    if errors:
        raise TypeCheckError(inferer.found)

    return TypedProgram(program, var_types, expr_types,
                        warnings=inferer.found)


def _callees(block):
    for node in lm.walk_all(block.body):
        if isinstance(node, (lm.Call, lm.CallCommand)):
            yield node.block


def compute_modifies(typed):
    '''Compute the globals each block assigns, directly or through calls

    The result is the least fixpoint over the call graph, so recursive blocks
    converge.

    :param typed: Output of :func:`infer_types`
    :type typed: :class:`TypedProgram`

    :rtype: :class:`TypedProgram`
    '''

    program = typed.program
    global_names = set(program.global_names)

    modifies = {}
    calls = {}
    for block in program.blocks:
        locals_ = set(block.local_names())
        modifies[block.name] = set(
            name for name in
            (lm.assigned_name(node) for node in lm.walk_all(block.body))
            if name in global_names and name not in locals_)
        calls[block.name] = set(_callees(block))

    changed = True
    while changed:
        changed = False
        for block in program.blocks:
            current = modifies[block.name]
            for callee in calls[block.name]:
                missing = modifies.get(callee, set()) - current
                if missing:
                    current |= missing
                    changed = True

    return typed.with_modifies(modifies)


def check_program(program):
    '''Run :func:`infer_types` then :func:`compute_modifies`.'''

    return compute_modifies(infer_types(program))
