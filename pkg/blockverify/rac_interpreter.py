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
Execution of block programs with runtime assertion checking.

Every call checks the callee's precondition before running its body and its
postcondition when it returns; assertions are checked where they stand and
loop invariants before the first iteration and after every iteration.
Execution stops at the first violation.
'''

import contextlib
import logging
import operator
import sys

from blockverify import diagnostics
from blockverify import language_model as lm
from blockverify import utils

LOGGER = logging.getLogger(__name__)

DEFAULT_DEPTH_LIMIT = 10000
# Python frames used by one nested block call, expressions included
FRAMES_PER_CALL = 20

PRECONDITION = 'Precondition'
POSTCONDITION = 'Postcondition'
ASSERTION = 'Assertion'
INVARIANT_ENTRY = 'InvariantEntry'
INVARIANT_ITERATION = 'InvariantIteration'

VIOLATION_KINDS = (PRECONDITION, POSTCONDITION, ASSERTION, INVARIANT_ENTRY,
                   INVARIANT_ITERATION)

VIOLATION_CODES = {
    PRECONDITION: 'E_PRECONDITION',
    POSTCONDITION: 'E_POSTCONDITION',
    ASSERTION: 'E_ASSERTION',
    INVARIANT_ENTRY: 'E_INVARIANT_ENTRY',
    INVARIANT_ITERATION: 'E_INVARIANT_ITERATION',
}

VIOLATION_MESSAGES = {
    PRECONDITION: 'the precondition (slot %d) does not hold at this call',
    POSTCONDITION: 'the postcondition (slot %d) does not hold on return',
    ASSERTION: 'the assertion does not hold',
    INVARIANT_ENTRY:
        'the loop invariant (slot %d) does not hold before the first '
        'iteration',
    INVARIANT_ITERATION:
        'the loop invariant (slot %d) does not hold after iteration %d',
}


class RuntimeFault(diagnostics.BlockVerifyError):
    '''Exception raised when execution goes wrong (`E_TYPE`, `E_INDEX`, ...)'''

    phase = diagnostics.PHASE_RUNTIME

    def __init__(self, code, message, block_id=None, call_chain=()):
        super(RuntimeFault, self).__init__(message, block_id=block_id,
                                           code=code)
        self.call_chain = tuple(call_chain)

    @property
    def diagnostics(self):
        return [diagnostics.Diagnostic(
            diagnostics.ERROR, self.phase, self.code, self.message,
            block_id=self.block_id, call_chain=self.call_chain)]


class EntryError(diagnostics.BlockVerifyError):
    '''Exception raised when an entry point can't be started.'''

    phase = diagnostics.PHASE_RUNTIME


class Violation(diagnostics.BlockVerifyError):
    '''A contract, assertion or invariant found false during execution

    :param kind: One of :const:`VIOLATION_KINDS`
    :param block_id: Identifier of the failing slot expression
    :param slot_index: 1-based index of the first failing conjunct
    :param call_chain: Identifiers of the active blocks, outermost first
    :param iteration: Iteration counter, for invariant violations
    :param frame_values: Parameters and locals of the failing frame
    '''

    phase = diagnostics.PHASE_RUNTIME

    def __init__(self, kind, block_id, slot_index, call_chain,
                 iteration=None, frame_values=None):
        if kind == INVARIANT_ITERATION:
            message = VIOLATION_MESSAGES[kind] % (slot_index, iteration)
        elif kind == ASSERTION:
            message = VIOLATION_MESSAGES[kind]
        else:
            message = VIOLATION_MESSAGES[kind] % slot_index

        super(Violation, self).__init__(message, block_id=block_id,
                                        code=VIOLATION_CODES[kind])

        self.kind = kind
        self.slot_index = slot_index
        self.call_chain = tuple(call_chain)
        self.iteration = iteration
        self.frame_values = list(frame_values or [])

    def __repr__(self):
        return ('Violation(kind=%r, block_id=%r, slot_index=%r, '
                'call_chain=%r, iteration=%r)' %
                (self.kind, self.block_id, self.slot_index, self.call_chain,
                 self.iteration))

    @property
    def diagnostics(self):
        return [diagnostics.Diagnostic(
            diagnostics.ERROR, self.phase, self.code, self.message,
            block_id=self.block_id, slot_index=self.slot_index,
            call_chain=self.call_chain)]


class _ReportSignal(Exception):
    '''Unwinds a block body when `report` runs.'''

    def __init__(self, value):
        super(_ReportSignal, self).__init__()
        self.value = value


_NO_RESULT = object()


class Frame(object):
    '''Activation record of a block call or script run.'''

    __slots__ = ('owner', 'params', 'locals', 'old_snapshot', 'result',
                 'bound')

    def __init__(self, owner, params=None):
        self.owner = owner
        self.params = dict(params or {})
        self.locals = {}
        self.old_snapshot = None
        self.result = _NO_RESULT
        # Quantifier bindings, innermost last
        self.bound = []

    def values(self):
        '''Parameters and locals, as sorted `(name, value)` pairs.'''

        merged = dict(self.params)
        merged.update(self.locals)
        return sorted(merged.items())


class Environment(object):
    '''Mutable execution state: globals and the frame stack

    Names are looked up in the innermost quantifier bindings, then the
    locals, the parameters and finally the globals of the program.
    '''

    def __init__(self, globals_):
        self.globals = dict(globals_)
        self.frames = []

    @property
    def frame(self):
        return self.frames[-1]

    def call_chain(self):
        return [frame.owner.block_id for frame in self.frames]

    def lookup(self, name, block_id=None):
        frame = self.frame if self.frames else None

        if frame is not None:
            for bindings in reversed(frame.bound):
                if name in bindings:
                    return bindings[name]
            if name in frame.locals:
                return frame.locals[name]
            if name in frame.params:
                return frame.params[name]

        if name in self.globals:
            return self.globals[name]

        raise RuntimeFault('E_UNBOUND', 'no variable named %r' % name,
                           block_id, self.call_chain())

    def assign(self, name, value, block_id=None):
        frame = self.frame

        if name in frame.locals:
            frame.locals[name] = value
        elif name in self.globals:
            self.globals[name] = value
        else:
            raise RuntimeFault('E_UNBOUND', 'no variable named %r' % name,
                               block_id, self.call_chain())


class ExecutionReport(object):  # pylint: disable=R0903
    '''Outcome of running an entry point

    :param entry: Name of the entry point
    :param globals: Final global values, as sorted `(name, value)` pairs
    :param result: Reported value, `None` for commands and scripts
    :param violation: First :class:`Violation`, if any
    :param fault: :class:`RuntimeFault` which stopped the run, if any
    '''

    __slots__ = ('_entry', '_globals', '_result', '_violation', '_fault')

    def __init__(self, entry, globals_, result=None, violation=None,
                 fault=None):
        self._entry = entry
        self._globals = sorted(globals_.items())
        self._result = result
        self._violation = violation
        self._fault = fault

    entry = property(operator.attrgetter('_entry'))
    globals = property(operator.attrgetter('_globals'))
    result = property(operator.attrgetter('_result'))
    violation = property(operator.attrgetter('_violation'))
    fault = property(operator.attrgetter('_fault'))

    @property
    def passed(self):
        return self.violation is None and self.fault is None

    @property
    def outcome(self):
        '''`passed`, the violation kind or the fault code.'''

        if self.violation is not None:
            return self.violation.kind
        elif self.fault is not None:
            return self.fault.code
        else:
            return 'passed'

    @property
    def diagnostics(self):
        failure = self.violation or self.fault
        return failure.diagnostics if failure is not None else []

    def _values(self):
        return (self.entry, self.globals, self.result, self.outcome,
                [d.to_dict() for d in self.diagnostics])

    def __eq__(self, other):
        if not isinstance(other, ExecutionReport):
            return NotImplemented

        return self._values() == other._values()

    def __ne__(self, other):
        equal = self.__eq__(other)

        if equal is NotImplemented:
            return NotImplemented
        else:
            return not equal

    __hash__ = None

    def __repr__(self):
        return 'ExecutionReport(entry=%r, outcome=%r, result=%r)' % \
            (self.entry, self.outcome, self.result)

    def to_dict(self):
        return {
            'entry': self.entry,
            'outcome': self.outcome,
            'result': self.result,
            'globals': dict(self.globals),
            'diagnostics': [d.to_dict() for d in self.diagnostics],
        }


def _number(value):
    return lm.kind_of(value) == lm.NUMBER


def _arith_div(left, right):
    if isinstance(left, int) and isinstance(right, int) and \
            left % right == 0:
        return left // right

    return left / right


@contextlib.contextmanager
def recursion_room(depth_limit):
    '''Raise the interpreter recursion limit to fit `depth_limit` calls

    The previous limit is restored on exit.

        >>> before = sys.getrecursionlimit()
        >>> with recursion_room(100):
        ...     sys.getrecursionlimit() - before
        2000
        >>> sys.getrecursionlimit() == before
        True
    '''

    previous = sys.getrecursionlimit()
    sys.setrecursionlimit(previous + depth_limit * FRAMES_PER_CALL)
    try:
        yield
    finally:
        sys.setrecursionlimit(previous)


ARITH_FUNCTIONS = {
    'add': operator.add,
    'sub': operator.sub,
    'mul': operator.mul,
    'div': _arith_div,
    'mod': operator.mod,
}

ORDER_FUNCTIONS = {
    'lt': operator.lt,
    'le': operator.le,
    'gt': operator.gt,
    'ge': operator.ge,
}


class Interpreter(object):
    '''Runtime assertion checking interpreter for one program

    An instance is single-threaded; distinct instances share no state.

    :param program: Program to run
    :type program: :class:`blockverify.language_model.Program`
    :param depth_limit: Maximum number of nested block calls
    :type depth_limit: `int`
    :param logger: Logger to use
    :type logger: `logging.Logger`
    '''

    def __init__(self, program, depth_limit=DEFAULT_DEPTH_LIMIT, logger=None):
        self._program = program
        self._depth_limit = depth_limit
        self._logger = logger or LOGGER

        # Number of invariant conjunction evaluations, for instrumentation
        self.invariant_checks = 0

    program = property(operator.attrgetter('_program'))
    depth_limit = property(operator.attrgetter('_depth_limit'))
    logger = property(operator.attrgetter('_logger'))

    def new_environment(self):
        return Environment(
            (name, lm.thaw_value(value))
            for (name, value) in self.program.globals)

    def fault(self, env, code, message, node):
        return RuntimeFault(code, message, node.block_id, env.call_chain())

    def expect(self, env, value, kind, node, what):
        if lm.kind_of(value) != kind:
            raise self.fault(
                env, 'E_TYPE', '%s expects a %s, got %s' %
                (what, kind, lm.format_value(value)), node)

        return value

    def expect_integer(self, env, value, node, what):
        self.expect(env, value, lm.NUMBER, node, what)

        if not lm.is_integral(value):
            raise self.fault(
                env, 'E_TYPE', '%s expects a whole number, got %s' %
                (what, lm.format_value(value)), node)

        return int(value)

    def list_index(self, env, index, items, node):
        index = self.expect_integer(env, index, node, 'item')

        if index < 1 or index > len(items):
            raise self.fault(
                env, 'E_INDEX', 'index %d is out of range for a list of '
                'length %d' % (index, len(items)), node)

        return index - 1

    def eval_expr(self, env, expr):
        '''Evaluate an expression

        Evaluation is strict: every operand is evaluated, `and`/`or`
        included.

        :raise RuntimeFault: `E_TYPE`, `E_INDEX`, `E_DIV_ZERO`, `E_OVERFLOW`,
                             `E_UNBOUND`, `E_NO_OLD` or `E_NO_RESULT`
        :raise Violation: From a reporter called by the expression
        '''

        method = getattr(self, '_eval_%s' % type(expr).__name__)
        return method(env, expr)

    def _eval_Literal(self, env, expr):
        return lm.thaw_value(expr.value)

    def _eval_VarRef(self, env, expr):
        return env.lookup(expr.name, expr.block_id)

    def _eval_Arith(self, env, expr):
        left = self.eval_expr(env, expr.left)
        right = self.eval_expr(env, expr.right)

        self.expect(env, left, lm.NUMBER, expr, expr.op)
        self.expect(env, right, lm.NUMBER, expr, expr.op)

        if expr.op in ('div', 'mod') and right == 0:
            raise self.fault(env, 'E_DIV_ZERO', 'division by zero', expr)

        try:
            return ARITH_FUNCTIONS[expr.op](left, right)
        except OverflowError:
            raise self.fault(env, 'E_OVERFLOW', 'the result of %s is too '
                             'large' % expr.op, expr)

    def _eval_Compare(self, env, expr):
        left = self.eval_expr(env, expr.left)
        right = self.eval_expr(env, expr.right)

        if expr.op == 'eq':
            return lm.values_equal(left, right)
        elif expr.op == 'neq':
            return not lm.values_equal(left, right)

        lkind, rkind = lm.kind_of(left), lm.kind_of(right)
        if lkind != rkind or lkind not in (lm.NUMBER, lm.TEXT):
            raise self.fault(
                env, 'E_TYPE', 'cannot order %s and %s' %
                (lm.format_value(left), lm.format_value(right)), expr)

        return ORDER_FUNCTIONS[expr.op](left, right)

    def _eval_BoolOp(self, env, expr):
        values = [
            self.expect(env, self.eval_expr(env, operand), lm.BOOL, expr,
                        expr.op)
            for operand in expr.operands]

        op = expr.op
        if op == 'and':
            return all(values)
        elif op == 'or':
            return any(values)
        elif op == 'not':
            return not values[0]
        elif op == 'implies':
            return (not values[0]) or values[1]
        elif op == 'iff':
            return values[0] == values[1]
        elif op == 'xor':
            return values[0] != values[1]
        else:
            raise AssertionError('Unknown operator %r' % op)

    def _eval_Old(self, env, expr):
        snapshot = env.frame.old_snapshot if env.frames else None

        if snapshot is None or expr.var not in snapshot:
            raise self.fault(env, 'E_NO_OLD',
                             'no entry value recorded for %r' % expr.var,
                             expr)

        return snapshot[expr.var]

    def _eval_Result(self, env, expr):
        if not env.frames or env.frame.result is _NO_RESULT:
            raise self.fault(env, 'E_NO_RESULT', 'no result available',
                             expr)

        return env.frame.result

    def domain_values(self, env, domain):
        if isinstance(domain, lm.IntRange):
            lo = self.expect_integer(env, self.eval_expr(env, domain.lo),
                                     domain, 'range')
            hi = self.expect_integer(env, self.eval_expr(env, domain.hi),
                                     domain, 'range')
            return list(range(lo, hi + 1))
        else:
            items = self.eval_expr(env, domain.list)
            self.expect(env, items, lm.LIST, domain, 'elements')
            return list(items)

    def _eval_Quantifier(self, env, expr):
        frame = env.frame
        values = []

        for value in self.domain_values(env, expr.domain):
            frame.bound.append({expr.var: value})
            try:
                values.append(self.expect(
                    env, self.eval_expr(env, expr.body), lm.BOOL, expr,
                    expr.quantifier))
            finally:
                frame.bound.pop()

        if expr.quantifier == 'forall':
            return all(values)
        else:
            return any(values)

    def _eval_Item(self, env, expr):
        index = self.eval_expr(env, expr.index)
        items = self.expect(env, self.eval_expr(env, expr.list), lm.LIST,
                            expr, 'item')

        return items[self.list_index(env, index, items, expr)]

    def _eval_LengthOf(self, env, expr):
        items = self.expect(env, self.eval_expr(env, expr.list), lm.LIST,
                            expr, 'length')
        return len(items)

    def _eval_Contains(self, env, expr):
        items = self.expect(env, self.eval_expr(env, expr.list), lm.LIST,
                            expr, 'contains')
        elem = self.eval_expr(env, expr.elem)

        return any(lm.values_equal(item, elem) for item in items)

    def _eval_Call(self, env, expr):
        return self.call_node(env, expr)

    def call_node(self, env, node):
        block = self.program.get_block(node.block)
        if block is None:
            raise self.fault(env, 'E_UNBOUND',
                             'no block named %r' % node.block, node)

        args = [self.eval_expr(env, arg) for arg in node.args]
        return self.call_block(env, block, args)

    def check_slots(self, env, slots, kind, iteration=None):
        '''Evaluate contract slots in order, raising on the first false one.

        :raise RuntimeFault: `E_NONBOOL_SPEC`
        :raise Violation: A slot is false
        '''

        for (index, slot) in enumerate(slots):
            value = self.eval_expr(env, slot)

            if lm.kind_of(value) != lm.BOOL:
                raise self.fault(
                    env, 'E_NONBOOL_SPEC', 'a %s slot must be true or false, '
                    'got %s' % (kind, lm.format_value(value)), slot)

            if not value:
                raise Violation(kind, slot.block_id, index + 1,
                                env.call_chain(), iteration=iteration,
                                frame_values=env.frame.values())

    def check_invariant(self, env, loop, iteration):
        self.invariant_checks += 1
        kind = INVARIANT_ENTRY if iteration == 0 else INVARIANT_ITERATION
        self.check_slots(env, loop.invariant, kind,
                         iteration=iteration)

    def exec_stmts(self, env, stmts):
        '''Execute statements in sequence

        :raise RuntimeFault: Any runtime error
        :raise Violation: An assertion or loop invariant is false
        '''

        for stmt in stmts:
            method = getattr(self, '_exec_%s' % type(stmt).__name__)
            method(env, stmt)

    def _exec_DeclareLocals(self, env, stmt):
        for name in stmt.names:
            env.frame.locals[name] = 0

    def _exec_SetVar(self, env, stmt):
        # Lists are values: the variable gets its own copy
        env.assign(stmt.name, lm.copy_value(self.eval_expr(env, stmt.value)),
                   stmt.block_id)

    def _exec_ChangeVar(self, env, stmt):
        delta = self.expect(env, self.eval_expr(env, stmt.delta), lm.NUMBER,
                            stmt, 'change')
        current = self.expect(env, env.lookup(stmt.name, stmt.block_id),
                              lm.NUMBER, stmt, 'change')

        try:
            env.assign(stmt.name, current + delta, stmt.block_id)
        except OverflowError:
            raise self.fault(env, 'E_OVERFLOW', 'the result of change is '
                             'too large', stmt)

    def _exec_IfElse(self, env, stmt):
        cond = self.expect(env, self.eval_expr(env, stmt.cond), lm.BOOL,
                           stmt, 'if')

        self.exec_stmts(env, stmt.then_branch if cond else stmt.else_branch)

    def _exec_RepeatN(self, env, stmt):
        count = self.expect(env, self.eval_expr(env, stmt.count), lm.NUMBER,
                            stmt, 'repeat')
        if count < 0:
            raise self.fault(env, 'E_TYPE',
                             'repeat expects a count of at least 0, got %s' %
                             lm.format_value(count), stmt)

        self.check_invariant(env, stmt, 0)
        for iteration in range(1, int(count) + 1):
            self.exec_stmts(env, stmt.body)
            self.check_invariant(env, stmt, iteration)

    def _exec_RepeatUntil(self, env, stmt):
        self.check_invariant(env, stmt, 0)

        iteration = 0
        while not self.expect(env, self.eval_expr(env, stmt.cond), lm.BOOL,
                              stmt, 'repeat until'):
            self.exec_stmts(env, stmt.body)
            iteration += 1
            self.check_invariant(env, stmt, iteration)

    def _exec_Assert(self, env, stmt):
        value = self.eval_expr(env, stmt.cond)

        if lm.kind_of(value) != lm.BOOL:
            raise self.fault(
                env, 'E_NONBOOL_SPEC', 'an assertion must be true or false, '
                'got %s' % lm.format_value(value), stmt)

        if not value:
            raise Violation(ASSERTION, stmt.block_id, 1, env.call_chain(),
                            frame_values=env.frame.values())

    def _exec_Report(self, env, stmt):
        raise _ReportSignal(self.eval_expr(env, stmt.value))

    def _exec_CallCommand(self, env, stmt):
        self.call_node(env, stmt)

    def _exec_AddToList(self, env, stmt):
        elem = self.eval_expr(env, stmt.elem)
        items = self.expect(env, env.lookup(stmt.list, stmt.block_id),
                            lm.LIST, stmt, 'add')

        items.append(elem)

    def _exec_ReplaceItem(self, env, stmt):
        index = self.eval_expr(env, stmt.index)
        items = self.expect(env, env.lookup(stmt.list, stmt.block_id),
                            lm.LIST, stmt, 'replace item')
        elem = self.eval_expr(env, stmt.elem)

        items[self.list_index(env, index, items, stmt)] = elem

    @utils.trace
    def call_block(self, env, block, args):
        '''Call a block with full contract checking

        The protocol is: bind copies of the arguments in a new frame,
        record the entry values of the variables used under `old`, check
        the precondition, run the body, default the result, check the
        postcondition and pop the frame.

        :param env: Current environment
        :type env: :class:`Environment`
        :param block: Block to call
        :type block: :class:`blockverify.language_model.BlockDef`
        :param args: Argument values, in parameter order
        :type args: `list`

        :return: Reported value, `None` for commands

        :raise Violation: Precondition or postcondition false, or any
                          violation raised by the body
        :raise RuntimeFault: `E_NO_REPORT`, `E_STACK_OVERFLOW`, `E_ARITY` or
                             any error raised by the body
        '''

        if len(args) != len(block.params):
            raise RuntimeFault(
                'E_ARITY', '%r expects %d argument(s), got %d' %
                (block.name, len(block.params), len(args)), block.block_id,
                env.call_chain())

        if len(env.frames) >= self.depth_limit:
            raise RuntimeFault(
                'E_STACK_OVERFLOW', 'more than %d nested calls' %
                self.depth_limit, block.block_id, env.call_chain())

        frame = Frame(block, zip(block.param_names,
                                 [lm.copy_value(arg) for arg in args]))
        env.frames.append(frame)
        try:
            frame.old_snapshot = dict(
                (name, lm.copy_value(env.lookup(name)))
                for name in lm.old_names(block))

            self.check_slots(env, block.pre, PRECONDITION)

            try:
                self.exec_stmts(env, block.body)
            except _ReportSignal as signal:
                frame.result = signal.value

            if block.returns_value and frame.result is _NO_RESULT:
                if block.kind == lm.PREDICATE:
                    frame.result = False
                else:
                    raise RuntimeFault(
                        'E_NO_REPORT', '%r finished without reporting a '
                        'value' % block.name, block.block_id,
                        env.call_chain())

            self.check_slots(env, block.post, POSTCONDITION)
        finally:
            env.frames.pop()

        return frame.result if block.returns_value else None

    def run_script(self, env, script):
        env.frames.append(Frame(script))
        try:
            self.exec_stmts(env, script.body)
        finally:
            env.frames.pop()

    @utils.trace
    def run_entry(self, entry, args=()):
        '''Run an entry script or block

        For a block, `args` bind its parameters by name; for a script, they
        override the initial values of globals.

        :param entry: Name of a script or block
        :type entry: `str`
        :param args: Argument values
        :type args: Iterable of `(str, value)`

        :rtype: :class:`ExecutionReport`

        :raise EntryError: `E_ENTRY_NOT_FOUND` or `E_ARITY`
        '''

        args = list(args)
        env = self.new_environment()
        script = self.program.get_script(entry)
        block = self.program.get_block(entry) if script is None else None

        if script is None and block is None:
            raise EntryError('no script or block named %r' % entry,
                             code='E_ENTRY_NOT_FOUND')

        names = [name for (name, _) in args]
        if len(set(names)) != len(names):
            raise EntryError('duplicate arguments for %r' % entry,
                             code='E_ARITY')

        if script is not None:
            for (name, value) in args:
                if name not in env.globals:
                    raise EntryError('script %r has no global named %r' %
                                     (entry, name), code='E_ARITY')
                env.globals[name] = lm.copy_value(value)
        elif sorted(names) != sorted(block.param_names):
            raise EntryError('%r expects arguments %s, got %s' %
                             (entry, ', '.join(block.param_names) or 'none',
                              ', '.join(names) or 'none'), code='E_ARITY')

        result = None
        try:
            try:
                with recursion_room(self.depth_limit):
                    if script is not None:
                        self.run_script(env, script)
                    else:
                        values = dict(args)
                        result = self.call_block(
                            env, block,
                            [values[n] for n in block.param_names])
            except RecursionError:
                raise RuntimeFault(
                    'E_STACK_OVERFLOW', 'the call stack is exhausted',
                    (script or block).block_id)
        except Violation as violation:
            self.logger.info('%s violated at %s', violation.kind,
                             violation.block_id)
            return ExecutionReport(entry, env.globals, violation=violation)
        except RuntimeFault as fault:
            self.logger.info('Runtime error %s at %s', fault.code,
                             fault.block_id)
            return ExecutionReport(entry, env.globals, fault=fault)

        return ExecutionReport(entry, env.globals, result=result)


def run_entry(program, entry, args=(), depth_limit=DEFAULT_DEPTH_LIMIT):
    '''Run `entry` of `program` in a fresh interpreter

    See :meth:`Interpreter.run_entry`.
    '''

    return Interpreter(program, depth_limit=depth_limit).run_entry(
        entry, args)


def bind_arguments(program, entry, values):
    '''Name the arguments given to an entry point

    `values` are `(name, value)` pairs, where `name` may be `None` for a
    positional argument; positional arguments bind the parameters of a block
    in order. Scripts only accept named arguments (global overrides).

    :rtype: `list` of `(str, value)`

    :raise EntryError: `E_ENTRY_NOT_FOUND` or `E_ARITY`
    '''

    script = program.get_script(entry)
    block = program.get_block(entry) if script is None else None

    if script is None and block is None:
        raise EntryError('no script or block named %r' % entry,
                         code='E_ENTRY_NOT_FOUND')

    params = list(block.param_names) if block is not None else []
    bound = []

    for (position, (name, value)) in enumerate(values):
        if name is None:
            if position >= len(params):
                raise EntryError('too many arguments for %r' % entry,
                                 code='E_ARITY')
            name = params[position]

        bound.append((name, value))

    return bound
