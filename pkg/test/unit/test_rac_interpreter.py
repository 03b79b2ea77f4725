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

'''Tests for `blockverify.rac_interpreter`'''

import random
import sys
import unittest

from blockverify import language_model as lm
from blockverify import program_io
from blockverify import rac_interpreter
from blockverify.rac_interpreter import run_entry

import utils
from utils import and_, arith, cmp, command, increment, lit, not_, \
    predicate, program, reporter, script, var


def lesson(name):
    return program_io.load_program(utils.lesson_path(name))


def run_script(body, globals_=(), blocks=(), **kwargs):
    prog = program(blocks, [script('main', body)], globals_)
    return run_entry(prog, 'main', **kwargs)


class TestContracts(unittest.TestCase):
    def test_passing_call(self):
        report = run_entry(program([increment()]), 'increment', [('x', 3)])

        self.assertTrue(report.passed)
        self.assertEqual('passed', report.outcome)
        self.assertEqual(4, report.result)
        self.assertEqual([], report.diagnostics)

    def test_precondition_violation(self):
        report = run_entry(program([increment()]), 'increment', [('x', -1)])
        violation = report.violation

        self.assertEqual(rac_interpreter.PRECONDITION, violation.kind)
        self.assertEqual('increment#1', violation.block_id)
        self.assertEqual(1, violation.slot_index)
        self.assertEqual(('increment#0',), violation.call_chain)
        self.assertEqual([('x', -1)], violation.frame_values)
        self.assertIsNone(report.result)

    def test_postcondition_violation(self):
        report = run_entry(program([increment(2)]), 'increment', [('x', 3)])

        self.assertEqual(rac_interpreter.POSTCONDITION, report.outcome)
        self.assertEqual('increment#4', report.violation.block_id)
        [diag] = report.diagnostics
        self.assertEqual(('E_POSTCONDITION', 'runtime', 1),
                         (diag.code, diag.phase, diag.slot_index))

    def test_first_failing_slot_is_reported(self):
        block = reporter('f', ['x'], [lm.Report(var('x'))],
                         pre=[cmp('ge', var('x'), lit(0)),
                              cmp('ge', var('x'), lit(10)),
                              cmp('ge', var('x'), lit(20))])
        report = run_entry(program([block]), 'f', [('x', 5)])

        self.assertEqual(2, report.violation.slot_index)
        self.assertEqual('f#4', report.violation.block_id)

    def test_call_chain_of_nested_violation(self):
        report = run_entry(lesson('bug_precondition.blocks.json'), 'main')

        self.assertEqual(rac_interpreter.PRECONDITION, report.outcome)
        self.assertEqual(('main#0', 'caller#0', 'increment#0'),
                         report.violation.call_chain)
        self.assertEqual(0, dict(report.globals)['r'])

    def test_old_sees_entry_value_of_globals(self):
        report = run_entry(lesson('counter.blocks.json'), 'main')

        self.assertTrue(report.passed)
        self.assertEqual([('count', 2)], report.globals)

    def test_old_copies_lists(self):
        report = run_entry(lesson('list_ops.blocks.json'), 'main')

        self.assertTrue(report.passed)
        self.assertEqual([('items', [0, 2, 3, 4])], report.globals)

    def test_non_boolean_contract(self):
        block = reporter('f', [], [lm.Report(lit(1))], post=[lm.Result()])
        report = run_entry(program([block]), 'f')

        self.assertEqual('E_NONBOOL_SPEC', report.outcome)
        self.assertEqual('f#1', report.fault.block_id)

    def test_postcondition_not_checked_after_a_fault(self):
        block = reporter('f', [], [lm.Report(arith('div', lit(1), lit(0)))],
                         post=[lit(False)])
        report = run_entry(program([block]), 'f')

        self.assertEqual('E_DIV_ZERO', report.outcome)


class TestStatements(unittest.TestCase):
    def test_assertion(self):
        report = run_script([lm.Assert(cmp('eq', var('g'), lit(1)))],
                            globals_=[('g', 0)])

        self.assertEqual(rac_interpreter.ASSERTION, report.outcome)
        self.assertEqual('main#1', report.violation.block_id)
        self.assertEqual(('main#0',), report.violation.call_chain)

    def test_execution_stops_at_first_violation(self):
        report = run_script([
            lm.Assert(lit(False)),
            lm.SetVar('g', lit(5)),
        ], globals_=[('g', 0)])

        self.assertEqual([('g', 0)], report.globals)

    def test_if_else_and_change(self):
        report = run_script([
            lm.IfElse(cmp('gt', var('g'), lit(0)),
                      [lm.ChangeVar('g', lit(10))],
                      [lm.ChangeVar('g', lit(-10))]),
        ], globals_=[('g', 1)])

        self.assertEqual([('g', 11)], report.globals)

    def test_locals_start_at_zero(self):
        block = reporter('f', [], [lm.DeclareLocals(['a']),
                                   lm.Report(var('a'))])

        self.assertEqual(0, run_entry(program([block]), 'f').result)

    def test_report_leaves_loops(self):
        block = reporter('f', [], [
            lm.DeclareLocals(['i']),
            lm.RepeatUntil(lit(False), [], [
                lm.ChangeVar('i', lit(1)),
                lm.IfElse(cmp('eq', var('i'), lit(3)),
                          [lm.Report(var('i'))], []),
            ]),
        ])

        self.assertEqual(3, run_entry(program([block]), 'f').result)

    def test_missing_report(self):
        block = reporter('f', [], [])
        report = run_entry(program([block]), 'f')

        self.assertEqual('E_NO_REPORT', report.outcome)
        self.assertEqual('f#0', report.fault.block_id)

    def test_predicate_defaults_to_false(self):
        block = predicate('p', [], [])
        report = run_entry(program([block]), 'p')

        self.assertTrue(report.passed)
        self.assertIs(False, report.result)

    def test_command_result_is_none(self):
        report = run_entry(program([command('c', [], [])]), 'c')
        self.assertIsNone(report.result)

    def test_list_statements(self):
        report = run_script([
            lm.AddToList(lit(4), 'xs'),
            lm.ReplaceItem(lit(1), 'xs', lit(9)),
        ], globals_=[('xs', [1])])

        self.assertEqual([('xs', [9, 4])], report.globals)

    def test_set_copies_lists(self):
        push = command('push', [], [
            lm.DeclareLocals(['L']),
            lm.SetVar('L', var('G')),
            lm.AddToList(lit(5), 'L'),
            lm.Assert(cmp('eq', lm.LengthOf(var('L')), lit(3))),
        ], post=[cmp('eq', lm.LengthOf(var('G')),
                     lm.LengthOf(lm.Old('G')))])

        report = run_entry(program([push], [], [('G', [1, 2])]), 'push')

        self.assertTrue(report.passed)
        self.assertEqual([('G', [1, 2])], report.globals)

    def test_arguments_are_copies(self):
        grow = command('grow', ['xs'], [lm.AddToList(lit(1), 'xs')])

        report = run_script([lm.CallCommand('grow', [var('G')])],
                            globals_=[('G', [7])], blocks=[grow])

        self.assertTrue(report.passed)
        self.assertEqual([('G', [7])], report.globals)

    def test_replace_out_of_range(self):
        report = run_script([lm.ReplaceItem(lit(2), 'xs', lit(9))],
                            globals_=[('xs', [1])])

        self.assertEqual('E_INDEX', report.outcome)

    def test_negative_repeat_count(self):
        report = run_script([lm.RepeatN(lit(-1), [], [])])
        self.assertEqual('E_TYPE', report.outcome)

    def test_globals_are_fresh_for_every_run(self):
        prog = program([], [script('main', [lm.AddToList(lit(1), 'xs')])],
                       [('xs', [])])

        run_entry(prog, 'main')
        self.assertEqual([('xs', [1])], run_entry(prog, 'main').globals)


class TestInvariants(unittest.TestCase):
    def test_entry_violation(self):
        report = run_entry(lesson('bug_invariant_entry.blocks.json'),
                           'countUp', [('n', 0)])

        self.assertEqual(rac_interpreter.INVARIANT_ENTRY, report.outcome)
        self.assertEqual(0, report.violation.iteration)
        self.assertEqual([('i', 1), ('n', 0)], report.violation.frame_values)

    def test_iteration_violation(self):
        report = run_entry(lesson('bug_invariant_iteration.blocks.json'),
                           'countTo', [('n', 5)])

        self.assertEqual(rac_interpreter.INVARIANT_ITERATION, report.outcome)
        self.assertEqual(4, report.violation.iteration)
        self.assertIn('after iteration 4', report.violation.message)

    def count_checks(self, *body):
        interpreter = rac_interpreter.Interpreter(
            program([command('c', [], body)]))
        self.assertTrue(interpreter.run_entry('c').passed)

        return interpreter.invariant_checks

    def test_invariant_checked_once_per_iteration(self):
        for n in (0, 1, 5, 100):
            self.assertEqual(n + 1, self.count_checks(
                lm.RepeatN(lit(n), [lit(True), lit(True)], [])), n)

            self.assertEqual(n + 1, self.count_checks(
                lm.DeclareLocals(['i']),
                lm.RepeatUntil(cmp('eq', var('i'), lit(n)), [lit(True)],
                               [lm.ChangeVar('i', lit(1))])), n)


class TestExpressions(unittest.TestCase):
    def evaluate(self, expr, globals_=()):
        prog = program([reporter('f', [], [lm.Report(expr)])], [], globals_)
        return run_entry(prog, 'f')

    def test_division(self):
        self.assertEqual(3, self.evaluate(arith('div', lit(6), lit(2))).result)
        self.assertEqual(3.5,
                         self.evaluate(arith('div', lit(7), lit(2))).result)
        self.assertEqual(1, self.evaluate(arith('mod', lit(7), lit(3))).result)

    def test_division_by_zero(self):
        report = self.evaluate(arith('mod', lit(7), lit(0)))
        self.assertEqual('E_DIV_ZERO', report.outcome)

    def test_overflow(self):
        report = self.evaluate(arith('div', lit(10 ** 400 + 1), lit(3)))

        self.assertEqual('E_OVERFLOW', report.outcome)
        self.assertEqual('f#2', report.fault.block_id)

    def test_overflow_in_change(self):
        report = run_script([lm.ChangeVar('x', lit(0.5))],
                            globals_=[('x', 10 ** 400)])

        self.assertEqual('E_OVERFLOW', report.outcome)

    def test_type_errors(self):
        self.assertEqual(
            'E_TYPE', self.evaluate(arith('add', lit(1), lit(True))).outcome)
        self.assertEqual(
            'E_TYPE', self.evaluate(cmp('lt', lit(1), lit('a'))).outcome)
        self.assertEqual('E_TYPE', self.evaluate(not_(lit(0))).outcome)

    def test_text_ordering(self):
        self.assertIs(True, self.evaluate(cmp('lt', lit('a'), lit('b'))).result)

    def test_equality_across_kinds(self):
        self.assertIs(False, self.evaluate(cmp('eq', lit(1), lit(True))).result)
        self.assertIs(True,
                      self.evaluate(cmp('neq', lit('1'), lit(1))).result)

    def test_evaluation_is_strict(self):
        expr = and_(lit(False),
                    cmp('eq', arith('div', lit(1), lit(0)), lit(0)))
        self.assertEqual('E_DIV_ZERO', self.evaluate(expr).outcome)

    def test_boolean_operators(self):
        cases = [
            (lm.BoolOp('implies', [lit(False), lit(False)]), True),
            (lm.BoolOp('iff', [lit(False), lit(False)]), True),
            (lm.BoolOp('xor', [lit(True), lit(True)]), False),
            (lm.BoolOp('or', []), False),
            (lm.BoolOp('and', []), True),
        ]

        for (expr, expected) in cases:
            self.assertIs(expected, self.evaluate(expr).result)

    def test_list_expressions(self):
        xs = [('xs', [3, 1, 2])]

        self.assertEqual(1, self.evaluate(
            lm.Item(lit(2), var('xs')), xs).result)
        self.assertEqual(3, self.evaluate(lm.LengthOf(var('xs')), xs).result)
        self.assertIs(True, self.evaluate(
            lm.Contains(var('xs'), lit(2)), xs).result)
        self.assertEqual('E_INDEX', self.evaluate(
            lm.Item(lit(0), var('xs')), xs).outcome)
        self.assertEqual('E_TYPE', self.evaluate(
            lm.Item(lit(1.5), var('xs')), xs).outcome)

    def test_quantifiers(self):
        empty = lm.Quantifier('forall', 'i', lm.IntRange(lit(1), lit(0)),
                              lit(False))
        some = lm.Quantifier('exists', 'x', lm.Elements(var('xs')),
                             cmp('gt', var('x'), lit(2)))
        none = lm.Quantifier('exists', 'x', lm.Elements(var('xs')),
                             cmp('gt', var('x'), lit(3)))

        self.assertIs(True, self.evaluate(empty).result)
        self.assertIs(True, self.evaluate(some, [('xs', [3, 1])]).result)
        self.assertIs(False, self.evaluate(none, [('xs', [3, 1])]).result)

    def test_result_unavailable_in_body(self):
        prog = program([reporter('f', [], [lm.Report(lit(1))])])
        interpreter = rac_interpreter.Interpreter(prog)
        env = interpreter.new_environment()
        env.frames.append(rac_interpreter.Frame(prog.blocks[0]))

        self.assertRaises(rac_interpreter.RuntimeFault,
                          interpreter.eval_expr, env, lm.Result())


class TestEntries(unittest.TestCase):
    @staticmethod
    def countdown():
        return reporter('down', ['n'], [
            lm.IfElse(cmp('gt', var('n'), lit(0)),
                      [lm.Report(lm.Call('down', [
                          arith('sub', var('n'), lit(1))]))],
                      [lm.Report(lit(0))])])

    def test_unknown_entry(self):
        try:
            run_entry(program([increment()]), 'nope')
        except rac_interpreter.EntryError as exc:
            self.assertEqual('E_ENTRY_NOT_FOUND', exc.code)
        else:
            self.fail('EntryError not raised')

    def test_wrong_arguments(self):
        prog = program([increment()], [script('main', [])], [('g', 0)])

        for (entry, args) in [('increment', []),
                              ('increment', [('y', 1)]),
                              ('increment', [('x', 1), ('x', 2)]),
                              ('main', [('h', 1)])]:
            try:
                run_entry(prog, entry, args)
            except rac_interpreter.EntryError as exc:
                self.assertEqual('E_ARITY', exc.code)
            else:
                self.fail('EntryError not raised for %r' % (args,))

    def test_script_arguments_override_globals(self):
        report = run_entry(lesson('counter.blocks.json'), 'main',
                           [('count', 5)])

        self.assertEqual(rac_interpreter.ASSERTION, report.outcome)
        self.assertEqual([('count', 7)], report.globals)

    def test_stack_overflow(self):
        loop = reporter('loop', [], [lm.Report(lm.Call('loop', []))])
        report = run_entry(program([loop]), 'loop', depth_limit=50)

        self.assertEqual('E_STACK_OVERFLOW', report.outcome)
        self.assertEqual(50, len(report.fault.call_chain))

    def test_deep_recursion_under_the_default_limit(self):
        prog = program([self.countdown()])
        before = sys.getrecursionlimit()

        report = run_entry(prog, 'down', [('n', 500)])

        self.assertTrue(report.passed)
        self.assertEqual(0, report.result)
        self.assertEqual(before, sys.getrecursionlimit())

    def test_depth_limit_is_reached_first(self):
        report = run_entry(program([self.countdown()]), 'down', [('n', 500)],
                           depth_limit=300)

        self.assertEqual('E_STACK_OVERFLOW', report.outcome)
        self.assertEqual(300, len(report.fault.call_chain))
        self.assertIn('more than 300 nested calls', report.fault.message)

    def test_bind_arguments(self):
        prog = program([increment()], [script('main', [])], [('g', 0)])

        self.assertEqual(
            [('x', 3)],
            rac_interpreter.bind_arguments(prog, 'increment', [(None, 3)]))
        self.assertEqual(
            [('g', 3)],
            rac_interpreter.bind_arguments(prog, 'main', [('g', 3)]))
        self.assertRaises(rac_interpreter.EntryError,
                          rac_interpreter.bind_arguments, prog, 'increment',
                          [(None, 1), (None, 2)])
        self.assertRaises(rac_interpreter.EntryError,
                          rac_interpreter.bind_arguments, prog, 'nope', [])

    def test_reports_are_deterministic(self):
        prog = lesson('bug_precondition.blocks.json')

        self.assertEqual(run_entry(prog, 'main'), run_entry(prog, 'main'))
        self.assertEqual(run_entry(prog, 'main').to_dict(),
                         run_entry(prog, 'main').to_dict())


class TestLessonProperties(unittest.TestCase):
    '''Randomised checks of the lesson blocks against Python models.'''

    SEED = 4242

    def setUp(self):
        self.random = random.Random(self.SEED)

    def test_increment(self):
        prog = lesson('increment.blocks.json')

        for _ in range(1000):
            x = self.random.randint(-10 ** 6, 10 ** 6)
            report = run_entry(prog, 'increment', [('x', x)])

            if x >= 0:
                self.assertEqual(x + 1, report.result)
            else:
                self.assertEqual(rac_interpreter.PRECONDITION, report.outcome)

    def test_absolute(self):
        prog = lesson('absolute.blocks.json')

        for _ in range(100):
            x = self.random.randint(-1000, 1000)
            self.assertEqual(abs(x),
                             run_entry(prog, 'absolute', [('x', x)]).result)

    def test_sum_to(self):
        prog = lesson('sum_to.blocks.json')

        for _ in range(30):
            n = self.random.randint(0, 60)
            self.assertEqual(n * (n + 1) // 2,
                             run_entry(prog, 'sumTo', [('n', n)]).result)

    def test_sum_list_and_max(self):
        sum_list = lesson('sum_list.blocks.json')
        max_of = lesson('max_of_list.blocks.json')

        for _ in range(50):
            xs = [self.random.randint(-20, 20)
                  for _ in range(self.random.randint(1, 12))]

            self.assertEqual(
                sum(xs), run_entry(sum_list, 'sumList', [('xs', xs)]).result)
            report = run_entry(max_of, 'maxOf', [('xs', list(xs))])
            self.assertTrue(report.passed, report)
            self.assertEqual(max(xs), report.result)

    def test_factorial(self):
        prog = lesson('factorial.blocks.json')
        expected = 1

        for n in range(0, 12):
            if n:
                expected *= n
            self.assertEqual(expected,
                             run_entry(prog, 'factorial', [('n', n)]).result)
