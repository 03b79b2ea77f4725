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

'''Tests for `blockverify.lesson_corpus`'''

import io
import os
import os.path
import random
import shutil
import tempfile
import unittest

import mock

from blockverify import boogie_backend
from blockverify import configuration
from blockverify import diagnostics
from blockverify import language_model as lm
from blockverify import lesson_corpus
from blockverify import rac_interpreter
from blockverify.lesson_corpus import LessonError

import utils


def by_name(name):
    for lesson in lesson_corpus.load_lessons(utils.LESSONS):
        if lesson.name == name:
            return lesson

    raise KeyError(name)


def node_classes():
    result = set()
    pending = [lm.Node]
    while pending:
        cls = pending.pop()
        for sub in cls.__subclasses__():
            if sub.__module__ == lm.__name__:
                result.add(sub.__name__)
                pending.append(sub)

    return result


class TempDirTestCase(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.tmpdir)

    def manifest(self, text):
        with io.open(os.path.join(self.tmpdir, lesson_corpus.MANIFEST_NAME),
                     'w', encoding='utf-8') as fd:
            fd.write(text)


class TestLoadLessons(unittest.TestCase):
    def test_corpus(self):
        lessons = lesson_corpus.load_lessons(utils.LESSONS)

        self.assertEqual('increment', lessons[0].name)
        self.assertEqual(utils.lesson_path('increment.blocks.json'),
                         lessons[0].program_file)
        self.assertEqual('verified', lessons[0].static)
        self.assertEqual(3, len(lessons[0].rac_cases))
        self.assertNotIn('\n', lessons[0].narrative)

    def test_expects_compilation(self):
        self.assertTrue(by_name('increment_buggy').expects_compilation)
        self.assertTrue(by_name('factorial').expects_compilation)
        self.assertFalse(by_name('greeting').expects_compilation)


class TestCorpusCoverage(unittest.TestCase):
    def test_every_node_kind_is_taught(self):
        seen = set()
        for lesson in lesson_corpus.load_lessons(utils.LESSONS):
            program = lesson.load_program()
            for owner in program.owners():
                seen.update(type(node).__name__ for node in lm.walk(owner))

        self.assertEqual(set(), node_classes() - seen)

    def test_every_violation_kind_is_taught(self):
        outcomes = set(
            case.outcome
            for lesson in lesson_corpus.load_lessons(utils.LESSONS)
            for case in lesson.rac_cases)

        self.assertEqual(set(), set(rac_interpreter.VIOLATION_KINDS) -
                         outcomes)

    def test_every_lesson_passes(self):
        results = lesson_corpus.corpus_check(utils.LESSONS)

        self.assertEqual([], [(r.name, r.detail) for r in results
                              if not r.passed])
        self.assertEqual(len(lesson_corpus.load_lessons(utils.LESSONS)),
                         len(results))


class TestRacCase(unittest.TestCase):
    def test_parse(self):
        case = lesson_corpus.RacCase.parse('count=5 => Assertion')

        self.assertEqual([('count', 5)], case.args)
        self.assertEqual('Assertion', case.outcome)
        self.assertFalse(case.has_value)

    def test_no_arguments(self):
        case = lesson_corpus.RacCase.parse('=> passed')

        self.assertEqual([], case.args)
        self.assertEqual('passed', case.outcome)

    def test_invalid(self):
        for text in ('3', '3 =>', '3 => Precondition 4', 'null => passed'):
            self.assertRaises(LessonError, lesson_corpus.RacCase.parse, text)


class TestInvalidManifest(TempDirTestCase):
    def test_bad_section(self):
        self.manifest(u'[example]\nprogram = p.blocks.json\n')

        self.assertRaises(LessonError, lesson_corpus.load_lessons,
                          self.tmpdir)

    def test_unknown_option(self):
        self.manifest(u'[lesson:p]\nprogram = p.blocks.json\nlevel = 1\n')

        self.assertRaises(LessonError, lesson_corpus.load_lessons,
                          self.tmpdir)

    def test_missing_program(self):
        self.manifest(u'[lesson:p]\nstatic = verified\n')

        self.assertRaises(LessonError, lesson_corpus.load_lessons,
                          self.tmpdir)

    def test_cases_without_entry(self):
        self.manifest(u'[lesson:p]\nprogram = p.blocks.json\n'
                      u'rac = 3 => passed\n')

        self.assertRaises(LessonError, lesson_corpus.load_lessons,
                          self.tmpdir)

    def test_missing_manifest(self):
        self.assertRaises(IOError, lesson_corpus.load_lessons, self.tmpdir)


class TestMismatches(TempDirTestCase):
    def check(self, **settings):
        lines = [u'[lesson:sample]',
                 u'program = %s' % utils.lesson_path('increment.blocks.json'),
                 u'entry = increment']
        lines.extend(u'%s = %s' % item for item in sorted(settings.items()))
        self.manifest(u'\n'.join(lines) + u'\n')

        (result,) = lesson_corpus.corpus_check(self.tmpdir)
        return result

    def test_wrong_result(self):
        result = self.check(rac=u'3 => passed 5')

        self.assertFalse(result.passed)
        self.assertEqual('3 => passed 5: got result 4', result.detail)

    def test_wrong_outcome(self):
        result = self.check(rac=u'-1 => passed')

        self.assertEqual('-1 => passed: got Precondition', result.detail)

    def test_entry_error(self):
        result = self.check(rac=u'1 2 => passed')

        self.assertEqual('1 2 => passed: got E_ARITY', result.detail)

    def test_program_compiles_unexpectedly(self):
        result = self.check(static=u'E_TEXT_UNSUPPORTED')

        self.assertIn('but the program compiles', result.detail)

    def test_unreadable_program(self):
        self.manifest(u'[lesson:sample]\nprogram = missing.blocks.json\n')

        (result,) = lesson_corpus.corpus_check(self.tmpdir)

        self.assertIn('cannot read', result.detail)


class TestRandomRuns(TempDirTestCase):
    def buggy(self, seed):
        self.manifest(u'[lesson:sample]\nprogram = %s\nentry = increment\n'
                      u'static = verified\n' %
                      utils.lesson_path('increment_buggy.blocks.json'))

        (result,) = lesson_corpus.corpus_check(self.tmpdir, random_runs=50,
                                               seed=seed)
        return result

    def test_corpus(self):
        results = lesson_corpus.corpus_check(utils.LESSONS, random_runs=25,
                                             seed=7)

        self.assertEqual([], [(r.name, r.detail) for r in results
                              if not r.passed])

    def test_wrong_block(self):
        result = self.buggy(1)

        self.assertFalse(result.passed)
        self.assertTrue(all(failure.startswith('random x=') and
                            failure.endswith('got Postcondition')
                            for failure in result.failures))

    def test_same_seed_same_arguments(self):
        self.assertEqual(self.buggy(2).failures, self.buggy(2).failures)

    def test_only_verified_lessons(self):
        lesson = by_name('factorial')

        self.assertEqual([], lesson_corpus.check_random(
            lesson.load_program(), lesson, 10, random.Random(0)))


def verdict(outcome, found=()):
    return boogie_backend.StaticVerdict(outcome, 0, len(found), found)


def static_error(code, block_id):
    return diagnostics.Diagnostic(diagnostics.ERROR,
                                  diagnostics.PHASE_STATIC, code, '',
                                  block_id=block_id)


class TestCheckStaticWithRunner(unittest.TestCase):
    def check(self, name, result):
        lesson = by_name(name)
        runner = mock.Mock()
        runner.verify.return_value = result

        return lesson_corpus.check_static(lesson.load_program(), lesson,
                                          utils.LESSONS, runner=runner)

    def test_expected_error(self):
        self.assertEqual([], self.check(
            'increment_buggy', verdict(boogie_backend.ERRORS, [
                static_error('E_STATIC_POST', 'increment#4')])))

    def test_error_on_another_block(self):
        self.assertEqual(1, len(self.check(
            'increment_buggy', verdict(boogie_backend.ERRORS, [
                static_error('E_STATIC_POST', 'increment#1')]))))

    def test_missed_error(self):
        self.assertEqual(1, len(self.check(
            'increment_buggy', verdict(boogie_backend.VERIFIED))))

    def test_verified(self):
        self.assertEqual([], self.check(
            'counter', verdict(boogie_backend.VERIFIED)))

    def test_tool_error(self):
        lesson = by_name('counter')
        runner = mock.Mock()
        runner.verify.side_effect = boogie_backend.ToolError('no boogie')

        self.assertEqual(['static: no boogie'], lesson_corpus.check_static(
            lesson.load_program(), lesson, utils.LESSONS, runner=runner))

    def test_compiles_only(self):
        runner = mock.Mock()
        lesson = by_name('factorial')

        self.assertEqual([], lesson_corpus.check_static(
            lesson.load_program(), lesson, utils.LESSONS, runner=runner))
        self.assertFalse(runner.verify.called)


class TestRegenerateGoldens(TempDirTestCase):
    def test_regenerate(self):
        directory = os.path.join(self.tmpdir, 'lessons')
        shutil.copytree(utils.LESSONS, directory)
        expected = os.path.join(directory, lesson_corpus.EXPECTED_DIRECTORY)
        shutil.rmtree(expected)
        os.mkdir(expected)

        written = lesson_corpus.regenerate_goldens(directory)

        compiled = [lesson.name
                    for lesson in lesson_corpus.load_lessons(directory)
                    if lesson.expects_compilation]
        self.assertEqual([os.path.join(expected, '%s.bpl' % name)
                          for name in compiled], written)
        self.assertIn(os.path.join(expected, 'increment.bpl'), written)

        for name in os.listdir(os.path.join(utils.LESSONS, 'expected')):
            with io.open(os.path.join(utils.LESSONS, 'expected', name),
                         encoding='utf-8') as fd:
                original = fd.read()
            with io.open(os.path.join(expected, name),
                         encoding='utf-8') as fd:
                self.assertEqual(original, fd.read(), name)

        self.assertTrue(all(r.passed
                            for r in lesson_corpus.corpus_check(directory)))


BOOGIE = os.environ.get(configuration.BOOGIE_ENVIRONMENT_VARIABLE)


@unittest.skipUnless(BOOGIE, 'Boogie executable not configured')
class TestCorpusWithBoogie(unittest.TestCase):
    def test_every_lesson_passes(self):
        runner = boogie_backend.BoogieRunner(BOOGIE)

        results = lesson_corpus.corpus_check(utils.LESSONS, runner=runner)

        self.assertEqual([], [(r.name, r.detail) for r in results
                              if not r.passed])
