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
The lessons folder: example programs with their expected verdicts.

Lessons are listed in `lessons.ini`, one `[lesson:<name>]` section each::

    [lesson:increment]
    program = increment.blocks.json
    entry = increment
    rac =
        3 => passed 4
        -1 => Precondition
    static = verified
    narrative = A reporter with a pre- and a postcondition.

`rac` lines are `ARGS => OUTCOME`, where `OUTCOME` is `passed` (optionally
followed by the expected result), a violation kind or a runtime error code.
`static` is `verified`, `compiles`, `errors <obligation kind>` or a
type checking or compilation error code; `static_block` optionally names the
block the static diagnostic must point at.
'''

import configparser
import io
import logging
import operator
import os.path
import random
import shlex
import shutil
import tempfile

from blockverify import boogie_backend
from blockverify import diagnostics
from blockverify import language_model as lm
from blockverify import program_io
from blockverify import rac_interpreter
from blockverify import static_frontend

LOGGER = logging.getLogger(__name__)

DEFAULT_LESSONS_DIRECTORY = 'lessons'
MANIFEST_NAME = 'lessons.ini'
EXPECTED_DIRECTORY = 'expected'

LESSON_SECTION_PREFIX = 'lesson:'

LESSON_PROGRAM_OPTION = 'program'
LESSON_ENTRY_OPTION = 'entry'
LESSON_RAC_OPTION = 'rac'
LESSON_STATIC_OPTION = 'static'
LESSON_STATIC_BLOCK_OPTION = 'static_block'
LESSON_NARRATIVE_OPTION = 'narrative'

LESSON_OPTIONS = (LESSON_PROGRAM_OPTION, LESSON_ENTRY_OPTION,
                  LESSON_RAC_OPTION, LESSON_STATIC_OPTION,
                  LESSON_STATIC_BLOCK_OPTION, LESSON_NARRATIVE_OPTION)

PASSED = 'passed'

STATIC_VERIFIED = 'verified'
STATIC_COMPILES = 'compiles'
STATIC_ERRORS = 'errors'


class LessonError(diagnostics.BlockVerifyError):
    '''Exception raised for an invalid lesson manifest.'''

    code = 'E_LESSON'
    phase = diagnostics.PHASE_PARSE


def parse_arguments(tokens):
    '''Parse argument tokens into `(name, value)` pairs

    A token is either `value` (positional, name `None`) or `name=value`::

        >>> parse_arguments(['3', 'xs=[1,2]'])
        [(None, 3), ('xs', [1, 2])]

    :raise ValueError: Malformed token
    '''

    result = []

    for token in tokens:
        name, sep, value = token.partition('=')
        if sep and lm.is_identifier(name.strip()):
            result.append((name.strip(), program_io.parse_value(value)))
        else:
            result.append((None, program_io.parse_value(token)))

    return result


class RacCase(object):  # pylint: disable=R0903
    '''One `ARGS => OUTCOME` line

        >>> case = RacCase.parse('[1,2,3] => passed 6')
        >>> case.args, case.outcome, case.value
        ([(None, [1, 2, 3])], 'passed', 6)
    '''

    __slots__ = '_text', '_args', '_outcome', '_value',

    _no_value = object()

    def __init__(self, text, args, outcome, value=_no_value):
        self._text = text
        self._args = list(args)
        self._outcome = outcome
        self._value = value

    text = property(operator.attrgetter('_text'))
    args = property(operator.attrgetter('_args'))
    outcome = property(operator.attrgetter('_outcome'))

    @property
    def has_value(self):
        return self._value is not RacCase._no_value

    @property
    def value(self):
        return self._value if self.has_value else None

    def __repr__(self):
        return 'RacCase(%r)' % self.text

    @classmethod
    def parse(cls, text):
        '''Parse one case line.

        :raise LessonError: Malformed line
        '''

        args, sep, outcome = text.partition('=>')
        outcome = outcome.split(None, 1)
        if not sep or not outcome:
            raise LessonError('Invalid rac case %r' % text)

        try:
            parsed = parse_arguments(shlex.split(args, posix=False))
            if len(outcome) == 2:
                if outcome[0] != PASSED:
                    raise ValueError('Only %r takes a value' % PASSED)
                return cls(text, parsed, PASSED,
                           program_io.parse_value(outcome[1]))
        except ValueError as exc:
            raise LessonError('Invalid rac case %r: %s' % (text, exc))

        return cls(text, parsed, outcome[0])


class Lesson(object):  # pylint: disable=R0903
    '''A lesson of the corpus

    :param name: Lesson name
    :param program_file: Path of the `.blocks.json` file
    :param entry: Entry point used by the runtime cases
    :param rac_cases: Runtime cases
    :param static: Static expectation, or `None`
    :param static_block: Block the static diagnostic must point at
    :param narrative: Teaching note
    '''

    __slots__ = ('_name', '_program_file', '_entry', '_rac_cases',
                 '_static', '_static_block', '_narrative')

    def __init__(self, name, program_file, entry=None, rac_cases=(),
                 static=None, static_block=None, narrative=''):
        self._name = name
        self._program_file = program_file
        self._entry = entry
        self._rac_cases = tuple(rac_cases)
        self._static = static
        self._static_block = static_block
        self._narrative = narrative

    name = property(operator.attrgetter('_name'))
    program_file = property(operator.attrgetter('_program_file'))
    entry = property(operator.attrgetter('_entry'))
    rac_cases = property(operator.attrgetter('_rac_cases'))
    static = property(operator.attrgetter('_static'))
    static_block = property(operator.attrgetter('_static_block'))
    narrative = property(operator.attrgetter('_narrative'))

    def __repr__(self):
        return 'Lesson(name=%r, program_file=%r)' % \
            (self.name, self.program_file)

    def load_program(self):
        return program_io.load_program(self.program_file)

    def golden_path(self, directory):
        return os.path.join(directory, EXPECTED_DIRECTORY,
                            self.name + boogie_backend.BPL_SUFFIX)

    @property
    def expects_compilation(self):
        return self.static is not None and \
            self.static.split()[0] in (STATIC_VERIFIED, STATIC_COMPILES,
                                       STATIC_ERRORS)


def load_lessons(directory=DEFAULT_LESSONS_DIRECTORY):
    '''Read the lesson manifest of `directory`

    :rtype: `list` of :class:`Lesson`, in manifest order

    :raise LessonError: Invalid manifest
    :raise IOError: Manifest can't be read
    '''

    path = os.path.join(directory, MANIFEST_NAME)
    parser = configparser.ConfigParser(interpolation=None)

    with io.open(path, encoding='utf-8') as fd:
        try:
            parser.read_file(fd, path)
        except configparser.Error as exc:
            raise LessonError('Unable to parse %s: %s' % (path, exc))

    _default = object()

    def get(section, setting, default=_default):
        '''Safely retrieve a value from the manifest.'''

        if not parser.has_option(section, setting):
            if default is not _default:
                return default
            else:
                raise LessonError(
                    'Section %r lacks a %r setting' % (section, setting))

        return parser.get(section, setting).strip()

    lessons = []
    for section in parser.sections():
        if not section.startswith(LESSON_SECTION_PREFIX):
            raise LessonError('Invalid section name %r' % section)

        name = section[len(LESSON_SECTION_PREFIX):]
        if not lm.is_identifier(name):
            raise LessonError('Invalid section name %r' % section)

        for option in parser.options(section):
            if option not in LESSON_OPTIONS:
                raise LessonError('Unknown %r setting in %r' %
                                  (option, section))

        cases = [RacCase.parse(line.strip())
                 for line in get(section, LESSON_RAC_OPTION, '').splitlines()
                 if line.strip()]

        lessons.append(Lesson(
            name,
            os.path.join(directory, get(section, LESSON_PROGRAM_OPTION)),
            entry=get(section, LESSON_ENTRY_OPTION, None),
            rac_cases=cases,
            static=get(section, LESSON_STATIC_OPTION, None),
            static_block=get(section, LESSON_STATIC_BLOCK_OPTION, None),
            narrative=' '.join(
                get(section, LESSON_NARRATIVE_OPTION, '').split())))

        if cases and lessons[-1].entry is None:
            raise LessonError('Section %r has rac cases but no %r setting' %
                              (section, LESSON_ENTRY_OPTION))

    return lessons


class LessonResult(object):  # pylint: disable=R0903
    '''Outcome of checking one lesson.'''

    __slots__ = '_name', '_failures',

    def __init__(self, name, failures=()):
        self._name = name
        self._failures = tuple(failures)

    name = property(operator.attrgetter('_name'))
    failures = property(operator.attrgetter('_failures'))

    @property
    def passed(self):
        return not self.failures

    @property
    def detail(self):
        return '; '.join(self.failures)

    def __repr__(self):
        return 'LessonResult(name=%r, failures=%r)' % \
            (self.name, self.failures)


def _rac_outcome(program, lesson, case, depth_limit):
    '''Run one case, returning `(outcome, result)`.'''

    try:
        args = rac_interpreter.bind_arguments(program, lesson.entry,
                                              case.args)
        report = rac_interpreter.Interpreter(
            program, depth_limit=depth_limit).run_entry(lesson.entry, args)
    except rac_interpreter.EntryError as exc:
        return exc.code, None

    return report.outcome, report.result


def check_rac(program, lesson,
              depth_limit=rac_interpreter.DEFAULT_DEPTH_LIMIT):
    '''Check the runtime cases of a lesson, returning failure messages.'''

    failures = []

    for case in lesson.rac_cases:
        outcome, result = _rac_outcome(program, lesson, case, depth_limit)

        if outcome != case.outcome:
            failures.append('%s: got %s' % (case.text, outcome))
        elif case.has_value and not lm.values_equal(result, case.value):
            failures.append('%s: got result %s' %
                            (case.text, lm.format_value(result)))

    return failures


def compile_lesson(program):
    '''Type check and compile a program

    :rtype: :class:`blockverify.boogie_backend.BoogieUnit`

    :raise TypeCheckError: Outside the static fragment
    :raise CompileError: Unsupported construct
    '''

    return boogie_backend.compile_program(
        static_frontend.check_program(program))


def _matches(found, code, block_id):
    return any(d.code == code and (block_id is None or d.block_id == block_id)
               for d in found)


def check_static(program, lesson, directory, runner=None):
    '''Check the static expectation of a lesson, returning failure messages

    Without a `runner`, `verified` and `errors` expectations are only checked
    up to successful compilation.
    '''

    if lesson.static is None:
        return []

    words = lesson.static.split()
    expectation = words[0]

    try:
        unit = compile_lesson(program)
    except (static_frontend.TypeCheckError,
            boogie_backend.CompileError) as exc:
        found = exc.diagnostics
        if expectation.startswith('E_') and \
                _matches(found, expectation, lesson.static_block):
            return []

        return ['static: expected %s, got %s' % (
            lesson.static, ', '.join(sorted(set(d.code for d in found))))]

    if expectation.startswith('E_'):
        return ['static: expected %s, but the program compiles' %
                lesson.static]

    failures = []

    golden = lesson.golden_path(directory)
    if os.path.exists(golden):
        with io.open(golden, encoding='utf-8') as fd:
            if fd.read() != unit.text:
                failures.append('static: compiled text differs from %s' %
                                golden)

    if runner is None or expectation == STATIC_COMPILES:
        return failures

    workdir = tempfile.mkdtemp(prefix='blockverify-')
    try:
        verdict = runner.verify(
            unit, os.path.join(workdir,
                               lesson.name + boogie_backend.BPL_SUFFIX))
    except boogie_backend.ToolError as exc:
        return failures + ['static: %s' % exc.message]
    finally:
        shutil.rmtree(workdir, ignore_errors=True)

    if expectation == STATIC_VERIFIED:
        if verdict.outcome != boogie_backend.VERIFIED:
            failures.append('static: expected verified, got %s (%s)' % (
                verdict.outcome,
                ', '.join(d.code for d in verdict.diagnostics)))
    else:
        kind = words[1] if len(words) > 1 else None
        code = boogie_backend.STATIC_CODES.get(kind)
        if verdict.outcome != boogie_backend.ERRORS or \
                not _matches(verdict.diagnostics, code, lesson.static_block):
            failures.append('static: expected %s, got %s (%s)' % (
                lesson.static, verdict.outcome,
                ', '.join(d.code for d in verdict.diagnostics)))

    return failures


def random_value(rng, type_):
    '''A random value of a static type, small enough to run quickly.'''

    if type_ is static_frontend.BOOL:
        return rng.choice((True, False))
    elif type_ is static_frontend.INTLIST:
        return [rng.randint(-100, 100) for _ in range(rng.randint(0, 8))]
    else:
        return rng.randint(-100, 100)


def check_random(program, lesson, runs, rng,
                 depth_limit=rac_interpreter.DEFAULT_DEPTH_LIMIT):
    '''Run a `verified` entry block on random arguments of its types

    A verified block can only fail its own precondition, so any other
    violation or runtime error is a failure. Lessons whose entry is a script
    are skipped.
    '''

    if lesson.static != STATIC_VERIFIED or runs <= 0:
        return []

    block = program.get_block(lesson.entry)
    if block is None:
        return []

    try:
        typed = static_frontend.check_program(program)
    except static_frontend.TypeCheckError as exc:
        return ['random: %s' % exc.message]

    interpreter = rac_interpreter.Interpreter(program,
                                              depth_limit=depth_limit)
    failures = []

    for _ in range(runs):
        args = [(name, random_value(rng, typed.type_of_var(block.name,
                                                            name)))
                for name in block.param_names]
        report = interpreter.run_entry(lesson.entry, args)

        violation = report.violation
        if report.passed or (violation is not None and
                             violation.kind == rac_interpreter.PRECONDITION
                             and len(violation.call_chain) == 1):
            continue

        failures.append('random %s: got %s' % (' '.join(
            '%s=%s' % (name, lm.format_value(value))
            for (name, value) in args), report.outcome))

    return failures


def check_lesson(lesson, directory, runner=None,
                 depth_limit=rac_interpreter.DEFAULT_DEPTH_LIMIT,
                 random_runs=0, rng=None):
    '''Check one lesson; a mismatch is reported, never raised.

    :rtype: :class:`LessonResult`
    '''

    try:
        program = lesson.load_program()
    except (IOError, OSError) as exc:
        return LessonResult(lesson.name, ['cannot read %s: %s' %
                                          (lesson.program_file, exc)])
    except diagnostics.BlockVerifyError as exc:
        return LessonResult(lesson.name, ['%s: %s' % (exc.code, exc.message)])

    failures = check_rac(program, lesson, depth_limit)
    failures.extend(check_static(program, lesson, directory, runner))
    if random_runs:
        failures.extend(check_random(program, lesson, random_runs,
                                     rng or random.Random(), depth_limit))

    LOGGER.debug('Lesson %s: %d failure(s)', lesson.name, len(failures))

    return LessonResult(lesson.name, failures)


def corpus_check(directory=DEFAULT_LESSONS_DIRECTORY, runner=None,
                 depth_limit=rac_interpreter.DEFAULT_DEPTH_LIMIT,
                 random_runs=0, seed=0):
    '''Check every lesson of `directory`

    :param runner: Boogie runner used for `verified` and `errors`
                   expectations
    :type runner: :class:`blockverify.boogie_backend.BoogieRunner`
    :param random_runs: Random runs of every verified entry block
    :type random_runs: `int`
    :param seed: Seed of the random arguments
    :type seed: `int`

    :rtype: `list` of :class:`LessonResult`, in manifest order

    :raise LessonError: Invalid manifest
    '''

    rng = random.Random(seed)

    return [check_lesson(lesson, directory, runner, depth_limit,
                         random_runs, rng)
            for lesson in load_lessons(directory)]


def regenerate_goldens(directory=DEFAULT_LESSONS_DIRECTORY):
    '''Rewrite the golden `.bpl` file of every lesson expected to compile

    :return: Paths written
    :rtype: `list` of `str`
    '''

    written = []

    for lesson in load_lessons(directory):
        if not lesson.expects_compilation:
            continue

        unit = compile_lesson(lesson.load_program())
        path = lesson.golden_path(directory)

        with io.open(path, 'w', encoding='utf-8', newline='\n') as fd:
            fd.write(unit.text)

        written.append(path)

    return written
