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

'''Command-line utilities.

Exit statuses: 0 on success, 1 when the program violates its contracts or
has diagnostics, 2 on usage or parse errors and 3 when Boogie fails.
'''

import argparse
import importlib.metadata
import json
import logging
import sys

from blockverify import boogie_backend
from blockverify import configuration
from blockverify import diagnostics
from blockverify import language_model as lm
from blockverify import lesson_corpus
from blockverify import program_io
from blockverify import rac_interpreter
from blockverify import static_frontend
from blockverify import utils

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_TOOL_FAILURE = 3

FRAME_WIDTH = 60


class _Exit(Exception):
    '''Stops a subcommand with an exit status.'''

    def __init__(self, rc):
        super(_Exit, self).__init__(rc)
        self.rc = rc


def print_error(prefix, exn):
    '''Generic exception message printer.'''

    sys.stderr.write('%s: %s\n' % (prefix, getattr(exn, 'message', exn)))


def print_diagnostics(found, fmt):
    '''Print diagnostics on standard output, their summary on standard
    error.'''

    if found or fmt == diagnostics.FORMAT_JSON:
        print(diagnostics.render(found, fmt))

    sys.stderr.write(diagnostics.summary(found) + '\n')


def load_config(args):
    '''Layer the configuration file, environment and flags.'''

    try:
        config = configuration.load(getattr(args, 'config', None))
        return config.replace(
            entry=getattr(args, 'entry', None),
            args=getattr(args, 'args', None) or None,
            seed=getattr(args, 'seed', None),
            depth_limit=getattr(args, 'depth_limit', None),
            boogie_path=getattr(args, 'boogie_path', None),
            timeout_secs=getattr(args, 'timeout_secs', None),
            output=getattr(args, 'out', None),
            format=getattr(args, 'format', None))
    except configuration.ConfigurationError as exn:
        print_error('Configuration error', exn)
        raise _Exit(EXIT_USAGE)


def read_program(path, fmt):
    '''Load a program, exiting with a usage status on failure.'''

    try:
        return program_io.load_program(path)
    except (IOError, OSError) as exn:
        print_error('Error', '%s: %s' % (path, exn.strerror or exn))
    except (program_io.SchemaError,
            program_io.WellFormednessError) as exn:
        print_diagnostics(exn.diagnostics, fmt)

    raise _Exit(EXIT_USAGE)


def render_violation(violation):
    '''Frame a violation the way the block editor pops it up

        >>> v = rac_interpreter.Violation(
        ...     rac_interpreter.PRECONDITION, 'increment#1', 1,
        ...     ['increment#0'], frame_values=[('x', -1)])
        >>> lines = render_violation(v).splitlines()
        >>> lines[0].startswith('+-- Precondition violation --')
        True
        >>> print('\\n'.join(lines[1:-1]))
        | block:      increment#1 (slot 1)
        | message:    the precondition (slot 1) does not hold at this call
        | call chain: increment#0
        | values:     x = -1
    '''

    title = '+-- %s violation ' % violation.kind
    lines = [title + '-' * max(FRAME_WIDTH - len(title), 0)]

    location = violation.block_id
    if violation.slot_index is not None and \
            violation.kind != rac_interpreter.ASSERTION:
        location += ' (slot %d)' % violation.slot_index
    if violation.iteration is not None:
        location += ', iteration %d' % violation.iteration

    lines.append('| block:      %s' % location)
    lines.append('| message:    %s' % violation.message)
    lines.append('| call chain: %s' % ' > '.join(violation.call_chain))
    lines.append('| values:     %s' % (', '.join(
        '%s = %s' % (name, lm.format_value(value))
        for (name, value) in violation.frame_values) or '-'))
    lines.append('+' + '-' * (FRAME_WIDTH - 1))

    return '\n'.join(lines)


def render_report(report):
    '''Text form of an execution report.'''

    lines = []

    if report.violation is not None:
        lines.append(render_violation(report.violation))
    elif report.fault is not None:
        lines.append(diagnostics.render(report.fault.diagnostics))
    else:
        lines.append(lesson_corpus.PASSED)
        if report.result is not None:
            lines.append('result: %s' % lm.format_value(report.result))

    if report.globals:
        lines.append('globals:')
        lines.extend('  %s = %s' % (name, lm.format_value(value))
                     for (name, value) in report.globals)

    return '\n'.join(lines)


def default_output(path):
    '''Output path derived from a program path

        >>> default_output('lessons/increment.blocks.json')
        'lessons/increment.bpl'
    '''

    return utils.strip_suffix(path, (program_io.FILE_SUFFIX, '.json')) + \
        boogie_backend.BPL_SUFFIX


def default_entry(program):
    if len(program.scripts) == 1:
        return program.scripts[0].name

    return None


def _run(args):
    config = load_config(args)
    program = read_program(args.file, config.format)

    entry = config.entry or default_entry(program)
    if entry is None:
        print_error('Error', 'no entry point given, use --entry')
        raise _Exit(EXIT_USAGE)

    try:
        values = lesson_corpus.parse_arguments(config.args)
    except ValueError as exn:
        print_error('Error', exn)
        raise _Exit(EXIT_USAGE)

    try:
        bound = rac_interpreter.bind_arguments(program, entry, values)
        report = rac_interpreter.Interpreter(
            program, depth_limit=config.depth_limit).run_entry(entry, bound)
    except rac_interpreter.EntryError as exn:
        print_diagnostics(exn.diagnostics, config.format)
        raise _Exit(EXIT_USAGE)

    if config.format == diagnostics.FORMAT_JSON:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(render_report(report))

    sys.stderr.write(diagnostics.summary(report.diagnostics) + '\n')

    return EXIT_OK if report.passed else EXIT_FAILED


def _check(args):
    config = load_config(args)
    program = read_program(args.file, config.format)

    try:
        typed = static_frontend.check_program(program)
    except static_frontend.TypeCheckError as exn:
        print_diagnostics(exn.diagnostics, config.format)
        return EXIT_FAILED

    print_diagnostics(list(typed.warnings), config.format)
    return EXIT_OK


def compile_file(args, config):
    '''Type check, compile and write a program

    :return: `(typed, unit, bpl_path)`
    '''

    program = read_program(args.file, config.format)

    try:
        typed = static_frontend.check_program(program)
        unit = boogie_backend.compile_program(typed)
    except (static_frontend.TypeCheckError,
            boogie_backend.CompileError) as exn:
        print_diagnostics(exn.diagnostics, config.format)
        raise _Exit(EXIT_FAILED)

    bpl_path = config.output or default_output(args.file)
    try:
        srcmap_path = unit.write(bpl_path)
    except (IOError, OSError) as exn:
        print_error('Error', '%s: %s' % (exn.filename or bpl_path,
                                         exn.strerror or exn))
        raise _Exit(EXIT_USAGE)

    if config.format == diagnostics.FORMAT_TEXT:
        print('wrote %s' % bpl_path)
        print('wrote %s' % srcmap_path)

    return typed, unit, bpl_path


def _compile(args):
    config = load_config(args)
    typed, _, _ = compile_file(args, config)

    print_diagnostics(list(typed.warnings), config.format)
    return EXIT_OK


def _verify(args):
    config = load_config(args)
    typed, unit, bpl_path = compile_file(args, config)

    if args.skip_solver:
        print_diagnostics(list(typed.warnings), config.format)
        return EXIT_OK

    if not config.boogie_path:
        print_error('Error', 'no Boogie executable given, use --boogie-path '
                    'or %s' % configuration.BOOGIE_ENVIRONMENT_VARIABLE)
        return EXIT_USAGE

    runner = boogie_backend.BoogieRunner(
        config.boogie_path, options=config.boogie_options,
        timeout=config.timeout_secs)

    try:
        verdict = parse_verdict(runner, unit, bpl_path)
    except boogie_backend.ToolError as exn:
        print_diagnostics(exn.diagnostics, config.format)
        return EXIT_TOOL_FAILURE

    found = list(typed.warnings) + verdict.diagnostics

    if verdict.outcome == boogie_backend.VERIFIED and \
            config.format == diagnostics.FORMAT_TEXT:
        print('verified (%d procedure%s)' %
              (verdict.verified, '' if verdict.verified == 1 else 's'))

    print_diagnostics(found, config.format)

    if verdict.outcome == boogie_backend.VERIFIED:
        return EXIT_OK
    elif verdict.outcome == boogie_backend.ERRORS:
        return EXIT_FAILED
    else:
        return EXIT_TOOL_FAILURE


def parse_verdict(runner, unit, bpl_path):
    return boogie_backend.parse_boogie_output(runner.run(bpl_path),
                                              unit.source_map)


def _lessons(args):
    config = load_config(args)

    runner = None
    if config.boogie_path and not args.skip_solver:
        runner = boogie_backend.BoogieRunner(
            config.boogie_path, options=config.boogie_options,
            timeout=config.timeout_secs)

    try:
        if args.regenerate:
            for path in lesson_corpus.regenerate_goldens(args.dir):
                print('wrote %s' % path)

        results = lesson_corpus.corpus_check(
            args.dir, runner=runner, depth_limit=config.depth_limit,
            random_runs=args.random_runs, seed=config.seed)
    except lesson_corpus.LessonError as exn:
        print_error('Lesson error', exn)
        return EXIT_USAGE
    except (IOError, OSError) as exn:
        print_error('Error', '%s: %s' % (exn.filename, exn.strerror))
        return EXIT_USAGE

    for result in results:
        if result.passed:
            print('PASS %s' % result.name)
        else:
            print('FAIL %s: %s' % (result.name, result.detail))

    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def subcommand(func):
    '''Turn a `_Exit` raised by a subcommand into its return code.'''

    def wrapped(args):
        try:
            return func(args)
        except _Exit as exn:
            return exn.rc
        except diagnostics.BlockVerifyError as exn:
            print_diagnostics(exn.diagnostics,
                              getattr(args, 'format', None) or
                              diagnostics.FORMAT_TEXT)
            return EXIT_FAILED
        except Exception as exn:  # pylint: disable=W0703
            print_error('Error', exn)
            return EXIT_FAILED

    wrapped.__name__ = func.__name__
    wrapped.__doc__ = func.__doc__
    return wrapped


run = subcommand(_run)
run.__doc__ = '''Implementation of the 'run' subcommand.'''
check = subcommand(_check)
check.__doc__ = '''Implementation of the 'check' subcommand.'''
compile_ = subcommand(_compile)
compile_.__doc__ = '''Implementation of the 'compile' subcommand.'''
verify = subcommand(_verify)
verify.__doc__ = '''Implementation of the 'verify' subcommand.'''
lessons = subcommand(_lessons)
lessons.__doc__ = '''Implementation of the 'lessons' subcommand.'''


def version():
    try:
        return 'blockverify %s' % importlib.metadata.version('blockverify')
    except importlib.metadata.PackageNotFoundError:
        return 'unknown'


def build_parser():
    '''Build the argument parser of the `blockverify` tool.'''

    parser = argparse.ArgumentParser(
        description='Runtime and static verification of block programs')
    subparsers = parser.add_subparsers(title='subcommands', dest='command')
    subparsers.required = True

    parser.add_argument('--version', action='version', version=version())

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--format',
        choices=[diagnostics.FORMAT_TEXT, diagnostics.FORMAT_JSON],
        default=None, help='output format')
    common.add_argument(
        '-c', '--config',
        dest='config', action='store', metavar='FILE', default=None,
        help='configuration file (default: %s when present)' %
        configuration.DEFAULT_CONFIGURATION_PATH)
    common.add_argument(
        '-v', '--verbose', action='store_true', default=False,
        help='log debugging information on standard error')

    boogie = argparse.ArgumentParser(add_help=False)
    boogie.add_argument(
        '--boogie-path', dest='boogie_path', metavar='PATH', default=None,
        help='Boogie executable (default: $%s)' %
        configuration.BOOGIE_ENVIRONMENT_VARIABLE)
    boogie.add_argument(
        '--timeout-secs', dest='timeout_secs', type=int, metavar='SECS',
        default=None, help='Boogie timeout')
    boogie.add_argument(
        '--skip-solver', dest='skip_solver', action='store_true',
        default=False, help='stop after compilation')

    # run parser
    parser_run = subparsers.add_parser(
        'run', parents=[common], help='run with runtime assertion checking')
    parser_run.set_defaults(func=run)
    parser_run.add_argument('file', metavar='FILE', help='program to run')
    parser_run.add_argument(
        '--entry', metavar='NAME', default=None,
        help='entry script or block')
    parser_run.add_argument(
        '--args', nargs='*', metavar='ARG', default=[],
        help='arguments, as VALUE or NAME=VALUE')
    parser_run.add_argument(
        '--depth-limit', dest='depth_limit', type=int, metavar='N',
        default=None, help='maximum number of nested calls')

    # check parser
    parser_check = subparsers.add_parser(
        'check', parents=[common], help='validate and type check')
    parser_check.set_defaults(func=check)
    parser_check.add_argument('file', metavar='FILE', help='program to check')

    # compile parser
    parser_compile = subparsers.add_parser(
        'compile', parents=[common], help='compile to Boogie')
    parser_compile.set_defaults(func=compile_)
    parser_compile.add_argument('file', metavar='FILE',
                                help='program to compile')
    parser_compile.add_argument(
        '--out', metavar='PATH', default=None, help='output .bpl path')

    # verify parser
    parser_verify = subparsers.add_parser(
        'verify', parents=[common, boogie],
        help='compile and verify with Boogie')
    parser_verify.set_defaults(func=verify)
    parser_verify.add_argument('file', metavar='FILE',
                               help='program to verify')
    parser_verify.add_argument(
        '--out', metavar='PATH', default=None, help='output .bpl path')

    # lessons parser
    parser_lessons = subparsers.add_parser(
        'lessons', parents=[common, boogie], help='check the lesson corpus')
    parser_lessons.set_defaults(func=lessons)
    parser_lessons.add_argument(
        '--dir', metavar='DIR', default=lesson_corpus.DEFAULT_LESSONS_DIRECTORY,
        help='lessons directory')
    parser_lessons.add_argument(
        '--regenerate', action='store_true', default=False,
        help='rewrite the golden .bpl files first')
    parser_lessons.add_argument(
        '--random-runs', dest='random_runs', type=int, metavar='N',
        default=0, help='also run every verified entry block on N random '
        'arguments')
    parser_lessons.add_argument(
        '--seed', type=int, metavar='N', default=None,
        help='seed of the random arguments')

    return parser


def main(args=None):
    '''Main entry point.'''

    parser = build_parser()

    # Go
    args2 = parser.parse_args(args=args)

    logging.basicConfig(
        level=logging.DEBUG if args2.verbose else logging.WARNING,
        stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')

    rc = args2.func(args2)

    sys.exit(rc)


if __name__ == '__main__':
    main()
