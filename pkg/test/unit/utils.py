# Copyright (c) 2014, 2015 Scality
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

"""A collection of functions that helps running unit tests"""

import io
import os.path

from blockverify import language_model as lm

ROOT = os.path.dirname(os.path.dirname(os.path.dirname(
    os.path.abspath(__file__))))

LESSONS = os.path.join(ROOT, 'lessons')
FIXTURES = os.path.join(ROOT, 'test', 'fixtures')


def lesson_path(name):
    '''Path of a program of the lesson corpus.'''

    return os.path.join(LESSONS, name)


def fixture(*parts):
    '''Contents of a test fixture file.'''

    with io.open(os.path.join(FIXTURES, *parts), encoding='utf-8') as fd:
        return fd.read()


class FakeStream(object):
    def __init__(self, module, attr):
        self.stream = io.StringIO()
        self._module = module
        self._attr = attr
        self._orig_attr = None

    def __enter__(self):
        self._orig_attr = getattr(self._module, self._attr)
        setattr(self._module, self._attr, self.stream)

        return self

    def __exit__(self, exc, value, tb):
        setattr(self._module, self._attr, self._orig_attr)


# Program construction shorthands

def lit(value):
    return lm.Literal(value)


def var(name):
    return lm.VarRef(name)


def arith(op, left, right):
    return lm.Arith(op, left, right)


def cmp(op, left, right):
    return lm.Compare(op, left, right)


def and_(*operands):
    return lm.BoolOp('and', list(operands))


def not_(operand):
    return lm.BoolOp('not', [operand])


def reporter(name, params, body, pre=(), post=()):
    return lm.BlockDef(name, lm.REPORTER, list(params), list(pre),
                       list(post), list(body))


def predicate(name, params, body, pre=(), post=()):
    return lm.BlockDef(name, lm.PREDICATE, list(params), list(pre),
                       list(post), list(body))


def command(name, params, body, pre=(), post=()):
    return lm.BlockDef(name, lm.COMMAND, list(params), list(pre),
                       list(post), list(body))


def script(name, body):
    return lm.Script(name, list(body))


def program(blocks=(), scripts=(), globals_=()):
    return lm.Program(list(globals_), list(blocks), list(scripts))


def increment(body_delta=1):
    '''The `increment` reporter: `pre x >= 0`, `post result == old(x) + 1`.'''

    return reporter(
        'increment', ['x'],
        [lm.Report(arith('add', var('x'), lit(body_delta)))],
        pre=[cmp('ge', var('x'), lit(0))],
        post=[cmp('eq', lm.Result(), arith('add', lm.Old('x'), lit(1)))])
