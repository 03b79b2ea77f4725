# Copyright (c) 2014 Scality
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

import functools
import inspect
import itertools
import logging
import reprlib

DEFAULT_LOGGER = logging.getLogger(__name__)

# Keeps traced programs and lists short in debug logs
_REPR = reprlib.Repr()
_REPR.maxlist = _REPR.maxtuple = 8
_REPR.maxstring = _REPR.maxother = 80


def trace(f):
    '''Trace calls to a decorated method

    Calls are logged at `DEBUG` level on entry, with a call identifier and
    the bound arguments, and on exit, with the same identifier and the return
    value or exception. Long values are abbreviated.

    The logger is taken from the `logger` attribute of the instance, falling
    back to the module logger.
    '''

    name = f.__name__
    signature = inspect.signature(f)
    call_ids = itertools.count()

    @functools.wraps(f)
    def wrapped(self, *args, **kwargs):
        logger = getattr(self, 'logger', None) or DEFAULT_LOGGER

        if not logger.isEnabledFor(logging.DEBUG):
            return f(self, *args, **kwargs)

        call_id = next(call_ids)

        bound = signature.bind(self, *args, **kwargs).arguments
        bound.pop('self', None)
        logger.debug('==> %s (%d): call %s', name, call_id,
                     _REPR.repr(dict(bound)))

        try:
            result = f(self, *args, **kwargs)
        except BaseException as exc:
            logger.debug('<== %s (%d): exception %r', name, call_id, exc)
            raise
        else:
            logger.debug('<== %s (%d): return %s', name, call_id,
                         _REPR.repr(result))
            return result

    return wrapped


def split_list(val):
    '''Split a comma-separated string into a list of strings.

        >>> list(split_list(' 1, 2,, 3 '))
        ['1', '2', '3']
    '''

    return (s2 for s2 in
            (s1.strip() for s1 in val.split(','))
            if s2)


def strip_suffix(path, suffixes):
    '''Strip the first matching suffix from `path`.

        >>> strip_suffix('lessons/increment.blocks.json', ('.blocks.json', '.json'))
        'lessons/increment'
        >>> strip_suffix('program.txt', ('.json',))
        'program.txt'
    '''

    for suffix in suffixes:
        if path.endswith(suffix):
            return path[:-len(suffix)]

    return path
