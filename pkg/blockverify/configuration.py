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
Run configuration: built-in defaults, overridden by an INI file, then by
the environment, then by command-line flags.
'''

import configparser
import io
import os

from blockverify import diagnostics
from blockverify import utils

DEFAULT_CONFIGURATION_PATH = 'blockverify.ini'

BOOGIE_ENVIRONMENT_VARIABLE = 'BLOCKVERIFY_BOOGIE'

RUN_SECTION = 'run'
BOOGIE_SECTION = 'boogie'

# INI option name to RunConfig field
RUN_OPTIONS = {
    'depth_limit': 'depth_limit',
    'seed': 'seed',
}
BOOGIE_OPTIONS = {
    'path': 'boogie_path',
    'options': 'boogie_options',
    'timeout_secs': 'timeout_secs',
}

POSITIVE_FIELDS = ('depth_limit', 'timeout_secs')


class ConfigurationError(diagnostics.BlockVerifyError):
    '''Exception raised for invalid configuration files or settings.'''

    code = 'E_CONFIG'
    phase = diagnostics.PHASE_PARSE


class RunConfig(object):
    '''Settings of one `blockverify` invocation

        >>> config = RunConfig()
        >>> config.depth_limit, config.seed, config.timeout_secs
        (10000, 0, 60)
        >>> config.replace(seed=4, boogie_path=None).seed
        4

    :raise ConfigurationError: Unknown field or invalid value
    '''

    FIELDS = {
        'entry': None,
        'args': (),
        'depth_limit': 10000,
        'seed': 0,
        'boogie_path': None,
        'boogie_options': (),
        'timeout_secs': 60,
        'output': None,
        'format': diagnostics.FORMAT_TEXT,
    }

    __slots__ = tuple('_%s' % name for name in FIELDS)

    def __init__(self, **kwargs):
        for name in kwargs:
            if name not in self.FIELDS:
                raise ConfigurationError('Unknown setting %r' % name)

        for (name, default) in self.FIELDS.items():
            value = kwargs.get(name, default)

            if name in POSITIVE_FIELDS and \
                    (not isinstance(value, int) or value <= 0):
                raise ConfigurationError('Invalid %r setting: %r' %
                                         (name, value))

            if name in ('args', 'boogie_options'):
                value = tuple(value)

            setattr(self, '_%s' % name, value)

        if self._format not in (diagnostics.FORMAT_TEXT,
                                diagnostics.FORMAT_JSON):
            raise ConfigurationError('Invalid output format: %r' %
                                     self._format)

    def __getattr__(self, name):
        if name in RunConfig.FIELDS:
            return object.__getattribute__(self, '_%s' % name)

        raise AttributeError(name)

    def as_dict(self):
        return dict((name, getattr(self, name)) for name in self.FIELDS)

    def replace(self, **overrides):
        '''Copy with some fields replaced; `None` overrides are ignored.'''

        values = self.as_dict()
        values.update((name, value) for (name, value) in overrides.items()
                      if value is not None)
        return RunConfig(**values)

    def __eq__(self, other):
        if not isinstance(other, RunConfig):
            return NotImplemented

        return self.as_dict() == other.as_dict()

    def __ne__(self, other):
        equal = self.__eq__(other)

        if equal is NotImplemented:
            return NotImplemented
        else:
            return not equal

    __hash__ = None

    def __repr__(self):
        return 'RunConfig(%s)' % ', '.join(
            '%s=%r' % (name, getattr(self, name))
            for name in sorted(self.FIELDS))

    @classmethod
    def from_stream(cls, stream, filename=None, base=None):
        '''Read settings from an INI stream on top of `base`

            >>> config = RunConfig.from_stream(io.StringIO(
            ...     u'[boogie]\\noptions = /nologo, /timeLimit:10\\n'))
            >>> config.boogie_options
            ('/nologo', '/timeLimit:10')

        :param stream: Stream to parse
        :type stream: File-like object
        :param filename: Filename of input, used in error reporting
        :type filename: `str`
        :param base: Settings to start from, defaults otherwise
        :type base: :class:`RunConfig`

        :rtype: :class:`RunConfig`

        :raise ConfigurationError: Various configurations issues detected
        '''

        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_file(stream, filename)
        except configparser.Error as exc:
            raise ConfigurationError('Unable to parse %s: %s' %
                                     (filename or 'configuration', exc))

        known = {RUN_SECTION: RUN_OPTIONS, BOOGIE_SECTION: BOOGIE_OPTIONS}
        overrides = {}

        for section in parser.sections():
            if section not in known:
                raise ConfigurationError('Unknown section %r' % section)

            for option in parser.options(section):
                if option not in known[section]:
                    raise ConfigurationError(
                        'Unknown %r setting in %r' % (option, section))

                field = known[section][option]
                value = parser.get(section, option)

                if field == 'boogie_options':
                    value = tuple(utils.split_list(value))
                elif field in ('depth_limit', 'seed', 'timeout_secs'):
                    try:
                        value = int(value)
                    except ValueError:
                        raise ConfigurationError(
                            'Invalid %r setting in %r: %r' %
                            (option, section, value))
                elif not value:
                    raise ConfigurationError(
                        'Invalid %r setting in %r' % (option, section))

                overrides[field] = value

        return (base or cls()).replace(**overrides)


def load(path=None, environ=None, base=None):
    '''Layer defaults, the INI file and the environment

    When `path` is `None`, :const:`DEFAULT_CONFIGURATION_PATH` is used if it
    exists; an explicit `path` must exist.

    :param path: INI file path
    :type path: `str`
    :param environ: Environment, defaults to :data:`os.environ`
    :type environ: `dict`

    :rtype: :class:`RunConfig`

    :raise ConfigurationError: Missing or invalid file
    '''

    environ = os.environ if environ is None else environ
    config = base or RunConfig()

    if path is None and os.path.exists(DEFAULT_CONFIGURATION_PATH):
        path = DEFAULT_CONFIGURATION_PATH

    if path is not None:
        try:
            with io.open(path, encoding='utf-8') as fd:
                config = RunConfig.from_stream(fd, path, base=config)
        except (IOError, OSError) as exc:
            raise ConfigurationError('Unable to read %s: %s' %
                                     (path, exc.strerror))

    boogie_path = environ.get(BOOGIE_ENVIRONMENT_VARIABLE)
    if boogie_path:
        config = config.replace(boogie_path=boogie_path)

    return config
