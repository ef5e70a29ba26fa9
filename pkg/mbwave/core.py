"""
Command registry and the ``mbwave`` entry point.

Commands are plain functions registered with :func:`command`. Their
keyword parameters become command-line options; the parsed options are
bound back to the function by name. A command returns (or yields) lines
of output.
"""

import argparse
import functools
import importlib
import inspect
import logging
import pprint
import sys
from typing import List

import importlib_metadata
import jaraco.functools
from jaraco.collections import Projection
from jaraco.itertools import always_iterable

import mbwave

from .dictlib import ConfigDict
from .errors import MbwaveError


log = logging.getLogger(__name__)


defaults = {
    'log level': 'INFO',
    'quad tol': 1e-10,
    'max depth': 1_000_000,
    'compatibility tol': 1e-8,
    'compatibility samples': 256,
    'breakpoint cap': 20000,
    'workers': 1,
    'x count': 21,
}


class Repeated:
    "Option converter for options that may be given several times."

    def __init__(self, convert):
        self.convert = convert


def comma_list(convert):
    """
    >>> comma_list(int)('128,256')
    [128, 256]
    """

    def parse(text):
        return [convert(part) for part in text.split(',') if part.strip()]

    parse.__name__ = f'{convert.__name__} list'
    return parse


def parse_grid(text):
    """
    >>> parse_grid('ny=512,tmax=2')
    {'ny': 512, 'tmax': 2.0}
    """
    kinds = dict(ny=int, tmax=float, cfl=float)
    grid = {}
    for item in text.split(','):
        key, sep, value = item.partition('=')
        key = key.strip()
        if not sep or key not in kinds:
            raise argparse.ArgumentTypeError(
                f"expected ny=<n>,tmax=<t>[,cfl=<c>], got {text!r}"
            )
        grid[key] = kinds[key](value)
    return grid


class Command:
    _registry: List['Command'] = []

    aliases = ()
    doc = None

    def __init__(self, **kwargs):
        self.__dict__.update(kwargs)

    def register(self):
        if self in self._registry:
            return
        self._registry.append(self)
        self._registry.sort(key=lambda cmd: cmd.name)

    def decorate(self, func):
        self.func = func
        self._set_implied_name()
        self._set_doc(func)
        self.register()
        return func

    def _set_implied_name(self):
        "Allow the name of this command to default to the function name."
        if getattr(self, 'name', None) is None:
            self.name = self.func.__name__
        self.name = self.name.lower()

    def _set_doc(self, func):
        """
        If no doc was explicitly set, use the first paragraph of the
        function's docstring.
        """
        if not self.doc and func.__doc__:
            first, _, _ = inspect.cleandoc(func.__doc__).partition('\n\n')
            self.doc = first.replace('\n', ' ')

    def __eq__(self, other):
        return vars(self) == vars(other)

    def add_parser(self, subparsers):
        parser = subparsers.add_parser(
            self.name, aliases=list(self.aliases), help=self.doc, description=self.doc
        )
        for param in inspect.signature(self.func).parameters.values():
            flags, spec = _option(param)
            parser.add_argument(*flags, **spec)
        parser.add_argument('--out', metavar='PATH', help="write here, not to stdout")
        parser.set_defaults(command=self)
        return parser

    def attach(self, params):
        return attach(self.func, params)


def _option(param):
    flag = '--' + param.name.replace('_', '-')
    convert = param.annotation
    spec = dict(dest=param.name)
    if isinstance(convert, Repeated):
        spec.update(action='append', type=convert.convert, default=[])
    elif convert is bool:
        spec.update(action='store_true')
    else:
        if convert is not param.empty:
            spec.update(type=convert)
        if param.default is param.empty:
            spec.update(required=True)
        else:
            spec.update(default=param.default)
    return (flag,), spec


def attach(func, params):
    """
    Given a function and a namespace of possible parameters,
    bind any params matching the signature of the function
    to that function.
    """
    sig = inspect.signature(func)
    params = Projection(sig.parameters.keys(), params)
    return functools.partial(func, **params)


def command(name=None, aliases=None, doc=None):
    if callable(name):
        raise ValueError("Name should be a string, did you forget ()?")
    handler = Command(name=name, doc=doc, aliases=tuple(always_iterable(aliases)))
    return handler.decorate


class ConfigMergeAction(argparse.Action):
    "Merge each settings file over those given before it."

    def __call__(self, parser, namespace, values, option_string=None):
        merged = dict(getattr(namespace, self.dest) or {})
        merged.update(values)
        setattr(namespace, self.dest, merged)


def get_args(*args, **kwargs):
    parser = argparse.ArgumentParser(
        prog='mbwave',
        description="Waves on an expanding interval with boundary feedback",
    )
    parser.add_argument(
        '--config',
        type=ConfigDict.from_yaml,
        action=ConfigMergeAction,
        default={},
        metavar='FILE',
    )
    subparsers = parser.add_subparsers(dest='command_name', metavar='command')
    subparsers.required = True
    for cmd in Command._registry:
        cmd.add_parser(subparsers)
    return parser.parse_args(*args, **kwargs)


def run(argv=None):
    _load_library_extensions()
    args = get_args(argv)
    config = init_config(args.config)
    _setup_logging()
    log.debug('Running with config')
    log.debug(pprint.pformat(config))
    params = vars(args)
    out = params.get('out')
    log.info("Running %s", args.command.name)
    try:
        with _output(out) as stream:
            for line in always_iterable(args.command.attach(params)()):
                stream.write(line + '\n')
    except MbwaveError as exc:
        log.error('%s', exc)
        return exc.exit_code
    log.info("Finished %s", args.command.name)
    return 0


class _output:
    "Write to the named file, or to stdout."

    def __init__(self, path):
        self.path = path

    def __enter__(self):
        if self.path is None:
            self.stream = sys.stdout
        else:
            self.stream = open(self.path, 'w', encoding='utf-8', newline='\n')
        return self.stream

    def __exit__(self, *exc_info):
        if self.path is None:
            self.stream.flush()
        else:
            self.stream.close()


def _setup_logging():
    log_level = mbwave.config.get('log level', logging.INFO)
    if isinstance(log_level, str):
        log_level = getattr(logging, log_level.upper())
    logging.basicConfig(level=log_level, format="%(message)s")


def init_config(overrides):
    """
    Install the config dict as mbwave.config, setting overrides,
    and return the result.
    """
    mbwave.config = config = ConfigDict(defaults)
    config.update(overrides)
    return config


@jaraco.functools.once
def _load_library_extensions():
    """
    Register the built-in commands, then locate all entry points in the
    groups 'mbwave_commands' and 'mbwave_presets' and initialize them.
    Any third-party library may register an entry point by adding the
    following to its setup.cfg::

        [options.entry_points]
        mbwave_commands =
            plugin name = mylib.mymodule:initialize_func

    `plugin name` can be anything, and is only used to display the name
    of the plugin at initialization time.
    """
    importlib.import_module('mbwave.commands')
    for group in ('mbwave_commands', 'mbwave_presets'):
        for ep in importlib_metadata.entry_points(group=group):
            try:
                log.info('Loading %s', ep.name)
                init_func = ep.load()
                if callable(init_func):
                    init_func()
            except Exception:
                log.exception("Error initializing plugin %s." % ep)
