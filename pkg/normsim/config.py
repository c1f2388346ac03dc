"""
Experiment configuration: built-in defaults, an INI file and command-line
flags, in increasing order of precedence.
"""
import collections
import hashlib
import json
import logging
import os
import warnings

import six
from six.moves import configparser

from normsim.base import ConfigError
from normsim.base import OutputError
from normsim.disease import DiseaseParams
from normsim.disease import HealthState
from normsim.disease import ObservationModel
from normsim.learning import LearnParams
from normsim.norms import default_norms
from normsim.norms import load_norms
from normsim.social import COMM_KINDS
from normsim.social import PRESETS
from normsim.social import CommKind
from normsim.social import Gates
from normsim.social import preset
from normsim.world import WorldConfig

log = logging.getLogger(__name__)

ENV_CONFIG = 'NORMSIM_CONFIG'

SOCIETY_KEYS = collections.OrderedDict([
    ('sanction', (None, float)),
    ('tell', (None, float)),
    ('emote', (None, float)),
    ('hint', (None, float)),
    ('none', (None, float)),
    ('weight_immediate', (None, float)),
    ('weight_potential', (None, float)),
    ('kappa', (None, float)),
    ('gate_mild', (0.5, float)),
    ('gate_critical', (0.8, float)),
    ('gate_approval', (0.5, float)),
])

# section -> key -> (default, type)
SCHEMA = collections.OrderedDict([
    ('experiment', collections.OrderedDict([
        ('societies', ('nest', str)),
        ('seeds', (20, int)),
        ('base_seed', (0, int)),
        ('out', ('runs', str)),
        ('jobs', (1, int)),
        ('rolling_window', (50, int)),
        ('convergence_window', (500, int)),
        ('emergence_threshold', (0.9, float)),
        ('experimental', ('nest', str)),
        ('norms', ('', str)),
    ])),
    ('world', collections.OrderedDict([
        ('population', (100, int)),
        ('initial_infected_fraction', (0.30, float)),
        ('episode_steps', (2000, int)),
        ('quarantine_duration', (3, int)),
        ('p_interact', (1.0, float)),
        ('goals', ('rest,hike,shop,be_vaccinated', str)),
        ('confirm_quarantine', (True, bool)),
    ])),
    ('disease', collections.OrderedDict([
        ('infection_prob', (0.8, float)),
        ('vaccine_multiplier', (0.5, float)),
        ('home_divisor', (2.0, float)),
        ('progress_asymptomatic', (0.1, float)),
        ('progress_mild', (0.01, float)),
        ('progress_critical', (0.01, float)),
        ('recover_asymptomatic', (0.1, float)),
        ('recover_mild', (0.05, float)),
        ('recover_critical', (0.01, float)),
    ])),
    ('observation', collections.OrderedDict([
        ('healthy', ('', str)),
        ('asymptomatic', ('', str)),
        ('mild', ('', str)),
        ('critical', ('', str)),
    ])),
    ('society', SOCIETY_KEYS),
    ('learning', collections.OrderedDict([
        ('learning_rate', (0.001, float)),
        ('discount', (0.9, float)),
        ('kappa_hint', (0.3, float)),
        ('kappa_tell', (0.5, float)),
        ('epsilon', (0.1, float)),
        ('training_steps', (100000, int)),
        ('shaping', (True, bool)),
        ('warm_start', ('', str)),
        ('eval_epsilon', (0.0, float)),
    ])),
])

DEPRECATED = {
    ('experiment', 'society'): 'societies',
}

_booleans = {'1': True, 'yes': True, 'true': True, 'on': True,
             '0': False, 'no': False, 'false': False, 'off': False}


def _convert(section, key, raw, kind):
    raw = raw.strip()
    if raw == '' and kind is not str:
        return None
    try:
        if kind is bool:
            return _booleans[raw.lower()]
        return kind(raw)
    except (KeyError, ValueError):
        raise ConfigError('[%s] %s: cannot read %r as %s'
                          % (section, key, raw, kind.__name__))


def _split(value):
    return [v.strip() for v in value.split(',') if v.strip()]


class ExperimentConfig(object):
    def __init__(self, values=None, overrides=None):
        """
        *values* maps section names to ``{key: value}`` dicts on top of the
        defaults, *overrides* maps ``(section, key)`` to values from the
        command line; an override of None leaves the value alone.
        """
        self.values = collections.OrderedDict(
            (section, collections.OrderedDict(
                (key, default) for key, (default, _) in keys.items()))
            for section, keys in SCHEMA.items())
        for section, items in (values or {}).items():
            for key, value in items.items():
                self._set(section, key, value)
        for (section, key), value in sorted((overrides or {}).items()):
            if value is not None:
                self._set(section, key, value)
        self._validate()

    @classmethod
    def load(klass, path=None, overrides=None):
        """
        Read *path*, or the file named by ``NORMSIM_CONFIG`` when *path* is
        None. Without either only defaults and *overrides* apply.
        """
        path = path or os.getenv(ENV_CONFIG)
        values = collections.OrderedDict()
        if path:
            parser = configparser.ConfigParser()
            try:
                with open(path) as f:
                    parser.read_file(f)
            except (IOError, OSError) as e:
                raise ConfigError('cannot read config %s: %s' % (path, e))
            except configparser.Error as e:
                raise ConfigError('%s: %s' % (path, e))
            for section in parser.sections():
                schema = klass._schema(section)
                items = values.setdefault(section, collections.OrderedDict())
                for key, raw in parser.items(section):
                    if (section, key) in DEPRECATED:
                        warnings.warn(
                            '[%s] %s is deprecated, use %s'
                            % (section, key, DEPRECATED[section, key]),
                            DeprecationWarning)
                        key = DEPRECATED[section, key]
                    if key not in schema:
                        raise ConfigError('unknown key [%s] %s in %s'
                                          % (section, key, path))
                    items[key] = _convert(section, key, raw, schema[key][1])
            log.info('read config %s', path)
        return klass(values, overrides)

    @staticmethod
    def _schema(section):
        if section in SCHEMA:
            return SCHEMA[section]
        if section.startswith('society.'):
            name = section[len('society.'):]
            if name not in PRESETS:
                raise ConfigError('unknown society section [%s]' % section)
            return SOCIETY_KEYS
        raise ConfigError('unknown config section [%s]' % section)

    def _set(self, section, key, value):
        schema = self._schema(section)
        if key not in schema:
            raise ConfigError('unknown key [%s] %s' % (section, key))
        if section not in self.values:
            self.values[section] = collections.OrderedDict()
        kind = schema[key][1]
        if isinstance(value, six.string_types) and kind is not str:
            value = _convert(section, key, value, kind)
        self.values[section][key] = value

    def _validate(self):
        if self.get('experiment', 'seeds') < 1:
            raise ConfigError('at least one seed is required')
        for name in self.societies:
            if name not in PRESETS:
                raise ConfigError('unknown society %r, expected one of %s'
                                  % (name, ', '.join(PRESETS)))
        if self.experimental not in PRESETS:
            raise ConfigError('unknown experimental society %r'
                              % self.experimental)
        for key in ('jobs', 'rolling_window', 'convergence_window'):
            if self.get('experiment', key) < 1:
                raise ConfigError('[experiment] %s must be at least 1' % key)
        self.world_config()

    def get(self, section, key):
        try:
            return self.values[section][key]
        except KeyError:
            if section.startswith('society.'):
                return self._schema(section)[key][0]
            raise ConfigError('unknown key [%s] %s' % (section, key))

    @property
    def societies(self):
        return tuple(s.lower()
                     for s in _split(self.get('experiment', 'societies')))

    @property
    def experimental(self):
        return self.get('experiment', 'experimental').strip().lower()

    @property
    def seeds(self):
        base = self.get('experiment', 'base_seed')
        return list(range(base, base + self.get('experiment', 'seeds')))

    def as_dict(self):
        return dict((section, dict(items))
                    for section, items in self.values.items())

    def digest(self):
        """SHA-256 of the resolved configuration"""
        text = json.dumps(self.as_dict(), sort_keys=True)
        return hashlib.sha256(text.encode('utf-8')).hexdigest()

    #
    # Builders

    def world_config(self):
        w = self.values['world']
        return WorldConfig(
            population=w['population'],
            initial_infected_fraction=w['initial_infected_fraction'],
            episode_steps=w['episode_steps'],
            quarantine_duration=w['quarantine_duration'],
            p_interact=w['p_interact'],
            goals=_split(w['goals']),
            confirm_quarantine=w['confirm_quarantine'])

    def disease_params(self):
        d = self.values['disease']
        states = (HealthState.ASYMPTOMATIC, HealthState.MILD,
                  HealthState.CRITICAL)
        return DiseaseParams(
            infection_prob=d['infection_prob'],
            vaccine_multiplier=d['vaccine_multiplier'],
            home_divisor=d['home_divisor'],
            progress_base=dict(
                (s, d['progress_%s' % s.name.lower()]) for s in states),
            recover_base=dict(
                (s, d['recover_%s' % s.name.lower()]) for s in states))

    def observation_model(self):
        rows = {}
        for key, value in self.values['observation'].items():
            if value:
                try:
                    rows[HealthState[key.upper()]] = \
                        [float(v) for v in _split(value)]
                except ValueError:
                    raise ConfigError('[observation] %s: %r is not a list '
                                      'of probabilities' % (key, value))
        return ObservationModel(rows)

    def learn_params(self):
        return LearnParams(**self.values['learning'])

    def norms(self):
        path = self.get('experiment', 'norms')
        if path:
            return load_norms(path)
        return default_norms()

    def society(self, name):
        """
        The named preset with ``[society]`` and then ``[society.<name>]``
        overrides applied.
        """
        learning = self.values['learning']
        base = preset(name, kappa_tell=learning['kappa_tell'],
                      kappa_hint=learning['kappa_hint'])
        settings = collections.OrderedDict()
        for section in ('society', 'society.%s' % base.name):
            for key, value in self.values.get(section, {}).items():
                if value is not None:
                    settings[key] = value

        mixture = dict(base.mixture)
        kinds = dict((k.name.lower(), k) for k in COMM_KINDS)
        overridden = [k for k in kinds if k in settings]
        for key in overridden:
            mixture[kinds[key]] = settings[key]
        if overridden:
            log.warning('society %s: mixture overridden (%s)',
                        base.name, ', '.join(overridden))
        kappa = dict(base.kappa)
        if 'kappa' in settings:
            kappa = {CommKind.TELL: settings['kappa'],
                     CommKind.HINT: settings['kappa']}
        return preset(
            base.name,
            mixture=mixture,
            weight_immediate=settings.get('weight_immediate',
                                          base.weight_immediate),
            weight_potential=settings.get('weight_potential',
                                          base.weight_potential),
            kappa=kappa,
            gates=Gates(settings.get('gate_mild', base.gates.mild),
                        settings.get('gate_critical', base.gates.critical),
                        settings.get('gate_approval', base.gates.approval)))


class RunManifest(collections.namedtuple(
        'RunManifest',
        ['society', 'seed', 'config_hash', 'version', 'started', 'finished',
         'outputs', 'emergence', 'infections'])):
    """
    Record of one finished run. *outputs* maps artefact names to paths,
    *emergence* maps each tracked norm to its emergence step or None and
    *infections* is the raw cumulative infection count of the recorded
    episode.
    """
    __slots__ = ()

    def to_dict(self):
        return collections.OrderedDict(zip(self._fields, self))

    def write(self, path):
        try:
            with open(path, 'w') as f:
                json.dump(self.to_dict(), f, indent=2, sort_keys=True)
                f.write('\n')
        except (IOError, OSError) as e:
            raise OutputError(path, e)

    @classmethod
    def read(klass, path):
        try:
            with open(path) as f:
                data = json.load(f)
        except (IOError, OSError) as e:
            raise OutputError(path, e)
        return klass(**dict((k, data.get(k)) for k in klass._fields))
