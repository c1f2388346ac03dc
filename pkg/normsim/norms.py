"""
Norms, normative information and the listing format they are written in.

A listing is a comma separated sequence of ``key = {items}`` pairs::

    norm type   = {Prohibition},
    subject     = {Infected_Agent},
    object      = {Healthy_Agent},
    antecedent  = {obs_health=[MILD, CRITICAL]},
    consequent  = {loc=[PARK, CAFE, CLINIC]}

Keys are case-insensitive, values are exact-case, whitespace and line breaks
are insignificant and conditions may be separated by ``,`` or ``;``.
"""
import collections
import enum
import logging
import re

import lark
import six

from normsim.base import ConfigError
from normsim.base import DuplicateKey
from normsim.base import ListingSyntaxError
from normsim.base import MissingAttribute
from normsim.base import MissingKey
from normsim.base import UnknownAttribute
from normsim.base import UnknownKey
from normsim.base import UnknownValue

log = logging.getLogger(__name__)

GRAMMAR = r'''
    start: pair ("," pair)* ","?
    pair: key "=" "{" items "}"
    key: NAME+
    items: item (("," | ";") item)*
    ?item: condition
         | bare
    condition: NAME "=" value
    bare: NAME
    value: NAME
         | "[" NAME ("," NAME)* "]"
    NAME: /[A-Za-z0-9_]+/
    %import common.WS
    %ignore WS
'''

_parser = lark.Lark(GRAMMAR, parser='lalr')

ATTRIBUTES = collections.OrderedDict([
    ('obs_health', ('HEALTHY', 'MILD', 'CRITICAL')),
    ('actual_health',
     ('HEALTHY', 'ASYMPTOMATIC', 'MILD', 'CRITICAL', 'DECEASED')),
    ('loc', ('HOME', 'PARK', 'CAFE', 'CLINIC')),
    ('vaccinated', ('TRUE', 'FALSE')),
])

ROLES = ('Infected_Agent', 'Healthy_Agent', 'Alive_Agent', 'Other_Agent')

NORM_KEYS = ('norm type', 'subject', 'object', 'antecedent', 'consequent')
INFO_KEYS = ('sender', 'receiver', 'info type', 'antecedent', 'consequent')


class NormType(enum.Enum):
    COMMITMENT = 'Commitment'
    PROHIBITION = 'Prohibition'


class NormOutcome(enum.Enum):
    INACTIVE = 'Inactive'
    SATISFIED = 'Satisfied'
    VIOLATED = 'Violated'


class InfoType(enum.Enum):
    MESSAGE = 'MESSAGE'
    HINT = 'HINT'


class InfoConsequent(enum.Enum):
    PUNISHMENT = 'PUNISHMENT'
    REWARD = 'REWARD'


class Condition(collections.namedtuple(
        'Condition', ['attribute', 'allowed_values'])):
    """
    *attribute* is one of `ATTRIBUTES`; *allowed_values* a non-empty subset
    of its domain. The condition holds for a view whose value for
    *attribute* is one of *allowed_values*.
    """
    __slots__ = ()

    def __new__(klass, attribute, allowed_values):
        allowed_values = frozenset(allowed_values)
        if attribute not in ATTRIBUTES:
            raise ValueError('unknown attribute %r' % (attribute,))
        if not allowed_values:
            raise ValueError('condition on %s allows no value' % attribute)
        unknown = allowed_values.difference(ATTRIBUTES[attribute])
        if unknown:
            raise ValueError('%s does not take %s' % (
                attribute, ', '.join(sorted(unknown))))
        return super(Condition, klass).__new__(
            klass, attribute, allowed_values)

    def holds(self, view):
        return view[self.attribute] in self.allowed_values

    def values(self):
        """Allowed values in domain order"""
        return [v for v in ATTRIBUTES[self.attribute]
                if v in self.allowed_values]


Norm = collections.namedtuple(
    'Norm', ['norm_type', 'subject', 'object', 'antecedent', 'consequent'])

NormativeInfo = collections.namedtuple(
    'NormativeInfo',
    ['sender', 'receiver', 'info_type', 'antecedent', 'consequent'])


def conditions(mapping):
    """
    Build a canonical condition tuple from ``{attribute: values}``. A single
    string value is accepted for *values*.
    """
    ret = []
    for attribute in ATTRIBUTES:
        if attribute in mapping:
            values = mapping[attribute]
            if isinstance(values, six.string_types):
                values = [values]
            ret.append(Condition(attribute, values))
    unknown = set(mapping).difference(ATTRIBUTES)
    if unknown:
        raise ValueError('unknown attribute(s) %s'
                         % ', '.join(sorted(unknown)))
    return tuple(ret)


def role_holds(role, health):
    """
    Whether an agent whose health reads *health* (a health value name, as
    perceived by whoever applies the role) plays *role*.
    """
    if role == 'Infected_Agent':
        return health in ('ASYMPTOMATIC', 'MILD', 'CRITICAL')
    if role == 'Healthy_Agent':
        return health == 'HEALTHY'
    if role == 'Alive_Agent':
        return health != 'DECEASED'
    return True


#
# Parsing

def _offset(text, pos):
    return len(text[:pos].encode('utf-8'))


def _fail(klass, message, text, token):
    raise klass(message, six.text_type(token), _offset(text, token.start_pos))


def _syntax_error(text, exc):
    token = getattr(exc, 'token', None)
    pos = getattr(exc, 'pos_in_stream', None)
    if pos is None and getattr(exc, 'line', -1) > 0:
        lines = text.splitlines(True)
        pos = sum(len(line) for line in lines[:exc.line - 1]) \
            + exc.column - 1
    if token is not None and token.type == '$END':
        pos = len(text)
        fragment = '<end>'
    else:
        if token is not None and getattr(token, 'start_pos', None) is not None:
            pos = token.start_pos
        if pos is None or pos < 0:
            pos = len(text)
        fragment = six.text_type(token) if token else text[pos:pos + 1]
        fragment = fragment or '<end>'
    return ListingSyntaxError(
        'unexpected input', fragment, _offset(text, pos))


def _pairs(text, keys):
    try:
        tree = _parser.parse(text)
    except lark.exceptions.UnexpectedInput as e:
        raise _syntax_error(text, e)

    found = collections.OrderedDict()
    for pair in tree.children:
        key_tree, items = pair.children
        first = key_tree.children[0]
        key = ' '.join(t.value.lower() for t in key_tree.children)
        if key not in keys:
            _fail(UnknownKey, 'unknown key', text, first)
        if key in found:
            _fail(DuplicateKey, 'duplicate key', text, first)
        found[key] = items.children
    for key in keys:
        if key not in found:
            raise MissingKey(
                'missing key', key, len(text.encode('utf-8')))
    return found


def _bare(text, items, choices):
    item = items[0]
    if len(items) != 1 or item.data != 'bare':
        name = item.children[0]
        _fail(ListingSyntaxError, 'expected a single value', text, name)
    token = item.children[0]
    if choices is not None and token.value not in choices:
        _fail(UnknownValue, 'unknown value', text, token)
    return token


def _conditions(text, items):
    seen = {}
    for item in items:
        name = item.children[0]
        if item.data != 'condition':
            _fail(ListingSyntaxError, 'expected attribute=value', text, name)
        attribute = name.value.lower()
        if attribute not in ATTRIBUTES:
            _fail(UnknownAttribute, 'unknown attribute', text, name)
        if attribute in seen:
            _fail(DuplicateKey, 'attribute repeated', text, name)
        values = item.children[1].children
        for token in values:
            if token.value not in ATTRIBUTES[attribute]:
                _fail(UnknownValue, 'unknown value', text, token)
        seen[attribute] = [t.value for t in values]
    return conditions(seen)


def _agent(token):
    return int(token.value) if token.value.isdigit() else token.value


def parse_norm(text):
    """
    Parse a norm listing. Raises a `normsim.base.ListingError` subclass
    naming the offending token and its byte offset.
    """
    found = _pairs(text, NORM_KEYS)
    norm_type = _bare(text, found['norm type'],
                      [t.value for t in NormType])
    subject = _bare(text, found['subject'], ROLES)
    object_ = _bare(text, found['object'], ROLES)
    return Norm(NormType(norm_type.value),
                subject.value,
                object_.value,
                _conditions(text, found['antecedent']),
                _conditions(text, found['consequent']))


def parse_normative_info(text):
    """
    Parse a normative-information listing. Sender and receiver are agent
    ids when numeric and role labels (e.g. ``Observer_Agent``) otherwise.
    """
    found = _pairs(text, INFO_KEYS)
    sender = _bare(text, found['sender'], None)
    receiver = _bare(text, found['receiver'], None)
    if _agent(sender) == _agent(receiver):
        _fail(UnknownValue, 'receiver equals sender', text, receiver)
    info_type = _bare(text, found['info type'], [t.value for t in InfoType])
    consequent = _bare(text, found['consequent'],
                       [t.value for t in InfoConsequent])
    return NormativeInfo(_agent(sender),
                         _agent(receiver),
                         InfoType(info_type.value),
                         _conditions(text, found['antecedent']),
                         InfoConsequent(consequent.value))


#
# Serializing

def _format_conditions(conds):
    parts = []
    for c in conds:
        values = c.values()
        if len(values) == 1:
            parts.append('%s=%s' % (c.attribute, values[0]))
        else:
            parts.append('%s=[%s]' % (c.attribute, ', '.join(values)))
    return '{%s}' % ', '.join(parts)


def _format(pairs):
    return ',\n'.join('%-11s = %s' % pair for pair in pairs)


def serialize_norm(norm):
    return _format([
        ('norm type', '{%s}' % norm.norm_type.value),
        ('subject', '{%s}' % norm.subject),
        ('object', '{%s}' % norm.object),
        ('antecedent', _format_conditions(norm.antecedent)),
        ('consequent', _format_conditions(norm.consequent)),
    ])


def serialize_normative_info(info):
    return _format([
        ('sender', '{%s}' % info.sender),
        ('receiver', '{%s}' % info.receiver),
        ('info type', '{%s}' % info.info_type.value),
        ('antecedent', _format_conditions(info.antecedent)),
        ('consequent', '{%s}' % info.consequent.value),
    ])


#
# Evaluation

def evaluate_norm(norm, view):
    """
    Evaluate *norm* for one agent on one step. *view* maps attribute names
    to value names; when the norm names ``obs_health`` the view must carry
    the observer's perceived health, not the actual one.

    A prohibition is violated on a step where antecedent and consequent both
    hold and satisfied on a step where only the antecedent holds. A
    commitment is the other way round.
    """
    for c in norm.antecedent + norm.consequent:
        if c.attribute not in view:
            raise MissingAttribute(
                'view has no value for %s' % c.attribute)
    if not all(c.holds(view) for c in norm.antecedent):
        return NormOutcome.INACTIVE
    holds = all(c.holds(view) for c in norm.consequent)
    if norm.norm_type is NormType.PROHIBITION:
        holds = not holds
    return NormOutcome.SATISFIED if holds else NormOutcome.VIOLATED


#
# Built-in norms

PROHIBITION_LISTING = u'''\
norm type   = {Prohibition},
subject     = {Infected_Agent},
object      = {Healthy_Agent},
antecedent  = {obs_health=[MILD, CRITICAL]},
consequent  = {loc=[PARK, CAFE, CLINIC]}'''

ISOLATION_LISTING = u'''\
norm type   = {Commitment},
subject     = {Infected_Agent},
object      = {Healthy_Agent},
antecedent  = {actual_health=[MILD, CRITICAL]},
consequent  = {loc=[HOME]}'''

VACCINATION_LISTING = u'''\
norm type   = {Commitment},
subject     = {Alive_Agent},
object      = {Other_Agent},
antecedent  = {vaccinated=FALSE;
               actual_health=[HEALTHY,
               ASYMPTOMATIC, MILD, CRITICAL]},
consequent  = {loc=[CLINIC]}'''

PROHIBITION = parse_norm(PROHIBITION_LISTING)
ISOLATION = parse_norm(ISOLATION_LISTING)
VACCINATION = parse_norm(VACCINATION_LISTING)

_blank_line = re.compile(r'\n[ \t\r]*\n')


def load_norms(path):
    """
    Read the enforced norms from *path*: one listing per block, blocks
    separated by blank lines, UTF-8. Replaces the built-in prohibition.
    """
    try:
        with open(path, 'rb') as f:
            text = f.read().decode('utf-8')
    except (IOError, OSError, UnicodeDecodeError) as e:
        raise ConfigError('cannot read norms file %s: %s' % (path, e))
    blocks = [b for b in _blank_line.split(text) if b.strip()]
    if not blocks:
        raise ConfigError('norms file %s holds no listing' % path)
    norms = tuple(parse_norm(b) for b in blocks)
    log.warning('%d norm(s) from %s replace the built-in prohibition',
                len(norms), path)
    return norms


def default_norms():
    return (PROHIBITION,)
