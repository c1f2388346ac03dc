"""
Social communication: who reacts to a perceived norm outcome, with what kind
of communication, and what the reaction is worth to its receiver and to the
agents witnessing it.
"""
import collections
import enum
import logging

from normsim.base import ConfigError
from normsim.base import NoActiveChannels
from normsim.disease import HealthState
from normsim.learning import SANCTION_REWARD
from normsim.learning import RewardContribution
from normsim.norms import InfoConsequent
from normsim.norms import InfoType
from normsim.norms import NormativeInfo
from normsim.norms import conditions

log = logging.getLogger(__name__)

WITNESS_REWARD = 0.5


class CommKind(enum.Enum):
    SANCTION = 'Sanction'
    TELL = 'Tell'
    EMOTE = 'Emote'
    HINT = 'Hint'
    NONE = 'None'


COMM_KINDS = tuple(CommKind)
ACTIVE_KINDS = (CommKind.SANCTION, CommKind.TELL, CommKind.EMOTE,
                CommKind.HINT)


class Role(enum.Enum):
    ACTOR = 'actor'
    WITNESS = 'witness'


Gates = collections.namedtuple('Gates', ['mild', 'critical', 'approval'])

DEFAULT_GATES = Gates(0.5, 0.8, 0.5)


class SocietyProfile(object):
    def __init__(self,
                 name,
                 mixture,
                 weight_immediate=0.0,
                 weight_potential=0.0,
                 kappa=None,
                 gates=DEFAULT_GATES):
        """
        *mixture* is a sequence of five probabilities in `COMM_KINDS` order
        (Sanction, Tell, Emote, Hint, None) or a mapping from `CommKind`.

        *kappa* maps Tell and Hint to the certainty attached to the advice
        they carry.

        *weight_immediate* splits into a sanction weight (up to 1) and an
        emotion weight (the remainder). *weight_potential* switches reward
        shaping on when positive.
        """
        if isinstance(mixture, dict):
            mixture = [mixture.get(kind, 0.0) for kind in COMM_KINDS]
        mixture = tuple(float(p) for p in mixture)
        if len(mixture) != len(COMM_KINDS):
            raise ConfigError(
                '%s: mixture needs %d probabilities, got %d'
                % (name, len(COMM_KINDS), len(mixture)))
        if min(mixture) < 0.0 or abs(sum(mixture) - 1.0) > 1e-9:
            raise ConfigError(
                '%s: mixture %r must be non-negative and sum to 1'
                % (name, mixture))
        if weight_immediate < 0.0 or weight_potential < 0.0:
            raise ConfigError('%s: weights must not be negative' % name)
        gates = Gates(*gates)
        for p in gates:
            if not 0.0 <= p <= 1.0:
                raise ConfigError(
                    '%s: gate probabilities must be in [0, 1], got %r'
                    % (name, tuple(gates)))

        self.name = name
        self.mixture = collections.OrderedDict(zip(COMM_KINDS, mixture))
        self.weight_immediate = weight_immediate
        self.weight_potential = weight_potential
        self.kappa = {CommKind.TELL: 0.5, CommKind.HINT: 0.3}
        self.kappa.update(kappa or {})
        self.gates = gates

    def __repr__(self):
        return '<SocietyProfile %s>' % self.name

    @property
    def sanction_weight(self):
        return min(self.weight_immediate, 1.0)

    @property
    def emotion_weight(self):
        return max(self.weight_immediate - 1.0, 0.0)

    @property
    def active(self):
        return any(self.mixture[kind] > 0.0 for kind in ACTIVE_KINDS)

    @property
    def shaping(self):
        return self.weight_potential > 0.0


# Sanction, Tell, Emote, Hint, None; wI; wP
PRESETS = collections.OrderedDict([
    ('primitive', ((0.0, 0.0, 0.0, 0.0, 1.0), 0.0, 0.0)),
    ('penalty', ((0.38, 0.0, 0.0, 0.0, 0.62), 1.0, 0.0)),
    ('tell', ((0.20, 0.18, 0.0, 0.0, 0.62), 1.0, 0.5)),
    ('emote', ((0.20, 0.0, 0.18, 0.0, 0.62), 1.5, 0.0)),
    ('nest', ((0.20, 0.0, 0.0, 0.18, 0.62), 1.5, 0.3)),
])


def preset(name, kappa_tell=0.5, kappa_hint=0.3, **overrides):
    """
    Build the named society. *overrides* replace any `SocietyProfile`
    argument. The Tell and Nest potential weights follow *kappa_tell* and
    *kappa_hint* unless overridden.
    """
    key = name.lower()
    if key not in PRESETS:
        raise ConfigError('unknown society %r, expected one of %s'
                          % (name, ', '.join(PRESETS)))
    mixture, weight_immediate, weight_potential = PRESETS[key]
    if key == 'tell':
        weight_potential = kappa_tell
    elif key == 'nest':
        weight_potential = kappa_hint
    kwargs = {
        'mixture': mixture,
        'weight_immediate': weight_immediate,
        'weight_potential': weight_potential,
        'kappa': {CommKind.TELL: kappa_tell, CommKind.HINT: kappa_hint},
    }
    kwargs.update(overrides)
    return SocietyProfile(key, **kwargs)


def gate_by_severity(rng, perceived, in_public, profile=None):
    """
    Whether an observer reacts to a perceived violation. Only visible
    symptoms in a public place can open the gate; no draw is made otherwise.
    """
    gates = profile.gates if profile is not None else DEFAULT_GATES
    if not in_public:
        return False
    if perceived is HealthState.MILD:
        p = gates.mild
    elif perceived is HealthState.CRITICAL:
        p = gates.critical
    else:
        return False
    return bool(rng.random() < p)


def gate_approval(rng, in_public, profile=None):
    """Whether an observer reacts to a perceived norm satisfaction"""
    gates = profile.gates if profile is not None else DEFAULT_GATES
    if not in_public:
        return False
    return bool(rng.random() < gates.approval)


def select_comm_kind(rng, profile):
    """
    Draw the kind of reaction from *profile*'s mixture renormalised over the
    active kinds.
    """
    weights = [profile.mixture[kind] for kind in ACTIVE_KINDS]
    total = sum(weights)
    if total <= 0.0:
        raise NoActiveChannels(
            'society %s has no active communication kind' % profile.name)
    u = rng.random() * total
    acc = 0.0
    for kind, w in zip(ACTIVE_KINDS, weights):
        acc += w
        if u < acc:
            return kind
    # rounding at the upper edge
    return [k for k, w in zip(ACTIVE_KINDS, weights) if w > 0.0][-1]


class CommEvent(collections.namedtuple(
        'CommEvent',
        ['sender', 'receiver', 'kind', 'info', 'magnitude', 'valence',
         'witnesses'])):
    """
    A delivered communication. *info* is the `NormativeInfo` of a Tell or
    Hint, *magnitude* the sanction value of a Sanction and *valence* +1
    (approving) or -1 (disapproving).
    """
    __slots__ = ()

    @property
    def approving(self):
        return self.valence > 0


def matched_conditions(view, norm=None):
    """
    The attribute values of *view* referenced by *norm*, as singleton
    conditions. Without a norm every attribute of the view is used.
    """
    if norm is None:
        attributes = list(view)
    else:
        attributes = [c.attribute for c in norm.antecedent + norm.consequent]
    return conditions(dict((a, view[a]) for a in attributes))


def build_event(kind, sender, receiver, view, norm=None, valence=-1,
                witnesses=()):
    """
    Build the event *sender* delivers to *receiver* about the behaviour
    described by *view*. Returns None for `CommKind.NONE`.
    """
    if kind is CommKind.NONE:
        return None
    valence = 1 if valence > 0 else -1
    info = None
    magnitude = 0.0
    if kind is CommKind.SANCTION:
        magnitude = valence * -SANCTION_REWARD
    elif kind in (CommKind.TELL, CommKind.HINT):
        info = NormativeInfo(
            sender, receiver,
            InfoType.MESSAGE if kind is CommKind.TELL else InfoType.HINT,
            matched_conditions(view, norm),
            InfoConsequent.REWARD if valence > 0
            else InfoConsequent.PUNISHMENT)
    return CommEvent(sender, receiver, kind, info, magnitude, valence,
                     frozenset(witnesses))


def interpret(event, role, profile):
    """
    What *event* is worth to an agent in *role* under *profile*.

    The actor of a Sanction gets the weighted sanction and, when
    disapproving, a quarantine. Emotes and hints carry an immediate
    emotion. Tells and hints carry advice for the potential table, which
    witnesses share; witnesses also get the vicarious reward of seeing
    another agent's behaviour judged.
    """
    if event is None or event.kind is CommKind.NONE:
        return RewardContribution()
    advice = None
    if event.info is not None:
        advice = (event.info, profile.kappa[event.kind])
    if role is Role.WITNESS:
        return RewardContribution(extrinsic=WITNESS_REWARD * event.valence,
                                  advice=advice)
    if event.kind is CommKind.SANCTION:
        return RewardContribution(
            extrinsic=event.magnitude * profile.sanction_weight,
            quarantine=event.magnitude < 0)
    if event.kind in (CommKind.EMOTE, CommKind.HINT):
        return RewardContribution(
            intrinsic=event.valence * profile.emotion_weight, advice=advice)
    return RewardContribution(advice=advice)
