"""
Shared tabular Q-learning with epsilon-greedy exploration and shaping
rewards drawn from normative information.

Every agent reads and writes one `QTable` and one `PotentialTable`.
"""
import collections
import functools
import itertools
import logging

import numpy as np
import pandas as pd

from normsim.base import ConfigError
from normsim.base import OutputError
from normsim.disease import PERCEIVED
from normsim.disease import HealthState
from normsim.norms import InfoConsequent
from normsim.places import ACTIONS
from normsim.places import GOALS
from normsim.places import ActionKind
from normsim.places import GoalKind
from normsim.places import PlaceKind

log = logging.getLogger(__name__)

SNAPSHOT_COLUMNS = ['symptom', 'vaccinated', 'quarantined', 'goal',
                    'location', 'action', 'value']


class StateKey(collections.namedtuple(
        'StateKey',
        ['symptom', 'vaccinated', 'quarantined', 'goal', 'location'])):
    """
    What an agent knows about itself when it picks an action: its own
    health level, whether it is vaccinated or quarantined, its goal for the
    step and where it currently is.
    """
    __slots__ = ()

    @property
    def index(self):
        return _state_index[self]

    def realized_view(self, action):
        """
        Attribute view of taking *action* in this state, used to match
        normative information against (state, action) pairs.
        """
        return {
            'obs_health': self.symptom.value,
            'actual_health': self.symptom.value,
            'loc': action.destination.value,
            'vaccinated': 'TRUE' if self.vaccinated else 'FALSE',
        }


STATES = tuple(
    StateKey(*fields) for fields in itertools.product(
        PERCEIVED, (False, True), (False, True), GOALS, tuple(PlaceKind)))

_state_index = dict((s, i) for i, s in enumerate(STATES))


class LearnParams(object):
    def __init__(self,
                 learning_rate=0.001,
                 discount=0.9,
                 kappa_hint=0.3,
                 kappa_tell=0.5,
                 epsilon=0.1,
                 training_steps=100000,
                 shaping=True,
                 eval_epsilon=0.0,
                 warm_start=None):
        """
        *shaping* switches potential-based shaping off for every society
        when False. *eval_epsilon* is the exploration rate of the recorded
        evaluation episode; the default 0 records the greedy policy.
        *warm_start* names a Q-table snapshot to start training from.
        """
        self.learning_rate = learning_rate
        self.discount = discount
        self.kappa_hint = kappa_hint
        self.kappa_tell = kappa_tell
        self.epsilon = epsilon
        self.training_steps = training_steps
        self.shaping = shaping
        self.eval_epsilon = eval_epsilon
        self.warm_start = warm_start or None

        if not 0.0 < learning_rate <= 1.0:
            raise ConfigError(
                'learning_rate must be in (0, 1], got %r' % learning_rate)
        if not 0.0 <= discount < 1.0:
            raise ConfigError(
                'discount must be in [0, 1), got %r' % discount)
        for name in ('kappa_hint', 'kappa_tell', 'epsilon', 'eval_epsilon'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(
                    '%s must be in [0, 1], got %r' % (name, value))
        if training_steps < 0:
            raise ConfigError(
                'training_steps must not be negative, got %r'
                % training_steps)


class RewardContribution(collections.namedtuple(
        'RewardContribution',
        ['extrinsic', 'intrinsic', 'shaping', 'quarantine', 'advice'])):
    """
    Reward itemised by source. *quarantine* and *advice* carry the side
    effects of an interpreted communication: whether it forces the receiver
    home, and the (NormativeInfo, kappa) pair to write into the potential
    table.
    """
    __slots__ = ()

    def __new__(klass, extrinsic=0.0, intrinsic=0.0, shaping=0.0,
                quarantine=False, advice=None):
        return super(RewardContribution, klass).__new__(
            klass, extrinsic, intrinsic, shaping, quarantine, advice)

    @property
    def total(self):
        return self.extrinsic + self.intrinsic + self.shaping


class AgentOutcome(collections.namedtuple(
        'AgentOutcome',
        ['deceased', 'sanction', 'goal_satisfied', 'self_norm',
         'other_norm', 'affect', 'shaping'])):
    """
    Everything that happened to one agent in one step, already reduced to
    the per-step caps: *self_norm*, *other_norm* and *affect* are signed
    reward values, *goal_satisfied* is None when the agent had no goal.
    """
    __slots__ = ()

    def __new__(klass, deceased=False, sanction=0.0, goal_satisfied=None,
                self_norm=0.0, other_norm=0.0, affect=0.0, shaping=0.0):
        return super(AgentOutcome, klass).__new__(
            klass, deceased, sanction, goal_satisfied, self_norm,
            other_norm, affect, shaping)


DECEASED_REWARD = -2.0
SANCTION_REWARD = -1.0
GOAL_REWARD = 1.0


class QTable(object):
    def __init__(self, values=None):
        if values is None:
            values = np.zeros((len(STATES), len(ACTIONS)))
        self.values = values

    def get(self, state, action):
        return float(self.values[state.index, action.index])

    def set(self, state, action, value):
        self.values[state.index, action.index] = value

    def row(self, state):
        return self.values[state.index]

    def max(self, state):
        """Value of the best action open to an agent in *state*"""
        if state.quarantined:
            return self.get(state, ActionKind.STAY_HOME)
        return float(self.values[state.index].max())

    def greedy(self, state):
        """Greedy action at *state*, first maximum on ties"""
        if state.quarantined:
            return ActionKind.STAY_HOME
        return ACTIONS[int(np.argmax(self.values[state.index]))]

    def export(self, path):
        """
        Write the table as a flat CSV with one row per (state, action).
        """
        rows = []
        for state in STATES:
            for action in ACTIONS:
                rows.append([state.symptom.value,
                             int(state.vaccinated),
                             int(state.quarantined),
                             state.goal.value,
                             state.location.value,
                             action.value,
                             self.get(state, action)])
        frame = pd.DataFrame(rows, columns=SNAPSHOT_COLUMNS)
        try:
            frame.to_csv(path, index=False, float_format='%.17g')
        except (IOError, OSError) as e:
            raise OutputError(path, e)

    @classmethod
    def load(klass, path):
        """
        Read a snapshot written by `export`. Missing rows read as 0.
        """
        try:
            frame = pd.read_csv(path, float_precision='round_trip')
        except (IOError, OSError) as e:
            raise OutputError(path, e)
        missing = set(SNAPSHOT_COLUMNS).difference(frame.columns)
        if missing:
            raise ConfigError('%s lacks column(s) %s'
                              % (path, ', '.join(sorted(missing))))
        table = klass()
        for row in frame.itertuples(index=False):
            state = StateKey(HealthState(row.symptom),
                             bool(row.vaccinated),
                             bool(row.quarantined),
                             GoalKind(row.goal),
                             PlaceKind(row.location))
            table.set(state, ActionKind(row.action), float(row.value))
        log.info('loaded Q-table snapshot from %s', path)
        return table


class PotentialTable(object):
    """
    Anticipated sanction value per (state, action), with the certainty
    kappa of the communication kind that last wrote each entry.
    """

    def __init__(self):
        self.phi = np.zeros((len(STATES), len(ACTIONS)))
        self.kappa = np.zeros((len(STATES), len(ACTIONS)))

    def get(self, state, action):
        if state is None:
            return 0.0
        return float(self.phi[state.index, action.index])

    def kappa_at(self, state, action):
        if state is None:
            return 0.0
        return float(self.kappa[state.index, action.index])

    def payoff(self, state):
        """The possible payoff kappa * phi of every action in *state*"""
        return self.phi[state.index] * self.kappa[state.index]

    def write(self, mask, value, kappa):
        self.phi[mask] = value
        self.kappa[mask] = kappa

    @property
    def empty(self):
        return not self.phi.any()


@functools.lru_cache(maxsize=None)
def _matching(antecedent):
    mask = np.zeros((len(STATES), len(ACTIONS)), dtype=bool)
    for state in STATES:
        for action in ACTIONS:
            view = state.realized_view(action)
            if all(c.holds(view) for c in antecedent):
                mask[state.index, action.index] = True
    return mask


def q_update(q, s, a, r, s_next, params=None):
    """
    Move Q(s, a) toward r + discount * max Q(s_next, .). A *s_next* of None
    marks a terminal transition. Returns the new Q(s, a).
    """
    params = params or _default_params
    target = r
    if s_next is not None:
        target += params.discount * q.max(s_next)
    old = q.get(s, a)
    new = old + params.learning_rate * (target - old)
    q.set(s, a, new)
    return new


def shaping_reward(phi, s, a, s_next, a_next, gamma, kappa):
    return gamma * phi.get(s_next, a_next) * kappa - phi.get(s, a)


def update_potential(phi, info, kappa):
    """
    Write -1 (PUNISHMENT) or +1 (REWARD) into every (state, action) pair
    whose realised view matches *info*'s antecedent. *kappa* is recorded
    alongside, it is applied when the shaping reward is computed.
    """
    mask = _matching(tuple(info.antecedent))
    if mask.any():
        value = -1.0 if info.consequent is InfoConsequent.PUNISHMENT else 1.0
        phi.write(mask, value, kappa)
    return phi


def select_action(q, s, epsilon, rng, bias=None):
    """
    Epsilon-greedy choice over Q(s, .) (plus *bias* when given), ties
    broken uniformly at random.
    """
    if rng.random() < epsilon:
        return ACTIONS[int(rng.integers(len(ACTIONS)))]
    values = q.row(s)
    if bias is not None:
        values = values + bias
    best = np.flatnonzero(values == values.max())
    if len(best) == 1:
        return ACTIONS[int(best[0])]
    return ACTIONS[int(best[rng.integers(len(best))])]


def assemble_reward(outcome):
    extrinsic = outcome.sanction + outcome.other_norm
    if outcome.deceased:
        extrinsic += DECEASED_REWARD
    intrinsic = outcome.self_norm + outcome.affect
    if outcome.goal_satisfied is not None:
        intrinsic += GOAL_REWARD if outcome.goal_satisfied else -GOAL_REWARD
    return RewardContribution(extrinsic, intrinsic, outcome.shaping)


class Learner(object):
    """
    The policy every agent shares. With shaping active it acts greedily on
    Q plus the kappa-weighted potential, so advice steers behaviour as soon
    as it arrives, and adds the shaping reward to every learning update.
    """

    def __init__(self, params, profile=None, q=None, phi=None):
        self.params = params
        self.q = q if q is not None else QTable()
        self.phi = phi if phi is not None else PotentialTable()
        self.shaping = bool(params.shaping and profile is not None
                            and profile.shaping)
        self.epsilon = params.epsilon

    def act(self, state, rng):
        bias = self.phi.payoff(state) if self.shaping else None
        return select_action(self.q, state, self.epsilon, rng, bias)

    def advise(self, info, kappa):
        if self.shaping:
            update_potential(self.phi, info, kappa)

    def learn(self, state, action, outcome, next_state):
        """
        Apply one transition. *next_state* is None when the agent died.
        Returns the assembled `RewardContribution`.
        """
        if self.shaping:
            a_next = None
            kappa = 0.0
            if next_state is not None:
                a_next = self.q.greedy(next_state)
                kappa = self.phi.kappa_at(next_state, a_next)
            outcome = outcome._replace(shaping=shaping_reward(
                self.phi, state, action, next_state, a_next,
                self.params.discount, kappa))
        reward = assemble_reward(outcome)
        q_update(self.q, state, action, reward.total, next_state, self.params)
        return reward


_default_params = LearnParams()
