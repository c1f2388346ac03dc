import enum
import logging

import numpy as np

from normsim.base import ConfigError
from normsim.base import DeceasedInput

log = logging.getLogger(__name__)


class HealthState(enum.Enum):
    HEALTHY = 'HEALTHY'
    ASYMPTOMATIC = 'ASYMPTOMATIC'
    MILD = 'MILD'
    CRITICAL = 'CRITICAL'
    DECEASED = 'DECEASED'

    @property
    def infectious(self):
        return self in INFECTIOUS

    @property
    def self_assessed(self):
        """Health level an agent acts on about itself; silent infection reads
        as mild"""
        if self is HealthState.ASYMPTOMATIC:
            return HealthState.MILD
        return self


INFECTIOUS = frozenset([HealthState.ASYMPTOMATIC,
                        HealthState.MILD,
                        HealthState.CRITICAL])

# what an observer can believe about someone else
PERCEIVED = (HealthState.HEALTHY, HealthState.MILD, HealthState.CRITICAL)

NEXT = {
    HealthState.ASYMPTOMATIC: HealthState.MILD,
    HealthState.MILD: HealthState.CRITICAL,
    HealthState.CRITICAL: HealthState.DECEASED,
}


class DiseaseParams(object):
    def __init__(self,
                 infection_prob=0.8,
                 vaccine_multiplier=0.5,
                 home_divisor=2.0,
                 progress_base=None,
                 recover_base=None):
        """
        *vaccine_multiplier* is the factor applied to infection and
        progression for vaccinated agents; *home_divisor* divides
        progression and multiplies recovery for agents resting at home.

        *progress_base* and *recover_base* map each infected state to its
        base probability of moving to the next state, resp. back to Healthy.
        """
        self.infection_prob = infection_prob
        self.vaccine_multiplier = vaccine_multiplier
        self.home_divisor = home_divisor
        self.progress_base = {
            HealthState.ASYMPTOMATIC: 0.1,
            HealthState.MILD: 0.01,
            HealthState.CRITICAL: 0.01,
        }
        self.progress_base.update(progress_base or {})
        self.recover_base = {
            HealthState.ASYMPTOMATIC: 0.1,
            HealthState.MILD: 0.05,
            HealthState.CRITICAL: 0.01,
        }
        self.recover_base.update(recover_base or {})
        self._validate()

    def _validate(self):
        if not 0.0 <= self.infection_prob <= 1.0:
            raise ConfigError(
                'infection_prob must be in [0, 1], got %r'
                % self.infection_prob)
        if not 0.0 < self.vaccine_multiplier <= 1.0:
            raise ConfigError(
                'vaccine_multiplier must be in (0, 1], got %r'
                % self.vaccine_multiplier)
        if self.home_divisor < 1.0:
            raise ConfigError(
                'home_divisor must be at least 1, got %r'
                % self.home_divisor)
        for state in NEXT:
            for vaccinated in (False, True):
                for at_home in (False, True):
                    progress, recover, stay = self.transition(
                        state, vaccinated, at_home)
                    if min(progress, recover, stay) < 0.0 \
                            or max(progress, recover) > 1.0:
                        raise ConfigError(
                            '%s transition probabilities do not form a '
                            'distribution (progress %r, recover %r)'
                            % (state.name, progress, recover))

    def alpha(self, vaccinated):
        return self.vaccine_multiplier if vaccinated else 1.0

    def beta(self, at_home):
        return self.home_divisor if at_home else 1.0

    def transition(self, state, vaccinated, at_home):
        """
        Returns the effective (progress, recover, stay) probabilities of
        an infected *state*.
        """
        progress = self.progress_base[state] * self.alpha(vaccinated) \
            / self.beta(at_home)
        recover = self.recover_base[state] * self.beta(at_home)
        return progress, recover, 1.0 - progress - recover


class ObservationModel(object):
    """
    How an observer perceives someone else's health. *rows* maps each
    non-deceased actual state to probabilities over `PERCEIVED`.
    """

    DEFAULT_ROWS = {
        HealthState.HEALTHY: (0.8, 0.1, 0.1),
        HealthState.ASYMPTOMATIC: (0.5, 0.5, 0.0),
        HealthState.MILD: (0.3, 0.6, 0.1),
        HealthState.CRITICAL: (0.1, 0.3, 0.6),
    }

    def __init__(self, rows=None):
        merged = dict(self.DEFAULT_ROWS)
        merged.update(rows or {})
        self.rows = {}
        self._cumulative = {}
        for state, row in merged.items():
            row = np.asarray(row, dtype=float)
            if row.shape != (len(PERCEIVED),) or (row < 0).any() \
                    or abs(row.sum() - 1.0) > 1e-9:
                raise ConfigError(
                    'observation row for %s must be %d probabilities '
                    'summing to 1, got %r'
                    % (state.name, len(PERCEIVED), tuple(row)))
            self.rows[state] = row
            self._cumulative[state] = np.cumsum(row)

    def sample(self, rng, actual):
        index = int(np.searchsorted(self._cumulative[actual],
                                    rng.random(), side='right'))
        return PERCEIVED[min(index, len(PERCEIVED) - 1)]


def try_infect(rng, target_vaccinated, params):
    """
    One contact between a Healthy target and an infectious agent. Returns
    True when the target catches the disease.
    """
    p = params.infection_prob * params.alpha(target_vaccinated)
    return bool(rng.random() < p)


def progress(rng, state, vaccinated, at_home, params):
    """
    Advance an agent's health by one step. Progression is sampled first and
    recovery from the residual mass; recovery returns the agent to Healthy.
    """
    if state is HealthState.DECEASED:
        raise DeceasedInput('cannot progress a deceased agent')
    if state is HealthState.HEALTHY:
        return state
    p_progress, p_recover, _ = params.transition(state, vaccinated, at_home)
    u = rng.random()
    if u < p_progress:
        return NEXT[state]
    if u < p_progress + p_recover:
        return HealthState.HEALTHY
    return state


def observe_health(rng, actual, model=None):
    """
    Sample how an observer perceives an agent whose health is *actual*.
    """
    if actual is HealthState.DECEASED:
        raise DeceasedInput('a deceased agent cannot be observed')
    return (model or _default_model).sample(rng, actual)


_default_model = ObservationModel()
