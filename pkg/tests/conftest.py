import collections
import os
import sys

import numpy as np
import pytest

sys.path.insert(0,
                os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
                )

import normsim.config  # noqa
import normsim.learning  # noqa
from normsim.places import ActionKind  # noqa


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='run desk-scale simulations')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip)


class Draws(object):
    """
    Stands in for a numpy Generator, replaying fixed uniforms from
    `random` and fixed values from `integers`.
    """

    def __init__(self, uniforms=(), integers=()):
        self.uniforms = collections.deque(uniforms)
        self.ints = collections.deque(integers)

    def random(self):
        return self.uniforms.popleft()

    def integers(self, high):
        value = self.ints.popleft()
        assert 0 <= value < high
        return value


class Scripted(object):
    """A policy choosing actions from the state alone and recording updates"""

    def __init__(self, choose=None):
        self.choose = choose or (lambda state: ActionKind.STAY_HOME)
        self.advice = []
        self.outcomes = []

    def act(self, state, rng):
        return self.choose(state)

    def advise(self, info, kappa):
        self.advice.append((info, kappa))

    def learn(self, state, action, outcome, next_state):
        self.outcomes.append(outcome)
        return normsim.learning.assemble_reward(outcome)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def draws():
    return Draws


@pytest.fixture
def scripted():
    return Scripted


@pytest.fixture
def tiny_config(tmpdir):
    """A config small enough to train and record in well under a second"""
    Config = collections.namedtuple('Config', ['config', 'out'])
    out = str(tmpdir.join('runs'))
    config = normsim.config.ExperimentConfig(overrides={
        ('experiment', 'societies'): 'nest',
        ('experiment', 'seeds'): 2,
        ('experiment', 'out'): out,
        ('experiment', 'rolling_window'): 5,
        ('experiment', 'convergence_window'): 10,
        ('world', 'population'): 10,
        ('world', 'episode_steps'): 20,
        ('learning', 'training_steps'): 50,
    })
    yield Config(config, out)
