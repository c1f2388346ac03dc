import collections

import numpy as np
import pytest

import normsim.base
from normsim import learning
from normsim import social
from normsim import world
from normsim.disease import DiseaseParams
from normsim.disease import HealthState
from normsim.disease import ObservationModel
from normsim.places import ACTIONS
from normsim.places import GOALS
from normsim.places import ActionKind
from normsim.places import CAFE
from normsim.places import GoalKind
from normsim.places import PARK
from normsim.places import PlaceKind
from normsim.places import goal_satisfied

SEES_CRITICAL = ObservationModel(dict(
    (state, (0.0, 0.0, 1.0)) for state in (
        HealthState.HEALTHY, HealthState.ASYMPTOMATIC, HealthState.MILD,
        HealthState.CRITICAL)))


def _world(agents, **kwargs):
    config = world.WorldConfig(population=len(agents),
                               **kwargs.pop('config', {}))
    return world.World(config, agents, **kwargs)


class TestInit(object):
    @pytest.mark.parametrize('population, fraction, want', [
        (100, 0.30, 30),
        (100, 0.0, 0),
        (10, 0.30, 3),
        (5, 0.30, 2),
        (4, 1.0, 4),
    ])
    def test_infected_count(self, rng, population, fraction, want):
        config = world.WorldConfig(population=population,
                                   initial_infected_fraction=fraction)
        assert config.initial_infected == want
        w = world.init_world(config, rng)
        counts = w.counts()
        assert counts[HealthState.ASYMPTOMATIC] == want
        assert counts[HealthState.HEALTHY] == population - want

    def test_everyone_home_with_goal(self, rng):
        w = world.init_world(world.WorldConfig(), rng)
        for agent in w.agents:
            assert agent.location.kind is PlaceKind.HOME
            assert agent.location.owner == agent.id
            assert agent.goal in GOALS
            assert not agent.vaccinated
            assert not agent.quarantined

    def test_seeded(self):
        config = world.WorldConfig()
        a = world.init_world(config, np.random.default_rng(1))
        b = world.init_world(config, np.random.default_rng(1))
        assert [x.health for x in a.agents] == [x.health for x in b.agents]
        assert [x.goal for x in a.agents] == [x.goal for x in b.agents]

    @pytest.mark.parametrize('kwargs', [
        {'population': 1},
        {'initial_infected_fraction': 1.5},
        {'episode_steps': 0},
        {'p_interact': -0.1},
        {'goals': ()},
        {'goals': ('rest', 'fly')},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(normsim.base.ConfigError):
            world.WorldConfig(**kwargs)


class TestGoals(object):
    def test_vaccinated_never_draws_vaccination(self, rng):
        agent = world.Agent(0, vaccinated=True)
        for _ in range(1000):
            assert world.assign_goal(rng, agent) \
                is not GoalKind.BE_VACCINATED

    def test_uniform(self, rng):
        agent = world.Agent(0)
        n = 40000
        seen = collections.Counter(
            world.assign_goal(rng, agent) for _ in range(n))
        for goal in GOALS:
            assert abs(seen[goal] / float(n) - 0.25) < 0.01

    def test_nothing_left(self, draws):
        agent = world.Agent(0, vaccinated=True)
        assert world.assign_goal(draws(), agent,
                                 (GoalKind.BE_VACCINATED,)) is None

    def test_satisfaction_table(self):
        for goal, satisfying in zip(GOALS, ACTIONS):
            for action in ACTIONS:
                assert goal_satisfied(goal, action) is (action is satisfying)


class TestContacts(object):
    def test_all_pairs(self, rng):
        agents = [world.Agent(i, location=CAFE) for i in range(3)]
        assert world.contacts(_world(agents), rng) == \
            [(0, 1), (0, 2), (1, 2)]

    def test_everyone_home(self, rng):
        agents = [world.Agent(i) for i in range(5)]
        assert world.contacts(_world(agents), rng) == []

    def test_separate_places(self, rng):
        agents = [world.Agent(0, location=CAFE),
                  world.Agent(1, location=PARK),
                  world.Agent(2, location=CAFE)]
        assert world.contacts(_world(agents), rng) == [(0, 2)]

    def test_deceased_excluded(self, rng):
        agents = [world.Agent(0, location=CAFE),
                  world.Agent(1, HealthState.DECEASED, location=CAFE)]
        assert world.contacts(_world(agents), rng) == []

    def test_interaction_probability(self, rng):
        agents = [world.Agent(i, location=PARK) for i in range(2)]
        w = _world(agents, config={'p_interact': 0.5})
        n = 20000
        met = sum(len(world.contacts(w, rng)) for _ in range(n))
        assert abs(met / float(n) - 0.5) < 0.015


class TestStep(object):
    def test_quarantine_forces_home(self, scripted):
        agents = [world.Agent(0, quarantine_remaining=2), world.Agent(1)]
        w = _world(agents)
        policy = scripted(lambda state: ActionKind.VISIT_PARK)
        report = w.step(policy)
        assert report.forced == [0]
        assert report.actions[0] is ActionKind.STAY_HOME
        assert report.actions[1] is ActionKind.VISIT_PARK
        assert agents[0].quarantine_remaining == 1
        assert agents[0].at_home

    def test_deceased_does_nothing(self, scripted):
        agents = [world.Agent(0, HealthState.DECEASED), world.Agent(1)]
        w = _world(agents)
        policy = scripted(lambda state: ActionKind.VISIT_CAFE)
        report = w.step(policy)
        assert list(report.actions) == [1]
        assert report.contacts == []
        assert len(policy.outcomes) == 1

    def test_clinic_vaccinates(self, scripted):
        agents = [world.Agent(0), world.Agent(1)]
        w = _world(agents)
        w.step(scripted(lambda state: ActionKind.VISIT_CLINIC))
        assert all(a.vaccinated for a in agents)

    def test_episode_done(self, scripted):
        w = _world([world.Agent(0), world.Agent(1)],
                   config={'episode_steps': 1})
        w.step(scripted())
        assert w.done
        with pytest.raises(normsim.base.EpisodeDone):
            w.step(scripted())

    @pytest.mark.parametrize('confirm, want', [
        (True, [0, 0, 3]),
        (False, [3, 3, 3]),
    ])
    def test_sanction_quarantines(self, scripted, confirm, want):
        profile = social.preset('penalty', gates=(1.0, 1.0, 0.0))
        agents = [world.Agent(0), world.Agent(1),
                  world.Agent(2, HealthState.MILD)]
        w = _world(agents, society=profile, observation=SEES_CRITICAL,
                   disease=DiseaseParams(infection_prob=0.0),
                   config={'quarantine_duration': 3,
                           'confirm_quarantine': confirm})
        policy = scripted(lambda state: ActionKind.VISIT_CAFE)
        report = w.step(policy)
        assert sorted((e.sender, e.receiver) for e in report.events) == \
            [(0, 1), (0, 2), (1, 0), (1, 2)]
        assert all(e.kind is social.CommKind.SANCTION for e in report.events)
        assert [a.quarantine_remaining for a in agents] == want

    def test_sanction_cap_and_witnesses(self, scripted):
        profile = social.preset('penalty', gates=(1.0, 1.0, 0.0))
        agents = [world.Agent(k) for k in range(4)]
        w = _world(agents, society=profile, observation=SEES_CRITICAL)
        policy = scripted(lambda state: ActionKind.VISIT_CAFE)
        report = w.step(policy)
        assert len(report.events) == 12
        everyone = frozenset(range(4))
        for event in report.events:
            assert event.witnesses == \
                everyone - set([event.sender, event.receiver])
        for outcome in policy.outcomes:
            # three sanctions of -1 each
            assert outcome.sanction == -2.0
            assert outcome.other_norm == -0.5

    def test_asymptomatic_acts_as_mild(self):
        agents = [world.Agent(0, HealthState.ASYMPTOMATIC), world.Agent(1)]
        w = _world(agents)
        assert w.state_of(agents[0]).symptom is HealthState.MILD
        assert w.state_of(agents[1]).symptom is HealthState.HEALTHY

    def test_home_hides_violations(self, scripted):
        profile = social.preset('penalty', gates=(1.0, 1.0, 1.0))
        agents = [world.Agent(0), world.Agent(1)]
        w = _world(agents, society=profile, observation=SEES_CRITICAL)
        report = w.step(scripted())
        assert report.events == []

    def test_tell_advises_policy(self, scripted):
        profile = social.preset(
            'tell', mixture=(0.0, 1.0, 0.0, 0.0, 0.0),
            gates=(1.0, 1.0, 0.0))
        agents = [world.Agent(0), world.Agent(1)]
        w = _world(agents, society=profile, observation=SEES_CRITICAL)
        policy = scripted(lambda state: ActionKind.VISIT_CAFE)
        w.step(policy)
        assert [kappa for _, kappa in policy.advice] == [0.5, 0.5]
        assert not any(a.quarantined for a in agents)

    def test_self_judgement(self, scripted):
        agents = [world.Agent(0, HealthState.MILD), world.Agent(1)]
        w = _world(agents, society=social.preset('emote'))

        def choose(state):
            if state.symptom is HealthState.MILD:
                return ActionKind.VISIT_CAFE
            return ActionKind.STAY_HOME

        policy = scripted(choose)
        w.step(policy)
        assert [o.self_norm for o in policy.outcomes] == [-0.5, 0.0]

    @staticmethod
    def _check_invariants(population, steps, seed):
        config = world.WorldConfig(population=population, episode_steps=steps)
        streams = world.Streams(seed)
        profile = social.preset('nest')
        w = world.init_world(config, streams.init, streams.goals,
                             society=profile, streams=streams)
        policy = learning.Learner(learning.LearnParams(epsilon=0.5), profile)
        dead = set()
        last = collections.Counter()
        while not w.done:
            report = w.step(policy)
            counts = w.counts()
            assert sum(counts.values()) == population
            assert report.public_quarantined == 0
            for agent in w.agents:
                if agent.id in dead:
                    assert agent.health is HealthState.DECEASED
                assert agent.quarantine_remaining <= 3
            dead.update(report.deaths)
            now = collections.Counter(
                deceased=counts[HealthState.DECEASED],
                vaccinated=sum(1 for a in w.agents if a.vaccinated),
                infections=w.cumulative_infections)
            for key in ('deceased', 'vaccinated', 'infections'):
                assert now[key] >= last[key]
            last = now
            for i, j in report.contacts:
                assert i < j
                assert w.agents[i].location == w.agents[j].location
                assert w.agents[i].location.public
        assert w.t == steps

    def test_invariants(self):
        self._check_invariants(30, 60, 11)

    @pytest.mark.slow
    @pytest.mark.parametrize('seed', range(5))
    def test_invariants_full_scale(self, seed):
        self._check_invariants(100, 2000, seed)

    def test_deterministic(self):
        def trace(seed):
            config = world.WorldConfig(population=20, episode_steps=30)
            streams = world.Streams(seed)
            profile = social.preset('nest')
            w = world.init_world(config, streams.init, streams.goals,
                                 society=profile, streams=streams)
            policy = learning.Learner(learning.LearnParams(), profile)
            steps = []
            while not w.done:
                report = w.step(policy)
                steps.append((list(report.actions.items()), report.contacts,
                              report.infections, report.deaths,
                              [(e.sender, e.receiver, e.kind)
                               for e in report.events]))
            return steps, policy.q.values

        a, qa = trace(5)
        b, qb = trace(5)
        assert a == b
        np.testing.assert_array_equal(qa, qb)


class TestStreams(object):
    def test_independent(self):
        s = world.Streams(3)
        draws = [getattr(s, name).random() for name in world.STREAMS]
        assert len(set(draws)) == len(world.STREAMS)

    def test_episode_changes_draws(self):
        assert world.Streams(3, 0).init.random() != \
            world.Streams(3, 1).init.random()
