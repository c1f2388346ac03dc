"""
The pandemic world: agents moving between their homes and three public
places, meeting, infecting and judging each other, and learning from it.
"""
import collections
import logging

import numpy as np

from normsim.base import ConfigError
from normsim.base import EpisodeDone
from normsim.disease import DiseaseParams
from normsim.disease import HealthState
from normsim.disease import ObservationModel
from normsim.disease import observe_health
from normsim.disease import progress
from normsim.disease import try_infect
from normsim.learning import DECEASED_REWARD
from normsim.learning import AgentOutcome
from normsim.learning import StateKey
from normsim.norms import NormOutcome
from normsim.norms import default_norms
from normsim.norms import evaluate_norm
from normsim.norms import role_holds
from normsim.places import GOALS
from normsim.places import PUBLIC
from normsim.places import ActionKind
from normsim.places import GoalKind
from normsim.places import Place
from normsim.places import PlaceKind
from normsim.places import goal_satisfied
from normsim.social import CommKind
from normsim.social import Role
from normsim.social import WITNESS_REWARD
from normsim.social import build_event
from normsim.social import gate_approval
from normsim.social import gate_by_severity
from normsim.social import interpret
from normsim.social import preset
from normsim.social import select_comm_kind

log = logging.getLogger(__name__)

STREAMS = ('init', 'goals', 'exploration', 'contacts', 'observation',
           'disease', 'communication')


class Agent(object):
    __slots__ = ('id', 'health', 'vaccinated', 'location', 'goal',
                 'quarantine_remaining', 'infections', 'goals_satisfied')

    def __init__(self, id, health=HealthState.HEALTHY, vaccinated=False,
                 location=None, goal=None, quarantine_remaining=0):
        self.id = id
        self.health = health
        self.vaccinated = vaccinated
        self.location = location or Place.home(id)
        self.goal = goal
        self.quarantine_remaining = quarantine_remaining
        self.infections = 0
        self.goals_satisfied = 0

    def __repr__(self):
        return '<Agent %d %s at %s>' % (
            self.id, self.health.name, self.location.kind.name)

    @property
    def alive(self):
        return self.health is not HealthState.DECEASED

    @property
    def quarantined(self):
        return self.quarantine_remaining > 0

    @property
    def at_home(self):
        return self.location.kind is PlaceKind.HOME

    def view(self, obs_health=None):
        """
        Attribute view of this agent for norm evaluation. *obs_health* is
        the health an observer perceived; it defaults to the level the agent
        assesses for itself.
        """
        if obs_health is None:
            obs_health = self.health.self_assessed
        return {
            'obs_health': obs_health.value,
            'actual_health': self.health.value,
            'loc': self.location.kind.value,
            'vaccinated': 'TRUE' if self.vaccinated else 'FALSE',
        }


class WorldConfig(object):
    def __init__(self,
                 population=100,
                 initial_infected_fraction=0.30,
                 episode_steps=2000,
                 quarantine_duration=3,
                 p_interact=1.0,
                 goals=GOALS,
                 confirm_quarantine=True):
        self.population = population
        self.initial_infected_fraction = initial_infected_fraction
        self.episode_steps = episode_steps
        self.quarantine_duration = quarantine_duration
        self.p_interact = p_interact
        self.confirm_quarantine = confirm_quarantine
        try:
            self.goals = tuple(GoalKind(g) for g in goals)
        except ValueError as e:
            raise ConfigError('unknown goal in %r: %s' % (goals, e))

        if population < 2:
            raise ConfigError(
                'population must be at least 2, got %r' % population)
        if not 0.0 <= initial_infected_fraction <= 1.0:
            raise ConfigError(
                'initial_infected_fraction must be in [0, 1], got %r'
                % initial_infected_fraction)
        if episode_steps < 1:
            raise ConfigError(
                'episode_steps must be at least 1, got %r' % episode_steps)
        if quarantine_duration < 0:
            raise ConfigError(
                'quarantine_duration must not be negative, got %r'
                % quarantine_duration)
        if not 0.0 <= p_interact <= 1.0:
            raise ConfigError(
                'p_interact must be in [0, 1], got %r' % p_interact)
        if not self.goals:
            raise ConfigError('at least one goal is required')

    @property
    def initial_infected(self):
        # half-up rounding
        return int(np.floor(
            self.population * self.initial_infected_fraction + 0.5))


class Streams(object):
    """
    Independent random generators for each phase of one episode, all
    derived from (seed, episode). New streams are only ever appended to
    `STREAMS`, so existing phases keep their draws.
    """

    def __init__(self, seed, episode=0):
        self.seed = seed
        self.episode = episode
        children = np.random.SeedSequence([seed, episode]).spawn(len(STREAMS))
        for name, child in zip(STREAMS, children):
            setattr(self, name, np.random.default_rng(child))


def assign_goal(rng, agent, goals=GOALS):
    """
    Uniform draw over *goals*. A vaccinated agent never draws
    be_vaccinated; it gets no goal when nothing else is left.
    """
    if agent.vaccinated:
        goals = [g for g in goals if g is not GoalKind.BE_VACCINATED]
    if not goals:
        return None
    return goals[int(rng.integers(len(goals)))]


def init_world(config, rng, goal_rng=None, **kwargs):
    """
    Put `config.population` agents at their homes, infect a uniformly
    chosen `config.initial_infected` of them and give everyone a first
    goal. *kwargs* go to `World`.
    """
    agents = [Agent(i) for i in range(config.population)]
    infected = rng.choice(config.population, size=config.initial_infected,
                          replace=False)
    for i in sorted(int(i) for i in infected):
        agents[i].health = HealthState.ASYMPTOMATIC
    goal_rng = goal_rng if goal_rng is not None else rng
    for agent in agents:
        agent.goal = assign_goal(goal_rng, agent, config.goals)
    return World(config, agents, **kwargs)


def contacts(world, rng):
    """
    Contacts of the current step: every unordered pair of alive agents
    sharing a public place, each kept with probability `p_interact`.
    Pairs are ordered by place, then by agent id.
    """
    p = world.config.p_interact
    pairs = []
    for kind in PUBLIC:
        ids = [a.id for a in world.agents
               if a.alive and a.location.kind is kind]
        for n, i in enumerate(ids):
            for j in ids[n + 1:]:
                if p >= 1.0 or rng.random() < p:
                    pairs.append((i, j))
    return pairs


StepReport = collections.namedtuple(
    'StepReport',
    ['step', 'actions', 'forced', 'contacts', 'events', 'infections',
     'deaths', 'rewards', 'goals_attempted', 'goals_met',
     'public_quarantined'])


def _clip(value, bound):
    return max(-bound, min(bound, value))


class World(object):
    def __init__(self,
                 config,
                 agents,
                 disease=None,
                 observation=None,
                 society=None,
                 norms=None,
                 streams=None):
        """
        *society* defaults to the primitive society, *norms* to the
        built-in prohibition and *streams* to the streams of seed 0.
        """
        self.config = config
        self.agents = agents
        self.disease = disease or DiseaseParams()
        self.observation = observation or ObservationModel()
        self.society = society or preset('primitive')
        self.norms = tuple(norms) if norms is not None else default_norms()
        self.streams = streams or Streams(0)
        self.t = 0
        self.cumulative_infections = 0
        self.last_report = None

    @property
    def done(self):
        return self.t >= self.config.episode_steps

    def state_of(self, agent):
        return StateKey(agent.health.self_assessed,
                        agent.vaccinated,
                        agent.quarantined,
                        agent.goal or GoalKind.REST,
                        agent.location.kind)

    def counts(self):
        return collections.Counter(a.health for a in self.agents)

    def step(self, policy):
        """
        Advance one step with *policy* (a `normsim.learning.Learner`):
        act, move, meet, judge and communicate, progress the disease, learn.
        """
        if self.done:
            raise EpisodeDone('episode finished after %d steps' % self.t)
        streams = self.streams
        alive = [a for a in self.agents if a.alive]

        # act
        states = {}
        actions = collections.OrderedDict()
        forced = []
        for agent in alive:
            states[agent.id] = self.state_of(agent)
            if agent.quarantined:
                actions[agent.id] = ActionKind.STAY_HOME
                agent.quarantine_remaining -= 1
                forced.append(agent.id)
            else:
                actions[agent.id] = policy.act(states[agent.id],
                                               streams.exploration)

        # move
        for agent in alive:
            action = actions[agent.id]
            agent.location = action.place(agent.id)
            if action is ActionKind.VISIT_CLINIC:
                agent.vaccinated = True
        public_quarantined = sum(
            1 for a in alive if a.quarantined and a.location.public)

        # meet
        pairs = contacts(self, streams.contacts)
        health = dict((a.id, a.health) for a in alive)
        perceived = {}
        for i, j in pairs:
            perceived[i, j] = observe_health(
                streams.observation, health[j], self.observation)
            perceived[j, i] = observe_health(
                streams.observation, health[i], self.observation)
        infections = []
        for i, j in pairs:
            for target, source in ((i, j), (j, i)):
                agent = self.agents[target]
                if health[target] is not HealthState.HEALTHY \
                        or not health[source].infectious \
                        or agent.health is not HealthState.HEALTHY:
                    continue
                if try_infect(streams.disease, agent.vaccinated,
                              self.disease):
                    agent.health = HealthState.ASYMPTOMATIC
                    agent.infections += 1
                    infections.append(target)
        self.cumulative_infections += len(infections)

        # judge and communicate
        events = self._communicate(pairs, health, perceived)
        sanction = collections.defaultdict(float)
        affect = collections.defaultdict(float)
        other = collections.defaultdict(float)
        quarantine = set()
        for event in events:
            contribution = interpret(event, Role.ACTOR, self.society)
            if event.kind is CommKind.SANCTION:
                sanction[event.receiver] += contribution.extrinsic
            affect[event.receiver] += contribution.intrinsic
            if contribution.quarantine:
                quarantine.add(event.receiver)
            if contribution.advice is not None:
                policy.advise(*contribution.advice)
            witnessed = interpret(event, Role.WITNESS, self.society)
            for witness in event.witnesses:
                other[witness] += witnessed.extrinsic
        if self.config.confirm_quarantine:
            quarantine = set(k for k in quarantine
                             if self.agents[k].health.infectious)
        for agent_id in sorted(quarantine):
            self.agents[agent_id].quarantine_remaining = \
                self.config.quarantine_duration

        # self-directed guilt and pleasure
        emotion = self.society.emotion_weight
        self_norm = collections.defaultdict(float)
        if emotion > 0.0:
            for agent in alive:
                self_norm[agent.id] = _clip(
                    self._judge_self(agent, health[agent.id]) * emotion,
                    emotion)

        # progress
        deaths = []
        for agent in alive:
            agent.health = progress(streams.disease, agent.health,
                                    agent.vaccinated, agent.at_home,
                                    self.disease)
            if not agent.alive:
                deaths.append(agent.id)
        dead = set(deaths)

        # next goals, then learn
        goals = dict((a.id, a.goal) for a in alive)
        for agent in alive:
            if agent.alive:
                agent.goal = assign_goal(streams.goals, agent,
                                         self.config.goals)
        # at most a death's worth of sanctions per step
        sanction_cap = -DECEASED_REWARD * self.society.sanction_weight
        rewards = collections.OrderedDict()
        goals_attempted = goals_met = 0
        for agent in alive:
            met = None
            if goals[agent.id] is not None:
                met = goal_satisfied(goals[agent.id], actions[agent.id])
                goals_attempted += 1
                if met:
                    goals_met += 1
                    agent.goals_satisfied += 1
            outcome = AgentOutcome(
                deceased=agent.id in dead,
                sanction=_clip(sanction[agent.id], sanction_cap),
                goal_satisfied=met,
                self_norm=self_norm[agent.id],
                other_norm=_clip(other[agent.id], WITNESS_REWARD),
                affect=_clip(affect[agent.id], emotion))
            next_state = None if agent.id in dead else self.state_of(agent)
            rewards[agent.id] = policy.learn(
                states[agent.id], actions[agent.id], outcome, next_state)

        report = StepReport(self.t, actions, forced, pairs, events,
                            infections, deaths, rewards, goals_attempted,
                            goals_met, public_quarantined)
        self.last_report = report
        self.t += 1
        return report

    def _communicate(self, pairs, health, perceived):
        society = self.society
        if not pairs or not society.active:
            return []
        rng = self.streams.communication
        present = collections.defaultdict(list)
        for agent in self.agents:
            if agent.alive:
                present[agent.location].append(agent.id)
        events = []
        for i, j in pairs:
            for observer_id, actor_id in ((i, j), (j, i)):
                observer = self.agents[observer_id]
                actor = self.agents[actor_id]
                seen = perceived[observer_id, actor_id]
                view = actor.view(seen)
                view['actual_health'] = health[actor_id].value
                judged = self._judge(observer, seen, view)
                if judged is None:
                    continue
                norm, outcome = judged
                in_public = actor.location.public
                if outcome is NormOutcome.VIOLATED:
                    react = gate_by_severity(rng, seen, in_public, society)
                    valence = -1
                else:
                    react = gate_approval(rng, in_public, society)
                    valence = 1
                if not react:
                    continue
                kind = select_comm_kind(rng, society)
                witnesses = [k for k in present[actor.location]
                             if k not in (actor_id, observer_id)]
                event = build_event(kind, observer_id, actor_id, view,
                                    norm=norm, valence=valence,
                                    witnesses=witnesses)
                if event is not None:
                    events.append(event)
        return events

    def _judge(self, observer, seen, view):
        """
        The first enforced norm *observer* sees violated by the actor
        described by *view*, else the first one it sees satisfied.
        """
        satisfied = None
        for norm in self.norms:
            if not role_holds(norm.subject, seen.value) \
                    or not role_holds(norm.object,
                                      observer.health.self_assessed.value):
                continue
            outcome = evaluate_norm(norm, view)
            if outcome is NormOutcome.VIOLATED:
                return norm, outcome
            if outcome is NormOutcome.SATISFIED and satisfied is None:
                satisfied = norm, outcome
        return satisfied

    def _judge_self(self, agent, health):
        score = 0
        view = agent.view(health.self_assessed)
        view['actual_health'] = health.value
        for norm in self.norms:
            if not role_holds(norm.subject, health.self_assessed.value):
                continue
            outcome = evaluate_norm(norm, view)
            if outcome is NormOutcome.SATISFIED:
                score += 1
            elif outcome is NormOutcome.VIOLATED:
                score -= 1
        return score
