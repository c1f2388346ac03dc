import datetime
import logging
import os

import normsim
from normsim.base import OutputError
from normsim.config import RunManifest
from normsim.learning import Learner
from normsim.learning import QTable
from normsim.metrics import compute_metrics
from normsim.metrics import emergence
from normsim.metrics import write_metrics
from normsim.world import Streams
from normsim.world import init_world

log = logging.getLogger(__name__)


def run_dir(out, society, seed):
    return os.path.join(out, society, 'seed-%d' % seed)


def _now():
    return datetime.datetime.utcnow().isoformat() + 'Z'


class Run(object):
    """
    One (society, seed) run: train the shared tables for `training_steps`
    over back to back episodes, then record one evaluation episode.
    """

    def __init__(self, config, society, seed):
        self.config = config
        self.seed = seed
        self.world_config = config.world_config()
        self.disease = config.disease_params()
        self.observation = config.observation_model()
        self.params = config.learn_params()
        self.society = config.society(society)
        self.norms = config.norms()
        q = None
        if self.params.warm_start:
            q = QTable.load(self.params.warm_start)
        self.learner = Learner(self.params, self.society, q=q)
        self.episodes = 0

    def world(self):
        streams = Streams(self.seed, self.episodes)
        self.episodes += 1
        return init_world(self.world_config, streams.init,
                          goal_rng=streams.goals,
                          disease=self.disease,
                          observation=self.observation,
                          society=self.society,
                          norms=self.norms,
                          streams=streams)

    def train(self):
        remaining = self.params.training_steps
        self.learner.epsilon = self.params.epsilon
        while remaining > 0:
            world = self.world()
            steps = min(remaining, self.world_config.episode_steps)
            for _ in range(steps):
                world.step(self.learner)
            remaining -= steps
            log.debug('%s seed %d: training episode %d done, %d step(s) '
                      'left', self.society.name, self.seed, self.episodes,
                      remaining)

    def evaluate(self):
        """Run the evaluation episode and return its metrics rows"""
        self.learner.epsilon = self.params.eval_epsilon
        world = self.world()
        rows = []
        while not world.done:
            world.step(self.learner)
            rows.append(compute_metrics(world))
        self.infections = world.cumulative_infections
        return rows


def run_single(task):
    """
    Train and record one `normsim.base.RunTask`. Writes metrics.csv,
    qtable.csv and manifest.json under ``<out>/<society>/seed-<seed>`` and
    returns the `RunManifest`.
    """
    config = task.config
    started = _now()
    run = Run(config, task.society, task.seed)
    log.info('run %s seed %d started', run.society.name, task.seed)
    run.train()
    rows = run.evaluate()

    directory = run_dir(config.get('experiment', 'out'), run.society.name,
                        task.seed)
    try:
        if not os.path.isdir(directory):
            os.makedirs(directory)
    except (IOError, OSError) as e:
        raise OutputError(directory, e)
    outputs = {
        'metrics': os.path.join(directory, 'metrics.csv'),
        'qtable': os.path.join(directory, 'qtable.csv'),
        'manifest': os.path.join(directory, 'manifest.json'),
    }
    frame = write_metrics(rows, outputs['metrics'])
    run.learner.q.export(outputs['qtable'])
    manifest = RunManifest(
        society=run.society.name,
        seed=task.seed,
        config_hash=config.digest(),
        version=normsim.__version__,
        started=started,
        finished=_now(),
        outputs=outputs,
        emergence=emergence(
            frame,
            window=config.get('experiment', 'rolling_window'),
            threshold=config.get('experiment', 'emergence_threshold')),
        infections=run.infections)
    manifest.write(outputs['manifest'])
    log.info('run %s seed %d written to %s',
             run.society.name, task.seed, directory)
    return manifest
