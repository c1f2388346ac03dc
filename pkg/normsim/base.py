import abc
import collections
import logging

import six

log = logging.getLogger(__name__)


class NormsimException(Exception):
    pass


class ConfigError(NormsimException):
    pass


class OutputError(NormsimException):
    """Wraps an OSError raised while writing or reading run artefacts"""

    def __init__(self, path, reason):
        super(OutputError, self).__init__('%s: %s' % (path, reason))
        self.path = path


class ListingError(NormsimException):
    """
    Base for every error raised while parsing a norm or normative-info
    listing. *token* is the offending text and *offset* its byte offset in
    the UTF-8 encoded listing.
    """

    def __init__(self, message, token, offset):
        super(ListingError, self).__init__(
            '%s: %r at byte %d' % (message, token, offset))
        self.token = token
        self.offset = offset


class MissingKey(ListingError):
    pass


class DuplicateKey(ListingError):
    pass


class UnknownKey(ListingError):
    pass


class UnknownAttribute(ListingError):
    pass


class UnknownValue(ListingError):
    pass


class ListingSyntaxError(ListingError):
    pass


class MissingAttribute(NormsimException):
    pass


class DeceasedInput(NormsimException):
    pass


class NoActiveChannels(NormsimException):
    pass


class EpisodeDone(NormsimException):
    pass


class WindowZero(NormsimException):
    pass


class DegenerateSample(NormsimException):
    pass


class ZeroControlVariance(NormsimException):
    pass


class MismatchedRuns(NormsimException):
    pass


RunTask = collections.namedtuple('RunTask', ['config', 'society', 'seed'])


class Executor(six.with_metaclass(abc.ABCMeta, object)):
    def __init__(self, jobs=1):
        if jobs < 1:
            raise ConfigError('jobs must be at least 1, got %r' % (jobs,))
        self.jobs = jobs

    @abc.abstractmethod
    def map(self, fn, tasks):
        """
        Apply *fn* to every task in *tasks* and return the results in task
        order.
        """
        raise NotImplementedError


class Experiment(object):
    def __init__(self, config, jobs=None):
        """
        *config* is a resolved `normsim.config.ExperimentConfig`.

        *jobs* bounds how many whole runs execute at once. It defaults to the
        config's ``[experiment] jobs`` value. Runs never share state, so the
        bound only trades memory for wall time.
        """
        self.config = config
        self.jobs = jobs or config.get('experiment', 'jobs')
        self.executor = self.executor_connect(self.jobs)

    def tasks(self):
        """
        One task per (society, seed), societies in configured order and
        seeds ascending from the base seed.
        """
        return [RunTask(self.config, society, seed)
                for society in self.config.societies
                for seed in self.config.seeds]

    def run(self):
        """
        Train and record every (society, seed) run. Returns the list of
        `normsim.config.RunManifest` in task order; the aio adapter returns
        an awaitable of that list.
        """
        from normsim import runner

        tasks = self.tasks()
        log.info('running %d task(s) with %d job(s)', len(tasks), self.jobs)
        return self.executor.map(runner.run_single, tasks)

    def compare(self, experimental, controls, metrics=None):
        """
        Compare the finished runs under the society directory *experimental*
        against each directory in *controls*. See `normsim.metrics.compare`.
        """
        from normsim import metrics as m

        return m.compare(
            experimental, controls, metrics=metrics,
            window=self.config.get('experiment', 'convergence_window'))
