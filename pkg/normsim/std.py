import concurrent.futures

from normsim import base

__all__ = ['Experiment']


class Executor(base.Executor):
    """
    Runs tasks in the calling process when *jobs* is 1, otherwise in a pool
    of at most *jobs* worker processes. Results keep the order of *tasks*.
    """

    def map(self, fn, tasks):
        if self.jobs == 1:
            return [fn(task) for task in tasks]
        with concurrent.futures.ProcessPoolExecutor(
                max_workers=self.jobs) as pool:
            return list(pool.map(fn, tasks))


class Experiment(base.Experiment):
    @staticmethod
    def executor_connect(jobs):
        return Executor(jobs)
