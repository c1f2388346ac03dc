import asyncio
import concurrent.futures

from normsim import base

__all__ = ['Experiment']


class Executor(base.Executor):
    """
    Asyncio adapter running whole runs in a pool of at most *jobs* worker
    processes. `map` returns a coroutine.
    """

    def __init__(self, jobs=1, loop=None):
        super(Executor, self).__init__(jobs)
        self._loop = loop

    async def map(self, fn, tasks):
        loop = self._loop or asyncio.get_event_loop()
        with concurrent.futures.ProcessPoolExecutor(
                max_workers=self.jobs) as pool:
            futures = [loop.run_in_executor(pool, fn, task)
                       for task in tasks]
            return list(await asyncio.gather(*futures))


class Experiment(base.Experiment):
    def __init__(self, *args, loop=None, **kwargs):
        self._loop = loop
        super(Experiment, self).__init__(*args, **kwargs)

    def executor_connect(self, jobs):
        return Executor(jobs, loop=self._loop)
