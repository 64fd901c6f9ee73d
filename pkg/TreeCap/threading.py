import queue
import logging
import threading
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

_STOP = object()


class WorkerThread(threading.Thread):
    """ Daemon thread that pulls (index, function, argument) jobs from a shared
    queue until it receives the stop marker. Results and exceptions are written
    back into the slot of the job's index. """

    def __init__(self, jobs: queue.Queue, *args, **kwargs):
        threading.Thread.__init__(self, *args, daemon=True, **kwargs)
        self._jobs = jobs

    def run(self):
        while True:
            job = self._jobs.get()
            try:
                if job is _STOP:
                    return
                index, fn, item, results, errors = job
                try:
                    results[index] = fn(item)
                except BaseException as exc:  # re-raised in the caller
                    errors[index] = exc
            finally:
                self._jobs.task_done()


class WorkerPool:
    """ A fixed number of worker threads used for independent reductions
    (for example the lower and upper passes of an interval capacity).
    With a single thread everything runs inline in the caller. """

    def __init__(self, threads: int = 1):
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        self.threads = threads
        self._jobs: queue.Queue = queue.Queue()
        self._workers: List[WorkerThread] = []

    def __enter__(self) -> "WorkerPool":
        if self.threads > 1:
            for i in range(self.threads):
                worker = WorkerThread(self._jobs, name=f"treecap-worker-{i}")
                worker.start()
                self._workers.append(worker)
            logger.debug("started %d worker threads", self.threads)
        return self

    def __exit__(self, *exc_info):
        self.stop()

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """ Applies fn to every item and returns the results in input order.
        The first failing job's exception is raised in the calling thread. """
        items = list(items)
        if not self._workers:
            return [fn(item) for item in items]

        results: List = [None] * len(items)
        errors: List = [None] * len(items)
        for index, item in enumerate(items):
            self._jobs.put((index, fn, item, results, errors))
        self._jobs.join()

        for error in errors:
            if error is not None:
                raise error
        return results

    def stop(self):
        """ Sends the stop marker to every worker and waits for them. """
        for _ in self._workers:
            self._jobs.put(_STOP)
        for worker in self._workers:
            worker.join()
        self._workers = []


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    with WorkerPool(threads) as pool:
        return pool.map(fn, items)
