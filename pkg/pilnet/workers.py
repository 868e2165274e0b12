"""
Worker pools for fanning out independent trials

thread       - multiprocessing.pool.ThreadPool, no pickling
process      - multiprocessing.Pool, functions and arguments must pickle
multiprocess - multiprocess.Pool, pickles with dill so closures work too
serial       - plain map in the calling process
"""

import logging
from multiprocessing import Pool
from multiprocessing.pool import ThreadPool

from multiprocess import Pool as DillPool
from psutil import cpu_count

POOL_TYPES = ("thread", "process", "multiprocess", "serial")

class TrialPool(object):
	def __init__(self, pool_type="thread", workers=0):
		"""
		Args:
			pool_type: one of POOL_TYPES
			workers: pool size, 0 for one worker per logical cpu
		"""
		if pool_type not in POOL_TYPES:
			raise ValueError("unknown pool type {!r}".format(pool_type))
		self.pool_type = pool_type
		self.workers = workers or cpu_count() or 1
		self.logger = logging.getLogger(name=self.__class__.__name__)

	def _pool(self):
		if self.pool_type == "thread":
			return ThreadPool(self.workers)
		if self.pool_type == "process":
			return Pool(self.workers)
		return DillPool(self.workers)

	def imap(self, function, jobs):
		"""
		Results in job order. The pool lives only as long as the iteration.
		"""
		jobs = list(jobs)
		if self.pool_type == "serial" or self.workers == 1 or len(jobs) < 2:
			self.logger.debug("running %d jobs serially", len(jobs))
			yield from map(function, jobs)
			return
		self.logger.debug("running %d jobs on a %s pool of %d", len(jobs), self.pool_type, self.workers)
		pool = self._pool()
		try:
			yield from pool.imap(function, jobs)
		finally:
			pool.close()
			pool.join()
