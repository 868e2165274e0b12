from hamcrest import assert_that, calling, equal_to, greater_than_or_equal_to, raises

from pilnet.workers import TrialPool

def square(x):
	return x * x

def test_results_keep_job_order():
	for pool_type in ("serial", "thread", "process"):
		pool = TrialPool(pool_type, workers=2)
		assert_that(list(pool.imap(square, range(10))), equal_to([x * x for x in range(10)]))

def test_dill_pool_runs_closures():
	offset = 3
	pool = TrialPool("multiprocess", workers=2)
	assert_that(list(pool.imap(lambda x: x + offset, [1, 2, 3])), equal_to([4, 5, 6]))

def test_defaults_to_one_worker_per_cpu():
	assert_that(TrialPool().workers, greater_than_or_equal_to(1))

def test_unknown_pool_type():
	assert_that(calling(TrialPool).with_args("cluster"), raises(ValueError))
