import time
from collections import Counter

import pytest
from hamcrest import (
	assert_that, calling, contains_exactly, empty, equal_to, has_length, instance_of, is_, is_not, less_than, raises
)

from pilnet import corpus
from pilnet.coalescence import (
	Accepted, Coalescer, Rejected, StepCache, Stuck, applicable_steps, apply_step, check_exhaustive, check_greedy, replay
)
from pilnet.errors import BudgetExceeded, InapplicableStep
from pilnet.steps import Step, priority, step_kinds, trace_from_json, trace_to_json
from pilnet.structure import isomorphic
from pilnet.substitution import EMPTY
from pilnet.syntax import Path

@pytest.fixture
def worked():
	return corpus.net(corpus.WORKED_NET)

def test_worked_starts_with_the_two_pops(worked):
	steps = applicable_steps(worked)
	pops = [s for s in steps if s.kind == "pop"]
	assert_that(pops, has_length(2))
	assert_that(min(priority(s) for s in steps), equal_to(2))
	assert_that(sorted(s.targets for s in pops), contains_exactly(("cL", "nL"), ("cR", "nR")))

def test_worked_is_accepted_greedily(worked):
	for seed in range(5):
		verdict = check_greedy(worked, seed)
		assert_that(verdict, instance_of(Accepted))
		kinds = Counter(entry.step.kind for entry in verdict.trace)
		assert_that(kinds, equal_to(Counter({"pop": 2, "load": 2, "tens": 2, "dot_conc": 2, "with": 1, "dot_conf": 1})))
		assert_that(verdict.trace[0].step.kind, equal_to("pop"))
		assert_that(verdict.structure.is_trivial(), is_(True))

def test_pop_closes_the_nominal_link(worked):
	step = next(s for s in applicable_steps(worked) if s.kind == "pop")
	rewritten, entry = apply_step(worked, step)
	assert_that(step.principal, contains_exactly(Path(2)))
	assert_that(rewritten.leaves, has_length(5))
	assert_that(rewritten.leaves[entry.result].link.paths, has_length(2))
	assert_that(entry.dualizer, equal_to(EMPTY))
	new_leaf = rewritten.leaves[entry.result]
	assert_that(("ya", "y") in new_leaf.link.store, is_(False))
	assert_that(("nu", "x") in new_leaf.link.store, is_(True))

def test_replaying_a_trace_reaches_the_same_structure(worked):
	verdict = check_greedy(worked, 3)
	again = replay(worked, trace_from_json(trace_to_json(verdict.trace)))
	assert_that(isomorphic(again, verdict.structure), is_(True))

def test_inapplicable_steps_are_refused(worked):
	bogus = Step("tens", ["aL", "cL"], [Path(1)])
	assert_that(calling(apply_step).with_args(worked, bogus), raises(InapplicableStep))

def test_tensor_self_link_is_stuck():
	p = corpus.net(corpus.TENSOR_SELF_NET)
	assert_that(applicable_steps(p), has_length(0))
	assert_that(check_greedy(p), instance_of(Stuck))
	assert_that(check_exhaustive(p), instance_of(Rejected))

def test_overlapping_links_never_merge():
	p = corpus.net(corpus.OVERLAP_NET)
	verdict = check_greedy(p)
	assert_that(verdict, instance_of(Stuck))
	held = sorted(leaf.link.paths for leaf in verdict.structure.leaves.values())
	assert_that(held, equal_to([(Path(0), Path(1)), (Path(1), Path(2))]))
	assert_that(check_exhaustive(p), instance_of(Rejected))

@pytest.mark.parametrize("fixture", ("PREC_DIVERGENCE_NET", "TENS_DIVERGENCE_NET"))
def test_divergence_is_rejected(fixture):
	p = corpus.net(getattr(corpus, fixture))
	verdict = check_greedy(p)
	assert_that(verdict, instance_of(Stuck))
	assert_that(verdict.structure.is_trivial(), is_(False))
	assert_that(check_exhaustive(p), instance_of(Rejected))

@pytest.mark.parametrize("fixture, kinds", (
	("PREC_DIVERGENCE_NET", ["prec", "prec"]),
	("TENS_DIVERGENCE_NET", ["prec", "tens"]),
))
def test_divergence_depends_on_the_first_step(fixture, kinds):
	p = corpus.net(getattr(corpus, fixture))
	first = applicable_steps(p)
	assert_that(sorted(s.kind for s in first), equal_to(kinds))
	ends = []
	for step in first:
		rewritten, _ = apply_step(p, step)
		verdict = check_greedy(rewritten)
		assert_that(verdict, instance_of(Stuck))
		ends.append(verdict.structure)
	assert_that(isomorphic(ends[0], ends[1]), is_(False))

def test_prec_cycle_closes_after_the_tensors():
	p = corpus.net(corpus.PREC_TENS_CYCLE_NET)
	verdict = check_greedy(p)
	assert_that(verdict, instance_of(Accepted))
	kinds = [entry.step.kind for entry in verdict.trace]
	assert_that(kinds.index("prec") > max(i for i, k in enumerate(kinds) if k == "tens"), is_(True))

def test_flattening_pair_merges_both_withs():
	p = corpus.net(corpus.FLATTENING_PAIR_NET)
	verdict = check_greedy(p)
	assert_that(verdict, instance_of(Accepted))
	assert_that(Counter(e.step.kind for e in verdict.trace)["with"], equal_to(2))

def test_exhaustive_agrees_with_greedy_on_accepted_nets():
	for fixture in (corpus.WORKED_NET, corpus.FLATTENING_PAIR_NET, corpus.PREC_TENS_CYCLE_NET):
		p = corpus.net(fixture)
		assert_that(check_exhaustive(p).accepted, is_(True))

def test_exhaustive_budget():
	p = corpus.net(corpus.WORKED_NET)
	assert_that(calling(check_exhaustive).with_args(p, 1), raises(BudgetExceeded))

def check_seed_independence(seeds):
	for name, p in corpus.net_corpus():
		for seed in range(seeds):
			assert_that((name, seed, check_greedy(p, seed).accepted), equal_to((name, seed, True)))

def test_acceptance_does_not_depend_on_the_seed():
	check_seed_independence(5)

@pytest.mark.slow
def test_acceptance_over_many_seeds():
	check_seed_independence(100)

@pytest.mark.slow
def test_large_generated_nets_check_quickly():
	for size in (50, 100, 200, 300):
		p = corpus.generated_net(size, seed=size)
		started = time.perf_counter()
		verdict = check_greedy(p)
		elapsed = time.perf_counter() - started
		assert_that(verdict.accepted, is_(True))
		assert_that(elapsed, less_than(1.0))

def test_cached_step_lists_match_fresh_ones():
	coalescer = Coalescer(corpus.generated_net(60, seed=1))
	while True:
		fresh = Coalescer(coalescer.structure).applicable_steps()
		assert_that(set(coalescer.applicable_steps()), equal_to(set(fresh)))
		ready = coalescer.prioritized()
		if not ready:
			break
		coalescer.apply(ready[0])
	assert_that(coalescer.structure.is_trivial(), is_(True))

def test_step_cache_is_reused():
	cache = StepCache()
	p = corpus.net(corpus.WORKED_NET)
	first = Coalescer(p, cache).applicable_steps()
	assert_that(cache.unary, is_not(empty()))
	assert_that(Coalescer(p, cache).applicable_steps(), equal_to(first))

def test_step_priorities():
	assert_that(priority(Step("dot_conc", ["n0"])), equal_to(0))
	assert_that(priority(Step("pop", ["l0", "l1"], [Path(0)])), equal_to(2))
	assert_that(priority(Step("with", ["l0", "l1"], [Path(0)])), equal_to(4))
	assert_that(priority(Step("prec", ["l0", "l1"], [Path(0)])), equal_to(5))
	assert_that(priority(Step("prec", ["l0", "l1"], [])), equal_to(6))
	assert_that(step_kinds["tens"], equal_to(("pair", 4)))
