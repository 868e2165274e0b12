import pytest
from hamcrest import assert_that, calling, contains_exactly, equal_to, has_length, is_, raises

from pilnet import corpus
from pilnet.coalescence import check_greedy
from pilnet.errors import InapplicableStep
from pilnet.flattening import (
	FlatteningStep, flatten_step, flattening_steps, is_slice, measure_mu, normalize, normalize_with_measures
)
from pilnet.structure import CONC, CONF, isomorphic, validate_structure

def test_measure_of_the_critical_pair():
	p = corpus.net(corpus.FLATTENING_PAIR_NET)
	assert_that(measure_mu(p.tree), equal_to(25))
	assert_that(flattening_steps(p), has_length(2))
	assert_that(is_slice(p), is_(False))

def test_every_step_lowers_the_measure():
	p = corpus.net(corpus.FLATTENING_PAIR_NET)
	for seed in range(8):
		_, measures = normalize_with_measures(p, seed)
		assert_that(measures, contains_exactly(25, 21, 20, 19))

def test_normal_form_is_unique():
	p = corpus.net(corpus.FLATTENING_PAIR_NET)
	first = normalize(p, 0)
	for seed in range(1, 8):
		assert_that(isomorphic(normalize(p, seed), first), is_(True))

def test_normal_form_is_a_slice_net():
	nf = normalize(corpus.net(corpus.FLATTENING_PAIR_NET))
	assert_that(is_slice(nf), is_(True))
	assert_that(nf.tree.label, equal_to(CONF))
	assert_that(nf.tree.children, has_length(4))
	assert_that(all(child.label == CONC and len(child.children) == 2 for child in nf.tree.children), is_(True))
	assert_that(validate_structure(nf), is_(True))
	assert_that(check_greedy(nf).accepted, is_(True))

def test_slice_nets_are_already_normal():
	p = corpus.net(corpus.WORKED_NET)
	assert_that(flattening_steps(p), has_length(0))
	assert_that(is_slice(p), is_(True))
	assert_that(normalize(p), equal_to(p))

def test_one_step():
	p = corpus.net(corpus.FLATTENING_PAIR_NET)
	step = flattening_steps(p)[0]
	q = flatten_step(p, step)
	assert_that(q.tree.label, equal_to(CONF))
	assert_that(q.leaves, has_length(6))
	assert_that(measure_mu(q.tree), equal_to(21))
	assert_that(calling(flatten_step).with_args(p, FlatteningStep(step.node, "missing")), raises(InapplicableStep))

def check_corpus_normal_forms(orders):
	for name, p in corpus.net_corpus():
		first, measures = normalize_with_measures(p, 0)
		assert_that(all(a > b for a, b in zip(measures, measures[1:])), is_(True))
		assert_that(is_slice(first), is_(True))
		assert_that(check_greedy(first).accepted, is_(True))
		for seed in range(1, orders):
			assert_that((name, isomorphic(normalize(p, seed), first)), equal_to((name, True)))

def test_corpus_normal_forms_do_not_depend_on_the_order():
	check_corpus_normal_forms(5)

@pytest.mark.slow
def test_corpus_normal_forms_over_many_orders():
	check_corpus_normal_forms(100)
