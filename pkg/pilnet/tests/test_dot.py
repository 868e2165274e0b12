from hamcrest import assert_that, calling, contains_string, raises, starts_with

from pilnet import corpus
from pilnet.coalescence import check_greedy
from pilnet.dot import export_dot

def test_net_export():
	source = export_dot(corpus.net(corpus.WORKED_NET))
	assert_that(source, starts_with("digraph net"))
	assert_that(source, contains_string("⌢"))
	assert_that(source, contains_string("diamond"))
	assert_that(source, contains_string("aL: "))

def test_trace_export_has_one_cluster_per_step():
	p = corpus.net(corpus.FLATTENING_PAIR_NET)
	trace = check_greedy(p).trace
	source = export_dot(p, trace)
	assert_that(source, contains_string("cluster_0"))
	assert_that(source, contains_string("cluster_{}".format(len(trace))))

def test_derivation_export():
	source = export_dot(corpus.derivation(corpus.WORKED_DERIVATION))
	assert_that(source, starts_with("digraph derivation"))
	assert_that(source, contains_string("rankdir=BT"))
	assert_that(source, contains_string("pop_nu x"))

def test_other_objects_are_refused():
	assert_that(calling(export_dot).with_args("|- a!b, a?b"), raises(TypeError))
