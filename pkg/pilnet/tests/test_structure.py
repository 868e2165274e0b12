import json

from hamcrest import assert_that, calling, equal_to, has_length, is_, raises

from pilnet import corpus
from pilnet.errors import ContextMismatch, NetFormatError, StructureViolation, WitnessViolation
from pilnet.structure import (
	CONC, CONF, Leaf, Node, PreStructure, SequentLink, canonize, conc, conf, fingerprint, from_json, is_canonical,
	isomorphic, serialize, to_json, validate_structure
)
from pilnet.substitution import EMPTY, Substitution
from pilnet.syntax import Path, parse_judgement

def leaf(leaf_id, *paths):
	return Leaf(leaf_id, SequentLink([Path.parse(p) for p in paths]))

def test_worked_net_is_a_valid_structure():
	p = corpus.net(corpus.WORKED_NET)
	assert_that(validate_structure(p), is_(True))
	assert_that(p.leaves, has_length(6))
	assert_that(p.origin, equal_to(frozenset({"x", "y"})))
	assert_that(p.dualizer("aL"), equal_to(EMPTY))
	assert_that(p.dualizer("cR"), equal_to(Substitution({"y": "x"})))

def test_json_round_trip_keeps_the_structure():
	p = corpus.net(corpus.WORKED_NET)
	again = from_json(json.loads(json.dumps(to_json(p))))
	assert_that(serialize(again), equal_to(serialize(p)))
	assert_that(fingerprint(again), equal_to(fingerprint(p)))

def test_bad_json_is_reported():
	assert_that(calling(from_json).with_args({"tree": {}}), raises(NetFormatError))
	bad = {"context": "|- a!b, a?b", "tree": {"leaf": {"id": "l0"}}}
	assert_that(calling(from_json).with_args(bad), raises(NetFormatError))

def test_canonize_merges_and_drops_nodes():
	a, b, c = leaf("a", "0"), leaf("b", "1"), leaf("c", "2")
	tree = canonize(conc(conc(a, b), conf(c)))
	assert_that(tree.label, equal_to(CONC))
	assert_that(tree.children, has_length(3))
	assert_that(is_canonical(tree), is_(True))
	assert_that(is_canonical(Node("n0", CONF, [a])), is_(False))

def test_non_axiomatic_links_are_refused():
	j = parse_judgement("|- (a!b tens a?b)")
	p = PreStructure(leaf("l0", "0"), {"l0": EMPTY}, j)
	assert_that(calling(validate_structure).with_args(p), raises(StructureViolation))

def test_bad_dualizers_are_refused():
	j = parse_judgement("|- ex x. x!b, a?b")
	p = PreStructure(leaf("l0", "0.D", "1"), {"l0": EMPTY}, j)
	assert_that(calling(validate_structure).with_args(p), raises(WitnessViolation))
	ok = PreStructure(leaf("l0", "0.D", "1"), {"l0": Substitution({"x": "a"})}, j)
	assert_that(validate_structure(ok), is_(True))

def test_isomorphism_ignores_ids_and_child_order():
	j = parse_judgement("|- (a!b with a!b), (c!d with c!d), (a?b tens c?d)")
	p1 = corpus.net(corpus.FLATTENING_PAIR_NET)
	tree = conc(conf(leaf("x", "1.R", "2.R"), leaf("y", "1.L", "2.R")), conf(leaf("z", "0.R", "2.L"), leaf("w", "0.L", "2.L")))
	p2 = PreStructure(tree, {}, j)
	assert_that(isomorphic(p1, p2), is_(True))

def test_isomorphism_needs_the_same_context():
	p1 = corpus.net(corpus.TENSOR_SELF_NET)
	p2 = corpus.net(corpus.FLATTENING_PAIR_NET)
	assert_that(calling(isomorphic).with_args(p1, p2), raises(ContextMismatch))

def test_witness_renaming_relaxation():
	j = parse_judgement("|- ex x. x!b, ex y. y?b, a!b, a?b")
	left = Node(None, CONC, [leaf("l0", "0.D", "3"), leaf("l1", "1.D", "2")])
	p1 = PreStructure(left, {"l0": Substitution({"x": "a"}), "l1": Substitution({"y": "a"})}, j)
	p2 = PreStructure(left, {"l0": Substitution({"a": "x"}), "l1": Substitution({"y": "a"})}, j)
	assert_that(isomorphic(p1, p2), is_(False))
	assert_that(isomorphic(p1, p2, modulo_witness_renaming=True), is_(True))
