import pytest
from hamcrest import assert_that, calling, contains_exactly, equal_to, has_entries, instance_of, is_, raises

from pilnet import corpus
from pilnet.calculus import (
	Derivation, Proved, Split, Unprovable, check_derivation, from_json, judgement_key, premise_judgements, prove_search,
	reorder, rule_counts, size, subderivation, to_json
)
from pilnet.errors import BudgetExceeded, DerivationFormatError, DerivationViolation
from pilnet.syntax import parse_judgement

def test_worked_derivation_checks():
	d = corpus.derivation(corpus.WORKED_DERIVATION)
	assert_that(check_derivation(d), is_(True))
	assert_that(rule_counts(d), has_entries({"with": 1, "tens": 2, "ax": 4, "load_nu": 2, "pop_nu": 2}))
	assert_that(size(d), equal_to(11))
	assert_that(subderivation(d, (0, 1)).conclusion, equal_to(parse_judgement(corpus.D0_CONTEXT)))

def test_premises_are_computed_from_the_conclusion():
	d = corpus.derivation(corpus.MALL_TENS_FIRST)
	left, right = premise_judgements(d)
	assert_that(str(left.judgement), equal_to("|- (a!b with a!b), a?b"))
	assert_that(str(right.judgement), equal_to("|- c?d, c!d"))
	assert_that(str(d.premises[0].premises[1].conclusion), equal_to("|- a!b, a?b"))

def test_pop_consumes_the_store():
	d = corpus.derivation(corpus.NAMED_DERIVATIONS["d0_written"])
	pop = d.premises[0]
	assert_that(str(pop.conclusion), equal_to("nu x |- x!z, ya y. y?z"))
	assert_that(str(pop.premises[0].conclusion), equal_to("|- x!z, x?z"))

def test_json_round_trip():
	for name, obj in corpus.NAMED_DERIVATIONS.items():
		d = corpus.derivation(obj)
		assert_that(from_json(to_json(d)), equal_to(d))

def test_malformed_derivations():
	assert_that(calling(from_json).with_args({"rule": "ax"}), raises(DerivationFormatError))
	assert_that(calling(from_json).with_args({"rule": "cut", "conclusion": "|- a!b, a?b"}), raises(DerivationFormatError))
	bad_arity = {"rule": "par", "conclusion": "|- (a!b par a?b)", "principal": "0"}
	assert_that(calling(from_json).with_args(bad_arity), raises(DerivationFormatError))

def test_rule_mismatch_is_a_violation():
	j = parse_judgement("|- a!b, a?c")
	assert_that(calling(check_derivation).with_args(Derivation("ax", j)), raises(DerivationViolation))
	pop = {"rule": "pop_nu", "conclusion": corpus.D0_CONTEXT, "principal": "1", "witness": "x", "premises": [{"rule": "ax"}]}
	assert_that(calling(from_json).with_args(pop), raises(DerivationViolation))

def test_violation_names_the_failing_node():
	d = corpus.derivation(corpus.MALL_WITH_FIRST)
	bad = Derivation("with", d.conclusion, [d.premises[0], d.premises[0].premises[0]], d.principal)
	try:
		check_derivation(bad)
	except DerivationViolation as e:
		assert_that(e.path, equal_to((1,)))
	else:
		pytest.fail("expected a violation")

def test_mix_needs_two_sides():
	j = parse_judgement("|- one, one")
	node = Derivation("prec", j, (), [], None, Split([0, 1], []))
	assert_that(calling(premise_judgements).with_args(node), raises(DerivationViolation))

def test_build_reorders_premises():
	j = parse_judgement("|- (a!b par c!d), (a?b tens c?d)")
	ax1 = Derivation("ax", parse_judgement("|- a?b, a!b"))
	ax2 = Derivation("ax", parse_judgement("|- c!d, c?d"))
	tens = Derivation.build("tens", parse_judgement("|- a!b, c!d, (a?b tens c?d)"), [ax2, ax1], [2], split=Split([0], [1]))
	d = Derivation.build("par", j, [tens], [0])
	assert_that(check_derivation(d), is_(True))
	assert_that(str(d.premises[0].premises[0].conclusion), equal_to("|- a!b, a?b"))

def test_reorder_follows_the_formulas():
	d = corpus.derivation(corpus.MALL_TENS_FIRST)
	flipped = reorder(d, parse_judgement("|- c!d, (a?b tens c?d), (a!b with a!b)"))
	assert_that(check_derivation(flipped), is_(True))
	assert_that(flipped.principal, contains_exactly(1))

def test_search_finds_proofs():
	for name, text in corpus.JUDGEMENTS:
		found = prove_search(parse_judgement(text), budget=10 ** 5)
		assert_that(found, instance_of(Proved))
		assert_that(check_derivation(found.derivation), is_(True))

def test_search_refutes():
	assert_that(prove_search(parse_judgement("|- a!b, a!b")), instance_of(Unprovable))
	assert_that(prove_search(parse_judgement("|- (a!b tens a?b)")), instance_of(Unprovable))

def test_search_budget():
	j = parse_judgement(corpus.WORKED_CONTEXT)
	assert_that(calling(prove_search).with_args(j, 1), raises(BudgetExceeded))

def test_judgement_key_ignores_order_and_bound_names():
	a = parse_judgement("|- ex x. x!b, a?b")
	b = parse_judgement("|- a?b, ex y. y!b")
	assert_that(judgement_key(a), equal_to(judgement_key(b)))
