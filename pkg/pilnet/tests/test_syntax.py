import pytest
from hamcrest import assert_that, calling, contains_exactly, equal_to, has_length, is_, none, raises

from pilnet.errors import CleanlinessError, ParseError, PathError
from pilnet.syntax import (
	Binary, Path, Quant, Recv, Send, Store, Unit, alpha_equal, alpha_key, binder_of, dual, free_variables,
	is_clean, occurrences, parse_formula, parse_judgement, print_formula, resolve_path
)

WORKED = "|- (a!b with a!b), (a?b tens new x. x!z), ya y. y?z"

def test_parse_and_print_are_inverse():
	for text in (WORKED, "nu x |- x!z, ya y. y?z", "|- one", "|- all x. (x!b par x?b)"):
		assert_that(str(parse_judgement(text)), equal_to(text))

def test_parse_formula_builds_trees():
	f = parse_formula("(a!b tens ex x. x?b)")
	assert_that(f, equal_to(Binary("tens", Send("a", "b"), Quant("ex", "x", Recv("x", "b")))))
	assert_that(print_formula(Unit()), equal_to("one"))

def test_parse_error_carries_position():
	assert_that(calling(parse_judgement).with_args("|- (a!b tens"), raises(ParseError))
	try:
		parse_judgement("|- a!b,\n  ) ")
	except ParseError as e:
		assert_that(e.line, equal_to(2))
	else:
		pytest.fail("expected a parse error")

def test_unclean_judgements_are_refused():
	assert_that(calling(parse_judgement).with_args("|- ex x. x!b, all x. x?b"), raises(CleanlinessError))
	assert_that(calling(parse_judgement).with_args("|- ex x. x!b, x?b"), raises(CleanlinessError))
	assert_that(calling(parse_judgement).with_args("nu w |- a!b, a?b"), raises(CleanlinessError))

def test_store_entries():
	j = parse_judgement("nu x |- x!z, ya y. y?z")
	assert_that(j.store, equal_to(Store([("nu", "x")])))
	assert_that(("nu", "x") in j.store, is_(True))
	assert_that(Store.parse_entry("ya q"), equal_to(("ya", "q")))
	assert_that(calling(Store.parse_entry).with_args("xi q"), raises(ParseError))
	assert_that(j.store.add("ya", "z").remove("nu", "x"), equal_to(Store([("ya", "z")])))

def test_paths_resolve_to_occurrences():
	j = parse_judgement(WORKED)
	assert_that(j.formula_at(Path.parse("1.R.D")), equal_to(Send("x", "z")))
	assert_that(resolve_path(j, "1.R.D").binders, equal_to({"x": Path(1, ("R",))}))
	assert_that(binder_of(j, "y"), equal_to(Path(2)))
	assert_that(binder_of(j, "a"), none())
	assert_that(calling(resolve_path).with_args(j, "0.D"), raises(PathError))
	assert_that(calling(resolve_path).with_args(j, "7"), raises(PathError))
	assert_that(calling(Path.parse).with_args("0.X"), raises(PathError))

def test_path_helpers():
	p = Path.parse("1.R.D")
	assert_that(str(p), equal_to("1.R.D"))
	assert_that(p.parent, equal_to(Path(1, ("R",))))
	assert_that(p.last, equal_to("D"))
	assert_that(Path(1).is_prefix_of(p), is_(True))
	assert_that(Path(1, ("L",)).sibling(), equal_to(Path(1, ("R",))))
	assert_that(list(p.ancestors()), contains_exactly(Path(1, ("R",)), Path(1)))

def test_occurrences_in_path_order():
	j = parse_judgement("|- (a!b par c!d)")
	assert_that([str(p) for p, _ in occurrences(j)], contains_exactly("0", "0.L", "0.R"))

def test_free_variables_and_alpha():
	f = parse_formula("ex x. (x!b tens a?x)")
	assert_that(free_variables(f), equal_to(frozenset({"a", "b"})))
	assert_that(alpha_equal(f, parse_formula("ex y. (y!b tens a?y)")), is_(True))
	assert_that(alpha_equal(f, parse_formula("ex y. (y!b tens a?b)")), is_(False))
	assert_that(alpha_key(f), equal_to(alpha_key(parse_formula("ex w. (w!b tens a?w)"))))

def test_dual_swaps_connectives_and_quantifiers():
	f = parse_formula("(new x. x!z prec (a!b with one))")
	assert_that(print_formula(dual(f)), equal_to("(ya x. x?z prec (a?b plus one))"))

def test_is_clean():
	assert_that(is_clean(parse_judgement(WORKED)), is_(True))
	assert_that(parse_judgement(WORKED).roots(), has_length(3))
