from hamcrest import assert_that, calling, equal_to, has_length, is_, raises

from pilnet.errors import CaptureError, Incoherent, MalformedInput, WitnessViolation
from pilnet.structure import BinderRef, NominalLink, SequentLink
from pilnet.substitution import (
	EMPTY, Substitution, apply, coherent, compose, from_json, join, restrict, to_json, validate_dualizer
)
from pilnet.syntax import Path, parse_formula, parse_judgement

def test_identity_bindings_are_dropped():
	assert_that(Substitution({"x": "x"}), equal_to(EMPTY))
	assert_that(Substitution({"x": "x", "y": "z"}), has_length(1))

def test_compose_applies_right_first():
	s = Substitution({"y": "z"})
	t = Substitution({"x": "y"})
	assert_that(compose(s, t), equal_to(Substitution({"x": "z", "y": "z"})))
	assert_that(compose(t, s), equal_to(Substitution({"x": "y", "y": "z"})))

def test_restrict_removes_one_binding():
	s = Substitution({"x": "c", "y": "c"})
	assert_that(restrict(s, "x"), equal_to(Substitution({"y": "c"})))
	assert_that(restrict(s, "w"), equal_to(s))

def test_join_needs_agreement():
	assert_that(join(Substitution({"x": "a"}), Substitution({"y": "b"})), equal_to(Substitution({"x": "a", "y": "b"})))
	assert_that(calling(join).with_args(Substitution({"x": "a"}), Substitution({"x": "b"})), raises(Incoherent))
	assert_that(coherent(Substitution({"x": "a"}), Substitution({"x": "a"})), is_(True))

def test_apply_respects_binders():
	s = Substitution({"x": "c"})
	assert_that(str(apply(s, parse_formula("(x!b tens ex x. x?b)"))), equal_to("(c!b tens ex x. x?b)"))
	assert_that(calling(apply).with_args(Substitution({"b": "y"}), parse_formula("ex y. y!b")), raises(CaptureError))

def test_json_forms():
	s = Substitution({"y": "x"})
	assert_that(from_json(to_json(s)), equal_to(s))
	assert_that(calling(from_json).with_args({"y": 3}), raises(MalformedInput))

def test_dualizer_of_an_axiom_link():
	j = parse_judgement("|- ex x. x!b, a?b")
	link = SequentLink([Path(0, ("D",)), Path(1)])
	assert_that(validate_dualizer("l0", link, Substitution({"x": "a"}), j), is_(True))
	assert_that(calling(validate_dualizer).with_args("l0", link, EMPTY, j), raises(WitnessViolation))
	assert_that(calling(validate_dualizer).with_args("l0", link, Substitution({"x": "a", "a": "x"}), j), raises(WitnessViolation))

def test_dualizer_of_a_nominal_link():
	j = parse_judgement("|- new x. x!z, ya y. y?z")
	link = NominalLink(BinderRef(Path(0)), BinderRef(Path(1)))
	assert_that(validate_dualizer("n", link, Substitution({"y": "x"}), j), is_(True))
	assert_that(calling(validate_dualizer).with_args("n", link, EMPTY, j), raises(WitnessViolation))
	assert_that(calling(validate_dualizer).with_args("n", link, Substitution({"y": "z"}), j), raises(WitnessViolation))
