"""
Variable-to-variable substitutions: the algebra behind dualizers and witness maps
"""

import attr

from pilnet.errors import CaptureError, Incoherent, MalformedInput, WitnessViolation
from pilnet.syntax import (
	VARIABLE, Binary, Formula, Judgement, Quant, Recv, Send, Store, Unit, free_variables
)

def _normalize(bindings):
	if isinstance(bindings, Substitution):
		return bindings.bindings
	if isinstance(bindings, dict):
		bindings = bindings.items()
	return tuple(sorted((k, v) for k, v in bindings if k != v))

@attr.s(frozen=True, cache_hash=True, repr=False)
class Substitution(object):
	"""
	Finite map variable -> variable, identity outside its domain.
	Identity bindings are never stored, so {x: x} equals the empty map.
	"""
	bindings = attr.ib(default=(), converter=_normalize)

	@bindings.validator
	def _check_bindings(self, attribute, value):
		keys = [k for k, _ in value]
		if len(keys) != len(set(keys)):
			raise MalformedInput("substitution binds a variable twice")

	def __repr__(self):
		return "Substitution({})".format(self.as_dict())

	def __str__(self):
		return "{" + ", ".join("{}->{}".format(k, v) for k, v in self.bindings) + "}"

	def __call__(self, var):
		return self.as_dict().get(var, var)

	def __len__(self):
		return len(self.bindings)

	def __iter__(self):
		return iter(self.bindings)

	def as_dict(self):
		return dict(self.bindings)

	def domain(self):
		return frozenset(k for k, _ in self.bindings)

	def image(self):
		return frozenset(v for _, v in self.bindings)

EMPTY = Substitution()

def apply(s, value, bound=frozenset()):
	"""
	Simultaneous substitution on a variable, formula, store, judgement or sequence.
	Occurrences bound inside the value are left alone.
	"""
	if not len(s):
		return value
	if isinstance(value, str):
		return s(value)
	if isinstance(value, Formula):
		return _apply_formula(s, value, bound)
	if isinstance(value, Store):
		return Store((flavor, s(var)) for flavor, var in value.entries)
	if isinstance(value, Judgement):
		return Judgement([_apply_formula(s, f, bound) for f in value.sequent], apply(s, value.store))
	return [apply(s, item, bound) for item in value]

def _apply_var(s, var, bound):
	if var in bound:
		return var
	image = s(var)
	if image != var and image in bound:
		raise CaptureError(var, image)
	return image

def _apply_formula(s, formula, bound):
	if isinstance(formula, Unit):
		return formula
	if isinstance(formula, Send):
		return Send(_apply_var(s, formula.subject, bound), _apply_var(s, formula.object, bound))
	if isinstance(formula, Recv):
		return Recv(_apply_var(s, formula.subject, bound), _apply_var(s, formula.object, bound))
	if isinstance(formula, Binary):
		return Binary(formula.connective, _apply_formula(s, formula.left, bound), _apply_formula(s, formula.right, bound))
	return Quant(formula.quantifier, formula.bound, _apply_formula(s, formula.body, bound | {formula.bound}))

def compose(s, t):
	"""
	The map v -> s(t(v)), i.e. s applied after t
	"""
	result = {v: s(w) for v, w in t.bindings}
	for v, w in s.bindings:
		result.setdefault(v, w)
	return Substitution(result)

def restrict(s, var):
	return Substitution((k, v) for k, v in s.bindings if k != var)

def coherent(s, t):
	try:
		join(s, t)
	except Incoherent:
		return False
	return True

def join(s, t):
	"""
	Union of two maps agreeing on their common domain.
	Raises Incoherent naming the first clashing variable otherwise.
	"""
	result = s.as_dict()
	for v, w in t.bindings:
		if result.setdefault(v, w) != w:
			raise Incoherent(v)
	return Substitution(result)

def join_all(substitutions):
	result = EMPTY
	for s in substitutions:
		result = join(result, s)
	return result

def to_json(s):
	return s.as_dict()

def from_json(obj):
	if not isinstance(obj, dict):
		raise MalformedInput("substitution must be a JSON object")
	for k, v in obj.items():
		if not isinstance(v, str) or not VARIABLE.match(k) or not VARIABLE.match(v):
			raise MalformedInput("bad substitution entry {!r}: {!r}".format(k, v))
	return Substitution(obj)

WITNESS_QUANTIFIERS = ("ex", "new", "ya")

def _witness_bound(context, var):
	path = context.binders.get(var)
	return path is not None and context.formula_at(path).quantifier in WITNESS_QUANTIFIERS

def validate_dualizer(leaf_id, link, s, context):
	"""
	Check one dualizer against its axiomatic link.
	Args:
		leaf_id: id used in the violation report
		link: SequentLink or NominalLink
		s: the dualizer's substitution
		context: judgement the link lives in
	"""
	if link.nominal:
		nu, ya = link.variables(context)
		if len(s) > 1 or not s.domain() <= {nu, ya}:
			raise WitnessViolation(leaf_id, "nominal dualizer must bind at most one of its two variables")
		if s(nu) != s(ya):
			raise WitnessViolation(leaf_id, "nominal dualizer must identify {} and {}".format(nu, ya))
		for var in s.domain():
			if not _witness_bound(context, var):
				raise WitnessViolation(leaf_id, "{} is not bound by a nominal quantifier".format(var))
		return True

	formulas = [context.formula_at(path) for path in link.paths]
	if len(formulas) == 1 and isinstance(formulas[0], Unit):
		if len(s):
			raise WitnessViolation(leaf_id, "dualizer of a unit link must be empty")
		return True
	sends = [f for f in formulas if isinstance(f, Send)]
	recvs = [f for f in formulas if isinstance(f, Recv)]
	if len(formulas) != 2 or len(sends) != 1 or len(recvs) != 1:
		raise WitnessViolation(leaf_id, "link is not axiomatic")
	if s(sends[0].subject) != s(recvs[0].subject) or s(sends[0].object) != s(recvs[0].object):
		raise WitnessViolation(leaf_id, "dualizer does not make {} and {} dual".format(sends[0], recvs[0]))

	mentioned = free_variables(sends[0]) | free_variables(recvs[0])
	for var in s.domain():
		if not _witness_bound(context, var):
			raise WitnessViolation(leaf_id, "{} is not bound by an existential or nominal quantifier".format(var))
		if var not in mentioned:
			raise WitnessViolation(leaf_id, "{} does not occur in the link".format(var))
	return True

def validate_witness_map(witnesses, leaves, context):
	"""
	Args:
		witnesses: dict leaf id -> Substitution
		leaves: dict leaf id -> link
		context: judgement of the structure
	Returns:
		True, or raises WitnessViolation for the first failing leaf
	"""
	for leaf_id in sorted(leaves):
		if leaf_id not in witnesses:
			raise WitnessViolation(leaf_id, "no dualizer")
		validate_dualizer(leaf_id, leaves[leaf_id], witnesses[leaf_id], context)
	for leaf_id in sorted(witnesses):
		if leaf_id not in leaves:
			raise WitnessViolation(leaf_id, "dualizer for a leaf that does not exist")
	return True
