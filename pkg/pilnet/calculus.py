"""
Sequent-calculus derivations

A derivation node stores its rule, conclusion and the parameters needed to recompute
its premises (principal indices, witness, context/store split). Premise judgements are
always computed from the conclusion, never read from input.
"""

import itertools
import logging
from collections import Counter

import attr
from mmh3 import hash128

from pilnet import substitution
from pilnet.errors import (
	BudgetExceeded, CaptureError, CleanlinessError, DerivationFormatError, DerivationViolation, PilnetError
)
from pilnet.substitution import Substitution
from pilnet.syntax import (
	Binary, Judgement, Path, Quant, Recv, Send, Store, Unit,
	alpha_key, check_clean, fresh_variable, free_variables, parse_judgement
)

logger = logging.getLogger(__name__)

"""
List of rule metadata
"""
rule_names = [
	# tuple has rule name, number of premises, principal connective or quantifier
	("ax", 0, None),
	("one", 0, None),
	("par", 1, "par"),
	("tens", 2, "tens"),
	("prec", 2, "prec"),
	("plus_left", 1, "plus"),
	("plus_right", 1, "plus"),
	("with", 2, "with"),
	("forall", 1, "all"),
	("exists", 1, "ex"),
	("unit_nu", 1, "new"),
	("unit_ya", 1, "ya"),
	("load_nu", 1, "new"),
	("load_ya", 1, "ya"),
	("pop_nu", 1, "ya"),
	("pop_ya", 1, "new"),
]

"""
Dictionary to lookup rule metadata via name
This dictionary is auto generated
"""
rules = {}
for k, v in enumerate(rule_names):
	rules[v[0]] = (k, v[1], v[2])

UNARY_RULES = tuple(name for name, arity, _ in rule_names if arity == 1)
BINARY_RULES = ("tens", "prec")
WITNESS_RULES = ("exists", "pop_nu", "pop_ya")

# Store flavor a pop rule consumes
POP_FLAVOR = {"pop_nu": "nu", "pop_ya": "ya"}

@attr.s(frozen=True)
class Split(object):
	"""
	Context and store distribution of a tens or prec node.
	left/right list conclusion indices of the non-principal formulas.
	"""
	left = attr.ib(converter=lambda xs: tuple(sorted(xs)))
	right = attr.ib(converter=lambda xs: tuple(sorted(xs)))
	store_left = attr.ib(default=Store(), converter=lambda s: s if isinstance(s, Store) else Store(s))
	store_right = attr.ib(default=Store(), converter=lambda s: s if isinstance(s, Store) else Store(s))

@attr.s(frozen=True)
class Premise(object):
	"""
	A computed premise: its judgement and, per formula, the conclusion occurrence it came from
	"""
	judgement = attr.ib()
	origins = attr.ib(converter=tuple)

	def origin_path(self, path):
		"""
		Map a path of this premise to the conclusion occurrence it denotes
		"""
		index, prefix = self.origins[path.index]
		return Path(index, tuple(prefix) + path.steps)

@attr.s(frozen=True, cache_hash=True)
class Derivation(object):
	rule = attr.ib()
	conclusion = attr.ib()
	premises = attr.ib(default=(), converter=tuple)
	principal = attr.ib(default=(), converter=tuple)
	witness = attr.ib(default=None)
	split = attr.ib(default=None)

	@rule.validator
	def _check_rule(self, attribute, value):
		if value not in rules:
			raise DerivationFormatError("unknown rule {!r}".format(value))

	@classmethod
	def build(cls, rule, conclusion, premises=(), principal=(), witness=None, split=None):
		"""
		Assemble a node, reordering the supplied premise derivations (and the order of
		formulas in their conclusions) to match the computed premises
		"""
		node = cls(rule, conclusion, (), principal, witness, split)
		expected = premise_judgements(node)
		if len(expected) != len(premises):
			raise DerivationViolation((), "{} takes {} premises".format(rule, len(expected)))
		remaining = list(premises)
		attached = []
		for premise in expected:
			match = _take_matching(remaining, premise.judgement)
			if match is None:
				raise DerivationViolation((), "no supplied derivation concludes {}".format(premise.judgement))
			attached.append(match)
		return attr.evolve(node, premises=attached)

def _same_multiset(a, b):
	return a.store == b.store and Counter(a.sequent) == Counter(b.sequent)

def _take_matching(candidates, judgement):
	for i, d in enumerate(candidates):
		if d.conclusion == judgement:
			return candidates.pop(i)
	for i, d in enumerate(candidates):
		if _same_multiset(d.conclusion, judgement):
			return reorder(candidates.pop(i), judgement)
	return None

def reorder(d, judgement):
	"""
	The same derivation concluding a permutation of its conclusion's sequent
	"""
	if d.conclusion == judgement:
		return d
	old = list(d.conclusion.sequent)
	used = set()
	new_to_old = []
	for formula in judgement.sequent:
		index = next(i for i, f in enumerate(old) if f == formula and i not in used)
		used.add(index)
		new_to_old.append(index)
	old_to_new = dict((o, n) for n, o in enumerate(new_to_old))
	split = d.split
	if split is not None:
		split = Split([old_to_new[i] for i in split.left], [old_to_new[i] for i in split.right], split.store_left, split.store_right)
	principal = [old_to_new[i] for i in d.principal]
	if d.rule == "prec":
		principal = sorted(principal)
	node = Derivation(d.rule, judgement, (), principal, d.witness, split)
	expected = premise_judgements(node)
	return attr.evolve(node, premises=[reorder(sub, e.judgement) for sub, e in zip(d.premises, expected)])

def _replace_at(sequent, index, formulas):
	return tuple(sequent[:index]) + tuple(formulas) + tuple(sequent[index + 1:])

def _in_place(conclusion, index, formulas, store=None):
	"""
	Premise with formula index replaced (in place) by its immediate subformulas
	"""
	steps = {1: [("D",)], 2: [("L",), ("R",)]}
	origins = [(j, ()) for j in range(index)]
	if len(formulas) == 1 and isinstance(conclusion.sequent[index], Binary):
		origins.append((index, (formulas[0][1],)))
		formulas = [formulas[0][0]]
	else:
		origins.extend((index, step) for step in steps[len(formulas)])
	origins.extend((j, ()) for j in range(index + 1, len(conclusion.sequent)))
	store = conclusion.store if store is None else store
	return Premise(Judgement(_replace_at(conclusion.sequent, index, formulas), store), origins)

def _side(conclusion, indices, replaced, store):
	"""
	Premise made of the formulas at indices, with principal indices replaced by a subformula
	"""
	sequent = []
	origins = []
	for j in sorted(indices):
		if j in replaced:
			formula, step = replaced[j]
			sequent.append(formula)
			origins.append((j, (step,)))
		else:
			sequent.append(conclusion.sequent[j])
			origins.append((j, ()))
	return Premise(Judgement(sequent, store), origins)

def _instantiate(body, bound, witness):
	try:
		return substitution.apply(Substitution({bound: witness}), body)
	except CaptureError:
		raise DerivationViolation((), "witness {} is captured in the body".format(witness))

def _fresh_for(conclusion, index, var):
	"""
	The side condition x not free in the rest of the sequent and not in the store
	"""
	rest = conclusion.sequent[:index] + conclusion.sequent[index + 1:]
	for formula in rest:
		if var in free_variables(formula):
			return False
	return var not in conclusion.store.variables()

def premise_judgements(d):
	"""
	Args:
		d: derivation node (its premises are ignored)
	Returns:
		list of Premise, in rule order
	Raises DerivationViolation (with an empty path) when the rule does not fit the conclusion.
	"""
	conclusion = d.conclusion
	sequent = conclusion.sequent
	store = conclusion.store
	rule = d.rule
	_, arity, shape = rules[rule]

	if rule == "ax":
		kinds = sorted(type(f).__name__ for f in sequent)
		if len(store) or kinds != ["Recv", "Send"]:
			raise DerivationViolation((), "ax concludes exactly x!y, x?y with an empty store")
		send, recv = sorted(sequent, key=lambda f: isinstance(f, Recv))
		if (send.subject, send.object) != (recv.subject, recv.object):
			raise DerivationViolation((), "ax atoms are not dual")
		return []
	if rule == "one":
		if len(store) or list(sequent) != [Unit()]:
			raise DerivationViolation((), "one concludes exactly one with an empty store")
		return []
	if rule == "prec":
		return _prec_premises(d)

	if len(d.principal) != 1 or not 0 <= d.principal[0] < len(sequent):
		raise DerivationViolation((), "{} needs one principal formula".format(rule))
	index = d.principal[0]
	formula = sequent[index]
	if isinstance(formula, Binary):
		if formula.connective != shape:
			raise DerivationViolation((), "principal formula is not a {} formula".format(shape))
	elif not isinstance(formula, Quant) or formula.quantifier != shape:
		raise DerivationViolation((), "principal formula is not a {} formula".format(shape))

	if rule == "par":
		return [_in_place(conclusion, index, [formula.left, formula.right])]
	if rule == "plus_left":
		return [_in_place(conclusion, index, [(formula.left, "L")])]
	if rule == "plus_right":
		return [_in_place(conclusion, index, [(formula.right, "R")])]
	if rule == "with":
		return [_in_place(conclusion, index, [(formula.left, "L")]), _in_place(conclusion, index, [(formula.right, "R")])]
	if rule == "tens":
		split = _check_split(d, [index])
		return [
			_side(conclusion, split.left + (index,), {index: (formula.left, "L")}, split.store_left),
			_side(conclusion, split.right + (index,), {index: (formula.right, "R")}, split.store_right),
		]

	x = formula.bound
	if rule == "exists":
		if d.witness is None:
			raise DerivationViolation((), "exists needs a witness")
		return [_in_place(conclusion, index, [_instantiate(formula.body, x, d.witness)])]
	if rule in POP_FLAVOR:
		entry = (POP_FLAVOR[rule], d.witness)
		if d.witness is None or entry not in store:
			raise DerivationViolation((), "{} consumes a {} store entry for its witness".format(rule, POP_FLAVOR[rule]))
		return [_in_place(conclusion, index, [_instantiate(formula.body, x, d.witness)], store.remove(*entry))]

	if not _fresh_for(conclusion, index, x):
		raise DerivationViolation((), "{} occurs free in the context or the store".format(x))
	if rule.startswith("load"):
		return [_in_place(conclusion, index, [formula.body], store.add(rule[len("load_"):], x))]
	return [_in_place(conclusion, index, [formula.body])]

def _check_split(d, principal):
	split = d.split
	if split is None:
		raise DerivationViolation((), "{} needs a context split".format(d.rule))
	others = set(range(len(d.conclusion.sequent))) - set(principal)
	if set(split.left) & set(split.right) or set(split.left) | set(split.right) != others:
		raise DerivationViolation((), "split does not partition the context")
	if split.store_left.entries & split.store_right.entries or split.store_left.union(split.store_right) != d.conclusion.store:
		raise DerivationViolation((), "split does not partition the store")
	return split

def _prec_premises(d):
	conclusion = d.conclusion
	principal = list(d.principal)
	if len(set(principal)) != len(principal):
		raise DerivationViolation((), "prec principal formulas repeat")
	for index in principal:
		if not 0 <= index < len(conclusion.sequent):
			raise DerivationViolation((), "prec principal index out of range")
		formula = conclusion.sequent[index]
		if not isinstance(formula, Binary) or formula.connective != "prec":
			raise DerivationViolation((), "principal formula is not a prec formula")
	split = _check_split(d, principal)
	if not principal and (not split.left or not split.right):
		raise DerivationViolation((), "mix needs a non-empty context on both sides")
	lefts = dict((i, (conclusion.sequent[i].left, "L")) for i in principal)
	rights = dict((i, (conclusion.sequent[i].right, "R")) for i in principal)
	return [
		_side(conclusion, split.left + tuple(principal), lefts, split.store_left),
		_side(conclusion, split.right + tuple(principal), rights, split.store_right),
	]

def check_derivation(d):
	"""
	True when every node fits its rule and the root concludes a clean judgement with an
	empty store; raises DerivationViolation(path, clause) otherwise
	"""
	if len(d.conclusion.store):
		raise DerivationViolation((), "root store must be empty")
	try:
		check_clean(d.conclusion)
	except CleanlinessError as e:
		raise DerivationViolation((), "conclusion is not clean: {}".format(e))
	stack = [(d, ())]
	while stack:
		node, path = stack.pop()
		try:
			expected = premise_judgements(node)
		except DerivationViolation as e:
			raise DerivationViolation(path, e.clause)
		if len(expected) != len(node.premises):
			raise DerivationViolation(path, "{} takes {} premises".format(node.rule, len(expected)))
		for k, (premise, sub) in enumerate(zip(expected, node.premises)):
			if sub.conclusion != premise.judgement:
				raise DerivationViolation(path + (k,), "conclusion does not match the premise of {}".format(node.rule))
			stack.append((sub, path + (k,)))
	return True

def subderivation(d, path):
	for k in path:
		d = d.premises[k]
	return d

def rule_counts(d):
	counts = Counter()
	stack = [d]
	while stack:
		node = stack.pop()
		counts[node.rule] += 1
		stack.extend(node.premises)
	return counts

def size(d):
	return sum(rule_counts(d).values())

# JSON

def _encode_principal(d):
	if d.rule == "prec":
		return [str(i) for i in d.principal]
	return str(d.principal[0])

def to_json(d, root=True):
	obj = {"rule": d.rule}
	if root:
		obj["conclusion"] = str(d.conclusion)
	if d.principal or d.rule == "prec":
		obj["principal"] = _encode_principal(d)
	if d.witness is not None:
		obj["witness"] = d.witness
	if d.split is not None:
		obj["split"] = {
			"left": [str(i) for i in d.split.left],
			"right": [str(i) for i in d.split.right],
			"storeLeft": [Store.print_entry(e) for e in d.split.store_left],
			"storeRight": [Store.print_entry(e) for e in d.split.store_right],
		}
	if d.premises:
		obj["premises"] = [to_json(p, root=False) for p in d.premises]
	return obj

def _index(text):
	try:
		path = Path.parse(text)
	except PilnetError:
		raise DerivationFormatError("bad formula index {!r}".format(text))
	if path.steps:
		raise DerivationFormatError("principal and split entries name whole formulas, got {}".format(text))
	return path.index

def from_json(obj, conclusion=None):
	"""
	Rebuild a derivation; only the root carries its conclusion, premises are recomputed
	"""
	if not isinstance(obj, dict) or "rule" not in obj:
		raise DerivationFormatError("derivation node needs a rule")
	if conclusion is None:
		if "conclusion" not in obj:
			raise DerivationFormatError("root derivation node needs a conclusion")
		conclusion = parse_judgement(obj["conclusion"])
	principal = obj.get("principal", [])
	if isinstance(principal, str):
		principal = [principal]
	split = None
	if "split" in obj:
		raw = obj["split"]
		split = Split(
			[_index(i) for i in raw.get("left", [])],
			[_index(i) for i in raw.get("right", [])],
			[Store.parse_entry(e) for e in raw.get("storeLeft", [])],
			[Store.parse_entry(e) for e in raw.get("storeRight", [])],
		)
	node = Derivation(obj["rule"], conclusion, (), [_index(i) for i in principal], obj.get("witness"), split)
	expected = premise_judgements(node)
	children = obj.get("premises", [])
	if len(children) != len(expected):
		raise DerivationFormatError("{} node has {} premises, expected {}".format(node.rule, len(children), len(expected)))
	return attr.evolve(node, premises=[from_json(c, e.judgement) for c, e in zip(children, expected)])

# PROOF SEARCH

@attr.s(frozen=True)
class Proved(object):
	derivation = attr.ib()
	provable = True

@attr.s(frozen=True)
class Unprovable(object):
	explored = attr.ib(default=0)
	provable = False

def judgement_key(judgement):
	"""
	mmh3 fingerprint of the judgement up to renaming of bound variables and formula order
	"""
	formulas = sorted(alpha_key(f) for f in judgement.sequent)
	text = str(judgement.store) + "|" + ",".join(formulas)
	return hash128(text)

class ProofSearch(object):
	"""
	Exhaustive backward search over every rule instance.
	Failed judgements are remembered by judgement_key.
	"""
	def __init__(self, budget):
		self.budget = budget
		self.expanded = 0
		self.failed = set()
		self.logger = logging.getLogger(name=self.__class__.__name__)

	def prove(self, judgement):
		key = judgement_key(judgement)
		if key in self.failed:
			return None
		self.expanded += 1
		if self.expanded > self.budget:
			raise BudgetExceeded(self.budget)
		for candidate in self.candidates(judgement):
			try:
				expected = premise_judgements(candidate)
			except DerivationViolation:
				continue
			premises = []
			for premise in expected:
				found = self.prove(premise.judgement)
				if found is None:
					break
				premises.append(found)
			else:
				return attr.evolve(candidate, premises=premises)
		self.failed.add(key)
		return None

	def candidates(self, judgement):
		"""
		Every rule instance whose conclusion is the judgement (side conditions unchecked)
		"""
		sequent = judgement.sequent
		store = judgement.store
		if len(sequent) == 1 and isinstance(sequent[0], Unit):
			yield Derivation("one", judgement)
		if len(sequent) == 2 and {type(f) for f in sequent} == {Send, Recv}:
			yield Derivation("ax", judgement)

		names = free_variables(judgement) | store.variables()
		fresh = fresh_variable(judgement.variables())
		for index, formula in enumerate(sequent):
			if isinstance(formula, Binary):
				if formula.connective == "par":
					yield Derivation("par", judgement, principal=[index])
				elif formula.connective == "plus":
					yield Derivation("plus_left", judgement, principal=[index])
					yield Derivation("plus_right", judgement, principal=[index])
				elif formula.connective == "with":
					yield Derivation("with", judgement, principal=[index])
				elif formula.connective == "tens":
					for split in _splits(judgement, [index]):
						yield Derivation("tens", judgement, principal=[index], split=split)
			elif isinstance(formula, Quant):
				q = formula.quantifier
				if q == "all":
					yield Derivation("forall", judgement, principal=[index])
				elif q == "ex":
					for witness in sorted(names) + [fresh]:
						yield Derivation("exists", judgement, principal=[index], witness=witness)
				else:
					flavor = "nu" if q == "new" else "ya"
					yield Derivation("unit_" + flavor, judgement, principal=[index])
					yield Derivation("load_" + flavor, judgement, principal=[index])
					pop = "pop_ya" if q == "new" else "pop_nu"
					for entry_flavor, var in store:
						if entry_flavor == POP_FLAVOR[pop]:
							yield Derivation(pop, judgement, principal=[index], witness=var)

		precs = [i for i, f in enumerate(sequent) if isinstance(f, Binary) and f.connective == "prec"]
		for n in range(len(precs) + 1):
			for chosen in itertools.combinations(precs, n):
				for split in _splits(judgement, list(chosen)):
					if n or (split.left and split.right):
						yield Derivation("prec", judgement, principal=list(chosen), split=split)

def _splits(judgement, principal):
	others = [i for i in range(len(judgement.sequent)) if i not in principal]
	entries = judgement.store.sorted()
	for mask in range(2 ** len(others)):
		left = [i for k, i in enumerate(others) if mask >> k & 1]
		right = [i for k, i in enumerate(others) if not mask >> k & 1]
		for store_mask in range(2 ** len(entries)):
			store_left = [e for k, e in enumerate(entries) if store_mask >> k & 1]
			store_right = [e for k, e in enumerate(entries) if not store_mask >> k & 1]
			yield Split(left, right, store_left, store_right)

def prove_search(judgement, budget=10 ** 6):
	"""
	Returns Proved(derivation) or Unprovable(); raises BudgetExceeded past budget search nodes
	"""
	search = ProofSearch(budget)
	found = search.prove(judgement)
	logger.debug("proof search expanded %d judgements", search.expanded)
	if found is None:
		return Unprovable(search.expanded)
	return Proved(found)
