"""
Named fixtures and generators

Fixture nets and derivations are written in their JSON forms so they double as
examples of the file formats the command line reads.
"""

import functools
import itertools
import json
import logging
import random
from pathlib import Path as FilePath

from pilnet import calculus, structure, substitution
from pilnet.calculus import Derivation, Split
from pilnet.errors import DerivationViolation, MalformedInput, StructureViolation
from pilnet.structure import BinderRef, Leaf, NominalLink, PreStructure, SequentLink, validate_structure
from pilnet.substitution import Substitution
from pilnet.syntax import (
	FLAVOR_OF, FLAVORS, Binary, Judgement, Quant, Recv, Send, Unit, all_variables, alpha_key, free_variables,
	parse_judgement
)

logger = logging.getLogger(__name__)

WORKED_CONTEXT = "|- (a!b with a!b), (a?b tens new x. x!z), ya y. y?z"
D0_CONTEXT = "|- new x. x!z, ya y. y?z"
MALL_CONTEXT = "|- (a!b with a!b), (a?b tens c?d), c!d"

def _ax():
	return {"rule": "ax"}

def _d0_json(root=False):
	obj = {"rule": "load_nu", "principal": "0", "premises": [
		{"rule": "pop_nu", "principal": "1", "witness": "x", "premises": [_ax()]},
	]}
	if root:
		obj["conclusion"] = D0_CONTEXT
	return obj

WORKED_DERIVATION = {
	"rule": "with",
	"conclusion": WORKED_CONTEXT,
	"principal": "0",
	"premises": [
		{"rule": "tens", "principal": "1", "split": {"left": ["0"], "right": ["2"]}, "premises": [_ax(), _d0_json()]},
		{"rule": "tens", "principal": "1", "split": {"left": ["0"], "right": ["2"]}, "premises": [_ax(), _d0_json()]},
	],
}

def _worked_branch(side):
	return {"conc": [
		{"leaf": {"id": "a" + side, "paths": ["0." + side, "1.L"]}},
		{"leaf": {"id": "n" + side, "nominal": {"nu": {"binder": "1.R"}, "ya": {"binder": "2"}}}},
		{"leaf": {"id": "c" + side, "paths": ["1.R.D", "2.D"]}},
	]}

WORKED_NET = {
	"context": WORKED_CONTEXT,
	"tree": {"conf": [_worked_branch("L"), _worked_branch("R")]},
	"witnesses": {"nL": {"y": "x"}, "nR": {"y": "x"}, "cL": {"y": "x"}, "cR": {"y": "x"}},
}

_TENS_BRANCH = {"rule": "tens", "principal": "1", "split": {"left": ["0"], "right": ["2"]}, "premises": [_ax(), _ax()]}

MALL_WITH_FIRST = {
	"rule": "with",
	"conclusion": MALL_CONTEXT,
	"principal": "0",
	"premises": [_TENS_BRANCH, _TENS_BRANCH],
}

MALL_TENS_FIRST = {
	"rule": "tens",
	"conclusion": MALL_CONTEXT,
	"principal": "1",
	"split": {"left": ["0"], "right": ["2"]},
	"premises": [{"rule": "with", "principal": "0", "premises": [_ax(), _ax()]}, _ax()],
}

def _net(context, tree, witnesses=None):
	return {"context": context, "tree": tree, "witnesses": witnesses or {}}

def _leaf(leaf_id, *paths):
	return {"leaf": {"id": leaf_id, "paths": list(paths)}}

TENSOR_SELF_NET = _net("|- (a!b tens a?b)", _leaf("l0", "0.L", "0.R"))

# Two links sharing the middle formula: merging them would hold 1 twice
OVERLAP_NET = _net(
	"|- a!b, (a?b plus b!a), b?a",
	{"conc": [_leaf("l0", "0", "1.L"), _leaf("l1", "1.R", "2")]},
)

# Pre-structures where the first coalescence step decides the outcome: the shared
# last formula is held by two links, and whichever closes first blocks the other.
# Both are stuck whatever the order, but at different structures.
PREC_DIVERGENCE_NET = _net(
	"|- (a!b prec c!d), (e!f prec g!h), (i!j prec k!l), (m!n prec o!p), q!r, s!t",
	{"conc": [
		_leaf("red", "0.L", "1.L", "2.L", "3.L", "4"),
		_leaf("blue", "0.R", "1.R", "5"),
		_leaf("violet", "2.R", "3.R", "5"),
	]},
)

TENS_DIVERGENCE_NET = _net(
	"|- (a!b prec c!d), (e!f prec g!h), (i!j tens k!l), q!r, s!t",
	{"conc": [
		_leaf("red", "0.L", "1.L", "2.L", "3"),
		_leaf("blue", "0.R", "1.R", "4"),
		_leaf("violet", "2.R", "4"),
	]},
)

# accepted only when the tensors merge before the prec cycle closes
PREC_TENS_CYCLE_NET = _net(
	"|- (a!b prec c!d), (a?b prec e!f), (c?d tens g!h), (e?f tens g?h)",
	{"conc": [_leaf("l0", "0.L", "1.L"), _leaf("l1", "0.R", "2.L"), _leaf("l2", "1.R", "3.L"), _leaf("l3", "2.R", "3.R")]},
)

FLATTENING_PAIR_NET = _net(
	"|- (a!b with a!b), (c!d with c!d), (a?b tens c?d)",
	{"conc": [
		{"conf": [_leaf("a", "0.L", "2.L"), _leaf("b", "0.R", "2.L")]},
		{"conf": [_leaf("c", "1.L", "2.R"), _leaf("d", "1.R", "2.R")]},
	]},
)

# Provable judgements whose search-found derivations make up the permutation corpus.
# Together they exercise every unary rule against every binary rule and the with rule.
JUDGEMENTS = [
	("ax", "|- a!b, a?b"),
	("one", "|- one"),
	("mix_units", "|- one, one"),
	("par_tens", "|- (a!b par c!d), (a?b tens c?d)"),
	("par_prec", "|- (a!b par c!d), (a?b prec c?d)"),
	("plus", "|- (a!b plus c!d), a?b"),
	("plus_prec", "|- ((a!b plus e!f) prec c!d), (a?b prec c?d)"),
	("with_plus", "|- (a!b with c!d), (a?b plus c?d)"),
	("mall", MALL_CONTEXT),
	("exists", "|- ex x. x!b, a?b"),
	("forall_exists", "|- all x. x!b, ex y. y?b"),
	("d0", D0_CONTEXT),
	("d0_dual", "|- ya y. y!z, new x. x?z"),
	("worked", WORKED_CONTEXT),
	("prec_pair", "|- (a!b prec c!d), (a?b prec c?d)"),
	("tens_par_chain", "|- ((a!b tens c!d) tens e!f), ((a?b par c?d) par e?f)"),
	("exists_tens", "|- ex x. (x!b tens c!d), a?b, c?d"),
	("exists_prec", "|- (ex x. x!b prec c!d), (a?b prec c?d)"),
	("forall_prec", "|- all x. (x?b prec c?d), ex y. (y!b prec c!d)"),
	("with_exists", "|- (a!b with a!d), ex x. (x?b plus x?d)"),
	("with_forall", "|- (all x. x!b with all y. y!b), ex z. z?b"),
	("with_pair_tens", "|- (a!b with a!b), (c!d with c!d), (a?b tens c?d)"),
	("nominal_tens", "|- (new x. x!z tens a!b), ya y. y?z, a?b"),
	("load_prec", "|- (new x. x!z prec a!b), (ya y. y?z prec a?b)"),
	("unit_prec", "|- (new x. one prec a!b), (one prec a?b)"),
	("unit", "|- new x. one"),
	("mix_pars", "|- (a!b par c!d), (c?d par a?b)"),
	("prec_tens_cycle", PREC_TENS_CYCLE_NET["context"]),
	("exists_load", "|- ex w. new x. x!w, ya y. y?z"),
	("forall_par", "|- all x. (x!b par x?b)"),
	("par_nominal", "|- (a!b par new x. x!z), a?b, ya y. y?z"),
]

# Fixture name -> derivation JSON kept verbatim rather than searched for
NAMED_DERIVATIONS = {
	"worked_written": WORKED_DERIVATION,
	"d0_written": _d0_json(root=True),
	"mall_with_first": MALL_WITH_FIRST,
	"mall_tens_first": MALL_TENS_FIRST,
}

# d0 read the other way round: the ya binder is loaded and new x is popped
D0_YA = {
	"rule": "load_ya", "conclusion": D0_CONTEXT, "principal": "1", "premises": [
		{"rule": "pop_ya", "principal": "0", "witness": "y", "premises": [_ax()]},
	],
}

def _root(context, obj):
	return dict(obj, conclusion=context)

def _prec(principal, left, right, premises, store_left=()):
	split = {"left": list(left), "right": list(right), "storeLeft": list(store_left)}
	return {"rule": "prec", "principal": principal, "split": split, "premises": premises}

def _tens(principal, left, right, premises):
	return {"rule": "tens", "principal": principal, "split": {"left": list(left), "right": list(right)}, "premises": premises}

def _unary(rule, principal, premise, witness=None):
	obj = {"rule": rule, "principal": principal, "premises": [premise]}
	if witness is not None:
		obj["witness"] = witness
	return obj

_NOMINAL_TENS = "|- new x. (x!z tens a!b), ya y. y?z, {}"

def _popped_tens(third):
	"""
	load_nu on 0 over third over pop_nu on 1 over a tensor of two axioms
	"""
	popped = _unary("pop_nu", "1", _tens("0", ["1"], ["2"], [_ax(), _ax()]), witness="x")
	return _unary("load_nu", "0", third(popped))

_SPLIT_WITH = "|- ((a!b with a!b) with a!b), ex x. x?b"
_EXISTS_A = _unary("exists", "1", _ax(), witness="a")

# Two coalescence steps sharing a leaf, one row per kind of overlap:
# (family, derivation, first step, second step, permutation class relating the two
# orders). Steps are (kind, principal paths); None means both orders give one derivation.
CRITICAL_PAIRS = [
	("par_prec", _root("|- (a!b par c!d), ((a?b tens c?d) prec e!f), e?f", _unary("par", "0",
		_prec("2", ["0", "1"], ["3"], [_tens("2", ["0"], ["1"], [_ax(), _ax()]), _ax()]))),
		("par", ["0"]), ("prec", ["1"]), "unary_binary"),
	("plus_prec", _root("|- (a!b plus c!d), (a?b prec e!f), e?f",
		_prec("1", ["0"], ["2"], [_unary("plus_left", "0", _ax()), _ax()])),
		("plus_left", ["0"]), ("prec", ["1"]), "unary_binary"),
	("prec_prec", _root("|- (a!b prec c!d), (a?b prec e!f), c?d, e?f",
		_prec("0", ["1", "3"], ["2"], [_prec("1", ["0"], ["2"], [_ax(), _ax()]), _ax()])),
		("prec", ["0"]), ("prec", ["1"]), "binary_binary"),
	("tens_prec", _root("|- (a!b tens c!d), (a?b prec e!f), c?d, e?f",
		_tens("0", ["1", "3"], ["2"], [_prec("1", ["0"], ["2"], [_ax(), _ax()]), _ax()])),
		("tens", ["0"]), ("prec", ["1"]), "binary_binary"),
	("exists_prec", _root("|- ex x. x!b, (a?b prec c!d), c?d",
		_prec("1", ["0"], ["2"], [_unary("exists", "0", _ax(), witness="a"), _ax()])),
		("exists", ["0"]), ("prec", ["1"]), "unary_binary"),
	("forall_prec", _root("|- all x. x!b, (ex y. y?b prec c!d), c?d", _unary("forall", "0",
		_prec("1", ["0"], ["2"], [_unary("exists", "1", _ax(), witness="x"), _ax()]))),
		("forall", ["0"]), ("prec", ["1"]), "unary_binary"),
	("load_prec", _root("|- new x. x!z, (ya y. y?z prec c!d), c?d", _unary("load_nu", "0",
		_prec("1", ["0"], ["2"], [_unary("pop_nu", "1", _ax(), witness="x"), _ax()], store_left=["nu x"]))),
		("load", ["0"]), ("prec", ["1"]), "unary_binary"),
	("unit_prec", _root("|- new x. a!b, (a?b prec c!d), c?d",
		_prec("1", ["0"], ["2"], [_unary("unit_nu", "0", _ax()), _ax()])),
		("unit", ["0"]), ("prec", ["1"]), "unary_binary"),
	("pop_prec", _root("|- new x. x!z, ya y. (y?z tens e!f), (e?f prec c!d), c?d", _unary("load_nu", "0",
		_unary("pop_nu", "1", _prec("2", ["0", "1"], ["3"], [_tens("1", ["0"], ["2"], [_ax(), _ax()]), _ax()]), witness="x"))),
		("pop", ["1"]), ("prec", ["2"]), "unary_binary"),
	("exists_load", _root(_NOMINAL_TENS.format("ex u. u?b"), _popped_tens(lambda d: _unary("exists", "2", d, witness="a"))),
		("exists", ["2"]), ("load", ["0"]), "unary_unary"),
	("exists_pop", _root(_NOMINAL_TENS.format("ex u. u?b"), _popped_tens(lambda d: _unary("exists", "2", d, witness="a"))),
		("exists", ["2"]), ("pop", ["1"]), "unary_unary"),
	("forall_forall", _root("|- all x. a!b, all y. a?b", _unary("forall", "0", _unary("forall", "1", _ax()))),
		("forall", ["0"]), ("forall", ["1"]), "unary_unary"),
	("unit_forall", _root("|- new x. a!b, all y. a?b", _unary("unit_nu", "0", _unary("forall", "1", _ax()))),
		("unit", ["0"]), ("forall", ["1"]), "unary_unary"),
	("pop_forall", _root(_NOMINAL_TENS.format("all u. a?b"), _popped_tens(lambda d: _unary("forall", "2", d))),
		("pop", ["1"]), ("forall", ["2"]), "unary_unary"),
	("with_exists", _root("|- (a!b with a!b), ex x. x?b", {"rule": "with", "principal": "0", "premises": [_EXISTS_A, _EXISTS_A]}),
		("with", ["0"]), ("exists", ["1"]), "with_unary"),
	("with_forall", _root("|- (a!b with a!b), all x. a?b",
		{"rule": "with", "principal": "0", "premises": [_unary("forall", "1", _ax()), _unary("forall", "1", _ax())]}),
		("with", ["0"]), ("forall", ["1"]), "with_unary"),
	("with_with", _root("|- (a!b with a!b), (a?b with a?b)", {"rule": "with", "principal": "0", "premises": [
		{"rule": "with", "principal": "1", "premises": [_ax(), _ax()]}, {"rule": "with", "principal": "1", "premises": [_ax(), _ax()]},
	]}), ("with", ["0"]), ("with", ["1"]), "with_with"),
	("exists_split", _root(_SPLIT_WITH, {"rule": "with", "principal": "0", "premises": [
		{"rule": "with", "principal": "0", "premises": [_EXISTS_A, _EXISTS_A]}, _EXISTS_A,
	]}), ("exists", ["1"]), ("split", ["0"]), None),
]

def net(obj):
	return structure.from_json(json.loads(json.dumps(obj)))

def derivation(obj):
	return calculus.from_json(json.loads(json.dumps(obj)))

@functools.lru_cache(maxsize=None)
def derivation_corpus(budget=10 ** 5):
	"""
	Returns:
		list of (name, Derivation), written fixtures first
	"""
	result = [(name, derivation(obj)) for name, obj in sorted(NAMED_DERIVATIONS.items())]
	for name, text in JUDGEMENTS:
		verdict = calculus.prove_search(parse_judgement(text), budget)
		if not verdict.provable:
			logger.warning("corpus judgement %s is not provable", name)
			continue
		result.append((name, verdict.derivation))
	return result

def net_corpus():
	"""
	Conflict nets of every corpus derivation plus the written nets
	"""
	from pilnet.bridge import translate_to_conflict_net
	nets = [("worked_net", net(WORKED_NET)), ("flattening_pair", net(FLATTENING_PAIR_NET)), ("prec_tens_cycle_net", net(PREC_TENS_CYCLE_NET))]
	for name, d in derivation_corpus():
		nets.append((name, translate_to_conflict_net(d)))
	return nets

def load_corpus_dir(directory):
	"""
	Reads every *.deriv.json file of a directory, sorted by file name
	"""
	result = []
	for path in sorted(FilePath(directory).glob("*.deriv.json")):
		with open(path, "r") as handle:
			try:
				obj = json.load(handle)
			except ValueError as e:
				raise MalformedInput("{}: {}".format(path, e))
		result.append((path.name[:-len(".deriv.json")], calculus.from_json(obj)))
	return result


# SMALL INSTANCE ENUMERATION

ATOM_PAIRS = ((Send("a", "b"), Recv("a", "b")), (Send("b", "a"), Recv("b", "a")))
CONNECTIVES = ("par", "tens", "prec", "plus", "with")
COMMUTATIVE = ("par", "tens", "plus", "with")
QUANTIFIER_PAIRS = (("ex", "all"), ("all", "ex"), ("new", "ya"), ("ya", "new"))
MAX_DEPTH = 3

def depth(formula):
	if isinstance(formula, Binary):
		return 1 + max(depth(formula.left), depth(formula.right))
	if isinstance(formula, Quant):
		return 1 + depth(formula.body)
	return 0

def _groupings(atoms):
	"""
	Ways of cutting an atom list into consecutive non-empty groups
	"""
	if not atoms:
		yield []
		return
	for size in range(1, len(atoms) + 1):
		for rest in _groupings(atoms[size:]):
			yield [atoms[:size]] + rest

def _formulas_of(group):
	"""
	Every formula over the group's atoms, in order, built from binary connectives
	"""
	if len(group) == 1:
		yield group[0]
		return
	for cut in range(1, len(group)):
		for left in _formulas_of(group[:cut]):
			for right in _formulas_of(group[cut:]):
				for connective in CONNECTIVES:
					yield Binary(connective, left, right)

def _shape_key(formula, bound=None):
	"""
	Printed form with commutative arguments sorted and the bound variable written _
	"""
	if isinstance(formula, Binary):
		sides = [_shape_key(formula.left, bound), _shape_key(formula.right, bound)]
		if formula.connective in COMMUTATIVE:
			sides.sort()
		return "({} {} {})".format(sides[0], formula.connective, sides[1])
	if isinstance(formula, Quant):
		return "{} _. {}".format(formula.quantifier, _shape_key(formula.body, formula.bound))
	return alpha_key(formula, {bound: "_"})

def _quantified(sequent):
	"""
	Variants binding one name in the two formulas it occurs free in, by a dual quantifier pair
	"""
	for name in ("a", "b"):
		owners = [i for i, f in enumerate(sequent) if name in free_variables(f)]
		if len(owners) != 2:
			continue
		first, second = owners
		for q1, q2 in QUANTIFIER_PAIRS:
			result = list(sequent)
			result[first] = Quant(q1, "x", substitution.apply(Substitution({name: "x"}), sequent[first]))
			result[second] = Quant(q2, "y", substitution.apply(Substitution({name: "y"}), sequent[second]))
			yield result

def small_judgements(pairs=2, quantifiers=True):
	"""
	Clean judgements over at most pairs dual atom pairs on the names a and b, formulas
	of depth at most MAX_DEPTH and at most one quantifier pair. Judgements equal up to
	formula order, commuting arguments or renaming bound variables come once.
	"""
	seen = set()
	for n in range(1, pairs + 1):
		for chosen in itertools.combinations_with_replacement(ATOM_PAIRS, n):
			pool = [atom for pair in chosen for atom in pair]
			for order in itertools.permutations(pool):
				for grouping in _groupings(list(order)):
					for sequent in itertools.product(*[list(_formulas_of(g)) for g in grouping]):
						variants = [list(sequent)]
						if quantifiers:
							variants.extend(_quantified(list(sequent)))
						for variant in variants:
							if max(depth(f) for f in variant) > MAX_DEPTH:
								continue
							key = tuple(sorted(_shape_key(f) for f in variant))
							if key in seen:
								continue
							seen.add(key)
							yield Judgement(variant)

def _occurrences(j):
	return [(path, j.occurrence_table[path].node) for path in sorted(j.occurrence_table)]

def _candidate_links(j):
	occurrences = _occurrences(j)
	links = [SequentLink([p]) for p, node in occurrences if isinstance(node, Unit)]
	sends = [p for p, node in occurrences if isinstance(node, Send)]
	recvs = [p for p, node in occurrences if isinstance(node, Recv)]
	links.extend(SequentLink([s, r]) for s in sends for r in recvs)
	news = [p for p, node in occurrences if isinstance(node, Quant) and node.quantifier == "new"]
	yas = [p for p, node in occurrences if isinstance(node, Quant) and node.quantifier == "ya"]
	links.extend(NominalLink(BinderRef(n), BinderRef(y)) for n in news for y in yas)
	return links

def _shapes(leaves, label):
	"""
	Canonical coco-trees over a leaf list whose root carries label (or a single leaf)
	"""
	if len(leaves) == 1:
		yield leaves[0]
		return
	other = "conf" if label == "conc" else "conc"
	first, rest = leaves[0], leaves[1:]
	for blocks in _partitions(rest):
		groups = [[first] + blocks[0]] + blocks[1:]
		if len(groups) < 2:
			continue
		for children in itertools.product(*[list(_shapes(g, other)) for g in groups]):
			yield structure.Node(None, label, children)

def _partitions(items):
	if not items:
		yield [[]]
		return
	head, tail = items[0], items[1:]
	for partition in _partitions(tail):
		for k in range(len(partition)):
			yield partition[:k] + [[head] + partition[k]] + partition[k + 1:]
		yield partition + [[head]]

def _dualizers(j, link):
	"""
	Candidate dualizers: maps from witness-bound variables of the link to occurring names
	"""
	yield substitution.EMPTY
	if link.nominal:
		nu, ya = link.variables(j)
		yield Substitution({ya: nu})
		yield Substitution({nu: ya})
		return
	mentioned = set()
	for p in link.paths:
		mentioned |= free_variables(j.formula_at(p))
	bound = sorted(v for v in mentioned if v in j.binders and j.formula_at(j.binders[v]).quantifier in ("ex", "new", "ya"))
	names = sorted(j.variables())
	for var in bound:
		for name in names:
			if name != var:
				yield Substitution({var: name})

def small_structures(j, max_leaves=4):
	"""
	Every valid proof structure over j with at most max_leaves axiomatic links,
	nominal links included
	"""
	links = _candidate_links(j)
	for n in range(1, max_leaves + 1):
		for chosen in itertools.combinations(links, n):
			leaves = [Leaf("l{}".format(k), link) for k, link in enumerate(chosen)]
			options = [list(_dualizers(j, leaf.link)) for leaf in leaves]
			for tree in _trees(leaves):
				for witnesses in itertools.product(*options):
					p = PreStructure(tree, dict((leaf.id, s) for leaf, s in zip(leaves, witnesses)), j)
					try:
						validate_structure(p)
					except StructureViolation:
						continue
					yield p

def _trees(leaves):
	if len(leaves) == 1:
		yield leaves[0]
		return
	for label in ("conc", "conf"):
		yield from _shapes(leaves, label)

# RANDOM DERIVATIONS

MOVES = ("par", "tens", "prec", "plus", "with", "exists", "forall", "unit", "nominal")

# A with copies the derivation above it into both branches
WITH_MAX_AXIOMS = 2

# Rule instances per axiom, per with and per load/pop pair of a generated derivation
AXIOM_EVERY = 12
WITH_EVERY = 100
NOMINAL_EVERY = 30

class DerivationGenerator(object):
	"""
	Builds valid derivations forwards, from axioms down, by random rule applications
	"""
	def __init__(self, rng):
		self.rng = rng
		self.names = 0
		self.budgets = {}
		self.logger = logging.getLogger(name=self.__class__.__name__)

	def name(self, base="c"):
		self.names += 1
		return "{}{}".format(base, self.names)

	def axiom(self):
		channel, message = self.name(), self.name()
		return Derivation("ax", Judgement([Send(channel, message), Recv(channel, message)]))

	def generate(self, size):
		"""
		Args:
			size: target number of rule instances, which sets how many axioms, withs
				and load/pop pairs the derivation gets
		"""
		self.budgets = {"with": max(1, size // WITH_EVERY), "nominal": max(1, size // NOMINAL_EVERY)}
		pool = [self.axiom() for _ in range(max(1, size // AXIOM_EVERY))]
		attempts = 0
		while (len(pool) > 1 or calculus.size(pool[0]) < size) and attempts < size * 50:
			attempts += 1
			move = self.rng.choice(MOVES)
			try:
				getattr(self, "make_" + move)(pool)
			except (DerivationViolation, MalformedInput) as e:
				self.logger.debug("%s move failed: %s", move, e)
		result = pool[0]
		for other in pool[1:]:
			result = self._binary("tens", result, other)
		return result

	def _pick(self, pool):
		return pool.pop(self.rng.randrange(len(pool)))

	def _binary(self, rule, d1, d2):
		s1, s2 = d1.conclusion.sequent, d2.conclusion.sequent
		i, j = self.rng.randrange(len(s1)), self.rng.randrange(len(s2))
		rest1 = [f for k, f in enumerate(s1) if k != i]
		rest2 = [f for k, f in enumerate(s2) if k != j]
		sequent = rest1 + rest2 + [Binary(rule, s1[i], s2[j])]
		index = len(sequent) - 1
		conclusion = Judgement(sequent, d1.conclusion.store.union(d2.conclusion.store))
		split = Split(range(len(rest1)), range(len(rest1), index), d1.conclusion.store, d2.conclusion.store)
		principal = [index]
		return Derivation.build(rule, conclusion, [d1, d2], principal, None, split)

	def _merge(self, pool, rule):
		if len(pool) < 2:
			return None
		d1, d2 = self._pick(pool), self._pick(pool)
		try:
			made = self._binary(rule, d1, d2)
		except (DerivationViolation, MalformedInput):
			pool.extend([d1, d2])
			raise
		pool.append(made)
		return made

	def make_tens(self, pool):
		return self._merge(pool, "tens")

	def make_prec(self, pool):
		return self._merge(pool, "prec")

	def _unary(self, pool, build):
		d = self._pick(pool)
		try:
			made = build(d)
		except (DerivationViolation, MalformedInput):
			pool.append(d)
			raise
		pool.append(made if made is not None else d)
		return made

	def make_par(self, pool):
		def build(d):
			s = d.conclusion.sequent
			if len(s) < 2:
				return None
			i, j = sorted(self.rng.sample(range(len(s)), 2))
			sequent = [f for k, f in enumerate(s) if k not in (i, j)] + [Binary("par", s[i], s[j])]
			conclusion = Judgement(sequent, d.conclusion.store)
			return Derivation.build("par", conclusion, [d], [len(sequent) - 1])
		return self._unary(pool, build)

	def _plus(self, d, i, left):
		s = list(d.conclusion.sequent)
		junk = Send(self.name(), self.name())
		if left:
			s[i] = Binary("plus", s[i], junk)
		else:
			s[i] = Binary("plus", junk, s[i])
		return Derivation.build("plus_left" if left else "plus_right", Judgement(s, d.conclusion.store), [d], [i])

	def make_plus(self, pool):
		def build(d):
			return self._plus(d, self.rng.randrange(len(d.conclusion.sequent)), self.rng.random() < 0.5)
		return self._unary(pool, build)

	def make_with(self, pool):
		"""
		(A plus J1) with (J2 plus A) over two differing branches
		"""
		def build(d):
			if not self.budgets.get("with") or calculus.rule_counts(d)["ax"] > WITH_MAX_AXIOMS:
				return None
			s = list(d.conclusion.sequent)
			i = self.rng.randrange(len(s))
			if all_variables(s[i]) != free_variables(s[i]):
				return None
			left, right = self._plus(d, i, True), self._plus(d, i, False)
			s[i] = Binary("with", left.conclusion.sequent[i], right.conclusion.sequent[i])
			made = Derivation.build("with", Judgement(s, d.conclusion.store), [left, right], [i])
			self.budgets["with"] -= 1
			return made
		return self._unary(pool, build)

	def make_exists(self, pool):
		def build(d):
			s = list(d.conclusion.sequent)
			i = self.rng.randrange(len(s))
			names = sorted(free_variables(s[i]))
			if not names:
				return None
			witness = self.rng.choice(names)
			x = self.name("x")
			s[i] = Quant("ex", x, substitution.apply(Substitution({witness: x}), s[i]))
			return Derivation.build("exists", Judgement(s, d.conclusion.store), [d], [i], witness)
		return self._unary(pool, build)

	def make_forall(self, pool):
		def build(d):
			s = list(d.conclusion.sequent)
			i = self.rng.randrange(len(s))
			names = sorted(free_variables(s[i]) - self._elsewhere(d, i))
			if not names:
				return None
			x = self.name("v")
			s[i] = Quant("all", x, substitution.apply(Substitution({self.rng.choice(names): x}), s[i]))
			return Derivation.build("forall", Judgement(s, d.conclusion.store), [d], [i])
		return self._unary(pool, build)

	def make_unit(self, pool):
		"""
		new or ya binding a variable the formula does not mention
		"""
		def build(d):
			s = list(d.conclusion.sequent)
			i = self.rng.randrange(len(s))
			quantifier = self.rng.choice(("new", "ya"))
			s[i] = Quant(quantifier, self.name("u"), s[i])
			return Derivation.build("unit_" + FLAVOR_OF[quantifier], Judgement(s, d.conclusion.store), [d], [i])
		return self._unary(pool, build)

	def make_nominal(self, pool):
		"""
		A pop over one formula sharing a name w with another, then the load binding w
		in the other: a name-passing pair in either flavor
		"""
		def build(d):
			s = list(d.conclusion.sequent)
			shared = []
			for w in sorted(free_variables(d.conclusion) - set(d.conclusion.store.variables())):
				owners = [k for k, f in enumerate(s) if w in free_variables(f)]
				if len(owners) == 2:
					shared.append((w, owners))
			if not shared or not self.budgets.get("nominal"):
				return None
			w, owners = self.rng.choice(shared)
			self.rng.shuffle(owners)
			i, j = owners
			flavor = self.rng.choice(FLAVORS)
			loading = "new" if flavor == "nu" else "ya"
			popping = "ya" if flavor == "nu" else "new"
			y = self.name("y")
			s[j] = Quant(popping, y, substitution.apply(Substitution({w: y}), s[j]))
			store = d.conclusion.store
			popped = Derivation.build("pop_" + flavor, Judgement(s, store.add(flavor, w)), [d], [j], w)
			s[i] = Quant(loading, w, s[i])
			made = Derivation.build("load_" + flavor, Judgement(s, store), [popped], [i])
			self.budgets["nominal"] -= 1
			return made
		return self._unary(pool, build)

	def _elsewhere(self, d, i):
		"""
		Names free outside formula i of d's conclusion, stored ones included
		"""
		rest = set(d.conclusion.store.variables())
		for k, f in enumerate(d.conclusion.sequent):
			if k != i:
				rest |= free_variables(f)
		return rest

def random_derivation(rng, size):
	"""
	Args:
		rng: random.Random (or an int seed)
		size: target number of rule instances
	Returns:
		a derivation passing check_derivation
	"""
	if not isinstance(rng, random.Random):
		rng = random.Random(rng)
	return DerivationGenerator(rng).generate(size)

def generated_net(size, seed=0):
	"""
	Conflict net of a random derivation with about size formula nodes and one
	axiom link per ten of them
	"""
	from pilnet.bridge import translate_to_conflict_net
	return translate_to_conflict_net(random_derivation(random.Random(seed), size))
