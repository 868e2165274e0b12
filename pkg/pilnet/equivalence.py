"""
Rule permutations, bounded equivalence search and the canonicity suite

A permutation swaps two adjacent rules. The rewritten part of the derivation is
described as a fragment (rules addressed by the conclusion occurrences they act on,
with untouched sub-derivations as leaves) and re-instantiated from the conclusion,
so every premise is recomputed and every side condition re-checked.
"""

import json
import logging
import random
from collections import Counter

import attr

from pilnet import calculus
from pilnet.bridge import translate_to_conflict_net, translate_to_slice_net
from pilnet.calculus import Derivation, Split, premise_judgements, reorder, subderivation
from pilnet.errors import (
	ContextMismatch, DependencyViolation, DerivationViolation, PatternMismatch, PermutationError, PilnetError
)
from pilnet.structure import isomorphic
from pilnet.syntax import Path
from pilnet.workers import TrialPool

logger = logging.getLogger(__name__)

CLASSES = ("binary_binary", "unary_unary", "unary_binary", "with_with", "with_unary", "with_binary")
LOCAL_CLASSES = CLASSES[:5]
MODES = ("local", "strong")

UNARY = calculus.UNARY_RULES
BINARY = calculus.BINARY_RULES
NOMINAL_POPS = tuple(calculus.POP_FLAVOR)

@attr.s(frozen=True)
class Permutation(object):
	"""
	cls: permutation row
	at: premise indices from the root to the lower of the two rules
	side: premise of a binary lower rule whose rule moves below it (0 for a unary
	lower rule, None when the lower rule is a with)
	"""
	cls = attr.ib()
	at = attr.ib(converter=tuple)
	side = attr.ib(default=None)

	@cls.validator
	def _check_cls(self, attribute, value):
		if value not in CLASSES:
			raise PatternMismatch("unknown permutation class {!r}".format(value))

	def __str__(self):
		return "{}@/{}{}".format(self.cls, "/".join(str(i) for i in self.at), "" if self.side is None else ":{}".format(self.side))

	def to_json(self):
		return {"class": self.cls, "at": list(self.at), "side": self.side}

	@classmethod
	def from_json(cls, obj):
		return cls(obj["class"], obj.get("at", []), obj.get("side"))

@attr.s(frozen=True)
class _Use(object):
	"""
	An untouched sub-derivation and the conclusion occurrences of its formulas
	"""
	derivation = attr.ib()
	labels = attr.ib(converter=tuple)

@attr.s(frozen=True)
class _Apply(object):
	rule = attr.ib()
	principal = attr.ib(converter=tuple)
	witness = attr.ib()
	children = attr.ib(converter=tuple)

def _children(d, labels):
	"""
	Premise sub-derivations of d, each paired with its formulas' conclusion occurrences
	"""
	result = []
	for premise, sub in zip(premise_judgements(d), d.premises):
		sub_labels = [Path(labels[i].index, labels[i].steps + tuple(steps)) for i, steps in premise.origins]
		result.append((sub, sub_labels))
	return result

def _use(pair):
	return _Use(*pair)

def _principal_labels(d, labels):
	return tuple(labels[i] for i in d.principal)

def _independent(d, labels):
	"""
	Principal occurrences of an upper rule; they must be whole conclusion formulas
	"""
	principal = _principal_labels(d, labels)
	if any(p.steps for p in principal):
		raise DependencyViolation("{} acts on a formula the lower rule produced".format(d.rule))
	return principal

def _holds(labels, paths):
	"""
	True when some formula of a premise lies inside one of paths
	"""
	return any(p.is_prefix_of(l) for p in paths for l in labels)

def _reach(fragment):
	if isinstance(fragment, _Use):
		return set(fragment.labels)
	result = set(fragment.principal)
	for child in fragment.children:
		result |= _reach(child)
	return result

def _store_use(fragment):
	if isinstance(fragment, _Use):
		return set(fragment.derivation.conclusion.store.entries)
	result = set()
	for child in fragment.children:
		result |= _store_use(child)
	if fragment.rule in calculus.POP_FLAVOR:
		result.add((calculus.POP_FLAVOR[fragment.rule], fragment.witness))
	return result

def _split(fragment, judgement, labels, principal):
	left_reach = _reach(fragment.children[0])
	right_reach = _reach(fragment.children[1])
	left, right = [], []
	for i, label in enumerate(labels):
		if i in principal:
			continue
		on_left = any(label.is_prefix_of(r) for r in left_reach)
		on_right = any(label.is_prefix_of(r) for r in right_reach)
		if on_left == on_right:
			raise DependencyViolation("formula {} cannot be assigned to one premise".format(label))
		(left if on_left else right).append(i)
	used_left = _store_use(fragment.children[0])
	store_left = [e for e in judgement.store if e in used_left]
	store_right = [e for e in judgement.store if e not in used_left]
	return Split(left, right, store_left, store_right)

def _instantiate(fragment, judgement, labels):
	if isinstance(fragment, _Use):
		d = fragment.derivation
		if d.conclusion == judgement:
			return d
		if d.conclusion.store == judgement.store and Counter(d.conclusion.sequent) == Counter(judgement.sequent):
			return reorder(d, judgement)
		raise DependencyViolation("moved sub-derivation no longer fits: {}".format(judgement))
	labels = list(labels)
	try:
		principal = [labels.index(p) for p in fragment.principal]
	except ValueError:
		raise DependencyViolation("principal formula of {} is not available".format(fragment.rule))
	split = _split(fragment, judgement, labels, principal) if fragment.rule in BINARY else None
	if fragment.rule == "prec":
		principal = sorted(principal)
	node = Derivation(fragment.rule, judgement, (), principal, fragment.witness, split)
	try:
		expected = premise_judgements(node)
	except DerivationViolation as e:
		raise DependencyViolation("{} cannot move: {}".format(fragment.rule, e.clause))
	premises = []
	for premise, child in zip(expected, fragment.children):
		child_labels = [Path(labels[i].index, labels[i].steps + tuple(steps)) for i, steps in premise.origins]
		premises.append(_instantiate(child, premise.judgement, child_labels))
	return attr.evolve(node, premises=premises)

class Permuter(object):
	"""
	Builds the rewritten fragment for one permutation at one node
	"""
	def __init__(self, node, permutation):
		self.node = node
		self.permutation = permutation
		self.labels = node.conclusion.roots()
		self.inverse_side = None

	def require(self, condition, what):
		if not condition:
			raise PatternMismatch("{} needs {}".format(self.permutation.cls, what))

	def fragment(self):
		rule = self.node.rule
		if rule in UNARY:
			return self._below_unary()
		if rule in BINARY:
			return self._below_binary()
		self.require(rule == "with", "a unary, binary or with rule at the target")
		return self._below_with()

	def _below_unary(self):
		n = self.node
		cls = self.permutation.cls
		c, c_labels = _children(n, self.labels)[0]
		p1 = _principal_labels(n, self.labels)
		p2 = _independent(c, c_labels)
		grand = _children(c, c_labels)
		if cls == "unary_unary":
			self.require(c.rule in UNARY, "a unary rule above a unary rule")
			self.inverse_side = 0
			return _Apply(c.rule, p2, c.witness, [_Apply(n.rule, p1, n.witness, [_use(grand[0])])])
		if cls == "unary_binary":
			self.require(c.rule in BINARY, "a binary rule above a unary rule")
			sides = [k for k, (_, g_labels) in enumerate(grand) if _holds(g_labels, p1)]
			if len(sides) != 1:
				raise DependencyViolation("{} is used by both premises of {}".format(n.rule, c.rule))
			children = [_use(g) for g in grand]
			children[sides[0]] = _Apply(n.rule, p1, n.witness, [children[sides[0]]])
			self.inverse_side = sides[0]
			return _Apply(c.rule, p2, None, children)
		if cls == "with_unary":
			self.require(c.rule == "with", "a with rule above a unary rule")
			return _Apply("with", p2, None, [_Apply(n.rule, p1, n.witness, [_use(g)]) for g in grand])
		raise PatternMismatch("{} does not start from a unary rule".format(cls))

	def _below_binary(self):
		n = self.node
		cls = self.permutation.cls
		s = self.permutation.side
		self.require(s in (0, 1), "a premise side")
		kids = _children(n, self.labels)
		c, c_labels = kids[s]
		other = _use(kids[1 - s])
		p1 = _principal_labels(n, self.labels)
		p2 = _independent(c, c_labels)
		grand = _children(c, c_labels)

		def lower_over(moved):
			children = [None, None]
			children[s] = moved
			children[1 - s] = other
			return _Apply(n.rule, p1, None, children)

		if cls == "unary_binary":
			self.require(c.rule in UNARY, "a unary rule above a binary rule")
			self.inverse_side = 0
			return _Apply(c.rule, p2, c.witness, [lower_over(_use(grand[0]))])
		if cls == "binary_binary":
			self.require(c.rule in BINARY, "a binary rule above a binary rule")
			active = [p.child("L" if s == 0 else "R") for p in p1]
			sides = [k for k, (_, g_labels) in enumerate(grand) if _holds(g_labels, active)] if active else [0]
			if len(sides) != 1:
				raise DependencyViolation("{} is split by {}".format(n.rule, c.rule))
			children = [_use(g) for g in grand]
			children[sides[0]] = lower_over(children[sides[0]])
			self.inverse_side = sides[0]
			return _Apply(c.rule, p2, None, children)
		if cls == "with_binary":
			self.require(c.rule == "with", "a with rule above a binary rule")
			return _Apply("with", p2, None, [lower_over(_use(g)) for g in grand])
		raise PatternMismatch("{} does not start from a binary rule".format(cls))

	def _below_with(self):
		n = self.node
		cls = self.permutation.cls
		(c0, l0), (c1, l1) = _children(n, self.labels)
		p1 = _principal_labels(n, self.labels)
		self.require(c0.rule == c1.rule, "the same rule in both branches")
		p2 = _independent(c0, l0)
		self.require(_independent(c1, l1) == p2, "the same principal formula in both branches")
		g0 = _children(c0, l0)
		g1 = _children(c1, l1)
		if cls == "with_with":
			self.require(c0.rule == "with", "with rules in both branches")
			return _Apply("with", p2, None, [_Apply("with", p1, None, [_use(g0[k]), _use(g1[k])]) for k in (0, 1)])
		if cls == "with_unary":
			self.require(c0.rule in UNARY, "unary rules in both branches")
			self.require(c0.witness == c1.witness, "the same witness in both branches")
			self.inverse_side = 0
			return _Apply(c0.rule, p2, c0.witness, [_Apply("with", p1, None, [_use(g0[0]), _use(g1[0])])])
		if cls == "with_binary":
			self.require(c0.rule in BINARY, "binary rules in both branches")
			left = p1[0].child("L")
			right = p1[0].child("R")
			s0 = [k for k, (_, g) in enumerate(g0) if _holds(g, [left])]
			s1 = [k for k, (_, g) in enumerate(g1) if _holds(g, [right])]
			self.require(len(s0) == 1 and s0 == s1, "the with formula on the same side of both branches")
			s = s0[0]
			self.require(g0[1 - s][0] == g1[1 - s][0], "the same derivation beside the with formula")
			children = [None, None]
			children[s] = _Apply("with", p1, None, [_use(g0[s]), _use(g1[s])])
			children[1 - s] = _use(g0[1 - s])
			self.inverse_side = s
			return _Apply(c0.rule, p2, None, children)
		raise PatternMismatch("{} does not start from a with rule".format(cls))

def _replace_at(d, path, new):
	if not path:
		return new
	premises = list(d.premises)
	premises[path[0]] = _replace_at(premises[path[0]], path[1:], new)
	return attr.evolve(d, premises=premises)

def permute_with_inverse(d, permutation):
	"""
	Returns (rewritten derivation, the permutation that undoes it)
	"""
	try:
		node = subderivation(d, permutation.at)
	except IndexError:
		raise PatternMismatch("no derivation node at /{}".format("/".join(map(str, permutation.at))))
	if not node.premises:
		raise PatternMismatch("{} needs two rules at /{}".format(permutation.cls, "/".join(map(str, permutation.at))))
	permuter = Permuter(node, permutation)
	fragment = permuter.fragment()
	rewritten = _instantiate(fragment, node.conclusion, node.conclusion.roots())
	inverse = Permutation(permutation.cls, permutation.at, permuter.inverse_side)
	return _replace_at(d, permutation.at, rewritten), inverse

def permute(d, permutation):
	return permute_with_inverse(d, permutation)[0]

def is_local(permutation, d):
	"""
	with_unary over a pop changes the conflict net by one flattening step, so it only
	counts as a strong permutation
	"""
	if permutation.cls not in LOCAL_CLASSES:
		return False
	if permutation.cls == "with_unary":
		node = subderivation(d, permutation.at)
		rules = [node.rule] + [p.rule for p in node.premises]
		return not any(rule in NOMINAL_POPS for rule in rules)
	return True

def _candidates(node):
	rule = node.rule
	kids = [p.rule for p in node.premises]
	if rule in UNARY:
		above = kids[0]
		if above in UNARY:
			yield "unary_unary", 0
		elif above in BINARY:
			yield "unary_binary", 0
		elif above == "with":
			yield "with_unary", 0
	elif rule in BINARY:
		for s, above in enumerate(kids):
			if above in UNARY:
				yield "unary_binary", s
			elif above in BINARY:
				yield "binary_binary", s
			elif above == "with":
				yield "with_binary", s
	elif rule == "with" and kids[0] == kids[1]:
		if kids[0] == "with":
			yield "with_with", None
		elif kids[0] in UNARY:
			yield "with_unary", None
		elif kids[0] in BINARY:
			yield "with_binary", None

def _nodes(d, path=()):
	yield path, d
	for k, sub in enumerate(d.premises):
		yield from _nodes(sub, path + (k,))

def neighbours(d, mode="local"):
	"""
	Every (permutation, rewritten derivation) pair reachable in one step
	"""
	result = []
	for path, node in _nodes(d):
		if not node.premises:
			continue
		for cls, side in _candidates(node):
			permutation = Permutation(cls, path, side)
			if mode == "local" and not is_local(permutation, d):
				continue
			try:
				result.append((permutation, permute(d, permutation)))
			except PermutationError:
				continue
	return result

def applicable_permutations(d, mode="local"):
	return [permutation for permutation, _ in neighbours(d, mode)]

@attr.s(frozen=True)
class Equivalent(object):
	"""
	forward leads from the first derivation, backward from the second, to a common one
	"""
	forward = attr.ib(converter=tuple)
	backward = attr.ib(converter=tuple)
	equivalent = True

@attr.s(frozen=True)
class NotFound(object):
	explored = attr.ib(default=0)
	equivalent = False

def equivalent_bounded(d1, d2, mode="local", budget=10 ** 4):
	"""
	Bidirectional breadth-first search over permutation closures.
	NotFound only means the budget ran out or the closures were exhausted.
	"""
	if mode not in MODES:
		raise PermutationError("unknown mode {!r}".format(mode))
	if d1.conclusion != d2.conclusion:
		raise ContextMismatch("derivations conclude {} and {}".format(d1.conclusion, d2.conclusion))
	if d1 == d2:
		return Equivalent([], [])
	seen = ({d1: ()}, {d2: ()})
	frontiers = ([d1], [d2])
	expanded = 0
	while frontiers[0] and frontiers[1]:
		side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
		following = []
		for state in frontiers[side]:
			expanded += 1
			if expanded > budget:
				logger.info("equivalence search stopped after %d derivations", budget)
				return NotFound(expanded)
			for permutation, successor in neighbours(state, mode):
				if successor in seen[side]:
					continue
				path = seen[side][state] + (permutation,)
				seen[side][successor] = path
				if successor in seen[1 - side]:
					other = seen[1 - side][successor]
					return Equivalent(path, other) if side == 0 else Equivalent(other, path)
				following.append(successor)
		frontiers = (following, frontiers[1]) if side == 0 else (frontiers[0], following)
	return NotFound(expanded)

# CANONICITY SUITE

MAX_WALK = 6

@attr.s(frozen=True)
class Trial(object):
	index = attr.ib()
	seed = attr.ib()
	mode = attr.ib()
	name = attr.ib()
	derivation = attr.ib()

@attr.s(frozen=True)
class TrialResult(object):
	index = attr.ib()
	seed = attr.ib()
	mode = attr.ib()
	name = attr.ib()
	path = attr.ib(converter=tuple)
	verdict = attr.ib()
	detail = attr.ib(default="")

	@property
	def ok(self):
		return self.verdict in ("ok", "ok_modulo_witness")

	def to_json(self):
		return {
			"index": self.index,
			"seed": self.seed,
			"mode": self.mode,
			"derivation": self.name,
			"path": [p.to_json() for p in self.path],
			"verdict": self.verdict,
			"detail": self.detail,
		}

def net_verdict(before, after, pops):
	"""
	Compares the nets of a derivation and of its permuted form. Dualizers may differ
	in direction only when either derivation uses a pop.
	"""
	if isomorphic(before, after):
		return "ok"
	if pops and isomorphic(before, after, modulo_witness_renaming=True):
		return "ok_modulo_witness"
	return "mismatch"

def _uses_pop(d):
	return any(rule in NOMINAL_POPS for rule in calculus.rule_counts(d))

def run_trial(trial):
	"""
	Random permutation walk from one corpus derivation, then compare the nets
	"""
	rng = random.Random(trial.seed)
	current = trial.derivation
	path = []
	for _ in range(rng.randint(1, MAX_WALK)):
		options = neighbours(current, trial.mode)
		if not options:
			break
		permutation, current = rng.choice(options)
		path.append(permutation)
	try:
		calculus.check_derivation(current)
		translate = translate_to_conflict_net if trial.mode == "local" else translate_to_slice_net
		pops = _uses_pop(trial.derivation) or _uses_pop(current)
		verdict = net_verdict(translate(trial.derivation), translate(current), pops)
		detail = ""
	except PilnetError as e:
		verdict = "invalid"
		detail = str(e)
	if verdict in ("mismatch", "invalid"):
		detail = detail or json.dumps(calculus.to_json(current))
	return TrialResult(trial.index, trial.seed, trial.mode, trial.name, path, verdict, detail)

@attr.s(frozen=True)
class Report(object):
	results = attr.ib(converter=tuple)

	@property
	def failures(self):
		return [r for r in self.results if not r.ok]

	def counts(self):
		result = {}
		for r in self.results:
			key = "{}:{}".format(r.mode, r.verdict)
			result[key] = result.get(key, 0) + 1
		return result

	def to_json(self):
		return {
			"trials": len(self.results),
			"failures": len(self.failures),
			"counts": self.counts(),
			"results": [r.to_json() for r in self.results],
		}

def canonicity_suite(corpus, trials, seed=0, modes=MODES, workers=0, pool="thread"):
	"""
	Args:
		corpus: list of (name, derivation)
		trials: number of trials per mode
		seed: base seed; trial k of mode m uses a seed derived from both
		modes: "local" compares conflict nets, "strong" compares slice nets
		workers, pool: passed to TrialPool
	Returns:
		Report with results ordered by (mode, trial index)
	"""
	corpus = list(corpus)
	if not corpus:
		return Report([])
	jobs = []
	for m, mode in enumerate(modes):
		for k in range(trials):
			name, derivation = corpus[k % len(corpus)]
			jobs.append(Trial(k, seed * 1000003 + m * trials + k, mode, name, derivation))
	results = list(TrialPool(pool, workers).imap(run_trial, jobs))
	report = Report(results)
	for failure in report.failures:
		logger.warning("trial %d (%s, %s) failed: %s", failure.index, failure.mode, failure.name, failure.verdict)
	return report
