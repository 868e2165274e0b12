"""
Derivations to nets and back

Translation walks a derivation bottom-up, building the net of each premise and
transporting its links into the conclusion's occurrences. Sequentialization
replays an accepted coalescence trace and reads the rules off the steps.
"""

import logging

import attr

from pilnet import calculus, coalescence
from pilnet.calculus import Derivation, Split, premise_judgements
from pilnet.errors import DerivationViolation, InapplicableStep, SequentializationError
from pilnet.flattening import normalize
from pilnet.steps import STRUCTURAL_KINDS
from pilnet.structure import (
	BinderRef, IdSupply, Leaf, NominalLink, Node, PreStructure, SequentLink, StoreRef, canonize, conc, conf
)
from pilnet.substitution import EMPTY, Substitution, compose
from pilnet.syntax import FLAVOR_OF, free_variables

logger = logging.getLogger(__name__)

class Translator(object):
	"""
	Builds the conflict net of a derivation. Leaf ids are drawn from one supply so
	the witness maps of & branches stay disjoint.
	"""
	def __init__(self):
		self.leaf_ids = IdSupply(prefix="l")
		self.logger = logging.getLogger(name=self.__class__.__name__)

	def translate(self, d):
		"""
		Returns (coco-tree, witness map) over d's conclusion
		"""
		if d.rule in ("ax", "one"):
			leaf = Leaf(self.leaf_ids.next(), SequentLink(d.conclusion.roots()))
			return leaf, {leaf.id: EMPTY}

		premises = premise_judgements(d)
		parts = []
		for premise, sub in zip(premises, d.premises):
			tree, witnesses = self.translate(sub)
			parts.append(self._transport(tree, witnesses, premise))

		if d.rule in ("tens", "prec"):
			return self._join(conc, parts)
		if d.rule == "with":
			return self._join(conf, parts)

		tree, witnesses = parts[0]
		if d.rule == "exists":
			return tree, self._instantiated(tree, witnesses, d)
		if d.rule in calculus.POP_FLAVOR:
			return self._pop(tree, self._instantiated(tree, witnesses, d), d)
		if d.rule.startswith("load"):
			return self._load(tree, d), witnesses
		return tree, witnesses

	def _join(self, node, parts):
		witnesses = {}
		for _, part in parts:
			witnesses.update(part)
		return canonize(node(*[tree for tree, _ in parts])), witnesses

	def _transport(self, tree, witnesses, premise):
		"""
		Re-address every link of a premise net in the conclusion's occurrences
		"""
		def move(ref):
			if isinstance(ref, BinderRef):
				return BinderRef(premise.origin_path(ref.path))
			return ref

		def rewrite(t):
			if isinstance(t, Leaf):
				link = t.link
				if link.nominal:
					return Leaf(t.id, NominalLink(move(link.nu), move(link.ya)))
				return Leaf(t.id, SequentLink([premise.origin_path(p) for p in link.paths], link.store))
			return Node(t.id, t.label, [rewrite(c) for c in t.children])
		return rewrite(tree), witnesses

	def _instantiated(self, tree, witnesses, d):
		"""
		Dualizers of leaves mentioning the instantiated variable x read x as the witness
		"""
		q = d.conclusion.roots()[d.principal[0]]
		x = d.conclusion.formula_at(q).bound
		renaming = Substitution({x: d.witness})
		result = dict(witnesses)
		for leaf in _leaves(tree):
			if leaf.link.nominal:
				continue
			mentioned = set()
			for p in leaf.link.paths:
				mentioned |= free_variables(d.conclusion.formula_at(p))
			if x in mentioned:
				result[leaf.id] = compose(witnesses[leaf.id], renaming)
		return result

	def _pop(self, tree, witnesses, d):
		q = d.conclusion.roots()[d.principal[0]]
		x = d.conclusion.formula_at(q).bound
		stored = StoreRef(calculus.POP_FLAVOR[d.rule], d.witness)
		if d.rule == "pop_nu":
			link = NominalLink(stored, BinderRef(q))
		else:
			link = NominalLink(BinderRef(q), stored)
		nominal = Leaf(self.leaf_ids.next(), link)
		witnesses = dict(witnesses)
		witnesses[nominal.id] = Substitution({x: d.witness})
		return canonize(conc(nominal, tree)), witnesses

	def _load(self, tree, d):
		"""
		Nominal sides naming the loaded store entry now point at its binder
		"""
		q = d.conclusion.roots()[d.principal[0]]
		f = d.conclusion.formula_at(q)
		entry = StoreRef(FLAVOR_OF[f.quantifier], f.bound)

		def bind(ref):
			return BinderRef(q) if ref == entry else ref

		def rewrite(t):
			if isinstance(t, Leaf):
				if t.link.nominal:
					return Leaf(t.id, NominalLink(bind(t.link.nu), bind(t.link.ya)))
				return t
			return Node(t.id, t.label, [rewrite(c) for c in t.children])
		return rewrite(tree)

def _leaves(tree):
	if isinstance(tree, Leaf):
		yield tree
	else:
		for child in tree.children:
			yield from _leaves(child)

def translate_to_conflict_net(d):
	tree, witnesses = Translator().translate(d)
	return PreStructure(tree, witnesses, d.conclusion)

def translate_to_slice_net(d):
	return normalize(translate_to_conflict_net(d))

@attr.s(frozen=True)
class Snapshot(object):
	"""
	A leaf as it was when a step consumed it.
	token is unique over the whole replay, unlike leaf ids which get reused.
	"""
	leaf = attr.ib()
	dualizer = attr.ib()
	token = attr.ib()

@attr.s(frozen=True)
class Production(object):
	"""
	How a leaf came to be: the step and snapshots of the leaves it replaced
	"""
	entry = attr.ib()
	sources = attr.ib(converter=tuple)

class Sequentializer(object):
	"""
	Replays a trace, then reads a derivation top-down from the final leaf.
	labels maps every sequent leaf met during the replay (initial leaves by
	their id, later ones by replay token) to the derivation it stands for.
	"""
	def __init__(self, structure, trace):
		self.initial = structure
		self.trace = list(trace)
		self.productions = {}
		self.labels = {}
		self.logger = logging.getLogger(name=self.__class__.__name__)

	def run(self):
		final, token = self._replay()
		if not final.is_trivial():
			raise SequentializationError("trace does not coalesce the net to a single link")
		d = self._derive(Snapshot(final.tree, final.dualizer(final.tree.id), token), final.context)
		try:
			calculus.check_derivation(d)
		except DerivationViolation as e:
			raise SequentializationError("rebuilt derivation is invalid: {}".format(e))
		self.logger.debug("sequentialized %d steps into %d rule instances", len(self.trace), calculus.size(d))
		return d

	def _replay(self):
		coalescer = coalescence.Coalescer(self.initial)
		current = dict((leaf_id, leaf_id) for leaf_id in self.initial.leaves)
		for k, entry in enumerate(self.trace):
			if entry.step not in coalescer.applicable_steps():
				raise SequentializationError("{} does not apply to the replayed net".format(entry.step))
			before = coalescer.structure
			sources = []
			if entry.step.kind not in STRUCTURAL_KINDS:
				sources = [Snapshot(before.leaves[t], before.dualizer(t), current.pop(t)) for t in entry.step.targets]
			try:
				done = coalescer.apply(entry.step)
			except InapplicableStep as e:
				raise SequentializationError(str(e))
			if sources:
				current[done.result] = ("step", k)
				self.productions[("step", k)] = Production(done, sources)
		final = coalescer.structure
		return final, current.get(final.tree.id)

	def _derive(self, snapshot, judgement):
		leaf = snapshot.leaf
		if len(judgement.sequent) != len(leaf.link.paths):
			raise SequentializationError("leaf {} does not match {}".format(leaf.id, judgement))
		production = self.productions.get(snapshot.token)
		if production is None:
			d = self._axiom(leaf, judgement)
		else:
			d = self._rule(leaf, judgement, production)
		self.labels[snapshot.token] = d
		return d

	def _axiom(self, leaf, judgement):
		for rule in ("ax", "one"):
			candidate = Derivation(rule, judgement)
			try:
				premise_judgements(candidate)
			except DerivationViolation:
				continue
			return candidate
		raise SequentializationError("leaf {} reads as {}, which is not an axiom".format(leaf.id, judgement))

	def _rule(self, leaf, judgement, production):
		step = production.entry.step
		order = list(leaf.link.paths)
		principal = [order.index(q) for q in step.principal]
		kind = step.kind
		context = self.initial.context
		witness = None
		split = None
		sources = [source for source in production.sources if not source.leaf.link.nominal]

		if kind in ("forall", "par", "plus_left", "plus_right", "with"):
			rule = kind
		elif kind == "exists":
			rule = "exists"
			x = context.formula_at(step.principal[0]).bound
			witness = sources[0].dualizer(x)
		elif kind in ("unit", "load"):
			quantifier = context.formula_at(step.principal[0]).quantifier
			rule = "{}_{}".format(kind, FLAVOR_OF[quantifier])
		elif kind == "pop":
			closed = context.formula_at(step.principal[0])
			rule = "pop_nu" if closed.quantifier == "ya" else "pop_ya"
			nominal = [s for s in production.sources if s.leaf.link.nominal][0]
			witness = nominal.dualizer(closed.bound)
		else:
			rule = kind
			left_leaf = sources[0].leaf
			left = [i for i, p in enumerate(order) if i not in principal and p in left_leaf.link.paths]
			right = [i for i in range(len(order)) if i not in principal and i not in left]
			store_left = [e for e in judgement.store if e in left_leaf.link.store]
			store_right = [e for e in judgement.store if e not in left_leaf.link.store]
			split = Split(left, right, store_left, store_right)

		node = Derivation(rule, judgement, (), principal, witness, split)
		try:
			expected = premise_judgements(node)
		except DerivationViolation as e:
			raise SequentializationError("{} at leaf {}: {}".format(step, leaf.id, e.clause))
		premises = [self._derive(source, premise.judgement) for source, premise in zip(sources, expected)]
		return attr.evolve(node, premises=premises)

def sequentialize(p, trace):
	"""
	Args:
		p: the net the trace starts from
		trace: accepted coalescence trace (list of TraceEntry)
	Returns:
		Derivation of p's context
	"""
	return Sequentializer(p, trace).run()

def check_and_sequentialize(p, seed=0):
	verdict = coalescence.check_greedy(p, seed)
	if not verdict.accepted:
		raise SequentializationError("net does not coalesce")
	return sequentialize(p, verdict.trace)
