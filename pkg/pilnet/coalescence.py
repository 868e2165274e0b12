"""
Coalescence: the top-down rewriting that decides whether a proof structure is a conflict net
"""

import logging
import random
from collections import defaultdict

import attr

from pilnet import steps as step_table
from pilnet.errors import BudgetExceeded, Incoherent, InapplicableStep
from pilnet.steps import Step, TraceEntry
from pilnet.structure import (
	CONC, CONF, BinderRef, IdSupply, Leaf, Node, SequentLink, serialize, substitute_subtrees
)
from pilnet.substitution import join, restrict
from pilnet.syntax import FLAVOR_OF, Binary, Path, free_variables

logger = logging.getLogger(__name__)

# Connectives that can only be closed across two links, or in one link holding a single side
SEPARATING = ("tens", "prec", "plus", "with")

@attr.s(frozen=True)
class Accepted(object):
	trace = attr.ib()
	structure = attr.ib()
	accepted = True

@attr.s(frozen=True)
class Stuck(object):
	structure = attr.ib()
	accepted = False

@attr.s(frozen=True)
class Rejected(object):
	explored = attr.ib(default=0)
	accepted = False

class StepCache(object):
	"""
	Per-link tables shared by every Coalescer of one run. Links are immutable and
	the context and origin never change during a run, so entries stay valid as
	leaves are replaced.
	"""
	def __init__(self):
		self.sides = {}
		self.closures = {}
		self.pathsets = {}
		self.unary = {}
		self.with_paths = None

class Coalescer(object):
	"""
	Holds a pre-structure, lists the steps that apply to it and rewrites it.
	Each step kind is handled by an apply_<kind> method, looked up by name.
	"""
	def __init__(self, structure, cache=None):
		"""
		Args:
			structure: PreStructure to rewrite (never mutated, replaced on every step)
			cache: StepCache of the run this coalescer belongs to
		"""
		self.structure = structure
		self.cache = cache if cache is not None else StepCache()
		self.logger = logging.getLogger(name=self.__class__.__name__)

	@property
	def context(self):
		return self.structure.context

	# ENUMERATION:
	# Every finder yields Step records; prioritized() returns the first non-empty
	# class so the greedy checker never pays for finders it does not need.

	def applicable_steps(self):
		result = []
		for finder in self._finders():
			result.extend(finder())
		return result

	def prioritized(self):
		for finder in self._finders():
			found = list(finder())
			if found:
				return found
		return []

	def _finders(self):
		return (self.dot_steps, self.split_steps, self.pop_steps, self.unary_steps, self.merge_steps, self.prec_steps, self.mix_steps)

	def dot_steps(self):
		for node in self.structure.nodes.values():
			if len(node.children) == 1:
				yield Step("dot_" + node.label, [node.id], node=node.id)

	def split_steps(self):
		candidates = [node for node in self.structure.nodes.values() if node.label == CONF and len(node.children) >= 3]
		if not candidates:
			return
		withs = self._with_paths()
		for node in candidates:
			reach = [self._reach(child) for child in node.children]
			for q in withs:
				if self._partition(reach, q) is not None:
					yield Step("split", [node.id], [q], node=node.id)

	def pop_steps(self):
		for node in self.structure.nodes.values():
			if node.label != CONC:
				continue
			sequents = [c for c in node.children if isinstance(c, Leaf) and not c.link.nominal]
			nominals = [c for c in node.children if isinstance(c, Leaf) and c.link.nominal]
			for nominal in nominals:
				closing = self._pop_sides(nominal)
				if closing is None:
					continue
				closed, witness, _, _ = closing
				for leaf in sequents:
					if self._pop_fits(leaf, nominal, closed, witness):
						yield Step("pop", [leaf.id, nominal.id], [closed], node=node.id)

	def unary_steps(self):
		for leaf in self.structure.leaves.values():
			if leaf.link.nominal:
				continue
			key = (leaf.link, self.structure.dualizer(leaf.id))
			found = self.cache.unary.get(key)
			if found is None:
				found = self.cache.unary[key] = tuple(self._unary_steps_of(leaf.link, key[1]))
			for kind, q in found:
				yield Step(kind, [leaf.id], [q])

	def merge_steps(self):
		for node in self.structure.nodes.values():
			if node.label == CONC:
				yield from self._conc_merges(node, "tens")
			else:
				yield from self._with_merges(node)

	def prec_steps(self):
		"""
		prec merges run after every ready tens, so a prec closes a whole prec cycle at once
		"""
		for node in self.structure.nodes.values():
			if node.label == CONC:
				yield from self._conc_merges(node, "prec")

	def mix_steps(self):
		for node in self.structure.nodes.values():
			if node.label != CONC:
				continue
			leaves = _sequent_children(node)
			for i, a in enumerate(leaves):
				for b in leaves[i + 1:]:
					if not self._crossed(a, b) and self._compatible(a, b):
						yield Step("prec", [a.id, b.id], [], node=node.id)

	# SIDE CONDITIONS

	def _with_paths(self):
		if self.cache.with_paths is None:
			self.cache.with_paths = [path for path, resolved in sorted(self.context.occurrence_table.items())
				if isinstance(resolved.node, Binary) and resolved.node.connective == "with"]
		return self.cache.with_paths

	def _reach(self, tree):
		"""
		Occurrences a subtree's links reach into: sequent elements and nominal binders
		"""
		paths = []
		for t in _leaves_of(tree):
			link = t.link
			paths.extend(link.binder_paths() if link.nominal else link.paths)
		return paths

	def _partition(self, reach, q):
		left, right = q.child("L"), q.child("R")
		sides = ([], [])
		for index, paths in enumerate(reach):
			on_left = any(left.is_prefix_of(p) for p in paths)
			on_right = any(right.is_prefix_of(p) for p in paths)
			if on_left == on_right:
				return None
			sides[0 if on_left else 1].append(index)
		if not sides[0] or not sides[1]:
			return None
		return sides

	def _pop_sides(self, nominal):
		"""
		Returns (closed binder, witness binder, closed variable, witness variable) or None
		"""
		sigma = self.structure.dualizer(nominal.id)
		if len(sigma) != 1:
			return None
		link = nominal.link
		nu, ya = link.variables(self.context)
		closed_var, = sigma.domain()
		if closed_var == nu:
			closed_ref, witness_ref, witness_var = link.nu, link.ya, ya
		else:
			closed_ref, witness_ref, witness_var = link.ya, link.nu, nu
		if not isinstance(closed_ref, BinderRef) or not isinstance(witness_ref, BinderRef):
			return None
		return closed_ref.path, witness_ref.path, closed_var, witness_var

	def _pop_fits(self, leaf, nominal, closed, witness):
		link = leaf.link
		paths = self._pathset(link)
		if closed.child("D") not in paths or witness.child("D") not in paths:
			return False
		witness_var = self.context.formula_at(witness).bound
		if witness_var in link.store.variables():
			return False
		return self._coherent(leaf.id, nominal.id)

	def _coherent(self, a, b):
		try:
			join(self.structure.dualizer(a), self.structure.dualizer(b))
		except Incoherent:
			return False
		return True

	def _compatible(self, a, b):
		"""
		Two sequent links may become one: disjoint stores, coherent dualizers and
		no occurrence of one equal to, inside or above an occurrence of the other
		"""
		if not a.link.store.disjoint(b.link.store):
			return False
		if self._overlap(a.link, b.link):
			return False
		return self._coherent(a.id, b.id)

	def _overlap(self, first, second):
		if len(first.paths) > len(second.paths):
			first, second = second, first
		closure = self._closure(second)
		for p in first.paths:
			if p in closure:
				return True
		return any(q in self._pathset(second) for p in first.paths for q in p.ancestors())

	def _closure(self, link):
		"""
		Every occurrence of the link together with all of its ancestors
		"""
		found = self.cache.closures.get(link)
		if found is None:
			found = set()
			for p in link.paths:
				found.add(p)
				found.update(p.ancestors())
			found = self.cache.closures[link] = frozenset(found)
		return found

	def _pathset(self, link):
		found = self.cache.pathsets.get(link)
		if found is None:
			found = self.cache.pathsets[link] = frozenset(link.paths)
		return found

	def _sides(self, link):
		"""
		Separating connectives above the link's occurrences, each mapped to the sides
		it reaches into (1 left, 2 right, 3 both)
		"""
		found = self.cache.sides.get(link)
		if found is not None:
			return found
		found = {}
		for p in link.paths:
			for depth in range(len(p.steps)):
				q = Path(p.index, p.steps[:depth])
				f = self.context.formula_at(q)
				if isinstance(f, Binary) and f.connective in SEPARATING:
					found[q] = found.get(q, 0) | (1 if p.steps[depth] == "L" else 2)
		self.cache.sides[link] = found
		return found

	def _crossed(self, a, b):
		"""
		Separating connectives one leaf reaches into the left of and the other into the
		right of, as (connective path, left owner, right owner)
		"""
		sa, sb = self._sides(a.link), self._sides(b.link)
		small, large = (sa, sb) if len(sa) <= len(sb) else (sb, sa)
		result = []
		for q in small:
			if q not in large:
				continue
			ma, mb = sa[q], sb[q]
			if ma & 1 and mb & 2:
				result.append((q, a.id, b.id))
			if ma & 2 and mb & 1:
				result.append((q, b.id, a.id))
		return result

	def _free_elsewhere(self, link, sigma, exclude):
		names = set()
		for q in link.paths:
			if q != exclude:
				names.update(sigma(v) for v in free_variables(self.context.formula_at(q)))
		return names

	def _unary_steps_of(self, link, sigma):
		"""
		(kind, principal) of every unary step one sequent link allows
		"""
		paths = self._pathset(link)
		stored = link.store.variables()
		for p in link.paths:
			q = p.parent
			if q is None:
				continue
			f = self.context.formula_at(q)
			if isinstance(f, Binary):
				if f.connective == "par":
					if p.last == "L" and q.child("R") in paths:
						yield "par", q
				elif f.connective == "plus" and not link.touches(p.sibling()):
					yield ("plus_left" if p.last == "L" else "plus_right"), q
				continue

			x = f.bound
			if f.quantifier == "ex":
				yield "exists", q
				continue
			fresh = x not in self._free_elsewhere(link, sigma, p)
			if f.quantifier == "all":
				if fresh and x not in sigma.domain() and x not in stored:
					yield "forall", q
			elif (FLAVOR_OF[f.quantifier], x) in link.store:
				if fresh:
					yield "load", q
			elif fresh and x not in stored and x not in self.structure.origin:
				yield "unit", q

	def _conc_merges(self, node, kind):
		"""
		Pairs holding the two sides of a ready kind connective, merged when every
		connective separating them is ready and of that kind
		"""
		leaves = _sequent_children(node)
		by_id = {leaf.id: leaf for leaf in leaves}
		holders = defaultdict(list)
		for leaf in leaves:
			for p in leaf.link.paths:
				holders[p].append(leaf.id)
		pairs = set()
		for a in leaves:
			for p in a.link.paths:
				if p.last != "L":
					continue
				q = p.parent
				f = self.context.formula_at(q)
				if not isinstance(f, Binary) or f.connective != kind:
					continue
				for b in holders.get(q.child("R"), ()):
					if b != a.id:
						pairs.add((a.id, b))
		for a_id, b_id in sorted(pairs):
			a, b = by_id[a_id], by_id[b_id]
			crossed = self._crossed(a, b)
			if set((left, right) for _, left, right in crossed) != {(a_id, b_id)}:
				continue
			a_paths, b_paths = self._pathset(a.link), self._pathset(b.link)
			if not all(q.child("L") in a_paths and q.child("R") in b_paths for q, _, _ in crossed):
				continue
			kinds = set(self.context.formula_at(q).connective for q, _, _ in crossed)
			if kinds != {kind} or not self._compatible(a, b):
				continue
			if kind == "tens":
				if len(crossed) == 1:
					yield Step("tens", [a_id, b_id], [crossed[0][0]], node=node.id)
			else:
				yield Step("prec", [a_id, b_id], sorted(q for q, _, _ in crossed), node=node.id)

	def _with_merges(self, node):
		leaves = _sequent_children(node)
		holders = defaultdict(list)
		for leaf in leaves:
			for p in leaf.link.paths:
				holders[p].append(leaf)
		for a in leaves:
			for p in a.link.paths:
				q = p.parent
				if p.last != "L" or not self._is_with(q):
					continue
				rest = set(a.link.paths) - {p}
				for b in holders.get(q.child("R"), ()):
					if b.id == a.id or set(b.link.paths) - {q.child("R")} != rest:
						continue
					if b.link.store == a.link.store and self._coherent(a.id, b.id):
						yield Step("with", [a.id, b.id], [q], node=node.id)

	def _is_with(self, q):
		f = self.context.formula_at(q)
		return isinstance(f, Binary) and f.connective == "with"

	# REWRITING

	def dispatch(self, function_name, *args, **kwargs):
		handler = getattr(self, function_name, None)
		if handler is None:
			raise InapplicableStep("no handler {}".format(function_name))
		return handler(*args, **kwargs)

	def apply(self, step):
		"""
		Rewrite with a step already known to apply; returns the trace entry
		"""
		structure, result, dualizer = self.dispatch("apply_" + step.kind, step)
		self.logger.debug("%s -> %s", step, result)
		self.structure = structure
		return TraceEntry(step, result, dualizer)

	def _leaf(self, leaf_id):
		leaf = self.structure.leaves.get(leaf_id)
		if leaf is None:
			raise InapplicableStep("no leaf {}".format(leaf_id))
		return leaf

	def _replace(self, leaf_ids, link, sigma):
		"""
		Replace the first of leaf_ids by a fresh leaf carrying link and sigma, drop the others
		"""
		p = self.structure
		new_id = IdSupply.for_tree(p.tree, "l", p.witnesses).next()
		replacements = {leaf_ids[0]: [Leaf(new_id, link)]}
		for other in leaf_ids[1:]:
			replacements[other] = []
		tree = substitute_subtrees(p.tree, replacements)
		witnesses = dict((k, v) for k, v in p.witnesses.items() if k not in leaf_ids)
		witnesses[new_id] = sigma
		return p.evolve(tree, witnesses), new_id, sigma

	def _close(self, step, opened, extra_store=None, removed_store=None, sigma=None):
		leaf = self._leaf(step.targets[0])
		q = step.principal[0]
		paths = (set(leaf.link.paths) - set(opened)) | {q}
		store = leaf.link.store
		if removed_store is not None:
			store = store.remove(*removed_store)
		if extra_store is not None:
			store = store.add(*extra_store)
		if sigma is None:
			sigma = self.structure.dualizer(leaf.id)
		return self._replace(list(step.targets), SequentLink(paths, store), sigma)

	def apply_par(self, step):
		q = step.principal[0]
		return self._close(step, [q.child("L"), q.child("R")])

	def apply_plus_left(self, step):
		return self._close(step, [step.principal[0].child("L")])

	def apply_plus_right(self, step):
		return self._close(step, [step.principal[0].child("R")])

	def apply_forall(self, step):
		return self._close(step, [step.principal[0].child("D")])

	def apply_unit(self, step):
		return self._close(step, [step.principal[0].child("D")])

	def apply_exists(self, step):
		q = step.principal[0]
		x = self.context.formula_at(q).bound
		sigma = restrict(self.structure.dualizer(step.targets[0]), x)
		return self._close(step, [q.child("D")], sigma=sigma)

	def apply_load(self, step):
		f = self.context.formula_at(step.principal[0])
		return self._close(step, [step.principal[0].child("D")], removed_store=(FLAVOR_OF[f.quantifier], f.bound))

	def apply_pop(self, step):
		leaf_id, nominal_id = step.targets
		nominal = self._leaf(nominal_id)
		_, witness, closed_var, witness_var = self._pop_sides(nominal)
		flavor = FLAVOR_OF[self.context.formula_at(witness).quantifier]
		sigma = restrict(join(self.structure.dualizer(leaf_id), self.structure.dualizer(nominal_id)), closed_var)
		return self._close(step, [step.principal[0].child("D")], extra_store=(flavor, witness_var), sigma=sigma)

	def _merge(self, step, closed, opened):
		a, b = (self._leaf(t) for t in step.targets)
		paths = (set(a.link.paths) | set(b.link.paths)) - set(opened)
		paths |= set(closed)
		sigma = join(self.structure.dualizer(a.id), self.structure.dualizer(b.id))
		return self._replace([a.id, b.id], SequentLink(paths, a.link.store.union(b.link.store)), sigma)

	def apply_tens(self, step):
		q = step.principal[0]
		return self._merge(step, [q], [q.child("L"), q.child("R")])

	def apply_prec(self, step):
		opened = [q.child(side) for q in step.principal for side in "LR"]
		return self._merge(step, step.principal, opened)

	def apply_with(self, step):
		a, b = (self._leaf(t) for t in step.targets)
		q = step.principal[0]
		paths = (set(a.link.paths) - {q.child("L")}) | {q}
		sigma = join(self.structure.dualizer(a.id), self.structure.dualizer(b.id))
		return self._replace([a.id, b.id], SequentLink(paths, a.link.store), sigma)

	def apply_split(self, step):
		p = self.structure
		node = p.nodes[step.targets[0]]
		sides = self._partition([self._reach(child) for child in node.children], step.principal[0])
		if sides is None:
			raise InapplicableStep("{} does not partition {}".format(step.principal[0], node.id))
		supply = IdSupply.for_tree(p.tree, "n")
		halves = [Node(supply.next(), CONF, [node.children[i] for i in side]) for side in sides]
		tree = substitute_subtrees(p.tree, {node.id: [Node(node.id, CONF, halves)]})
		return p.evolve(tree, p.witnesses), node.id, None

	def apply_dot_conc(self, step):
		return self._dot(step)

	def apply_dot_conf(self, step):
		return self._dot(step)

	def _dot(self, step):
		"""
		Collapse a single-child node; a concord child is spliced into a concord parent
		"""
		p = self.structure
		node = p.nodes[step.targets[0]]
		child, = node.children
		parent = p.parents.get(node.id)
		replacement = [child]
		if parent is not None and isinstance(child, Node) and child.label == CONC and parent.label == CONC:
			replacement = list(child.children)
		tree = substitute_subtrees(p.tree, {node.id: replacement})
		return p.evolve(tree, p.witnesses), child.id, None

def _leaves_of(tree):
	if isinstance(tree, Leaf):
		yield tree
	else:
		for child in tree.children:
			yield from _leaves_of(child)

def _sequent_children(node):
	return [c for c in node.children if isinstance(c, Leaf) and not c.link.nominal]

def applicable_steps(p):
	return Coalescer(p).applicable_steps()

def apply_step(p, step):
	"""
	Args:
		p: pre-structure
		step: one of applicable_steps(p)
	Returns:
		(rewritten pre-structure, trace entry)
	"""
	coalescer = Coalescer(p)
	if step not in coalescer.applicable_steps():
		raise InapplicableStep("{} does not apply".format(step))
	entry = coalescer.apply(step)
	return coalescer.structure, entry

def replay(p, trace):
	structure = p
	for entry in trace:
		structure, _ = apply_step(structure, entry.step)
	return structure

def check_greedy(p, seed=0):
	"""
	Saturate with randomly chosen steps of the highest-priority class present.
	Returns Accepted(trace, final structure) or Stuck(final structure).
	"""
	rng = random.Random(seed)
	coalescer = Coalescer(p)
	trace = []
	while True:
		found = coalescer.prioritized()
		if not found:
			break
		trace.append(coalescer.apply(rng.choice(found)))
	if coalescer.structure.is_trivial():
		logger.debug("accepted after %d steps", len(trace))
		return Accepted(trace, coalescer.structure)
	logger.debug("stuck after %d steps", len(trace))
	return Stuck(coalescer.structure)

def check_exhaustive(p, budget=10 ** 6):
	"""
	Depth-first search over every step order, sharing visited structures.
	Returns Accepted or Rejected; raises BudgetExceeded after budget expansions.
	"""
	cache = StepCache()
	seen = set()
	stack = [(p, ())]
	expanded = 0
	while stack:
		structure, trace = stack.pop()
		if structure.is_trivial():
			return Accepted(list(trace), structure)
		key = serialize(structure)
		if key in seen:
			continue
		seen.add(key)
		expanded += 1
		if expanded > budget:
			logger.warning("exhaustive check gave up after %d structures", budget)
			raise BudgetExceeded(budget)
		found = Coalescer(structure, cache).applicable_steps()
		for step in sorted(found, key=step_table.priority, reverse=True):
			coalescer = Coalescer(structure, cache)
			entry = coalescer.apply(step)
			stack.append((coalescer.structure, trace + (entry,)))
	return Rejected(expanded)
