"""
Links, coco-trees and pre-structures

A pre-structure is a coco-tree whose leaves carry links, a witness map giving
every leaf its dualizer, and the judgement the links point into.
"""

import logging

import attr
from cached_property import cached_property
from mmh3 import hash128

from pilnet import substitution
from pilnet.errors import ContextMismatch, NetFormatError, StructureViolation, PilnetError
from pilnet.substitution import EMPTY, Substitution
from pilnet.syntax import FLAVOR_OF, Path, Quant, Recv, Send, Store, Unit, parse_judgement

logger = logging.getLogger(__name__)

CONC = "conc"
CONF = "conf"
LABELS = (CONC, CONF)

@attr.s(frozen=True)
class BinderRef(object):
	"""
	Nominal link side pointing at a quantifier occurrence
	"""
	path = attr.ib()

	def variable(self, context):
		return context.formula_at(self.path).bound

	def flavor(self, context):
		return FLAVOR_OF.get(context.formula_at(self.path).quantifier)

	def __str__(self):
		return "@" + str(self.path)

	def to_json(self):
		return {"binder": str(self.path)}

@attr.s(frozen=True)
class StoreRef(object):
	"""
	Nominal link side pointing at a store entry
	"""
	flavor = attr.ib()
	var = attr.ib()

	def variable(self, context):
		return self.var

	def __str__(self):
		return "{} {}".format(self.flavor, self.var)

	def to_json(self):
		return {"store": str(self)}

@attr.s(frozen=True, cache_hash=True)
class SequentLink(object):
	paths = attr.ib(converter=lambda paths: tuple(sorted(paths)))
	store = attr.ib(default=Store(), converter=lambda s: s if isinstance(s, Store) else Store(s))
	nominal = False

	def touches(self, path):
		return any(path.is_prefix_of(p) for p in self.paths)

	def key(self):
		text = ",".join(str(p) for p in self.paths)
		if len(self.store):
			text += ";" + str(self.store)
		return text

	def __str__(self):
		return "{" + self.key() + "}"

@attr.s(frozen=True, cache_hash=True)
class NominalLink(object):
	nu = attr.ib()
	ya = attr.ib()
	nominal = True

	def variables(self, context):
		return self.nu.variable(context), self.ya.variable(context)

	def binder_paths(self):
		return [ref.path for ref in (self.nu, self.ya) if isinstance(ref, BinderRef)]

	def touches(self, path):
		return any(path.is_prefix_of(p) for p in self.binder_paths())

	def key(self):
		return "nom({},{})".format(self.nu, self.ya)

	def __str__(self):
		return self.key()

def touches(link, path):
	"""
	True iff the link reaches inside the occurrence at path
	"""
	return link.touches(path)

@attr.s(frozen=True)
class Leaf(object):
	id = attr.ib()
	link = attr.ib()

@attr.s(frozen=True)
class Node(object):
	id = attr.ib()
	label = attr.ib()
	children = attr.ib(converter=tuple)

	@label.validator
	def _check_label(self, attribute, value):
		if value not in LABELS:
			raise ValueError("unknown coco-tree label {}".format(value))

def walk(tree):
	"""
	Pre-order iteration over every leaf and node
	"""
	yield tree
	if isinstance(tree, Node):
		for child in tree.children:
			yield from walk(child)

def tree_leaves(tree):
	return [t for t in walk(tree) if isinstance(t, Leaf)]

class IdSupply(object):
	"""
	Hands out leaf ("l") or node ("n") ids not yet used in a tree
	"""
	def __init__(self, used=(), prefix="l"):
		self.used = set(used)
		self.prefix = prefix
		self.counter = 0

	@classmethod
	def for_tree(cls, tree, prefix, extra=()):
		return cls([t.id for t in walk(tree)] + list(extra), prefix)

	def next(self):
		while True:
			candidate = "{}{}".format(self.prefix, self.counter)
			self.counter += 1
			if candidate not in self.used:
				self.used.add(candidate)
				return candidate

def _number_nodes(tree):
	if all(t.id is not None for t in walk(tree)):
		return tree
	supply = IdSupply.for_tree(tree, "n")
	def number(t):
		if isinstance(t, Leaf):
			return t
		return Node(t.id if t.id is not None else supply.next(), t.label, [number(c) for c in t.children])
	return number(tree)

def conc(*children):
	return Node(None, CONC, children)

def conf(*children):
	return Node(None, CONF, children)

def nominal_variables(tree, context):
	names = set()
	for leaf in tree_leaves(tree):
		if leaf.link.nominal:
			names.update(leaf.link.variables(context))
	return frozenset(names)

@attr.s(frozen=True, hash=False)
class PreStructure(object):
	"""
	Coco-tree + witness map + context judgement.
	origin holds the variables of the nominal links of the linking the
	structure started from; rewriting keeps it unchanged.
	"""
	tree = attr.ib(converter=_number_nodes)
	witnesses = attr.ib(converter=dict)
	context = attr.ib()
	origin = attr.ib(default=None)

	def __attrs_post_init__(self):
		if self.origin is None:
			object.__setattr__(self, "origin", nominal_variables(self.tree, self.context))

	@cached_property
	def leaves(self):
		return {leaf.id: leaf for leaf in tree_leaves(self.tree)}

	@cached_property
	def nodes(self):
		return {t.id: t for t in walk(self.tree) if isinstance(t, Node)}

	@cached_property
	def parents(self):
		result = {}
		for t in walk(self.tree):
			if isinstance(t, Node):
				for child in t.children:
					result[child.id] = t
		return result

	def links(self):
		return {leaf_id: leaf.link for leaf_id, leaf in self.leaves.items()}

	def dualizer(self, leaf_id):
		return self.witnesses.get(leaf_id, EMPTY)

	def evolve(self, tree, witnesses):
		return PreStructure(tree, witnesses, self.context, self.origin)

	def is_trivial(self):
		"""
		Single sequent leaf over exactly the sequent roots, empty dualizer and store
		"""
		if not isinstance(self.tree, Leaf) or self.tree.link.nominal:
			return False
		link = self.tree.link
		return (not len(self.dualizer(self.tree.id))
			and not len(link.store)
			and list(link.paths) == self.context.roots())

def substitute_subtrees(tree, replacements):
	"""
	Args:
		tree: coco-tree to rewrite
		replacements: id -> list of subtrees taking that subtree's place among its siblings
	Returns:
		the rewritten tree (the root must be replaced by exactly one subtree)
	"""
	def rewrite(t):
		if t.id in replacements:
			return list(replacements[t.id])
		if isinstance(t, Leaf):
			return [t]
		children = []
		for child in t.children:
			children.extend(rewrite(child))
		if len(children) == len(t.children) and all(a is b for a, b in zip(children, t.children)):
			return [t]
		return [Node(t.id, t.label, children)]
	result = rewrite(tree)
	if len(result) != 1:
		raise PilnetError("rewriting removed the root")
	return result[0]

def canonize(tree):
	"""
	Merge same-labelled parent/child nodes and drop single-child nodes
	"""
	if isinstance(tree, Leaf):
		return tree
	children = []
	for child in (canonize(c) for c in tree.children):
		if isinstance(child, Node) and child.label == tree.label:
			children.extend(child.children)
		else:
			children.append(child)
	if len(children) == 1:
		return children[0]
	return Node(tree.id, tree.label, children)

def is_canonical(tree):
	for t in walk(tree):
		if isinstance(t, Node):
			if len(t.children) < 2:
				return False
			if any(isinstance(c, Node) and c.label == t.label for c in t.children):
				return False
	return True

def _check_link(leaf, context):
	link = leaf.link
	if link.nominal:
		refs = (link.nu, link.ya)
		if not all(isinstance(ref, BinderRef) for ref in refs):
			raise StructureViolation(leaf.id, "nominal link with a store side is not axiomatic")
		try:
			quantifiers = [context.formula_at(ref.path) for ref in refs]
		except PilnetError:
			raise StructureViolation(leaf.id, "nominal link points outside the sequent")
		if not all(isinstance(q, Quant) for q in quantifiers):
			raise StructureViolation(leaf.id, "nominal link side is not a quantifier")
		if quantifiers[0].quantifier != "new" or quantifiers[1].quantifier != "ya":
			raise StructureViolation(leaf.id, "nominal link must pair a new-bound and a ya-bound variable")
		return

	if len(link.store):
		raise StructureViolation(leaf.id, "link with a store is not axiomatic")
	try:
		formulas = [context.formula_at(p) for p in link.paths]
	except PilnetError:
		raise StructureViolation(leaf.id, "link points outside the sequent")
	for a in link.paths:
		for b in link.paths:
			if a != b and a.is_prefix_of(b):
				raise StructureViolation(leaf.id, "link elements overlap")
	if len(formulas) == 1 and isinstance(formulas[0], Unit):
		return
	kinds = sorted(type(f).__name__ for f in formulas)
	if kinds != ["Recv", "Send"]:
		raise StructureViolation(leaf.id, "link is not axiomatic")

def validate_structure(p):
	"""
	True when every leaf is axiomatic, the tree canonical and the witness map valid.
	Raises StructureViolation naming the first failed clause otherwise.
	"""
	seen = set()
	for leaf in tree_leaves(p.tree):
		if leaf.id in seen:
			raise StructureViolation(leaf.id, "leaf id used twice")
		seen.add(leaf.id)
		_check_link(leaf, p.context)
	if not is_canonical(p.tree):
		raise StructureViolation(None, "coco-tree is not canonical")
	substitution.validate_witness_map(p.witnesses, p.links(), p.context)
	return True

def _partition_key(s):
	"""
	Renders the variable partition a dualizer induces, forgetting its direction
	"""
	classes = {}
	for v, w in s.bindings:
		classes.setdefault(w, {w}).add(v)
	return "[" + "|".join(sorted(",".join(sorted(c)) for c in classes.values())) + "]"

def serialize_tree(tree, witnesses, modulo_witness_renaming=False):
	"""
	Canonical text for a coco-tree: ids are ignored, children sorted
	"""
	if isinstance(tree, Leaf):
		s = witnesses.get(tree.id, EMPTY)
		dualizer = _partition_key(s) if modulo_witness_renaming else str(s)
		return "<{}{}>".format(tree.link.key(), dualizer)
	children = sorted(serialize_tree(c, witnesses, modulo_witness_renaming) for c in tree.children)
	return "{}({})".format(tree.label, " ".join(children))

def serialize(p, modulo_witness_renaming=False):
	return serialize_tree(p.tree, p.witnesses, modulo_witness_renaming)

def fingerprint(p):
	return "{:032x}".format(hash128(str(p.context) + "\n" + serialize(p)))

def isomorphic(p1, p2, modulo_witness_renaming=False):
	"""
	Args:
		p1, p2: pre-structures over the same context
		modulo_witness_renaming: compare dualizers only by the variable classes they identify
	"""
	if p1.context != p2.context:
		raise ContextMismatch("structures live over different judgements: {} / {}".format(p1.context, p2.context))
	return serialize(p1, modulo_witness_renaming) == serialize(p2, modulo_witness_renaming)

def _ref_to_json(ref):
	return ref.to_json()

def _ref_from_json(obj):
	if not isinstance(obj, dict) or len(obj) != 1:
		raise NetFormatError("bad variable reference {!r}".format(obj))
	if "binder" in obj:
		return BinderRef(Path.parse(obj["binder"]))
	if "store" in obj:
		return StoreRef(*Store.parse_entry(obj["store"]))
	raise NetFormatError("bad variable reference {!r}".format(obj))

def tree_to_json(tree):
	if isinstance(tree, Leaf):
		link = tree.link
		if link.nominal:
			body = {"id": tree.id, "nominal": {"nu": _ref_to_json(link.nu), "ya": _ref_to_json(link.ya)}}
		else:
			body = {"id": tree.id, "paths": [str(p) for p in link.paths]}
			if len(link.store):
				body["store"] = [Store.print_entry(e) for e in link.store]
		return {"leaf": body}
	return {tree.label: [tree_to_json(c) for c in tree.children]}

def tree_from_json(obj):
	if not isinstance(obj, dict) or len(obj) != 1:
		raise NetFormatError("bad coco-tree node {!r}".format(obj))
	(key, value), = obj.items()
	if key in LABELS:
		if not isinstance(value, list) or not value:
			raise NetFormatError("{} node needs a non-empty child list".format(key))
		return Node(None, key, [tree_from_json(c) for c in value])
	if key != "leaf" or not isinstance(value, dict) or "id" not in value:
		raise NetFormatError("bad coco-tree node {!r}".format(obj))
	if "nominal" in value:
		refs = value["nominal"]
		link = NominalLink(_ref_from_json(refs.get("nu")), _ref_from_json(refs.get("ya")))
	elif "paths" in value:
		link = SequentLink([Path.parse(p) for p in value["paths"]], Store(Store.parse_entry(e) for e in value.get("store", [])))
	else:
		raise NetFormatError("leaf {} has neither paths nor nominal sides".format(value["id"]))
	return Leaf(str(value["id"]), link)

def to_json(p):
	obj = {
		"context": str(p.context),
		"tree": tree_to_json(p.tree),
		"witnesses": {leaf_id: substitution.to_json(p.dualizer(leaf_id)) for leaf_id in sorted(p.leaves)},
	}
	if p.origin != nominal_variables(p.tree, p.context):
		obj["origin"] = sorted(p.origin)
	return obj

def from_json(obj):
	"""
	Leaves missing from "witnesses" get the empty dualizer
	"""
	if not isinstance(obj, dict) or "context" not in obj or "tree" not in obj:
		raise NetFormatError("net JSON needs context and tree")
	context = parse_judgement(obj["context"])
	tree = tree_from_json(obj["tree"])
	witnesses = {}
	for leaf in tree_leaves(tree):
		witnesses[leaf.id] = substitution.from_json(obj.get("witnesses", {}).get(leaf.id, {}))
	origin = frozenset(obj["origin"]) if "origin" in obj else None
	return PreStructure(tree, witnesses, context, origin)
