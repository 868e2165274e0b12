"""
Flattening: pushes concord nodes below conflict nodes until at most one conflict node,
the root, remains. The normal form of a conflict net is its slice net.
"""

import logging
import random

import attr

from pilnet.errors import InapplicableStep
from pilnet.structure import CONC, CONF, IdSupply, Leaf, Node, canonize, substitute_subtrees, walk

logger = logging.getLogger(__name__)

@attr.s(frozen=True)
class FlatteningStep(object):
	node = attr.ib()
	child = attr.ib()

def flattening_steps(p):
	found = []
	for node in p.nodes.values():
		if node.label != CONC or len(node.children) < 2:
			continue
		for child in node.children:
			if isinstance(child, Node) and child.label == CONF:
				found.append(FlatteningStep(node.id, child.id))
	return found

def _copy(tree, leaf_ids, node_ids, witnesses):
	if isinstance(tree, Leaf):
		new_id = leaf_ids.next()
		witnesses[new_id] = witnesses[tree.id]
		return Leaf(new_id, tree.link)
	return Node(node_ids.next(), tree.label, [_copy(c, leaf_ids, node_ids, witnesses) for c in tree.children])

def flatten_step(p, s):
	"""
	⌢(#(t1..tn), u1..um) becomes #(⌢(t1, u1..um), ⌢(t2, copies of u1..um), ...).
	The first slice keeps the original u's; copies get fresh leaf ids and the same dualizers.
	"""
	node = p.nodes.get(s.node)
	if node is None or node.label != CONC or len(node.children) < 2:
		raise InapplicableStep("{} is not a concord node with siblings".format(s.node))
	conflict = [c for c in node.children if c.id == s.child]
	if not conflict or not isinstance(conflict[0], Node) or conflict[0].label != CONF:
		raise InapplicableStep("{} is not a conflict child of {}".format(s.child, s.node))
	conflict = conflict[0]
	others = [c for c in node.children if c.id != s.child]

	witnesses = dict(p.witnesses)
	leaf_ids = IdSupply.for_tree(p.tree, "l", witnesses)
	node_ids = IdSupply.for_tree(p.tree, "n")
	slices = []
	for i, branch in enumerate(conflict.children):
		siblings = others if i == 0 else [_copy(o, leaf_ids, node_ids, witnesses) for o in others]
		slices.append(Node(node_ids.next(), CONC, [branch] + siblings))
	tree = substitute_subtrees(p.tree, {node.id: [Node(conflict.id, CONF, slices)]})
	return p.evolve(canonize(tree), witnesses)

def measure_mu(tree):
	if isinstance(tree, Leaf):
		return 2
	values = [measure_mu(c) for c in tree.children]
	if tree.label == CONF:
		return sum(values) + len(values) - 1
	result = 1
	for value in values:
		result *= value
	return result

def is_slice(p):
	"""
	At most one conflict node, and only at the root
	"""
	return all(t is p.tree or not (isinstance(t, Node) and t.label == CONF) for t in walk(p.tree))

def normalize_with_measures(p, seed=0):
	"""
	Returns (normal form, list of μ before each step and after the last)
	"""
	rng = random.Random(seed)
	measures = [measure_mu(p.tree)]
	while True:
		found = flattening_steps(p)
		if not found:
			break
		p = flatten_step(p, rng.choice(found))
		measures.append(measure_mu(p.tree))
	logger.debug("normal form after %d flattening steps", len(measures) - 1)
	return p, measures

def normalize(p, seed=0):
	return normalize_with_measures(p, seed)[0]
