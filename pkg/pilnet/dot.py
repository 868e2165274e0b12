"""
DOT export for nets, coalescence traces and derivations
"""

from graphviz import Digraph

from pilnet.calculus import Derivation
from pilnet.coalescence import replay
from pilnet.structure import CONC, Leaf, PreStructure

SHAPES = {CONC: "circle", "conf": "diamond"}
SYMBOLS = {CONC: "⌢", "conf": "#"}

def _leaf_label(p, leaf):
	dualizer = p.dualizer(leaf.id)
	text = "{}: {}".format(leaf.id, leaf.link)
	if len(dualizer):
		text += "\\n" + str(dualizer)
	return text

def _draw_tree(graph, p, prefix=""):
	"""
	Adds the coco-tree of p to graph; node names are prefixed so snapshots can share a graph
	"""
	stack = [p.tree]
	while stack:
		t = stack.pop()
		name = prefix + t.id
		if isinstance(t, Leaf):
			graph.node(name, label=_leaf_label(p, t), shape="box")
			continue
		graph.node(name, label=SYMBOLS[t.label], shape=SHAPES[t.label])
		for child in t.children:
			graph.edge(name, prefix + child.id)
		stack.extend(reversed(t.children))

def net_graph(p):
	graph = Digraph(name="net", graph_attr={"label": str(p.context), "rankdir": "TB"})
	_draw_tree(graph, p)
	return graph

def trace_graph(p, trace):
	"""
	One numbered cluster per intermediate structure, step 0 being p itself
	"""
	graph = Digraph(name="trace", graph_attr={"label": str(p.context), "rankdir": "TB"})
	snapshots = [p]
	for entry in trace:
		snapshots.append(replay(snapshots[-1], [entry]))
	for k, snapshot in enumerate(snapshots):
		with graph.subgraph(name="cluster_{}".format(k)) as sub:
			title = "{}".format(k) if k == 0 else "{}: {}".format(k, trace[k - 1].step)
			sub.attr(label=title)
			_draw_tree(sub, snapshot, prefix="s{}_".format(k))
	return graph

def derivation_graph(d):
	"""
	Conclusions as boxes, rules as edge labels from a node to its premises
	"""
	graph = Digraph(name="derivation", graph_attr={"rankdir": "BT"})
	stack = [(d, "d")]
	while stack:
		node, name = stack.pop()
		graph.node(name, label=str(node.conclusion), shape="box")
		label = node.rule
		if node.witness is not None:
			label += " " + node.witness
		if not node.premises:
			graph.node(name + "r", label=label, shape="plaintext")
			graph.edge(name + "r", name)
		for k, premise in enumerate(node.premises):
			child = "{}_{}".format(name, k)
			graph.edge(child, name, label=label)
			stack.append((premise, child))
	return graph

def export_dot(obj, trace=None):
	"""
	Args:
		obj: PreStructure or Derivation
		trace: list of TraceEntry starting at obj (PreStructure only)
	Returns:
		DOT source text
	"""
	if isinstance(obj, Derivation):
		return derivation_graph(obj).source
	if not isinstance(obj, PreStructure):
		raise TypeError("cannot draw {}".format(type(obj).__name__))
	if trace is not None:
		return trace_graph(obj, trace).source
	return net_graph(obj).source
