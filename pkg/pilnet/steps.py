"""
Coalescence step kinds and trace records
Laid out the same way as a protocol's packet table: one list to look step metadata up by
position, and an auto generated dictionary to look it up by name
"""

import attr

from pilnet import substitution
from pilnet.errors import NetFormatError
from pilnet.syntax import Path

"""
List of step metadata
"""
step_names = [
	# tuple has step name, target shape and greedy priority (lower runs first)
	("dot_conc", "node", 0),
	# targets: the concord node with a single child
	("dot_conf", "node", 0),
	# targets: the conflict node with a single child
	("split", "node", 1),
	# targets: the conflict node
	# principal: the with formula whose sides partition the children
	("pop", "pair", 2),
	# targets: sequent leaf, nominal leaf
	# principal: the quantifier being closed
	("par", "leaf", 3),
	# principal: the par node
	("plus_left", "leaf", 3),
	("plus_right", "leaf", 3),
	# principal: the plus node
	("forall", "leaf", 3),
	("exists", "leaf", 3),
	("load", "leaf", 3),
	("unit", "leaf", 3),
	# principal: the quantifier node
	("tens", "pair", 4),
	# targets: owner of the left child, owner of the right child
	# principal: the tens node
	("prec", "pair", 5),
	# targets: owner of the left children, owner of the right children
	# principal: every prec node closed at once (empty for a mix merge)
	# runs after the ready tens merges
	("with", "pair", 4),
	# targets: owner of the left child, owner of the right child
	# principal: the with node
]

"""
Dictionary to lookup step shape and priority via name
This dictionary is auto generated
"""
step_kinds = {}
for name, shape, rank in step_names:
	step_kinds[name] = (shape, rank)

MIX_PRIORITY = 6

UNARY_KINDS = tuple(name for name, shape, _ in step_names if shape == "leaf")
STRUCTURAL_KINDS = ("dot_conc", "dot_conf", "split")

def priority(step):
	if step.kind == "prec" and not step.principal:
		return MIX_PRIORITY
	return step_kinds[step.kind][1]

@attr.s(frozen=True)
class Step(object):
	kind = attr.ib()
	targets = attr.ib(converter=tuple)
	principal = attr.ib(default=(), converter=tuple)
	node = attr.ib(default=None)

	@kind.validator
	def _check_kind(self, attribute, value):
		if value not in step_kinds:
			raise NetFormatError("unknown step kind {!r}".format(value))

	def __str__(self):
		text = "{}[{}]".format(self.kind, ",".join(self.targets))
		if self.principal:
			text += "@" + ",".join(str(p) for p in self.principal)
		return text

@attr.s(frozen=True)
class TraceEntry(object):
	step = attr.ib()
	result = attr.ib(default=None)
	dualizer = attr.ib(default=None)

def entry_to_json(entry):
	step = entry.step
	obj = {
		"kind": step.kind,
		"targets": list(step.targets),
		"principal": [str(p) for p in step.principal],
		"result": entry.result,
	}
	if step.node is not None:
		obj["node"] = step.node
	if entry.dualizer is not None:
		obj["dualizer"] = substitution.to_json(entry.dualizer)
	return obj

def entry_from_json(obj):
	try:
		step = Step(obj["kind"], [str(t) for t in obj["targets"]], [Path.parse(p) for p in obj.get("principal", [])], obj.get("node"))
	except (KeyError, TypeError):
		raise NetFormatError("bad trace record {!r}".format(obj))
	dualizer = obj.get("dualizer")
	return TraceEntry(step, obj.get("result"), substitution.from_json(dualizer) if dualizer is not None else None)

def trace_to_json(trace):
	return [entry_to_json(entry) for entry in trace]

def trace_from_json(obj):
	if not isinstance(obj, list):
		raise NetFormatError("trace JSON must be a list of step records")
	return [entry_from_json(record) for record in obj]
