"""
Formulas, occurrence paths, stores and judgements

Formulas are immutable trees. Every node of a judgement's sequent is addressed
by a Path (formula index + L/R/D steps), and links, dualizers and derivations
all speak about occurrences through these paths.
"""

import functools
import logging
import re

import attr
import lark
from cached_property import cached_property

from pilnet.errors import CleanlinessError, ParseError, PathError

logger = logging.getLogger(__name__)

CONNECTIVES = ("par", "tens", "prec", "plus", "with")
QUANTIFIERS = ("all", "ex", "new", "ya")

DUAL_CONNECTIVE = {"par": "tens", "tens": "par", "prec": "prec", "plus": "with", "with": "plus"}
DUAL_QUANTIFIER = {"all": "ex", "ex": "all", "new": "ya", "ya": "new"}

# Store flavor produced by loading a nominal quantifier
FLAVOR_OF = {"new": "nu", "ya": "ya"}
FLAVORS = ("nu", "ya")

VARIABLE = re.compile(r"^[a-zA-Z][a-zA-Z0-9_]*$")

class Formula(object):
	"""
	Base class for formula-tree nodes
	"""
	def __str__(self):
		return print_formula(self)

@attr.s(frozen=True, repr=False)
class Unit(Formula):
	def __repr__(self):
		return "Unit()"

@attr.s(frozen=True)
class Send(Formula):
	subject = attr.ib()
	object = attr.ib()

@attr.s(frozen=True)
class Recv(Formula):
	subject = attr.ib()
	object = attr.ib()

@attr.s(frozen=True, cache_hash=True)
class Binary(Formula):
	connective = attr.ib()
	left = attr.ib()
	right = attr.ib()

	@connective.validator
	def _check_connective(self, attribute, value):
		if value not in CONNECTIVES:
			raise ValueError("unknown connective {}".format(value))

@attr.s(frozen=True, cache_hash=True)
class Quant(Formula):
	quantifier = attr.ib()
	bound = attr.ib()
	body = attr.ib()

	@quantifier.validator
	def _check_quantifier(self, attribute, value):
		if value not in QUANTIFIERS:
			raise ValueError("unknown quantifier {}".format(value))

ATOMS = (Unit, Send, Recv)

@attr.s(frozen=True, order=True)
class Path(object):
	"""
	Occurrence address: formula index in the sequent, then L/R/D steps
	"""
	STEPS = frozenset("DLR")

	index = attr.ib()
	steps = attr.ib(default=(), converter=tuple)

	def __str__(self):
		return ".".join([str(self.index)] + list(self.steps))

	@classmethod
	def parse(cls, text):
		parts = str(text).strip().split(".")
		try:
			index = int(parts[0])
		except ValueError:
			raise PathError("bad path {!r}".format(text))
		if index < 0 or any(step not in cls.STEPS for step in parts[1:]):
			raise PathError("bad path {!r}".format(text))
		return cls(index, parts[1:])

	def child(self, step):
		return Path(self.index, self.steps + (step,))

	@property
	def parent(self):
		"""
		Enclosing occurrence, None for a root
		"""
		if not self.steps:
			return None
		return Path(self.index, self.steps[:-1])

	@property
	def last(self):
		return self.steps[-1] if self.steps else None

	@property
	def depth(self):
		return len(self.steps)

	def sibling(self):
		return self.parent.child({"L": "R", "R": "L"}[self.last])

	def is_prefix_of(self, other):
		return self.index == other.index and other.steps[:len(self.steps)] == self.steps

	def related(self, other):
		return self.is_prefix_of(other) or other.is_prefix_of(self)

	def ancestors(self):
		"""
		Proper ancestors, innermost first
		"""
		path = self.parent
		while path is not None:
			yield path
			path = path.parent

	def rebase(self, index, prefix=()):
		"""
		Re-root this path under the occurrence (index, prefix)
		"""
		return Path(index, tuple(prefix) + self.steps)

@attr.s(frozen=True)
class Store(object):
	"""
	Nominal store: a set of (flavor, variable) entries, each variable at most once
	"""
	entries = attr.ib(default=frozenset(), converter=frozenset)

	@entries.validator
	def _check_entries(self, attribute, value):
		seen = set()
		for flavor, var in value:
			if flavor not in FLAVORS:
				raise CleanlinessError(var, "unknown store flavor {}".format(flavor))
			if var in seen:
				raise CleanlinessError(var, "occurs twice in the store")
			seen.add(var)

	@classmethod
	def parse_entry(cls, text):
		parts = str(text).split()
		if len(parts) != 2 or parts[0] not in FLAVORS or not VARIABLE.match(parts[1]):
			raise ParseError("bad store entry {!r}".format(text))
		return (parts[0], parts[1])

	@staticmethod
	def print_entry(entry):
		return "{} {}".format(*entry)

	def variables(self):
		return frozenset(var for _, var in self.entries)

	def flavor_of(self, var):
		for flavor, name in self.entries:
			if name == var:
				return flavor
		return None

	def add(self, flavor, var):
		return Store(self.entries | {(flavor, var)})

	def remove(self, flavor, var):
		return Store(self.entries - {(flavor, var)})

	def union(self, other):
		return Store(self.entries | other.entries)

	def disjoint(self, other):
		return not (self.variables() & other.variables())

	def sorted(self):
		return sorted(self.entries, key=lambda entry: (entry[1], entry[0]))

	def __iter__(self):
		return iter(self.sorted())

	def __len__(self):
		return len(self.entries)

	def __contains__(self, entry):
		return entry in self.entries

	def __str__(self):
		return ", ".join(self.print_entry(entry) for entry in self)

def _to_store(value):
	return value if isinstance(value, Store) else Store(value)

@attr.s(frozen=True, cache_hash=True)
class Resolved(object):
	node = attr.ib()
	binders = attr.ib(factory=dict, hash=False)

@attr.s(frozen=True, cache_hash=True)
class Judgement(object):
	sequent = attr.ib(converter=tuple)
	store = attr.ib(default=Store(), converter=_to_store)

	def __str__(self):
		return print_judgement(self)

	@cached_property
	def occurrence_table(self):
		"""
		Path -> Resolved for every node of the sequent
		"""
		table = {}
		for index, formula in enumerate(self.sequent):
			_walk(formula, Path(index), {}, table)
		return table

	@cached_property
	def binders(self):
		"""
		Variable -> Path of the quantifier binding it
		"""
		result = {}
		for path, resolved in self.occurrence_table.items():
			if isinstance(resolved.node, Quant):
				result[resolved.node.bound] = path
		return result

	def roots(self):
		return [Path(i) for i in range(len(self.sequent))]

	def formula_at(self, path):
		return resolve_path(self, path).node

	def variables(self):
		"""
		Every variable name appearing anywhere (free, bound or stored)
		"""
		names = set(self.store.variables())
		for formula in self.sequent:
			names |= all_variables(formula)
		return names

def _walk(formula, path, binders, table):
	table[path] = Resolved(formula, binders)
	if isinstance(formula, Binary):
		_walk(formula.left, path.child("L"), binders, table)
		_walk(formula.right, path.child("R"), binders, table)
	elif isinstance(formula, Quant):
		inner = dict(binders)
		inner[formula.bound] = path
		_walk(formula.body, path.child("D"), inner, table)

GRAMMAR = r"""
judgement: store "|-" sequent
store: (store_entry ("," store_entry)*)?
store_entry: "nu" VAR -> nu_entry
	| "ya" VAR -> ya_entry
sequent: formula ("," formula)*

?formula: "one" -> unit
	| VAR "!" VAR -> send
	| VAR "?" VAR -> recv
	| "(" formula "par" formula ")" -> par
	| "(" formula "tens" formula ")" -> tens
	| "(" formula "prec" formula ")" -> prec
	| "(" formula "plus" formula ")" -> plus
	| "(" formula "with" formula ")" -> with_
	| "all" VAR "." formula -> all
	| "ex" VAR "." formula -> ex
	| "new" VAR "." formula -> new
	| "ya" VAR "." formula -> ya

VAR: /[a-zA-Z][a-zA-Z0-9_]*/

%import common.WS
%ignore WS
"""

class _Builder(lark.Transformer):
	"""
	Turns lark parse trees into formula and judgement values
	"""
	def unit(self, items):
		return Unit()

	def send(self, items):
		return Send(str(items[0]), str(items[1]))

	def recv(self, items):
		return Recv(str(items[0]), str(items[1]))

	def par(self, items):
		return Binary("par", items[0], items[1])

	def tens(self, items):
		return Binary("tens", items[0], items[1])

	def prec(self, items):
		return Binary("prec", items[0], items[1])

	def plus(self, items):
		return Binary("plus", items[0], items[1])

	def with_(self, items):
		return Binary("with", items[0], items[1])

	def all(self, items):
		return Quant("all", str(items[0]), items[1])

	def ex(self, items):
		return Quant("ex", str(items[0]), items[1])

	def new(self, items):
		return Quant("new", str(items[0]), items[1])

	def ya(self, items):
		return Quant("ya", str(items[0]), items[1])

	def nu_entry(self, items):
		return ("nu", str(items[0]))

	def ya_entry(self, items):
		return ("ya", str(items[0]))

	def store(self, items):
		return [item for item in items if item is not None]

	def sequent(self, items):
		return list(items)

	def judgement(self, items):
		return items[0], items[1]

@functools.lru_cache(maxsize=None)
def _parser():
	return lark.Lark(GRAMMAR, parser="lalr", start=["judgement", "formula"])

def _parse(text, start):
	try:
		tree = _parser().parse(text, start=start)
	except lark.exceptions.UnexpectedInput as e:
		line = getattr(e, "line", None)
		column = getattr(e, "column", None)
		if line is not None and line < 0:
			line = column = None
		raise ParseError("unexpected input in {}".format(start), line, column)
	return _Builder().transform(tree)

def parse_formula(text):
	return _parse(text, "formula")

def parse_judgement(text):
	"""
	Parse and clean-check a judgement such as "nu x |- x!z, ya y. y?z"
	"""
	entries, sequent = _parse(text, "judgement")
	judgement = Judgement(sequent, Store(entries))
	check_clean(judgement)
	return judgement

def check_clean(judgement):
	"""
	Raises CleanlinessError unless every variable is bound at most once, bound
	and stored variables never occur free, and stored variables occur free
	"""
	bound = set()
	for formula in judgement.sequent:
		for var in _binders(formula):
			if var in bound:
				raise CleanlinessError(var, "bound more than once")
			bound.add(var)

	free = free_variables(judgement)
	clash = sorted(bound & free)
	if clash:
		raise CleanlinessError(clash[0], "occurs both bound and free")
	for var in sorted(judgement.store.variables()):
		if var in bound:
			raise CleanlinessError(var, "stored and bound")
		if var not in free:
			raise CleanlinessError(var, "stored but not free in the sequent")
	return True

def _binders(formula):
	if isinstance(formula, Binary):
		yield from _binders(formula.left)
		yield from _binders(formula.right)
	elif isinstance(formula, Quant):
		yield formula.bound
		yield from _binders(formula.body)

def is_clean(judgement):
	try:
		return check_clean(judgement)
	except CleanlinessError:
		return False

def print_formula(formula):
	if isinstance(formula, Unit):
		return "one"
	if isinstance(formula, Send):
		return "{}!{}".format(formula.subject, formula.object)
	if isinstance(formula, Recv):
		return "{}?{}".format(formula.subject, formula.object)
	if isinstance(formula, Binary):
		return "({} {} {})".format(print_formula(formula.left), formula.connective, print_formula(formula.right))
	return "{} {}. {}".format(formula.quantifier, formula.bound, print_formula(formula.body))

def print_judgement(judgement):
	sequent = ", ".join(print_formula(f) for f in judgement.sequent)
	if len(judgement.store):
		return "{} |- {}".format(judgement.store, sequent)
	return "|- {}".format(sequent)

@functools.lru_cache(maxsize=None)
def _free(formula):
	if isinstance(formula, Unit):
		return frozenset()
	if isinstance(formula, (Send, Recv)):
		return frozenset((formula.subject, formula.object))
	if isinstance(formula, Binary):
		return _free(formula.left) | _free(formula.right)
	return _free(formula.body) - {formula.bound}

def free_variables(value):
	"""
	Free variables of a formula, or of a judgement's sequent
	"""
	if isinstance(value, Judgement):
		result = frozenset()
		for formula in value.sequent:
			result |= _free(formula)
		return result
	return _free(value)

@functools.lru_cache(maxsize=None)
def all_variables(formula):
	if isinstance(formula, Unit):
		return frozenset()
	if isinstance(formula, (Send, Recv)):
		return frozenset((formula.subject, formula.object))
	if isinstance(formula, Binary):
		return all_variables(formula.left) | all_variables(formula.right)
	return all_variables(formula.body) | {formula.bound}

def alpha_equal(f1, f2):
	return _alpha(f1, f2, {}, {}, 0)

def _alpha(a, b, env_a, env_b, depth):
	if type(a) is not type(b):
		return False
	if isinstance(a, Unit):
		return True
	if isinstance(a, (Send, Recv)):
		return _same_var(a.subject, b.subject, env_a, env_b) and _same_var(a.object, b.object, env_a, env_b)
	if isinstance(a, Binary):
		return (a.connective == b.connective
			and _alpha(a.left, b.left, env_a, env_b, depth)
			and _alpha(a.right, b.right, env_a, env_b, depth))
	if a.quantifier != b.quantifier:
		return False
	inner_a = dict(env_a)
	inner_a[a.bound] = depth
	inner_b = dict(env_b)
	inner_b[b.bound] = depth
	return _alpha(a.body, b.body, inner_a, inner_b, depth + 1)

def _same_var(x, y, env_a, env_b):
	if x in env_a or y in env_b:
		return env_a.get(x) == env_b.get(y)
	return x == y

def alpha_key(formula, renaming=None, counter=None):
	"""
	Printed form with bound variables renamed in binding order
	"""
	renaming = {} if renaming is None else renaming
	counter = [0] if counter is None else counter
	if isinstance(formula, Unit):
		return "one"
	if isinstance(formula, (Send, Recv)):
		mark = "!" if isinstance(formula, Send) else "?"
		return renaming.get(formula.subject, formula.subject) + mark + renaming.get(formula.object, formula.object)
	if isinstance(formula, Binary):
		return "({} {} {})".format(alpha_key(formula.left, renaming, counter), formula.connective, alpha_key(formula.right, renaming, counter))
	name = "_{}".format(counter[0])
	counter[0] += 1
	inner = dict(renaming)
	inner[formula.bound] = name
	return "{} {}. {}".format(formula.quantifier, name, alpha_key(formula.body, inner, counter))

def dual(formula):
	if isinstance(formula, Unit):
		return formula
	if isinstance(formula, Send):
		return Recv(formula.subject, formula.object)
	if isinstance(formula, Recv):
		return Send(formula.subject, formula.object)
	if isinstance(formula, Binary):
		return Binary(DUAL_CONNECTIVE[formula.connective], dual(formula.left), dual(formula.right))
	return Quant(DUAL_QUANTIFIER[formula.quantifier], formula.bound, dual(formula.body))

def subformula(formula, steps):
	for step in steps:
		if step == "L" and isinstance(formula, Binary):
			formula = formula.left
		elif step == "R" and isinstance(formula, Binary):
			formula = formula.right
		elif step == "D" and isinstance(formula, Quant):
			formula = formula.body
		else:
			raise PathError("step {} does not exist below {}".format(step, print_formula(formula)))
	return formula

def resolve_path(judgement, path):
	"""
	Args:
		judgement: judgement whose sequent the path addresses
		path: a Path, or its text form
	Returns:
		Resolved(node, binders) where binders maps each variable bound above the node to its binder path
	"""
	if not isinstance(path, Path):
		path = Path.parse(path)
	resolved = judgement.occurrence_table.get(path)
	if resolved is None:
		if path.index >= len(judgement.sequent):
			raise PathError("formula index {} out of range".format(path.index))
		subformula(judgement.sequent[path.index], path.steps)
		raise PathError("no occurrence at {}".format(path))
	return resolved

def occurrences(judgement):
	"""
	All (Path, node) pairs of a judgement in path order
	"""
	return [(path, judgement.occurrence_table[path].node) for path in sorted(judgement.occurrence_table)]

def binder_of(judgement, var):
	return judgement.binders.get(var)

def fresh_variable(avoid, base="w"):
	"""
	Returns base, or base followed by the smallest number, not in avoid
	"""
	if base not in avoid:
		return base
	n = 1
	while "{}{}".format(base, n) in avoid:
		n += 1
	return "{}{}".format(base, n)
