"""
Exception hierarchy shared by every pilnet module
"""

class PilnetError(Exception):
	"""
	Base class for everything pilnet raises on purpose
	"""

class MalformedInput(PilnetError, ValueError):
	"""
	Input text or JSON that cannot be turned into a value
	"""

class ParseError(MalformedInput):
	def __init__(self, message, line=None, column=None):
		"""
		Args:
			message: description of what was expected
			line: 1-based line of the offending token (if known)
			column: 1-based column of the offending token (if known)
		"""
		self.line = line
		self.column = column
		if line is not None:
			message = "{}:{}: {}".format(line, column, message)
		super().__init__(message)

class CleanlinessError(MalformedInput):
	def __init__(self, variable, reason):
		self.variable = variable
		super().__init__("variable {}: {}".format(variable, reason))

class PathError(MalformedInput):
	pass

class CaptureError(MalformedInput):
	def __init__(self, variable, image):
		self.variable = variable
		self.image = image
		super().__init__("substituting {} for {} is captured by a binder".format(image, variable))

class Incoherent(MalformedInput):
	def __init__(self, variable):
		self.variable = variable
		super().__init__("substitutions disagree on {}".format(variable))

class NetFormatError(MalformedInput):
	pass

class DerivationFormatError(MalformedInput):
	pass

class ContextMismatch(MalformedInput):
	pass

class StructureViolation(PilnetError):
	def __init__(self, leaf, clause):
		"""
		Args:
			leaf: id of the offending leaf (None for whole-tree clauses)
			clause: name of the failed condition
		"""
		self.leaf = leaf
		self.clause = clause
		super().__init__("{}: {}".format(leaf if leaf is not None else "tree", clause))

class WitnessViolation(StructureViolation):
	pass

class InapplicableStep(PilnetError):
	pass

class DerivationViolation(PilnetError):
	def __init__(self, path, clause):
		"""
		Args:
			path: premise indices from the root to the offending node
			clause: name of the failed condition
		"""
		self.path = tuple(path)
		self.clause = clause
		super().__init__("at /{}: {}".format("/".join(str(i) for i in self.path), clause))

class SequentializationError(PilnetError):
	pass

class PermutationError(PilnetError):
	pass

class PatternMismatch(PermutationError):
	pass

class DependencyViolation(PermutationError):
	pass

class BudgetExceeded(PilnetError):
	def __init__(self, budget):
		self.budget = budget
		super().__init__("search budget of {} exhausted".format(budget))
