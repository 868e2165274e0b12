"""
Command-line surface

Every subcommand reads its inputs, calls one library entry point and maps the
outcome to an exit code:
	0 - ok / accepted / equivalent / provable
	1 - rejected / stuck / unprovable / not isomorphic
	2 - malformed input
	3 - budget exceeded
"""

import argparse
import datetime
import json
import logging
import os
import sys
import tempfile
from pathlib import Path as FilePath

import colorama
import toml

from pilnet import bridge, calculus, coalescence, corpus, equivalence, flattening, structure
from pilnet.dot import export_dot
from pilnet.errors import (
	BudgetExceeded, DerivationViolation, MalformedInput, PermutationError, SequentializationError, StructureViolation
)
from pilnet.steps import trace_from_json, trace_to_json
from pilnet.syntax import parse_judgement
from pilnet.workers import POOL_TYPES

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_MALFORMED = 2
EXIT_BUDGET = 3

DEFAULT_CONFIG = "pilnet.toml"
DEFAULT_BUDGET = 10 ** 6

DEFAULTS = {
	"global": {"debug": False},
	"check": {"seed": 0, "budget": DEFAULT_BUDGET},
	"prove": {"budget": DEFAULT_BUDGET},
	"canonicity": {"trials": 1000, "seed": 0, "workers": 0, "pool": "thread"},
	"output": {"colour": True},
}

TEMPLATE = """# {1} Configuration File - TOML
# template generation timestamp: {0} UTC

# Command-line flags always override the values below.

title = "{1} Configuration File"

[global]
# Log every coalescence step, flattening step and search expansion.
debug = false

[check]
# Seed for the greedy step order of check-net, sequentialize and flatten.
seed = 0

# Structures the exhaustive check may expand before giving up (exit code 3).
budget = {2}

[prove]
# Judgements the proof search may expand before giving up (exit code 3).
budget = {2}

[canonicity]
# Random permutation walks per mode (local and strong).
trials = 1000
seed = 0

# Worker count, 0 for one per logical cpu.
workers = 0

# thread, process, multiprocess (dill pickling) or serial.
pool = "thread"

[output]
# Colour verdicts on the terminal.
colour = true
"""

class Halt(Exception):
	"""
	Ends a command early with an exit code
	"""
	def __init__(self, code):
		self.code = code
		super().__init__(code)

def _merge(defaults, loaded):
	result = {}
	for section, values in defaults.items():
		result[section] = dict(values)
		result[section].update(loaded.get(section, {}))
	return result

def load_config(location, explicit):
	"""
	Args:
		location: config file path
		explicit: whether the user named the file; a named missing file gets a template
	Returns:
		merged config dict, or None when a template was written instead
	"""
	config_file = FilePath(location)
	if not config_file.is_file():
		if not explicit:
			return _merge(DEFAULTS, {})
		with open(location, "w+") as handle:
			handle.write(TEMPLATE.format(datetime.datetime.utcnow(), "pilnet", DEFAULT_BUDGET))
		print("Config file generated at " + str(location) + ", please modify it.")
		return None
	with open(location, "r") as handle:
		try:
			loaded = toml.loads(handle.read())
		except toml.TomlDecodeError as e:
			raise MalformedInput("{}: {}".format(location, e))
	return _merge(DEFAULTS, loaded)

def write_atomic(target, text):
	"""
	Write text next to target, then rename it into place
	"""
	directory = os.path.dirname(os.path.abspath(target))
	handle = tempfile.NamedTemporaryFile("w", dir=directory, prefix=".pilnet-", delete=False)
	try:
		with handle:
			handle.write(text)
		os.replace(handle.name, target)
	except BaseException:
		if os.path.exists(handle.name):
			os.unlink(handle.name)
		raise

class Console(object):
	def __init__(self, colour):
		self.colour = colour
		if colour:
			colorama.init()

	def verdict(self, ok, text):
		if self.colour:
			tint = colorama.Fore.GREEN if ok else colorama.Fore.RED
			text = tint + colorama.Style.BRIGHT + text + colorama.Style.RESET_ALL
		print(text, file=sys.stderr)

	def error(self, text):
		if self.colour:
			text = colorama.Fore.YELLOW + text + colorama.Style.RESET_ALL
		print("error: " + text, file=sys.stderr)

class Commands(object):
	"""
	One cmd_<name> method per subcommand, looked up by name
	"""
	def __init__(self, args, config, console):
		self.args = args
		self.config = config
		self.console = console
		self.logger = logging.getLogger(name=self.__class__.__name__)

	def dispatch(self, name):
		return getattr(self, "cmd_" + name.replace("-", "_"))()

	def option(self, name, section, key):
		value = getattr(self.args, name, None)
		return self.config[section][key] if value is None else value

	# input and output

	def read_json(self, location):
		try:
			with open(location, "r") as handle:
				return json.load(handle)
		except OSError as e:
			raise MalformedInput("{}: {}".format(location, e.strerror))
		except ValueError as e:
			raise MalformedInput("{}: {}".format(location, e))

	def read_net(self, location):
		obj = self.read_json(location)
		if isinstance(obj, dict) and "net" in obj:
			obj = obj["net"]
		p = structure.from_json(obj)
		structure.validate_structure(p)
		return p

	def read_derivation(self, location):
		return calculus.from_json(self.read_json(location))

	def emit(self, obj, location=None):
		text = obj if isinstance(obj, str) else json.dumps(obj, indent=2, sort_keys=True)
		location = location or getattr(self.args, "output", None)
		if location:
			write_atomic(location, text + "\n")
		else:
			print(text)

	def finish(self, ok, text):
		self.console.verdict(ok, text)
		return EXIT_OK if ok else EXIT_FAILED

	# subcommands

	def cmd_check_derivation(self):
		d = self.read_derivation(self.args.file)
		calculus.check_derivation(d)
		return self.finish(True, "valid derivation of {} ({} rules)".format(d.conclusion, calculus.size(d)))

	def cmd_prove(self):
		judgement = parse_judgement(self.args.judgement)
		verdict = calculus.prove_search(judgement, self.option("budget", "prove", "budget"))
		if not verdict.provable:
			return self.finish(False, "unprovable ({} judgements explored)".format(verdict.explored))
		self.emit(calculus.to_json(verdict.derivation))
		return self.finish(True, "provable")

	def cmd_translate(self):
		d = self.read_derivation(self.args.file)
		translate = bridge.translate_to_slice_net if self.args.slice else bridge.translate_to_conflict_net
		self.emit(structure.to_json(translate(d)))
		return EXIT_OK

	def cmd_check_net(self):
		p = self.read_net(self.args.file)
		if self.args.exhaustive:
			verdict = coalescence.check_exhaustive(p, self.option("budget", "check", "budget"))
		else:
			verdict = coalescence.check_greedy(p, self.option("seed", "check", "seed"))
		if not verdict.accepted:
			if isinstance(verdict, coalescence.Stuck):
				self.emit(structure.to_json(verdict.structure))
			return self.finish(False, "stuck" if isinstance(verdict, coalescence.Stuck) else "rejected")
		document = {"net": structure.to_json(p), "trace": trace_to_json(verdict.trace)}
		self.emit(document, self.args.trace)
		return self.finish(True, "accepted in {} steps".format(len(verdict.trace)))

	def cmd_sequentialize(self):
		obj = self.read_json(self.args.file)
		if isinstance(obj, dict) and "trace" in obj:
			p = self.read_net(self.args.file)
			d = bridge.sequentialize(p, trace_from_json(obj["trace"]))
		else:
			p = structure.from_json(obj)
			structure.validate_structure(p)
			verdict = coalescence.check_greedy(p, self.option("seed", "check", "seed"))
			if not verdict.accepted:
				return self.finish(False, "net does not coalesce")
			d = bridge.sequentialize(p, verdict.trace)
		self.emit(calculus.to_json(d))
		return self.finish(True, "sequentialized into {} rules".format(calculus.size(d)))

	def cmd_flatten(self):
		p = self.read_net(self.args.file)
		normal, measures = flattening.normalize_with_measures(p, self.option("seed", "check", "seed"))
		if self.args.verbose:
			self.console.verdict(True, "measures: " + " ".join(str(m) for m in measures))
		self.emit(structure.to_json(normal))
		return EXIT_OK

	def cmd_iso(self):
		p1 = self.read_net(self.args.first)
		p2 = self.read_net(self.args.second)
		same = structure.isomorphic(p1, p2, self.args.modulo_witness)
		return self.finish(same, "isomorphic" if same else "not isomorphic")

	def cmd_permute(self):
		d = self.read_derivation(self.args.file)
		at = [int(k) for k in self.args.at.split("/") if k != ""]
		side = None if self.args.side is None else int(self.args.side)
		try:
			result = equivalence.permute(d, equivalence.Permutation(self.args.cls, at, side))
		except PermutationError as e:
			return self.finish(False, "permutation does not apply: {}".format(e))
		self.emit(calculus.to_json(result))
		return EXIT_OK

	def cmd_equivalent(self):
		d1 = self.read_derivation(self.args.first)
		d2 = self.read_derivation(self.args.second)
		verdict = equivalence.equivalent_bounded(d1, d2, self.args.mode, self.args.budget)
		if not verdict.equivalent:
			return self.finish(False, "no permutation path found ({} derivations explored)".format(verdict.explored))
		self.emit({
			"forward": [p.to_json() for p in verdict.forward],
			"backward": [p.to_json() for p in verdict.backward],
		})
		return self.finish(True, "equivalent")

	def cmd_canonicity(self):
		derivations = corpus.load_corpus_dir(self.args.corpus_dir)
		if self.args.builtin:
			derivations.extend(corpus.derivation_corpus())
		report = equivalence.canonicity_suite(
			derivations,
			self.option("trials", "canonicity", "trials"),
			self.option("seed", "canonicity", "seed"),
			workers=self.option("workers", "canonicity", "workers"),
			pool=self.option("pool", "canonicity", "pool"),
		)
		target = os.path.join(self.args.output or self.args.corpus_dir, "canonicity-report.json")
		write_atomic(target, json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
		failures = len(report.failures)
		return self.finish(not failures, "{} trials, {} failures, report at {}".format(len(report.results), failures, target))

	def cmd_dot(self):
		obj = self.read_json(self.args.file)
		if isinstance(obj, dict) and "rule" in obj:
			text = export_dot(calculus.from_json(obj))
		elif isinstance(obj, dict) and "trace" in obj:
			text = export_dot(structure.from_json(obj["net"]), trace_from_json(obj["trace"]))
		else:
			text = export_dot(structure.from_json(obj))
		self.emit(text)
		return EXIT_OK

def build_parser():
	parser = argparse.ArgumentParser(prog="pilnet", description="Proof nets for PiL")
	parser.add_argument("--config", default=None, help="TOML config file (default: {} if present)".format(DEFAULT_CONFIG))
	parser.add_argument("--debug", action="store_true", help="log every step")
	parser.add_argument("--no-colour", dest="colour", action="store_false", default=None, help="plain verdicts")
	sub = parser.add_subparsers(dest="command", required=True)

	def command(name, **kwargs):
		p = sub.add_parser(name, **kwargs)
		p.add_argument("-o", "--output", default=None, help="write the result here instead of stdout")
		return p

	p = command("check-derivation", help="check a derivation JSON file")
	p.add_argument("file")

	p = command("prove", help="search for a derivation of a judgement")
	p.add_argument("judgement")
	p.add_argument("--budget", type=int, default=None)

	p = command("translate", help="derivation to conflict (or slice) net")
	p.add_argument("file")
	p.add_argument("--slice", action="store_true")

	p = command("check-net", help="decide coalescence of a net")
	p.add_argument("file")
	p.add_argument("--seed", type=int, default=None)
	p.add_argument("--exhaustive", action="store_true")
	p.add_argument("--budget", type=int, default=None)
	p.add_argument("--trace", default=None, help="write the accepted trace here")

	p = command("sequentialize", help="net (or net with trace) to derivation")
	p.add_argument("file")
	p.add_argument("--seed", type=int, default=None)

	p = command("flatten", help="normalize a net to its slice net")
	p.add_argument("file")
	p.add_argument("--seed", type=int, default=None)
	p.add_argument("--verbose", action="store_true", help="print the measure after every step")

	p = command("iso", help="compare two nets up to isomorphism")
	p.add_argument("first")
	p.add_argument("second")
	p.add_argument("--modulo-witness", action="store_true", help="compare dualizers only by the variables they identify")

	p = command("permute", help="apply one rule permutation")
	p.add_argument("file")
	p.add_argument("--at", required=True, help="premise indices separated by /, empty for the root")
	p.add_argument("--class", dest="cls", required=True, choices=equivalence.CLASSES)
	p.add_argument("--side", default=None, help="premise whose rule moves below a binary rule")

	p = command("equivalent", help="bounded search for a permutation path between two derivations")
	p.add_argument("first")
	p.add_argument("second")
	p.add_argument("--mode", choices=equivalence.MODES, default="strong")
	p.add_argument("--budget", type=int, default=10 ** 4)

	p = command("canonicity", help="randomized permutation trials over a corpus directory")
	p.add_argument("corpus_dir")
	p.add_argument("--trials", type=int, default=None)
	p.add_argument("--seed", type=int, default=None)
	p.add_argument("--workers", type=int, default=None)
	p.add_argument("--pool", choices=POOL_TYPES, default=None)
	p.add_argument("--builtin", action="store_true", help="add the built-in corpus")

	p = command("dot", help="DOT export of a net, trace or derivation")
	p.add_argument("file")
	return parser

def run(argv):
	parser = build_parser()
	try:
		args = parser.parse_args(argv)
	except SystemExit as e:
		return EXIT_MALFORMED if e.code else EXIT_OK

	colour = args.colour if args.colour is not None else sys.stderr.isatty()
	console = Console(colour)
	try:
		config = load_config(args.config or DEFAULT_CONFIG, args.config is not None)
	except MalformedInput as e:
		console.error(str(e))
		return EXIT_MALFORMED
	if config is None:
		return EXIT_OK
	if args.colour is None:
		console = Console(colour and config["output"]["colour"])

	debug = args.debug or config["global"]["debug"]
	logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
	logging.getLogger().setLevel(logging.DEBUG if debug else logging.INFO)

	commands = Commands(args, config, console)
	try:
		return commands.dispatch(args.command)
	except BudgetExceeded as e:
		console.error(str(e))
		return EXIT_BUDGET
	except MalformedInput as e:
		console.error("{}: {}".format(getattr(args, "file", None) or args.command, e))
		return EXIT_MALFORMED
	except (StructureViolation, DerivationViolation) as e:
		console.error("{}: {}".format(getattr(args, "file", None) or args.command, e))
		return EXIT_FAILED
	except SequentializationError as e:
		console.error(str(e))
		return EXIT_FAILED

def main():
	sys.exit(run(sys.argv[1:]))
