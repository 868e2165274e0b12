import json
import random
from collections import Counter

import pytest
from hamcrest import (
	assert_that, empty, equal_to, greater_than, greater_than_or_equal_to, has_item, has_length, is_, less_than_or_equal_to,
	not_
)

from pilnet import corpus
from pilnet.bridge import check_and_sequentialize, translate_to_conflict_net
from pilnet.calculus import check_derivation, prove_search, rule_counts, size, to_json
from pilnet.coalescence import check_exhaustive, check_greedy
from pilnet.structure import isomorphic, validate_structure
from pilnet.syntax import Quant, is_clean, parse_judgement

def test_fixtures_load():
	for fixture in (corpus.WORKED_NET, corpus.TENSOR_SELF_NET, corpus.OVERLAP_NET,
			corpus.PREC_TENS_CYCLE_NET, corpus.FLATTENING_PAIR_NET):
		assert_that(validate_structure(corpus.net(fixture)), is_(True))
	for fixture in (corpus.PREC_DIVERGENCE_NET, corpus.TENS_DIVERGENCE_NET):
		assert_that(corpus.net(fixture).leaves, has_length(3))
	for obj in corpus.NAMED_DERIVATIONS.values():
		assert_that(check_derivation(corpus.derivation(obj)), is_(True))

def test_derivation_corpus_starts_with_the_written_fixtures():
	derivations = corpus.derivation_corpus()
	names = [name for name, _ in derivations]
	assert_that(names[:4], equal_to(sorted(corpus.NAMED_DERIVATIONS)))
	assert_that(derivations, has_length(len(corpus.NAMED_DERIVATIONS) + len(corpus.JUDGEMENTS)))

def test_every_corpus_net_coalesces():
	for name, p in corpus.net_corpus():
		assert_that((name, check_greedy(p).accepted), equal_to((name, True)))

def test_corpus_directory(tmp_path):
	for name, obj in corpus.NAMED_DERIVATIONS.items():
		(tmp_path / "{}.deriv.json".format(name)).write_text(json.dumps(obj))
	(tmp_path / "notes.txt").write_text("not a derivation")
	loaded = corpus.load_corpus_dir(tmp_path)
	assert_that([name for name, _ in loaded], equal_to(sorted(corpus.NAMED_DERIVATIONS)))

def test_small_judgements_are_clean_and_distinct():
	judgements = list(corpus.small_judgements(pairs=1))
	assert_that(judgements, not_(empty()))
	assert_that(len(set(str(j) for j in judgements)), equal_to(len(judgements)))
	for j in judgements:
		assert_that((str(j), is_clean(j)), equal_to((str(j), True)))

def test_small_judgements_reach_depth_three():
	judgements = list(corpus.small_judgements(pairs=2, quantifiers=False))
	depths = Counter(max(corpus.depth(f) for f in j.sequent) for j in judgements)
	assert_that(max(depths), equal_to(3))
	assert_that(depths[3], greater_than(0))
	texts = [str(j) for j in judgements]
	assert_that(texts, has_item("|- ((a!b par a?b) tens (b!a prec b?a))"))

def test_small_judgements_commute_and_bind_once():
	judgements = list(corpus.small_judgements(pairs=1))
	texts = [str(j) for j in judgements]
	assert_that(texts, has_item("|- (a!b par a?b)"))
	assert_that(texts, not_(has_item("|- (a?b par a!b)")))
	for j in judgements:
		quantifiers = [f for f in j.sequent if isinstance(f, Quant)]
		assert_that(len(quantifiers), less_than_or_equal_to(2))
	assert_that(texts, has_item("|- new x. x!b, ya y. y?b"))
	assert_that(texts, has_item("|- all x. x!b, ex y. y?b"))

def test_small_structures_include_nominal_links():
	j = parse_judgement("|- new x. x!b, ya y. y?b")
	structures = list(corpus.small_structures(j, 2))
	nominal = [p for p in structures if any(leaf.link.nominal for leaf in p.leaves.values())]
	assert_that(nominal, not_(empty()))
	assert_that(any(check_greedy(p).accepted for p in nominal), is_(True))

@pytest.mark.parametrize("seed", range(6))
def test_random_derivations(seed):
	d = corpus.random_derivation(random.Random(seed), 12)
	assert_that(check_derivation(d), is_(True))
	assert_that(size(d), greater_than(1))
	p = translate_to_conflict_net(d)
	back = check_and_sequentialize(p, seed)
	assert_that(isomorphic(translate_to_conflict_net(back), p), is_(True))

def test_random_derivations_are_reproducible():
	first = corpus.random_derivation(5, 10)
	assert_that(to_json(corpus.random_derivation(5, 10)), equal_to(to_json(first)))

def test_random_derivations_use_nominal_rules():
	counts = Counter()
	for seed in range(10):
		counts.update(rule_counts(corpus.random_derivation(seed, 40)))
	assert_that(counts["unit_nu"] + counts["unit_ya"], greater_than(0))
	assert_that(counts["load_nu"] + counts["load_ya"], greater_than(0))
	assert_that(counts["pop_nu"] + counts["pop_ya"], equal_to(counts["load_nu"] + counts["load_ya"]))

def test_random_with_branches_differ():
	found = 0
	for seed in range(20):
		stack = [corpus.random_derivation(seed, 30)]
		while stack:
			d = stack.pop()
			if d.rule == "with":
				left, right = d.premises
				assert_that(to_json(left), not_(equal_to(to_json(right))))
				found += 1
			stack.extend(d.premises)
	assert_that(found, greater_than(0))

@pytest.mark.parametrize("target", (50, 100, 200, 300))
def test_generated_net_sizes(target):
	p = corpus.generated_net(target, seed=target)
	nodes = len(p.context.occurrence_table)
	assert_that(nodes, greater_than_or_equal_to(target * 3 // 4))
	assert_that(nodes, less_than_or_equal_to(2 * target))
	assert_that(len(p.leaves), greater_than_or_equal_to(target // 15))
	assert_that(len(p.leaves), less_than_or_equal_to(target // 4))

def check_small_instances(pairs, max_leaves):
	"""
	Coalescence accepts exactly the translations of derivations, greedily or not:
	a judgement is provable iff some structure over it is accepted
	"""
	checked = 0
	for j in corpus.small_judgements(pairs=pairs):
		provable = prove_search(j, budget=10 ** 5)
		accepted_any = False
		for p in corpus.small_structures(j, max_leaves):
			greedy = check_greedy(p)
			assert_that((str(p.context), greedy.accepted), equal_to((str(p.context), check_exhaustive(p).accepted)))
			if greedy.accepted:
				accepted_any = True
				back = check_and_sequentialize(p)
				assert_that(isomorphic(translate_to_conflict_net(back), p), is_(True))
			checked += 1
		if provable.provable:
			assert_that(check_greedy(translate_to_conflict_net(provable.derivation)).accepted, is_(True))
		assert_that((str(j), accepted_any), equal_to((str(j), provable.provable)))
	return checked

def test_small_instances_agree_with_derivations():
	assert_that(check_small_instances(1, 2), greater_than(0))

@pytest.mark.slow
def test_all_instances_up_to_two_pairs():
	assert_that(check_small_instances(2, 4), greater_than(0))
