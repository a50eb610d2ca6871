import random
from fractions import Fraction as F

import pytest

from corpus import random_unfrayed
from permealab import chains, crossings
from permealab.bv import PiecewiseFn, variation
from permealab.chains import scheme_gC
from permealab.crossings import Kind, _graph_meets
from permealab.errors import DomainMismatch, EnumerationLimitExceeded

ZERO = PiecewiseFn.constant(0)
FIVE = PiecewiseFn.constant(5)


def test_classify_examples(gh):
    c = crossings.classify(ZERO, chains.rectangle(gh, [5]))
    assert (c.kind, c.good, c.local_variation) == (Kind.UP, True, 0)
    assert crossings.classify(ZERO, chains.rectangle(gh, [1])).kind is Kind.NONE
    for r in chains.children(gh, gh.root):
        assert crossings.classify(FIVE, r).kind is Kind.NONE


def test_classify_domain_mismatch(gh):
    short = PiecewiseFn.constant(0, 0, F(1, 2))
    with pytest.raises(DomainMismatch):
        crossings.classify(short, chains.rectangle(gh, [200]))


def test_zero_function_depth_one(gh):
    t = crossings.good_tree(ZERO, gh, 1)
    assert t.root.xi == 26
    assert all(c.crossing.good for c in t.root.children)


def test_zero_function_gc_root():
    t = crossings.good_tree(ZERO, scheme_gC(), 1)
    assert t.root.xi == 202
    assert crossings.verify_branching(t)


def test_zero_function_depth_two_counts(gh):
    # Neighbours sharing a pinned zero boundary both cross it, so counts alternate.
    t = crossings.good_tree(ZERO, gh, 2)
    xis = [c.xi for c in t.root.children]
    assert set(xis) == {25, 27}
    assert sum(xis) == 676
    assert crossings.verify_branching(t)


def test_zero_function_depth_three_branching(gh):
    t = crossings.good_tree(ZERO, gh, 3, materialize_leaves=False)
    assert crossings.verify_branching(t)


def test_budget_guard(gh):
    with pytest.raises(EnumerationLimitExceeded):
        crossings.good_tree(ZERO, gh, 9)
    with pytest.raises(EnumerationLimitExceeded):
        crossings.good_tree(ZERO, gh, 2, budget=100)


@pytest.mark.parametrize("seed", range(40))
def test_pruned_scan_matches_census(gh, seed):
    rng = random.Random(seed)
    f = crossings.random_attacker(rng) if seed % 2 else random_unfrayed(rng)
    parent = gh.root
    if seed % 3:
        level_one, _ = crossings._good_children(f, gh, gh.root, [10 ** 9], True, [])
        if level_one:
            parent = rng.choice(level_one).rect
    expect = sorted(r.path[-1] for r, c in crossings.census(f, gh, parent) if c.good)
    kids, count = crossings._good_children(f, gh, parent, [10 ** 9], True, [])
    assert [k.node[-1] for k in kids] == expect
    assert count == len(expect)


@pytest.mark.parametrize("seed", range(20))
def test_cover_count_matches_brute_force(gh, seed):
    f = random_unfrayed(random.Random(100 + seed))
    brute = sum(1 for r in chains.children(gh, gh.root)
                if _graph_meets(f, r.x, r.right, r.y, r.top))
    assert crossings.cover_counts(f, gh, 1)[1] == brute


def test_cover_counts_zero_and_five(gh):
    assert crossings.cover_counts(ZERO, gh, 3) == [1, 26, 676, 17576]
    assert crossings.cover_count(ZERO, gh, 1) <= crossings.covering_bound(1, 0)
    assert crossings.covering_bound(1, 0) == 42
    assert crossings.cover_counts(FIVE, gh, 2)[1:] == [0, 0]


def test_nongood_variation_zero_function(gh):
    assert crossings.nongood_variation(ZERO, gh, gh.root) == (0, 0)


def test_attacker_contract():
    rng = random.Random(7)
    for _ in range(50):
        f = crossings.random_attacker(rng)
        assert f(0) == 0 and variation(f) < 1 and f.is_unfrayed()


def test_tree_json_is_deterministic(gh, attackers):
    f = attackers[0]
    a = crossings.tree_json(crossings.good_tree(f, gh, 2))
    b = crossings.tree_json(crossings.good_tree(f, gh, 2))
    assert a == b
