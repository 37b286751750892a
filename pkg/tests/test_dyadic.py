from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from haargreedy.dyadic import (
    DyadicCube,
    GeneralizedChain,
    chain,
    chains_mergeable,
    cube_precedes,
    immediate_successors,
    index_precedes,
    interval_precedes,
    is_generalized_chain,
    iterated_sons,
    mgcr,
    sons,
    sons_of_set,
)
from haargreedy.verify import gen_cube_set

from conftest import cubes

R = DyadicCube.root


def test_cube_basics():
    c = DyadicCube(2, 2, (1, 3))
    assert c.measure == Fraction(1, 16)
    assert c.side == Fraction(1, 4)
    assert c.intervals() == [(Fraction(1, 4), Fraction(1, 4)), (Fraction(3, 4), Fraction(1, 4))]
    assert c.parent() == DyadicCube(2, 1, (0, 1))
    assert R(2).parent() is None
    assert DyadicCube.parse(str(c)) == c


@pytest.mark.parametrize(
    "args",
    [(0, 0, (0,)), (1, -1, (0,)), (1, 1, (2,)), (2, 1, (0,)), (1, 2, (-1,))],
)
def test_cube_validation(args):
    with pytest.raises(ValueError):
        DyadicCube(*args)


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        DyadicCube.parse("cube 3")


def test_interval_precedes_examples():
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    assert interval_precedes(0, half, half, half)
    assert interval_precedes(half, half, 0, quarter)
    assert not interval_precedes(0, quarter, 0, quarter)


def test_cube_precedes_mismatch():
    with pytest.raises(ValueError):
        cube_precedes(R(1), R(2))


@given(cubes(dim=2), cubes(dim=2))
def test_precedes_matches_key_order(a, b):
    assert cube_precedes(a, b) == (a.key < b.key)
    if a != b:
        assert cube_precedes(a, b) != cube_precedes(b, a)


@given(cubes(dim=2), st.integers(1, 3), st.integers(1, 3))
def test_index_precedes_same_cube(a, i, j):
    assert index_precedes((a, i), (a, j)) == (i < j)


def test_immediate_successors_order():
    kids = immediate_successors(R(2))
    assert [k.coords for k in kids] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert [R(2).child(i) for i in range(1, 5)] == kids
    assert [k.successor_index() for k in kids] == [1, 2, 3, 4]
    with pytest.raises(ValueError):
        R(2).child(5)


@given(cubes(max_level=5, min_level=1))
def test_parent_child_roundtrip(c):
    assert c.parent().child(c.successor_index()) == c
    assert c in c.parent().children()
    assert c.parent().strictly_contains(c)


@given(cubes(dim=2, max_level=5), cubes(dim=2, max_level=5))
def test_containment_is_nesting_or_disjoint(a, b):
    ia, ib = a.intervals(), b.intervals()
    overlap = all(x1 < x2 + l2 and x2 < x1 + l1 for (x1, l1), (x2, l2) in zip(ia, ib))
    assert overlap == (a.contains(b) or b.contains(a))
    assert a.disjoint(b) == (not overlap)


@given(cubes(max_level=5, min_level=2))
def test_ancestors_and_offset_bits(c):
    anc = list(c.ancestors())
    assert [a.level for a in anc] == list(range(c.level - 1, -1, -1))
    for a in anc:
        assert a.contains(c)
        child = c.ancestor(a.level + 1)
        assert c.offset_bits(a) == child.successor_index() - 1


def test_translate():
    src, dst = DyadicCube(1, 1, (0,)), DyadicCube(1, 1, (1,))
    assert DyadicCube(1, 3, (1,)).translate(src, dst) == DyadicCube(1, 3, (5,))
    with pytest.raises(ValueError):
        DyadicCube(1, 3, (1,)).translate(src, R(1))


def test_chain():
    inner = DyadicCube(2, 3, (5, 2))
    c = chain(R(2), inner)
    assert c[0] == R(2) and c[-1] == inner and len(c) == 4
    with pytest.raises(ValueError):
        chain(inner, R(2))


def test_generalized_chain_detection():
    a = DyadicCube(1, 1, (0,))
    b = DyadicCube(1, 2, (1,))
    assert is_generalized_chain({a, b}) == a
    assert is_generalized_chain({R(1), b}) is None
    assert is_generalized_chain(set()) is None
    with pytest.raises(ValueError):
        GeneralizedChain.from_cubes({R(1), b})
    g = GeneralizedChain.from_cubes({a})
    assert g.father == R(1) and a in g and len(g) == 1


# -- MGCR against brute-force partition enumeration -----------------------


def _partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [part[k] | {first}] + part[k + 1:]
        yield part + [{first}]


def _brute_mgcr(cubes_):
    found = []
    for part in _partitions(sorted(cubes_, key=lambda c: c.key)):
        if not all(is_generalized_chain(b) for b in part):
            continue
        if any(is_generalized_chain(x | y) for x, y in combinations(part, 2)):
            continue
        found.append(frozenset(frozenset(b) for b in part))
    return found


@pytest.mark.parametrize("seed", range(40))
def test_mgcr_matches_brute_force(seed):
    s = gen_cube_set(f"brute/{seed}", size=random.Random(seed).randint(1, 7))
    found = _brute_mgcr(s)
    assert len(found) == 1
    assert frozenset(r.cubes for r in mgcr(s).mgcr) == found[0]


def test_mgcr_errors():
    with pytest.raises(ValueError):
        mgcr([])
    with pytest.raises(ValueError):
        mgcr([R(1), R(2)])


def test_mgcr_small_example():
    a = DyadicCube(2, 1, (0, 0))
    b = DyadicCube(2, 2, (0, 0))
    c = DyadicCube(2, 2, (3, 3))
    res = mgcr([a, b, c])
    assert [r.cubes for r in res.mgcr] == [frozenset({a, b}), frozenset({c})]
    assert res.fathers == [R(2), DyadicCube(2, 1, (1, 1))]


def test_mgcr_merges_through_father():
    a = DyadicCube(1, 1, (0,))
    b = DyadicCube(1, 2, (2,))
    res = mgcr([R(1), a, b])
    # b's father [1/2,1) is absent, so b stays apart; a's father is the root
    assert sorted(len(r) for r in res.mgcr) == [1, 2]


# -- sons and Λ classes ---------------------------------------------------


def _brute_sons(cube, members):
    return {j for j in members if cube.strictly_contains(j) and set(chain(cube, j)) & members == {cube, j}}


@pytest.mark.parametrize("seed", range(30))
def test_sons_match_definition(seed):
    s = set(gen_cube_set(f"sons/{seed}"))
    res = mgcr(s)
    for cube in s:
        assert sons(cube, s) == _brute_sons(cube, s) == res.sons[cube]
    counts = {c: len(_brute_sons(c, s)) for c in s}
    assert res.lambda0 == {c for c, n in counts.items() if n == 0}
    assert res.lambda1 == {c for c, n in counts.items() if n == 1}
    assert res.lambda2 == {c for c, n in counts.items() if n >= 2}
    assert len(res.lambda2) < len(res.lambda0)


def test_iterated_sons():
    a = R(1)
    b = DyadicCube(1, 2, (0,))
    c = DyadicCube(1, 3, (1,))
    s = {a, b, c}
    assert sons_of_set({a}, s) == {b}
    assert iterated_sons({a}, s, 2) == {c}
    assert iterated_sons({a}, s, 0) == {a}
    with pytest.raises(ValueError):
        sons(DyadicCube(1, 1, (1,)), s)


@given(st.lists(cubes(dim=1, max_level=4), min_size=1, max_size=10))
def test_mgcr_properties(cs):
    res = mgcr(cs)
    union = set()
    for r in res.mgcr:
        assert is_generalized_chain(r.cubes) == r.maximal_cube
        assert union.isdisjoint(r.cubes)
        union |= r.cubes
    assert union == set(cs)
    for x, y in combinations(res.mgcr, 2):
        assert not chains_mergeable(x, y)
    assert {r.cubes for r in mgcr(list(reversed(cs))).mgcr} == {r.cubes for r in res.mgcr}
