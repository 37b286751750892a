from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from haargreedy.dyadic import DyadicCube, GeneralizedChain
from haargreedy.errors import HypothesisError
from haargreedy.greedy import GreedyParams, run
from haargreedy.haar import HaarExpansion, haar_function
from haargreedy.verify import (
    LEMMA_IDS,
    SUITES,
    check_chain_union,
    check_key_lemma_one,
    check_key_lemma_two,
    check_lambda_inequality,
    check_mgcr_structure,
    check_norm_lemma,
    check_roundtrip,
    check_termination,
    check_uniform_bound,
    gen_chain_pair,
    gen_cube_set,
    gen_expansion,
    gen_key_one_instance,
    key_one_constant,
    key_two_constant,
    lemma_3_3_constant,
    run_suite,
    summarize,
    uniform_bound_constant,
)

from conftest import cubes, expansions

R = DyadicCube.root
S, T = Fraction(3, 4), Fraction(1, 2)


def test_constants():
    assert lemma_3_3_constant(1) == lemma_3_3_constant(2) == Fraction(1, 2)
    assert lemma_3_3_constant(3) == Fraction(1, 4)
    assert key_one_constant(S, T) == Fraction(3, 16) / 24
    assert key_two_constant(T) == 22
    assert uniform_bound_constant(2, S, T) == 8470
    assert uniform_bound_constant(1, S, T) == 22 * (1 + 128)


def test_gen_expansion_deterministic():
    assert gen_expansion("x", 2, 4, 10) == gen_expansion("x", 2, 4, 10)
    assert len(gen_expansion("x", 2, 4, 0)) == 0
    f = gen_expansion(7, 3, 2, 40, 4)
    assert f.max_level() <= 2 and len(f) <= 40
    assert all(abs(v) <= 4 for v in f.coeffs.values())
    with pytest.raises(ValueError):
        gen_expansion(0, 0, 2, 3)


def test_norm_lemma_examples():
    cube = DyadicCube(2, 1, (0, 1))
    h = haar_function(cube, 2)
    v = check_norm_lemma("L3_1", h, (R(2), cube), (2, 1))
    assert v.holds and v.lhs == v.rhs == 1
    v = check_norm_lemma("L3_2", h, (cube,))
    assert v.holds and v.lhs == 0
    assert check_norm_lemma("MONO", h, (cube.child(1), cube)).holds
    d = v.to_dict()
    assert d["lemma_id"] == "L3_2" and d["lhs"] == "0/1"


@pytest.mark.parametrize(
    "lemma, cubes_",
    [
        ("L3_1", (DyadicCube(2, 1, (0, 0)), R(2))),
        ("L3_3a", (R(2), DyadicCube(2, 2, (0, 0)))),
        ("L3_4", (R(2), DyadicCube(2, 1, (0, 0)), DyadicCube(2, 3, (0, 0)))),
        ("L3_5", (R(2), DyadicCube(2, 1, (0, 0)), DyadicCube(2, 1, (0, 0)))),
        ("MONO", (R(2), R(2))),
        ("L9", (R(2),)),
    ],
)
def test_norm_lemma_rejects_bad_nesting(lemma, cubes_):
    with pytest.raises(ValueError):
        check_norm_lemma(lemma, HaarExpansion(2, 1), cubes_)


def test_norm_lemma_rejects_bad_input():
    with pytest.raises(ValueError):
        check_norm_lemma("L3_2", HaarExpansion(1, 2), (R(1),))
    with pytest.raises(ValueError):
        check_norm_lemma("L3_1", HaarExpansion(1, 1), (R(1), R(1)), (2, 1))


@given(expansions(dim=2, max_level=3, max_coeffs=8), cubes(dim=2, max_level=2), st.data())
def test_norm_lemmas_property(f, cube, data):
    i, j = data.draw(st.integers(1, 3)), data.draw(st.integers(1, 3))
    child = cube.child(data.draw(st.integers(1, 4)))
    grand = child.child(data.draw(st.integers(1, 4)))
    for lemma in ("L3_3a", "L3_3b", "L3_3c"):
        assert check_norm_lemma(lemma, f, (cube, child), (i, j)).holds
    assert check_norm_lemma("L3_4", f, (cube, child, grand), (i, j)).holds
    assert check_norm_lemma("L3_5", f, (cube, cube, grand), (i, j)).holds
    assert check_norm_lemma("MONO", f, (grand, cube)).holds


@pytest.mark.parametrize("seed", range(20))
def test_combinatorial_checks(seed):
    s = gen_cube_set(seed)
    assert check_mgcr_structure(s).holds
    assert check_lambda_inequality(s).holds
    assert check_chain_union(*gen_chain_pair(seed)).holds


def test_chain_union_example():
    a = GeneralizedChain.from_cubes({DyadicCube(1, 2, (0,))})
    b = GeneralizedChain.from_cubes({DyadicCube(1, 1, (0,))})
    v = check_chain_union(a, b)
    assert v.holds


def test_key_one_single_cube():
    p = haar_function(DyadicCube(2, 1, (1, 0)), 3)
    v = check_key_lemma_one(p, HaarExpansion(2), S, T)
    assert v.holds and v.rhs == key_one_constant(S, T)


def test_key_one_hypotheses():
    cube = DyadicCube(1, 1, (0,))
    p = haar_function(cube, 1)
    with pytest.raises(HypothesisError) as exc:
        check_key_lemma_one(p, HaarExpansion(1), T, S)
    assert exc.value.which == "0"
    with pytest.raises(HypothesisError) as exc:
        check_key_lemma_one(haar_function(R(1), 1), HaarExpansion(1), S, T)
    assert exc.value.which == "0"
    with pytest.raises(HypothesisError) as exc:
        check_key_lemma_one(p, p, S, T)
    assert exc.value.which == "1"
    with pytest.raises(HypothesisError) as exc:
        check_key_lemma_one(p.scale(Fraction(1, 2)), HaarExpansion(1), S, T)
    assert exc.value.which == "2"
    q = HaarExpansion(1, 0, {(R(1), 1): Fraction(7, 8)})
    with pytest.raises(HypothesisError) as exc:
        check_key_lemma_one(p, q, S, T)
    assert exc.value.which == "4"


@pytest.mark.parametrize("seed", range(10))
def test_key_one_generated(seed):
    p, q = gen_key_one_instance(seed, 1 + seed % 3, S, T)
    assert check_key_lemma_one(p, q, S, T).holds


def test_key_two():
    f = haar_function(DyadicCube(2, 2, (1, 1)), 1)
    v = check_key_lemma_two(f, HaarExpansion(2), T)
    assert v.holds and v.lhs == 1 and v.rhs == 22
    with pytest.raises(HypothesisError) as exc:
        check_key_lemma_two(f + HaarExpansion(2, 1), HaarExpansion(2), T)
    assert exc.value.which == "2"


def test_uniform_bound_and_termination():
    f = haar_function(DyadicCube(3, 1, (0, 1, 1)), 5)
    trace = run(f, GreedyParams(S, T))
    v = check_uniform_bound(trace)
    assert v.holds and v.lhs == 1
    assert check_termination(trace).holds
    short = run(f + HaarExpansion(3, 1), GreedyParams(S, T, max_steps=1))
    assert not check_termination(short).holds
    with pytest.raises(ValueError):
        check_uniform_bound(run(f, GreedyParams(1, T)))


def test_roundtrip_check():
    assert check_roundtrip([Fraction(k) for k in range(8)], 1, 3).holds
    assert check_roundtrip([Fraction(1, 3)] * 4, 2, 1).holds


def test_run_suite_deterministic_and_parallel():
    a = run_suite("roundtrip", 6, seed="s")
    assert [v.to_dict() for v in a] == [v.to_dict() for v in run_suite("roundtrip", 6, seed="s")]
    b = run_suite("roundtrip", 6, seed="s", jobs=2)
    assert [v.to_dict() for v in a] == [v.to_dict() for v in b]
    with pytest.raises(ValueError):
        run_suite("nope", 1)


def test_run_all_and_summary():
    verdicts = run_suite("all", 2)
    rows = summarize(verdicts)
    ids = [r[0] for r in rows]
    assert ids == [lid for lid in LEMMA_IDS if lid in ids]
    assert all(failures == 0 for _, _, failures in rows)
    assert len(SUITES) == 7
