from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest

from haargreedy.constructions import (
    NestedCornerChain,
    build_f_N,
    build_f_N_eps,
    build_g_N_eps,
    build_rademacher_product,
    corner_cube,
    f_N_eps_greedy_closed_form,
    forced_weak_greedy_set,
    g_N_eps_greedy_closed_form,
    khinchine_l1,
    khinchine_l1_enumerate,
    rademacher,
    rademacher_product_values,
    rademacher_sum,
    walsh_coefficients,
    walsh_synthesis_l1,
)
from haargreedy.dyadic import DyadicCube
from haargreedy.greedy import GreedyParams, run
from haargreedy.haar import analysis, evaluate, norm, synthesis

from conftest import cells, grid_values

H = Fraction(1, 2)


def test_corner_chain():
    assert NestedCornerChain(3).cubes == [DyadicCube(2, n, (0, 0)) for n in range(4)]
    with pytest.raises(ValueError):
        NestedCornerChain(-1)


@pytest.mark.parametrize("N", [1, 2, 4])
def test_f_N_is_scaled_corner_indicator(N):
    f = build_f_N(N)
    values = grid_values(f, N)
    for cell, v in values.items():
        assert v == (4**N if cell == corner_cube(N) else 0)
    assert norm(f) == 1


def test_f_N_eps_shape():
    eps = Fraction(1, 96)
    f = build_f_N_eps(4, eps)
    assert len(f) == 12 and f.constant == 1
    assert f.get(corner_cube(0), 2) == 1 - eps and f.get(corner_cube(3), 3) == 1
    assert norm(f - build_f_N(4)) <= 6 * eps
    for bad in [(3, eps), (0, eps), (4, 0), (4, 1)]:
        with pytest.raises(ValueError):
            build_f_N_eps(*bad)


@pytest.mark.parametrize("k", [1, 2, 4])
def test_s1_greedy_reaches_closed_form(k):
    eps = Fraction(1, 6 * k)
    f = build_f_N_eps(2 * k, eps)
    trace = run(f, GreedyParams(1, H, max_steps=3 * k + 1))
    G = trace.approximant(3 * k + 1)
    assert G == f_N_eps_greedy_closed_form(2 * k)
    assert norm(G) / norm(f) >= Fraction(k, 8) / (1 + 3 * k * eps)


def test_g_N_eps_shape():
    g = build_g_N_eps(3, Fraction(1, 8), H)
    assert g.constant == H and g.get(corner_cube(3), 1) == 1
    assert g.get(corner_cube(1), 3) == H * Fraction(7, 8)
    with pytest.raises(ValueError):
        build_g_N_eps(3, Fraction(1, 8), 1)
    with pytest.raises(ValueError):
        build_g_N_eps(0, Fraction(1, 8), H)


@pytest.mark.parametrize("N", [2, 4, 8])
def test_st_greedy_reaches_closed_form(N):
    t = H
    eps = Fraction(2, N)
    if eps >= 1:
        eps = Fraction(1, 2)
    g = build_g_N_eps(N, eps, t)
    G = run(g, GreedyParams(t, t, max_steps=2 * N + 1)).approximant(2 * N + 1)
    assert G == g_N_eps_greedy_closed_form(N, t)
    assert norm(G) / norm(g) >= N * t / (2 * (1 + t + N * t * eps))


def test_rademacher_values():
    for n in (1, 2, 3):
        vals = synthesis(rademacher(n), 3)
        assert vals == [1 if (x >> (3 - n)) & 1 == 0 else -1 for x in range(8)]
    with pytest.raises(ValueError):
        rademacher(0)


def test_rademacher_sum_matches_grid():
    u = Fraction(2, 5)
    f = rademacher_sum(3, u)
    vals = synthesis(f, 3)
    assert vals == [1 + u * (3 - 2 * bin(x).count("1")) for x in range(8)]


@pytest.mark.parametrize("N", [1, 3, 5])
def test_rademacher_product_matches_analysis(N):
    u = Fraction(1, 3)
    values = rademacher_product_values(N, u)
    assert build_rademacher_product(N, u) == analysis(values, 1, N)
    assert sum(values) == 1 << N


def test_khinchine():
    assert khinchine_l1(1) == 1 and khinchine_l1(4) == Fraction(3, 2)
    assert khinchine_l1(16) == Fraction(102960, 32768) == khinchine_l1_enumerate(16)
    for N in range(9):
        assert khinchine_l1(N) == khinchine_l1_enumerate(N)
    for N in (4, 8, 16, 32, 64):
        ratio = float(khinchine_l1(N)) / N**0.5
        assert 0.75 <= ratio <= 1
    with pytest.raises(ValueError):
        khinchine_l1(-1)


def test_walsh_coefficients_match_inner_products():
    N, u = 4, Fraction(1, 3)
    values = rademacher_product_values(N, u)
    coeffs = walsh_coefficients(values)
    for bits in product((0, 1), repeat=N):
        A = frozenset(n + 1 for n, b in enumerate(bits) if b)
        walsh = [(-1) ** sum(((x >> (N - n)) & 1) for n in A) for x in range(1 << N)]
        direct = sum(v * w for v, w in zip(values, walsh)) / (1 << N)
        assert coeffs[A] == direct == u ** len(A)
    with pytest.raises(ValueError):
        walsh_coefficients([Fraction(1)] * 3)


def test_forced_set_and_synthesis():
    N, u = 6, Fraction(2, 5)
    coeffs = walsh_coefficients(rademacher_product_values(N, u))
    chosen = forced_weak_greedy_set(coeffs, N + 1, H)
    assert chosen == {frozenset()} | {frozenset({n}) for n in range(1, N + 1)}
    kept = {a: coeffs[a] for a in chosen}
    assert walsh_synthesis_l1(kept, N) == norm(rademacher_sum(N, u))
    assert walsh_synthesis_l1(coeffs, N) == 1
    with pytest.raises(ValueError):
        forced_weak_greedy_set(coeffs, 2, H)
    with pytest.raises(ValueError):
        forced_weak_greedy_set(coeffs, 0, H)


def test_grid_oracle_agrees_on_g():
    g = build_g_N_eps(2, Fraction(1, 4), H)
    vals = grid_values(g, 3)
    assert all(evaluate(g, c) == vals[c] for c in cells(2, 3))
