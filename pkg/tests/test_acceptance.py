"""The nine acceptance criteria, each with its time limit.

Every test records one ``PASS``/``FAIL`` line; the lines are printed in the
terminal summary and, with ``-s``, inline as well.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from haargreedy import constructions as cons
from haargreedy.greedy import GreedyParams, run
from haargreedy.haar import norm
from haargreedy.verify import run_suite, summarize

from conftest import ACCEPTANCE_LINES

H = Fraction(1, 2)


@contextmanager
def criterion(number: int, title: str, limit: float):
    start = time.perf_counter()
    state = {"detail": ""}
    ok = False
    try:
        yield state
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        ok = ok and elapsed < limit
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} [{elapsed:.2f}s / {limit:.0f}s] {state['detail']}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert elapsed < limit, f"criterion {number} took {elapsed:.2f}s, limit {limit}s"


def _suite_clean(suite: str, trials: int, expected: dict[str, int]) -> str:
    rows = summarize(run_suite(suite, trials))
    counts = {lid: (n, bad) for lid, n, bad in rows}
    for lid, n in expected.items():
        assert counts[lid] == (n, 0), (lid, counts[lid])
    return ", ".join(f"{lid} {n}/{n}" for lid, (n, _) in counts.items())


def _s1_ratio(k: int, eps: Fraction) -> tuple[Fraction, Fraction]:
    f = cons.build_f_N_eps(2 * k, eps)
    steps = 3 * k + 1
    G = run(f, GreedyParams(1, H, max_steps=steps)).approximant(steps)
    assert G == cons.f_N_eps_greedy_closed_form(2 * k)
    return norm(G) / norm(f), Fraction(k) / (8 * (1 + 3 * k * eps))


def test_criterion_1_divergence_s1():
    with criterion(1, "divergence at s = 1", 10) as c:
        r16, b16 = _s1_ratio(16, Fraction(1, 96))
        assert b16 == Fraction(4, 3) and r16 >= b16
        r64, b64 = _s1_ratio(64, Fraction(1, 384))
        assert b64 == Fraction(16, 3) and r64 >= b64
        c["detail"] = f"ratios {float(r16):.4f} >= 4/3, {float(r64):.4f} >= 16/3"


def test_criterion_2_divergence_st():
    with criterion(2, "divergence at s = t", 10) as c:
        N, eps = 64, Fraction(1, 32)
        g = cons.build_g_N_eps(N, eps, H)
        G = run(g, GreedyParams(H, H, max_steps=2 * N + 1)).approximant(2 * N + 1)
        assert G == cons.g_N_eps_greedy_closed_form(N, H)
        ratio = norm(G) / norm(g)
        bound = N * H / (2 * (1 + H + N * H * eps))
        assert bound == Fraction(32, 5) and ratio >= bound
        c["detail"] = f"ratio {float(ratio):.4f} >= 32/5, closed form matches"


def test_criterion_3_convergence_and_uniform_bound():
    with criterion(3, "termination and uniform bound, 200 runs x 2 variants", 60) as c:
        c["detail"] = _suite_clean("bound", 200, {"BOUND": 400, "TERM": 400})


def test_criterion_4_norm_lemmas():
    with criterion(4, "norm lemmas, 500 per lemma per d in {2, 3}", 60) as c:
        lemmas = ("L3_1", "L3_2", "L3_3a", "L3_3b", "L3_3c", "L3_4", "L3_5")
        verdicts = run_suite("norm-lemmas", 1000)
        for lid in lemmas:
            for dim in (2, 3):
                mine = [v for v in verdicts if v.lemma_id == lid and _dim(v) == dim]
                assert len(mine) == 500 and all(v.holds for v in mine), (lid, dim)
        c["detail"] = "0 failures in 7000 instances"


def _dim(verdict) -> int:
    return verdict.witness["f"]["dim"]


def test_criterion_5_combinatorics():
    with criterion(5, "MGCR, chain union and Λ counts on 1000 cube sets", 30) as c:
        c["detail"] = _suite_clean("mgcr", 1000, {"MGCR": 1000, "Eq4_1": 1000, "L4_6": 1000})


def test_criterion_6_key_lemmas():
    with criterion(6, "key lemmas and pair operator", 60) as c:
        a = _suite_clean("key-lemmas", 100, {"KEY1": 100, "KEY2": 100})
        b = _suite_clean("symmetry", 200, {"L5_1": 200, "L5_2": 200})
        c["detail"] = f"{a}, {b}"


def test_criterion_7_walsh():
    with criterion(7, "Walsh unboundedness", 10) as c:
        N, u, t = 16, Fraction(2, 5), H
        kh = cons.khinchine_l1(N)
        assert kh == Fraction(102960, 32768) == cons.khinchine_l1_enumerate(N)
        coeffs = cons.walsh_coefficients(cons.rademacher_product_values(N, u))
        chosen = cons.forced_weak_greedy_set(coeffs, N + 1, t)
        g_norm = cons.walsh_synthesis_l1({a: coeffs[a] for a in chosen}, N)
        assert g_norm == norm(cons.rademacher_sum(N, u))
        assert g_norm >= u * kh - 1
        values = [cons.khinchine_l1(n) for n in (4, 8, 16, 32, 64)]
        ratios = [float(b / a) for a, b in zip(values, values[1:])]
        assert values == sorted(values) and all(1.38 <= r <= 1.46 for r in ratios)
        c["detail"] = f"norm {float(g_norm):.4f} >= {float(u * kh - 1):.4f}, ratios " + " ".join(f"{r:.4f}" for r in ratios)


def test_criterion_8_branch_invariance():
    with criterion(8, "branch-greedy invariance, 100 trials", 10) as c:
        c["detail"] = _suite_clean("branch", 100, {"BRANCH": 100})


def test_criterion_9_roundtrip():
    with criterion(9, "analysis/synthesis round trip, 100 trials", 10) as c:
        c["detail"] = _suite_clean("roundtrip", 100, {"ROUNDTRIP": 100})
