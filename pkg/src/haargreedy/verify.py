"""Random instance generators and exact checkers for the norm, chain and key lemmas.

Every checker returns a ``LemmaVerdict``.  ``lhs`` and ``rhs`` are the two
sides of the inequality in the orientation of the lemma, and ``holds`` is
the result of comparing them.  The witness is a JSON-ready dict from which
the instance can be rebuilt.

Instances are generated from a string seed ``"{seed}/{suite}/{index}"`` so
every trial is reproducible on its own and trials can run in any order.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable

from .dyadic import (
    DyadicCube,
    GeneralizedChain,
    chain,
    chains_mergeable,
    is_generalized_chain,
    mgcr,
)
from .errors import HypothesisError
from .greedy import GreedyParams, GreedyTrace, check_branch_greedy, run
from .haar import HaarExpansion, Region, analysis, max_coefficient, norm, project_outside, synthesis
from .serialization import expansion_to_dict, rational_to_str
from .symmetry import (
    check_pair_hypotheses,
    check_pipeline_hypotheses,
    copy_branches,
    symmetrize_pair,
)

__all__ = [
    "LEMMA_IDS",
    "SUITES",
    "LemmaVerdict",
    "gen_expansion",
    "gen_cube_set",
    "gen_chain_pair",
    "gen_key_one_instance",
    "gen_key_two_instance",
    "gen_pair_instance",
    "lemma_3_3_constant",
    "check_norm_lemma",
    "check_lambda_inequality",
    "check_chain_union",
    "check_mgcr_structure",
    "check_key_lemma_one",
    "check_key_lemma_two",
    "check_trichotomy",
    "check_pair_statements",
    "check_uniform_bound",
    "check_termination",
    "check_roundtrip",
    "uniform_bound_constant",
    "key_one_constant",
    "key_two_constant",
    "run_suite",
    "summarize",
]

LEMMA_IDS = (
    "L3_1", "L3_2", "L3_3a", "L3_3b", "L3_3c", "L3_4", "L3_5", "MONO",
    "L4_6", "Eq4_1", "MGCR", "KEY1", "L5_1", "L5_2", "KEY2",
    "BOUND", "TERM", "BRANCH", "ROUNDTRIP",
)
NORM_LEMMAS = ("L3_1", "L3_2", "L3_3a", "L3_3b", "L3_3c", "L3_4", "L3_5", "MONO")
DENOMINATORS = (1, 2, 4, 8, 16)


@dataclass(frozen=True)
class LemmaVerdict:
    lemma_id: str
    holds: bool
    lhs: Fraction
    rhs: Fraction
    witness: dict[str, Any] = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "lemma_id": self.lemma_id,
            "holds": self.holds,
            "lhs": rational_to_str(self.lhs),
            "rhs": rational_to_str(self.rhs),
            "witness": self.witness,
        }


# -- constants ------------------------------------------------------------


def lemma_3_3_constant(dim: int) -> Fraction:
    """Constant of the second and third same-level estimates."""
    return Fraction(1, 2) if dim <= 2 else Fraction(1, 4)


def key_one_constant(s: Fraction, t: Fraction) -> Fraction:
    return min(s * (1 - s), s - t) / 24


def key_two_constant(t: Fraction) -> Fraction:
    return 5 / Fraction(t) + 12


def uniform_bound_constant(dim: int, s: Fraction, t: Fraction) -> Fraction:
    """``(5/t + 12)(1 + (2^d - 1) · 24 / min(s(1-s), s-t))``."""
    s, t = Fraction(s), Fraction(t)
    return key_two_constant(t) * (1 + ((1 << dim) - 1) / key_one_constant(s, t))


# -- generators -----------------------------------------------------------


def _rng(seed: Any) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(str(seed))


def _dyadic_value(rng: random.Random, bound: Fraction, low: Fraction = Fraction(0)) -> Fraction:
    """Nonzero value with ``low <= |v| <= bound`` and a power-of-two denominator."""
    den = rng.choice(DENOMINATORS)
    lo = max(1, -(-low.numerator * den // low.denominator))
    hi = int(bound * den)
    if hi < lo:
        den = DENOMINATORS[-1]
        lo = max(1, -(-low.numerator * den // low.denominator))
        hi = int(bound * den)
    if hi < lo:
        raise ValueError(f"no dyadic value in [{low}, {bound}] with denominator up to 16")
    return Fraction(rng.randint(lo, hi), den) * rng.choice((1, -1))


def _random_cube(rng: random.Random, dim: int, level: int) -> DyadicCube:
    return DyadicCube(dim, level, tuple(rng.randrange(1 << level) for _ in range(dim)))


def _random_descendant(rng: random.Random, cube: DyadicCube, depth: int) -> DyadicCube:
    for _ in range(depth):
        cube = cube.child(rng.randint(1, 1 << cube.dim))
    return cube


def gen_expansion(
    seed: Any,
    dim: int,
    max_level: int,
    max_coeffs: int,
    coeff_bound: Fraction | int = 1,
) -> HaarExpansion:
    """Pseudorandom expansion with at most ``max_coeffs`` coefficients on levels ``<= max_level``."""
    if dim < 1 or max_level < 0 or max_coeffs < 0:
        raise ValueError("dim must be positive, max_level and max_coeffs non-negative")
    rng = _rng(seed)
    bound = Fraction(coeff_bound)
    constant = _dyadic_value(rng, bound) if rng.random() < 0.75 else Fraction(0)
    coeffs: dict = {}
    for _ in range(rng.randint(1, max_coeffs) if max_coeffs else 0):
        cube = _random_cube(rng, dim, rng.randint(0, max_level))
        coeffs[(cube, rng.randrange(1, 1 << dim))] = _dyadic_value(rng, bound)
    return HaarExpansion(dim, constant, coeffs)


def _local_expansion(rng: random.Random, top: DyadicCube, depth: int, count: int, bound: Fraction) -> HaarExpansion:
    """Coefficients on ancestors of ``top`` and on descendants down to ``depth`` levels."""
    dim = top.dim
    coeffs: dict = {}
    for _ in range(count):
        if top.level and rng.random() < 0.25:
            cube = top.ancestor(rng.randrange(top.level))
        else:
            cube = _random_descendant(rng, top, rng.randint(0, depth))
        coeffs[(cube, rng.randrange(1, 1 << dim))] = _dyadic_value(rng, bound)
    return HaarExpansion(dim, _dyadic_value(rng, bound), coeffs)


def gen_cube_set(seed: Any, dim: int | None = None, max_level: int = 4, size: int | None = None) -> frozenset[DyadicCube]:
    """Clustered random cube set: new members are often relatives of old ones."""
    rng = _rng(seed)
    dim = dim or rng.choice((1, 2))
    size = size or rng.randint(1, 14)
    members: set[DyadicCube] = {_random_cube(rng, dim, rng.randint(0, max_level))}
    while len(members) < size:
        base = rng.choice(sorted(members, key=lambda c: c.key))
        roll = rng.random()
        if roll < 0.35 and base.level < max_level:
            cube = _random_descendant(rng, base, rng.randint(1, max_level - base.level))
        elif roll < 0.55 and base.level:
            cube = base.ancestor(rng.randrange(base.level))
        elif roll < 0.75 and base.level:
            cube = base.parent().child(rng.randint(1, 1 << dim))
        else:
            cube = _random_cube(rng, dim, rng.randint(0, max_level))
        members.add(cube)
    return frozenset(members)


def _random_generalized_chain(rng: random.Random, top: DyadicCube, max_level: int) -> GeneralizedChain:
    cubes = {top}
    for _ in range(rng.randint(0, 4)):
        if top.level >= max_level:
            break
        leaf = _random_descendant(rng, top, rng.randint(1, max_level - top.level))
        cubes.update(chain(top, leaf))
    return GeneralizedChain.from_cubes(cubes)


def gen_chain_pair(seed: Any, dim: int | None = None, max_level: int = 4) -> tuple[GeneralizedChain, GeneralizedChain]:
    """Two generalized chains whose maximal cubes are often near each other."""
    rng = _rng(seed)
    dim = dim or rng.choice((1, 2))
    top1 = _random_cube(rng, dim, rng.randint(0, max_level))
    r1 = _random_generalized_chain(rng, top1, max_level)
    roll = rng.random()
    if roll < 0.3 and top1.level:
        top2 = top1.parent()
    elif roll < 0.55 and top1.level:
        top2 = top1.parent().child(rng.randint(1, 1 << dim))
    elif roll < 0.8:
        member = rng.choice(sorted(r1.cubes, key=lambda c: c.key))
        top2 = member.child(rng.randint(1, 1 << dim)) if member.level < max_level else member
    else:
        top2 = _random_cube(rng, dim, rng.randint(0, max_level))
    return r1, _random_generalized_chain(rng, top2, max_level)


def gen_key_one_instance(
    seed: Any, dim: int, s: Fraction, t: Fraction, max_level: int = 4
) -> tuple[HaarExpansion, HaarExpansion]:
    """``(p, q)`` built forward so that the first key lemma's hypotheses hold.

    ``p`` gets one coefficient of size at least ``s`` on every cube of its
    cube spectrum.  ``q`` is random except where the hypotheses cap it: on
    shared cubes it stays below ``t/s`` times the largest ``p`` value, at
    fathers below ``s`` times the largest value of the chain.
    """
    rng = _rng(seed)
    s, t = Fraction(s), Fraction(t)
    n = 1 << dim
    cubes = [c for c in gen_cube_set(rng, dim, max_level, rng.randint(1, 10)) if not c.is_root]
    if not cubes:
        cubes = [_random_cube(rng, dim, rng.randint(1, max_level))]
    p: dict = {}
    for cube in cubes:
        p[(cube, rng.randrange(1, n))] = _dyadic_value(rng, Fraction(2), s)
        for j in range(1, n):
            if (cube, j) not in p and rng.random() < 0.3:
                p[(cube, j)] = _dyadic_value(rng, Fraction(2))
    P = HaarExpansion(dim, 0, p)

    by_cube = P.by_cube()
    chain_max = {}
    for r in mgcr(P.cube_spectrum()).mgcr:
        top = max(abs(v) for c in r.cubes for v in by_cube[c].values())
        chain_max[r.father] = min(chain_max.get(r.father, top), top)

    q: dict = {}
    targets = list(cubes) + list(chain_max) + [_random_cube(rng, dim, rng.randint(0, max_level)) for _ in range(4)]
    for cube in targets:
        for j in range(1, n):
            if (cube, j) in p or rng.random() < 0.5:
                continue
            cap = Fraction(2)
            if cube in by_cube:
                cap = min(cap, t / s * max(abs(v) for v in by_cube[cube].values()))
            if cube in chain_max:
                cap = min(cap, s * chain_max[cube])
            value = _dyadic_value(rng, cap)
            if abs(value) == cap:
                value = value * Fraction(15, 16)
            q[(cube, j)] = value
    return P, HaarExpansion(dim, _dyadic_value(rng, Fraction(2)), q)


def gen_key_two_instance(seed: Any, dim: int, t: Fraction, max_level: int = 4) -> tuple[HaarExpansion, HaarExpansion]:
    """``(f, g)`` satisfying the second key lemma's hypotheses, with ``f`` constant-free."""
    rng = _rng(seed)
    t = Fraction(t)
    n = 1 << dim
    cubes = [c for c in gen_cube_set(rng, dim, max_level, rng.randint(1, 10)) if not c.is_root]
    if not cubes:
        cubes = [_random_cube(rng, dim, rng.randint(1, max_level))]
    f: dict = {}
    for cube in cubes:
        for j in range(1, n):
            if rng.random() < 0.5:
                f[(cube, j)] = _dyadic_value(rng, Fraction(3))
        f.setdefault((cube, rng.randrange(1, n)), _dyadic_value(rng, Fraction(3)))
    F = HaarExpansion(dim, 0, f)
    for r in mgcr(F.cube_spectrum()).mgcr:
        if not any(abs(v) >= t for c in r.cubes for v in F.cube_coeffs(c).values()):
            cube = min(r.cubes, key=lambda c: c.key)
            j = min(F.cube_coeffs(cube))
            f[(cube, j)] = _dyadic_value(rng, Fraction(3), t)
    F = HaarExpansion(dim, 0, f)

    banned = set(F.cube_spectrum()) | set(mgcr(F.cube_spectrum()).fathers) | {DyadicCube.root(dim)}
    g: dict = {}
    pool = []
    for cube in cubes:
        pool.extend(cube.children() if cube.level < max_level + 1 else [])
        if cube.level:
            pool.append(cube.parent())
    pool.extend(_random_cube(rng, dim, rng.randint(1, max_level)) for _ in range(4))
    for cube in pool:
        if cube in banned or rng.random() < 0.4:
            continue
        g[(cube, rng.randrange(1, n))] = _dyadic_value(rng, Fraction(1))
    return F, HaarExpansion(dim, _dyadic_value(rng, Fraction(1)), g)


def gen_pair_instance(seed: Any, dim: int, max_level: int = 4) -> tuple[HaarExpansion, HaarExpansion, DyadicCube]:
    """``(f, g, Δ)`` for the pair operator: disjoint spectra, nothing at ``Δ``, no constants."""
    rng = _rng(seed)
    delta = _random_cube(rng, dim, rng.randint(0, 2))
    n = 1 << dim
    f: dict = {}
    g: dict = {}
    while not f and not g:
        for _ in range(rng.randint(1, 10)):
            if delta.level and rng.random() < 0.2:
                cube = delta.ancestor(rng.randrange(delta.level))
            elif rng.random() < 0.15:
                cube = _random_cube(rng, dim, rng.randint(1, max_level))
            else:
                cube = _random_descendant(rng, delta, rng.randint(1, max(1, max_level - delta.level)))
            if cube == delta:
                continue
            key = (cube, rng.randrange(1, n))
            if key in f or key in g:
                continue
            (f if rng.random() < 0.5 else g)[key] = _dyadic_value(rng, Fraction(2))
    return HaarExpansion(dim, 0, f), HaarExpansion(dim, 0, g), delta


# -- norm lemmas ----------------------------------------------------------


def _abs_c(f: HaarExpansion, cube: DyadicCube, j: int) -> Fraction:
    return abs(f.get(cube, j))


def _proj_norm(f: HaarExpansion, cube: DyadicCube) -> Fraction:
    return norm(project_outside(f, cube), cube)


def _witness(f: HaarExpansion, **extra: Any) -> dict[str, Any]:
    out: dict[str, Any] = {"f": expansion_to_dict(f)}
    for key, value in extra.items():
        out[key] = str(value) if isinstance(value, DyadicCube) else value
    return out


def check_norm_lemma(
    lemma_id: str,
    f: HaarExpansion,
    cubes: tuple[DyadicCube, ...],
    indices: tuple[int, ...] = (1, 1),
) -> LemmaVerdict:
    """Evaluate one of the coefficient/norm estimates exactly.

    ``cubes`` is ``(I, J)`` for L3_1, L3_3* and MONO, ``(I,)`` for L3_2 and
    ``(I, J, K)`` for L3_4 and L3_5.  MONO checks ``‖P_I f‖ >= ‖P_J f‖``
    for ``I ⊂ J``.
    """
    dim = f.dim
    i, j = (tuple(indices) + (1, 1))[:2]
    for idx in (i, j):
        if not 1 <= idx < 1 << dim:
            raise ValueError(f"Haar index {idx} out of range for d={dim}")

    if lemma_id == "L3_1":
        I, J = cubes
        if not I.contains(J):
            raise ValueError("L3_1 needs J ⊆ I")
        lhs, rhs = norm(f, I), _abs_c(f, J, i)
        holds = lhs >= rhs
    elif lemma_id == "L3_2":
        (I,) = cubes
        if abs(f.constant) > 1 or any(abs(v) > 1 for v in f.coeffs.values()):
            raise ValueError("L3_2 needs every coefficient bounded by 1")
        lhs, rhs = _proj_norm(f, I), Fraction(1)
        holds = lhs <= rhs
    elif lemma_id in ("L3_3a", "L3_3b", "L3_3c"):
        I, J = cubes
        if J.parent() != I:
            raise ValueError("L3_3 needs J to be an immediate successor of I")
        lhs = norm(f, Region.difference(I, J))
        kappa = lemma_3_3_constant(dim)
        if lemma_id == "L3_3a":
            rhs = abs(_proj_norm(f, I) - _proj_norm(f, J))
        elif lemma_id == "L3_3b":
            rhs = kappa * abs(_abs_c(f, I, i) - _abs_c(f, I, j))
        else:
            rhs = kappa * abs(_proj_norm(f, I) - _abs_c(f, I, j))
        holds = lhs >= rhs
    elif lemma_id in ("L3_4", "L3_5"):
        I, J, K = cubes
        if lemma_id == "L3_4":
            if J.parent() != I or K.parent() != J:
                raise ValueError("L3_4 needs K ⊂ J ⊂ I consecutive")
            divisor = 8
        else:
            if not (I.contains(J) and J.strictly_contains(K)):
                raise ValueError("L3_5 needs K ⊊ J ⊆ I")
            divisor = 16
        lhs = norm(f, Region.difference(I, K))
        rhs = abs(_abs_c(f, I, i) - _abs_c(f, J, j)) / divisor
        holds = lhs >= rhs
    elif lemma_id == "MONO":
        I, J = cubes
        if not J.strictly_contains(I):
            raise ValueError("MONO needs I ⊊ J")
        lhs, rhs = norm(project_outside(f, I)), norm(project_outside(f, J))
        holds = lhs >= rhs
    else:
        raise ValueError(f"unknown norm lemma {lemma_id!r}")
    names = "IJK"
    extra = {names[n]: c for n, c in enumerate(cubes)}
    return LemmaVerdict(lemma_id, holds, lhs, rhs, _witness(f, i=i, j=j, **extra))


def _plant(rng: random.Random, f: HaarExpansion, pairs: list) -> HaarExpansion:
    """Force coefficients at the compared pairs most of the time."""
    updates = {pair: _dyadic_value(rng, Fraction(2)) for pair in pairs if rng.random() < 0.8}
    return f.with_coeffs(updates)


def _norm_lemma_trial(lemma_id: str, rng: random.Random, dim: int) -> LemmaVerdict:
    n = 1 << dim
    i, j = rng.randrange(1, n), rng.randrange(1, n)
    if lemma_id == "L3_2":
        I = _random_cube(rng, dim, rng.randint(0, 4))
        f = _local_expansion(rng, I, 2, rng.randint(1, 12), Fraction(1))
        return check_norm_lemma(lemma_id, f, (I,), (i, j))
    if lemma_id == "L3_1":
        I = _random_cube(rng, dim, rng.randint(0, 3))
        J = _random_descendant(rng, I, rng.randint(0, 2))
        f = _local_expansion(rng, I, 3, rng.randint(1, 12), Fraction(2))
        if rng.random() < 0.7:
            f = f.with_coeffs({(J, i): _dyadic_value(rng, Fraction(2))})
        return check_norm_lemma(lemma_id, f, (I, J), (i, j))
    if lemma_id.startswith("L3_3"):
        I = _random_cube(rng, dim, rng.randint(0, 3))
        J = I.child(rng.randint(1, n))
        f = _local_expansion(rng, I, 2, rng.randint(1, 12), Fraction(2))
        f = _plant(rng, f, [(I, i), (I, j)])
        return check_norm_lemma(lemma_id, f, (I, J), (i, j))
    if lemma_id == "L3_4":
        I = _random_cube(rng, dim, rng.randint(0, 2))
        J = I.child(rng.randint(1, n))
        K = J.child(rng.randint(1, n))
        f = _local_expansion(rng, I, 3, rng.randint(1, 12), Fraction(2))
        f = _plant(rng, f, [(I, i), (J, j)])
        return check_norm_lemma(lemma_id, f, (I, J, K), (i, j))
    if lemma_id == "L3_5":
        I = _random_cube(rng, dim, rng.randint(0, 2))
        J = _random_descendant(rng, I, rng.randint(0, 2))
        K = _random_descendant(rng, J, rng.randint(1, 2))
        f = _local_expansion(rng, I, 4, rng.randint(1, 12), Fraction(2))
        f = _plant(rng, f, [(I, i), (J, j)])
        return check_norm_lemma(lemma_id, f, (I, J, K), (i, j))
    if lemma_id == "MONO":
        J = _random_cube(rng, dim, rng.randint(0, 2))
        I = _random_descendant(rng, J, rng.randint(1, 2))
        f = _local_expansion(rng, J, 3, rng.randint(1, 12), Fraction(2))
        return check_norm_lemma(lemma_id, f, (I, J), (i, j))
    raise ValueError(f"unknown norm lemma {lemma_id!r}")


# -- cube-set combinatorics -----------------------------------------------


def _cubes_witness(cubes: Iterable[DyadicCube]) -> list[str]:
    return sorted(str(c) for c in cubes)


def check_lambda_inequality(cubes: Iterable[DyadicCube]) -> LemmaVerdict:
    """``|Λ2| < |Λ0|`` for a nonempty cube set."""
    cubes = frozenset(cubes)
    result = mgcr(cubes)
    lhs, rhs = Fraction(len(result.lambda2)), Fraction(len(result.lambda0))
    return LemmaVerdict("Eq4_1", lhs < rhs, lhs, rhs, {"cubes": _cubes_witness(cubes)})


def check_chain_union(first: GeneralizedChain, second: GeneralizedChain) -> LemmaVerdict:
    """Union is a chain exactly when the merge criterion holds; its father is one of the two.

    ``lhs`` is 1 when the union is a generalized chain, ``rhs`` is 1 when the
    criterion fires.
    """
    union = first.cubes | second.cubes
    top = is_generalized_chain(union)
    lhs = Fraction(int(top is not None))
    rhs = Fraction(int(chains_mergeable(first, second)))
    holds = lhs == rhs
    if holds and top is not None:
        holds = top.parent() in (first.father, second.father)
    witness = {"first": _cubes_witness(first.cubes), "second": _cubes_witness(second.cubes)}
    return LemmaVerdict("L4_6", holds, lhs, rhs, witness)


def check_mgcr_structure(cubes: Iterable[DyadicCube], rng: random.Random | None = None) -> LemmaVerdict:
    """Partition, chain, non-mergeability and permutation-invariance of the MGCR.

    ``lhs`` counts violated properties; it holds when ``lhs == rhs == 0``.
    """
    cubes = list(cubes)
    result = mgcr(cubes)
    chains = result.mgcr
    failures = 0
    seen: set[DyadicCube] = set()
    for r in chains:
        if not seen.isdisjoint(r.cubes):
            failures += 1
        seen |= r.cubes
        if is_generalized_chain(r.cubes) != r.maximal_cube or r.father != r.maximal_cube.parent():
            failures += 1
    if seen != set(cubes):
        failures += 1
    for a in range(len(chains)):
        for b in range(a + 1, len(chains)):
            if chains_mergeable(chains[a], chains[b]):
                failures += 1
    shuffled = list(cubes)
    (rng or random.Random(0)).shuffle(shuffled)
    if {r.cubes for r in mgcr(shuffled).mgcr} != {r.cubes for r in chains}:
        failures += 1
    return LemmaVerdict("MGCR", failures == 0, Fraction(failures), Fraction(0), {"cubes": _cubes_witness(cubes)})


# -- key lemmas -----------------------------------------------------------


def _check_key_one_hypotheses(p: HaarExpansion, q: HaarExpansion, s: Fraction, t: Fraction):
    if not 0 < t < s < 1:
        raise HypothesisError("0", "need 0 < t < s < 1")
    sp = p.cube_spectrum()
    if not sp:
        raise HypothesisError("0", "p has empty spectrum")
    if DyadicCube.root(p.dim) in sp:
        raise HypothesisError("0", "the root cube lies in the cube spectrum of p")
    if not p.spectrum().isdisjoint(q.spectrum()):
        raise HypothesisError("1", "p and q share a spectrum pair")
    p_cubes, q_cubes = p.by_cube(), q.by_cube()
    for cube, local in p_cubes.items():
        if not any(abs(v) >= s for v in local.values()):
            raise HypothesisError("2", f"no coefficient of p at {cube} reaches s")
    for cube in sp & q.cube_spectrum():
        top = max(abs(v) for v in p_cubes[cube].values())
        if not all(abs(v) < t / s * top for v in q_cubes[cube].values()):
            raise HypothesisError("3", f"q is too large at the shared cube {cube}")
    analysis_ = mgcr(sp)
    for r in analysis_.mgcr:
        top = max(abs(v) for c in r.cubes for v in p_cubes[c].values())
        if not all(abs(v) < s * top for v in q_cubes.get(r.father, {}).values()):
            raise HypothesisError("4", f"q is too large at the father {r.father}")
    return analysis_


def check_key_lemma_one(p: HaarExpansion, q: HaarExpansion, s, t) -> LemmaVerdict:
    """``‖p + q‖ > min(s(1-s), s-t)/24 · |M|``; raises ``HypothesisError`` on bad input."""
    s, t = Fraction(s), Fraction(t)
    analysis_ = _check_key_one_hypotheses(p, q, s, t)
    M = set(analysis_.fathers) | (p.cube_spectrum() & q.cube_spectrum())
    lhs = norm(p + q)
    rhs = key_one_constant(s, t) * len(M)
    witness = {"p": expansion_to_dict(p), "q": expansion_to_dict(q), "s": rational_to_str(s), "t": rational_to_str(t)}
    return LemmaVerdict("KEY1", lhs > rhs, lhs, rhs, witness)


def check_key_lemma_two(f: HaarExpansion, g: HaarExpansion, t) -> LemmaVerdict:
    """``‖f‖ <= (5/t + 12) ‖f + g‖``; ``f`` must carry no constant term."""
    t = Fraction(t)
    if f.constant:
        raise HypothesisError("2", "f carries a constant term")
    check_pipeline_hypotheses(f, g, t)
    lhs = norm(f)
    rhs = key_two_constant(t) * norm(f + g)
    witness = {"f": expansion_to_dict(f), "g": expansion_to_dict(g), "t": rational_to_str(t)}
    return LemmaVerdict("KEY2", lhs <= rhs, lhs, rhs, witness)


# -- pair operator --------------------------------------------------------


def _pair_witness(f: HaarExpansion, g: HaarExpansion, delta: DyadicCube) -> dict[str, Any]:
    return {"f": expansion_to_dict(f), "g": expansion_to_dict(g), "delta": str(delta)}


def check_trichotomy(f: HaarExpansion, g: HaarExpansion, delta: DyadicCube) -> LemmaVerdict:
    """Some copy is strictly better than ``B``, or all copies are exactly at ``B``.

    ``lhs`` is the number of strict successors, ``rhs`` is 1 if all are equal.
    """
    br = copy_branches(f, g, delta)
    lhs, rhs = Fraction(len(br.strict)), Fraction(int(br.all_equal))
    return LemmaVerdict("L5_1", br.trichotomy_holds, lhs, rhs, _pair_witness(f, g, delta))


def _outside_copy_region(cube: DyadicCube, delta: DyadicCube, source: DyadicCube) -> bool:
    """``cube ⊆ Δ ∖ Δ_i``."""
    return delta.strictly_contains(cube) and not source.contains(cube)


def check_pair_statements(f: HaarExpansion, g: HaarExpansion, delta: DyadicCube) -> LemmaVerdict:
    """Apply the pair operator and check statements 1-6 of its lemma.

    ``lhs``/``rhs`` are the cross-multiplied ratio sides
    ``‖f'‖ ‖f+g‖`` and ``‖f‖ ‖f'+g'‖``.  ``witness["failed"]`` lists the
    statements that did not hold.
    """
    check_pair_hypotheses(f, g, delta)
    fp, gp, i = symmetrize_pair(f, g, delta)
    source = delta.child(i)
    failed = []
    if delta in fp.cube_spectrum() or delta in gp.cube_spectrum():
        failed.append(1)
    keys = set(f.spectrum()) | set(g.spectrum()) | set(fp.spectrum()) | set(gp.spectrum())
    for cube, j in keys:
        if _outside_copy_region(cube, delta, source):
            continue
        if fp.get(cube, j) != f.get(cube, j) or gp.get(cube, j) != g.get(cube, j):
            failed.append(2)
            break
    if fp.constant != f.constant or gp.constant != g.constant:
        failed.append(2)
    for cube, j in keys:
        if not _outside_copy_region(cube, delta, source):
            continue
        origin = cube.translate(cube.ancestor(delta.level + 1), source)
        if fp.get(cube, j) != f.get(origin, j) or gp.get(cube, j) != g.get(origin, j):
            failed.append(3)
            break
    if not fp.spectrum().isdisjoint(gp.spectrum()):
        failed.append(4)
    if not (fp + gp).spectrum():
        failed.append(5)
    lhs = norm(fp) * norm(f + g)
    rhs = norm(f) * norm(fp + gp)
    if lhs < rhs:
        failed.append(6)
    witness = _pair_witness(f, g, delta)
    witness["i"] = i
    witness["failed"] = sorted(set(failed))
    return LemmaVerdict("L5_2", not failed, lhs, rhs, witness)


# -- greedy-level checks --------------------------------------------------


def check_uniform_bound(trace: GreedyTrace) -> LemmaVerdict:
    """``max_m ‖G_m‖ <= C(d, s, t) ‖f‖`` for a trace with ``0 < t < s < 1``."""
    params = trace.params
    if params.boundary:
        raise ValueError(
            f"s={params.s}, t={params.t} is a boundary case; the uniform bound needs 0 < t < s < 1"
        )
    lhs = trace.max_approximant_norm()
    rhs = uniform_bound_constant(trace.initial.dim, params.s, params.t) * trace.initial_norm
    witness = {
        "f": expansion_to_dict(trace.initial),
        "s": rational_to_str(params.s),
        "t": rational_to_str(params.t),
        "variant": params.variant,
    }
    return LemmaVerdict("BOUND", lhs <= rhs, lhs, rhs, witness)


def check_termination(trace: GreedyTrace) -> LemmaVerdict:
    """Zero residual after exactly ``|spectrum| (+1 for a constant)`` steps."""
    f = trace.initial
    expected = len(f) + (1 if trace.params.include_constant and f.constant else 0)
    lhs, rhs = Fraction(len(trace.steps)), Fraction(expected)
    final = trace.final
    ok = lhs == rhs and trace.terminated and final is not None and final.residual.is_zero()
    ok = ok and final.approximant == f
    return LemmaVerdict("TERM", ok, lhs, rhs, {"f": expansion_to_dict(f), "variant": trace.params.variant})


def check_roundtrip(values: list[Fraction], dim: int, level: int) -> LemmaVerdict:
    """``synthesis ∘ analysis`` is the identity on the grid and back."""
    f = analysis(values, dim, level)
    back = synthesis(f, level)
    mismatches = sum(a != b for a, b in zip(back, values))
    if analysis(back, dim, level) != f:
        mismatches += 1
    return LemmaVerdict(
        "ROUNDTRIP",
        mismatches == 0,
        Fraction(mismatches),
        Fraction(0),
        {"dim": dim, "level": level, "values": [rational_to_str(v) for v in values]},
    )


def _branch_trial(rng: random.Random) -> LemmaVerdict:
    dim = rng.choice((1, 2, 3))
    s = Fraction(rng.choice((1, 3, 7)), 8) + Fraction(1, 8)
    t = s * Fraction(rng.randint(1, 4), 4)
    params = GreedyParams(s, t, rng.choice("AB"))
    f = gen_expansion(rng, dim, 4, 20, Fraction(4))
    while f.is_zero():
        f = gen_expansion(rng, dim, 4, 20, Fraction(4))
    _, top = max_coefficient(f, True)
    cap = t * abs(top)
    root = DyadicCube.root(dim)
    small = [pair for pair, v in f.coeffs.items() if abs(v) < cap]
    if abs(f.constant) < cap:
        small.append((root, 0))
    for _ in range(3):
        small.append((_random_cube(rng, dim, rng.randint(0, 4)), rng.randrange(1, 1 << dim)))
    perturbation = {}
    for pair in small:
        if pair[1] and abs(f.get(*pair)) >= cap:
            continue
        if rng.random() < 0.6:
            value = Fraction(rng.randint(-15, 15), 16) * cap
            perturbation[pair] = value
    same = check_branch_greedy(f, params, perturbation)
    witness = {
        "f": expansion_to_dict(f),
        "s": rational_to_str(s),
        "t": rational_to_str(t),
        "variant": params.variant,
        "perturbation": [
            {"cube": str(c), "j": j, "value": rational_to_str(v)}
            for (c, j), v in sorted(perturbation.items(), key=lambda kv: (kv[0][0].key, kv[0][1]))
        ],
    }
    return LemmaVerdict("BRANCH", same, Fraction(int(same)), Fraction(1), witness)


# -- suites ---------------------------------------------------------------


def _trial_norm(rng: random.Random, index: int) -> list[LemmaVerdict]:
    dim = 2 if index % 2 == 0 else 3
    return [_norm_lemma_trial(lemma, rng, dim) for lemma in NORM_LEMMAS]


def _trial_mgcr(rng: random.Random, index: int) -> list[LemmaVerdict]:
    cubes = gen_cube_set(rng)
    first, second = gen_chain_pair(rng)
    return [check_mgcr_structure(cubes, rng), check_lambda_inequality(cubes), check_chain_union(first, second)]


def _trial_key(rng: random.Random, index: int) -> list[LemmaVerdict]:
    dim = 1 + index % 3
    p, q = gen_key_one_instance(rng, dim, Fraction(3, 4), Fraction(1, 2))
    f, g = gen_key_two_instance(rng, dim, Fraction(1, 2))
    return [check_key_lemma_one(p, q, Fraction(3, 4), Fraction(1, 2)), check_key_lemma_two(f, g, Fraction(1, 2))]


def _trial_symmetry(rng: random.Random, index: int) -> list[LemmaVerdict]:
    f, g, delta = gen_pair_instance(rng, 2 if index % 2 == 0 else 1 + index % 3)
    return [check_trichotomy(f, g, delta), check_pair_statements(f, g, delta)]


def _trial_bound(rng: random.Random, index: int) -> list[LemmaVerdict]:
    dim = 1 + index % 3
    f = gen_expansion(rng, dim, 5, 40, Fraction(4))
    out = []
    for variant in ("A", "B"):
        trace = run(f, GreedyParams(Fraction(3, 4), Fraction(1, 2), variant))
        out.extend([check_uniform_bound(trace), check_termination(trace)])
    return out


def _trial_branch(rng: random.Random, index: int) -> list[LemmaVerdict]:
    return [_branch_trial(rng)]


def _trial_roundtrip(rng: random.Random, index: int) -> list[LemmaVerdict]:
    dim = 1 + index % 3
    values = [Fraction(rng.randint(-64, 64), rng.choice(DENOMINATORS)) for _ in range(1 << (3 * dim))]
    return [check_roundtrip(values, dim, 3)]


SUITES: dict[str, Callable[[random.Random, int], list[LemmaVerdict]]] = {
    "norm-lemmas": _trial_norm,
    "mgcr": _trial_mgcr,
    "key-lemmas": _trial_key,
    "symmetry": _trial_symmetry,
    "bound": _trial_bound,
    "branch": _trial_branch,
    "roundtrip": _trial_roundtrip,
}


def _run_trial(args: tuple[str, Any, int]) -> list[LemmaVerdict]:
    suite, seed, index = args
    return SUITES[suite](random.Random(f"{seed}/{suite}/{index}"), index)


def run_suite(suite: str, trials: int, seed: Any = 0, jobs: int = 1) -> list[LemmaVerdict]:
    """Run ``trials`` trials of a suite (or ``"all"``); order follows suite and trial index."""
    names = list(SUITES) if suite == "all" else [suite]
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(['all', *SUITES])}")
    tasks = [(name, seed, index) for name in names for index in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_trial, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_run_trial(task) for task in tasks]
    return [v for batch in results for v in batch]


def summarize(verdicts: Iterable[LemmaVerdict]) -> list[tuple[str, int, int]]:
    """``(lemma_id, trials, failures)`` rows in ``LEMMA_IDS`` order."""
    counts: dict[str, list[int]] = {}
    for v in verdicts:
        row = counts.setdefault(v.lemma_id, [0, 0])
        row[0] += 1
        row[1] += not v.holds
    return [(lid, *counts[lid]) for lid in LEMMA_IDS if lid in counts]
