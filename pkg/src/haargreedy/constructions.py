"""Explicit test functions for the boundary and Walsh experiments.

The planar constructions live on the nested corner squares
``Δ_n = [0, 2^-n)^2``.  The one-dimensional Rademacher objects use the
d=1 Haar expansion, where ``r_n`` is a sum of level ``n-1`` Haar functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm
from typing import Mapping, Union

from .dyadic import DyadicCube
from .haar import HaarExpansion, to_rational

__all__ = [
    "NestedCornerChain",
    "corner_cube",
    "build_f_N",
    "build_f_N_eps",
    "build_g_N_eps",
    "f_N_eps_greedy_closed_form",
    "g_N_eps_greedy_closed_form",
    "rademacher",
    "rademacher_sum",
    "build_rademacher_product",
    "rademacher_product_values",
    "walsh_coefficients",
    "forced_weak_greedy_set",
    "walsh_synthesis_l1",
    "khinchine_l1",
    "khinchine_l1_enumerate",
]

Number = Union[int, Fraction, str]


def corner_cube(n: int) -> DyadicCube:
    """``Δ_n = [0, 2^-n) × [0, 2^-n)``."""
    return DyadicCube(2, n, (0, 0))


@dataclass(frozen=True)
class NestedCornerChain:
    N: int

    def __post_init__(self) -> None:
        if self.N < 0:
            raise ValueError("depth must be non-negative")

    @property
    def cubes(self) -> list[DyadicCube]:
        return [corner_cube(n) for n in range(self.N + 1)]


def _open_unit(value: Fraction, name: str) -> Fraction:
    if not 0 < value < 1:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")
    return value


def build_f_N(N: int) -> HaarExpansion:
    """``1 + Σ_{n<N} Σ_j h_{Δ_n}^(j)``; equals ``4^N`` on ``Δ_N`` and 0 elsewhere."""
    if N < 1:
        raise ValueError("N must be at least 1")
    coeffs = {(corner_cube(n), j): 1 for n in range(N) for j in (1, 2, 3)}
    return HaarExpansion(2, 1, coeffs)


def build_f_N_eps(N: int, eps: Number) -> HaarExpansion:
    """Odd corner squares carry 1, even ones ``1 - eps``; ``N = 2k``."""
    eps = _open_unit(to_rational(eps), "eps")
    if N < 2 or N % 2:
        raise ValueError(f"N must be a positive even integer, got {N}")
    coeffs = {}
    for n in range(N // 2):
        for j in (1, 2, 3):
            coeffs[(corner_cube(2 * n + 1), j)] = Fraction(1)
            coeffs[(corner_cube(2 * n), j)] = 1 - eps
    return HaarExpansion(2, 1, coeffs)


def f_N_eps_greedy_closed_form(N: int) -> HaarExpansion:
    """``1 + Σ_n Σ_j h_{Δ_{2n+1}}^(j)``: the approximant after ``3k+1`` steps with ``s = 1``."""
    coeffs = {(corner_cube(2 * n + 1), j): 1 for n in range(N // 2) for j in (1, 2, 3)}
    return HaarExpansion(2, 1, coeffs)


def build_g_N_eps(N: int, eps: Number, t: Number) -> HaarExpansion:
    """``t(1 + Σ (h^(1) + h^(2) + (1-eps) h^(3))) + h_{Δ_N}^(1)``."""
    eps = _open_unit(to_rational(eps), "eps")
    t = _open_unit(to_rational(t), "t")
    if N < 1:
        raise ValueError("N must be at least 1")
    coeffs: dict[tuple[DyadicCube, int], Fraction] = {}
    for n in range(N):
        cube = corner_cube(n)
        coeffs[(cube, 1)] = t
        coeffs[(cube, 2)] = t
        coeffs[(cube, 3)] = t * (1 - eps)
    coeffs[(corner_cube(N), 1)] = Fraction(1)
    return HaarExpansion(2, t, coeffs)


def g_N_eps_greedy_closed_form(N: int, t: Number) -> HaarExpansion:
    """``t(1 + Σ (h^(1) + h^(2)))``: the approximant after ``2N+1`` steps with ``s = t``."""
    t = to_rational(t)
    coeffs = {(corner_cube(n), j): t for n in range(N) for j in (1, 2)}
    return HaarExpansion(2, t, coeffs)


# -- one-dimensional Rademacher / Walsh objects --------------------------


def rademacher(n: int) -> HaarExpansion:
    """``r_n`` (``n >= 1``): +1 on the left half of every level ``n-1`` interval."""
    if n < 1:
        raise ValueError("Rademacher index starts at 1")
    weight = Fraction(1, 1 << (n - 1))
    return HaarExpansion(1, 0, {(DyadicCube(1, n - 1, (k,)), 1): weight for k in range(1 << (n - 1))})


def rademacher_sum(N: int, u: Number) -> HaarExpansion:
    """``1 + u Σ_{n<=N} r_n``."""
    u = to_rational(u)
    coeffs: dict[tuple[DyadicCube, int], Fraction] = {}
    for n in range(1, N + 1):
        for key, value in rademacher(n).coeffs.items():
            coeffs[key] = u * value
    return HaarExpansion(1, 1, coeffs)


def rademacher_product_values(N: int, u: Number) -> list[Fraction]:
    """Values of ``∏ (1 + u r_n)`` on the ``2^N`` level-N intervals, left to right."""
    u = to_rational(u)
    plus, minus = 1 + u, 1 - u
    return [plus ** (N - bin(x).count("1")) * minus ** bin(x).count("1") for x in range(1 << N)]


def build_rademacher_product(N: int, u: Number) -> HaarExpansion:
    """``∏_{n<=N} (1 + u r_n)`` as a d=1 Haar expansion.

    On a level-``m`` interval with binary digits ``b_1..b_m`` the coefficient
    is ``2^-m · u · ∏ (1 + u (-1)^{b_i})``; the constant is 1.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    u = to_rational(u)
    coeffs: dict[tuple[DyadicCube, int], Fraction] = {}
    prefix = {0: Fraction(1)}
    for m in range(N):
        scale = u / (1 << m)
        for k, p in prefix.items():
            coeffs[(DyadicCube(1, m, (k,)), 1)] = scale * p
        prefix = {2 * k + b: p * (1 + u if b == 0 else 1 - u) for k, p in prefix.items() for b in (0, 1)}
    return HaarExpansion(1, 1, coeffs)


def _fwht(values: list[int]) -> list[int]:
    out = list(values)
    h = 1
    while h < len(out):
        for start in range(0, len(out), 2 * h):
            for i in range(start, start + h):
                a, b = out[i], out[i + h]
                out[i], out[i + h] = a + b, a - b
        h *= 2
    return out


def walsh_coefficients(values: list[Fraction]) -> dict[frozenset[int], Fraction]:
    """Walsh coefficients ``∫ f w_A`` of a function given on the level-N grid.

    ``A`` is a subset of ``{1..N}``; ``w_A = ∏_{n∈A} r_n``.
    """
    size = len(values)
    N = size.bit_length() - 1
    if size != 1 << N:
        raise ValueError("grid length must be a power of two")
    denom = lcm(*(v.denominator for v in values))
    scaled = [int(v * denom) for v in values]
    transformed = _fwht(scaled)
    out: dict[frozenset[int], Fraction] = {}
    for mask, total in enumerate(transformed):
        # bit (N - n) of the grid index is the n-th binary digit
        subset = frozenset(n for n in range(1, N + 1) if mask >> (N - n) & 1)
        out[subset] = Fraction(total, denom * size)
    return out


def forced_weak_greedy_set(
    coeffs: Mapping[frozenset[int], Fraction], n: int, t: Number
) -> frozenset[frozenset[int]]:
    """The only ``n``-term index set admissible for weak thresholding with weakness ``t``.

    A set is admissible when its smallest ``|c|`` is at least ``t`` times the
    largest ``|c|`` left out.  Raises if more than one set is admissible.
    """
    t = to_rational(t)
    ranked = sorted(coeffs.items(), key=lambda kv: -abs(kv[1]))
    if not 0 < n < len(ranked):
        raise ValueError("n must be between 1 and the number of coefficients - 1")
    nth, nxt = abs(ranked[n - 1][1]), abs(ranked[n][1])
    if not nxt < t * nth:
        raise ValueError("the weak greedy choice is not unique for this n and t")
    return frozenset(a for a, _ in ranked[:n])


def walsh_synthesis_l1(coeffs: Mapping[frozenset[int], Fraction], N: int) -> Fraction:
    """L1 norm of ``Σ c_A w_A`` computed on the level-N grid."""
    denom = lcm(*(v.denominator for v in coeffs.values()))
    size = 1 << N
    spectrum = [0] * size
    for subset, value in coeffs.items():
        mask = sum(1 << (N - n) for n in subset)
        spectrum[mask] += int(value * denom)
    values = _fwht(spectrum)
    return Fraction(sum(abs(v) for v in values), denom * size)


def khinchine_l1(N: int) -> Fraction:
    """``‖Σ_{n<=N} r_n‖_1 = 2^-N Σ_j C(N,j) |N - 2j|``."""
    if N < 0:
        raise ValueError("N must be non-negative")
    return Fraction(sum(comb(N, j) * abs(N - 2 * j) for j in range(N + 1)), 1 << N)


def khinchine_l1_enumerate(N: int) -> Fraction:
    """Same quantity by brute force over all ``2^N`` sign patterns."""
    return Fraction(sum(abs(N - 2 * bin(x).count("1")) for x in range(1 << N)), 1 << N)
