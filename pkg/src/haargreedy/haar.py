"""Multivariate Haar system on [0,1)^d with exact rational arithmetic.

Haar functions are L1-normalized: ``h_I^(j)`` takes the values ``±1/μ(I)``
on ``I`` and the coefficient functional is ``c_I^(j)(f) = μ(I) ∫_I f h_I^(j)``,
so ``c_I^(j)(h_I^(j)) = 1``.  The binary digits of ``j`` (most significant
first) pick which axes carry a sign change.

Functions are finitely supported expansions; grids only appear as an I/O
and cross-checking format.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

from .dyadic import DyadicCube, immediate_successors

__all__ = [
    "Rational",
    "to_rational",
    "HaarExpansion",
    "Region",
    "haar_sign",
    "haar_value",
    "haar_function",
    "indicator",
    "coefficient",
    "coefficient_from_integral",
    "evaluate",
    "integral",
    "analysis",
    "synthesis",
    "norm",
    "project_outside",
    "max_coefficient",
]

Rational = Fraction
Pair = tuple[DyadicCube, int]


def to_rational(value: Union[int, str, Fraction]) -> Fraction:
    """Exact conversion; floats are rejected to keep the core exact."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a Fraction, int or 'p/q' string")
    return Fraction(value)


def haar_sign(j: int, bits: int) -> int:
    """Sign of ``h^(j)`` on the successor with offset pattern ``bits``."""
    return -1 if bin(j & bits).count("1") & 1 else 1


def _check_index(j: int, dim: int) -> None:
    if not 1 <= j < 1 << dim:
        raise ValueError(f"Haar index {j} out of range 1..{(1 << dim) - 1}")


def haar_value(cube: DyadicCube, j: int, cell: DyadicCube) -> Fraction:
    """Value of ``h_cube^(j)`` on ``cell``.

    ``cell`` must be strictly inside ``cube`` or disjoint from it.
    """
    _check_index(j, cube.dim)
    if cube.strictly_contains(cell):
        return haar_sign(j, cell.offset_bits(cube)) * Fraction(1 << (cube.level * cube.dim))
    if cell.contains(cube):
        raise ValueError(f"h is not constant on {cell}: it contains {cube}")
    return Fraction(0)


class HaarExpansion:
    """Finitely supported Haar expansion: constant term plus coefficient map.

    Zero coefficients are dropped on construction, so the key set is the
    spectrum.  Instances are treated as immutable.
    """

    __slots__ = ("dim", "constant", "_coeffs", "_by_cube", "_tree")

    def __init__(
        self,
        dim: int,
        constant: Union[int, Fraction, str] = 0,
        coeffs: Mapping[Pair, Union[int, Fraction, str]] | Iterable[tuple[Pair, Fraction]] | None = None,
    ) -> None:
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim
        self.constant = to_rational(constant)
        items = coeffs.items() if isinstance(coeffs, Mapping) else (coeffs or ())
        store: dict[Pair, Fraction] = {}
        for (cube, j), value in items:
            if cube.dim != dim:
                raise ValueError(f"cube {cube} has the wrong dimension")
            _check_index(j, dim)
            value = to_rational(value)
            if value:
                store[(cube, j)] = value
        self._coeffs = store
        self._by_cube: dict[DyadicCube, dict[int, Fraction]] | None = None
        self._tree: frozenset[DyadicCube] | None = None

    # -- views ---------------------------------------------------------
    @property
    def coeffs(self) -> Mapping[Pair, Fraction]:
        return MappingProxyType(self._coeffs)

    def spectrum(self) -> frozenset[Pair]:
        return frozenset(self._coeffs)

    def cube_spectrum(self) -> frozenset[DyadicCube]:
        return frozenset(self.by_cube())

    def by_cube(self) -> Mapping[DyadicCube, Mapping[int, Fraction]]:
        if self._by_cube is None:
            grouped: dict[DyadicCube, dict[int, Fraction]] = {}
            for (cube, j), value in self._coeffs.items():
                grouped.setdefault(cube, {})[j] = value
            self._by_cube = grouped
        return self._by_cube

    def cube_coeffs(self, cube: DyadicCube) -> Mapping[int, Fraction]:
        return self.by_cube().get(cube, {})

    def covering_tree(self) -> frozenset[DyadicCube]:
        """Every cube that contains at least one spectrum cube."""
        if self._tree is None:
            seen: set[DyadicCube] = set()
            for cube in self.by_cube():
                node: DyadicCube | None = cube
                while node is not None and node not in seen:
                    seen.add(node)
                    node = node.parent()
            self._tree = frozenset(seen)
        return self._tree

    def max_level(self) -> int:
        """Deepest spectrum level, or -1 for a constant."""
        return max((c.level for c in self.by_cube()), default=-1)

    def is_zero(self) -> bool:
        return not self._coeffs and not self.constant

    def __len__(self) -> int:
        return len(self._coeffs)

    def get(self, cube: DyadicCube, j: int) -> Fraction:
        if j == 0:
            if not cube.is_root:
                raise ValueError("index 0 is only defined on the root cube")
            return self.constant
        return self._coeffs.get((cube, j), Fraction(0))

    # -- arithmetic ----------------------------------------------------
    def _combine(self, other: HaarExpansion, sign: int) -> HaarExpansion:
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        merged = dict(self._coeffs)
        for key, value in other._coeffs.items():
            merged[key] = merged.get(key, 0) + sign * value
        return HaarExpansion(self.dim, self.constant + sign * other.constant, merged)

    def __add__(self, other: HaarExpansion) -> HaarExpansion:
        return self._combine(other, 1)

    def __sub__(self, other: HaarExpansion) -> HaarExpansion:
        return self._combine(other, -1)

    def __neg__(self) -> HaarExpansion:
        return self.scale(-1)

    def scale(self, factor: Union[int, Fraction]) -> HaarExpansion:
        factor = to_rational(factor)
        return HaarExpansion(self.dim, self.constant * factor, {k: v * factor for k, v in self._coeffs.items()})

    def __mul__(self, factor: Union[int, Fraction]) -> HaarExpansion:
        return self.scale(factor)

    __rmul__ = __mul__

    def with_coeffs(self, updates: Mapping[Pair, Fraction], constant: Fraction | None = None) -> HaarExpansion:
        merged = dict(self._coeffs)
        merged.update(updates)
        return HaarExpansion(self.dim, self.constant if constant is None else constant, merged)

    def without(self, pairs: Iterable[Pair]) -> HaarExpansion:
        drop = set(pairs)
        return HaarExpansion(self.dim, self.constant, {k: v for k, v in self._coeffs.items() if k not in drop})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HaarExpansion):
            return NotImplemented
        return self.dim == other.dim and self.constant == other.constant and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.dim, self.constant, frozenset(self._coeffs.items())))

    def __repr__(self) -> str:
        return f"HaarExpansion(dim={self.dim}, constant={self.constant}, terms={len(self._coeffs)})"


@dataclass(frozen=True)
class Region:
    """Whole domain, a cube, or a cube minus a strictly smaller subcube."""

    cube: DyadicCube | None = None
    hole: DyadicCube | None = None

    def __post_init__(self) -> None:
        if self.hole is not None:
            if self.cube is None or not self.cube.strictly_contains(self.hole):
                raise ValueError("the removed cube must lie strictly inside the region cube")

    @classmethod
    def whole(cls) -> Region:
        return cls()

    @classmethod
    def difference(cls, cube: DyadicCube, hole: DyadicCube) -> Region:
        return cls(cube, hole)


def haar_function(cube: DyadicCube, j: int) -> HaarExpansion:
    return HaarExpansion(cube.dim, 0, {(cube, j): 1})


def indicator(cube: DyadicCube) -> HaarExpansion:
    """Expansion of the characteristic function of ``cube``."""
    mu = cube.measure
    coeffs = {}
    for anc in cube.ancestors():
        bits = cube.offset_bits(anc)
        for j in range(1, 1 << cube.dim):
            coeffs[(anc, j)] = haar_sign(j, bits) * mu
    return HaarExpansion(cube.dim, mu, coeffs)


def _value_above(f: HaarExpansion, cube: DyadicCube) -> Fraction:
    """Constant value on ``cube`` of the terms living on strict ancestors."""
    total = f.constant
    dim = f.dim
    by_cube = f.by_cube()
    for anc in cube.ancestors():
        local = by_cube.get(anc)
        if local:
            bits = cube.offset_bits(anc)
            scale = 1 << (anc.level * dim)
            total += scale * sum(haar_sign(j, bits) * c for j, c in local.items())
    return total


def _descend(f: HaarExpansion, cube: DyadicCube, above: Fraction, absolute: bool) -> Fraction:
    if cube not in f.covering_tree():
        value = abs(above) if absolute else above
        return value * cube.measure
    local = f.by_cube().get(cube, {})
    scale = 1 << (cube.level * f.dim)
    total = Fraction(0)
    for bits, child in enumerate(immediate_successors(cube)):
        v = above
        if local:
            v += scale * sum(haar_sign(j, bits) * c for j, c in local.items())
        total += _descend(f, child, v, absolute)
    return total


def evaluate(f: HaarExpansion, cell: DyadicCube) -> Fraction:
    """Constant value of ``f`` on ``cell``; no spectrum cube may lie inside it."""
    if cell.dim != f.dim:
        raise ValueError("dimension mismatch")
    if cell in f.covering_tree():
        raise ValueError(f"f is not constant on {cell}")
    return _value_above(f, cell)


def integral(f: HaarExpansion, cube: DyadicCube | None = None) -> Fraction:
    """Signed integral of ``f`` over ``cube`` (default: the whole domain)."""
    cube = cube or DyadicCube.root(f.dim)
    return _descend(f, cube, _value_above(f, cube), absolute=False)


def norm(f: HaarExpansion, region: Region | DyadicCube | None = None) -> Fraction:
    """Exact L1 norm over the whole domain, a cube, or a cube difference."""
    if region is None:
        region = Region.whole()
    elif isinstance(region, DyadicCube):
        region = Region(region)
    cube = region.cube or DyadicCube.root(f.dim)
    total = _descend(f, cube, _value_above(f, cube), absolute=True)
    if region.hole is not None:
        hole = region.hole
        total -= _descend(f, hole, _value_above(f, hole), absolute=True)
    return total


def coefficient(f: HaarExpansion, cube: DyadicCube, j: int) -> Fraction:
    """Stored coefficient; index 0 on the root is the constant term."""
    if j == 0:
        return f.get(cube, 0)
    _check_index(j, f.dim)
    return f.get(cube, j)


def coefficient_from_integral(f: HaarExpansion, cube: DyadicCube, j: int) -> Fraction:
    """``μ(I) ∫_I f h_I^(j)`` evaluated by integrating over the successors."""
    _check_index(j, f.dim)
    total = Fraction(0)
    for bits, child in enumerate(immediate_successors(cube)):
        total += haar_sign(j, bits) * integral(f, child)
    return total


def _cells(dim: int, level: int) -> list[DyadicCube]:
    side = range(1 << level)
    return [DyadicCube(dim, level, coords) for coords in product(side, repeat=dim)]


def synthesis(f: HaarExpansion, level: int) -> list[Fraction]:
    """Row-major values of ``f`` on the level-``level`` grid."""
    if f.max_level() >= level:
        raise ValueError(f"grid level {level} is too coarse for spectrum depth {f.max_level()}")
    return [evaluate(f, cell) for cell in _cells(f.dim, level)]


def analysis(values: Sequence[Union[int, Fraction, str]], dim: int, level: int) -> HaarExpansion:
    """Expansion with spectrum below ``level`` that reproduces a row-major grid."""
    side = 1 << level
    if len(values) != side ** dim:
        raise ValueError(f"expected {side ** dim} grid values for dim={dim}, level={level}, got {len(values)}")
    means: dict[tuple[int, ...], Fraction] = {
        coords: to_rational(v) for coords, v in zip(product(range(side), repeat=dim), values)
    }
    coeffs: dict[Pair, Fraction] = {}
    offsets = list(product((0, 1), repeat=dim))
    for lvl in range(level - 1, -1, -1):
        coarse: dict[tuple[int, ...], Fraction] = {}
        weight = Fraction(1, 1 << ((lvl + 1) * dim))  # measure of a child
        for coords in product(range(1 << lvl), repeat=dim):
            child_means = [means[tuple(2 * k + o for k, o in zip(coords, off))] for off in offsets]
            coarse[coords] = sum(child_means) / (1 << dim)
            cube = DyadicCube(dim, lvl, coords)
            for j in range(1, 1 << dim):
                c = weight * sum(haar_sign(j, bits) * m for bits, m in enumerate(child_means))
                if c:
                    coeffs[(cube, j)] = c
        means = coarse
    return HaarExpansion(dim, means[(0,) * dim], coeffs)


def project_outside(f: HaarExpansion, cube: DyadicCube) -> HaarExpansion:
    """Drop every term on a cube inside ``cube``; the result is constant there."""
    return HaarExpansion(f.dim, f.constant, {(c, j): v for (c, j), v in f.coeffs.items() if not cube.contains(c)})


def max_coefficient(f: HaarExpansion, include_constant: bool = True) -> tuple[Pair, Fraction]:
    """``≺``-first pair of largest absolute coefficient.

    The constant, addressed as ``(root, 0)``, is returned only when it beats
    every Haar coefficient strictly.
    """
    best: Pair | None = None
    best_abs = Fraction(-1)
    for (cube, j), value in f.coeffs.items():
        a = abs(value)
        if a > best_abs or (a == best_abs and (cube.key, j) < (best[0].key, best[1])):
            best, best_abs = (cube, j), a
    if include_constant and f.constant and abs(f.constant) > best_abs:
        root = DyadicCube.root(f.dim)
        return (root, 0), f.constant
    if best is None:
        raise ValueError("max_coefficient of an expansion with no selectable coefficient")
    return best, f.coeffs[best]
