"""Dyadic cubes in [0,1)^d, the order on them, and chain combinatorics.

A cube at level ``n`` with integer coordinates ``(k_1, ..., k_d)`` is the
product of the intervals ``[k_i 2^-n, (k_i + 1) 2^-n)``.  Level 0 is the
whole unit cube, which carries its own Haar functions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator

__all__ = [
    "DyadicCube",
    "GeneralizedChain",
    "CubeSetAnalysis",
    "interval_precedes",
    "cube_precedes",
    "index_precedes",
    "immediate_successors",
    "chain",
    "is_generalized_chain",
    "chains_mergeable",
    "mgcr",
    "sons",
    "sons_of_set",
    "iterated_sons",
]

_CUBE_RE = re.compile(r"^d(\d+):n(\d+):\(([-\d,\s]*)\)$")


@dataclass(frozen=True, slots=True)
class DyadicCube:
    dim: int
    level: int
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")
        if self.level < 0:
            raise ValueError(f"level must be non-negative, got {self.level}")
        if len(self.coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {self.coords!r}")
        side = 1 << self.level
        for k in self.coords:
            if not 0 <= k < side:
                raise ValueError(f"coordinate {k} out of range for level {self.level}")

    @classmethod
    def root(cls, dim: int) -> DyadicCube:
        return cls(dim, 0, (0,) * dim)

    @classmethod
    def parse(cls, text: str) -> DyadicCube:
        """Inverse of ``str(cube)``: ``"d2:n1:(0,1)"``."""
        m = _CUBE_RE.match(text.strip())
        if m is None:
            raise ValueError(f"malformed cube text {text!r}")
        coords = tuple(int(c) for c in m.group(3).split(",") if c.strip())
        return cls(int(m.group(1)), int(m.group(2)), coords)

    def __str__(self) -> str:
        return f"d{self.dim}:n{self.level}:({','.join(map(str, self.coords))})"

    @property
    def is_root(self) -> bool:
        return self.level == 0

    @property
    def side(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    @property
    def measure(self) -> Fraction:
        return Fraction(1, 1 << (self.level * self.dim))

    @property
    def key(self) -> tuple[int, tuple[int, ...]]:
        # All axes of a cube share one side length, so the lexicographic
        # extension of the interval order reduces to (level, coords).
        return (self.level, self.coords)

    def intervals(self) -> list[tuple[Fraction, Fraction]]:
        """Per-axis ``(left endpoint, length)``."""
        side = self.side
        return [(k * side, side) for k in self.coords]

    def parent(self) -> DyadicCube | None:
        if self.level == 0:
            return None
        return DyadicCube(self.dim, self.level - 1, tuple(k >> 1 for k in self.coords))

    def ancestor(self, level: int) -> DyadicCube:
        if not 0 <= level <= self.level:
            raise ValueError(f"no ancestor at level {level} for {self}")
        shift = self.level - level
        return DyadicCube(self.dim, level, tuple(k >> shift for k in self.coords))

    def ancestors(self) -> Iterator[DyadicCube]:
        """Strict ancestors, nearest first."""
        for level in range(self.level - 1, -1, -1):
            yield self.ancestor(level)

    def contains(self, other: DyadicCube) -> bool:
        """``other ⊆ self``."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        if other.level < self.level:
            return False
        shift = other.level - self.level
        return all((b >> shift) == a for a, b in zip(self.coords, other.coords))

    def strictly_contains(self, other: DyadicCube) -> bool:
        return other.level > self.level and self.contains(other)

    def disjoint(self, other: DyadicCube) -> bool:
        return not (self.contains(other) or other.contains(self))

    def children(self) -> list[DyadicCube]:
        return immediate_successors(self)

    def child(self, index: int) -> DyadicCube:
        """Immediate successor by 1-based index in canonical order."""
        if not 1 <= index <= 1 << self.dim:
            raise ValueError(f"successor index {index} out of range 1..{1 << self.dim}")
        bits = index - 1
        coords = tuple(
            2 * k + ((bits >> (self.dim - 1 - axis)) & 1)
            for axis, k in enumerate(self.coords)
        )
        return DyadicCube(self.dim, self.level + 1, coords)

    def successor_index(self) -> int:
        """1-based position of this cube among its parent's successors."""
        if self.level == 0:
            raise ValueError("the root cube has no parent")
        bits = 0
        for k in self.coords:
            bits = (bits << 1) | (k & 1)
        return bits + 1

    def offset_bits(self, ancestor: DyadicCube) -> int:
        """Bit pattern of the successor of ``ancestor`` that contains ``self``.

        Bit ``d-1-axis`` is set when ``self`` lies in the right half of
        ``ancestor`` along ``axis``.
        """
        shift = self.level - ancestor.level - 1
        if shift < 0:
            raise ValueError(f"{self} is not strictly inside {ancestor}")
        bits = 0
        for k in self.coords:
            bits = (bits << 1) | ((k >> shift) & 1)
        return bits

    def translate(self, source: DyadicCube, target: DyadicCube) -> DyadicCube:
        """Move ``self`` (inside ``source``) to the same relative spot in ``target``."""
        if source.level != target.level:
            raise ValueError("source and target must have the same level")
        shift = self.level - source.level
        coords = tuple(
            k - (s << shift) + (t << shift)
            for k, s, t in zip(self.coords, source.coords, target.coords)
        )
        return DyadicCube(self.dim, self.level, coords)


def interval_precedes(a1: Fraction, len1: Fraction, a2: Fraction, len2: Fraction) -> bool:
    """``[a1, a1+len1) ≺ [a2, a2+len2)``: longer first, then leftmost."""
    return len1 > len2 or (len1 == len2 and a1 < a2)


def cube_precedes(first: DyadicCube, second: DyadicCube) -> bool:
    if first.dim != second.dim:
        raise ValueError(f"dimension mismatch: {first.dim} vs {second.dim}")
    for (a1, l1), (a2, l2) in zip(first.intervals(), second.intervals()):
        if interval_precedes(a1, l1, a2, l2):
            return True
        if (a1, l1) != (a2, l2):
            return False
    return False


def index_precedes(p: tuple[DyadicCube, int], q: tuple[DyadicCube, int]) -> bool:
    (cube_p, i), (cube_q, j) = p, q
    return cube_precedes(cube_p, cube_q) or (cube_p == cube_q and i < j)


def immediate_successors(cube: DyadicCube) -> list[DyadicCube]:
    """The ``2^d`` subcubes one level down, lexicographic by coordinates."""
    base = tuple(2 * k for k in cube.coords)
    return [
        DyadicCube(cube.dim, cube.level + 1, tuple(b + o for b, o in zip(base, offs)))
        for offs in product((0, 1), repeat=cube.dim)
    ]


def chain(outer: DyadicCube, inner: DyadicCube) -> list[DyadicCube]:
    """All cubes ``K`` with ``inner ⊆ K ⊆ outer``, largest first."""
    if not outer.contains(inner):
        raise ValueError(f"{inner} is not contained in {outer}")
    return [inner.ancestor(level) for level in range(outer.level, inner.level + 1)]


@dataclass(frozen=True)
class GeneralizedChain:
    cubes: frozenset[DyadicCube]
    maximal_cube: DyadicCube
    father: DyadicCube | None = field(default=None)

    @classmethod
    def from_cubes(cls, cubes: Iterable[DyadicCube]) -> GeneralizedChain:
        cubes = frozenset(cubes)
        top = is_generalized_chain(cubes)
        if top is None:
            raise ValueError("cube set is not a generalized chain")
        return cls(cubes, top, top.parent())

    def __len__(self) -> int:
        return len(self.cubes)

    def __contains__(self, cube: object) -> bool:
        return cube in self.cubes


@dataclass(frozen=True)
class CubeSetAnalysis:
    mgcr: list[GeneralizedChain]
    lambda0: frozenset[DyadicCube]
    lambda1: frozenset[DyadicCube]
    lambda2: frozenset[DyadicCube]
    sons: dict[DyadicCube, frozenset[DyadicCube]]

    @property
    def fathers(self) -> list[DyadicCube]:
        return [r.father for r in self.mgcr if r.father is not None]


def is_generalized_chain(cubes: Iterable[DyadicCube]) -> DyadicCube | None:
    """Return the maximal cube if ``cubes`` is a generalized chain, else None.

    Direct check of the definition: some member contains every member, and
    holds the whole chain down to each of them.
    """
    cubes = set(cubes)
    if not cubes:
        return None
    top = min(cubes, key=lambda c: c.key)
    for cube in cubes:
        if not top.contains(cube):
            return None
        if any(k not in cubes for k in chain(top, cube)):
            return None
    return top


def chains_mergeable(first: GeneralizedChain, second: GeneralizedChain) -> bool:
    """Union-is-a-chain criterion: overlap, or one father lies in the other."""
    return (
        not first.cubes.isdisjoint(second.cubes)
        or (first.father is not None and first.father in second.cubes)
        or (second.father is not None and second.father in first.cubes)
    )


def _s_parent(cube: DyadicCube, members: set[DyadicCube] | frozenset[DyadicCube]) -> DyadicCube | None:
    for anc in cube.ancestors():
        if anc in members:
            return anc
    return None


def _sons_map(members: frozenset[DyadicCube]) -> dict[DyadicCube, frozenset[DyadicCube]]:
    acc: dict[DyadicCube, set[DyadicCube]] = {c: set() for c in members}
    for cube in members:
        up = _s_parent(cube, members)
        if up is not None:
            acc[up].add(cube)
    return {c: frozenset(s) for c, s in acc.items()}


def sons(cube: DyadicCube, members: Iterable[DyadicCube]) -> frozenset[DyadicCube]:
    """Members ``J`` whose chain up to ``cube`` meets the set only at its ends."""
    members = frozenset(members)
    if cube not in members:
        raise ValueError(f"{cube} is not a member of the set")
    return frozenset(
        j for j in members
        if cube.strictly_contains(j) and _s_parent(j, members) == cube
    )


def sons_of_set(cubes: Iterable[DyadicCube], members: Iterable[DyadicCube]) -> frozenset[DyadicCube]:
    members = frozenset(members)
    out: set[DyadicCube] = set()
    for cube in cubes:
        out |= sons(cube, members)
    return frozenset(out)


def iterated_sons(cubes: Iterable[DyadicCube], members: Iterable[DyadicCube], k: int) -> frozenset[DyadicCube]:
    """``k``-fold application of ``sons_of_set``; ``k = 0`` returns the input."""
    members = frozenset(members)
    current = frozenset(cubes)
    for _ in range(k):
        current = sons_of_set(current, members)
    return current


def mgcr(cubes: Iterable[DyadicCube]) -> CubeSetAnalysis:
    """Minimal generalized chain representation plus son counts.

    Cubes enter as singleton chains in ``≺`` order and chains are merged
    until no pair satisfies the merge criterion.
    """
    members = frozenset(cubes)
    if not members:
        raise ValueError("mgcr of an empty cube set")
    dims = {c.dim for c in members}
    if len(dims) != 1:
        raise ValueError("cubes of mixed dimension")

    owner: dict[DyadicCube, int] = {}
    groups: dict[int, set[DyadicCube]] = {}
    tops: dict[int, DyadicCube] = {}
    for gid, cube in enumerate(sorted(members, key=lambda c: c.key)):
        owner[cube] = gid
        groups[gid] = {cube}
        tops[gid] = cube

    changed = True
    while changed:
        changed = False
        for gid in sorted(groups):
            if gid not in groups:
                continue
            father = tops[gid].parent()
            other = owner.get(father) if father is not None else None
            if other is None or other == gid:
                continue
            # father(R_gid) lies in R_other: absorb gid into other
            for cube in groups[gid]:
                owner[cube] = other
            groups[other] |= groups.pop(gid)
            del tops[gid]
            changed = True

    chains = sorted(
        (GeneralizedChain(frozenset(g), tops[gid], tops[gid].parent()) for gid, g in groups.items()),
        key=lambda r: r.maximal_cube.key,
    )
    son_map = _sons_map(members)
    lam = {0: set(), 1: set(), 2: set()}
    for cube, ss in son_map.items():
        lam[min(len(ss), 2)].add(cube)
    return CubeSetAnalysis(
        mgcr=chains,
        lambda0=frozenset(lam[0]),
        lambda1=frozenset(lam[1]),
        lambda2=frozenset(lam[2]),
        sons=son_map,
    )
