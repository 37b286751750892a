"""Copy operators on dyadic cubes and the chain-by-chain symmetrization.

``copy_from_successor(f, Δ, i)`` keeps ``f`` outside ``Δ`` and on the
``i``-th immediate successor ``Δ_i``, and replaces ``f`` on every other
successor by the translate of ``f|Δ_i``.  It is computed on coefficients:

    L_i f = f - (terms inside Δ) + (v_i - v_Δ) 1_Δ + Σ_j T_j(terms inside Δ_i)

where ``v_Q`` is the value on ``Q`` of the terms living above ``Q``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .dyadic import DyadicCube, mgcr
from .errors import HypothesisError
from .haar import HaarExpansion, evaluate, indicator, norm, project_outside

__all__ = [
    "SymmetrizedPair",
    "copy_from_successor",
    "is_symmetric_at",
    "copy_branches",
    "symmetrize_pair",
    "check_pair_hypotheses",
    "check_pipeline_hypotheses",
    "symmetrize_mgcr",
    "pipeline_properties",
    "induction_margins",
]


def _outer_value(f: HaarExpansion, cube: DyadicCube) -> Fraction:
    return evaluate(project_outside(f, cube), cube)


def copy_from_successor(f: HaarExpansion, delta: DyadicCube, i: int) -> HaarExpansion:
    source = delta.child(i)
    inside: dict = {}
    kept: dict = {}
    for (cube, j), value in f.coeffs.items():
        (inside if delta.contains(cube) else kept)[(cube, j)] = value

    out = HaarExpansion(f.dim, f.constant, kept)
    shift = _outer_value(f, source) - _outer_value(f, delta)
    if shift:
        out = out + indicator(delta).scale(shift)

    local = {(c, j): v for (c, j), v in inside.items() if source.contains(c)}
    copies: dict = {}
    for target in delta.children():
        for (cube, j), value in local.items():
            copies[(cube.translate(source, target), j)] = value
    return out + HaarExpansion(f.dim, 0, copies)


def is_symmetric_at(f: HaarExpansion, delta: DyadicCube) -> bool:
    """All immediate successors of ``delta`` carry translates of one another."""
    return copy_from_successor(f, delta, 1) == f


@dataclass(frozen=True)
class CopyBranches:
    """Norms behind the choice of successor for the pair operator."""

    ratio_num: Fraction  # ‖f‖
    ratio_den: Fraction  # ‖f+g‖
    copy_norms: list[Fraction]  # ‖L_i f‖
    sum_norms: list[Fraction]  # ‖L_i (f+g)‖

    @property
    def strict(self) -> list[int]:
        """1-based ``i`` with ``‖L_i f‖ > B ‖L_i(f+g)‖``."""
        return [
            i + 1 for i, (a, b) in enumerate(zip(self.copy_norms, self.sum_norms))
            if a * self.ratio_den > self.ratio_num * b
        ]

    @property
    def all_equal(self) -> bool:
        return all(a * self.ratio_den == self.ratio_num * b for a, b in zip(self.copy_norms, self.sum_norms))

    @property
    def trichotomy_holds(self) -> bool:
        return bool(self.strict) or self.all_equal


def copy_branches(f: HaarExpansion, g: HaarExpansion, delta: DyadicCube) -> CopyBranches:
    s = f + g
    n = 1 << f.dim
    return CopyBranches(
        ratio_num=norm(f),
        ratio_den=norm(s),
        copy_norms=[norm(copy_from_successor(f, delta, i)) for i in range(1, n + 1)],
        sum_norms=[norm(copy_from_successor(s, delta, i)) for i in range(1, n + 1)],
    )


def check_pair_hypotheses(f: HaarExpansion, g: HaarExpansion, delta: DyadicCube) -> None:
    if delta in f.cube_spectrum() or delta in g.cube_spectrum():
        raise HypothesisError("i", f"{delta} carries a coefficient of f or g")
    if not f.spectrum().isdisjoint(g.spectrum()):
        raise HypothesisError("ii", "f and g share a spectrum pair")
    if not (f + g).spectrum():
        raise HypothesisError("iii", "f + g has empty spectrum")


def symmetrize_pair(f: HaarExpansion, g: HaarExpansion, delta: DyadicCube) -> tuple[HaarExpansion, HaarExpansion, int]:
    """Apply the same copy operator to ``f`` and ``g``, choosing the successor.

    Prefer the smallest ``i`` with ``‖L_i f‖ > B ‖L_i(f+g)‖`` and
    ``L_i(f+g) ≠ 0``; otherwise the smallest ``i`` whose copy of ``f+g`` keeps
    a nonempty spectrum, falling back to any nonzero copy.
    """
    check_pair_hypotheses(f, g, delta)
    n = 1 << f.dim
    copies = {i: (copy_from_successor(f, delta, i), copy_from_successor(g, delta, i)) for i in range(1, n + 1)}
    ratio_num, ratio_den = norm(f), norm(f + g)

    def sum_of(i: int) -> HaarExpansion:
        return copies[i][0] + copies[i][1]

    for i in range(1, n + 1):
        a, b = norm(copies[i][0]), norm(sum_of(i))
        if b > 0 and a * ratio_den > ratio_num * b:
            return copies[i][0], copies[i][1], i
    for i in range(1, n + 1):
        if sum_of(i).spectrum():
            return copies[i][0], copies[i][1], i
    for i in range(1, n + 1):
        if not sum_of(i).is_zero():
            return copies[i][0], copies[i][1], i
    raise ValueError("every copy of f + g vanishes")


@dataclass
class SymmetrizedPair:
    f_prime: HaarExpansion
    g_prime: HaarExpansion
    ratio_before: Fraction
    ratio_after: Fraction
    applied: list[tuple[DyadicCube, int]] = field(default_factory=list)


def check_pipeline_hypotheses(f: HaarExpansion, g: HaarExpansion, t: Fraction) -> None:
    """Raise ``HypothesisError`` naming the first failed hypothesis (1-5)."""
    sf, sg = f.cube_spectrum(), g.cube_spectrum()
    if not sf:
        raise HypothesisError("0", "f has empty spectrum")
    if not sf.isdisjoint(sg):
        raise HypothesisError("1", "cube spectra of f and g intersect")
    root = DyadicCube.root(f.dim)
    if root in sf or root in sg:
        raise HypothesisError("2", "the root cube carries a coefficient")
    analysis = mgcr(sf)
    for father in analysis.fathers:
        if father in sg:
            raise HypothesisError("3", f"father {father} lies in the cube spectrum of g")
    if any(abs(v) > 1 for v in g.coeffs.values()):
        raise HypothesisError("4", "g has a coefficient larger than 1 in modulus")
    for r in analysis.mgcr:
        if not any(abs(v) >= t for cube in r.cubes for v in f.cube_coeffs(cube).values()):
            raise HypothesisError("5", f"chain under {r.maximal_cube} has no coefficient >= {t}")


def symmetrize_mgcr(f: HaarExpansion, g: HaarExpansion, t: Fraction) -> SymmetrizedPair:
    """Symmetrize at every chain father, smallest fathers first, in one pass."""
    check_pipeline_hypotheses(f, g, t)
    fathers = sorted(set(mgcr(f.cube_spectrum()).fathers), key=lambda c: (-c.level, c.coords))
    cur_f, cur_g = f, g
    applied = []
    for father in fathers:
        cur_f, cur_g, i = symmetrize_pair(cur_f, cur_g, father)
        applied.append((father, i))
    return SymmetrizedPair(
        f_prime=cur_f,
        g_prime=cur_g,
        ratio_before=norm(f) / norm(f + g),
        ratio_after=norm(cur_f) / norm(cur_f + cur_g),
        applied=applied,
    )


def _maximal(cubes: set[DyadicCube]) -> list[DyadicCube]:
    return [c for c in cubes if not any(o.strictly_contains(c) for o in cubes)]


def pipeline_properties(f: HaarExpansion, g: HaarExpansion, result: SymmetrizedPair, t: Fraction) -> dict[str, bool]:
    """Post-hoc check of the properties P1-P7 of the symmetrized pair.

    ``support`` (``f'`` vanishes off the union of fathers) is reported only
    when ``f`` has no constant term.
    """
    fp, gp = result.f_prime, result.g_prime
    sf, sg = fp.cube_spectrum(), gp.cube_spectrum()
    root = DyadicCube.root(f.dim)
    analysis = mgcr(sf)
    fathers = set(analysis.fathers)
    props = {
        "P1": sf.isdisjoint(sg),
        "P2": root not in sf and root not in sg,
        "P3": fathers.isdisjoint(sg),
        "P4": all(abs(v) <= 1 for v in gp.coeffs.values()),
        "P5": all(
            any(abs(v) >= t for cube in r.cubes for v in fp.cube_coeffs(cube).values())
            for r in analysis.mgcr
        ),
        "P6": all(is_symmetric_at(fp, F) and is_symmetric_at(gp, F) for F in fathers),
        "P7": norm(fp) * norm(f + g) >= norm(f) * norm(fp + gp),
    }
    if f.constant == 0:
        props["support"] = norm(fp) == sum((norm(fp, F) for F in _maximal(fathers)), Fraction(0))
    return props


def induction_margins(result: SymmetrizedPair, t: Fraction) -> list[tuple[DyadicCube, Fraction, Fraction]]:
    """Per-father diagnostic ``(I, ‖f'‖_I, (5/t + 2)‖f'+g'‖_I - 2t - 8)``."""
    fp, total = result.f_prime, result.f_prime + result.g_prime
    out = []
    if not fp.cube_spectrum():
        return out
    for father in sorted(set(mgcr(fp.cube_spectrum()).fathers), key=lambda c: c.key):
        out.append((father, norm(fp, father), (5 / t + 2) * norm(total, father) - 2 * t - 8))
    return out
