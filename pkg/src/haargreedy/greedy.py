"""Two-parameter weak thresholding greedy algorithm ``G_m^{s,t}``.

Each step works on the current residual ``R``:

1. pick the ``≺``-first pair ``(Δ, j)`` of largest ``|c|``;
2. grow ``Δ`` upward to the largest ancestor ``Δ̃`` such that every cube
   on the way has some coefficient of size at least ``s |c_Δ^(j)|``;
3. at ``Δ̃`` take the smallest coefficient that clears the threshold
   (``t/s`` times the largest one at ``Δ̃`` for rule A, ``t |c_Δ^(j)|``
   for rule B);
4. move that term from the residual into the approximant.

The constant term is addressed as ``(root, 0)``.  It is taken in step 1
only when it strictly dominates every Haar coefficient, and it is one of
the step-3 candidates whenever ``Δ̃`` is the root.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from .dyadic import DyadicCube
from .haar import HaarExpansion, max_coefficient, norm, to_rational

__all__ = [
    "GreedyParams",
    "GreedyStepRecord",
    "GreedyState",
    "GreedyTrace",
    "select_max",
    "grow_cube",
    "select_index",
    "greedy_step",
    "run",
    "first_step_selection",
    "check_branch_greedy",
]

Pair = tuple[DyadicCube, int]
RULES = ("A", "B")


@dataclass(frozen=True)
class GreedyParams:
    s: Fraction
    t: Fraction
    variant: str = "A"
    max_steps: int | None = None
    include_constant: bool = True

    def __post_init__(self) -> None:
        s, t = to_rational(self.s), to_rational(self.t)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "variant", str(self.variant).upper())
        if not 0 < t <= s <= 1:
            raise ValueError(f"need 0 < t <= s <= 1, got s={s}, t={t}")
        if self.variant not in RULES:
            raise ValueError(f"unknown step-3 rule {self.variant!r}; expected one of {RULES}")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be positive")

    @property
    def boundary(self) -> bool:
        """``s = 1`` or ``s = t``: accepted, but outside the convergent regime."""
        return self.s == 1 or self.s == self.t


@dataclass(frozen=True)
class GreedyStepRecord:
    m: int
    delta_m: DyadicCube
    j_m: int
    tilde_delta_m: DyadicCube
    i_m: int
    removed_value: Fraction
    approximant_norm: Fraction
    residual_norm: Fraction


@dataclass(frozen=True)
class GreedyState:
    residual: HaarExpansion
    approximant: HaarExpansion
    m: int = 0


@dataclass
class GreedyTrace:
    params: GreedyParams
    initial: HaarExpansion
    steps: list[GreedyStepRecord] = field(default_factory=list)
    terminated: bool = False
    final: GreedyState | None = None

    @property
    def initial_norm(self) -> Fraction:
        return norm(self.initial)

    @property
    def non_convergent_regime(self) -> bool:
        return self.params.boundary

    def approximant(self, m: int | None = None) -> HaarExpansion:
        """``G_m`` rebuilt from the recorded selections (default: last step)."""
        m = len(self.steps) if m is None else m
        if not 0 <= m <= len(self.steps):
            raise IndexError(f"step {m} outside 0..{len(self.steps)}")
        constant = Fraction(0)
        coeffs: dict[Pair, Fraction] = {}
        for rec in self.steps[:m]:
            if rec.i_m == 0:
                constant = rec.removed_value
            else:
                coeffs[(rec.tilde_delta_m, rec.i_m)] = rec.removed_value
        return HaarExpansion(self.initial.dim, constant, coeffs)

    def max_approximant_norm(self) -> Fraction:
        return max((r.approximant_norm for r in self.steps), default=Fraction(0))


def _has_selection(r: HaarExpansion, include_constant: bool) -> bool:
    return bool(len(r)) or (include_constant and r.constant != 0)


def select_max(r: HaarExpansion, include_constant: bool = True) -> Pair:
    """Step 1: ``≺``-first cube, then smallest index, of maximal ``|c|``."""
    if not _has_selection(r, include_constant):
        raise ValueError("residual has no selectable coefficient")
    pair, _ = max_coefficient(r, include_constant)
    return pair


def grow_cube(r: HaarExpansion, delta: DyadicCube, j: int, s: Union[Fraction, int]) -> DyadicCube:
    """Step 2: walk ancestors of ``delta`` while each carries a coefficient ``>= s|c_delta^(j)|``."""
    level = to_rational(s) * abs(r.get(delta, j))
    top = delta
    for anc in delta.ancestors():
        if any(abs(c) >= level for c in r.cube_coeffs(anc).values()):
            top = anc
        else:
            break
    return top


def select_index(
    r: HaarExpansion,
    tilde_delta: DyadicCube,
    delta: DyadicCube,
    j: int,
    params: GreedyParams,
) -> int:
    """Step 3: smallest qualifying coefficient at ``tilde_delta``; ties go to the smaller index."""
    candidates = dict(r.cube_coeffs(tilde_delta))
    if params.variant == "A":
        top = max((abs(c) for c in candidates.values()), default=Fraction(0))
        threshold = params.t / params.s * top
    else:
        threshold = params.t * abs(r.get(delta, j))
    if params.include_constant and tilde_delta.is_root and r.constant:
        candidates[0] = r.constant
    qualifying = [(abs(c), i) for i, c in candidates.items() if abs(c) >= threshold]
    if not qualifying:
        # unreachable when step 2 ran with t <= s; kept as an explicit guard
        raise RuntimeError(f"no index at {tilde_delta} clears threshold {threshold}")
    return min(qualifying)[1]


def first_step_selection(r: HaarExpansion, params: GreedyParams) -> tuple[DyadicCube, int, DyadicCube, int]:
    """``(Δ_m, j_m, Δ̃_m, i_m)`` for one step on residual ``r``."""
    delta, j = select_max(r, params.include_constant)
    if j == 0:
        return delta, 0, delta, 0
    tilde = grow_cube(r, delta, j, params.s)
    return delta, j, tilde, select_index(r, tilde, delta, j, params)


def greedy_step(state: GreedyState, params: GreedyParams) -> tuple[GreedyState, GreedyStepRecord]:
    r = state.residual
    delta, j, tilde, i = first_step_selection(r, params)
    removed = r.get(tilde, i)
    if i == 0:
        residual = HaarExpansion(r.dim, 0, r.coeffs)
        approximant = HaarExpansion(r.dim, state.approximant.constant + removed, state.approximant.coeffs)
    else:
        residual = r.without([(tilde, i)])
        approximant = state.approximant.with_coeffs({(tilde, i): removed})
    record = GreedyStepRecord(
        m=state.m + 1,
        delta_m=delta,
        j_m=j,
        tilde_delta_m=tilde,
        i_m=i,
        removed_value=removed,
        approximant_norm=norm(approximant),
        residual_norm=norm(residual),
    )
    return GreedyState(residual, approximant, state.m + 1), record


def run(f: HaarExpansion, params: GreedyParams) -> GreedyTrace:
    """Iterate until nothing is selectable or ``max_steps`` is reached."""
    limit = params.max_steps if params.max_steps is not None else len(f) + 1
    state = GreedyState(f, HaarExpansion(f.dim))
    trace = GreedyTrace(params=params, initial=f)
    while state.m < limit and _has_selection(state.residual, params.include_constant):
        state, record = greedy_step(state, params)
        trace.steps.append(record)
    trace.terminated = not _has_selection(state.residual, params.include_constant)
    trace.final = state
    return trace


def check_branch_greedy(
    f: HaarExpansion,
    params: GreedyParams,
    perturbation: Mapping[Pair, Union[Fraction, int, str]],
) -> bool:
    """Compare the first step on ``f`` and on ``f`` with sub-threshold values replaced.

    ``perturbation`` maps pairs (``(root, 0)`` for the constant) to their new
    values.  Both the old and the new value must stay strictly below ``t``
    times the largest coefficient; only then is the first selection
    guaranteed to be unaffected.
    """
    if not _has_selection(f, params.include_constant):
        raise ValueError("f has no selectable coefficient")
    _, top = max_coefficient(f, params.include_constant)
    cap = params.t * abs(top)
    constant = f.constant
    updates: dict[Pair, Fraction] = {}
    for (cube, i), value in perturbation.items():
        value = to_rational(value)
        old = f.get(cube, i)
        if abs(old) >= cap or abs(value) >= cap:
            raise ValueError(f"perturbation at ({cube}, {i}) is not below the threshold {cap}")
        if i == 0:
            constant = value
        else:
            updates[(cube, i)] = value
    perturbed = f.with_coeffs(updates, constant=constant)
    return first_step_selection(f, params) == first_step_selection(perturbed, params)
