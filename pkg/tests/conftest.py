from __future__ import annotations

from fractions import Fraction
from itertools import product

from hypothesis import HealthCheck, settings, strategies as st

from haargreedy.dyadic import DyadicCube
from haargreedy.haar import HaarExpansion, haar_value

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


def dyadic_fractions(bound: int = 4, nonzero: bool = False):
    values = st.builds(
        lambda n, k: Fraction(n, 1 << k),
        st.integers(-bound * 16, bound * 16),
        st.integers(0, 4),
    )
    return values.filter(bool) if nonzero else values


@st.composite
def cubes(draw, dim: int | None = None, max_level: int = 4, min_level: int = 0):
    dim = dim or draw(st.integers(1, 3))
    level = draw(st.integers(min_level, max_level))
    coords = tuple(draw(st.integers(0, (1 << level) - 1)) for _ in range(dim))
    return DyadicCube(dim, level, coords)


@st.composite
def expansions(draw, dim: int | None = None, max_level: int = 3, max_coeffs: int = 8, constant: bool = True):
    dim = dim or draw(st.integers(1, 3))
    n = draw(st.integers(0, max_coeffs))
    coeffs = {}
    for _ in range(n):
        cube = draw(cubes(dim, max_level))
        coeffs[(cube, draw(st.integers(1, (1 << dim) - 1)))] = draw(dyadic_fractions(nonzero=True))
    c = draw(dyadic_fractions()) if constant else 0
    return HaarExpansion(dim, c, coeffs)


def cells(dim: int, level: int) -> list[DyadicCube]:
    return [DyadicCube(dim, level, coords) for coords in product(range(1 << level), repeat=dim)]


def grid_values(f: HaarExpansion, level: int) -> dict[DyadicCube, Fraction]:
    """Pointwise oracle: sum every Haar term on each cell, no tree descent."""
    out = {}
    for cell in cells(f.dim, level):
        v = f.constant
        for (cube, j), c in f.coeffs.items():
            v += c * haar_value(cube, j, cell)
        out[cell] = v
    return out


def grid_norm(f: HaarExpansion, level: int, region=None) -> Fraction:
    total = Fraction(0)
    for cell, v in grid_values(f, level).items():
        if region is None or region(cell):
            total += abs(v) * cell.measure
    return total


# acceptance lines collected during the run, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
