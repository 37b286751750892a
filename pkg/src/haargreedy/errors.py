"""Exception types shared by the lemma machinery."""

from __future__ import annotations


class HypothesisError(ValueError):
    """An input violates a numbered hypothesis of a lemma.

    ``which`` names the failed hypothesis, e.g. ``"2"`` or ``"iii"``.
    """

    def __init__(self, which: str, message: str) -> None:
        super().__init__(f"hypothesis {which} violated: {message}")
        self.which = which
