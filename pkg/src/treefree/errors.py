"""Exception types shared by the engines and oracles."""

from __future__ import annotations


class GraphError(ValueError):
    """Invalid graph construction or malformed graph file."""


class ParameterError(ValueError):
    """Engine parameters fail a stated hypothesis (caller should fall back)."""


class OracleLimitError(RuntimeError):
    """An exact oracle was asked to run beyond its configured size limit."""


class InvariantError(AssertionError):
    """An internal invariant of an engine was violated (a bug, not bad input)."""


class CliqueFound(Exception):
    """Raised mid-run when the clique-number hypothesis is refuted.

    ``clique`` is a tuple of pairwise adjacent vertices of the host graph whose
    size exceeds the bound the caller asserted.
    """

    def __init__(self, clique):
        self.clique = tuple(sorted(clique))
        super().__init__(f"clique of size {len(self.clique)}: {self.clique}")


class TreeFound(Exception):
    """Raised from deep inside a search when an induced copy of the pattern appears."""

    def __init__(self, embedding):
        self.embedding = tuple(embedding)
        super().__init__(f"induced copy found: {self.embedding}")
