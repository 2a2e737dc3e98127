"""Tree patterns: brooms, multibrooms, radius, dfs-enumerations and active paths."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .graph import Graph, build_graph


@dataclass(frozen=True)
class MultibroomSpec:
    """Brooms glued at their roots; each arm is ``(length, bristles)``."""

    arms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        arms = tuple((int(l), int(m)) for l, m in self.arms)
        for l, m in arms:
            if l < 1 or m < 0:
                raise ValueError(f"invalid arm ({l}, {m}): need length >= 1, bristles >= 0")
        object.__setattr__(self, "arms", arms)

    @property
    def size(self) -> int:
        return 1 + sum(l + m for l, m in self.arms)

    @property
    def max_length(self) -> int:
        return max((l for l, _ in self.arms), default=0)

    @property
    def max_bristles(self) -> int:
        return max((m for _, m in self.arms), default=0)

    def __str__(self) -> str:
        return "multibroom:" + ",".join(f"({l},{m})" for l, m in self.arms)


@dataclass(frozen=True)
class TreePattern:
    """A tree on ``0..t-1`` given by parent pointers (``parent[root] == -1``)."""

    parent: tuple[int, ...]
    name: str = ""
    multibroom: MultibroomSpec | None = field(default=None, compare=False)

    def __post_init__(self):
        roots = [v for v, p in enumerate(self.parent) if p == -1]
        if self.parent and len(roots) != 1:
            raise ValueError("parent array must have exactly one root")
        for v in range(self.t):
            seen = set()
            u = v
            while u != -1:
                if u in seen or not -1 <= self.parent[u] < self.t:
                    raise ValueError("parent array is not a rooted tree")
                seen.add(u)
                u = self.parent[u]

    @property
    def t(self) -> int:
        return len(self.parent)

    def __len__(self) -> int:
        return self.t

    @property
    def degenerate(self) -> bool:
        """Trees on at most two vertices, which consumers handle by direct search."""
        return self.t <= 2

    @cached_property
    def neighbours(self) -> tuple[tuple[int, ...], ...]:
        nb: list[list[int]] = [[] for _ in range(self.t)]
        for v, p in enumerate(self.parent):
            if p >= 0:
                nb[v].append(p)
                nb[p].append(v)
        return tuple(tuple(sorted(x)) for x in nb)

    def edges(self) -> list[tuple[int, int]]:
        return [(p, v) for v, p in enumerate(self.parent) if p >= 0]

    def as_graph(self) -> Graph:
        return build_graph(self.t, self.edges())

    def distances_from(self, s: int) -> list[int]:
        dist = [-1] * self.t
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in self.neighbours[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    @cached_property
    def eccentricities(self) -> tuple[int, ...]:
        return tuple(max(self.distances_from(u)) for u in range(self.t))

    @property
    def radius(self) -> int:
        return min(self.eccentricities, default=0)

    @property
    def center(self) -> int:
        """Lowest-index vertex whose eccentricity equals the radius."""
        ecc = self.eccentricities
        return ecc.index(min(ecc))

    def __str__(self) -> str:
        return self.name or f"tree{self.parent}"


def radius(T: TreePattern) -> int:
    return T.radius


def tree_from_edges(t: int, edges: Sequence[tuple[int, int]], name: str = "") -> TreePattern:
    nb: list[list[int]] = [[] for _ in range(t)]
    for u, v in edges:
        nb[u].append(v)
        nb[v].append(u)
    if len(edges) != t - 1:
        raise ValueError("a tree on t vertices has t-1 edges")
    parent = [-2] * t
    if t:
        parent[0] = -1
        stack = [0]
        while stack:
            u = stack.pop()
            for v in nb[u]:
                if parent[v] == -2:
                    parent[v] = u
                    stack.append(v)
    if -2 in parent:
        raise ValueError("edges do not form a connected tree")
    return TreePattern(tuple(parent), name)


def make_broom(length: int, bristles: int) -> TreePattern:
    """Path ``0-1-...-length`` rooted at 0, with ``bristles`` leaves on ``length``."""
    if length < 1:
        raise ValueError("a broom has length at least 1")
    if bristles < 0:
        raise ValueError("bristle count must be nonnegative")
    parent = [-1] + list(range(length)) + [length] * bristles
    return TreePattern(tuple(parent), f"broom:{length},{bristles}",
                       MultibroomSpec(((length, bristles),)))


def make_multibroom(spec: MultibroomSpec | Sequence[tuple[int, int]]) -> TreePattern:
    """Identify the roots of the arms' brooms into vertex 0; arms are laid out in order."""
    if not isinstance(spec, MultibroomSpec):
        spec = MultibroomSpec(tuple(spec))
    parent = [-1]
    for length, bristles in spec.arms:
        prev = 0
        for _ in range(length):
            parent.append(prev)
            prev = len(parent) - 1
        parent.extend([prev] * bristles)
    return TreePattern(tuple(parent), str(spec), spec)


def make_path(t: int) -> TreePattern:
    if t < 1:
        raise ValueError("path needs at least one vertex")
    # As a (t-2, 1)-broom: same labels, shorter arm than (t-1, 0).
    if t >= 3:
        spec = MultibroomSpec(((t - 2, 1),))
    else:
        spec = MultibroomSpec(((1, 0),) if t == 2 else ())
    return TreePattern((-1,) + tuple(range(t - 1)), f"path:{t}", spec)


def make_star(leaves: int) -> TreePattern:
    spec = MultibroomSpec(((1, 0),) * leaves)
    return TreePattern((-1,) + (0,) * leaves, f"star:{leaves}", spec)


_ARM = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_pattern(text: str) -> TreePattern:
    """Parse ``broom:L,M``, ``multibroom:(L1,M1),...``, ``path:N`` or ``star:N``."""
    kind, _, body = text.strip().partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "broom":
            l, m = (int(x) for x in body.split(","))
            return make_broom(l, m)
        if kind == "multibroom":
            arms = _ARM.findall(body)
            if _ARM.sub("", body).replace(",", "").strip():
                raise ValueError(body)
            return make_multibroom([(int(l), int(m)) for l, m in arms])
        if kind == "path":
            return make_path(int(body))
        if kind == "star":
            return make_star(int(body))
    except ValueError as exc:
        raise ValueError(f"bad tree pattern {text!r}: {exc}") from None
    raise ValueError(f"unknown tree pattern kind in {text!r}")


@dataclass(frozen=True)
class DfsEnumeration:
    """A dfs-enumeration ``order`` of a tree plus the active-path data per prefix.

    ``attach[i]`` (for ``i >= 1``) is the 1-based position, on the active path
    of the prefix ``order[:i]``, of the neighbour of ``order[i]``.
    ``active_paths[i]`` is the root-to-``order[i]`` path of prefix ``i+1``.
    """

    order: tuple[int, ...]
    attach: tuple[int, ...]
    active_paths: tuple[tuple[int, ...], ...]


def dfs_enumeration(T: TreePattern, root: int | None = None) -> DfsEnumeration:
    """Depth-first enumeration of ``T``; children in decreasing subtree height."""
    if root is None:
        root = T.center
    height = _heights(T, root)
    order = []
    stack = [(root, -1)]
    while stack:
        u, par = stack.pop()
        order.append(u)
        kids = [v for v in T.neighbours[u] if v != par]
        kids.sort(key=lambda v: (-height[v], v))
        stack.extend((v, u) for v in reversed(kids))
    pos = {v: i for i, v in enumerate(order)}
    tparent = {root: -1}
    for u in order:
        for v in T.neighbours[u]:
            if v not in tparent:
                tparent[v] = u
    active = []
    attach = [0]
    path: list[int] = []
    for i, v in enumerate(order):
        if i:
            p = tparent[v]
            j = path.index(p)
            attach.append(j + 1)
            path = path[: j + 1]
        path = path + [v]
        active.append(tuple(path))
        assert all(pos[a] <= i for a in path)
    return DfsEnumeration(tuple(order), tuple(attach), tuple(active))


def _heights(T: TreePattern, root: int) -> list[int]:
    dist = T.distances_from(root)
    h = [0] * T.t
    for v in sorted(range(T.t), key=lambda v: -dist[v]):
        for u in T.neighbours[v]:
            if dist[u] == dist[v] - 1:
                h[u] = max(h[u], h[v] + 1)
    return h


def is_dfs_enumeration(T: TreePattern, order: Sequence[int]) -> bool:
    """Each ``order[i+1]`` has a neighbour on the tree path from ``order[0]`` to ``order[i]``."""
    if sorted(order) != list(range(T.t)):
        return False
    for i in range(1, len(order)):
        path = tree_path(T, order[0], order[i - 1])
        if not any(u in path for u in T.neighbours[order[i]]):
            return False
    return True


def tree_path(T: TreePattern, a: int, b: int) -> list[int]:
    prev = {a: -1}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        for v in T.neighbours[u]:
            if v not in prev:
                prev[v] = u
                queue.append(v)
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]
