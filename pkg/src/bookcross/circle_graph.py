"""Chord-intersection graphs of the n-cycle and the Zarankiewicz/Harary-Hill counts.

Vertices of the n-cycle are labelled 0..n-1.  A chord joins two vertices at
cyclic distance at least 2; two chords are adjacent when they interleave
around the circle.  Drawing a chord inside or outside the circle is the same
as choosing one of the two pages, so crossing pairs of a 2-page drawing of
K_n are exactly the uncut edges of this graph.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np


@dataclass(frozen=True, order=True)
class Chord:
    a: int
    b: int
    dist: int

    @classmethod
    def between(cls, u: int, v: int, n: int) -> "Chord":
        if u == v:
            raise ValueError("a chord needs two distinct endpoints")
        a, b = sorted((u % n, v % n))
        dist = min(b - a, n - (b - a))
        if dist < 2:
            raise ValueError(f"{u} and {v} are adjacent on the {n}-cycle")
        return cls(a, b, dist)


def chords_cross(c1: Chord, c2: Chord, n: int | None = None) -> bool:
    """True iff the chords interleave; chords sharing an endpoint never cross.

    ``n`` is accepted for symmetry with the other cycle helpers; interleaving
    of labels in 0..n-1 does not depend on it.
    """
    a, b = c1.a, c1.b
    if len({a, b, c2.a, c2.b}) < 4:
        return False
    return (a < c2.a < b) != (a < c2.b < b)


@dataclass(frozen=True)
class ChordGraph:
    """The graph G_n.  Chords are ordered by (dist, a)."""

    n: int
    chords: tuple[Chord, ...]
    adjacency: np.ndarray = field(repr=False)

    @property
    def num_vertices(self) -> int:
        return len(self.chords)

    @property
    def orbit_of(self) -> list[int]:
        """Distance class (= dihedral orbit label) of each chord."""
        return [c.dist for c in self.chords]

    @property
    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    @property
    def num_edges(self) -> int:
        return int(np.triu(self.adjacency, 1).sum())

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def laplacian(self) -> np.ndarray:
        a = self.adjacency.astype(float)
        return np.diag(a.sum(axis=1)) - a

    def to_edge_list(self) -> str:
        """Plain-text edge list: header ``p maxcut V E`` then one ``u v`` per line."""
        edges = self.edges
        lines = [f"p maxcut {self.num_vertices} {len(edges)}"]
        lines += [f"{u} {v}" for u, v in edges]
        return "\n".join(lines) + "\n"


def build_chord_graph(n: int) -> ChordGraph:
    if n < 4:
        raise ValueError(f"G_n needs n >= 4, got {n}")
    chords = sorted(
        (Chord.between(a, b, n) for a, b in combinations(range(n), 2)
         if min(b - a, n - b + a) >= 2),
        key=lambda c: (c.dist, c.a),
    )
    p = len(chords)
    adj = np.zeros((p, p), dtype=bool)
    for i, j in combinations(range(p), 2):
        if chords_cross(chords[i], chords[j]):
            adj[i, j] = adj[j, i] = True
    return ChordGraph(n, tuple(chords), adj)


def chord_valency(i: int, n: int) -> int:
    """Degree in G_n of a chord at cyclic distance ``i``.

    A crossing chord takes one endpoint strictly on each side, giving
    (i-1)(n-i-1).  For odd n = 2d+1 this is i(i-1) + 2(i-1)(d-i); for even n
    that closed form overcounts by i-1.
    """
    return (i - 1) * (n - i - 1)


def read_edge_list(text: str) -> np.ndarray:
    """Inverse of :meth:`ChordGraph.to_edge_list`; returns a boolean adjacency."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    head = lines[0]
    if head[:2] != ["p", "maxcut"]:
        raise ValueError("missing 'p maxcut' header")
    nv, ne = int(head[2]), int(head[3])
    adj = np.zeros((nv, nv), dtype=bool)
    for u, v in lines[1:]:
        adj[int(u), int(v)] = adj[int(v), int(u)] = True
    if len(lines) - 1 != ne:
        raise ValueError(f"header promises {ne} edges, found {len(lines) - 1}")
    return adj


def _floor_product(*xs: int) -> int:
    return math.prod(x // 2 for x in xs)


def zeta_complete(n: int) -> int:
    """Z(n), the conjectured (2-page) crossing number of K_n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    num = _floor_product(n, n - 1, n - 2, n - 3)
    if n < 4:
        return 0
    assert num % 4 == 0
    return num // 4


def zeta_bipartite(m: int, n: int) -> int:
    """Z(m, n), the conjectured (2-page) crossing number of K_{m,n}."""
    if m < 0 or n < 0:
        raise ValueError("m and n must be non-negative")
    if m < 2 or n < 2:
        return 0
    return _floor_product(n, n - 1, m, m - 1)
