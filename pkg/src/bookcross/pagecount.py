"""2-page drawings in the spine model: crossing counts, witnesses, red-vertex types.

The circular model is the spine model with the circle cut open at one point,
so only the spine model is represented.  Two edges on the same page cross
exactly when their endpoints alternate along the spine.
"""
from __future__ import annotations

import json
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .circle_graph import ChordGraph, build_chord_graph, zeta_bipartite

PAGES = ("upper", "lower")


@dataclass(frozen=True)
class TwoPageDrawing:
    spine: tuple
    edges: tuple  # of (u, v, page)

    def __post_init__(self):
        if len(set(self.spine)) != len(self.spine):
            raise ValueError("spine repeats a vertex")
        pos = set(self.spine)
        for u, v, page in self.edges:
            if page not in PAGES:
                raise ValueError(f"unknown page {page!r}")
            if u not in pos or v not in pos:
                raise ValueError(f"edge {u}-{v} has an endpoint off the spine")
            if u == v:
                raise ValueError("loops are not allowed")

    @classmethod
    def make(cls, spine: Iterable[Hashable], edges: Iterable[tuple]) -> "TwoPageDrawing":
        return cls(tuple(spine), tuple((u, v, p) for u, v, p in edges))

    def positions(self) -> dict:
        return {v: k for k, v in enumerate(self.spine)}

    def reversed(self) -> "TwoPageDrawing":
        return TwoPageDrawing(self.spine[::-1], self.edges)

    def pages_swapped(self) -> "TwoPageDrawing":
        flip = {"upper": "lower", "lower": "upper"}
        return TwoPageDrawing(self.spine, tuple((u, v, flip[p]) for u, v, p in self.edges))

    def rotated(self, k: int) -> "TwoPageDrawing":
        """Cut the circular model at a different point."""
        k %= max(len(self.spine), 1)
        return TwoPageDrawing(self.spine[k:] + self.spine[:k], self.edges)

    def to_json(self) -> str:
        return json.dumps({"spine": list(self.spine),
                           "edges": [[u, v, p] for u, v, p in self.edges]})

    @classmethod
    def from_json(cls, text: str) -> "TwoPageDrawing":
        obj = json.loads(text)
        return cls.make(obj["spine"], (tuple(e) for e in obj["edges"]))


def _intervals(d: TwoPageDrawing, edges) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    pos = d.positions()
    e = [(pos[u], pos[v], p == "upper") for u, v, p in edges]
    if not e:
        z = np.zeros(0, dtype=int)
        return z, z, np.zeros(0, dtype=bool)
    arr = np.array([(min(a, b), max(a, b), up) for a, b, up in e], dtype=int)
    return arr[:, 0], arr[:, 1], arr[:, 2].astype(bool)


def _cross_matrix(l1, r1, u1, l2, r2, u2) -> np.ndarray:
    same = u1[:, None] == u2[None, :]
    a, b = l1[:, None], r1[:, None]
    c, e = l2[None, :], r2[None, :]
    alt = ((a < c) & (c < b) & (b < e)) | ((c < a) & (a < e) & (e < b))
    return same & alt


def count_crossings(d: TwoPageDrawing) -> int:
    l, r, up = _intervals(d, d.edges)
    return int(np.triu(_cross_matrix(l, r, up, l, r, up), 1).sum())


def crossings_between(d: TwoPageDrawing, edges1, edges2) -> int:
    """Crossings with one edge from each of two disjoint edge sets."""
    a = _intervals(d, edges1)
    b = _intervals(d, edges2)
    return int(_cross_matrix(*a, *b).sum())


def star(d: TwoPageDrawing, v) -> list[tuple]:
    return [e for e in d.edges if v in (e[0], e[1])]


# -- K_n from a cut of G_n ---------------------------------------------------

def drawing_from_cut(n: int, cut: Sequence[int], graph: ChordGraph | None = None) -> TwoPageDrawing:
    """K_n on spine 0..n-1; chord k goes upper when cut[k] is truthy.

    Cycle edges (including 0--(n-1)) never cross anything and go upper.
    """
    g = graph if graph is not None else build_chord_graph(n)
    if len(cut) != g.num_vertices:
        raise ValueError(f"cut has {len(cut)} sides for {g.num_vertices} chords")
    edges = [(i, (i + 1) % n, "upper") for i in range(n)]
    edges[-1] = (0, n - 1, "upper")
    edges += [(c.a, c.b, "upper" if side else "lower") for c, side in zip(g.chords, cut)]
    return TwoPageDrawing(tuple(range(n)), tuple(edges))


def small_complete_drawing(n: int) -> TwoPageDrawing:
    """Crossing-free 2-page drawing of K_n for n <= 4."""
    if n > 4:
        raise ValueError("K_n is 2-page planar only for n <= 4")
    edges = [(u, v, "upper") for u in range(n) for v in range(u + 1, n)]
    if n == 4:
        edges = [(u, v, "lower" if (u, v) == (1, 3) else "upper") for u, v, _ in edges]
    return TwoPageDrawing(tuple(range(n)), tuple(edges))


# -- K_{m,n} -----------------------------------------------------------------

def blue(i: int) -> str:
    return f"b{i}"


def red(j: int) -> str:
    return f"r{j}"


def zarankiewicz_drawing(m: int, n: int) -> TwoPageDrawing:
    """A 2-page drawing of K_{m,n} with exactly Z(m, n) crossings.

    Blue vertices are split into a left block A (ceil(m/2)) and a right block B.
    The spine reads A, ceil(n/2) reds, B, floor(n/2) reds.  Reds between A and B
    send their A-edges up and their B-edges down; reds after B do the opposite.
    Two reds of the same group cross C(|A|,2) + C(|B|,2) = floor(m/2)floor((m-1)/2)
    times and reds of different groups never cross.
    """
    if m < 1 or n < 1:
        raise ValueError("need m, n >= 1")
    a = (m + 1) // 2
    left, right = [blue(i) for i in range(a)], [blue(i) for i in range(a, m)]
    n1 = (n + 1) // 2
    mid, tail = [red(j) for j in range(n1)], [red(j) for j in range(n1, n)]
    spine = left + mid + right + tail
    edges = []
    for r in mid:
        edges += [(b, r, "upper") for b in left] + [(b, r, "lower") for b in right]
    for r in tail:
        edges += [(b, r, "lower") for b in left] + [(b, r, "upper") for b in right]
    d = TwoPageDrawing(tuple(spine), tuple(edges))
    got, want = count_crossings(d), zeta_bipartite(m, n)
    if got != want:
        raise AssertionError(f"Zarankiewicz layout for K_{m},{n} has {got} crossings, expected {want}")
    return d


@dataclass(frozen=True, order=True)
class RedType:
    """Position p (0-based: reds right of b_p, left of b_{p+1}) and upper set U."""

    p: int
    U: frozenset

    @classmethod
    def one_based(cls, p: int, U: Iterable[int]) -> "RedType":
        return cls(p - 1, frozenset(u - 1 for u in U))

    def as_one_based(self) -> tuple[int, tuple[int, ...]]:
        return self.p + 1, tuple(sorted(u + 1 for u in self.U))

    def key(self) -> tuple:
        return self.p, tuple(sorted(self.U))


def normalize(d: TwoPageDrawing, blues: Iterable) -> TwoPageDrawing:
    """Move reds that precede the first blue vertex to the right end.

    This is a rotation of the circular model, so crossings are unchanged.
    """
    blues = set(blues)
    first = next(k for k, v in enumerate(d.spine) if v in blues)
    return d.rotated(first)


def extract_types(d: TwoPageDrawing, blues: Iterable) -> dict:
    """Type of every red vertex of a 2-page drawing of K_{m,n}.

    Blue vertices are indexed 0..m-1 in spine order after normalisation.
    Returns ``{red_label: RedType}`` in spine order.
    """
    blues = list(blues)
    bset = set(blues)
    if len(bset) != len(blues):
        raise ValueError("repeated blue label")
    if not bset <= set(d.spine):
        raise ValueError("a blue vertex is missing from the spine")
    d = normalize(d, bset)
    bidx, reds, count = {}, {}, 0
    for v in d.spine:
        if v in bset:
            bidx[v] = count
            count += 1
        else:
            reds[v] = count - 1
    m = len(blues)
    upper = {r: set() for r in reds}
    seen = {r: set() for r in reds}
    for u, v, page in d.edges:
        if (u in bset) == (v in bset):
            raise ValueError(f"edge {u}-{v} is not blue-red")
        b, r = (u, v) if u in bset else (v, u)
        if bidx[b] in seen[r]:
            raise ValueError(f"duplicate edge {b}-{r}")
        seen[r].add(bidx[b])
        if page == "upper":
            upper[r].add(bidx[b])
    for r, s in seen.items():
        if len(s) != m:
            raise ValueError(f"red vertex {r} is not joined to every blue vertex")
    return {r: RedType(reds[r], frozenset(upper[r])) for r in reds}
