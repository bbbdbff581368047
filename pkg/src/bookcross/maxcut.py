"""Exact maximum cut by branch and bound, and the 2-page crossing number of K_n.

Each node fixes the side of some vertices.  Fixed vertices are merged into a
single reference vertex, leaving a +-1 quadratic program on the free vertices
that is bounded by the Goemans-Williamson SDP strengthened with triangle
inequalities.  Node bounds are always rebuilt from multipliers and a
PSD-verified dual point, so the conic solver only has to be approximately
right for the proof to stand.
"""
from __future__ import annotations

import heapq
import logging
import math
import time
import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .circle_graph import ChordGraph, build_chord_graph
from .gw import maxcut_sdp, verified_dual_bound
from .pagecount import TwoPageDrawing, count_crossings, drawing_from_cut, small_complete_drawing

log = logging.getLogger(__name__)

ENUM_LIMIT = 16           # free vertices at or below this are enumerated
PATTERNS = np.array([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)])
ROOT = -1                 # stand-in for the merged fixed vertices inside cuts
PAIRS = ((0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class CutPartition:
    side: tuple[int, ...]
    value: int

    def bitstring(self) -> str:
        return "".join(str(s) for s in self.side)


@dataclass
class MaxcutResult:
    optimum: int
    witness: CutPartition
    upper_bound: int
    nodes_explored: int
    proof_status: str  # "exact" or "bound_only"
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "optimum": self.optimum,
            "upper_bound": self.upper_bound,
            "witness": self.witness.bitstring(),
            "nodes_explored": self.nodes_explored,
            "proof_status": self.proof_status,
            "seconds": round(self.seconds, 3),
        }


def cut_value(adj: np.ndarray, side) -> int:
    s = np.asarray(side, dtype=bool)
    return int(np.triu(adj & (s[:, None] != s[None, :]), 1).sum())


def _adjacency(g) -> np.ndarray:
    adj = g.adjacency if isinstance(g, ChordGraph) else np.asarray(g)
    adj = adj.astype(bool)
    if adj.shape[0] != adj.shape[1] or (adj != adj.T).any() or adj.diagonal().any():
        raise ValueError("adjacency must be symmetric with an empty diagonal")
    return adj


# -- node subproblem ------------------------------------------------------------

@dataclass(order=True)
class _Node:
    priority: float
    seq: int
    signs: np.ndarray = field(compare=False)     # +1 / -1 fixed, 0 free
    cuts: list = field(compare=False, default_factory=list)


def _subproblem(a: np.ndarray, signs: np.ndarray):
    """cut(x) = const + x^T M x over x in {+-1}^(1+k), x[0] = +1 the merged vertex."""
    fixed = np.flatnonzero(signs)
    free = np.flatnonzero(signs == 0)
    s = signs[fixed].astype(float)
    aff = a[np.ix_(fixed, fixed)]
    afr = a[np.ix_(fixed, free)]
    arr = a[np.ix_(free, free)]
    cut_ff = 0.25 * float((aff * (1 - np.outer(s, s))).sum())
    const = cut_ff + 0.5 * afr.sum() + 0.25 * arr.sum()
    k = free.size
    m = np.zeros((k + 1, k + 1))
    m[0, 1:] = m[1:, 0] = -0.25 * (s @ afr)
    m[1:, 1:] = -0.25 * arr
    return const, m, free


def _enumerate(const: float, m: np.ndarray) -> tuple[float, np.ndarray]:
    k = m.shape[0] - 1
    if k == 0:
        return const, np.zeros(0)
    bits = ((np.arange(2 ** k)[:, None] >> np.arange(k)[None, :]) & 1)
    x = 1.0 - 2.0 * bits
    vals = const + 2 * x @ m[0, 1:] + np.einsum("ij,jk,ik->i", x, m[1:, 1:], x)
    best = int(np.argmax(vals))
    return float(vals[best]), x[best]


_TRIPLES: dict[int, np.ndarray] = {}


def _triples(q: int) -> np.ndarray:
    if q not in _TRIPLES:
        _TRIPLES[q] = np.array(list(combinations(range(q), 3)), dtype=int).reshape(-1, 3)
    return _TRIPLES[q]


def _separate(x: np.ndarray, limit: int, tol: float = 1e-3) -> list[tuple]:
    t = _triples(x.shape[0])
    if t.size == 0:
        return []
    vals = np.stack([x[t[:, 0], t[:, 1]], x[t[:, 0], t[:, 2]], x[t[:, 1], t[:, 2]]], axis=1)
    slack = vals @ PATTERNS.T + 1.0  # (triples, 4)
    ti, pi = np.nonzero(slack < -tol)
    order = np.argsort(slack[ti, pi])[:limit]
    return [(*t[ti[o]], pi[o]) for o in order]


def _cut_matrix(cuts_local: list[tuple], q: int):
    import scipy.sparse as sp

    rows, cols, vals = [], [], []
    for r, (i, j, l, pat) in enumerate(cuts_local):
        for (u, v), c in zip(((i, j), (i, l), (j, l)), PATTERNS[pat]):
            # one coefficient per unordered pair, placed on (u, v) of vec(X) in column-major order
            rows.append(r)
            cols.append(u + v * q)
            vals.append(float(c))
    return sp.csr_matrix((vals, (rows, cols)), shape=(len(cuts_local), q * q))


def _relaxation(m: np.ndarray, cuts_local: list[tuple]):
    """Solve the SDP with triangle cuts; returns (X, multipliers)."""
    import cvxpy as cp

    q = m.shape[0]
    x = cp.Variable((q, q), PSD=True)
    cons = [cp.diag(x) == 1]
    if cuts_local:
        cons.append(_cut_matrix(cuts_local, q) @ cp.vec(x, order="F") >= -1)
    prob = cp.Problem(cp.Maximize(cp.sum(cp.multiply(m, x))), cons)
    with warnings.catch_warnings():
        # an inaccurate solve only weakens the bound, which is rebuilt rigorously anyway
        warnings.simplefilter("ignore", UserWarning)
        prob.solve(solver="CLARABEL")
    xv = x.value
    if xv is None:
        raise RuntimeError(f"relaxation failed: {prob.status}")
    mu = np.zeros(len(cuts_local))
    if cuts_local and cons[1].dual_value is not None:
        mu = np.maximum(np.asarray(cons[1].dual_value, dtype=float).ravel(), 0.0)
    return (xv + xv.T) / 2, mu


def _lagrangian_bound(m: np.ndarray, cuts_local: list[tuple], mu: np.ndarray) -> float:
    """sum(mu) + max over the elliptope of <M + sum mu_T S_T, X>, via a verified dual point."""
    c = m.copy()
    for (i, j, l, pat), w in zip(cuts_local, mu):
        if w <= 0:
            continue
        for (u, v), s in zip(((i, j), (i, l), (j, l)), PATTERNS[pat]):
            c[u, v] += 0.5 * w * s
            c[v, u] += 0.5 * w * s
    _, y, _ = maxcut_sdp(c)
    bound, _ = verified_dual_bound(c, y)
    return float(mu.sum()) + bound


def _floor(ub: float):
    """Largest integer cut value an upper bound allows."""
    return ub if ub == math.inf else math.floor(ub + 1e-9)


class _Search:
    def __init__(self, adj, order, rng, max_rounds, cuts_per_round):
        self.a = adj.astype(float)
        self.adj = adj
        self.order = order
        self.rng = rng
        self.max_rounds = max_rounds
        self.cuts_per_round = cuts_per_round
        self.best_value = -1
        self.best_side = None

    # incumbents ------------------------------------------------------------
    def offer(self, side: np.ndarray):
        side = self._local_search(side.astype(bool))
        v = cut_value(self.adj, side)
        if v > self.best_value:
            self.best_value, self.best_side = v, side.copy()
            log.debug("incumbent %d", v)

    def _local_search(self, side: np.ndarray) -> np.ndarray:
        side = side.copy()
        a = self.a
        while True:
            spin = np.where(side, 1.0, -1.0)
            # gain of flipping v = same-side neighbours - opposite-side neighbours
            gain = spin * (a @ spin)
            v = int(np.argmax(gain))
            if gain[v] <= 0:
                return side
            side[v] = ~side[v]

    def warm_start(self, tries: int = 32):
        p = self.adj.shape[0]
        for _ in range(tries):
            self.offer(self.rng.random(p) < 0.5)

    def round_hyperplanes(self, x: np.ndarray, signs: np.ndarray, free: np.ndarray, tries: int = 8):
        ev, vec = np.linalg.eigh(x)
        v = vec * np.sqrt(np.clip(ev, 0, None))
        for _ in range(tries):
            r = np.sign(v @ self.rng.standard_normal(v.shape[1]))
            r[r == 0] = 1
            r *= r[0]
            spins = signs.astype(float).copy()
            spins[free] = r[1:]
            self.offer(spins > 0)

    # bounds -----------------------------------------------------------------
    def bound(self, node: _Node, const: float, m: np.ndarray, free: np.ndarray) -> tuple[float, list]:
        """Upper bound for the node; returns (bound, cuts to hand to children)."""
        _, y, _ = maxcut_sdp(m)
        ub, _ = verified_dual_bound(m, y)
        ub += const
        if _floor(ub) <= self.best_value:
            return ub, []
        local = {int(v): k + 1 for k, v in enumerate(free)}
        local[ROOT] = 0
        glob = np.concatenate([[ROOT], free])
        cuts = [(local[i], local[j], local[l], pat) for i, j, l, pat in node.cuts]
        x = None
        for rnd in range(self.max_rounds):
            x, mu = _relaxation(m, cuts)
            ub = min(ub, const + _lagrangian_bound(m, cuts, mu))
            self.round_hyperplanes(x, node.signs, free)
            if _floor(ub) <= self.best_value:
                break
            have = set(cuts)
            new = [c for c in _separate(x, self.cuts_per_round) if c not in have]
            if not new:
                break
            active = [c for c, w in zip(cuts, mu) if w > 1e-7]
            cuts = active + new
            log.debug("round %d: bound %.4f, %d cuts", rnd, ub, len(cuts))
        keep = [(int(glob[i]), int(glob[j]), int(glob[l]), pat) for i, j, l, pat in cuts]
        return ub, keep


def _child_cuts(cuts: list, v: int, sign: int) -> list:
    """Rewrite cuts after fixing vertex v, i.e. substituting x_v = sign * x_root."""
    out = []
    for i, j, l, pat in cuts:
        ids = (i, j, l)
        if v not in ids:
            out.append((i, j, l, pat))
            continue
        if ROOT in ids:
            continue  # would constrain a single fixed entry
        coef = {}
        for (a, b), c in zip(PAIRS, PATTERNS[pat]):
            u, w = ids[a], ids[b]
            if v in (u, w):
                c *= sign
            coef[frozenset((ROOT if u == v else u, ROOT if w == v else w))] = c
        new_ids = sorted(ROOT if u == v else u for u in ids)
        row = [coef[frozenset((new_ids[a], new_ids[b]))] for a, b in PAIRS]
        out.append((*new_ids, int(np.flatnonzero((PATTERNS == row).all(axis=1))[0])))
    return out


def maxcut_exact(g, max_nodes: int | None = None, max_seconds: float | None = None,
                 seed: int = 0, max_rounds: int = 25, cuts_per_round: int | None = None,
                 enum_limit: int = ENUM_LIMIT) -> MaxcutResult:
    """Maximum cut of ``g`` (a ChordGraph or boolean adjacency matrix).

    Budget exhaustion is reported through ``proof_status="bound_only"``.
    """
    t0 = time.monotonic()
    adj = _adjacency(g)
    p = adj.shape[0]
    if p == 0:
        return MaxcutResult(0, CutPartition((), 0), 0, 1, "exact", 0.0)
    deg = adj.sum(axis=1)
    order = sorted(range(p), key=lambda v: (-deg[v], v))
    search = _Search(adj, order, np.random.default_rng(seed), max_rounds,
                     cuts_per_round or max(2 * p, 50))
    search.warm_start()

    signs = np.zeros(p, dtype=int)
    signs[order[0]] = 1  # complementing a cut does not change its value
    heap = [_Node(-math.inf, 0, signs)]
    seq, nodes, open_bound = 1, 0, None
    while heap:
        if (max_nodes is not None and nodes >= max_nodes) or \
                (max_seconds is not None and time.monotonic() - t0 > max_seconds):
            open_bound = max(_floor(-heap[0].priority), search.best_value)
            if open_bound == math.inf:
                open_bound = int(np.triu(adj, 1).sum())
            break
        node = heapq.heappop(heap)
        if _floor(-node.priority) <= search.best_value:
            continue
        nodes += 1
        const, m, free = _subproblem(search.a, node.signs)
        if free.size <= enum_limit:
            val, x = _enumerate(const, m)
            spins = node.signs.astype(float)
            spins[free] = x
            search.offer(spins > 0)
            continue
        ub, cuts = search.bound(node, const, m, free)
        log.info("node %d: %d free, bound %.4f, incumbent %d, open %d",
                 nodes, free.size, ub, search.best_value, len(heap))
        if _floor(ub) <= search.best_value:
            continue
        v = next(u for u in order if node.signs[u] == 0)
        for sgn in (1, -1):
            child = node.signs.copy()
            child[v] = sgn
            heapq.heappush(heap, _Node(-ub, seq, child, _child_cuts(cuts, v, sgn)))
            seq += 1

    side = tuple(int(b) for b in search.best_side)
    witness = CutPartition(side, search.best_value)
    status = "exact" if open_bound is None else "bound_only"
    upper = search.best_value if open_bound is None else open_bound
    return MaxcutResult(search.best_value, witness, upper, nodes, status, time.monotonic() - t0)


# -- crossing numbers ------------------------------------------------------------------

@dataclass
class Nu2Result:
    n: int
    value: int
    drawing: TwoPageDrawing
    maxcut: MaxcutResult | None
    proof_status: str

    @property
    def lower_bound(self) -> int:
        """Proven lower bound; equals ``value`` when the max cut was solved exactly."""
        if self.maxcut is None:
            return self.value
        return math.comb(self.n, 4) - self.maxcut.upper_bound


def nu2_complete_exact(n: int, max_nodes: int | None = None, max_seconds: float | None = None,
                       seed: int = 0) -> Nu2Result:
    """2-page crossing number of K_n from maxcut(G_n), with a witness drawing.

    ``value`` always equals the crossings of ``drawing``; when the search
    runs out of budget it is only an upper bound and ``lower_bound`` is the
    proven one.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if n < 4:
        return Nu2Result(n, 0, small_complete_drawing(n), None, "exact")
    g = build_chord_graph(n)
    res = maxcut_exact(g, max_nodes=max_nodes, max_seconds=max_seconds, seed=seed)
    drawing = drawing_from_cut(n, res.witness.side, g)
    value = count_crossings(drawing)
    if value != math.comb(n, 4) - res.optimum:
        raise AssertionError("witness drawing disagrees with the cut value")
    return Nu2Result(n, value, drawing, res, res.proof_status)


def odd_to_even_step(nu_odd: int, n_odd: int) -> int:
    """Lower bound on nu2(K_{n+1}) from one on nu2(K_n): each crossing survives n-3 deletions."""
    if n_odd % 2 == 0 or n_odd < 5:
        raise ValueError(f"n_odd must be odd and >= 5, got {n_odd}")
    num, den = (n_odd + 1) * nu_odd, n_odd - 3
    return -(-num // den)
