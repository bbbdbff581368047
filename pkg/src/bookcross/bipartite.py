"""Red-vertex types of K_{m,n}, the forced-crossing matrix Q and its SDP lower bound.

For a 2-page drawing of K_{m,n}, the star crossings between two red vertices
are bounded below by Q[type(r), type(r')].  Averaging over all red pairs gives

    nu2(K_{m,n}) >= (n^2/2) min_{x in simplex} x^T Q x - m(m-1)n/4,

and the doubly-nonnegative relaxation of the quadratic program
(max t s.t. Q - tJ = PSD + nonnegative) is certified here.  For odd m the
flip/shift symmetry makes Q block circulant with 2m x 2m blocks, which
splits the PSD condition into 2m Hermitian blocks of size 2^(m-1).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .hermitian import dft_blocks, min_eig_blocks, psd_report
from .pagecount import RedType

log = logging.getLogger(__name__)

MAX_M = 9
DENSE_LIMIT = 200


# -- types and the symmetry group ------------------------------------------------------

def flip(t: RedType, m: int) -> RedType:
    return RedType(t.p, frozenset(range(m)) - t.U)


def shift(t: RedType, m: int) -> RedType:
    return RedType((t.p + 1) % m, frozenset((u + 1) % m for u in t.U))


def generator(t: RedType, m: int) -> RedType:
    """flip o shift; generates the whole group when m is odd."""
    return flip(shift(t, m), m)


@dataclass
class TypeTable:
    m: int
    types: list[RedType]
    index: dict
    orbits: list[list[int]]  # odd m: consecutive generator powers of the orbit minimum

    @property
    def cyclic(self) -> bool:
        return self.m % 2 == 1

    def __len__(self) -> int:
        return len(self.types)


def build_type_table(m: int) -> TypeTable:
    if not 2 <= m <= MAX_M:
        raise ValueError(f"m must lie in 2..{MAX_M}, got {m}")
    types = sorted(
        (RedType(p, frozenset(u)) for p in range(m) for r in range(m + 1)
         for u in combinations(range(m), r)),
        key=RedType.key,
    )
    index = {t: k for k, t in enumerate(types)}
    seen: set[RedType] = set()
    orbits = []
    for t in types:  # sorted order, so the first unseen type is its orbit's minimum
        if t in seen:
            continue
        if m % 2:
            orb = [t]
            nxt = generator(t, m)
            while nxt != t:
                orb.append(nxt)
                nxt = generator(nxt, m)
        else:
            orb, stack = {t}, [t]
            while stack:
                s = stack.pop()
                for nb in (flip(s, m), shift(s, m)):
                    if nb not in orb:
                        orb.add(nb)
                        stack.append(nb)
            orb = sorted(orb, key=RedType.key)
        seen.update(orb)
        orbits.append([index[s] for s in orb])
    return TypeTable(m, types, index, orbits)


# -- the bracket and Q ---------------------------------------------------------------

def _alternates(p: int, q: int, i: int, j: int) -> bool:
    """Edges r-b_i and r'-b_j alternate when r (position p) lies left of r' (position q)."""
    return (i < j <= p) or (j <= p and q < i) or (i < j and q < i) or (p < j < i <= q)


def pair_count(sigma: RedType, tau: RedType, m: int) -> int:
    """[sigma, tau]: same-page alternating pairs (i, j), red of type sigma on the left."""
    return sum(
        1
        for i in range(m) for j in range(m)
        if ((i in sigma.U) == (j in tau.U)) and _alternates(sigma.p, tau.p, i, j)
    )


@dataclass
class QMatrix:
    m: int
    entries: np.ndarray
    table: TypeTable
    orbit_rows: np.ndarray | None = None  # (B, B, 2m) first rows, odd m only

    def to_csv(self) -> str:
        header = ",".join(["type"] + [_label(t) for t in self.table.types])
        lines = [header]
        for t, row in zip(self.table.types, self.entries):
            lines.append(",".join([_label(t)] + [str(int(v)) for v in row]))
        return "\n".join(lines) + "\n"


def _label(t: RedType) -> str:
    return f"{t.p}|{''.join(str(u) for u in sorted(t.U))}"


def bracket_matrix(tt: TypeTable) -> np.ndarray:
    """B[s, t] = [types[s], types[t]] for every ordered pair."""
    m = tt.m
    pos = np.array([t.p for t in tt.types])
    up = np.array([[u in t.U for u in range(m)] for t in tt.types], dtype=np.int64)
    lo = 1 - up
    cond = np.array([[[[_alternates(p, q, i, j) for j in range(m)] for i in range(m)]
                      for q in range(m)] for p in range(m)], dtype=np.int64)
    out = np.zeros((len(tt), len(tt)), dtype=np.int64)
    groups = [np.flatnonzero(pos == p) for p in range(m)]
    for p, rows in enumerate(groups):
        for q, cols in enumerate(groups):
            c = cond[p, q]
            out[np.ix_(rows, cols)] = up[rows] @ c @ up[cols].T + lo[rows] @ c @ lo[cols].T
    return out


def build_q_matrix(tt: TypeTable) -> QMatrix:
    b = bracket_matrix(tt)
    pos = np.array([t.p for t in tt.types])
    left = pos[:, None] < pos[None, :]
    right = pos[:, None] > pos[None, :]
    q = np.where(left, b, np.where(right, b.T, np.minimum(b, b.T)))
    rows = None
    if tt.cyclic:
        reps = [orb[0] for orb in tt.orbits]
        rows = np.array([[[q[ri, orb_j[k]] for k in range(2 * tt.m)]
                          for orb_j in tt.orbits] for ri in reps], dtype=np.int64)
    return QMatrix(tt.m, q, tt, rows)


def orbit_permutation(tt: TypeTable) -> list[int]:
    """Type indices listed orbit by orbit, which makes Q block circulant for odd m."""
    return [k for orb in tt.orbits for k in orb]


def qp_objective(x, q: QMatrix) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (q.entries.shape[0],):
        raise ValueError(f"x must have length {q.entries.shape[0]}")
    if (x < -1e-12).any() or abs(x.sum() - 1.0) > 1e-12:
        raise ValueError("x is not a point of the standard simplex")
    return float(x @ q.entries @ x)


def type_distribution(types, tt: TypeTable) -> np.ndarray:
    """Empirical frequency vector of a collection of red types."""
    x = np.zeros(len(tt))
    for t in types:
        x[tt.index[t]] += 1
    return x / x.sum()


# -- SDP bound -------------------------------------------------------------------------

@dataclass
class ZarCertificate:
    """Q - tJ = S1 + S2 with S1 PSD and S2 >= 0.

    Odd-m certificates give S1 by its circulant first rows ``x_blocks`` (shape
    (B, B, 2m)); dense certificates give S1 in full.
    """

    m: int
    t: float
    x_blocks: np.ndarray | None = None
    s1: np.ndarray | None = None
    margin: float = 0.0
    converged: bool = True
    path: str = "reduced"


def _round_down(v: Fraction) -> float:
    f = float(v)
    if Fraction(f) > v:
        f = math.nextafter(f, -math.inf)
    return f


def _exact_min_gap(q: np.ndarray, x: np.ndarray) -> Fraction:
    """min over entries of q - x, exactly."""
    qf, xf = q.ravel(), x.ravel()
    # locate candidates in floating point, then settle them exactly
    diff = qf - xf
    cand = np.flatnonzero(diff <= diff.min() + 1e-6 * (1 + abs(diff.min())))
    return min(Fraction(int(qf[k])) - Fraction(float(xf[k])) for k in cand)


def complete_blocks(upper: np.ndarray) -> np.ndarray:
    """Fill x^(j,i) from x^(i,j) (reversed index) and symmetrise diagonal rows."""
    x = np.array(upper, dtype=float)
    b, _, k = x.shape
    rev = (-np.arange(k)) % k
    for i in range(b):
        x[i, i] = (x[i, i] + x[i, i][rev]) / 2
        for j in range(i + 1, b):
            x[j, i] = x[i, j][rev]
    return x


def _solver_opts(solver: str, accuracy: float) -> dict:
    if solver == "SCS":
        return {"eps": accuracy, "max_iters": 500000}
    return {}


def _solve_reduced(q: QMatrix, accuracy: float, solver: str) -> tuple[float, np.ndarray, str]:
    import cvxpy as cp
    import scipy.sparse as sp

    m = q.m
    rows = q.orbit_rows
    b, k = rows.shape[0], 2 * m
    pairs = [(i, j) for i in range(b) for j in range(i, b)]
    diag = [r for r, (i, j) in enumerate(pairs) if i == j]
    qp = np.array([rows[i, j] for i, j in pairs], dtype=float)

    t = cp.Variable()
    xv = cp.Variable((len(pairs), k))
    cons = [qp - t - xv >= 0]
    mid = list(range(1, m))
    cons.append(xv[diag][:, mid] == xv[diag][:, [k - c for c in mid]])
    # scatter pair values into a B x B matrix: (i, j) directly, (j, i) conjugated
    up = sp.csr_matrix(([1.0] * len(pairs), ([i + j * b for i, j in pairs], range(len(pairs)))),
                       shape=(b * b, len(pairs)))
    off = [(r, i, j) for r, (i, j) in enumerate(pairs) if i < j]
    lo = sp.csr_matrix(([1.0] * len(off), ([j + i * b for _, i, j in off], [r for r, _, _ in off])),
                       shape=(b * b, len(pairs)))
    for f in range(m + 1):
        w = np.exp(-1j * np.pi * f * np.arange(k) / m)
        vals = xv @ w
        mat = cp.reshape(up @ vals + lo @ cp.conj(vals), (b, b), order="F")
        cons.append(mat >> 0)
    prob = cp.Problem(cp.Maximize(t), cons)
    prob.solve(solver=solver, **_solver_opts(solver, accuracy))
    if xv.value is None:
        raise RuntimeError(f"reduced SDP failed: {prob.status}")
    upper = np.zeros((b, b, k))
    for r, (i, j) in enumerate(pairs):
        upper[i, j] = xv.value[r]
    return float(t.value), complete_blocks(upper), prob.status


def _solve_dense(q: QMatrix, accuracy: float, solver: str) -> tuple[float, np.ndarray, str]:
    import cvxpy as cp

    n = q.entries.shape[0]
    t = cp.Variable()
    s = cp.Variable((n, n), PSD=True)
    prob = cp.Problem(cp.Maximize(t), [q.entries - t * np.ones((n, n)) - s >= 0])
    prob.solve(solver=solver, **_solver_opts(solver, accuracy))
    if s.value is None:
        raise RuntimeError(f"dense SDP failed: {prob.status}")
    return float(t.value), (s.value + s.value.T) / 2, prob.status


def sdp_bound_solve(q: QMatrix, accuracy: float = 1e-8, path: str = "auto",
                    solver: str | None = None) -> ZarCertificate:
    """Certified lower bound t on the SDP relaxation of min x^T Q x over the simplex.

    The solver output is repaired before it is returned: the PSD part is
    shifted by its eigenvalue deficit and t is lowered to the exact minimum
    entry of Q - S1, so the certificate verifies regardless of solver accuracy.
    """
    m = q.m
    if path == "auto":
        path = "reduced" if m % 2 else "dense"
    n = q.entries.shape[0]
    if path == "reduced":
        if m % 2 == 0:
            raise ValueError("the reduced formulation needs odd m")
        solver = solver or ("CLARABEL" if m <= 5 else "SCS")
        raw_t, x, status = _solve_reduced(q, accuracy, solver)
        freq = dft_blocks(x)
        rep = min_eig_blocks(freq)
        delta = max(0.0, -rep.min_eigenvalue) + 2 * rep.tol
        for i in range(x.shape[0]):
            x[i, i, 0] += delta
        t = _round_down(_exact_min_gap(q.orbit_rows, x))
        margin = min_eig_blocks(dft_blocks(x)).min_eigenvalue
        cert = ZarCertificate(m, t, x_blocks=x, margin=margin, path=path)
    elif path == "dense":
        if n > DENSE_LIMIT:
            raise ValueError(f"dense path limited to {DENSE_LIMIT} types, m={m} has {n}")
        solver = solver or ("CLARABEL" if n <= 64 else "SCS")
        raw_t, s, status = _solve_dense(q, accuracy, solver)
        rep = psd_report(s)
        s = s + (max(0.0, -rep.min_eigenvalue) + 2 * rep.tol) * np.eye(n)
        t = _round_down(_exact_min_gap(q.entries, s))
        cert = ZarCertificate(m, t, s1=s, margin=psd_report(s).min_eigenvalue, path=path)
    else:
        raise ValueError(f"unknown path {path!r}")
    cert.converged = status == "optimal"
    log.info("m=%d %s: solver t=%.10f (%s), certified t=%.10f", m, path, raw_t, status, t)
    return cert


@dataclass(frozen=True)
class ZarVerification:
    valid: bool
    reason: str
    certified_t: Fraction | None = None
    margin: float | None = None


def verify_zar_certificate(c: ZarCertificate, q: QMatrix) -> ZarVerification:
    """Exact elementwise checks plus PSD margins; returns the certified t."""
    if c.m != q.m:
        return ZarVerification(False, f"certificate is for m={c.m}, Q for m={q.m}")
    if not math.isfinite(c.t):
        return ZarVerification(False, "t is not finite")
    t = Fraction(c.t)
    if c.x_blocks is not None:
        if q.orbit_rows is None:
            return ZarVerification(False, "block certificate needs odd m")
        x = np.asarray(c.x_blocks, dtype=float)
        if x.shape != q.orbit_rows.shape:
            return ZarVerification(False, f"x_blocks shape {x.shape}, expected {q.orbit_rows.shape}")
        if not np.isfinite(x).all():
            return ZarVerification(False, "x_blocks contains non-finite entries")
        k = x.shape[2]
        rev = (-np.arange(k)) % k
        for i in range(x.shape[0]):
            if not np.array_equal(x[i, i], x[i, i][rev]):
                return ZarVerification(False, f"palindrome condition fails on diagonal block {i}")
        if not np.array_equal(x, np.swapaxes(x, 0, 1)[:, :, rev]):
            return ZarVerification(False, "x^(j,i) is not the reversal of x^(i,j)")
        gap = _exact_min_gap(q.orbit_rows, x)
        blocks = dft_blocks(x)
    elif c.s1 is not None:
        s = np.asarray(c.s1, dtype=float)
        n = q.entries.shape[0]
        if s.shape != (n, n):
            return ZarVerification(False, f"s1 shape {s.shape}, expected {(n, n)}")
        if not np.isfinite(s).all():
            return ZarVerification(False, "s1 contains non-finite entries")
        if not np.array_equal(s, s.T):
            return ZarVerification(False, "s1 is not symmetric")
        gap = _exact_min_gap(q.entries, s)
        blocks = s[None, :, :]
    else:
        return ZarVerification(False, "certificate carries neither x_blocks nor s1")
    if gap < t:
        return ZarVerification(False, f"elementwise condition fails: min(Q - S1) = {float(gap):.6g} < t")
    rep = min_eig_blocks(blocks)
    if not rep.is_psd_at():
        return ZarVerification(False, f"PSD part has eigenvalue {rep.min_eigenvalue:.3e}",
                               margin=rep.min_eigenvalue)
    # a deficit e in S1 is absorbed by S1 + eI, which costs e on the diagonal of S2
    return ZarVerification(True, "ok", t - Fraction(rep.deficit), rep.min_eigenvalue)
