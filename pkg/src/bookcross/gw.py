"""Goemans-Williamson bounds for G_n, dense and symmetry-reduced, with certificates.

Dual form used throughout:  GW(G) = min { sum(w) : Diag(w) - L/4 >= 0 }.
Any w satisfying the LMI is an upper bound on maxcut(G), hence
C(n,4) - n*sum(y) is a lower bound on the 2-page crossing number of K_n.
For odd n the dihedral symmetry of G_n collapses w to one value per chord
distance and the LMI to d+1 Hermitian blocks of size d-1 (d = n // 2).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circle_graph import ChordGraph
from .hermitian import PsdReport, min_eig_blocks, psd_report

log = logging.getLogger(__name__)


# -- dense maxcut SDP ------------------------------------------------------------

def maxcut_sdp(c: np.ndarray, rtol: float = 1e-10, max_iter: int = 200):
    """Primal-dual interior point for max <C, X> s.t. diag(X) = 1, X >= 0.

    Dual: min sum(y) s.t. Diag(y) - C >= 0.  Returns (X, y, iterations).
    Newton directions follow the HRVW/Kojima-Shindoh-Hara scheme.
    """
    c = np.asarray(c, dtype=float)
    c = (c + c.T) / 2
    p = c.shape[0]
    if p == 0:
        return np.zeros((0, 0)), np.zeros(0), 0
    x = np.eye(p)
    y = 1.1 * np.abs(c).sum(axis=1) + 1.0
    z = np.diag(y) - c
    mu = float(np.vdot(z, x)) / (2 * p)
    for it in range(1, max_iter + 1):
        zi = np.linalg.inv(z)
        zi = (zi + zi.T) / 2
        dy = np.linalg.solve(zi * x, mu * np.diag(zi) - 1.0)
        dx = -x + mu * zi - (zi * dy[None, :]) @ x
        dx = (dx + dx.T) / 2
        ap = _step(x, dx)
        ad = _step(z, np.diag(dy))
        x = x + ap * dx
        y = y + ad * dy
        z = np.diag(y) - c
        mu = float(np.vdot(z, x)) / (2 * p)
        if ap + ad > 1.6:
            mu *= 0.5
        if ap + ad > 1.9:
            mu *= 0.2
        phi, psi = y.sum(), float(np.vdot(c, x))
        if phi - psi < rtol * (1.0 + abs(phi)):
            break
    return x, y, it


def _step(m: np.ndarray, dm: np.ndarray) -> float:
    a = 1.0
    while True:
        try:
            np.linalg.cholesky(m + a * dm)
            break
        except np.linalg.LinAlgError:
            a *= 0.8
            if a < 1e-12:
                return 0.0
    return a * 0.95 if a < 1.0 else a


def verified_dual_bound(c: np.ndarray, w: np.ndarray) -> tuple[float, PsdReport]:
    """Upper bound on max <C, X> over the elliptope from any trial w.

    w is shifted up by the PSD deficit of Diag(w) - C, so the bound holds
    whatever produced w.
    """
    rep = psd_report(np.diag(w) - c)
    return float(w.sum() + len(w) * rep.deficit), rep


def gw_full(g, max_vertices: int = 120) -> float:
    """GW(G) by the dense SDP, returned from a re-verified dual point."""
    adj = g.adjacency if isinstance(g, ChordGraph) else np.asarray(g)
    p = adj.shape[0]
    if p > max_vertices:
        raise ValueError(f"{p} vertices exceeds the dense limit of {max_vertices}")
    a = adj.astype(float)
    lap4 = (np.diag(a.sum(axis=1)) - a) / 4
    if not a.any():
        return 0.0
    _, y, _ = maxcut_sdp(lap4)
    bound, _ = verified_dual_bound(lap4, y)
    return bound


# -- symmetry-reduced problem ------------------------------------------------------

@dataclass
class ReducedGwProblem:
    """Data of the reduced dual: one variable per chord distance 2..d."""

    n: int
    d: int
    val: np.ndarray
    _partial: np.ndarray = field(repr=False)  # P[m, i-2] = sum_{k=1}^{i-1} z_m^k
    _twist: np.ndarray = field(repr=False)    # T[m, j-2] = 1 + z_m^{-j}

    @property
    def num_blocks(self) -> int:
        return self.d + 1

    @property
    def dim(self) -> int:
        return self.d - 1

    def block(self, m: int) -> np.ndarray:
        """Lambda^(m): the i <= j entries are (1/4) lambda_m(i, j), Hermitian-completed."""
        full = 0.25 * np.outer(self._partial[m], self._twist[m])
        upper = np.triu(full)
        return upper + np.triu(upper, 1).conj().T

    def blocks(self) -> np.ndarray:
        return np.stack([self.block(m) for m in range(self.num_blocks)])

    def lmi(self, y: np.ndarray, blocks: np.ndarray | None = None) -> np.ndarray:
        b = self.blocks() if blocks is None else blocks
        return b + np.diag(np.asarray(y, dtype=float) - self.val / 4)[None, :, :]


def build_reduced(n: int) -> ReducedGwProblem:
    if n % 2 == 0:
        raise ValueError("the reduced GW problem is only set up for odd n")
    if n < 5:
        raise ValueError("need n >= 5")
    d = n // 2
    i = np.arange(2, d + 1)
    val = (i * (i - 1) + 2 * (i - 1) * (d - i)).astype(float)
    ms = np.arange(d + 1)
    ks = np.arange(1, d)
    # z_m = exp(-2 pi i m / n); sum_{k=n-j+1}^{n-j+i-1} z^k = z^{-j} sum_{k=1}^{i-1} z^k
    powers = np.exp(-2j * np.pi * np.outer(ms, ks) / n)
    partial = np.concatenate([np.zeros((d + 1, 1)), np.cumsum(powers, axis=1)], axis=1)[:, 1:]
    twist = 1.0 + np.exp(2j * np.pi * np.outer(ms, i) / n)
    return ReducedGwProblem(n, d, val, partial, twist)


@dataclass
class GwCertificate:
    n: int
    y: np.ndarray
    margin: float
    bound: float
    converged: bool = True

    @property
    def d(self) -> int:
        return self.n // 2


def trivial_certificate(p: ReducedGwProblem) -> GwCertificate:
    """y = val/4 + max_m lambda_max(-Lambda^(m)): every block becomes diagonally shifted PSD."""
    blocks = p.blocks()
    shift = max(float(np.linalg.eigvalsh(-b)[-1]) for b in blocks)
    y = p.val / 4 + shift
    rep = min_eig_blocks(p.lmi(y, blocks))
    return GwCertificate(p.n, y, rep.min_eigenvalue, p.n * float(y.sum()))


def gw_reduced_solve(p: ReducedGwProblem, accuracy: float = 1e-8, max_newton: int = 400) -> GwCertificate:
    """Log-det barrier method on the d+1 Hermitian LMIs.

    Stops when the central-path gap mu*(d+1)*(d-1) is below ``accuracy``
    (relative to the objective).  The returned y is always feasible: any
    residual PSD deficit is added to every component.
    """
    blocks = p.blocks()
    n, k = p.n, p.dim
    base = p.val / 4
    cert = trivial_certificate(p)
    y = cert.y + 1.0

    def lmi(v):
        return blocks + np.diag(v - base)[None, :, :]

    def barrier(v, mu):
        # det > 0 does not imply PD for even-sized blocks, so look at eigenvalues
        ev = np.linalg.eigvalsh(lmi(v))
        if ev.min() <= 0:
            return math.inf
        return n * v.sum() - mu * np.log(ev).sum()

    mu = float(n)
    steps = 0
    converged = False
    while steps < max_newton:
        while steps < max_newton:
            steps += 1
            ainv = np.linalg.inv(lmi(y))
            grad = n - mu * np.einsum("mii->i", ainv).real
            hess = mu * (np.abs(ainv) ** 2).sum(axis=0)
            dy = -np.linalg.solve(hess, grad)
            dec = float(-grad @ dy)
            f0 = barrier(y, mu)
            s = 1.0
            while s > 1e-14:
                f1 = barrier(y + s * dy, mu)
                if f1 <= f0 - 0.25 * s * dec:
                    break
                s *= 0.5
            y = y + s * dy
            if dec < 1e-10 * max(1.0, mu):
                break
        gap = mu * p.num_blocks * k
        obj = n * float(y.sum())
        log.debug("mu=%.3e gap=%.3e obj=%.12g newton=%d", mu, gap, obj, steps)
        if gap <= accuracy * max(1.0, abs(obj)):
            converged = True
            break
        mu *= 0.2

    rep = min_eig_blocks(lmi(y))
    if rep.min_eigenvalue < 0:
        y = y - rep.min_eigenvalue
        rep = min_eig_blocks(lmi(y))
    return GwCertificate(n, y, rep.min_eigenvalue, n * float(y.sum()), converged)


# -- verification --------------------------------------------------------------------

@dataclass(frozen=True)
class GwVerification:
    valid: bool
    reason: str
    margin: float | None = None
    gw_upper: Fraction | None = None
    nu2_lower: int | None = None


def nu2_lower_from_gw(n: int, gw_upper) -> int:
    """ceil(C(n,4) - GW upper bound), in exact arithmetic."""
    return math.ceil(Fraction(math.comb(n, 4)) - Fraction(gw_upper))


def verify_gw_certificate(c: GwCertificate) -> GwVerification:
    """Recompute every block's minimum eigenvalue and the implied crossing bound."""
    n = int(c.n)
    if n < 5 or n % 2 == 0:
        return GwVerification(False, f"n={n} is not an odd integer >= 5")
    y = np.asarray(c.y, dtype=float)
    d = n // 2
    if y.shape != (d - 1,):
        return GwVerification(False, f"y has length {y.size}, expected {d - 1} for n={n}")
    if not np.all(np.isfinite(y)):
        return GwVerification(False, "y contains non-finite entries")
    p = build_reduced(n)
    rep = min_eig_blocks(p.lmi(y))
    if not rep.is_psd_at():
        return GwVerification(False, f"LMI violated: min eigenvalue {rep.min_eigenvalue:.3e}",
                              rep.min_eigenvalue)
    # each unit of diagonal deficit costs n per chord-distance class
    upper = n * sum(Fraction(v) for v in y) + n * (d - 1) * Fraction(rep.deficit)
    return GwVerification(True, "ok", rep.min_eigenvalue, upper, nu2_lower_from_gw(n, upper))
