"""Hermitian eigenvalues, PSD margins and circulant/DFT block diagonalisation."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

# relative factor in tol_eig = EIG_RTOL * (1 + ||A||_F); ||A||_F bounds the spectral radius
EIG_RTOL = 1e-9


class NotHermitianError(ValueError):
    pass


def check_hermitian(a, atol: float = 1e-12) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {a.shape}")
    scale = 1.0 + np.abs(a).max(initial=0.0)
    if np.abs(a - a.conj().T).max(initial=0.0) > atol * scale:
        raise NotHermitianError("matrix is not conjugate-symmetric")
    return a


def tol_eig(a) -> float:
    return EIG_RTOL * (1.0 + float(np.linalg.norm(a)))


def eigenvalues(h) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, ascending."""
    h = check_hermitian(h)
    if h.shape[0] == 0:
        return np.zeros(0)
    # LAPACK only reads one triangle; symmetrise so both are honoured
    return np.linalg.eigvalsh((h + h.conj().T) / 2)


@dataclass(frozen=True)
class PsdReport:
    min_eigenvalue: float
    tol: float

    def is_psd_at(self, tol: float | None = None) -> bool:
        return self.min_eigenvalue >= -(self.tol if tol is None else tol)

    @property
    def deficit(self) -> float:
        """Diagonal shift that makes the matrix PSD despite rounding in the eigensolver."""
        return max(0.0, -self.min_eigenvalue) + self.tol


def psd_report(h) -> PsdReport:
    h = np.asarray(h)
    ev = eigenvalues(h)
    return PsdReport(float(ev[0]) if ev.size else 0.0, tol_eig(h))


def min_eig_blocks(blocks) -> PsdReport:
    """Smallest eigenvalue over a stack of Hermitian blocks (shape (k, d, d))."""
    blocks = np.asarray(blocks)
    sym = (blocks + np.conj(np.swapaxes(blocks, -1, -2))) / 2
    if np.abs(sym - blocks).max(initial=0.0) > 1e-12 * (1 + np.abs(blocks).max(initial=0.0)):
        raise NotHermitianError("a block is not conjugate-symmetric")
    ev = np.linalg.eigvalsh(sym)
    worst = max(float(np.linalg.norm(b)) for b in blocks)
    return PsdReport(float(ev.min()), EIG_RTOL * (1.0 + worst))


def circulant(first_row) -> np.ndarray:
    """Circulant matrix with C[a, b] = c[(b - a) mod N]."""
    c = np.asarray(first_row)
    n = c.shape[-1]
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return c[idx]


def block_circulant(first_rows) -> np.ndarray:
    """Assemble the (B*N)x(B*N) matrix whose (i, j) block is circulant(first_rows[i, j])."""
    rows = np.asarray(first_rows)
    b, _, n = rows.shape
    return np.block([[circulant(rows[i, j]) for j in range(b)] for i in range(b)])


def dft_blocks(first_rows) -> np.ndarray:
    """Frequency blocks of a block-circulant matrix.

    Returns ``X`` of shape (N, B, B) with X[f, i, j] = sum_k c_ij[k] exp(-2 pi i f k / N).
    The spectrum of :func:`block_circulant` is the union of the spectra of X[f].
    """
    rows = np.asarray(first_rows)
    return np.moveaxis(np.fft.fft(rows, axis=-1), -1, 0)


def circulant_block_eigs(i: int, j: int, n: int, m: int) -> complex:
    """Eigenvalue at frequency m of the adjacency block between chord distances i <= j."""
    d = n // 2
    if not 2 <= i <= j <= d:
        raise ValueError(f"need 2 <= i <= j <= {d}, got i={i}, j={j}")
    if not 0 <= m <= n - 1:
        raise ValueError(f"frequency {m} outside 0..{n - 1}")
    ks = list(range(1, i)) + list(range(n - j + 1, n - j + i))
    return sum(cmath.exp(-2j * math.pi * m * k / n) for k in ks)
