import cmath
import math

import numpy as np
import pytest

from bookcross.circle_graph import build_chord_graph
from bookcross.gw import build_reduced
from bookcross.hermitian import (
    NotHermitianError,
    block_circulant,
    circulant,
    circulant_block_eigs,
    dft_blocks,
    eigenvalues,
    min_eig_blocks,
    psd_report,
    tol_eig,
)


def test_identity():
    assert np.allclose(eigenvalues(np.eye(3)), [1, 1, 1])


def test_pauli_type_matrix():
    assert np.allclose(eigenvalues(np.array([[0, 1j], [-1j, 0]])), [-1, 1])


def test_cycle_laplacian_spectrum():
    n = 5
    a = np.zeros((n, n))
    for k in range(n):
        a[k, (k + 1) % n] = a[(k + 1) % n, k] = 1
    lap = np.diag(a.sum(1)) - a
    want = sorted(2 - 2 * math.cos(2 * math.pi * k / n) for k in range(n))
    assert np.allclose(eigenvalues(lap), want, atol=1e-12)


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        eigenvalues(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotHermitianError):
        eigenvalues(np.ones((2, 3)))
    with pytest.raises(NotHermitianError):
        min_eig_blocks(np.array([[[1, 2], [0, 1]]]))


def test_trace_identity_on_random_hermitian():
    rng = np.random.default_rng(0)
    for dim in (1, 4, 17, 40):
        z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        h = z + z.conj().T
        ev = eigenvalues(h)
        assert np.all(np.diff(ev) >= 0)
        assert abs(ev.sum() - np.trace(h).real) <= 1e-8 * (1 + np.abs(ev).sum())


def test_psd_report_margin():
    rep = psd_report(np.diag([1.0, -1e-3]))
    assert rep.min_eigenvalue == pytest.approx(-1e-3)
    assert not rep.is_psd_at()
    assert rep.is_psd_at(1e-2)
    assert rep.deficit == pytest.approx(1e-3 + rep.tol)
    assert rep.tol == pytest.approx(tol_eig(np.diag([1.0, -1e-3])))


def test_circulant_layout():
    c = circulant([1, 2, 3])
    assert c.tolist() == [[1, 2, 3], [3, 1, 2], [2, 3, 1]]


def test_block_circulant_spectrum_equals_dft_blocks():
    rng = np.random.default_rng(1)
    b, n = 3, 8
    rows = rng.normal(size=(b, b, n))
    # make the full matrix symmetric: c_ji[k] = c_ij[-k]
    rev = (-np.arange(n)) % n
    for i in range(b):
        rows[i, i] = (rows[i, i] + rows[i, i][rev]) / 2
        for j in range(i + 1, b):
            rows[j, i] = rows[i, j][rev]
    full = block_circulant(rows)
    assert np.allclose(full, full.T)
    freq = dft_blocks(rows)
    spec = np.sort(np.concatenate([eigenvalues(f) for f in freq]))
    assert np.allclose(spec, eigenvalues(full), atol=1e-10)


def test_circulant_block_eigs_examples():
    for n in (5, 7, 9):
        for i in range(2, n // 2 + 1):
            for j in range(i, n // 2 + 1):
                assert circulant_block_eigs(i, j, n, 0) == pytest.approx(2 * (i - 1))
    assert circulant_block_eigs(2, 2, 5, 1) == pytest.approx(2 * math.cos(2 * math.pi / 5))
    val = circulant_block_eigs(2, 2, 5, 1)
    assert val == pytest.approx(cmath.exp(-2j * math.pi / 5) + cmath.exp(-8j * math.pi / 5))


def test_circulant_block_eigs_conjugate_symmetry():
    for n in range(5, 14):
        d = n // 2
        for i in range(2, min(d, 6) + 1):
            for j in range(i, min(d, 6) + 1):
                for m in range(1, n):
                    a = circulant_block_eigs(i, j, n, m)
                    b = circulant_block_eigs(i, j, n, n - m)
                    assert a == pytest.approx(b.conjugate(), abs=1e-12)


def test_circulant_block_eigs_range_checks():
    with pytest.raises(ValueError):
        circulant_block_eigs(3, 2, 9, 0)
    with pytest.raises(ValueError):
        circulant_block_eigs(2, 2, 9, 9)


@pytest.mark.parametrize("n", [5, 7, 9])
def test_reduced_blocks_carry_the_adjacency_spectrum(n):
    """Spectrum of A(G_n) = union over all n frequencies of the d-1 dimensional blocks."""
    p = build_reduced(n)
    d = n // 2
    blocks = []
    for m in range(n):
        blk = np.zeros((d - 1, d - 1), dtype=complex)
        for i in range(2, d + 1):
            for j in range(i, d + 1):
                blk[i - 2, j - 2] = circulant_block_eigs(i, j, n, m)
                blk[j - 2, i - 2] = np.conj(blk[i - 2, j - 2])
        blocks.append(blk)
        if m <= d:
            assert np.allclose(4 * p.block(m), blk, atol=1e-12)
    spec = np.sort(np.concatenate([eigenvalues(b) for b in blocks]))
    adj = build_chord_graph(n).adjacency.astype(float)
    assert np.allclose(spec, eigenvalues(adj), atol=1e-8)
