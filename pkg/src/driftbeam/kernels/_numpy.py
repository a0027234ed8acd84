"""Pure-NumPy implementations of the structure-projection kernels.

These are the fallback for the compiled extension in ``_core.pyx``.  Both
backends expose the same five functions; the solvers call them thousands of
times per run (once or more per iteration per slice), which is why a compiled
core exists at all.  Index maps are cached per shape so the vectorized
``bincount`` reductions stay allocation-light.
"""

from functools import lru_cache

import numpy as np

NAME = "numpy"


@lru_cache(maxsize=32)
def _bt_index_map(m: int, l: int):
    """Flat generator-class index for every entry of an (m*l, m*l) matrix."""
    im = np.arange(m)
    il = np.arange(l)
    dm = im[:, None] - im[None, :]
    dl = il[:, None] - il[None, :]
    idx = (dm[:, None, :, None] + m - 1) * (2 * l - 1) + (dl[None, :, None, :] + l - 1)
    idx = np.ascontiguousarray(idx.reshape(m * l, m * l))
    counts = np.bincount(idx.ravel(), minlength=(2 * m - 1) * (2 * l - 1))
    return idx, counts


def herm_toeplitz_means(a: np.ndarray) -> np.ndarray:
    """Per-diagonal means of the Hermitian part of a square matrix.

    Returns u of length M with ``u[j]`` the mean over diagonal -j of
    (A + A^H)/2, i.e. the first column of the nearest Hermitian Toeplitz
    matrix in Frobenius norm.
    """
    m = a.shape[0]
    u = np.empty(m, dtype=complex)
    for j in range(m):
        lo = np.diagonal(a, offset=-j)
        hi = np.diagonal(a, offset=j)
        u[j] = 0.5 * (lo.mean() + np.conj(hi).mean())
    u[0] = u[0].real
    return u


def toeplitz_build(u: np.ndarray) -> np.ndarray:
    """Hermitian Toeplitz matrix with first column u (u[0] taken real)."""
    m = u.shape[0]
    idx = np.arange(m)
    d = idx[:, None] - idx[None, :]
    t = np.where(d >= 0, u[np.abs(d)], np.conj(u[np.abs(d)]))
    t[idx, idx] = u[0].real
    return t


def htilde_project(h: np.ndarray) -> np.ndarray:
    """Project a stack of Hermitian matrices onto the dual equality set.

    For h of shape (N, M, M): hermitianize, rescale the diagonals so the
    total trace over all slices is one, and remove the mean from every
    superdiagonal (mirrored to the subdiagonals).  A near-zero total trace
    degenerates the rescaling; the nearest feasible diagonal is then the
    uniform one.
    """
    h = 0.5 * (h + h.conj().transpose(0, 2, 1))
    n, m, _ = h.shape
    out = h.copy()
    total = np.einsum("nmm->", h).real
    di = np.arange(m)
    if abs(total) < 1e-12:
        out[:, di, di] = 1.0 / (m * n)
    else:
        out[:, di, di] = h[:, di, di].real / total
    for j in range(1, m):
        ii = di[: m - j]
        dj = h[:, ii, ii + j]
        dj = dj - dj.mean(axis=1, keepdims=True)
        out[:, ii, ii + j] = dj
        out[:, ii + j, ii] = dj.conj()
    return out


def bt_generator_means(b: np.ndarray, m: int, l: int) -> np.ndarray:
    """Class means of an (m*l, m*l) matrix over two-level Toeplitz indices.

    Entry (dm, dl) of the result (shape (2m-1, 2l-1), index offset by
    (m-1, l-1)) is the mean of all entries whose block offset is dm and
    within-block offset is dl, symmetrized so the generator is Hermitian.
    """
    idx, counts = _bt_index_map(m, l)
    sr = np.bincount(idx.ravel(), weights=b.real.ravel(), minlength=counts.size)
    si = np.bincount(idx.ravel(), weights=b.imag.ravel(), minlength=counts.size)
    t = ((sr + 1j * si) / counts).reshape(2 * m - 1, 2 * l - 1)
    t = 0.5 * (t + np.conj(t[::-1, ::-1]))
    t[m - 1, l - 1] = t[m - 1, l - 1].real
    return t


def bt_build(t: np.ndarray, m: int, l: int) -> np.ndarray:
    """Block Toeplitz matrix from a (2m-1, 2l-1) generator.

    Block (i, j) is the l-by-l Toeplitz matrix built from generator row
    i - j; entry (a, b) of that block is t[i-j+m-1, a-b+l-1].
    """
    idx, _ = _bt_index_map(m, l)
    return t.ravel()[idx]
