"""Discrete prolate spheroidal (Slepian) basis generation and diagnostics.

The M x L basis holds the L most spectrally concentrated orthonormal
sequences for the band [-W, W].  Sampled tones inside the band are captured
by the basis with a residual that collapses once L exceeds 2MW by a modest
margin; ``residual_projection`` measures exactly that.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = ["DpssBasis", "dpss_basis", "residual_projection"]


@dataclass(frozen=True)
class DpssBasis:
    """Slepian basis: s (M x L, orthonormal columns) and concentrations."""

    s: np.ndarray
    lambdas: np.ndarray
    m: int
    l: int
    w: float

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow([f"s{k}" for k in range(self.l)])
            for row in self.s:
                wr.writerow([repr(float(v)) for v in row])


def _concentrations(s: np.ndarray, w: float) -> np.ndarray:
    """lambda_l = s_l^T B s_l with B the sinc kernel of the band [-w, w]."""
    m = s.shape[0]
    mm = np.arange(m)[:, None] - np.arange(m)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.sin(2 * np.pi * w * mm) / (np.pi * mm)
    b[np.eye(m, dtype=bool)] = 2.0 * w
    return np.einsum("ml,mk,kl->l", s, b, s)


def dpss_basis(m: int, w: float, l: int) -> DpssBasis:
    """First l Slepian vectors of length m for digital half bandwidth w.

    Eigenvectors of the symmetric tridiagonal matrix that commutes with the
    band-limiting kernel (diagonal ((m-1-2i)/2)^2 cos(2 pi w), off-diagonal
    i(m-i)/2), sign-normalized so the first nonzero entry of each column is
    positive and ordered by decreasing concentration.
    """
    if not 0.0 < w < 0.5:
        raise ValueError(f"half bandwidth {w} outside (0, 1/2)")
    if not 1 <= l <= m:
        raise ValueError(f"l={l} outside [1, m={m}]")
    i = np.arange(m)
    diag = ((m - 1 - 2 * i) / 2.0) ** 2 * np.cos(2 * np.pi * w)
    off = np.arange(1, m) * (m - np.arange(1, m)) / 2.0
    _, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(m - l, m - 1))
    vecs = vecs[:, ::-1]
    for k in range(l):
        nz = vecs[np.abs(vecs[:, k]) > 1e-12, k]
        if nz.size and nz[0] < 0:
            vecs[:, k] = -vecs[:, k]
    lam = _concentrations(vecs, w)
    order = np.argsort(lam)[::-1]
    if not np.array_equal(order, np.arange(l)):
        vecs, lam = vecs[:, order], lam[order]
    return DpssBasis(s=np.ascontiguousarray(vecs), lambdas=lam, m=m, l=l, w=w)


def residual_projection(basis: DpssBasis, f: float) -> float:
    """Norm of the tone a(f) after removing its projection onto the basis.

    Returns ||(I - S S^T) a(f)||_2; small for |f| <= w whenever l exceeds
    2 m w with some margin, and near ||a(f)|| = sqrt(m) far out of band.
    """
    if not -0.5 <= f < 0.5:
        raise ValueError(f"frequency {f} outside [-1/2, 1/2)")
    a = np.exp(2j * np.pi * f * np.arange(basis.m))
    r = a - basis.s @ (basis.s.T @ a)
    return float(np.linalg.norm(r))
