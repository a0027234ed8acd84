"""Lifted third-order tensors and the measurement operator.

A lifted tensor X is stored slice-major as a complex ndarray of shape
(N, M, L): ``x[n]`` is the M x L frontal slice for array element n.  Every
solver step is per-slice, so this layout keeps each slice contiguous; results
never depend on the order slices are visited.

The measurement operator maps a lifted tensor to an M x N data matrix by
masking each slice with the Slepian basis and summing rows; its adjoint
spreads the data columns back across the basis columns.
"""

from __future__ import annotations

import numpy as np

from .array_model import ArrayConfig, SourceSpec, steering_vector, synthesize_source
from .dpss import DpssBasis
from .kernels import bt_build, toeplitz_build

__all__ = [
    "ModelMismatchError",
    "khatri_rao_reshaped",
    "apply_L",
    "apply_L_adjoint",
    "toeplitz_hermitian",
    "block_toeplitz",
    "lift_exact",
]


class ModelMismatchError(ValueError):
    """A source is not representable in the basis within tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


def khatri_rao_reshaped(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor with slice n the outer product of column n of a and of b.

    a is M x N, b is L x N; the result has shape (N, M, L).
    """
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"column counts differ: {a.shape[1]} vs {b.shape[1]}")
    return np.einsum("mn,ln->nml", a, b)


def apply_L(x: np.ndarray, basis: DpssBasis) -> np.ndarray:
    """Measurement operator: column n = row sums of S masked with slice n."""
    if x.shape[2] != basis.l or x.shape[1] != basis.m:
        raise ValueError(f"tensor slices {x.shape[1:]} do not match basis {(basis.m, basis.l)}")
    return np.einsum("ml,nml->mn", basis.s, x)


def apply_L_adjoint(xstar: np.ndarray, basis: DpssBasis) -> np.ndarray:
    """Adjoint of the measurement operator: slice n = S masked with column n."""
    if xstar.shape[0] != basis.m:
        raise ValueError(f"data rows {xstar.shape[0]} do not match basis m={basis.m}")
    return np.einsum("ml,mn->nml", basis.s, xstar)


def toeplitz_hermitian(u: np.ndarray) -> np.ndarray:
    """Hermitian Toeplitz matrix with first column u (u[0] must be real)."""
    u = np.asarray(u, dtype=complex)
    if abs(u[0].imag) > 1e-12 * max(1.0, abs(u[0])):
        raise ValueError("first entry must be real for a Hermitian Toeplitz matrix")
    return toeplitz_build(u)


def block_toeplitz(generator: np.ndarray) -> np.ndarray:
    """Two-level Toeplitz matrix from a (2M-1) x (2L-1) generator.

    Index (i, j) of the block grid selects generator row i-j; entry (a, b)
    within a block selects generator column a-b (both offset to the center).
    """
    g = np.asarray(generator, dtype=complex)
    if g.ndim != 2 or g.shape[0] % 2 == 0 or g.shape[1] % 2 == 0:
        raise ValueError("generator must be odd-by-odd")
    m = (g.shape[0] + 1) // 2
    l = (g.shape[1] + 1) // 2
    return bt_build(g, m, l)


def lift_exact(specs: list[SourceSpec], cfg: ArrayConfig, basis: DpssBasis,
               tol: float = 0.05) -> np.ndarray:
    """Lifted tensor of the exact source model, shape (N, M, L).

    Each source contributes c * A(f) kr (alpha_hat b^H): the demodulated
    waveform is fit to the basis by least squares (orthonormal columns, so
    the coefficients are S^T applied to the demodulated samples).  If the
    relative fit residual of any source exceeds `tol` the narrowband model
    does not hold and a ModelMismatchError carrying the residual is raised.
    """
    m, n = basis.m, cfg.n
    out = np.zeros((n, m, basis.l), dtype=complex)
    idx = np.arange(m)
    for spec in specs:
        s = synthesize_source(spec, m)
        demod = s * np.exp(-2j * np.pi * spec.carrier * idx)
        alpha = basis.s.T @ demod
        resid = np.linalg.norm(demod - basis.s @ alpha) / np.linalg.norm(demod)
        if resid > tol:
            raise ModelMismatchError(
                f"source at carrier {spec.carrier} has relative basis residual "
                f"{resid:.3g} > {tol:.3g}", resid)
        asv = steering_vector(spec.angle_deg, cfg)
        c = np.linalg.norm(alpha) * np.linalg.norm(asv)
        alpha_hat = alpha / np.linalg.norm(alpha)
        b_conj = asv / np.linalg.norm(asv)  # conj(b), since b^H = sign(asv)
        a = np.exp(2j * np.pi * spec.carrier * idx)
        out += c * np.einsum("m,l,n->nml", a, alpha_hat, b_conj)
    return out
