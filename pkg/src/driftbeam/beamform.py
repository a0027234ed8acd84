"""Frequency extraction from dual tensors and weight-vector construction.

The dual polynomial localizes carrier frequencies; its above-threshold set
is clustered (plateaus are the norm, not the exception), the desired
cluster's coefficient sign is estimated from a primal slice or its adjoint
surrogate, the desired waveform is rebuilt, and the array weights are the
least-squares fit of the data matrix to that waveform.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .array_model import ArrayConfig, steering_vector
from .dpss import DpssBasis

__all__ = [
    "BeamformResult",
    "DuplicateFrequencyError",
    "ThresholdError",
    "dual_polynomial_1d",
    "cluster_frequencies",
    "estimate_sign_alpha1",
    "reconstruct_s1",
    "smi_weights",
    "smi_baseline_weights",
    "radiation_pattern",
]


class ThresholdError(ValueError):
    """Too few grid points clear the clustering threshold."""


class DuplicateFrequencyError(ValueError):
    """Estimated frequencies too close to separate; use the 2D method."""


@dataclass
class BeamformResult:
    """End-to-end output: frequencies, sign vector, waveform, weights, pattern."""

    f_tilde: np.ndarray
    sign_alpha1: np.ndarray
    s1_tilde: np.ndarray
    w: np.ndarray
    pattern: tuple[np.ndarray, np.ndarray]  # (theta_deg, gain_db)
    diagnostics: dict = field(default_factory=dict)


def dual_polynomial_1d(q: np.ndarray, f_grid: np.ndarray) -> np.ndarray:
    """q(f): Frobenius norm of the stacked slice correlations with a(f).

    q has shape (N, M, L); the value at f is the norm of the L x N matrix
    whose column n is slice n (conjugate-transposed) applied to a(f).
    """
    m = q.shape[1]
    a = np.exp(2j * np.pi * np.outer(np.arange(m), np.asarray(f_grid)))
    corr = np.einsum("nml,mf->nlf", q.conj(), a)
    return np.sqrt(np.sum(np.abs(corr) ** 2, axis=(0, 1)))


def _plateau_peaks(f_grid: np.ndarray, q_vals: np.ndarray, threshold: float,
                   min_sep: float) -> list[float]:
    """Local maxima above threshold, plateau runs collapsed to their centers,
    kept greedily by height subject to a minimum separation."""
    n = q_vals.size
    cand = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and q_vals[j + 1] == q_vals[i]:
            j += 1
        left = q_vals[i - 1] if i > 0 else -np.inf
        right = q_vals[j + 1] if j + 1 < n else -np.inf
        if q_vals[i] >= threshold and q_vals[i] >= left and q_vals[i] >= right:
            cand.append(((i + j) // 2, q_vals[i]))
        i = j + 1
    cand.sort(key=lambda t: -t[1])
    peaks: list[float] = []
    for idx, _ in cand:
        f = f_grid[idx]
        if all(abs(f - p) >= min_sep for p in peaks):
            peaks.append(f)
    return peaks


def cluster_frequencies(f_grid: np.ndarray, q_vals: np.ndarray, gamma0: float,
                        k: int, min_sep: float | None = None) -> np.ndarray:
    """Cluster the above-threshold grid frequencies into k centers.

    Lloyd's iterations seeded with the k tallest separated local maxima
    (plateaus count once, at their midpoints); deterministic.  Returns the
    sorted cluster centers.

    Raises ThresholdError when fewer than k grid points reach gamma0;
    lowering gamma0 is the remedy.
    """
    f_grid = np.asarray(f_grid, dtype=float)
    q_vals = np.asarray(q_vals, dtype=float)
    mask = q_vals >= gamma0
    if mask.sum() < k:
        raise ThresholdError(
            f"only {int(mask.sum())} grid points reach gamma0={gamma0:.4g}; "
            f"need at least k={k} (reduce gamma0)")
    pts = f_grid[mask]
    if min_sep is None:
        min_sep = 2.0 * (f_grid[1] - f_grid[0])
    peaks = _plateau_peaks(f_grid, q_vals, gamma0, min_sep)
    if len(peaks) < k:
        fill = np.quantile(pts, np.linspace(0.1, 0.9, k))
        peaks = (peaks + [f for f in fill])[:k]
    centers = np.sort(np.asarray(peaks[:k]))
    for _ in range(200):
        lab = np.argmin(np.abs(pts[:, None] - centers[None, :]), axis=1)
        new = np.array([pts[lab == i].mean() if np.any(lab == i) else centers[i]
                        for i in range(k)])
        if np.allclose(new, centers, atol=1e-14):
            break
        centers = new
    return np.sort(centers)


def estimate_sign_alpha1(x_slice1: np.ndarray, f_tilde: np.ndarray,
                         min_sep: float | None = None) -> np.ndarray:
    """Unit coefficient-sign vector of the first (desired) frequency.

    Solves A_f C ~ x_slice1 in least squares with A_f = [a(f_1) ... a(f_K)]
    and returns the normalized first row of C.  The caller orders f_tilde so
    the desired frequency comes first, and chooses x_slice1: the first slice
    of the primal tensor, or the first slice of the adjoint of the data as a
    surrogate.

    Frequencies closer than `min_sep` (default 1/M, the resolution floor of
    the 1D method) make A_f effectively rank deficient; that raises
    DuplicateFrequencyError, which is the cue to switch to the 2D solver
    that separates coincident frequencies by angle.
    """
    f = np.asarray(f_tilde, dtype=float)
    m = x_slice1.shape[0]
    if min_sep is None:
        min_sep = 1.0 / m
    if f.size > 1:
        gaps = np.abs(f[:, None] - f[None, :])
        gaps = np.minimum(gaps, 1.0 - gaps)  # frequencies live on the circle
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() < min_sep:
            raise DuplicateFrequencyError(
                f"frequency gap {gaps.min():.4g} below the 1D resolution floor "
                f"{min_sep:.4g}; coincident carriers need the 2D solver")
    a_f = np.exp(2j * np.pi * np.outer(np.arange(m), f))
    if f.size > 1 and np.linalg.cond(a_f) > 1e8:
        raise DuplicateFrequencyError(
            "frequency matrix is numerically rank deficient; coincident "
            "carriers need the 2D solver")
    coef = np.linalg.lstsq(a_f, x_slice1, rcond=None)[0]
    row = coef[0]
    nrm = np.linalg.norm(row)
    if nrm == 0.0:
        raise ValueError("zero coefficient row; cannot normalize sign vector")
    return row / nrm


def reconstruct_s1(f1_tilde: float, sign_alpha1: np.ndarray, basis: DpssBasis) -> np.ndarray:
    """Desired waveform estimate a(f1) masked with the basis sign expansion."""
    a = np.exp(2j * np.pi * f1_tilde * np.arange(basis.m))
    return a * (basis.s @ sign_alpha1)


def smi_weights(x: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Least-squares weights w minimizing ||X w - s||.

    Equals (X^H X)^{-1} X^H s when X has full column rank; rank-deficient
    data (fewer sources than elements) falls back to the minimum-norm
    solution with a warning.
    """
    w, _, rank, _ = np.linalg.lstsq(x, s, rcond=None)
    if rank < x.shape[1]:
        warnings.warn(
            f"data matrix rank {rank} < {x.shape[1]} columns; "
            "returning the minimum-norm least-squares weights", stacklevel=2)
    return w


def smi_baseline_weights(x: np.ndarray, f1: float) -> np.ndarray:
    """Classical comparison weights: pilot fixed to the bare carrier tone.

    Accounts only for the sinusoidal component of the desired signal, not
    any time-varying offset; this is the baseline the offset-aware pipeline
    is measured against.
    """
    a = np.exp(2j * np.pi * f1 * np.arange(x.shape[0]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return smi_weights(x, a)


def radiation_pattern(w: np.ndarray, cfg: ArrayConfig,
                      theta_grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Array gain |asv(theta) w| in dB over the grid, normalized to 0 dB peak."""
    w = np.asarray(w)
    if not np.any(w):
        raise ValueError("zero weight vector has no pattern")
    theta_grid = np.asarray(theta_grid, dtype=float)
    e = np.exp(1j * cfg.wavenumber * np.outer(np.sin(np.deg2rad(theta_grid)), cfg.positions))
    gain = np.abs(e @ w)
    gain_db = 20.0 * np.log10(np.maximum(gain, 1e-300))
    return theta_grid, gain_db - gain_db.max()


def pattern_gain_db(w: np.ndarray, cfg: ArrayConfig, angles_deg) -> np.ndarray:
    """Unnormalized gain in dB at specific angles (for null-depth bookkeeping)."""
    angles = np.atleast_1d(np.asarray(angles_deg, dtype=float))
    g = np.abs(np.array([steering_vector(t, cfg) @ w for t in angles]))
    return 20.0 * np.log10(np.maximum(g, 1e-300))
