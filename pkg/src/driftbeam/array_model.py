"""Array geometry, frequency-offset trajectories, and snapshot synthesis.

The data model is an N-element linear array collecting M snapshots from K
narrowband sources.  Each source is a complex exponential at a carrier
frequency, frequency-modulated by a per-sample offset trajectory; the
snapshot matrix is the sum of outer products of source waveforms with array
steering vectors.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ArrayConfig",
    "OffsetTrajectory",
    "SourceSpec",
    "steering_vector",
    "make_offset",
    "synthesize_source",
    "build_data_matrix",
]


@dataclass(frozen=True)
class ArrayConfig:
    """Linear array: element positions in wavelengths and wavenumber."""

    positions: np.ndarray
    wavenumber: float = 2.0 * np.pi

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "positions", pos)
        if pos.ndim != 1 or pos.size < 2:
            raise ValueError("need at least two element positions")
        if not np.all(np.isfinite(pos)):
            raise ValueError("element positions must be finite")
        if np.unique(pos).size != pos.size:
            raise ValueError("element positions must be distinct")

    @property
    def n(self) -> int:
        return self.positions.size

    @classmethod
    def uniform(cls, n: int, spacing: float = 0.5, wavenumber: float = 2.0 * np.pi) -> "ArrayConfig":
        """Uniform array centered on the origin (default half-wavelength)."""
        q = (np.arange(n) - (n - 1) / 2.0) * spacing
        return cls(positions=q, wavenumber=wavenumber)


@dataclass(frozen=True)
class OffsetTrajectory:
    """Per-sample frequency offset delta[m] in cycles/sample."""

    kind: str
    values: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def m(self) -> int:
        return self.values.size

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["m", "delta"])
            for i, d in enumerate(self.values):
                w.writerow([i, repr(float(d))])


@dataclass(frozen=True)
class SourceSpec:
    """One narrowband source: arrival angle, carrier, offset, amplitude."""

    angle_deg: float
    carrier: float
    offset: OffsetTrajectory
    amplitude: complex = 1.0 + 0.0j

    def __post_init__(self):
        if not -90.0 <= self.angle_deg <= 90.0:
            raise ValueError(f"angle {self.angle_deg} outside [-90, 90] degrees")
        if not 0.0 <= self.carrier < 1.0:
            raise ValueError(f"carrier {self.carrier} outside [0, 1)")
        f = (self.carrier + self.offset.values) % 1.0
        if np.any(np.abs(f) >= 1.0):
            raise ValueError("carrier plus offset leaves [0, 1)")


def steering_vector(angle_deg: float, cfg: ArrayConfig) -> np.ndarray:
    """Unit-modulus array response exp(j k0 sin(theta) q_n) for angle theta.

    Angles are in degrees, converted to radians here and nowhere else.
    """
    if not -90.0 <= angle_deg <= 90.0:
        raise ValueError(f"angle {angle_deg} outside [-90, 90] degrees")
    return np.exp(1j * cfg.wavenumber * np.sin(np.deg2rad(angle_deg)) * cfg.positions)


def make_offset(kind: str, m: int, *, value: float = 0.0, slope: float = 0.0,
                half_period: int = 0, bound: float = 0.0,
                seed: int | None = None) -> OffsetTrajectory:
    """Generate an offset trajectory of one of the four supported kinds.

    Parameters
    ----------
    kind : {"static", "linear", "zigzag", "random"}
        static: delta[m] = value.
        linear: delta[m] = slope * m.
        zigzag: piecewise linear, slope sign reversing every `half_period`
            samples (starts rising from zero).
        random: Gaussian random walk with per-step std bound/sqrt(m),
            clipped to [-bound, bound]; requires `seed`.
    m : number of samples (>= 2).
    """
    if m < 2:
        raise ValueError("need at least two samples")
    if kind == "static":
        vals = np.full(m, float(value))
        params = {"value": value}
    elif kind == "linear":
        vals = slope * np.arange(m, dtype=float)
        params = {"slope": slope}
    elif kind == "zigzag":
        if half_period < 1:
            raise ValueError("zigzag needs half_period >= 1")
        vals = np.empty(m)
        v, sgn = 0.0, 1.0
        for i in range(m):
            vals[i] = v
            v += sgn * slope
            if (i + 1) % half_period == 0:
                sgn = -sgn
        params = {"slope": slope, "half_period": half_period}
    elif kind == "random":
        if bound <= 0.0:
            raise ValueError("random offset needs a positive bound")
        if seed is None:
            raise ValueError("random offset needs a seed")
        rng = np.random.default_rng(seed)
        steps = rng.normal(0.0, bound / np.sqrt(m), m)
        vals = np.clip(np.cumsum(steps), -bound, bound)
        params = {"bound": bound, "seed": seed}
    else:
        raise ValueError(f"unknown offset kind {kind!r}")
    return OffsetTrajectory(kind=kind, values=vals, params=params)


def synthesize_source(spec: SourceSpec, m: int, convention: str = "fm") -> np.ndarray:
    """Sample the source waveform.

    With the default FM convention the offset modulates the instantaneous
    frequency, so the phase accumulates:

        s[m] = amplitude * exp(j 2 pi (carrier * m + Phi[m])),
        Phi[m] = sum_{i < m} delta[i].

    A static offset c therefore shifts the carrier exactly: s = a(carrier+c).
    The alternative ``convention="instantaneous"`` evaluates
    exp(j 2 pi (carrier + delta[m]) m) instead, for sensitivity studies.
    """
    delta = spec.offset.values
    if delta.size != m:
        raise ValueError(f"offset length {delta.size} != m {m}")
    idx = np.arange(m)
    if convention == "fm":
        phi = np.concatenate(([0.0], np.cumsum(delta[:-1])))
        phase = spec.carrier * idx + phi
    elif convention == "instantaneous":
        phase = (spec.carrier + delta) * idx
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return spec.amplitude * np.exp(2j * np.pi * phase)


def build_data_matrix(specs: list[SourceSpec], cfg: ArrayConfig, m: int,
                      convention: str = "fm") -> np.ndarray:
    """Snapshot matrix X (M x N): sum of source-waveform / steering outer products."""
    if not specs:
        raise ValueError("need at least one source")
    x = np.zeros((m, cfg.n), dtype=complex)
    for spec in specs:
        x += np.outer(synthesize_source(spec, m, convention), steering_vector(spec.angle_deg, cfg))
    return x
