"""Accelerated proximal-gradient solver for the dual of the lifted problem.

Each iteration extrapolates the dual pair (Q, H) with a Nesterov momentum
term, ascends Q along the adjoint of the data, projects H onto the dual
equality set (unit total trace, zero superdiagonal sums), assembles the
per-slice blocks [[H_n, -Q_n], [-Q_n^H, I]], and keeps only their positive
eigenvalues.  The positive-part truncation re-violates the equalities
slightly; that drift is recorded per iteration rather than re-projected,
and the returned dual tensor is used for localization only, so the final
polynomial is meaningful up to scale.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .dpss import DpssBasis
from .kernels import htilde_project
from .tensor_ops import apply_L, apply_L_adjoint

__all__ = ["IvdstParams", "IvdstState", "IvdstResult", "ivdst_init", "ivdst_iterate", "ivdst_solve"]


@dataclass(frozen=True)
class IvdstParams:
    """Stepsize schedule and iteration budget."""

    eta: float = 4.0
    decay: float = 0.99
    decay_every: int = 50
    iters: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.iters < 1:
            raise ValueError("need at least one iteration")

    def eta_at(self, i: int) -> float:
        """Stepsize used in (1-based) iteration i."""
        return self.eta * self.decay ** ((i - 1) // self.decay_every)


@dataclass
class IvdstState:
    """Dual iterates: current and previous (Q, H) plus the momentum scalar."""

    q: np.ndarray
    q_prev: np.ndarray
    h: np.ndarray
    h_prev: np.ndarray
    t: float = 1.0
    i: int = 0


@dataclass
class IvdstResult:
    """Final dual tensor plus per-iteration traces."""

    q: np.ndarray
    objective: np.ndarray
    constraint_drift: np.ndarray

    def trace_to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "objective", "constraint_drift"])
            for i, (o, d) in enumerate(zip(self.objective, self.constraint_drift), start=1):
                w.writerow([i, repr(float(o)), repr(float(d))])


def ivdst_init(m: int, l: int, n: int, seed: int = 0) -> IvdstState:
    """Random start: Q standard complex Gaussian, H the Gram of its slices."""
    rng = np.random.default_rng(seed)
    q = (rng.standard_normal((n, m, l)) + 1j * rng.standard_normal((n, m, l))) / np.sqrt(2.0)
    h = np.einsum("nml,nkl->nmk", q, q.conj())
    return IvdstState(q=q, q_prev=q.copy(), h=h, h_prev=h.copy())


def ivdst_iterate(state: IvdstState, xstar_adj: np.ndarray, eta: float) -> IvdstState:
    """One momentum + gradient + proximal step.

    xstar_adj is the adjoint of the data matrix, precomputed once.  The
    gradient step moves only Q (the smooth term does not depend on H); the
    proximal step projects H onto the equality set, then truncates the
    negative eigenvalues of each assembled block and reads the new pair off
    the truncated block.
    """
    n, m, l = state.q.shape
    t_next = 0.5 * (1.0 + np.sqrt(4.0 * state.t ** 2 + 1.0))
    mom = (state.t - 1.0) / t_next
    q_bar = state.q + mom * (state.q - state.q_prev)
    h_bar = state.h + mom * (state.h - state.h_prev)

    q_g = q_bar + eta * xstar_adj
    h_tilde = htilde_project(h_bar)

    q_new = np.empty_like(state.q)
    h_new = np.empty_like(state.h)
    eye = np.eye(l)
    z = np.empty((m + l, m + l), dtype=complex)
    for k in range(n):
        z[:m, :m] = h_tilde[k]
        z[:m, m:] = -q_g[k]
        z[m:, :m] = -q_g[k].conj().T
        z[m:, m:] = eye
        vals, vecs = np.linalg.eigh(z)
        np.maximum(vals, 0.0, out=vals)
        zt = (vecs * vals) @ vecs.conj().T
        h_new[k] = zt[:m, :m]
        q_new[k] = -zt[:m, m:]
    return IvdstState(q=q_new, q_prev=state.q, h=h_new, h_prev=state.h,
                      t=t_next, i=state.i + 1)


def ivdst_solve(xstar: np.ndarray, basis: DpssBasis, params: IvdstParams | None = None) -> IvdstResult:
    """Run the full iteration budget and return the dual tensor with traces.

    The objective trace is Re<X*, L(Q_i)>; the drift trace is the deviation
    of the total H trace from one after the positive-part truncation.
    """
    if params is None:
        params = IvdstParams()
    m, n = xstar.shape
    state = ivdst_init(m, basis.l, n, params.seed)
    xstar_adj = apply_L_adjoint(xstar, basis)
    objective = np.empty(params.iters)
    drift = np.empty(params.iters)
    for i in range(1, params.iters + 1):
        state = ivdst_iterate(state, xstar_adj, params.eta_at(i))
        objective[i - 1] = np.vdot(xstar, apply_L(state.q, basis)).real
        drift[i - 1] = abs(np.einsum("nmm->", state.h).real - 1.0)
    return IvdstResult(q=state.q, objective=objective, constraint_drift=drift)
