import numpy as np
import pytest

import driftbeam as db
from driftbeam.beamform import cluster_frequencies, dual_polynomial_1d
from driftbeam.ivdst import IvdstParams, ivdst_init, ivdst_iterate, ivdst_solve
from driftbeam.tensor_ops import apply_L_adjoint


def test_momentum_sequence():
    t0 = 1.0
    t1 = 0.5 * (1 + np.sqrt(4 * t0 ** 2 + 1))
    t2 = 0.5 * (1 + np.sqrt(4 * t1 ** 2 + 1))
    assert np.isclose(t1, (1 + np.sqrt(5)) / 2)
    assert np.isclose(t2, 2.19353, atol=1e-5)
    state = ivdst_init(4, 2, 1, seed=0)
    xadj = np.zeros((1, 4, 2), complex)
    s1 = ivdst_iterate(state, xadj, 1.0)
    s2 = ivdst_iterate(s1, xadj, 1.0)
    assert np.isclose(s1.t, t1) and np.isclose(s2.t, t2)


class TestInit:
    def test_gram_psd_rank_bounded(self):
        st = ivdst_init(10, 3, 2, seed=4)
        for k in range(2):
            vals = np.linalg.eigvalsh(st.h[k])
            assert vals.min() >= -1e-12
            assert (vals > 1e-10).sum() <= 3

    def test_deterministic(self):
        a = ivdst_init(6, 2, 3, seed=9)
        b = ivdst_init(6, 2, 3, seed=9)
        assert np.array_equal(a.q, b.q) and np.array_equal(a.h, b.h)

    def test_full_l_full_rank(self):
        st = ivdst_init(5, 5, 1, seed=1)
        assert np.linalg.matrix_rank(st.h[0]) == 5


def test_single_step_from_zero_matches_hand_trace():
    # zero dual start: the equality projection has nothing to normalize, so
    # the diagonal becomes uniform 1/(M N); the step then truncates the
    # block assembled from the gradient term alone
    m, l, n = 2, 1, 1
    rng = np.random.default_rng(0)
    xstar = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    basis = db.dpss_basis(m, 0.2, l)
    xadj = apply_L_adjoint(xstar, basis)
    state = db.IvdstState(q=np.zeros((n, m, l), complex),
                          q_prev=np.zeros((n, m, l), complex),
                          h=np.zeros((n, m, m), complex),
                          h_prev=np.zeros((n, m, m), complex))
    out = ivdst_iterate(state, xadj, 1.0)
    z = np.zeros((m + l, m + l), complex)
    z[:m, :m] = np.eye(m) / (m * n)
    z[:m, m:] = -xadj[0]
    z[m:, :m] = -xadj[0].conj().T
    z[m:, m:] = np.eye(l)
    vals, vecs = np.linalg.eigh(z)
    zt = (vecs * np.maximum(vals, 0)) @ vecs.conj().T
    assert np.allclose(out.q[0], -zt[:m, m:])
    assert np.allclose(out.h[0], zt[:m, :m])


class TestSolve:
    def _small_scene(self):
        m = 48
        cfg = db.ArrayConfig.uniform(3)
        specs = [db.SourceSpec(-20.0, 0.15, db.make_offset("static", m, value=0.004)),
                 db.SourceSpec(40.0, 0.45, db.make_offset("static", m, value=-0.003))]
        xstar = db.build_data_matrix(specs, cfg, m)
        basis = db.dpss_basis(m, 0.02, 3)
        return xstar, basis, m

    def test_zero_data_objective_identically_zero(self):
        basis = db.dpss_basis(8, 0.1, 2)
        res = ivdst_solve(np.zeros((8, 2), complex), basis, IvdstParams(iters=30))
        assert np.all(res.objective == 0.0)

    def test_deterministic(self):
        xstar, basis, _ = self._small_scene()
        p = IvdstParams(iters=40, seed=3)
        a = ivdst_solve(xstar, basis, p)
        b = ivdst_solve(xstar, basis, p)
        assert np.array_equal(a.q, b.q)

    def test_localizes_small_scene(self):
        xstar, basis, m = self._small_scene()
        res = ivdst_solve(xstar, basis, IvdstParams(iters=150, seed=1))
        grid = np.arange(8192) / 8192
        qv = dual_polynomial_1d(res.q, grid)
        centers = cluster_frequencies(grid, qv, 0.9 * qv.max(), 2,
                                      min_sep=1 / (2 * m))
        assert np.abs(centers - np.array([0.154, 0.447])).max() <= 0.005

    def test_traces_and_csv(self, tmp_path):
        xstar, basis, _ = self._small_scene()
        res = ivdst_solve(xstar, basis, IvdstParams(iters=60, seed=1))
        assert res.objective.shape == (60,) and res.constraint_drift.shape == (60,)
        assert np.all(np.isfinite(res.objective))
        path = tmp_path / "trace.csv"
        res.trace_to_csv(path)
        assert path.read_text().splitlines()[0] == "iter,objective,constraint_drift"

    def test_stepsize_schedule(self):
        p = IvdstParams(eta=4.0, decay=0.99, decay_every=50)
        assert p.eta_at(1) == 4.0 and p.eta_at(50) == 4.0
        assert np.isclose(p.eta_at(51), 3.96)
        assert np.isclose(p.eta_at(101), 4.0 * 0.99 ** 2)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            IvdstParams(eta=0.0)
        with pytest.raises(ValueError):
            IvdstParams(iters=0)
