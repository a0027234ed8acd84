import numpy as np
import pytest

import driftbeam as db
from driftbeam.tensor_ops import ModelMismatchError, apply_L, apply_L_adjoint

from conftest import random_tensor


class TestKhatriRaoReshaped:
    def test_all_ones(self):
        t = db.khatri_rao_reshaped(np.ones((3, 1), complex), np.ones((2, 1), complex))
        assert t.shape == (1, 3, 2)
        assert np.all(t == 1.0)

    def test_atom_structure(self, rng):
        m, l, n, f = 6, 3, 2, 0.27
        a = np.exp(2j * np.pi * f * np.arange(m))
        amat = np.tile(a[:, None], (1, n))
        bmat = (rng.standard_normal((l, n)) + 1j * rng.standard_normal((l, n)))
        t = db.khatri_rao_reshaped(amat, bmat)
        for k in range(n):
            assert np.allclose(t[k], np.outer(a, bmat[:, k]))

    def test_column_swap_swaps_slices(self, rng):
        a = rng.standard_normal((4, 3)) + 0j
        b = rng.standard_normal((2, 3)) + 0j
        t = db.khatri_rao_reshaped(a, b)
        ts = db.khatri_rao_reshaped(a[:, [1, 0, 2]], b[:, [1, 0, 2]])
        assert np.allclose(ts, t[[1, 0, 2]])

    def test_mismatch(self):
        with pytest.raises(ValueError):
            db.khatri_rao_reshaped(np.ones((3, 2), complex), np.ones((2, 3), complex))


class TestMeasurementOperator:
    def test_zero(self):
        basis = db.dpss_basis(6, 0.2, 2)
        assert np.all(apply_L(np.zeros((3, 6, 2), complex), basis) == 0)
        assert np.all(apply_L_adjoint(np.zeros((6, 3), complex), basis) == 0)

    def test_adjoint_hand_example(self):
        # all-ones mask, single column (1, 2, 3): slice rows repeat the column
        basis = db.DpssBasis(s=np.ones((3, 2)), lambdas=np.array([1.0, 1.0]),
                             m=3, l=2, w=0.25)
        x = np.array([[1.0], [2.0], [3.0]], dtype=complex)
        t = apply_L_adjoint(x, basis)
        assert np.allclose(t[0], [[1, 1], [2, 2], [3, 3]])

    def test_adjoint_identity(self, rng):
        for _ in range(20):
            m = int(rng.integers(4, 20))
            l = int(rng.integers(1, min(m, 6) + 1))
            n = int(rng.integers(1, 5))
            basis = db.dpss_basis(m, 0.49 * l / m if l < m else 0.45, l)
            x = random_tensor(rng, n, m, l)
            y = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
            lhs = np.vdot(y, apply_L(x, basis)).real
            rhs = np.vdot(apply_L_adjoint(y, basis), x).real
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    def test_linearity(self, rng):
        basis = db.dpss_basis(8, 0.2, 3)
        x = random_tensor(rng, 2, 8, 3)
        y = random_tensor(rng, 2, 8, 3)
        got = apply_L(2.0 * x + (1 - 3j) * y, basis)
        expect = 2.0 * apply_L(x, basis) + (1 - 3j) * apply_L(y, basis)
        assert np.allclose(got, expect, atol=1e-13)

    def test_dimension_mismatch(self):
        basis = db.dpss_basis(8, 0.2, 3)
        with pytest.raises(ValueError):
            apply_L(np.zeros((2, 8, 4), complex), basis)
        with pytest.raises(ValueError):
            apply_L_adjoint(np.zeros((7, 2), complex), basis)


class TestToeplitz:
    def test_unit_first_column_is_identity(self):
        u = np.zeros(5, complex)
        u[0] = 1.0
        assert np.allclose(db.toeplitz_hermitian(u), np.eye(5))

    def test_hermitian(self, rng):
        u = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        u[0] = u[0].real
        t = db.toeplitz_hermitian(u)
        assert np.allclose(t, t.conj().T)
        assert np.abs(np.linalg.eigvalsh(t).imag).max() == 0.0

    def test_complex_diagonal_rejected(self):
        with pytest.raises(ValueError):
            db.toeplitz_hermitian(np.array([1j, 0.0]))


class TestBlockToeplitz:
    def test_scalar(self):
        assert db.block_toeplitz(np.array([[2.0 + 0j]])) == np.array([[2.0 + 0j]])

    def test_even_generator_rejected(self):
        with pytest.raises(ValueError):
            db.block_toeplitz(np.ones((4, 3), complex))

    def test_hermitian_generator_gives_hermitian_matrix(self, rng):
        m, l = 4, 3
        g = rng.standard_normal((2 * m - 1, 2 * l - 1)) + \
            1j * rng.standard_normal((2 * m - 1, 2 * l - 1))
        g = 0.5 * (g + np.conj(g[::-1, ::-1]))
        big = db.block_toeplitz(g)
        assert np.allclose(big, big.conj().T)
        assert np.abs(np.linalg.eigvalsh(big) -
                      np.sort(np.linalg.eigvals(big).real)).max() < 1e-9

    def test_single_atom_outer_product(self):
        # flat-modulus linear-phase coefficients keep the lifted outer
        # product exactly two-level Toeplitz
        m, l, f, g = 5, 3, 0.21, 0.37
        a = np.exp(2j * np.pi * f * np.arange(m))
        alpha = np.exp(2j * np.pi * g * np.arange(l)) / np.sqrt(l)
        v = np.kron(a, alpha)
        outer = np.outer(v, v.conj())
        dm = np.arange(-(m - 1), m)[:, None]
        dl = np.arange(-(l - 1), l)[None, :]
        gen = np.exp(2j * np.pi * (f * dm + g * dl)) / l
        assert np.allclose(db.block_toeplitz(gen), outer)


class TestLiftExact:
    def test_empty_is_zero(self):
        basis = db.dpss_basis(8, 0.1, 2)
        cfg = db.ArrayConfig.uniform(3)
        t = db.lift_exact([], cfg, basis)
        assert t.shape == (3, 8, 2) and np.all(t == 0)

    def test_single_static_source_measures_back(self):
        # generous margin l - 2mw puts the in-band tone residual below 1e-8
        m = 48
        cfg = db.ArrayConfig.uniform(3)
        basis = db.dpss_basis(m, 0.02, 14)
        spec = db.SourceSpec(25.0, 0.3, db.make_offset("static", m, value=0.002))
        t = db.lift_exact([spec], cfg, basis)
        for k in range(3):  # rank-one slices
            sv = np.linalg.svd(t[k], compute_uv=False)
            assert sv[1] / sv[0] < 1e-12
        x = db.build_data_matrix([spec], cfg, m)
        assert np.linalg.norm(apply_L(t, basis) - x) / np.linalg.norm(x) < 1e-8

    def test_reference_static_scene_fit(self):
        m = 120
        cfg = db.ArrayConfig.uniform(4)
        basis = db.dpss_basis(m, 0.012, 7)
        specs = [db.SourceSpec(a, f, db.make_offset("static", m, value=v))
                 for a, f, v in zip((-20, -60, 20), (0.1, 0.3, 0.5),
                                    (0.003, -0.002, 0.004))]
        t = db.lift_exact(specs, cfg, basis)
        x = db.build_data_matrix(specs, cfg, m)
        assert np.linalg.norm(x - apply_L(t, basis)) / np.linalg.norm(x) < 1e-3

    def test_mismatch_raises_with_residual(self):
        m = 64
        cfg = db.ArrayConfig.uniform(2)
        basis = db.dpss_basis(m, 0.005, 1)  # band far narrower than the drift
        spec = db.SourceSpec(0.0, 0.2, db.make_offset("linear", m, slope=2e-3))
        with pytest.raises(ModelMismatchError) as err:
            db.lift_exact([spec], cfg, basis)
        assert err.value.residual > 0.05
