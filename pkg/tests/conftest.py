import numpy as np
import pytest

import driftbeam as db
from driftbeam.tensor_ops import apply_L


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def exact_atom_instance(m=8, n=2, l=2, w=0.1, f1=0.3, seed=3, geometric=False):
    """Single-atom lifted tensor plus its measured data matrix.

    Returns (xstar, basis, tensor, c, f1, alpha_hat, b).  With geometric=True
    the coefficient vector has flat modulus and linear phase, which keeps the
    lifted outer product inside the block Toeplitz cone.
    """
    rng = np.random.default_rng(seed)
    basis = db.dpss_basis(m, w, l)
    if geometric:
        alpha = np.exp(2j * np.pi * rng.uniform() * np.arange(l)) / np.sqrt(l)
        c = float(rng.uniform(0.5, 2.0))
    else:
        alpha = rng.standard_normal(l) + 1j * rng.standard_normal(l)
        c = float(np.linalg.norm(alpha))
        alpha = alpha / np.linalg.norm(alpha)
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    b /= np.linalg.norm(b)
    a = np.exp(2j * np.pi * f1 * np.arange(m))
    tensor = np.stack([c * np.outer(a, alpha) * np.conj(b[k]) for k in range(n)])
    xstar = apply_L(tensor, basis)
    return xstar, basis, tensor, c, f1, alpha, b


def random_tensor(rng, n, m, l):
    return (rng.standard_normal((n, m, l)) + 1j * rng.standard_normal((n, m, l)))
