import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_complex(rng, shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def random_hermitian(rng, m, scale=1.0):
    b = random_complex(rng, (m, m), scale)
    return 0.5 * (b + b.conj().T)


def random_psd(rng, m, rank=None, scale=1.0):
    r = m if rank is None else rank
    b = random_complex(rng, (r, m), scale)
    return b.conj().T @ b


def random_projection(rng, m, rank):
    """Orthogonal projection of the given rank."""
    q, _ = np.linalg.qr(random_complex(rng, (m, m)))
    return q[:, :rank] @ q[:, :rank].conj().T


def random_invertible(rng, m, delta=0.3, cond_cap=50.0):
    while True:
        s = np.eye(m, dtype=np.complex128) + delta * random_complex(rng, (m, m)) / np.sqrt(m)
        if np.linalg.cond(s) <= cond_cap:
            return s
        delta *= 0.5


def orthogonal_partition(rng, m, k):
    """Mutually orthogonal projections E_1..E_k with sum I."""
    q, _ = np.linalg.qr(random_complex(rng, (m, m)))
    cuts = sorted(rng.choice(np.arange(1, m), size=k - 1, replace=False)) if k > 1 else []
    bounds = [0, *cuts, m]
    return [
        q[:, a:b] @ q[:, a:b].conj().T
        for a, b in zip(bounds, bounds[1:])
    ]
