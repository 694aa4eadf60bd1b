"""Random operators, states and channels for property batteries and tests."""

from __future__ import annotations

import numpy as np

from .models import CQChannel


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_psd(d: int, rng: np.random.Generator, rank: int | None = None,
               trace: float = 1.0) -> np.ndarray:
    """Random PSD matrix of the given rank (default full) and trace."""
    r = d if rank is None else rank
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    a = g @ g.conj().T
    a = 0.5 * (a + a.conj().T)
    return trace * a / np.trace(a).real


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    return random_psd(d, rng, rank, 1.0)


def random_effect(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random operator with spectrum in ``[0, 1]``; eigenvalues 0 and 1 occur with positive probability."""
    w = rng.uniform(0, 1, d)
    w[rng.uniform(size=d) < 0.15] = 0.0
    w[rng.uniform(size=d) < 0.15] = 1.0
    u = random_unitary(d, rng)
    a = (u * w) @ u.conj().T
    return 0.5 * (a + a.conj().T)


def random_prior(n: int, rng: np.random.Generator) -> np.ndarray:
    p = rng.dirichlet(np.ones(n))
    p[-1] = 1.0 - p[:-1].sum()
    return p


def random_cq_channel(n: int, d: int, rng: np.random.Generator, mixed: bool = True,
                      labels: list[str] | None = None) -> CQChannel:
    """Random channel with ``n`` symbols, ``d``-dimensional outputs and a random prior."""
    states = [random_density(d, rng, None if mixed else 1) for _ in range(n)]
    return CQChannel.from_states(states, random_prior(n, rng), labels)
