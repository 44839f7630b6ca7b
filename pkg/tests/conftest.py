"""Shared corpus helpers. All randomness is seeded through numpy's PCG64."""

import numpy as np
import pytest

from swapsteer import criteria, states


def random_hermitian(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (m + m.conj().T) / 2


def npt_state(dims, seed):
    """Rejection-sample a random density matrix with negative partial transpose."""
    for k in range(200):
        rho = states.random_density(dims, seed=[seed, k])
        if criteria.ppt_test(rho).is_npt:
            return rho
    raise RuntimeError(f"no NPT state found for dims {dims}, seed {seed}")


def npt_corpus(d, n, base_seed):
    return [npt_state((d, d), base_seed + i) for i in range(n)]


def aligned_corpus(d, n, base_seed):
    """Random states of the aligned diagonal form (entrywise-nonnegative PSD
    coefficient matrix); positivity forces the paired +/- coefficients equal."""
    out = []
    for i in range(n):
        rng = np.random.default_rng([base_seed, i])
        u = rng.dirichlet(np.ones(d))
        w = rng.dirichlet(np.ones(d))
        t = rng.uniform(0.3, 0.9)
        c = t * np.outer(u, u) + (1 - t) * np.outer(w, w)
        c = c / np.trace(c)
        lam_diag = np.diag(c)
        lam_off = np.array([c[m, n_] for m in range(d) for n_ in range(m + 1, d)])
        out.append(criteria.aligned_state(d, lam_diag, lam_off, lam_off))
    return out


@pytest.fixture(scope="session")
def npt_states_2x2():
    return npt_corpus(2, 5, base_seed=100)


@pytest.fixture(scope="session")
def npt_states_3x3():
    return npt_corpus(3, 5, base_seed=200)
