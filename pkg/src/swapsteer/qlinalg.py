"""Dense complex linear algebra kernels.

Everything here operates on plain ``numpy`` arrays of ``complex128``.  The
decomposition kernels (Hermitian eigensolver, SVD) are implemented as Jacobi
rotation schemes: the matrices in this problem domain are tiny (at most
36 x 36 for local dimension 6), where cyclic Jacobi is numerically robust and
deterministic.  All functions are pure; identical inputs give identical
outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionMismatchError, ValidationError

# Absolute tolerance used by hermiticity / shape checks unless stated.
ATOL = 1e-9

_EIG_OFF_TOL = 1e-13      # off-diagonal Frobenius mass at convergence (unit scale)
_EIG_MAX_SWEEPS = 100
_SVD_PAIR_TOL = 1e-14     # relative column-coherence threshold
_SVD_MAX_SWEEPS = 60
_DEGENERACY_GAP = 1e-10   # eigenvalue cluster gap for canonicalization
_PHASE_ANCHOR = 1e-8      # smallest component magnitude used to fix a phase


def as_complex(m) -> np.ndarray:
    """Return ``m`` as a complex128 array, rejecting non-finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValidationError("finite entries", detail="array contains NaN or inf")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m.T)


def frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(m).ravel()))


def is_hermitian(m: np.ndarray, tol: float = ATOL) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and float(np.max(np.abs(m - dagger(m)))) <= tol


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; the first factor owns the slow (most significant) index."""
    return np.kron(as_complex(a), as_complex(b))


def kron_all(*ops: np.ndarray) -> np.ndarray:
    out = as_complex(ops[0])
    for op in ops[1:]:
        out = np.kron(out, as_complex(op))
    return out


def _check_square_bipartite(m: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    m = as_complex(m)
    da, db = dims
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != da * db:
        raise DimensionMismatchError(
            f"expected a square matrix of size {da * db} for dims {dims}, got shape {m.shape}"
        )
    return m


def partial_transpose(m: np.ndarray, dims: tuple[int, int], sys: str = "A") -> np.ndarray:
    """Transpose the indices of one subsystem of a bipartite operator.

    ``sys`` names the subsystem ("A" or "B") whose indices are transposed.
    Applying the map twice returns the input.
    """
    m = _check_square_bipartite(m, dims)
    da, db = dims
    t = m.reshape(da, db, da, db)
    if sys == "A":
        t = t.transpose(2, 1, 0, 3)
    elif sys == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError("sys must be 'A' or 'B'")
    return np.ascontiguousarray(t.reshape(da * db, da * db))


def partial_trace(m: np.ndarray, dims: tuple[int, int], sys: str = "B") -> np.ndarray:
    """Trace out subsystem ``sys``, returning the reduced operator on the other one."""
    m = _check_square_bipartite(m, dims)
    da, db = dims
    t = m.reshape(da, db, da, db)
    if sys == "B":
        return np.ascontiguousarray(np.einsum("ijkj->ik", t))
    if sys == "A":
        return np.ascontiguousarray(np.einsum("ijil->jl", t))
    raise ValueError("sys must be 'A' or 'B'")


# ---------------------------------------------------------------------------
# Hermitian eigendecomposition (cyclic complex Jacobi)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HermEig:
    """Spectral decomposition ``m = V diag(w) V^dag`` with ``w`` ascending."""

    eigenvalues: np.ndarray   # real, ascending
    eigenvectors: np.ndarray  # unit-norm columns, pairwise orthogonal


def _off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return frobenius(off)


def _jacobi_rotation(app: float, aqq: float, apq: complex):
    """Unitary 2x2 parameters (c, s, phase) zeroing the off-diagonal entry.

    For the Hermitian block [[app, apq], [conj(apq), aqq]] the returned
    rotation J = diag(1, e^{-i phase}) . [[c, -s], [s, c]] satisfies
    J^dag A J diagonal.
    """
    b = abs(apq)
    phase = apq / b
    theta = 0.5 * np.arctan2(2.0 * b, app - aqq)
    return np.cos(theta), np.sin(theta), phase


def hermitian_eig(m: np.ndarray, atol: float = ATOL) -> HermEig:
    """Full eigendecomposition of a Hermitian matrix via cyclic Jacobi sweeps.

    Eigenvalues are returned ascending.  Eigenvectors inside a degenerate
    cluster (gap below 1e-10 at unit scale) are canonicalized by Gram-Schmidt
    against computational-basis order, and every eigenvector's phase is fixed
    so that its first component of magnitude above 1e-8 is real positive.
    Raises ConvergenceError after 100 sweeps, ValidationError for
    non-Hermitian input.
    """
    m = as_complex(m)
    n = m.shape[0]
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    herm_dev = float(np.max(np.abs(m - dagger(m)))) if n else 0.0
    if herm_dev > atol:
        raise ValidationError("hermiticity", herm_dev)

    scale = max(1.0, frobenius(m))
    a = (m + dagger(m)) / 2.0  # symmetrize rounding dust away
    v = np.eye(n, dtype=np.complex128)
    off_tol = _EIG_OFF_TOL * scale
    skip_tol = 0.1 * off_tol / max(n, 1)

    converged = n <= 1 or _off_diagonal_norm(a) < off_tol
    sweeps = 0
    while not converged:
        if sweeps >= _EIG_MAX_SWEEPS:
            raise ConvergenceError(
                f"Jacobi eigensolver did not converge within {_EIG_MAX_SWEEPS} sweeps "
                f"(off-diagonal norm {_off_diagonal_norm(a):.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip_tol:
                    continue
                c, s, ph = _jacobi_rotation(a[p, p].real, a[q, q].real, apq)
                se = s * np.conj(ph)
                # columns: A <- A J,  V <- V J
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap + se * aq
                a[:, q] = -s * ap + c * np.conj(ph) * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp + se * vq
                v[:, q] = -s * vp + c * np.conj(ph) * vq
                # rows: A <- J^dag A
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap + s * ph * aq
                a[q, :] = -s * ap + c * ph * aq
        sweeps += 1
        converged = _off_diagonal_norm(a) < off_tol

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    v = _canonicalize_eigenvectors(w, v, gap=_DEGENERACY_GAP * scale)
    return HermEig(eigenvalues=w, eigenvectors=v)


def _canonical_subspace_basis(projector: np.ndarray, k: int) -> np.ndarray:
    """Deterministic orthonormal basis of a rank-k projector's range.

    Gram-Schmidt over the computational basis in index order; a candidate is
    accepted when its residual norm exceeds 1e-6.
    """
    n = projector.shape[0]
    basis: list[np.ndarray] = []
    for j in range(n):
        wv = projector[:, j].copy()
        for b in basis:
            wv -= np.vdot(b, wv) * b
        nrm = np.linalg.norm(wv)
        if nrm > 1e-6:
            basis.append(wv / nrm)
            if len(basis) == k:
                break
    if len(basis) != k:
        raise ConvergenceError("canonical basis extraction failed on a degenerate cluster")
    return np.column_stack(basis)


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    for x in vec:
        if abs(x) > _PHASE_ANCHOR:
            return vec * (np.conj(x) / abs(x))
    return vec


def _canonicalize_eigenvectors(w: np.ndarray, v: np.ndarray, gap: float) -> np.ndarray:
    n = len(w)
    v = v.copy()
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[stop - 1] < gap:
            stop += 1
        if stop - start > 1:
            block = v[:, start:stop]
            proj = block @ dagger(block)
            v[:, start:stop] = _canonical_subspace_basis(proj, stop - start)
        start = stop
    for j in range(n):
        v[:, j] = _fix_phase(v[:, j])
    return v


# ---------------------------------------------------------------------------
# Singular value decomposition (one-sided complex Jacobi)
# ---------------------------------------------------------------------------


def svd(m: np.ndarray):
    """SVD ``m = U diag(s) V^dag`` with singular values descending.

    One-sided Jacobi: columns of ``m`` are iteratively orthogonalized by
    right-rotations.  Returns (U, s, V) with U of shape (rows, k) and V of
    shape (cols, k), k = min(rows, cols); both have orthonormal columns.
    """
    m = as_complex(m)
    if m.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got shape {m.shape}")
    rows, cols = m.shape
    if rows < cols:
        v, s, u = svd(dagger(m))
        return u, s, v

    a = m.copy()
    v = np.eye(cols, dtype=np.complex128)
    scale = max(1.0, frobenius(m))
    zero_floor = (1e-15 * scale) ** 2

    for sweep in range(_SVD_MAX_SWEEPS + 1):
        rotated = False
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                app = float(np.vdot(a[:, p], a[:, p]).real)
                aqq = float(np.vdot(a[:, q], a[:, q]).real)
                apq = np.vdot(a[:, p], a[:, q])
                if app <= zero_floor or aqq <= zero_floor:
                    continue
                if abs(apq) <= _SVD_PAIR_TOL * np.sqrt(app * aqq):
                    continue
                rotated = True
                c, s, ph = _jacobi_rotation(app, aqq, apq)
                se = s * np.conj(ph)
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap + se * aq
                a[:, q] = -s * ap + c * np.conj(ph) * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp + se * vq
                v[:, q] = -s * vp + c * np.conj(ph) * vq
        if not rotated:
            break
        if sweep == _SVD_MAX_SWEEPS:
            raise ConvergenceError(f"Jacobi SVD did not converge within {_SVD_MAX_SWEEPS} sweeps")

    norms = np.sqrt(np.einsum("ij,ij->j", np.conj(a), a).real)
    order = np.argsort(-norms, kind="stable")
    norms = norms[order]
    a = a[:, order]
    v = v[:, order]

    u = np.zeros((rows, cols), dtype=np.complex128)
    sig_tol = 1e-13 * scale
    accepted: list[np.ndarray] = []
    for j in range(cols):
        if norms[j] > sig_tol:
            u[:, j] = a[:, j] / norms[j]
            accepted.append(u[:, j])
        else:
            norms[j] = abs(norms[j])
            u[:, j] = _complete_column(accepted, rows)
            accepted.append(u[:, j])
    return u, norms, v


def _complete_column(existing: list[np.ndarray], n: int) -> np.ndarray:
    """Deterministic unit vector orthogonal to all vectors in ``existing``."""
    for j in range(n):
        wv = np.zeros(n, dtype=np.complex128)
        wv[j] = 1.0
        for b in existing:
            wv -= np.vdot(b, wv) * b
        nrm = np.linalg.norm(wv)
        if nrm > 1e-6:
            return wv / nrm
    raise ConvergenceError("orthonormal completion failed")


# ---------------------------------------------------------------------------
# Schmidt decompositions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchmidtResult:
    """Vector Schmidt decomposition ``psi = sum_i c_i |left_i> |right_i>``."""

    coefficients: np.ndarray   # nonnegative, descending
    left_vectors: np.ndarray   # orthonormal columns
    right_vectors: np.ndarray  # orthonormal columns


@dataclass(frozen=True)
class OperatorSchmidt:
    """Operator Schmidt decomposition ``rho = sum_i c_i F_i (x) G_i``.

    ``left_ops[i]``/``right_ops[i]`` are Hilbert-Schmidt orthonormal, the
    coefficients are the singular values of the realignment map.
    """

    coefficients: np.ndarray
    left_ops: list
    right_ops: list


def schmidt(psi: np.ndarray, dims: tuple[int, int]) -> SchmidtResult:
    """Schmidt decomposition of a unit-norm bipartite ket.

    Coefficients are nonnegative descending; each left vector is phase-fixed
    (first component of magnitude > 1e-8 made real positive) and the right
    vectors absorb the residual phases.
    """
    psi = as_complex(psi).ravel()
    da, db = dims
    if psi.size != da * db:
        raise DimensionMismatchError(f"ket of length {psi.size} does not match dims {dims}")
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-8:
        raise ValidationError("unit norm", abs(nrm - 1.0))
    u, s, v = svd(psi.reshape(da, db))
    right = np.conj(v)
    left = u.copy()
    for j in range(len(s)):
        anchor = 1.0 + 0.0j
        for x in left[:, j]:
            if abs(x) > _PHASE_ANCHOR:
                anchor = x / abs(x)
                break
        left[:, j] = left[:, j] * np.conj(anchor)
        right[:, j] = right[:, j] * anchor
    return SchmidtResult(coefficients=s, left_vectors=left, right_vectors=right)


def realign(m: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    """Realignment map R(m)_{(i,k),(j,l)} = m_{(i,j),(k,l)}."""
    m = _check_square_bipartite(m, dims)
    da, db = dims
    return np.ascontiguousarray(
        m.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)
    )


def operator_schmidt(rho: np.ndarray, dims: tuple[int, int]) -> OperatorSchmidt:
    """Operator Schmidt decomposition via SVD of the realignment map."""
    da, db = dims
    u, s, v = svd(realign(rho, dims))
    left = [u[:, j].reshape(da, da) for j in range(len(s))]
    right = [np.conj(v[:, j]).reshape(db, db) for j in range(len(s))]
    return OperatorSchmidt(coefficients=s, left_ops=left, right_ops=right)


# ---------------------------------------------------------------------------
# Heisenberg-Weyl operator basis
# ---------------------------------------------------------------------------


def shift_matrix(d: int) -> np.ndarray:
    """Cyclic shift X |i> = |i+1 mod d>."""
    x = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        x[(i + 1) % d, i] = 1.0
    return x


def clock_matrix(d: int) -> np.ndarray:
    """Clock Z |i> = omega^i |i> with omega = exp(2 pi i / d)."""
    omega = np.exp(2j * np.pi / d)
    return np.diag(omega ** np.arange(d))


def hw_phase(i: int, j: int, D: int) -> complex:
    """Phase factor making each Heisenberg-Weyl element a proper observable."""
    return np.exp(1j * np.pi * i * j * (D - 1) / D)


def hw_basis(D: int) -> list:
    """The D^2 unitaries ``hw_phase(i,j,D) X^i Z^j``; HS-orthogonal with norm D."""
    if D < 2:
        raise ValueError("dimension must be at least 2")
    x = shift_matrix(D)
    z = clock_matrix(D)
    xpow = [np.eye(D, dtype=np.complex128)]
    zpow = [np.eye(D, dtype=np.complex128)]
    for _ in range(D - 1):
        xpow.append(xpow[-1] @ x)
        zpow.append(zpow[-1] @ z)
    return [hw_phase(i, j, D) * (xpow[i] @ zpow[j]) for i in range(D) for j in range(D)]


def hw_expand(w: np.ndarray) -> np.ndarray:
    """Coefficients lambda[i, j] of ``w`` in the Heisenberg-Weyl basis."""
    w = as_complex(w)
    D = w.shape[0]
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {w.shape}")
    basis = hw_basis(D)
    lam = np.empty((D, D), dtype=np.complex128)
    for i in range(D):
        for j in range(D):
            lam[i, j] = np.trace(dagger(basis[i * D + j]) @ w) / D
    return lam


def hw_reconstruct(lam: np.ndarray) -> np.ndarray:
    """Inverse of hw_expand."""
    lam = as_complex(lam)
    D = lam.shape[0]
    basis = hw_basis(D)
    out = np.zeros((D, D), dtype=np.complex128)
    for i in range(D):
        for j in range(D):
            out += lam[i, j] * basis[i * D + j]
    return out


def hw_hermiticity_residual(lam: np.ndarray) -> float:
    """Deviation of a coefficient table from the Hermitian-operator constraint.

    For Hermitian w the coefficients satisfy
    ``lambda[-i, -j] = conj(ph(-i,-j)) conj(ph(i,j)) omega^{ij} conj(lambda[i, j])``
    with indices mod D.  Returns the maximum absolute violation.
    """
    lam = as_complex(lam)
    D = lam.shape[0]
    omega = np.exp(2j * np.pi / D)
    worst = 0.0
    for i in range(D):
        for j in range(D):
            ii, jj = (-i) % D, (-j) % D
            factor = np.conj(hw_phase(ii, jj, D)) * np.conj(hw_phase(i, j, D)) * omega ** (i * j)
            worst = max(worst, abs(lam[ii, jj] - factor * np.conj(lam[i, j])))
    return worst
