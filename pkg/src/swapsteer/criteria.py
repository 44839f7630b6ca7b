"""Entanglement criteria: PPT/NPT test, the partial-transpose witness, the
computable cross-norm (realignment) test, and verification of the aligned
diagonal operator-Schmidt form used by the swap-steering construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qlinalg as ql
from .errors import PreconditionError, ValidationError
from .states import DensityMatrix, Ket, complex_to_pairs

NPT_EIG_TOL = 1e-9
CCN_SUM_TOL = 1e-9
ALIGN_TOL = 1e-9


@dataclass(frozen=True)
class PptReport:
    """Minimal eigenvalue of rho^{T_A} together with its eigenvector."""

    min_eigenvalue: float
    eta: Ket
    is_npt: bool

    def to_json_dict(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "is_npt": self.is_npt,
            "eta": {"dims": list(self.eta.dims), "vector": complex_to_pairs(self.eta.amplitudes)},
        }


@dataclass(frozen=True)
class CcnReport:
    """Operator Schmidt coefficient sum (trace norm of the realignment)."""

    coefficient_sum: float
    coefficients: np.ndarray  # descending
    violates: bool

    def to_json_dict(self) -> dict:
        return {
            "coefficient_sum": self.coefficient_sum,
            "coefficients": [float(c) for c in self.coefficients],
            "violates": self.violates,
        }


def ppt_test(rho: DensityMatrix) -> PptReport:
    """Eigendecompose the partial transpose and report its minimal eigenvalue.

    When several eigenvalues are negative the most negative one is used; ties
    are broken by the eigensolver's deterministic canonicalization.
    """
    pt = ql.partial_transpose(rho.matrix, rho.dims, sys="A")
    eig = ql.hermitian_eig(pt)
    min_eig = float(eig.eigenvalues[0])
    eta = Ket(eig.eigenvectors[:, 0], rho.dims)
    return PptReport(min_eigenvalue=min_eig, eta=eta, is_npt=min_eig < -NPT_EIG_TOL)


def npt_entanglement_witness(rho: DensityMatrix) -> np.ndarray:
    """Witness W = (|eta><eta|)^{T_A} built from the negative PT eigenvector.

    Tr(W sigma) >= 0 for every separable sigma while Tr(W rho) < 0.  Raises
    PreconditionError when the state is PPT (no witness of this family).
    """
    report = ppt_test(rho)
    if not report.is_npt:
        raise PreconditionError(
            f"state is PPT (min PT eigenvalue {report.min_eigenvalue:.3e}); "
            "no partial-transpose witness exists"
        )
    return ql.partial_transpose(report.eta.projector(), rho.dims, sys="A")


def ccn_test(rho: DensityMatrix) -> CcnReport:
    dec = ql.operator_schmidt(rho.matrix, rho.dims)
    total = float(np.sum(dec.coefficients))
    return CcnReport(
        coefficient_sum=total,
        coefficients=dec.coefficients,
        violates=total > 1.0 + CCN_SUM_TOL,
    )


# ---------------------------------------------------------------------------
# Aligned form verification
# ---------------------------------------------------------------------------


def jbasis_labels(d: int) -> list[str]:
    labels = [f"J{m}" for m in range(d)]
    labels += [f"J+{m},{n}" for m in range(d) for n in range(m + 1, d)]
    labels += [f"J-{m},{n}" for m in range(d) for n in range(m + 1, d)]
    return labels


def jbasis(d: int) -> list:
    """Hermitian HS-orthonormal operator basis {J_m, J+_{m,n}, J-_{m,n}}.

    Fixed order: diagonal projectors first (m ascending), then the symmetric
    and antisymmetric off-diagonal elements in lexicographic (m, n).
    """
    ops = []
    for m in range(d):
        e = np.zeros((d, d), dtype=np.complex128)
        e[m, m] = 1.0
        ops.append(e)
    for m in range(d):
        for n in range(m + 1, d):
            e = np.zeros((d, d), dtype=np.complex128)
            e[m, n] = 1.0 / np.sqrt(2)
            e[n, m] = 1.0 / np.sqrt(2)
            ops.append(e)
    for m in range(d):
        for n in range(m + 1, d):
            e = np.zeros((d, d), dtype=np.complex128)
            e[m, n] = 1.0 / (1j * np.sqrt(2))
            e[n, m] = -1.0 / (1j * np.sqrt(2))
            ops.append(e)
    return ops


@dataclass(frozen=True)
class AlignedCoefficients:
    """Nonnegative expansion of an aligned state over the J product basis."""

    d: int
    lam_diag: np.ndarray    # lambda_m, length d
    lam_plus: np.ndarray    # lambda_{+,m,n} in lexicographic (m, n) order
    lam_minus: np.ndarray   # lambda_{-,m,n} in the same order

    @property
    def total(self) -> float:
        return float(np.sum(self.lam_diag) + np.sum(self.lam_plus) + np.sum(self.lam_minus))

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "lam_diag": [float(x) for x in self.lam_diag],
            "lam_plus": [float(x) for x in self.lam_plus],
            "lam_minus": [float(x) for x in self.lam_minus],
            "total": self.total,
        }


def verify_ccn_aligned(rho: DensityMatrix, U: np.ndarray, V: np.ndarray) -> AlignedCoefficients:
    """Check that (U (x) V) rho (U (x) V)^dag has the aligned diagonal form
    ``sum_m l_m J_m (x) J_m + sum l_{+-,m,n} J+-_{m,n} (x) (J+-_{m,n})^T``
    with nonnegative coefficients, and return them.

    Verification only: the aligning unitaries are supplied by the caller.
    Raises ValidationError naming the first off-form coefficient above 1e-9
    or any on-form coefficient below -1e-9.
    """
    da, db = rho.dims
    if da != db:
        raise PreconditionError("aligned form requires equal local dimensions")
    d = da
    U = ql.as_complex(U)
    V = ql.as_complex(V)
    for name, u in (("U", U), ("V", V)):
        dev = float(np.max(np.abs(u @ ql.dagger(u) - np.eye(d))))
        if u.shape != (d, d) or dev > 1e-9:
            raise ValidationError(f"{name} unitarity", dev)
    conj = ql.kron(U, V)
    rotated = conj @ rho.matrix @ ql.dagger(conj)

    ops = jbasis(d)
    labels = jbasis_labels(d)
    n_ops = len(ops)
    # T[i, j] = Tr[(E_i (x) E_j) rotated]; the aligned form is diagonal in
    # this basis with diag = (lam_m ..., lam_plus ..., -lam_minus ...).
    contracted = rotated.reshape(d, d, d, d)
    coeff = np.empty((n_ops, n_ops), dtype=np.complex128)
    for i, ei in enumerate(ops):
        partial = np.einsum("ab,aibj->ij", ei, contracted)
        for j, ej in enumerate(ops):
            coeff[i, j] = np.einsum("ab,ab->", ej, partial)
    imag_dev = float(np.max(np.abs(coeff.imag)))
    if imag_dev > ALIGN_TOL:
        raise ValidationError("real J-basis coefficients", imag_dev)
    t = coeff.real

    off = np.abs(t - np.diag(np.diag(t)))
    if np.max(off) > ALIGN_TOL:
        i, j = np.unravel_index(int(np.argmax(off)), off.shape)
        raise ValidationError(
            f"off-form coefficient ({labels[i]} x {labels[j]})", float(off[i, j])
        )

    n_pairs = d * (d - 1) // 2
    lam_diag = np.diag(t)[:d].copy()
    lam_plus = np.diag(t)[d:d + n_pairs].copy()
    lam_minus = -np.diag(t)[d + n_pairs:].copy()
    for name, arr in (("lambda_m", lam_diag), ("lambda_plus", lam_plus), ("lambda_minus", lam_minus)):
        if arr.size and float(np.min(arr)) < -ALIGN_TOL:
            raise ValidationError(f"negative aligned coefficient {name}", float(-np.min(arr)))
    return AlignedCoefficients(
        d=d,
        lam_diag=np.clip(lam_diag, 0.0, None),
        lam_plus=np.clip(lam_plus, 0.0, None),
        lam_minus=np.clip(lam_minus, 0.0, None),
    )


def aligned_state(d: int, lam_diag, lam_plus, lam_minus,
                  U: np.ndarray | None = None, V: np.ndarray | None = None) -> DensityMatrix:
    """Build a state of the aligned form, optionally hidden by local unitaries.

    The inverse of verify_ccn_aligned: given coefficient tables, synthesize
    ``(U (x) V)^dag [sum l_m J_m (x) J_m + sum l_+- J+- (x) (J+-)^T] (U (x) V)``.
    Positivity of the requested coefficient tables is the caller's burden; the
    DensityMatrix validator rejects non-physical combinations.
    """
    ops = jbasis(d)
    n_pairs = d * (d - 1) // 2
    lam_diag = np.asarray(lam_diag, dtype=np.float64)
    lam_plus = np.asarray(lam_plus, dtype=np.float64)
    lam_minus = np.asarray(lam_minus, dtype=np.float64)
    m = np.zeros((d * d, d * d), dtype=np.complex128)
    for k in range(d):
        m += lam_diag[k] * ql.kron(ops[k], ops[k])
    for k in range(n_pairs):
        e = ops[d + k]
        m += lam_plus[k] * ql.kron(e, e.T)
        e = ops[d + n_pairs + k]
        m += lam_minus[k] * ql.kron(e, e.T)
    if U is not None or V is not None:
        U = np.eye(d) if U is None else ql.as_complex(U)
        V = np.eye(d) if V is None else ql.as_complex(V)
        conj = ql.kron(U, V)
        m = ql.dagger(conj) @ m @ conj
    return DensityMatrix(m, (d, d))
