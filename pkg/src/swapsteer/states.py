"""Quantum state constructors, validators, seeded sampling, and file I/O.

States are immutable dataclasses wrapping complex numpy arrays together with
the bipartite dimension metadata (dA, dB).  All randomness flows through
numpy's PCG64 generator (``numpy.random.default_rng``), so a fixed seed gives
the same state on every platform.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import qlinalg as ql
from .errors import DimensionMismatchError, ValidationError

HERM_TOL = 1e-9
PSD_TOL = 1e-9
TRACE_TOL = 1e-9
NORM_TOL = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Ket:
    """Unit-norm pure state on C^dA (x) C^dB."""

    amplitudes: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        amps = ql.as_complex(self.amplitudes).ravel()
        da, db = self.dims
        if amps.size != da * db:
            raise DimensionMismatchError(
                f"ket of length {amps.size} does not match dims {self.dims}"
            )
        nrm = float(np.linalg.norm(amps))
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValidationError("unit norm", abs(nrm - 1.0))
        object.__setattr__(self, "amplitudes", _freeze(amps))
        object.__setattr__(self, "dims", (int(da), int(db)))

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, np.conj(self.amplitudes))

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector(), self.dims)


@dataclass(frozen=True)
class DensityMatrix:
    """Validated bipartite density operator."""

    matrix: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        m = ql.as_complex(self.matrix)
        da, db = self.dims
        if m.ndim != 2 or m.shape != (da * db, da * db):
            raise DimensionMismatchError(
                f"matrix of shape {m.shape} does not match dims {self.dims}"
            )
        herm = float(np.max(np.abs(m - ql.dagger(m))))
        if herm > HERM_TOL:
            raise ValidationError("hermiticity", herm)
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError("unit trace", abs(tr - 1.0))
        min_eig = float(ql.hermitian_eig(m).eigenvalues[0])
        if min_eig < -PSD_TOL:
            raise ValidationError("positive semidefiniteness", -min_eig)
        object.__setattr__(self, "matrix", _freeze(m))
        object.__setattr__(self, "dims", (int(da), int(db)))

    @property
    def dim_total(self) -> int:
        return self.dims[0] * self.dims[1]


@dataclass(frozen=True)
class Povm:
    """Positive operator-valued measure: PSD elements summing to the identity."""

    elements: list
    labels: list = field(default_factory=list)

    def __post_init__(self):
        elems = [ql.as_complex(e) for e in self.elements]
        if not elems:
            raise ValidationError("nonempty POVM")
        dim = elems[0].shape[0]
        total = np.zeros((dim, dim), dtype=np.complex128)
        for k, e in enumerate(elems):
            if e.shape != (dim, dim):
                raise DimensionMismatchError(f"POVM element {k} has shape {e.shape}")
            herm = float(np.max(np.abs(e - ql.dagger(e))))
            if herm > HERM_TOL:
                raise ValidationError(f"POVM element {k} hermiticity", herm)
            min_eig = float(ql.hermitian_eig(e).eigenvalues[0])
            if min_eig < -PSD_TOL:
                raise ValidationError(f"POVM element {k} positivity", -min_eig)
            total += e
        comp = float(np.max(np.abs(total - np.eye(dim))))
        if comp > HERM_TOL:
            raise ValidationError("POVM completeness", comp)
        labels = list(self.labels) if self.labels else [str(k) for k in range(len(elems))]
        if len(labels) != len(elems):
            raise ValidationError("POVM label count")
        object.__setattr__(self, "elements", [_freeze(e) for e in elems])
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


# ---------------------------------------------------------------------------
# Fixed constructors
# ---------------------------------------------------------------------------


def basis_ket(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=np.complex128)
    v[i] = 1.0
    return v


def max_entangled(d: int) -> Ket:
    """|phi+_d> = (1/sqrt(d)) sum_i |ii>."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    amps = np.zeros(d * d, dtype=np.complex128)
    for i in range(d):
        amps[i * d + i] = 1.0 / np.sqrt(d)
    return Ket(amps, (d, d))


def gen_pauli_x(d: int) -> np.ndarray:
    """Generalized shift X_d = sum_i |i+1><i| (index mod d)."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    return ql.shift_matrix(d)


def gen_pauli_z(d: int) -> np.ndarray:
    """Generalized clock Z_d = sum_i omega^i |i><i|."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    return ql.clock_matrix(d)


def bell_basis(d: int) -> list:
    """Orthonormal maximally entangled basis (X^l2 Z^l1 (x) 1) |phi+_d>.

    Ordered with l1 as the slow index; element (0, 0) is |phi+_d>.
    """
    phi = max_entangled(d).amplitudes
    x = gen_pauli_x(d)
    z = gen_pauli_z(d)
    eye = np.eye(d, dtype=np.complex128)
    kets = []
    for l1 in range(d):
        for l2 in range(d):
            op = np.linalg.matrix_power(x, l2) @ np.linalg.matrix_power(z, l1)
            kets.append(Ket(ql.kron(op, eye) @ phi, (d, d)))
    return kets


def isotropic(d: int, v: float) -> DensityMatrix:
    """v |phi+_d><phi+_d| + (1 - v) 1/d^2."""
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {v}")
    m = v * max_entangled(d).projector() + (1.0 - v) * np.eye(d * d) / (d * d)
    return DensityMatrix(m, (d, d))


def werner_qubit(p: float) -> DensityMatrix:
    """p |psi-><psi-| + (1 - p) 1/4 on two qubits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing parameter must lie in [0, 1], got {p}")
    singlet = np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2)
    m = p * np.outer(singlet, singlet.conj()) + (1.0 - p) * np.eye(4) / 4.0
    return DensityMatrix(m, (2, 2))


# ---------------------------------------------------------------------------
# Seeded random families
# ---------------------------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_pure(d: int, seed) -> np.ndarray:
    """Haar-random unit ket on C^d (normalized complex Gaussian)."""
    rng = _rng(seed)
    v = _ginibre(rng, d, 1).ravel()
    return v / np.linalg.norm(v)


def random_unitary(d: int, seed) -> np.ndarray:
    """Haar-random unitary via Gram-Schmidt of a Ginibre matrix."""
    rng = _rng(seed)
    g = _ginibre(rng, d, d)
    cols: list[np.ndarray] = []
    for j in range(d):
        w = g[:, j]
        for b in cols:
            w = w - np.vdot(b, w) * b
        cols.append(w / np.linalg.norm(w))
    return np.column_stack(cols)


def random_density(dims: tuple[int, int], seed) -> DensityMatrix:
    """Full-rank random state from the normalized Ginibre ensemble G G^dag."""
    rng = _rng(seed)
    n = dims[0] * dims[1]
    g = _ginibre(rng, n, n)
    m = g @ ql.dagger(g)
    return DensityMatrix(m / np.trace(m).real, dims)


def random_separable(dims: tuple[int, int], k_terms: int | None = None, seed=0) -> DensityMatrix:
    """Convex mixture of random product pure states with Dirichlet weights.

    Defaults to 2 dA dB terms, enough for generic interior points of the
    separable set.  Outputs are separable by construction, hence PPT and CCN.
    """
    rng = _rng(seed)
    da, db = dims
    if k_terms is None:
        k_terms = 2 * da * db
    weights = rng.dirichlet(np.ones(k_terms))
    m = np.zeros((da * db, da * db), dtype=np.complex128)
    for w in weights:
        a = random_pure(da, rng)
        b = random_pure(db, rng)
        v = np.kron(a, b)
        m += w * np.outer(v, v.conj())
    return DensityMatrix(m, dims)


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------


def complex_to_pairs(a: np.ndarray) -> list:
    """Nested [re, im] pairs for JSON serialization (row-major)."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 1:
        return [[float(x.real), float(x.imag)] for x in a]
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def pairs_to_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[-1] == 2:
        return arr[:, 0] + 1j * arr[:, 1]
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[:, :, 0] + 1j * arr[:, :, 1]
    raise ValidationError("complex pair layout", detail=f"got array of shape {arr.shape}")


def save_state(state: DensityMatrix, path) -> None:
    payload = {"dims": list(state.dims), "matrix": complex_to_pairs(state.matrix)}
    with open(path, "w") as fh:
        json.dump(payload, fh)


def save_ket(ket: Ket, path) -> None:
    payload = {"dims": list(ket.dims), "vector": complex_to_pairs(ket.amplitudes)}
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_state(path) -> DensityMatrix:
    """Parse and validate a density-matrix JSON file.

    Raises ValidationError both on malformed files and on matrices violating
    the state invariants; the message names the failing check.
    """
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError("state file parse", detail=str(exc)) from exc
    try:
        dims = tuple(int(x) for x in payload["dims"])
        matrix = pairs_to_complex(payload["matrix"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError("state file schema", detail=str(exc)) from exc
    if len(dims) != 2:
        raise ValidationError("state file schema", detail=f"dims must have two entries, got {dims}")
    return DensityMatrix(matrix, dims)  # may raise ValidationError naming the invariant


def load_ket(path) -> Ket:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError("ket file parse", detail=str(exc)) from exc
    try:
        dims = tuple(int(x) for x in payload["dims"])
        vec = pairs_to_complex(payload["vector"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError("ket file schema", detail=str(exc)) from exc
    return Ket(vec, dims)
