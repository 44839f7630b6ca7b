"""Construction and evaluation of the three swap-steering witness families.

A witness is a coefficient table over (setting, Alice outcome, Bob outcome)
triples plus an optional Bob-marginal coefficient, together with Alice's
fixed measurement set and the analytic bound that any separable
outcome-independent hidden-state model obeys.

Families
--------
npt        one d^2-outcome measurement built from the negative eigenvector of
           the partial transpose; bound 0.
ccn        one Bell-basis measurement (up to local unitaries); coefficient
           table is the Kronecker delta over matched outcome pairs; bound 1/d.
universal  a tomographically complete family of Heisenberg-Weyl observables
           on the composite system, turning any entanglement witness W into a
           steering functional with bound 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import qlinalg as ql
from .criteria import ppt_test
from .errors import DimensionMismatchError, PreconditionError, ValidationError
from .states import (
    DensityMatrix,
    Povm,
    bell_basis,
    complex_to_pairs,
    max_entangled,
    pairs_to_complex,
)

COEFF_IMAG_TOL = 1e-9
GAMMA_RESIDUAL_TOL = 1e-8

FAMILY_NPT = "npt"
FAMILY_CCN = "ccn"
FAMILY_UNIVERSAL = "universal"


@dataclass(frozen=True)
class WitnessSpec:
    """A complete swap-steering witness.

    coefficients has shape (settings, alice_outcomes, bob_outcomes); c00
    multiplies Bob's marginal probability of outcome 0 (universal family
    only).  provenance carries every operator used in the construction so a
    simulation can be reproduced from the serialized spec alone.
    """

    family: str
    d: int
    alice_measurements: list          # list[Povm]
    bob_outcomes: int
    coefficients: np.ndarray
    sohs_bound: float
    c00: float = 0.0
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        coeff = np.asarray(self.coefficients, dtype=np.float64)
        expected = (len(self.alice_measurements), len(self.alice_measurements[0]), self.bob_outcomes)
        if coeff.shape != expected:
            raise DimensionMismatchError(
                f"coefficient table of shape {coeff.shape}, expected {expected}"
            )
        coeff = coeff.copy()
        coeff.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)

    @property
    def n_settings(self) -> int:
        return len(self.alice_measurements)

    @property
    def n_alice_outcomes(self) -> int:
        return len(self.alice_measurements[0])

    def alice_dim(self) -> int:
        return self.alice_measurements[0].dim


@dataclass(frozen=True)
class CorrelationTable:
    """Born-rule probabilities p(a, b | x) plus Bob's marginal p_B(b)."""

    probabilities: np.ndarray  # shape (settings, alice_outcomes, bob_outcomes)
    bob_marginal: np.ndarray   # shape (bob_outcomes,)

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=np.float64)
        if p.ndim != 3:
            raise DimensionMismatchError(f"probability table must be 3-d, got {p.shape}")
        if float(np.min(p)) < -1e-12:
            raise ValidationError("nonnegative probabilities", float(-np.min(p)))
        norm_dev = float(np.max(np.abs(p.sum(axis=(1, 2)) - 1.0)))
        if norm_dev > 1e-9:
            raise ValidationError("per-setting normalization", norm_dev)
        marg = np.asarray(self.bob_marginal, dtype=np.float64)
        marg_dev = float(np.max(np.abs(p.sum(axis=1) - marg[None, :])))
        if marg_dev > 1e-9:
            raise ValidationError("Bob marginal consistency", marg_dev)
        p = p.copy()
        p.setflags(write=False)
        marg = marg.copy()
        marg.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "bob_marginal", marg)

    @property
    def settings(self) -> int:
        return self.probabilities.shape[0]

    @property
    def alice_outcomes(self) -> int:
        return self.probabilities.shape[1]

    @property
    def bob_outcomes(self) -> int:
        return self.probabilities.shape[2]

    def to_json_dict(self) -> dict:
        return {
            "probabilities": self.probabilities.tolist(),
            "bob_marginal": self.bob_marginal.tolist(),
        }

    @staticmethod
    def from_json_dict(payload: dict) -> "CorrelationTable":
        return CorrelationTable(
            np.asarray(payload["probabilities"], dtype=np.float64),
            np.asarray(payload["bob_marginal"], dtype=np.float64),
        )


# ---------------------------------------------------------------------------
# NPT family
# ---------------------------------------------------------------------------


def npt_outcome_labels(d: int) -> list[str]:
    labels = [f"{m}" for m in range(d)]
    labels += [f"+{m},{n}" for m in range(d) for n in range(m + 1, d)]
    labels += [f"-{m},{n}" for m in range(d) for n in range(m + 1, d)]
    return labels


def _npt_projector_kets(d: int) -> list[np.ndarray]:
    """Kets |delta_m> = |mm> and |delta+-_{m,n}> = (|mn> +- |nm>)/sqrt(2).

    Ordered like npt_outcome_labels: diagonal, then symmetric, then
    antisymmetric pairs.
    """
    kets = []
    for m in range(d):
        v = np.zeros(d * d, dtype=np.complex128)
        v[m * d + m] = 1.0
        kets.append(v)
    for sign in (1.0, -1.0):
        for m in range(d):
            for n in range(m + 1, d):
                v = np.zeros(d * d, dtype=np.complex128)
                v[m * d + n] = 1.0 / np.sqrt(2)
                v[n * d + m] = sign / np.sqrt(2)
                kets.append(v)
    return kets


def build_npt_witness(rho: DensityMatrix) -> WitnessSpec:
    """Swap-steering witness for an NPT state.

    Pipeline: eigendecompose rho^{T_A}, Schmidt-decompose the negative
    eigenvector eta = sum_i alpha_i |e_i>|f_i|, and conjugate the fixed
    symmetric/antisymmetric projector measurement into the Schmidt frame.
    Alice's conjugation uses the entrywise conjugate of U = sum_i |i><e_i|;
    with that choice the ideal strategy reproduces -(1/d^2) Tr(W_NPT rho)
    exactly for complex Schmidt bases as well.  Coefficients: +alpha_m alpha_n
    on (-, m, n), -alpha_m alpha_n on (+, m, n), -alpha_m^2 on the diagonal
    outcomes, all for Bob outcome 0.  Bound: 0.
    """
    da, db = rho.dims
    if da != db:
        raise PreconditionError("the NPT construction requires equal local dimensions")
    d = da
    report = ppt_test(rho)
    if not report.is_npt:
        raise PreconditionError(
            f"state is PPT (min PT eigenvalue {report.min_eigenvalue:.3e}); "
            "the NPT family needs a negative partial transpose"
        )
    dec = ql.schmidt(report.eta.amplitudes, (d, d))
    alphas = dec.coefficients
    u_schmidt = ql.dagger(dec.left_vectors)    # maps |e_i> -> |i>
    v_schmidt = ql.dagger(dec.right_vectors)   # maps |f_i> -> |i>
    alice_unitary = np.conj(u_schmidt)

    conj = ql.kron(alice_unitary, np.eye(d))
    labels = npt_outcome_labels(d)
    elements = [
        ql.dagger(conj) @ np.outer(k, np.conj(k)) @ conj for k in _npt_projector_kets(d)
    ]
    povm = Povm(elements, labels)

    n_pairs = d * (d - 1) // 2
    coeff = np.zeros((1, d * d, 2), dtype=np.float64)
    for m in range(d):
        coeff[0, m, 0] = -float(alphas[m] ** 2)
    k = 0
    for m in range(d):
        for n in range(m + 1, d):
            coeff[0, d + k, 0] = -float(alphas[m] * alphas[n])           # (+, m, n)
            coeff[0, d + n_pairs + k, 0] = float(alphas[m] * alphas[n])  # (-, m, n)
            k += 1

    provenance = {
        "schmidt_coefficients": [float(a) for a in alphas],
        "U": complex_to_pairs(u_schmidt),
        "V": complex_to_pairs(v_schmidt),
        "alice_unitary": complex_to_pairs(alice_unitary),
        "eta": complex_to_pairs(report.eta.amplitudes),
        "min_pt_eigenvalue": report.min_eigenvalue,
    }
    return WitnessSpec(
        family=FAMILY_NPT,
        d=d,
        alice_measurements=[povm],
        bob_outcomes=2,
        coefficients=coeff,
        sohs_bound=0.0,
        c00=0.0,
        provenance=provenance,
    )


# ---------------------------------------------------------------------------
# CCN family
# ---------------------------------------------------------------------------


def build_ccn_witness(d: int, Uprime: np.ndarray | None = None,
                      Vprime: np.ndarray | None = None) -> WitnessSpec:
    """Bell-basis swap-steering witness; value = sum_l p(l, l), bound 1/d.

    Alice measures the maximally entangled basis conjugated by U'; V' (used by
    Bob's ideal measurement) is stored in the provenance.  Identity unitaries
    are the default.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    Uprime = np.eye(d, dtype=np.complex128) if Uprime is None else ql.as_complex(Uprime)
    Vprime = np.eye(d, dtype=np.complex128) if Vprime is None else ql.as_complex(Vprime)
    for name, u in (("Uprime", Uprime), ("Vprime", Vprime)):
        if u.shape != (d, d):
            raise DimensionMismatchError(f"{name} must be {d} x {d}, got {u.shape}")
        dev = float(np.max(np.abs(u @ ql.dagger(u) - np.eye(d))))
        if dev > 1e-9:
            raise ValidationError(f"{name} unitarity", dev)

    conj = ql.kron(Uprime, np.eye(d))
    kets = bell_basis(d)
    elements = [ql.dagger(conj) @ k.projector() @ conj for k in kets]
    labels = [f"{l1},{l2}" for l1 in range(d) for l2 in range(d)]
    povm = Povm(elements, labels)

    coeff = np.zeros((1, d * d, d * d), dtype=np.float64)
    for a in range(d * d):
        coeff[0, a, a] = 1.0

    provenance = {
        "Uprime": complex_to_pairs(Uprime),
        "Vprime": complex_to_pairs(Vprime),
    }
    return WitnessSpec(
        family=FAMILY_CCN,
        d=d,
        alice_measurements=[povm],
        bob_outcomes=d * d,
        coefficients=coeff,
        sohs_bound=1.0 / d,
        c00=0.0,
        provenance=provenance,
    )


# ---------------------------------------------------------------------------
# Universal family
# ---------------------------------------------------------------------------


def hw_generator_set(D: int) -> list[tuple[int, int]]:
    """One label per maximal cyclic subgroup of Z_D x Z_D, lexicographic scan.

    The powers of the chosen Heisenberg-Weyl observables reach every basis
    label, which is what the witness expansion needs; for prime D this reduces
    to the familiar D + 1 observables, for composite D more are required.
    """
    def order(i: int, j: int) -> int:
        return D // gcd(gcd(i, j), D)

    generators: list[tuple[int, int]] = []
    covered = {(0, 0)}
    for i in range(D):
        for j in range(D):
            if (i, j) in covered or order(i, j) != D:
                continue
            generators.append((i, j))
            for t in range(1, D):
                covered.add(((t * i) % D, (t * j) % D))
    return generators


def _hw_power_phase(g: tuple[int, int], t: int, D: int) -> complex:
    """gamma with B_g^t = gamma * B_{(t g) mod D}."""
    i, j = g
    omega = np.exp(2j * np.pi / D)
    acc = ql.hw_phase(i, j, D) ** t * omega ** (i * j * t * (t - 1) // 2)
    return acc * np.conj(ql.hw_phase((t * i) % D, (t * j) % D, D))


def _observable_povm(g: tuple[int, int], D: int) -> list[np.ndarray]:
    """Projective eigenbasis of the order-D observable B_g.

    Spectral projectors from the Fourier sum P_a = (1/D) sum_t w^{-at} B_g^t;
    exact and deterministic, no eigensolver involved.
    """
    x = ql.shift_matrix(D)
    z = ql.clock_matrix(D)
    b = ql.hw_phase(g[0], g[1], D) * (
        np.linalg.matrix_power(x, g[0]) @ np.linalg.matrix_power(z, g[1])
    )
    powers = [np.eye(D, dtype=np.complex128)]
    for _ in range(D - 1):
        powers.append(powers[-1] @ b)
    omega = np.exp(2j * np.pi / D)
    projectors = []
    for a in range(D):
        p = sum(omega ** (-a * t) * powers[t] for t in range(D)) / D
        projectors.append((p + ql.dagger(p)) / 2)
    return projectors


def build_universal_witness(W: np.ndarray, d: int, index_map: str = "derived") -> WitnessSpec:
    """Turn an entanglement witness W on C^d (x) C^d into a steering witness.

    W is expanded in the Heisenberg-Weyl basis of dimension D = d^2; Alice
    measures the eigenbases of a minimal generating set of HW observables and
    the per-outcome coefficients are fixed in closed form so that the
    hidden-state functional equals -Tr(W sigma) for every input state sigma
    (verified at build time; residual must stay below 1e-8).  The marginal
    coefficient is c00 = -lambda_00 and the bound is 0.

    index_map="printed" instead uses the legacy d^2 + 1 observable family
    with its fixed coefficient index pattern; the identity residual is then
    recorded in the provenance rather than enforced, since that pattern does
    not close the identity when d^2 is composite.
    """
    W = ql.as_complex(W)
    D = d * d
    if W.shape != (D, D):
        raise DimensionMismatchError(f"witness must be {D} x {D} for d = {d}, got {W.shape}")
    herm_dev = float(np.max(np.abs(W - ql.dagger(W))))
    if herm_dev > 1e-9:
        raise ValidationError("witness hermiticity", herm_dev)
    if index_map not in ("derived", "printed"):
        raise ValueError("index_map must be 'derived' or 'printed'")

    lam = ql.hw_expand(W)
    omega = np.exp(2j * np.pi / D)
    c00 = -float(lam[0, 0].real)

    if index_map == "derived":
        generators = hw_generator_set(D)
        assignment: dict[tuple[int, int], tuple[int, int]] = {}
        for x, g in enumerate(generators):
            for t in range(1, D):
                label = ((t * g[0]) % D, (t * g[1]) % D)
                if label != (0, 0) and label not in assignment:
                    assignment[label] = (x, t)
        coeff_c = np.zeros((len(generators), D), dtype=np.complex128)
        for label, (x, t) in assignment.items():
            mu = lam[label] * np.conj(_hw_power_phase(generators[x], t, D))
            coeff_c[x, :] -= mu * omega ** (t * np.arange(D))
    else:
        generators = [(0, 1)] + [(1, k) for k in range(D)]
        coeff_c = np.zeros((len(generators), D), dtype=np.complex128)
        for a in range(D):
            coeff_c[0, a] = -sum(lam[0, j] * omega ** (a * j) for j in range(1, D))
            for k in range(D):
                coeff_c[k + 1, a] = -sum(
                    lam[k, (k * j) % D] * omega ** (a * j) for j in range(1, D)
                )

    imag_dev = float(np.max(np.abs(coeff_c.imag)))
    if index_map == "derived" and imag_dev > COEFF_IMAG_TOL:
        raise ValidationError("coefficient reality", imag_dev)
    coeff_real = coeff_c.real

    povms = []
    for g in generators:
        projectors = _observable_povm(g, D)
        povms.append(Povm(projectors, [str(a) for a in range(D)]))

    # Build-time verification of the hidden-state identity:
    # c00 * 1 + sum_{x,a} c_{x,a} P_{x,a} must equal -W as an operator, which
    # is equivalent to the functional matching -Tr(W sigma) on a full operator
    # basis (product states span the whole operator space).
    residual_op = c00 * np.eye(D, dtype=np.complex128) + W
    for x, povm in enumerate(povms):
        for a in range(D):
            residual_op += coeff_real[x, a] * povm.elements[a]
    gamma_residual = float(np.max(np.abs(residual_op)))
    if index_map == "derived" and gamma_residual > GAMMA_RESIDUAL_TOL:
        raise ValidationError("hidden-state identity residual", gamma_residual)

    coeff = np.zeros((len(generators), D, 2), dtype=np.float64)
    coeff[:, :, 0] = coeff_real

    provenance = {
        "W": complex_to_pairs(W),
        "hw_coefficients": complex_to_pairs(lam),
        "generators": [list(g) for g in generators],
        "index_map": index_map,
        "gamma_residual": gamma_residual,
        "coefficient_imag_residual": imag_dev,
    }
    return WitnessSpec(
        family=FAMILY_UNIVERSAL,
        d=d,
        alice_measurements=povms,
        bob_outcomes=2,
        coefficients=coeff,
        sohs_bound=0.0,
        c00=c00,
        provenance=provenance,
    )


# ---------------------------------------------------------------------------
# Evaluation and serialization
# ---------------------------------------------------------------------------


def eval_witness(spec: WitnessSpec, corr: CorrelationTable) -> float:
    """c00 p_B(0) + sum over the coefficient table; pure arithmetic."""
    shape = (spec.n_settings, spec.n_alice_outcomes, spec.bob_outcomes)
    if corr.probabilities.shape != shape:
        raise DimensionMismatchError(
            f"correlation table shape {corr.probabilities.shape} does not match spec {shape}"
        )
    value = float(np.sum(spec.coefficients * corr.probabilities))
    value += spec.c00 * float(corr.bob_marginal[0])
    return value


def setting_operator(spec: WitnessSpec, b: int) -> np.ndarray:
    """C_b = sum_{x,a} c(x, a, b) M_{x,a}; the witness operator seen by a
    hidden product state when Bob answers b."""
    dim = spec.alice_dim()
    out = np.zeros((dim, dim), dtype=np.complex128)
    for x, povm in enumerate(spec.alice_measurements):
        for a, element in enumerate(povm.elements):
            c = spec.coefficients[x, a, b]
            if c != 0.0:
                out += c * element
    return out


def spec_to_json_dict(spec: WitnessSpec) -> dict:
    return {
        "family": spec.family,
        "d": spec.d,
        "sohs_bound": spec.sohs_bound,
        "c00": spec.c00,
        "bob_outcomes": spec.bob_outcomes,
        "alice_measurements": [
            {"labels": povm.labels, "elements": [complex_to_pairs(e) for e in povm.elements]}
            for povm in spec.alice_measurements
        ],
        "coefficients": [
            {"x": int(x), "a": int(a), "b": int(b), "c": float(spec.coefficients[x, a, b])}
            for x, a, b in zip(*np.nonzero(spec.coefficients))
        ],
        "provenance": spec.provenance,
    }


def spec_from_json_dict(payload: dict) -> WitnessSpec:
    try:
        povms = [
            Povm([pairs_to_complex(e) for e in m["elements"]], list(m["labels"]))
            for m in payload["alice_measurements"]
        ]
        bob_outcomes = int(payload["bob_outcomes"])
        coeff = np.zeros((len(povms), len(povms[0]), bob_outcomes), dtype=np.float64)
        for entry in payload["coefficients"]:
            coeff[int(entry["x"]), int(entry["a"]), int(entry["b"])] = float(entry["c"])
        return WitnessSpec(
            family=str(payload["family"]),
            d=int(payload["d"]),
            alice_measurements=povms,
            bob_outcomes=bob_outcomes,
            coefficients=coeff,
            sohs_bound=float(payload["sohs_bound"]),
            c00=float(payload.get("c00", 0.0)),
            provenance=dict(payload.get("provenance", {})),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError("witness spec schema", detail=str(exc)) from exc


def save_spec(spec: WitnessSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(spec_to_json_dict(spec), fh)


def load_spec(path) -> WitnessSpec:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError("witness spec parse", detail=str(exc)) from exc
    return spec_from_json_dict(payload)
