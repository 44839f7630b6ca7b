"""Simulation of the two-source no-input steering scenario.

Two independent sources feed Alice and Bob: S1 emits a state on A1 B1, S2 on
A2 B2.  Alice measures the composite A1 A2, Bob measures B1 B2.  The canonical
system ordering after permutation is A1 A2 (x) B1 B2; every POVM is expressed
in that ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qlinalg as ql
from .errors import DimensionMismatchError, PreconditionError
from .states import DensityMatrix, Povm, bell_basis, max_entangled, pairs_to_complex
from .witnesses import (
    FAMILY_CCN,
    FAMILY_NPT,
    FAMILY_UNIVERSAL,
    CorrelationTable,
    WitnessSpec,
    eval_witness,
)

NULL_EVENT_TOL = 1e-12
_DUST = 1e-14


@dataclass(frozen=True)
class Scenario:
    """Sources plus fixed measurements; Alice may have several settings."""

    rho1: DensityMatrix
    rho2: DensityMatrix
    alice: list   # list[Povm] on A1 A2
    bob: Povm     # on B1 B2

    def __post_init__(self):
        da = self.rho1.dims[0] * self.rho2.dims[0]
        db = self.rho1.dims[1] * self.rho2.dims[1]
        for x, povm in enumerate(self.alice):
            if povm.dim != da:
                raise DimensionMismatchError(
                    f"Alice POVM {x} acts on dimension {povm.dim}, sources give {da}"
                )
        if self.bob.dim != db:
            raise DimensionMismatchError(
                f"Bob POVM acts on dimension {self.bob.dim}, sources give {db}"
            )

    @property
    def alice_dims(self) -> tuple[int, int]:
        return (self.rho1.dims[0], self.rho2.dims[0])

    @property
    def bob_dims(self) -> tuple[int, int]:
        return (self.rho1.dims[1], self.rho2.dims[1])


def scenario_to_json_dict(s: Scenario) -> dict:
    from .states import complex_to_pairs

    return {
        "rho1": {"dims": list(s.rho1.dims), "matrix": complex_to_pairs(s.rho1.matrix)},
        "rho2": {"dims": list(s.rho2.dims), "matrix": complex_to_pairs(s.rho2.matrix)},
        "alice": [
            {"labels": p.labels, "elements": [complex_to_pairs(e) for e in p.elements]}
            for p in s.alice
        ],
        "bob": {"labels": s.bob.labels, "elements": [complex_to_pairs(e) for e in s.bob.elements]},
    }


def scenario_from_json_dict(payload: dict) -> Scenario:
    def povm(block):
        return Povm([pairs_to_complex(e) for e in block["elements"]], list(block["labels"]))

    return Scenario(
        rho1=DensityMatrix(pairs_to_complex(payload["rho1"]["matrix"]),
                           tuple(payload["rho1"]["dims"])),
        rho2=DensityMatrix(pairs_to_complex(payload["rho2"]["matrix"]),
                           tuple(payload["rho2"]["dims"])),
        alice=[povm(p) for p in payload["alice"]],
        bob=povm(payload["bob"]),
    )


def permute_to_scenario(rho1: DensityMatrix, rho2: DensityMatrix) -> np.ndarray:
    """Tensor the sources and reorder A1 B1 A2 B2 -> A1 A2 B1 B2."""
    a1, b1 = rho1.dims
    a2, b2 = rho2.dims
    m = ql.kron(rho1.matrix, rho2.matrix)
    t = m.reshape(a1, b1, a2, b2, a1, b1, a2, b2)
    t = t.transpose(0, 2, 1, 3, 4, 6, 5, 7)
    n = a1 * a2 * b1 * b2
    return np.ascontiguousarray(t.reshape(n, n))


def permute_from_scenario(m: np.ndarray, dims: tuple[int, int, int, int]) -> np.ndarray:
    """Inverse reordering A1 A2 B1 B2 -> A1 B1 A2 B2 (for round-trip checks)."""
    a1, a2, b1, b2 = dims
    n = a1 * a2 * b1 * b2
    m = ql.as_complex(m)
    if m.shape != (n, n):
        raise DimensionMismatchError(f"matrix of shape {m.shape} does not match dims {dims}")
    t = m.reshape(a1, a2, b1, b2, a1, a2, b1, b2)
    t = t.transpose(0, 2, 1, 3, 4, 6, 5, 7)
    return np.ascontiguousarray(t.reshape(n, n))


def correlations(s: Scenario) -> CorrelationTable:
    """Born-rule table p(a, b | x) = Tr[(M_x^a (x) N^b) rho], with Bob marginals.

    Probabilities below 1e-14 in magnitude are clipped to zero.
    """
    state = permute_to_scenario(s.rho1, s.rho2)
    da = s.rho1.dims[0] * s.rho2.dims[0]
    db = s.rho1.dims[1] * s.rho2.dims[1]
    t = state.reshape(da, db, da, db)

    n_b = len(s.bob)
    bob_stack = np.stack(s.bob.elements)
    tables = []
    for povm in s.alice:
        alice_stack = np.stack(povm.elements)
        # p(a,b) = M[a, i', i] rho[i, j, i', j'] N[b, j', j]
        p = np.einsum("api,ijpq,bqj->ab", alice_stack, t, bob_stack, optimize=True)
        imag = float(np.max(np.abs(p.imag)))
        if imag > 1e-9:
            raise ValueError(f"Born probabilities acquired imaginary part {imag:.3e}")
        pr = p.real
        pr[np.abs(pr) < _DUST] = 0.0
        tables.append(pr)
    probs = np.stack(tables)
    marginal = probs[0].sum(axis=0)
    marginal[np.abs(marginal) < _DUST] = 0.0
    return CorrelationTable(probs, marginal)


def swap_postselect(rho1: DensityMatrix, rho2: DensityMatrix,
                    bob_element: np.ndarray) -> tuple[DensityMatrix, float]:
    """Alice's state after post-selecting one of Bob's outcomes.

    Returns (normalized state on A1 A2, outcome probability).  Raises
    PreconditionError on probabilities below 1e-12: post-selecting on a null
    event would amplify numerical noise into the normalized state.
    """
    bob_element = ql.as_complex(bob_element)
    state = permute_to_scenario(rho1, rho2)
    da = rho1.dims[0] * rho2.dims[0]
    db = rho1.dims[1] * rho2.dims[1]
    if bob_element.shape != (db, db):
        raise DimensionMismatchError(
            f"Bob element of shape {bob_element.shape}, expected {(db, db)}"
        )
    t = state.reshape(da, db, da, db)
    unnorm = np.einsum("ijkl,lj->ik", t, bob_element)
    prob = float(np.trace(unnorm).real)
    if prob < NULL_EVENT_TOL:
        raise PreconditionError(f"post-selection probability {prob:.3e} is numerically null")
    post = (unnorm + ql.dagger(unnorm)) / (2.0 * prob)
    return DensityMatrix(post, (rho1.dims[0], rho2.dims[0])), prob


# ---------------------------------------------------------------------------
# Ideal strategies
# ---------------------------------------------------------------------------


def _bob_povm_from_element(m0: np.ndarray, dim: int) -> Povm:
    return Povm([m0, np.eye(dim, dtype=np.complex128) - m0], ["0", "1"])


def ideal_strategy(spec: WitnessSpec, rho: DensityMatrix) -> tuple[Scenario, float]:
    """Quantum strategy attaining the reported violation for a witness family.

    S1 emits ``rho``, S2 the maximally entangled state; Bob's measurement is
    fixed by the witness provenance.  Returns the scenario plus the
    closed-form predicted value:

    - npt:        -(1/d^2) Tr[(|eta><eta|)^{T_A} rho]
    - ccn:        Tr[(U' (x) V') rho (U' (x) V')^dag  |phi+><phi+|]
    - universal:  -(1/d^2) Tr(W rho)
    """
    d = spec.d
    if rho.dims != (d, d):
        raise DimensionMismatchError(f"state dims {rho.dims} do not match witness d = {d}")
    phi = max_entangled(d)
    phi_proj = phi.projector()
    eye = np.eye(d, dtype=np.complex128)

    if spec.family == FAMILY_NPT:
        v = pairs_to_complex(spec.provenance["V"])
        eta = pairs_to_complex(spec.provenance["eta"])
        conj = ql.kron(v, eye)
        m0 = ql.dagger(conj) @ phi_proj @ conj
        bob = _bob_povm_from_element(m0, d * d)
        w_npt = ql.partial_transpose(np.outer(eta, np.conj(eta)), (d, d), sys="A")
        predicted = -float(np.trace(w_npt @ rho.matrix).real) / (d * d)
    elif spec.family == FAMILY_CCN:
        vprime = pairs_to_complex(spec.provenance["Vprime"])
        uprime = pairs_to_complex(spec.provenance["Uprime"])
        conj = ql.kron(vprime, eye)
        elements = [
            ql.dagger(conj) @ np.conj(k.projector()) @ conj for k in bell_basis(d)
        ]
        bob = Povm(elements, [f"{l1},{l2}" for l1 in range(d) for l2 in range(d)])
        rot = ql.kron(uprime, vprime)
        rho_tilde = rot @ rho.matrix @ ql.dagger(rot)
        predicted = float(np.trace(rho_tilde @ phi_proj).real)
    elif spec.family == FAMILY_UNIVERSAL:
        bob = _bob_povm_from_element(phi_proj, d * d)
        w = pairs_to_complex(spec.provenance["W"])
        predicted = -float(np.trace(w @ rho.matrix).real) / (d * d)
    else:
        raise PreconditionError(f"unknown witness family {spec.family!r}")

    scenario = Scenario(
        rho1=rho,
        rho2=phi.to_density(),
        alice=spec.alice_measurements,
        bob=bob,
    )
    return scenario, predicted


def separable_source_check(spec: WitnessSpec, sep_state: DensityMatrix, which_source: int,
                           other_state: DensityMatrix, bob: Povm) -> float:
    """Witness value when one source is separable; must respect the bound.

    ``which_source`` says which slot (1 or 2) carries the separable state.
    The caller attests separability (e.g. output of random_separable).
    """
    if which_source not in (1, 2):
        raise ValueError("which_source must be 1 or 2")
    rho1, rho2 = (sep_state, other_state) if which_source == 1 else (other_state, sep_state)
    scenario = Scenario(rho1=rho1, rho2=rho2, alice=spec.alice_measurements, bob=bob)
    return eval_witness(spec, correlations(scenario))
