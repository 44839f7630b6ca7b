"""Numerical certification of the hidden-state bounds.

A separable outcome-independent hidden-state model assigns each party's
outcomes probabilities generated by product states rho_l1 (x) rho_l2, with
Bob's answer a function of the hidden variables only.  The witness functional
is linear in each hidden state and in Bob's response distribution, so the
model's extreme points are pure product states with deterministic responses;
the supremum over those is the bound this module estimates.

Two routes: an alternating see-saw (each block update is an exact top
eigenvector or argmax, hence monotone), and a brute-force grid over
parametrized pure states at local dimension 2 or 3 as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qlinalg as ql
from .errors import DimensionMismatchError, ResourceGuardError, ValidationError
from .states import pairs_to_complex
from .witnesses import FAMILY_CCN, WitnessSpec, setting_operator

SEESAW_RESTARTS = 32
SEESAW_TOL = 1e-10
SEESAW_MAX_ITER = 500


@dataclass(frozen=True)
class ProductStrategy:
    """Pure hidden states for Alice's two subsystems plus Bob's response."""

    psi1: np.ndarray
    psi2: np.ndarray
    bob_response: int

    def __post_init__(self):
        for name in ("psi1", "psi2"):
            v = ql.as_complex(getattr(self, name)).ravel()
            nrm = float(np.linalg.norm(v))
            if abs(nrm - 1.0) > 1e-9:
                raise ValidationError(f"{name} unit norm", abs(nrm - 1.0))
            object.__setattr__(self, name, v)


@dataclass
class BoundResult:
    """Outcome of a bound optimization."""

    value: float
    strategy: ProductStrategy
    restarts_used: int
    iterations: int
    converged: bool
    history: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        from .states import complex_to_pairs

        return {
            "value": self.value,
            "restarts_used": self.restarts_used,
            "iterations": self.iterations,
            "converged": self.converged,
            "history": [float(v) for v in self.history],
            "strategy": {
                "psi1": complex_to_pairs(self.strategy.psi1),
                "psi2": complex_to_pairs(self.strategy.psi2),
                "bob_response": self.strategy.bob_response,
            },
        }


def _marginal_offsets(spec: WitnessSpec) -> np.ndarray:
    off = np.zeros(spec.bob_outcomes)
    off[0] = spec.c00
    return off


def sohs_value(spec: WitnessSpec, strat: ProductStrategy) -> float:
    """Witness value of one product strategy.

    c00 [b* = 0] + sum_{x,a} c(x, a, b*) <psi1 psi2| M_x^a |psi1 psi2>.
    Deterministic extremal strategies suffice for the bound by linearity.
    """
    d = spec.d
    if strat.psi1.size != d or strat.psi2.size != d:
        raise DimensionMismatchError(
            f"hidden states of sizes ({strat.psi1.size}, {strat.psi2.size}) do not match d = {d}"
        )
    if not 0 <= strat.bob_response < spec.bob_outcomes:
        raise DimensionMismatchError(f"bob_response {strat.bob_response} out of range")
    psi = np.kron(strat.psi1, strat.psi2)
    c_b = setting_operator(spec, strat.bob_response)
    value = float(np.vdot(psi, c_b @ psi).real)
    return value + float(_marginal_offsets(spec)[strat.bob_response])


def _conditional_operator(c_b: np.ndarray, other: np.ndarray, d: int, side: int) -> np.ndarray:
    """(1 (x) <psi|) C (1 (x) |psi>) for side 0, or the mirror for side 1."""
    t = c_b.reshape(d, d, d, d)
    if side == 0:
        e = np.einsum("j,ijkl,l->ik", np.conj(other), t, other)
    else:
        e = np.einsum("i,ijkl,k->jl", np.conj(other), t, other)
    return (e + ql.dagger(e)) / 2


def _top_eigvec(m: np.ndarray) -> np.ndarray:
    eig = ql.hermitian_eig(m)
    return eig.eigenvectors[:, -1]


def seesaw_bound(spec: WitnessSpec, restarts: int = SEESAW_RESTARTS, tol: float = SEESAW_TOL,
                 max_iter: int = SEESAW_MAX_ITER, seed: int = 0) -> BoundResult:
    """Alternating maximization over (psi1, psi2, b*) with seeded restarts.

    Per iteration psi1 is replaced by the top eigenvector of the conditional
    operator at fixed psi2, then symmetrically psi2, then b* by the exact
    argmax (lowest index on ties).  The per-iteration history is nondecreasing
    up to rounding; restarts are merged by taking the maximum.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    d = spec.d
    c_ops = [setting_operator(spec, b) for b in range(spec.bob_outcomes)]
    offsets = _marginal_offsets(spec)

    def best_response(psi1, psi2):
        psi = np.kron(psi1, psi2)
        vals = np.array([float(np.vdot(psi, c @ psi).real) for c in c_ops]) + offsets
        b = int(np.argmax(vals))
        return b, float(vals[b])

    best_value = -np.inf
    best_strategy = None
    best_history: list[float] = []
    best_converged = False
    total_iterations = 0

    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        psi1 = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi1 /= np.linalg.norm(psi1)
        psi2 = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi2 /= np.linalg.norm(psi2)
        b, value = best_response(psi1, psi2)
        history = [value]
        converged = False
        for _ in range(max_iter):
            total_iterations += 1
            psi1 = _top_eigvec(_conditional_operator(c_ops[b], psi2, d, side=0))
            psi2 = _top_eigvec(_conditional_operator(c_ops[b], psi1, d, side=1))
            b, new_value = best_response(psi1, psi2)
            history.append(new_value)
            if abs(new_value - value) < tol:
                value = new_value
                converged = True
                break
            value = new_value
        if value > best_value:
            best_value = value
            best_strategy = ProductStrategy(psi1, psi2, b)
            best_history = history
            best_converged = converged

    return BoundResult(
        value=best_value,
        strategy=best_strategy,
        restarts_used=restarts,
        iterations=total_iterations,
        converged=best_converged,
        history=best_history,
    )


# ---------------------------------------------------------------------------
# Brute-force grid oracle
# ---------------------------------------------------------------------------


def _grid_kets(d: int, resolution: int) -> np.ndarray:
    """Deterministic grid over pure states (global phase fixed).

    d = 2: Bloch angles theta in [0, pi], phi in [0, 2 pi).
    d = 3: nested hypersphere angles (two polar in [0, pi/2], two azimuthal).
    """
    if d == 2:
        thetas = np.linspace(0.0, np.pi, resolution)
        phis = np.linspace(0.0, 2.0 * np.pi, resolution, endpoint=False)
        th, ph = np.meshgrid(thetas, phis, indexing="ij")
        kets = np.stack(
            [np.cos(th / 2).ravel(), (np.sin(th / 2) * np.exp(1j * ph)).ravel()], axis=1
        )
        return kets
    if d == 3:
        polar = np.linspace(0.0, np.pi / 2, resolution)
        azim = np.linspace(0.0, 2.0 * np.pi, resolution, endpoint=False)
        t1, t2, p1, p2 = np.meshgrid(polar, polar, azim, azim, indexing="ij")
        kets = np.stack(
            [
                np.cos(t1).ravel(),
                (np.sin(t1) * np.cos(t2) * np.exp(1j * p1)).ravel(),
                (np.sin(t1) * np.sin(t2) * np.exp(1j * p2)).ravel(),
            ],
            axis=1,
        )
        return kets
    raise ResourceGuardError(f"grid oracle supports d = 2 or 3 only, got d = {d}")


def grid_bound(spec: WitnessSpec, resolution: int = 48) -> float:
    """Exhaustive scan over gridded product strategies and Bob responses.

    Independent of the see-saw route; cost grows as resolution^2 (d = 2) or
    resolution^4 (d = 3) states per side, so the dimension is guarded.
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    d = spec.d
    kets = _grid_kets(d, resolution)  # raises ResourceGuardError for d > 3
    n = kets.shape[0]
    offsets = _marginal_offsets(spec)

    best = -np.inf
    chunk = max(1, 2_000_000 // max(n, 1))
    for b in range(spec.bob_outcomes):
        c_b = setting_operator(spec, b)
        if not np.any(np.abs(c_b) > 0):
            best = max(best, float(offsets[b]))
            continue
        t = c_b.reshape(d, d, d, d)
        # contract the psi1 grid once: half[m, j, l] = <m_i| t[i j k l] |m_k>
        half = np.einsum("mi,ijkl,mk->mjl", np.conj(kets), t, kets, optimize=True)
        for lo in range(0, n, chunk):
            hi = min(lo + chunk, n)
            vals = np.einsum("nj,mjl,nl->mn", np.conj(kets[lo:hi]), half, kets[lo:hi],
                             optimize=True).real
            best = max(best, float(vals.max()) + float(offsets[b]))
    return best


def ccn_saturating_value(spec: WitnessSpec) -> float:
    """Value of the model saturating the Bell-basis bound: both sources emit
    classically correlated maximally mixed states (in the witness frame) and
    Bob announces the best relabeling of his product-basis outcome.

    Evaluates the model against the spec's actual measurement operators;
    equals 1/d exactly.
    """
    if spec.family != FAMILY_CCN:
        raise ValueError("the saturating model is specific to the Bell-basis family")
    d = spec.d
    uprime = pairs_to_complex(spec.provenance["Uprime"])
    udag = ql.dagger(uprime)
    total = 0.0
    stack = np.stack([np.asarray(e) for e in spec.alice_measurements[0].elements])
    for k in range(d):
        psi1 = udag[:, k]  # U'^dag |k>
        for l in range(d):
            psi2 = np.zeros(d, dtype=np.complex128)
            psi2[l] = 1.0
            psi = np.kron(psi1, psi2)
            probs = np.einsum("j,ajk,k->a", np.conj(psi), stack, psi).real
            total += (1.0 / d**2) * float(np.max(probs))
    return total
