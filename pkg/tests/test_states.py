import json

import numpy as np
import pytest

from swapsteer import qlinalg as ql
from swapsteer import states as st
from swapsteer.errors import ValidationError


def test_max_entangled_d2():
    phi = st.max_entangled(2)
    expected = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    assert np.max(np.abs(phi.amplitudes - expected)) < 1e-15


def test_max_entangled_marginals():
    for d in (2, 3, 5):
        proj = st.max_entangled(d).projector()
        for sys in ("A", "B"):
            red = ql.partial_trace(proj, (d, d), sys)
            assert np.max(np.abs(red - np.eye(d) / d)) < 1e-12


def test_max_entangled_normalized():
    for d in (2, 4, 6):
        assert abs(np.linalg.norm(st.max_entangled(d).amplitudes) - 1) < 1e-12


def test_gen_pauli_d2():
    assert np.max(np.abs(st.gen_pauli_z(2) - np.diag([1.0 + 0j, -1.0]))) < 1e-15
    assert np.array_equal(st.gen_pauli_x(2), np.array([[0, 1], [1, 0]], dtype=complex))


def test_gen_pauli_cyclicity():
    for d in (2, 3, 5):
        x = st.gen_pauli_x(d)
        z = st.gen_pauli_z(d)
        assert np.max(np.abs(np.linalg.matrix_power(x, d) - np.eye(d))) < 1e-12
        assert np.max(np.abs(np.linalg.matrix_power(z, d) - np.eye(d))) < 1e-12


def test_weyl_commutation():
    for d in (2, 3, 4, 6):
        x = st.gen_pauli_x(d)
        z = st.gen_pauli_z(d)
        omega = np.exp(2j * np.pi / d)
        assert np.max(np.abs(z @ x - omega * x @ z)) < 1e-12


def test_bell_basis_d2():
    kets = st.bell_basis(2)
    # (l1, l2) = (0, 0) is phi+, (1, 0) applies Z to the first qubit
    phi_plus = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    phi_minus = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2)
    assert np.max(np.abs(kets[0].amplitudes - phi_plus)) < 1e-12
    assert np.max(np.abs(kets[2].amplitudes - phi_minus)) < 1e-12


def test_bell_basis_gram_identity_d3():
    kets = st.bell_basis(3)
    gram = np.array(
        [[np.vdot(a.amplitudes, b.amplitudes) for b in kets] for a in kets]
    )
    assert np.max(np.abs(gram - np.eye(9))) < 1e-12


def test_bell_basis_resolves_identity():
    for d in (2, 3):
        total = sum(k.projector() for k in st.bell_basis(d))
        assert np.max(np.abs(total - np.eye(d * d))) < 1e-10


def test_isotropic_endpoints():
    d = 3
    assert np.max(np.abs(st.isotropic(d, 1.0).matrix - st.max_entangled(d).projector())) < 1e-12
    assert np.max(np.abs(st.isotropic(d, 0.0).matrix - np.eye(9) / 9)) < 1e-12
    with pytest.raises(ValueError):
        st.isotropic(2, 1.5)


def test_isotropic_npt_threshold():
    # oracle: numpy eigensolve of the partial transpose; NPT iff v > 1/3 at d = 2
    for v in (0.0, 0.2, 0.3333333, 0.34, 0.5, 1.0):
        rho = st.isotropic(2, v)
        min_eig = np.linalg.eigvalsh(ql.partial_transpose(rho.matrix, (2, 2), "A"))[0]
        assert (min_eig < -1e-9) == (v > 1.0 / 3.0 + 1e-7)


def test_werner_pt_closed_form():
    # min PT eigenvalue of the qubit Werner family is (1 - 3p)/4
    for p in (0.0, 0.2, 1.0 / 3.0, 0.6, 1.0):
        rho = st.werner_qubit(p)
        min_eig = np.linalg.eigvalsh(ql.partial_transpose(rho.matrix, (2, 2), "A"))[0]
        assert abs(min_eig - (1 - 3 * p) / 4) < 1e-12


def test_random_density_valid():
    for seed in range(10):
        rho = st.random_density((2, 3), seed=seed)
        assert np.linalg.eigvalsh(rho.matrix)[0] > -1e-12
        assert abs(np.trace(rho.matrix) - 1) < 1e-12


def test_random_separable_ppt_and_ccn():
    from swapsteer.criteria import ccn_test

    for seed in range(10):
        rho = st.random_separable((2, 2), seed=seed)
        min_eig = np.linalg.eigvalsh(ql.partial_transpose(rho.matrix, (2, 2), "A"))[0]
        assert min_eig > -1e-9
        assert ccn_test(rho).coefficient_sum <= 1 + 1e-9


def test_seeded_determinism():
    a = st.random_density((2, 2), seed=42)
    b = st.random_density((2, 2), seed=42)
    assert a.matrix.tobytes() == b.matrix.tobytes()
    assert np.array_equal(st.random_pure(3, 7), st.random_pure(3, 7))


def test_random_unitary():
    u = st.random_unitary(4, seed=3)
    assert np.max(np.abs(u @ u.conj().T - np.eye(4))) < 1e-12


def test_save_load_round_trip(tmp_path):
    rho = st.random_density((2, 3), seed=1)
    path = tmp_path / "state.json"
    st.save_state(rho, path)
    loaded = st.load_state(path)
    assert loaded.dims == (2, 3)
    assert np.max(np.abs(loaded.matrix - rho.matrix)) < 1e-15


def test_load_rejects_wrong_trace(tmp_path):
    rho = st.random_density((2, 2), seed=2)
    payload = {"dims": [2, 2], "matrix": st.complex_to_pairs(0.9 * rho.matrix)}
    path = tmp_path / "bad_trace.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(ValidationError) as err:
        st.load_state(path)
    assert "trace" in str(err.value)


def test_load_accepts_2x3(tmp_path):
    rho = st.random_density((2, 3), seed=3)
    path = tmp_path / "rect.json"
    st.save_state(rho, path)
    assert st.load_state(path).dims == (2, 3)


def test_load_rejects_malformed(tmp_path):
    path = tmp_path / "malformed.json"
    path.write_text("{this is not json")
    with pytest.raises(ValidationError) as err:
        st.load_state(path)
    assert "parse" in str(err.value)


def test_density_validator_rejects_nonpsd():
    m = np.diag([1.5, -0.5, 0.0, 0.0]).astype(complex)
    with pytest.raises(ValidationError) as err:
        st.DensityMatrix(m, (2, 2))
    assert "positive" in str(err.value)


def test_ket_validator():
    with pytest.raises(ValidationError):
        st.Ket(np.array([1.0, 1.0]), (1, 2))


def test_povm_validators():
    half = np.eye(2) / 2
    povm = st.Povm([half, half])
    assert len(povm) == 2
    with pytest.raises(ValidationError):
        st.Povm([half, half, half])  # does not sum to identity
    with pytest.raises(ValidationError):
        st.Povm([np.diag([1.5, 1.0]), np.diag([-0.5, 0.0])])  # negative element
