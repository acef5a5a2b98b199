import numpy as np
import pytest

from flujo.core.errors import ParameterError, ShapeError
from flujo.core.hilbert import (
    DOWN,
    IDENTITY2,
    SIGMA_X,
    SIGMA_Z,
    UP,
    FockCutoff,
    SpaceLayout,
    annihilator,
    basis_state,
    embed,
    flat_index,
    ket_to_dm,
    number_operator,
    partial_trace,
    site_permutation,
)


def test_cutoff_accepts_plain_int():
    assert FockCutoff.model_validate(4).n_max == 4
    assert FockCutoff.model_validate({"n_max": 2}).dim == 3


def test_layout_with_cavity():
    layout = SpaceLayout.qubits(2, FockCutoff(n_max=6))
    assert layout.dims == (2, 2, 7)
    assert layout.total_dim == 28
    assert layout.n_qubits == 2
    assert layout.cavity_site == 2
    assert layout.qubit_sites == (0, 1)


def test_layout_rejects_non_qubit_factors():
    with pytest.raises(ParameterError):
        SpaceLayout(dims=(3, 2))
    with pytest.raises(ParameterError):
        SpaceLayout(dims=(1,))


def test_check_qubit_rejects_cavity():
    layout = SpaceLayout.qubits(2, FockCutoff(n_max=1))
    with pytest.raises(ParameterError):
        layout.check_qubit(2)
    with pytest.raises(ParameterError):
        layout.check_site(5)


def test_flat_index_site_zero_is_most_significant():
    layout = SpaceLayout.qubits(2, FockCutoff(n_max=2))
    assert flat_index(layout, (DOWN, UP, 2)) == 1 * 6 + 0 * 3 + 2
    with pytest.raises(ParameterError):
        flat_index(layout, (0, 0, 3))
    with pytest.raises(ParameterError):
        flat_index(layout, (0, 0))


def test_embed_places_operator_on_site():
    layout = SpaceLayout.qubits(2)
    np.testing.assert_array_equal(embed(layout, 0, SIGMA_Z), np.kron(SIGMA_Z, IDENTITY2))
    np.testing.assert_array_equal(embed(layout, 1, SIGMA_X), np.kron(IDENTITY2, SIGMA_X))
    with pytest.raises(ShapeError):
        embed(layout, 0, np.eye(3))


def test_sigma_z_sign_convention():
    up = basis_state(SpaceLayout.qubits(1), (UP,))
    assert (up.conj().T @ SIGMA_Z @ up)[0, 0] == 1.0


def test_annihilator_and_number_operator():
    cutoff = FockCutoff(n_max=3)
    a = annihilator(cutoff)
    assert a[0, 1] == pytest.approx(1.0)
    assert a[2, 3] == pytest.approx(np.sqrt(3.0))
    np.testing.assert_allclose(a.conj().T @ a, number_operator(cutoff), atol=1e-14)


def test_ket_to_dm_normalizes():
    rho = ket_to_dm(np.array([1.0, 1.0j]))
    assert np.trace(rho).real == pytest.approx(1.0)
    assert rho[0, 1] == pytest.approx(-0.5j)


def test_partial_trace_of_product_state():
    layout = SpaceLayout.qubits(2, FockCutoff(n_max=1))
    rho_a = np.array([[0.7, 0.2], [0.2, 0.3]], dtype=np.complex128)
    rho_b = np.array([[0.4, 0.1j], [-0.1j, 0.6]], dtype=np.complex128)
    rho_c = np.diag([0.9, 0.1]).astype(np.complex128)
    rho = np.kron(np.kron(rho_a, rho_b), rho_c)
    np.testing.assert_allclose(partial_trace(layout, rho, [0]), rho_a, atol=1e-15)
    np.testing.assert_allclose(partial_trace(layout, rho, [1]), rho_b, atol=1e-15)
    np.testing.assert_allclose(partial_trace(layout, rho, [0, 1]), np.kron(rho_a, rho_b), atol=1e-15)


def test_partial_trace_of_entangled_pair_is_mixed():
    layout = SpaceLayout.qubits(2)
    ket = basis_state(layout, (UP, DOWN)) + basis_state(layout, (DOWN, UP))
    reduced = partial_trace(layout, ket_to_dm(ket), [1])
    np.testing.assert_allclose(reduced, np.eye(2) / 2.0, atol=1e-15)


def test_partial_trace_errors():
    layout = SpaceLayout.qubits(2)
    with pytest.raises(ParameterError):
        partial_trace(layout, np.eye(4), [])
    with pytest.raises(ShapeError):
        partial_trace(layout, np.eye(3), [0])


def test_site_permutation_swaps_factors():
    layout = SpaceLayout.qubits(2)
    a = np.array([[1, 2], [3, 4]], dtype=np.complex128)
    b = np.array([[5, 6j], [-6j, 7]], dtype=np.complex128)
    p = site_permutation(layout, (1, 0))
    np.testing.assert_allclose(p @ np.kron(a, b) @ p.conj().T, np.kron(b, a))
    with pytest.raises(ParameterError):
        site_permutation(layout, (0, 0))
