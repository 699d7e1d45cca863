"""Operator and state constructors."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles as orc
from weaklind import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    FockSpace,
    bloch_to_density,
    density_to_bloch,
    is_density,
    is_hermitian,
    jy_six_level,
    ladder,
    number_operator,
    pauli,
    pure_density,
    quadratures,
    sodium_jump_operators,
)
from weaklind.operators import NormTooLarge

unit_interval = st.floats(-1.0, 1.0, allow_nan=False)


def test_pauli_algebra():
    paulis = [pauli("x"), pauli("y"), pauli("z")]
    eye = np.eye(2)
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1
    for i in range(3):
        for j in range(3):
            expect = (i == j) * eye + 1j * sum(eps[i, j, k] * paulis[k] for k in range(3))
            assert np.allclose(paulis[i] @ paulis[j], expect, atol=1e-15)


def test_pauli_rejects_unknown_axis():
    with pytest.raises(ValueError):
        pauli("w")


def test_ladder_combinations():
    np.testing.assert_allclose(SIGMA_PLUS, (SIGMA_X + 1j * SIGMA_Y) / 2)
    np.testing.assert_allclose(SIGMA_MINUS, (SIGMA_X - 1j * SIGMA_Y) / 2)
    # basis is (|e>, |g>): sigma_minus de-excites
    e = np.array([1.0, 0.0])
    np.testing.assert_allclose(SIGMA_MINUS @ e, [0.0, 1.0])


@given(unit_interval, unit_interval, unit_interval)
def test_bloch_round_trip(x, y, z):
    r = np.array([x, y, z])
    n = np.linalg.norm(r)
    if n > 1.0:
        r = r / (n * 1.0000001)
    rho = bloch_to_density(r)
    assert is_density(rho, tol=1e-12)
    np.testing.assert_allclose(density_to_bloch(rho), r, atol=1e-12)


def test_bloch_rejects_long_vectors():
    with pytest.raises(NormTooLarge):
        bloch_to_density([1.0, 0.5, 0.0])


def test_pure_density_normalizes():
    rho = pure_density([3.0, 4.0j])
    assert abs(np.trace(rho) - 1.0) < 1e-15
    assert abs(rho[0, 0] - 0.36) < 1e-15
    with pytest.raises(ValueError):
        pure_density([0.0, 0.0])


def test_is_density_checks():
    assert is_density(np.eye(2) / 2)
    assert not is_density(np.eye(2))                       # trace 2
    assert not is_density(np.array([[1.5, 0], [0, -0.5]]))  # negative eigenvalue
    assert not is_density(np.array([[0.5, 0.5], [0.0, 0.5]]))  # not hermitian
    assert is_hermitian(SIGMA_Y)
    assert not is_hermitian(SIGMA_PLUS)


def test_fock_ladder_matrix_elements():
    space = FockSpace(n_max=6, omega_f=1.3)
    a, ad = ladder(space)
    assert space.dim == 7
    for n in range(1, 7):
        assert abs(a[n - 1, n] - np.sqrt(n)) < 1e-15
    np.testing.assert_allclose(ad, a.conj().T)
    comm = a @ ad - ad @ a
    # canonical commutator away from the truncation corner
    np.testing.assert_allclose(np.diag(comm)[:-1], np.ones(6), atol=1e-14)
    np.testing.assert_allclose(number_operator(space), ad @ a, atol=1e-14)


def test_quadrature_commutator():
    space = FockSpace(n_max=10, omega_f=0.7, hbar=2.0)
    Q, P = quadratures(space)
    comm = Q @ P - P @ Q
    np.testing.assert_allclose(np.diag(comm)[:-1], 1j * 2.0 * np.ones(10), atol=1e-13)
    assert is_hermitian(Q) and is_hermitian(P)


def test_jy_six_level_matches_ladder_construction():
    jy = jy_six_level()
    np.testing.assert_allclose(jy, orc.jy_oracle(), atol=1e-14)
    assert is_hermitian(jy)
    # block-diagonal: no mixing between the four excited and two ground levels
    assert np.abs(jy[:4, 4:]).max() == 0.0
    evs = np.sort(np.linalg.eigvalsh(jy[:4, :4]))
    np.testing.assert_allclose(evs, [-1.5, -0.5, 0.5, 1.5], atol=1e-12)
    evs_g = np.sort(np.linalg.eigvalsh(jy[4:, 4:]))
    np.testing.assert_allclose(evs_g, [-0.5, 0.5], atol=1e-12)


def test_sodium_jump_operators_structure():
    jumps = sodium_jump_operators()
    assert [tag for _, tag in jumps] == ["0", "-", "+"]
    oracle = orc.sodium_jumps_oracle()
    for (L, tag), q in zip(jumps, (0, -1, 1)):
        np.testing.assert_allclose(L, oracle[q], atol=1e-15)
        # decay only: excited manifold -> ground manifold
        assert np.abs(L[:4, :]).max() == 0.0
        assert np.abs(L[:, 4:]).max() == 0.0
    total = sum(L.conj().T @ L for L, _ in jumps)
    np.testing.assert_allclose(total, np.diag([1, 1, 1, 1, 0, 0]), atol=1e-14)
