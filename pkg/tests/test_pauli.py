import numpy as np
import pytest

from chainflux.errors import EmptyChainError, ShapeError
from chainflux.pauli import (
    adjoint,
    anticommutator,
    commutator,
    embed,
    is_hermitian,
    kron_chain,
    pauli,
    trace,
)

SX, SY, SZ = pauli("x"), pauli("y"), pauli("z")


def test_pauli_product_cycle():
    assert np.allclose(SX @ SY, 1j * SZ)
    assert np.allclose(SY @ SZ, 1j * SX)
    assert np.allclose(SZ @ SX, 1j * SY)


def test_rotation_conjugation_table():
    sr = pauli("r")
    assert np.allclose(sr @ SX @ sr.conj().T, SY)
    assert np.allclose(sr @ SY @ sr.conj().T, SX)
    assert np.allclose(sr @ SZ @ sr.conj().T, -SZ)


def test_rotation_matrix_entries():
    assert np.array_equal(pauli("r"), np.array([[0, 1], [1j, 0]]))


def test_ladder_operators():
    assert np.array_equal(pauli("plus"), np.array([[0, 1], [0, 0]], dtype=complex))
    assert np.array_equal(pauli("minus"), np.array([[0, 0], [1, 0]], dtype=complex))
    assert np.allclose(pauli("plus"), 0.5 * (SX + 1j * SY))
    assert np.allclose(pauli("minus"), 0.5 * (SX - 1j * SY))


@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_squares_traceless_hermitian(axis):
    s = pauli(axis)
    assert np.allclose(s @ s, np.eye(2))
    assert trace(s) == 0
    assert is_hermitian(s)


def test_unknown_axis_rejected():
    with pytest.raises(ValueError):
        pauli("w")


def test_embed_leftmost_site_is_leading_factor():
    assert np.array_equal(embed(SZ, 1, 2), np.kron(SZ, np.eye(2)))
    assert np.array_equal(embed(SZ, 2, 2), np.kron(np.eye(2), SZ))


def test_embed_identity_any_site():
    for site in (1, 2, 3):
        assert np.array_equal(embed(pauli("identity"), site, 3), np.eye(8))


def test_embedded_pauli_traceless():
    assert trace(embed(SX, 2, 3)) == 0


def test_embed_commutes_for_distinct_sites():
    rng = np.random.default_rng(7)
    for _ in range(5):
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        left = embed(a, 1, 3) @ embed(b, 3, 3)
        right = embed(b, 3, 3) @ embed(a, 1, 3)
        assert np.allclose(left, right, atol=1e-13)


def test_embed_site_out_of_range():
    with pytest.raises(IndexError):
        embed(SX, 0, 2)
    with pytest.raises(IndexError):
        embed(SX, 3, 2)


def test_embed_requires_single_site_operator():
    with pytest.raises(ShapeError):
        embed(np.eye(4), 1, 2)


def test_kron_chain_x_involution():
    u = kron_chain([SX, SX])
    assert np.allclose(u @ u, np.eye(4))


def test_kron_chain_rotation_unitary():
    u = kron_chain([pauli("r")])
    assert np.allclose(adjoint(u) @ u, np.eye(2))


def test_kron_chain_against_index_arithmetic():
    # brute-force tensor product: out[(i1 i2), (j1 j2)] = a[i1,j1] * b[i2,j2]
    a, b = SX, SY
    expected = np.empty((4, 4), dtype=complex)
    for i1 in range(2):
        for i2 in range(2):
            for j1 in range(2):
                for j2 in range(2):
                    expected[(i1 << 1) | i2, (j1 << 1) | j2] = a[i1, j1] * b[i2, j2]
    assert np.array_equal(kron_chain([a, b]), expected)


def test_kron_chain_empty_rejected():
    with pytest.raises(EmptyChainError):
        kron_chain([])


def test_kron_chain_rejects_large_factor():
    with pytest.raises(ShapeError):
        kron_chain([np.eye(4)])


def test_commutator_identities():
    assert np.allclose(commutator(SX, SX), 0)
    assert np.allclose(anticommutator(SX, SY), 0)
    assert trace(SZ @ SZ) == 2


def test_commutators_cyclic_exact():
    assert np.array_equal(commutator(SX, SY), 2j * SZ)
    assert np.array_equal(commutator(SY, SZ), 2j * SX)
    assert np.array_equal(commutator(SZ, SX), 2j * SY)


def test_dimension_mismatch_rejected():
    with pytest.raises(ShapeError):
        commutator(SX, np.eye(4))
    with pytest.raises(ShapeError):
        anticommutator(np.eye(4), SX)


def test_adjoint_roundtrip_is_exact():
    rng = np.random.default_rng(11)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert np.array_equal(adjoint(adjoint(a)), a)


def test_is_hermitian_detects_ladder():
    assert not is_hermitian(pauli("plus"))
