import numpy as np
import pytest

from upbbell import linalg
from upbbell.linalg import (
    basis_ket,
    hermitian_eigs,
    ket,
    partial_contraction,
    partial_transpose,
    tensor_product,
)

E = ket([1, 1]) / np.sqrt(2)
K0 = basis_ket(2, 0)
K1 = basis_ket(2, 1)


def rand_herm(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (m + m.conj().T) / 2


def rand_ket(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def shifts_projector():
    members = [
        [K0, K0, K0],
        [K1, E, E],
        [E, K1, ket([1, -1]) / np.sqrt(2)],
        [ket([1, -1]) / np.sqrt(2), ket([1, -1]) / np.sqrt(2), K1],
    ]
    pi = np.zeros((8, 8), dtype=complex)
    for m in members:
        v = tensor_product(m)
        pi += np.outer(v, v.conj())
    return pi


class TestTensorProduct:
    def test_basis_kets(self):
        v = tensor_product([K0, K0, K0])
        expected = np.zeros(8)
        expected[0] = 1
        assert np.allclose(v, expected)

    def test_identity_operators(self):
        assert np.allclose(tensor_product([np.eye(2), np.eye(2)]), np.eye(4))

    def test_one_e_e(self):
        # |1> (x) |e> (x) |e> puts weight 1/2 on indices 4..7
        v = tensor_product([K1, E, E])
        expected = np.zeros(8)
        expected[4:] = 0.5
        assert np.allclose(v, expected, atol=1e-12)

    def test_mixed_kinds_rejected(self):
        with pytest.raises(TypeError):
            tensor_product([K0, np.eye(2)])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            tensor_product([])

    def test_associativity(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            a, b, c = (rand_ket(rng, d) for d in (2, 3, 2))
            left = tensor_product([tensor_product([a, b]), c])
            right = tensor_product([a, tensor_product([b, c])])
            assert np.max(np.abs(left - right)) <= 1e-12


class TestHermitianEigs:
    def test_identity(self):
        vals, _ = hermitian_eigs(np.eye(2, dtype=complex))
        assert np.allclose(vals, [1, 1])

    def test_diagonal_sorted_descending(self):
        vals, _ = hermitian_eigs(np.diag([3.0, 1.0, -2.0]).astype(complex))
        assert np.allclose(vals, [3, 1, -2])

    def test_shifts_projector_spectrum(self):
        vals, _ = hermitian_eigs(shifts_projector())
        assert np.allclose(vals, [1, 1, 1, 1, 0, 0, 0, 0], atol=1e-9)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            hermitian_eigs(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_reconstruction_and_residual(self):
        rng = np.random.default_rng(5)
        for d in (2, 3, 8):
            m = rand_herm(rng, d)
            vals, vecs = hermitian_eigs(m)
            recon = sum(v * np.outer(w, w.conj()) for v, w in zip(vals, vecs))
            assert np.max(np.abs(recon - m)) <= 1e-8 * d
            for v, w in zip(vals, vecs):
                assert np.linalg.norm(m @ w - v * w) <= 1e-9 * d


class TestPartialTranspose:
    def test_empty_subset_identity(self):
        rng = np.random.default_rng(7)
        m = rand_herm(rng, 8)
        assert np.allclose(partial_transpose(m, [2, 2, 2], []), m)

    def test_involution(self):
        rng = np.random.default_rng(8)
        m = rand_herm(rng, 12)
        pt = partial_transpose(m, [2, 3, 2], [1])
        assert np.allclose(partial_transpose(pt, [2, 3, 2], [1]), m)

    def test_trace_preserved(self):
        rng = np.random.default_rng(9)
        m = rand_herm(rng, 8)
        pt = partial_transpose(m, [2, 2, 2], [0, 2])
        assert abs(np.trace(pt) - np.trace(m)) <= 1e-12

    def test_full_subset_is_transpose(self):
        rng = np.random.default_rng(10)
        m = rand_herm(rng, 4)
        assert np.allclose(partial_transpose(m, [2, 2], [0, 1]), m.T)

    def test_dim_mismatch_rejected(self):
        with pytest.raises(ValueError):
            partial_transpose(np.eye(6, dtype=complex), [2, 2, 2], [0])

    def test_upb_complement_state_is_ppt(self):
        # The normalized projector complementary to the Shifts span stays
        # positive under every single-party transpose.
        rho = (np.eye(8) - shifts_projector()) / 4
        for party in range(3):
            pt = partial_transpose(rho, [2, 2, 2], [party])
            vals, _ = hermitian_eigs(pt)
            assert vals[-1] >= -1e-10


class TestPartialContraction:
    def test_identity_any_kets(self):
        rng = np.random.default_rng(12)
        kets = [rand_ket(rng, 2), None, rand_ket(rng, 2)]
        a = partial_contraction(np.eye(8, dtype=complex), [2, 2, 2], kets)
        assert np.allclose(a, np.eye(2), atol=1e-12)

    def test_projector_slice(self):
        m = np.zeros((8, 8), dtype=complex)
        m[0, 0] = 1  # |000><000|
        a = partial_contraction(m, [2, 2, 2], [None, K0, K0])
        assert np.allclose(a, np.outer(K0, K0.conj()))

    def test_shifts_slice_bounds_epsilon(self):
        a = partial_contraction(shifts_projector(), [2, 2, 2], [None, K0, K0])
        vals, _ = hermitian_eigs(a)
        assert a.shape == (2, 2)
        assert -1e-10 <= vals[-1] <= 1.0 + 1e-10

    def test_agrees_with_full_expectation(self):
        rng = np.random.default_rng(13)
        dims = [2, 3, 2]
        for _ in range(100):
            m = rand_herm(rng, 12)
            kets = [rand_ket(rng, d) for d in dims]
            free = int(rng.integers(3))
            slots = [k if i != free else None for i, k in enumerate(kets)]
            a = partial_contraction(m, dims, slots)
            full = tensor_product(kets)
            expected = np.vdot(full, m @ full)
            got = np.vdot(kets[free], a @ kets[free])
            assert abs(got - expected) <= 1e-10

    def test_linearity(self):
        rng = np.random.default_rng(14)
        m1, m2 = rand_herm(rng, 8), rand_herm(rng, 8)
        kets = [None, rand_ket(rng, 2), rand_ket(rng, 2)]
        a = partial_contraction(2 * m1 + 3 * m2, [2, 2, 2], kets)
        b = 2 * partial_contraction(m1, [2, 2, 2], kets) + 3 * partial_contraction(m2, [2, 2, 2], kets)
        assert np.allclose(a, b, atol=1e-10)

    def test_slot_count_validated(self):
        with pytest.raises(ValueError):
            partial_contraction(np.eye(8, dtype=complex), [2, 2, 2], [None, None, K0])
        with pytest.raises(ValueError):
            partial_contraction(np.eye(8, dtype=complex), [2, 2, 2], [K0, K0, K0])


def test_ket_rejects_non_finite():
    with pytest.raises(ValueError):
        ket([np.nan, 0.0])
    with pytest.raises(ValueError):
        ket([np.inf, 0.0])


def test_assert_hermitian_tolerance():
    m = np.eye(2, dtype=complex)
    m[0, 1] = 1e-13
    linalg.assert_hermitian(m)  # within default tolerance
    m[0, 1] = 1e-6
    with pytest.raises(ValueError):
        linalg.assert_hermitian(m)
