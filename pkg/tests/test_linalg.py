import numpy as np
import pytest

from chansim import linalg
from chansim.errors import DimensionError, DomainError, ResourceError


def rand_hermitian(rng, d):
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (h + h.conj().T) / 2


class TestHermEig:
    def test_pauli_z(self):
        w, v = linalg.herm_eig(np.diag([1.0, -1.0]))
        np.testing.assert_allclose(w, [-1.0, 1.0])

    def test_identity(self):
        w, _ = linalg.herm_eig(np.eye(3))
        np.testing.assert_allclose(w, np.ones(3))

    def test_reconstruction_random(self):
        rng = np.random.default_rng(0)
        h = rand_hermitian(rng, 4)
        eig = linalg.herm_eig(h)
        assert np.abs(eig.reconstruct() - h).max() <= 1e-10

    def test_non_square_rejected(self):
        with pytest.raises(DimensionError):
            linalg.herm_eig(np.ones((2, 3)))

    def test_reconstruction_and_unitarity_sweep(self):
        # 1000 random Hermitian matrices of dimension <= 16
        rng = np.random.default_rng(42)
        for _ in range(1000):
            d = int(rng.integers(1, 17))
            h = rand_hermitian(rng, d)
            w, v = linalg.herm_eig(h)
            assert list(w) == sorted(w)
            scale = 1e-10 * (1.0 + np.abs(w).max())
            assert np.abs((v * w) @ v.conj().T - h).max() <= scale
            assert np.abs(v.conj().T @ v - np.eye(d)).max() <= 1e-10


class TestMatFunc:
    def test_sqrt_identity(self):
        np.testing.assert_allclose(linalg.mat_func(np.eye(2), np.sqrt), np.eye(2))

    def test_sqrt_diagonal(self):
        out = linalg.mat_func(np.diag([4.0, 9.0]), np.sqrt)
        np.testing.assert_allclose(out, np.diag([2.0, 3.0]))

    def test_inverse_sqrt_scalar_power(self):
        out = linalg.mat_func(np.eye(2) / 2, lambda x: x**-0.5)
        np.testing.assert_allclose(out, np.sqrt(2) * np.eye(2))

    def test_identity_function_returns_input(self):
        rng = np.random.default_rng(1)
        h = rand_hermitian(rng, 5)
        assert np.abs(linalg.mat_func(h, lambda x: x) - h).max() <= 1e-12

    def test_small_negative_eigenvalues_clamped(self):
        h = np.diag([1.0, -5e-11])
        out = linalg.mat_func(h, np.sqrt)
        np.testing.assert_allclose(out, np.diag([1.0, 0.0]), atol=1e-12)

    def test_domain_error_names_eigenvalue(self):
        with pytest.raises(DomainError, match="-0.5"):
            linalg.mat_func(np.diag([1.0, -0.5]), np.sqrt, name="sqrt")


class TestKron:
    def test_identities(self):
        np.testing.assert_allclose(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_diagonal(self):
        out = linalg.kron(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))
        np.testing.assert_allclose(out, np.diag([3.0, 4.0, 6.0, 8.0]))

    def test_trace_multiplicative(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        lhs = np.trace(linalg.kron(a, b))
        assert abs(lhs - np.trace(a) * np.trace(b)) <= 1e-12 * max(1.0, abs(lhs))

    def test_dimension_cap(self):
        with pytest.raises(ResourceError):
            linalg.kron(np.eye(32), np.eye(32))


class TestPartialTrace:
    def test_bell_marginal(self):
        v = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2)
        out = linalg.partial_trace(np.outer(v, v), [2, 2], [0])
        np.testing.assert_allclose(out, np.eye(2) / 2)

    def test_product_factorizes(self):
        rng = np.random.default_rng(3)
        a = rand_hermitian(rng, 2)
        b = rand_hermitian(rng, 3)
        out = linalg.partial_trace(linalg.kron(a, b), [2, 3], [0])
        np.testing.assert_allclose(out, a * np.trace(b), atol=1e-12)

    def test_trace_preserved(self):
        rng = np.random.default_rng(4)
        m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        out = linalg.partial_trace(m, [2, 3], [1])
        assert abs(np.trace(out) - np.trace(m)) <= 1e-12

    def test_trace_all_subsystems(self):
        rng = np.random.default_rng(5)
        m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        out = linalg.partial_trace(m, [2, 3], [])
        assert out.shape == (1, 1)
        assert abs(out[0, 0] - np.trace(m)) <= 1e-12

    def test_dims_mismatch(self):
        with pytest.raises(DimensionError):
            linalg.partial_trace(np.eye(5), [2, 3], [0])


class TestPermuteAndPower:
    def test_permute_roundtrip(self):
        rng = np.random.default_rng(6)
        m = rng.normal(size=(8, 8))
        fw = linalg.permute_systems(m, [2, 2, 2], [2, 0, 1])
        bw = linalg.permute_systems(fw, [2, 2, 2], [1, 2, 0])
        np.testing.assert_allclose(bw, m)

    def test_permute_swap_matches_kron(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(2, 2))
        b = rng.normal(size=(3, 3))
        out = linalg.permute_systems(linalg.kron(a, b), [2, 3], [1, 0])
        np.testing.assert_allclose(out, linalg.kron(b, a))

    def test_tensor_power_bipartite_regroups(self):
        rng = np.random.default_rng(8)
        a = rand_hermitian(rng, 2)
        b = rand_hermitian(rng, 2)
        m = linalg.kron(a, b)
        out = linalg.tensor_power_bipartite(m, 2, 2, 2)
        np.testing.assert_allclose(out, linalg.kron_all(a, a, b, b), atol=1e-12)

    def test_max_entangled_vector(self):
        v = linalg.max_entangled_vector(3)
        assert v[0] == v[4] == v[8] == 1.0
        assert np.count_nonzero(v) == 3
