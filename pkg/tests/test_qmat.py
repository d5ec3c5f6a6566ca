import numpy as np
import pytest

from qdbound import (
    DensityMatrix,
    bloch_to_matrix,
    bloch_vector,
    gellmann_basis,
    herm_eig,
    inv_sqrt_on_range,
    linear_entropy,
    partial_trace,
    tensor,
    von_neumann_entropy,
)
from qdbound.qmat import ID2, PAULI_Z, range_projector

from conftest import haar_unitary, random_hermitian, random_state


def ket(index, d):
    v = np.zeros(d, dtype=complex)
    v[index] = 1.0
    return v


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        mat = np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex)
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(mat, (2,))

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.eye(2, dtype=complex), (2,))

    def test_rejects_negative_eigenvalue(self):
        mat = np.diag([1.2, -0.2]).astype(complex)
        with pytest.raises(ValueError, match="eigenvalue"):
            DensityMatrix(mat, (2,))

    def test_rejects_dims_mismatch(self):
        with pytest.raises(ValueError, match="dims"):
            DensityMatrix(np.eye(4, dtype=complex) / 4, (2, 3))


class TestTensor:
    def test_identity(self):
        np.testing.assert_array_equal(tensor(ID2, ID2), np.eye(4))

    def test_pauli_z_pair(self):
        np.testing.assert_array_equal(tensor(PAULI_Z, PAULI_Z), np.diag([1, -1, -1, 1]))

    def test_basis_projectors(self):
        p0 = np.outer(ket(0, 2), ket(0, 2))
        p1 = np.outer(ket(1, 2), ket(1, 2))
        expected = np.zeros((4, 4))
        expected[1, 1] = 1.0  # |01><01|
        np.testing.assert_array_equal(tensor(p0, p1), expected)


class TestPartialTrace:
    def test_bell_marginal(self):
        phi = (ket(0, 4) + ket(3, 4)) / np.sqrt(2)
        rho = DensityMatrix(np.outer(phi, phi.conj()), (2, 2))
        np.testing.assert_allclose(partial_trace(rho, 0).matrix, ID2 / 2, atol=1e-14)
        np.testing.assert_allclose(partial_trace(rho, 1).matrix, ID2 / 2, atol=1e-14)

    def test_product_factorization(self, rng):
        rho_a = random_state(rng, (3,))
        rho_b = random_state(rng, (2,))
        joint = DensityMatrix(tensor(rho_a.matrix, rho_b.matrix), (3, 2))
        np.testing.assert_allclose(partial_trace(joint, 0).matrix, rho_a.matrix, atol=1e-10)
        np.testing.assert_allclose(partial_trace(joint, 1).matrix, rho_b.matrix, atol=1e-10)

    def test_matches_naive_summation(self, rng):
        rho = random_state(rng, (2, 2))
        naive = np.zeros((2, 2), dtype=complex)
        for a in range(2):
            for b in range(2):
                for j in range(2):
                    naive[a, b] += rho.matrix[2 * a + j, 2 * b + j]
        np.testing.assert_allclose(partial_trace(rho, 0).matrix, naive, atol=1e-14)

    def test_invalid_subsystem(self, rng):
        rho = random_state(rng, (2, 2))
        with pytest.raises(ValueError):
            partial_trace(rho, 2)


class TestHermEig:
    def test_pauli_z(self):
        evals, vecs = herm_eig(PAULI_Z)
        np.testing.assert_allclose(evals, [-1.0, 1.0])
        assert abs(abs(vecs[1, 0]) - 1.0) < 1e-14  # lowest eigenvector is |1>
        assert abs(abs(vecs[0, 1]) - 1.0) < 1e-14

    def test_degenerate_identity(self):
        evals, vecs = herm_eig(np.eye(3, dtype=complex))
        np.testing.assert_allclose(evals, np.ones(3))
        recon = (vecs * evals) @ vecs.conj().T
        np.testing.assert_allclose(recon, np.eye(3), atol=1e-12)

    def test_random_reconstruction(self, rng):
        h = random_hermitian(rng, 8)
        evals, vecs = herm_eig(h)
        recon = (vecs * evals) @ vecs.conj().T
        assert np.max(np.abs(recon - h)) < 1e-10
        np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(8), atol=1e-10)

    def test_rejects_non_hermitian(self, rng):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        with pytest.raises(ValueError, match="Hermitian"):
            herm_eig(g)


class TestEntropies:
    def test_pure_state(self, rng):
        psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        psi /= np.linalg.norm(psi)
        rho = np.outer(psi, psi.conj())
        assert abs(von_neumann_entropy(rho)) < 1e-10
        assert abs(linear_entropy(rho)) < 1e-10

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_maximally_mixed(self, d):
        rho = np.eye(d) / d
        assert abs(von_neumann_entropy(rho) - np.log2(d)) < 1e-12
        assert abs(linear_entropy(rho) - 2 * (1 - 1 / d)) < 1e-12

    def test_two_level_closed_form(self):
        rho = np.diag([0.25, 0.75]).astype(complex)
        assert abs(von_neumann_entropy(rho) - 0.8112781244591328) < 1e-12

    def test_unitary_invariance(self, rng):
        for _ in range(10):
            rho = random_state(rng, (4,)).matrix
            u = haar_unitary(rng, 4)
            rotated = u @ rho @ u.conj().T
            assert abs(von_neumann_entropy(rho) - von_neumann_entropy(rotated)) < 1e-9
            assert abs(linear_entropy(rho) - linear_entropy(rotated)) < 1e-9


class TestGellmannBasis:
    def test_qubit_case_is_pauli(self):
        basis = gellmann_basis(2)
        np.testing.assert_array_equal(basis.matrices[0], np.array([[0, 1], [1, 0]]))
        np.testing.assert_array_equal(basis.matrices[1], np.array([[0, -1j], [1j, 0]]))
        np.testing.assert_array_equal(basis.matrices[2], np.array([[1, 0], [0, -1]]))

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_gram_matrix(self, d):
        basis = gellmann_basis(d)
        gram = np.einsum("aij,bji->ab", basis.matrices, basis.matrices).real
        np.testing.assert_allclose(gram, 2 * np.eye(d * d - 1), atol=1e-12)

    @pytest.mark.parametrize("d", [2, 3, 4, 7])
    def test_count_traceless_hermitian(self, d):
        basis = gellmann_basis(d)
        assert len(basis) == d * d - 1
        for g in basis.matrices:
            assert abs(g.trace()) < 1e-12
            assert np.max(np.abs(g - g.conj().T)) < 1e-12

    def test_rejects_small_dimension(self):
        with pytest.raises(ValueError):
            gellmann_basis(1)


class TestBlochVector:
    def test_maximally_mixed_is_origin(self):
        basis = gellmann_basis(3)
        r = bloch_vector(np.eye(3) / 3, basis)
        np.testing.assert_allclose(r, np.zeros(8), atol=1e-14)

    def test_qubit_z(self):
        basis = gellmann_basis(2)
        r = bloch_vector((ID2 + PAULI_Z) / 2, basis)
        np.testing.assert_allclose(r, [0, 0, 1], atol=1e-14)

    def test_qubit_norm_bound(self, rng):
        basis = gellmann_basis(2)
        for _ in range(50):
            r = bloch_vector(random_state(rng, (2,)), basis)
            assert np.linalg.norm(r) <= 1 + 1e-10

    @pytest.mark.parametrize("d", [2, 3, 4, 8])
    def test_roundtrip(self, rng, d):
        basis = gellmann_basis(d)
        for _ in range(100):
            rho = random_state(rng, (d,))
            recon = bloch_to_matrix(bloch_vector(rho, basis), basis)
            assert np.max(np.abs(recon - rho.matrix)) < 1e-10

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError, match="dimension"):
            bloch_vector(random_state(rng, (3,)), gellmann_basis(2))


class TestInvSqrtOnRange:
    def test_maximally_mixed(self):
        out = inv_sqrt_on_range(ID2 / 2)
        np.testing.assert_allclose(out, np.sqrt(2) * ID2, atol=1e-12)

    def test_rank_one_projector(self):
        proj = np.diag([1.0, 0.0]).astype(complex)
        np.testing.assert_allclose(inv_sqrt_on_range(proj), proj, atol=1e-12)

    def test_diagonal_closed_form(self):
        rho = np.diag([0.9, 0.1]).astype(complex)
        expected = np.diag([0.9**-0.5, 0.1**-0.5])
        np.testing.assert_allclose(inv_sqrt_on_range(rho), expected, atol=1e-12)

    def test_range_projector_identity(self, rng):
        for rank in (1, 2, 4):
            rho = random_state(rng, (4,), rank=rank).matrix
            s = inv_sqrt_on_range(rho)
            np.testing.assert_allclose(s @ rho @ s, range_projector(rho), atol=1e-9)
