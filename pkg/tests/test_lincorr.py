import numpy as np
import pytest

from qdbound import (
    DensityMatrix,
    TwoOutcomeMeasurement,
    classical_corr_linear,
    i2_at_measurement,
    linear_entropy,
    optimal_decomposition,
    partial_trace,
    povm_from_decomposition,
    tensor,
)
from qdbound.lincorr import OptimalDecomposition, dominant_axis
from qdbound.qmat import ID2, PAULI_X, PAULI_Z
from qdbound.states import bell_diagonal

from conftest import (
    local_unitary_conjugate,
    random_povm,
    random_projective,
    random_state,
)


class TestOptimalDecomposition:
    def test_centered(self):
        dec = optimal_decomposition(np.zeros(3), [0, 0, 1])
        np.testing.assert_allclose(dec.probs, [0.5, 0.5])
        np.testing.assert_allclose(dec.bloch, [[0, 0, 1], [0, 0, -1]], atol=1e-14)

    def test_pure_marginal_degenerates(self):
        dec = optimal_decomposition([0, 0, 1.0], [0, 0, 1.0])
        # One displacement vanishes and all weight sits on the state itself.
        assert min(abs(dec.alphas)) < 1e-12
        idx = int(np.argmax(dec.probs))
        assert dec.probs[idx] == pytest.approx(1.0)
        np.testing.assert_allclose(dec.bloch[idx], [0, 0, 1.0], atol=1e-12)

    def test_offset_transverse_axis(self):
        # Solving the unit-norm constraint by hand for r=(0,0,0.5), axis=x:
        # alpha = +-sqrt(0.75), so both states sit at (+-sqrt(0.75), 0, 0.5).
        dec = optimal_decomposition([0, 0, 0.5], [1, 0, 0])
        s = np.sqrt(0.75)
        np.testing.assert_allclose(dec.probs, [0.5, 0.5], atol=1e-14)
        np.testing.assert_allclose(dec.bloch, [[s, 0, 0.5], [-s, 0, 0.5]], atol=1e-14)

    def test_invariants_random(self, rng):
        for _ in range(200):
            r = rng.standard_normal(3)
            r *= rng.uniform(0, 1) / max(np.linalg.norm(r), 1e-12)
            axis = rng.standard_normal(3)
            dec = optimal_decomposition(r, axis)
            assert abs(dec.probs.sum() - 1) < 1e-12
            np.testing.assert_allclose(np.linalg.norm(dec.bloch, axis=1), [1, 1], atol=1e-10)
            np.testing.assert_allclose(dec.probs @ dec.bloch, r, atol=1e-10)
            assert abs(dec.probs @ dec.alphas) < 1e-10  # displacements average out

    def test_rejects_outside_ball(self):
        with pytest.raises(ValueError, match="exceeds"):
            optimal_decomposition([0, 0, 1.5], [1, 0, 0])


class TestPovmFromDecomposition:
    def test_maximally_mixed_z(self):
        dec = optimal_decomposition(np.zeros(3), [0, 0, 1])
        meas = povm_from_decomposition(ID2 / 2, dec)
        np.testing.assert_allclose(meas.m0, (ID2 + PAULI_Z) / 2, atol=1e-12)
        np.testing.assert_allclose(meas.m1, (ID2 - PAULI_Z) / 2, atol=1e-12)
        assert meas.projective

    def test_bell_diagonal_dominant_x(self):
        rho = bell_diagonal(0.8, 0.1, -0.3)
        meas = classical_corr_linear(rho).measurement
        np.testing.assert_allclose(meas.m0, (ID2 + PAULI_X) / 2, atol=1e-10)
        np.testing.assert_allclose(meas.m1, (ID2 - PAULI_X) / 2, atol=1e-10)

    def test_biased_marginal_projective(self):
        rho_b = np.diag([0.75, 0.25]).astype(complex)
        dec = optimal_decomposition([0, 0, 0.5], [1, 0, 0])
        meas = povm_from_decomposition(rho_b, dec)
        assert meas.projective
        for m in meas.elements:
            assert np.max(np.abs(m @ m - m)) < 1e-10

    def test_rejects_inconsistent_decomposition(self):
        dec = OptimalDecomposition(
            np.array([0.5, 0.5]),
            np.array([[0, 0, 1.0], [0, 0, 1.0]]),
            np.array([1.0, -1.0]),
        )
        with pytest.raises(ValueError, match="reproduce"):
            povm_from_decomposition(ID2 / 2, dec)


class TestClassicalCorrLinear:
    def test_bell_state_maximal(self):
        lin = classical_corr_linear(bell_diagonal(1, -1, 1))
        assert lin.lambda_max == pytest.approx(1.0, abs=1e-12)
        assert lin.i2 == pytest.approx(1.0, abs=1e-12)

    def test_product_state_zero(self, rng):
        rho_a = random_state(rng, (3,))
        rho_b = random_state(rng, (2,))
        joint = DensityMatrix(tensor(rho_a.matrix, rho_b.matrix), (3, 2))
        lin = classical_corr_linear(joint)
        assert abs(lin.i2) < 1e-12

    def test_bell_diagonal_value(self, rng):
        for _ in range(20):
            c = rng.uniform(-1 / 3, 1 / 3, size=3)
            lin = classical_corr_linear(bell_diagonal(*c))
            assert lin.i2 == pytest.approx(np.max(c**2), abs=1e-12)

    def test_pure_marginal_shortcut(self, rng):
        rho_a = random_state(rng, (3,))
        pure_b = np.zeros((2, 2), dtype=complex)
        pure_b[1, 1] = 1.0
        joint = DensityMatrix(tensor(rho_a.matrix, pure_b), (3, 2))
        lin = classical_corr_linear(joint)
        assert lin.i2 == 0.0
        assert lin.measurement.projective

    def test_result_invariants(self, rng):
        for d in (2, 3, 4):
            for _ in range(10):
                rho = random_state(rng, (d, 2))
                lin = classical_corr_linear(rho)
                s2b = linear_entropy(partial_trace(rho, 1))
                assert abs(lin.i2 - lin.lambda_max * s2b) < 1e-12
                assert -1e-10 <= lin.i2 <= s2b + 1e-10
                assert abs(np.linalg.norm(lin.axis) - 1) < 1e-12


class TestI2AtMeasurement:
    def test_product_state_any_measurement(self, rng):
        rho_a = random_state(rng, (3,))
        rho_b = random_state(rng, (2,))
        joint = DensityMatrix(tensor(rho_a.matrix, rho_b.matrix), (3, 2))
        assert abs(i2_at_measurement(joint, random_projective(rng))) < 1e-12
        assert abs(i2_at_measurement(joint, random_povm(rng))) < 1e-12

    def test_bell_with_z_projectors(self):
        rho = bell_diagonal(1, -1, 1)
        meas = TwoOutcomeMeasurement.from_axis([0, 0, 1])
        assert i2_at_measurement(rho, meas) == pytest.approx(1.0, abs=1e-12)

    def test_manual_recount(self, rng):
        # Independent recomputation of the direct formula on one state.
        rho = random_state(rng, (2, 2))
        meas = random_projective(rng)
        expected = linear_entropy(partial_trace(rho, 0))
        for m in meas.elements:
            big = tensor(ID2, m)
            sub = big @ rho.matrix @ big
            p = sub.trace().real
            cond = np.zeros((2, 2), dtype=complex)
            for a in range(2):
                for b in range(2):
                    for j in range(2):
                        cond[a, b] += sub[2 * a + j, 2 * b + j]
            expected -= p * linear_entropy(cond / p)
        assert i2_at_measurement(rho, meas) == pytest.approx(expected, abs=1e-12)


class TestOptimality:
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_formula_matches_direct(self, rng, d):
        for _ in range(170):
            rho = random_state(rng, (d, 2), rank=int(rng.integers(1, 2 * d + 1)))
            lin = classical_corr_linear(rho)
            direct = i2_at_measurement(rho, lin.measurement)
            assert abs(direct - lin.i2) < 1e-9

    def test_no_measurement_beats_formula(self, rng):
        for d in (2, 3, 4):
            for _ in range(10):
                rho = random_state(rng, (d, 2))
                lin = classical_corr_linear(rho)
                for _ in range(60):
                    assert i2_at_measurement(rho, random_povm(rng)) <= lin.i2 + 1e-9
                    assert i2_at_measurement(rho, random_projective(rng)) <= lin.i2 + 1e-9

    def test_local_unitary_invariance(self, rng):
        for _ in range(25):
            rho = random_state(rng, (3, 2))
            rotated = local_unitary_conjugate(rng, rho)
            assert abs(
                classical_corr_linear(rho).i2 - classical_corr_linear(rotated).i2
            ) < 1e-9

    def test_constructed_measurement_always_projective(self, rng):
        for d in (2, 3, 4):
            for _ in range(20):
                rho = random_state(rng, (d, 2))
                meas = classical_corr_linear(rho).measurement
                assert meas.projective
                for m in meas.elements:
                    assert np.max(np.abs(m @ m - m)) < 1e-9

    def test_degenerate_axis_value_equality(self, rng):
        # Any axis inside a degenerate dominant eigenspace attains the same
        # correlation.
        rho = bell_diagonal(0.5, -0.5, 0.1)
        lin = classical_corr_linear(rho)
        for axis in ([1, 0, 0], [0, 1, 0], [1, 1, 0] / np.sqrt(2)):
            dec = optimal_decomposition(np.zeros(3), np.asarray(axis, dtype=float))
            meas = povm_from_decomposition(ID2 / 2, dec)
            assert i2_at_measurement(rho, meas) == pytest.approx(lin.i2, abs=1e-9)


class TestDominantAxis:
    def test_simple_spectrum(self):
        lam, axis = dominant_axis(np.diag([0.1, 0.9, 0.5]))
        assert lam == pytest.approx(0.9)
        np.testing.assert_allclose(np.abs(axis), [0, 1, 0], atol=1e-12)

    def test_degenerate_prefers_x_projection(self):
        lam, axis = dominant_axis(np.diag([0.9, 0.9, 0.1]))
        assert lam == pytest.approx(0.9)
        np.testing.assert_allclose(axis, [1, 0, 0], atol=1e-12)

    def test_degenerate_orthogonal_to_x(self):
        lam, axis = dominant_axis(np.diag([0.1, 0.9, 0.9]))
        np.testing.assert_allclose(axis, [0, 1, 0], atol=1e-12)
