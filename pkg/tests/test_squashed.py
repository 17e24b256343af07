import numpy as np
import pytest

from qbnets import (
    DensityMatrix,
    assembly_error,
    cmi_diagonal,
    quantum_mutual_information,
    squashed_entanglement,
)
from qbnets.sampling import random_density_matrix

LN2 = np.log(2.0)


def bell_state(u_x=None, u_y=None):
    v = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    if u_x is not None:
        v = (np.kron(u_x, u_y) @ v.reshape(-1)).reshape(-1)
    return DensityMatrix((("x", 2), ("y", 2)), np.outer(v, v.conj()))


def haar_unitary(rng, d=2):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))[None, :]


class TestAnchors:
    def test_product_state_zero(self):
        rng = np.random.default_rng(0)
        a = random_density_matrix((("x", 2),), rng)
        b = random_density_matrix((("y", 2),), rng)
        rho = DensityMatrix((("x", 2), ("y", 2)), np.kron(a.matrix, b.matrix))
        result = squashed_entanglement(rho, restarts=4, budget=500)
        assert result.value <= 1e-6

    def test_bell_state_forced_by_purity(self):
        result = squashed_entanglement(bell_state())
        assert result.value == pytest.approx(LN2, abs=1e-6)
        assert result.restart == -1  # the trivial extension is already exact

    def test_classically_correlated_mixture(self):
        rho = DensityMatrix(
            (("x", 2), ("y", 2)), np.diag([0.5, 0, 0, 0.5]).astype(complex)
        )
        result = squashed_entanglement(rho, restarts=4, budget=500)
        assert result.value <= 1e-3
        assert assembly_error(rho, result.witness) <= 1e-8


class TestContracts:
    def test_value_is_half_witness_cmi(self):
        rng = np.random.default_rng(1)
        rho = random_density_matrix((("x", 2), ("y", 2)), rng)
        result = squashed_entanglement(rho, restarts=3, budget=300)
        assert result.value == pytest.approx(0.5 * cmi_diagonal(result.witness), abs=1e-12)

    def test_witness_assembles_to_input(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            rho = random_density_matrix((("x", 2), ("y", 2)), rng)
            result = squashed_entanglement(rho, restarts=3, budget=300)
            assert assembly_error(rho, result.witness) <= 1e-8

    def test_upper_bounded_by_half_mutual_information(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            rho = random_density_matrix((("x", 2), ("y", 2)), rng)
            result = squashed_entanglement(rho, restarts=2, budget=200)
            bound = 0.5 * quantum_mutual_information(rho, "x", "y")
            assert result.value <= bound + 1e-9

    def test_optimizer_beats_trivial_on_noisy_bell(self):
        noisy = 0.6 * bell_state().matrix + 0.4 * np.eye(4) / 4
        rho = DensityMatrix((("x", 2), ("y", 2)), noisy)
        result = squashed_entanglement(rho, restarts=4, budget=600)
        trivial = 0.5 * quantum_mutual_information(rho, "x", "y")
        assert result.value < trivial - 1e-3
        assert result.restart >= 0

    def test_lam_card_below_rank_rejected(self):
        rng = np.random.default_rng(4)
        rho = random_density_matrix((("x", 2), ("y", 2)), rng)
        with pytest.raises(ValueError, match="rank"):
            squashed_entanglement(rho, lam_card=2)

    def test_three_labels_rejected(self):
        rng = np.random.default_rng(5)
        rho = random_density_matrix((("x", 2), ("y", 2), ("z", 2)), rng)
        with pytest.raises(ValueError, match="two label"):
            squashed_entanglement(rho)

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(6)
        rho = random_density_matrix((("x", 2), ("y", 2)), rng)
        r1 = squashed_entanglement(rho, restarts=2, budget=150, seed=9)
        r2 = squashed_entanglement(rho, restarts=2, budget=150, seed=9)
        assert r1.value == r2.value


class TestLocalUnitaryInvariance:
    def test_bell_under_local_rotations(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            rho = bell_state(haar_unitary(rng), haar_unitary(rng))
            result = squashed_entanglement(rho)
            assert result.value == pytest.approx(LN2, abs=1e-3)
