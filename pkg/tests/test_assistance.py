import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import sqrtm

from entassist.assistance import (Ensemble, OptimizerConfig, assistance_value,
                                  assisted_measure, ca_two_qubit_closed,
                                  ensemble_from_unitary, spin_flip_eigen_sum,
                                  tangle_assisted)
from entassist.measures import CONCURRENCE, MeasureSpec, measure_eval, tangle_pure
from entassist.qcore import (DensityMatrix, RngSeed, pure_to_density,
                             random_density_matrix, random_pure_state,
                             random_unitary, reduced_state)

from conftest import cut

AB = cut([0], 2)
SY = np.array([[0, -1j], [1j, 0]])
YY = np.kron(SY, SY)
GHZ_AB = DensityMatrix(np.diag([0.5, 0, 0, 0.5]).astype(complex), (2, 2))


def fidelity_oracle(rho):
    """``tr sqrt(sqrt(rho) rho~ sqrt(rho))``, an independent route to the closed form."""
    s = sqrtm(rho)
    tilde = YY @ rho.conj() @ YY
    return float(np.trace(sqrtm(s @ tilde @ s)).real)


def test_identity_unitary_gives_eigendecomposition():
    rho = random_density_matrix(2, 2, np.random.default_rng(1))
    ens = ensemble_from_unitary(rho, np.eye(2), 2)
    mu = np.sort(np.linalg.eigvalsh(rho.matrix))[::-1][:2]
    assert np.allclose(np.sort(ens.probabilities)[::-1], mu, atol=1e-12)


def test_reconstruction():
    gen = np.random.default_rng(2)
    for rank, m in [(1, 1), (2, 4), (3, 5), (4, 16)]:
        rho = random_density_matrix(2, rank, gen)
        ens = ensemble_from_unitary(rho, random_unitary(m, gen), m)
        assert np.allclose(ens.density(), rho.matrix, atol=1e-9)


def test_single_qubit_rotated_basis():
    rho = DensityMatrix(np.eye(2, dtype=complex) / 2, (2,))
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    ens = ensemble_from_unitary(rho, h, 2)
    assert np.allclose(ens.probabilities, [0.5, 0.5])
    a, b = (s.amplitudes for _, s in ens.members)
    assert abs(np.vdot(a, b)) < 1e-12


def test_ensemble_errors():
    rho = random_density_matrix(2, 3, np.random.default_rng(3))
    with pytest.raises(ValueError):
        ensemble_from_unitary(rho, np.eye(2), 2)
    with pytest.raises(ValueError):
        ensemble_from_unitary(rho, np.ones((4, 4)), 4)
    with pytest.raises(ValueError):
        assisted_measure(rho, AB, CONCURRENCE, OptimizerConfig(ensemble_size=2))


def test_pure_input_matches_pure_measure(bell):
    psi = random_pure_state(3, RngSeed(7))
    rho = pure_to_density(psi)
    c = cut([0], 3)
    for spec in (CONCURRENCE, MeasureSpec("tsallis", 2), MeasureSpec("eof")):
        assert assisted_measure(rho, c, spec) == pytest.approx(measure_eval(spec, psi, c), abs=1e-12)
    assert ca_two_qubit_closed(pure_to_density(bell)) == pytest.approx(1, abs=1e-12)


def test_closed_form_examples():
    assert ca_two_qubit_closed(GHZ_AB) == pytest.approx(1, abs=1e-12)
    mixed = DensityMatrix(np.eye(4, dtype=complex) / 4, (2, 2))
    assert ca_two_qubit_closed(mixed) == pytest.approx(1, abs=1e-12)
    prod = DensityMatrix(np.diag([1, 0, 0, 0]).astype(complex), (2, 2))
    assert ca_two_qubit_closed(prod) == pytest.approx(0, abs=1e-12)
    with pytest.raises(ValueError):
        ca_two_qubit_closed(reduced_state(random_pure_state(3, RngSeed(1)), [0]))


def test_optimizer_examples():
    cfg = OptimizerConfig(restarts=4, rng=RngSeed(1))
    assert assisted_measure(GHZ_AB, AB, CONCURRENCE, cfg) == pytest.approx(1, abs=1e-3)
    mixed = DensityMatrix(np.eye(4, dtype=complex) / 4, (2, 2))
    assert assisted_measure(mixed, AB, CONCURRENCE, cfg) >= 0.999
    prod = DensityMatrix(np.diag([1, 0, 0, 0]).astype(complex), (2, 2))
    assert assisted_measure(prod, AB, CONCURRENCE, cfg) == 0


def test_tangle_assisted_examples(bell):
    cfg = OptimizerConfig(restarts=4, rng=RngSeed(2))
    psi = random_pure_state(2, RngSeed(8))
    assert tangle_assisted(pure_to_density(psi), AB, cfg) == tangle_pure(psi, AB)
    assert tangle_assisted(GHZ_AB, AB, cfg) == pytest.approx(1, abs=2e-3)
    prod = DensityMatrix(np.diag([0, 1, 0, 0]).astype(complex), (2, 2))
    assert tangle_assisted(prod, AB, cfg) == 0


def test_closed_form_matches_fidelity_oracle():
    gen = np.random.default_rng(9)
    for rank in (2, 3, 4):
        for _ in range(10):
            rho = random_density_matrix(2, rank, gen)
            assert ca_two_qubit_closed(rho) == pytest.approx(fidelity_oracle(rho.matrix), abs=1e-7)
            assert ca_two_qubit_closed(rho) == pytest.approx(spin_flip_eigen_sum(rho), abs=1e-6)


def test_optimizer_never_exceeds_closed_form():
    gen = np.random.default_rng(10)
    for i in range(8):
        rho = random_density_matrix(2, int(gen.integers(2, 5)), gen)
        cfg = OptimizerConfig(ensemble_size=16, restarts=10, max_iterations=300,
                              rng=RngSeed(10, i))
        closed = ca_two_qubit_closed(rho)
        val = assisted_measure(rho, AB, CONCURRENCE, cfg)
        assert closed - 1e-3 <= val <= closed + 1e-9


def test_optimizer_deterministic_and_monotone_in_restarts():
    rho = random_density_matrix(2, 3, np.random.default_rng(11))
    a = assisted_measure(rho, AB, MeasureSpec("tsallis", 2), OptimizerConfig(restarts=3))
    b = assisted_measure(rho, AB, MeasureSpec("tsallis", 2), OptimizerConfig(restarts=3))
    c = assisted_measure(rho, AB, MeasureSpec("tsallis", 2), OptimizerConfig(restarts=6))
    assert a == b
    assert c >= a


def test_assistance_value_routes():
    rho = random_density_matrix(2, 3, np.random.default_rng(12))
    assert assistance_value(rho, AB, CONCURRENCE) == ca_two_qubit_closed(rho)
    psi = random_pure_state(2, RngSeed(12))
    assert assistance_value(pure_to_density(psi), AB, MeasureSpec("eof")) == \
        pytest.approx(measure_eval(MeasureSpec("eof"), psi, AB), abs=1e-12)


def test_assisted_at_least_eigen_average():
    rho = random_density_matrix(3, 3, np.random.default_rng(13))
    c = cut([0], 3)
    spec = MeasureSpec("renyi", 2)
    eig = ensemble_from_unitary(rho, np.eye(3), 3).average(spec, c)
    assert assisted_measure(rho, c, spec, OptimizerConfig(restarts=2)) >= eig - 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), rank=st.integers(1, 4))
def test_closed_form_local_unitary_invariance(seed, rank):
    gen = np.random.default_rng(seed)
    rho = random_density_matrix(2, rank, gen)
    u = np.kron(random_unitary(2, gen), random_unitary(2, gen))
    rotated = DensityMatrix(u @ rho.matrix @ u.conj().T, (2, 2), validate=False)
    assert ca_two_qubit_closed(rotated) == pytest.approx(ca_two_qubit_closed(rho), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), rank=st.integers(1, 4), m=st.integers(4, 9))
def test_reconstruction_property(seed, rank, m):
    gen = np.random.default_rng(seed)
    rho = random_density_matrix(2, rank, gen)
    ens = ensemble_from_unitary(rho, random_unitary(m, gen), m)
    assert isinstance(ens, Ensemble)
    assert abs(ens.probabilities.sum() - 1) < 1e-12
    assert np.allclose(ens.density(), rho.matrix, atol=1e-9)
