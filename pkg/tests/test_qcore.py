import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entassist.qcore import (Bipartition, DensityMatrix, PureState, RngSeed,
                             basis_state, hermitian_eigensystem, partial_trace,
                             pure_to_density, random_density_matrix,
                             random_pure_state, read_state, reduced_state,
                             state_from_json, state_to_json, write_state)

from conftest import ket


def test_pure_state_rejects_unnormalized():
    with pytest.raises(ValueError):
        PureState(np.array([1, 1], dtype=complex), 1)
    with pytest.raises(ValueError):
        PureState(np.ones(3) / np.sqrt(3), 2)


def test_from_amplitudes_normalizes():
    psi = PureState.from_amplitudes([1, 1j, 0, 0], normalize=True)
    assert psi.num_qubits == 2
    assert np.isclose(np.linalg.norm(psi.amplitudes), 1)


def test_bipartition_validation():
    with pytest.raises(ValueError):
        Bipartition(frozenset({0}), frozenset({0, 1}))
    with pytest.raises(ValueError):
        Bipartition(frozenset(), frozenset({0, 1}))
    b = Bipartition.split([1], 3)
    assert b.right == frozenset({0, 2})
    assert b.swapped().left == frozenset({0, 2})


def test_bell_reduced_is_maximally_mixed(bell):
    assert np.allclose(reduced_state(bell, [0]).matrix, np.eye(2) / 2, atol=1e-15)


def test_product_reduced():
    psi = basis_state([0, 1])
    assert np.allclose(reduced_state(psi, [0]).matrix, np.diag([1, 0]))
    assert np.allclose(reduced_state(psi, [1]).matrix, np.diag([0, 1]))


def test_ghz_keep_two(ghz):
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[3, 3] = 0.5
    assert np.allclose(reduced_state(ghz, [0, 1]).matrix, expected, atol=1e-15)


def test_partial_trace_matches_einsum():
    psi = random_pure_state(3, RngSeed(5))
    t = psi.amplitudes.reshape(2, 2, 2)
    rho_ac = np.einsum("abc,dbf->acdf", t, t.conj()).reshape(4, 4)
    assert np.allclose(reduced_state(psi, [0, 2]).matrix, rho_ac, atol=1e-14)
    rho = pure_to_density(psi)
    assert np.allclose(partial_trace(rho, [0, 2]).matrix, rho_ac, atol=1e-14)


def test_keep_order_is_normalized():
    psi = random_pure_state(3, RngSeed(9))
    assert np.allclose(reduced_state(psi, [2, 0]).matrix,
                       reduced_state(psi, [0, 2]).matrix)


def test_pure_to_density_examples():
    assert np.allclose(pure_to_density(basis_state([0])).matrix, np.diag([1, 0]))
    plus = ket(("0", 1), ("1", 1), n=1)
    assert np.allclose(pure_to_density(plus).matrix, 0.5)


def test_density_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.5, 0.6]), (2,))
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]), (2,))
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.5, -0.5]), (2,))


def test_random_state_deterministic():
    a = random_pure_state(3, RngSeed(42, 0))
    b = random_pure_state(3, RngSeed(42, 0))
    c = random_pure_state(3, RngSeed(42, 1))
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert not np.array_equal(a.amplitudes, c.amplitudes)


def test_haar_purity_mean():
    # brute-force oracle: 2e5 samples gave 0.7995; exact value 4/5
    vals = []
    for i in range(10_000):
        rho = reduced_state(random_pure_state(2, RngSeed(11).generator(i)), [0]).matrix
        vals.append(np.trace(rho @ rho).real)
    assert abs(np.mean(vals) - 0.8) <= 0.01


def test_eigensystem_examples():
    vals, _ = hermitian_eigensystem(DensityMatrix(np.eye(2) / 2, (2,)))
    assert np.allclose(vals, [0.5, 0.5])
    vals, _ = hermitian_eigensystem(DensityMatrix(np.diag([0.0, 1.0]), (2,)))
    assert np.allclose(vals, [1, 0])
    rho = random_density_matrix(2, 4, np.random.default_rng(3))
    vals, vecs = hermitian_eigensystem(rho)
    assert abs(vals.sum() - 1) < 1e-12
    assert np.all(np.diff(vals) <= 0)
    assert np.allclose((vecs * vals) @ vecs.conj().T, rho.matrix, atol=1e-10)


@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_random_density_rank(rank):
    rho = random_density_matrix(2, rank, np.random.default_rng(rank))
    assert np.sum(np.linalg.eigvalsh(rho.matrix) > 1e-12) == rank


def test_state_json_roundtrip(tmp_path):
    psi = random_pure_state(3, RngSeed(1))
    back = state_from_json(json.loads(json.dumps(state_to_json(psi))))
    assert np.array_equal(back.amplitudes, psi.amplitudes)
    path = tmp_path / "s.json"
    write_state(psi, path)
    assert np.array_equal(read_state(path).amplitudes, psi.amplitudes)


def test_state_json_renormalizes_small_drift():
    obj = {"num_qubits": 1, "re": [1 + 1e-9, 0], "im": [0, 0]}
    assert np.isclose(np.linalg.norm(state_from_json(obj).amplitudes), 1, atol=1e-15)
    with pytest.raises(ValueError):
        state_from_json({"num_qubits": 1, "re": [1.1, 0], "im": [0, 0]})
    with pytest.raises(ValueError):
        state_from_json({"num_qubits": 2, "re": [1, 0], "im": [0, 0]})


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 5), seed=st.integers(0, 2 ** 32 - 1), data=st.data())
def test_reduced_state_properties(n, seed, data):
    psi = random_pure_state(n, RngSeed(seed))
    keep = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1))
    rho = reduced_state(psi, keep)
    assert abs(np.trace(rho.matrix) - 1) < 1e-12
    assert np.allclose(rho.matrix, rho.matrix.conj().T, atol=1e-14)
    assert np.linalg.eigvalsh(rho.matrix).min() > -1e-12
    # complementary reduced states share their nonzero spectrum
    rest = [i for i in range(n) if i not in keep]
    a = np.sort(np.linalg.eigvalsh(rho.matrix))[::-1]
    b = np.sort(np.linalg.eigvalsh(reduced_state(psi, rest).matrix))[::-1]
    m = min(a.size, b.size)
    assert np.allclose(a[:m], b[:m], atol=1e-12)
