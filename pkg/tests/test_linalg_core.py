import numpy as np
import pytest

from qmlab.linalg_core import (
    InvalidStateError,
    NotHermitianError,
    RankDeficiencyError,
    adjoint,
    as_density,
    as_projection,
    eig_hermitian,
    expm_i,
    gram_schmidt,
    is_density,
    is_hermitian,
    is_projection,
    projector_onto,
    pure_state,
    random_density,
    random_hermitian,
    random_unitary,
)


def test_adjoint_examples(rng):
    assert np.array_equal(adjoint(np.eye(3)), np.eye(3))
    M = np.array([[0, 1j], [0, 0]])
    assert np.array_equal(adjoint(M), np.array([[0, 0], [-1j, 0]]))
    R = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    assert np.array_equal(adjoint(adjoint(R)), R)


def test_is_hermitian():
    assert is_hermitian(np.diag([1.0, 2.0]))
    assert not is_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert is_hermitian(np.array([[0.0, 1.0], [1.0 + 1e-12, 0.0]]), tol=1e-10)
    with pytest.raises(ValueError):
        is_hermitian(np.eye(2), tol=0)
    with pytest.raises(ValueError):
        is_hermitian(np.ones((2, 3)))


def test_expm_i_examples(rng):
    assert np.allclose(expm_i(np.zeros((3, 3)), 2.7), np.eye(3), atol=1e-15)
    assert np.allclose(expm_i(np.diag([np.pi]), 1.0), [[-1.0]], atol=1e-15)
    H = random_hermitian(6, rng)
    U = expm_i(H, 0.83)
    assert np.abs(U @ U.conj().T - np.eye(6)).max() < 1e-10


def test_expm_i_group_law(rng):
    for dim in range(1, 9):
        H = random_hermitian(dim, rng)
        t, s = rng.uniform(-3, 3, 2)
        assert np.abs(expm_i(H, t) @ expm_i(H, s) - expm_i(H, t + s)).max() < 1e-9


def test_expm_i_matches_scipy(rng):
    from scipy.linalg import expm

    H = random_hermitian(5, rng)
    assert np.abs(expm_i(H, 0.4) - expm(0.4j * H)).max() < 1e-12


def test_expm_i_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        expm_i(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


def test_eig_hermitian_examples(rng):
    w, _ = eig_hermitian(np.diag([3.0, 1.0]))
    assert np.allclose(w, [1, 3])
    w, _ = eig_hermitian(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(w, [-1, 1])
    H = random_hermitian(7, rng)
    w, V = eig_hermitian(H)
    assert np.all(np.diff(w) >= 0)
    assert np.abs(V.conj().T @ V - np.eye(7)).max() < 1e-12
    assert np.abs(H @ V - V * w).max() < 1e-12
    with pytest.raises(NotHermitianError):
        eig_hermitian(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_gram_schmidt_examples(rng):
    out = gram_schmidt([np.array([1.0, 0.0]), np.array([0.0, 2.0])])
    assert np.allclose(out[0], [1, 0]) and np.allclose(out[1], [0, 1])
    v = np.array([1.0, 1.0]) / np.sqrt(2)
    assert np.allclose(gram_schmidt([v])[0], v)
    vs = [rng.standard_normal(5) + 1j * rng.standard_normal(5) for _ in range(3)]
    Q = np.array(gram_schmidt(vs))
    assert np.abs(Q.conj() @ Q.T - np.eye(3)).max() < 1e-12
    # same span: each input is reproduced by its projection
    P = Q.T @ Q.conj()
    assert all(np.linalg.norm(P @ v - v) < 1e-12 for v in vs)


def test_gram_schmidt_rank_deficiency():
    with pytest.raises(RankDeficiencyError):
        gram_schmidt([np.array([1.0, 1.0]), np.array([2.0, 2.0])])
    with pytest.raises(RankDeficiencyError):
        gram_schmidt([np.zeros(3)])


def test_projections(rng):
    P = projector_onto([rng.standard_normal(6) for _ in range(2)])
    assert is_projection(P)
    assert np.abs(P - P @ P).max() < 1e-10
    frozen = as_projection(P)
    assert not frozen.flags.writeable
    with pytest.raises(InvalidStateError):
        as_projection(np.array([[1.0, 1.0], [0.0, 0.0]]))


def test_density_validation(rng):
    rho = random_density(5, rng)
    assert is_density(rho)
    assert abs(np.trace(rho) - 1) < 1e-10
    assert np.linalg.eigvalsh(rho)[0] >= -1e-10
    assert is_density(pure_state([1, 1j, 0]))
    with pytest.raises(InvalidStateError, match="trace"):
        as_density(2 * rho)
    with pytest.raises(InvalidStateError, match="eigenvalue"):
        as_density(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidStateError, match="Hermitian"):
        as_density(np.array([[0.5, 1.0], [0.0, 0.5]]))
    with pytest.raises(ValueError):
        as_density(np.array([[np.nan, 0], [0, 1]]))


def test_random_unitary(rng):
    U = random_unitary(6, rng)
    assert np.abs(U @ U.conj().T - np.eye(6)).max() < 1e-12
