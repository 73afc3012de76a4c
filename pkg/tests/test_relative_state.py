import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmlab import measurement as mm
from qmlab.linalg_core import InvalidStateError, pure_state, random_density, random_hermitian
from qmlab.relative_state import (
    EmptyBranchError,
    ResolutionOfUnity,
    branch_weights,
    commutes_with_all,
    conditional_expectation,
    equivalent_mixture,
    expectation,
    random_commutant_element,
    random_resolution,
    relative_density,
)

DIAG = np.diag([0.5, 0.5])
QA = np.diag([1.0, 0.0])


def test_relative_density_diagonal():
    r = relative_density(DIAG, QA, "a")
    assert np.allclose(r.rho_theta, np.diag([1, 0]), atol=1e-15)
    assert r.weight == pytest.approx(0.5)
    assert r.label == "a"


def test_relative_density_inside_range():
    rho = pure_state([1.0, 1j, 0.0])
    Q = np.diag([1.0, 1.0, 0.0])
    r = relative_density(rho, Q)
    assert np.abs(r.rho_theta - rho).max() < 1e-15
    assert r.weight == pytest.approx(1.0)


def test_empty_branch_is_an_error():
    with pytest.raises(EmptyBranchError) as exc:
        relative_density(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), "b")
    assert exc.value.label == "b"
    with pytest.raises(EmptyBranchError):
        conditional_expectation(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), np.eye(2))


def test_relative_density_measurement_spin_up():
    model = mm.MeasurementModel.spin_half(0.0)
    st_ = mm.evolve(model, np.eye(2) / 2, 1.5)
    r = relative_density(st_.rho, mm.record_projection(model, "up"), "up")
    # supported only on spin-up states of the subsystem
    spin_down = mm.lift(model.P2)
    assert np.abs(spin_down @ r.rho_theta).max() < 1e-12
    assert abs(np.trace(mm.lift(model.P1) @ r.rho_theta) - 1) < 1e-12


def test_conditional_expectation_examples():
    assert conditional_expectation(DIAG, QA, np.eye(2)) == pytest.approx(1.0)
    assert conditional_expectation(DIAG, QA, np.diag([3.0, 7.0])) == pytest.approx(3.0)
    for theta in (0.0, np.pi / 8, np.pi / 4):
        model = mm.MeasurementModel.spin_half(theta)
        rho = mm.evolve(model, np.eye(2) / 2, 2.0).rho
        ce = conditional_expectation(rho, mm.record_projection(model, "up"), mm.lift(model.P1))
        assert ce.real == pytest.approx(np.cos(theta) ** 2, abs=1e-9)


def test_equivalent_mixture_examples(rng):
    rho = random_density(4, rng)
    assert np.abs(equivalent_mixture(rho, ResolutionOfUnity([np.eye(4)])) - rho).max() < 1e-15
    R = ResolutionOfUnity.from_blocks([1, 1, 1, 1])
    d = np.diag([0.1, 0.2, 0.3, 0.4])
    assert np.abs(equivalent_mixture(d, R) - d).max() < 1e-15
    # empty branches contribute nothing and raise nothing
    assert np.trace(equivalent_mixture(np.diag([1.0, 0, 0, 0]), R)).real == pytest.approx(1.0)


def test_commutes_with_all(rng):
    R, V, sizes = random_resolution(5, 3, rng)
    assert commutes_with_all(np.eye(5), R)
    assert commutes_with_all(random_commutant_element(V, sizes, rng), R)
    E = np.zeros((5, 5), dtype=complex)
    E[0, 4] = 1.0
    assert not commutes_with_all(V @ E @ V.conj().T, R)


def test_resolution_validation():
    with pytest.raises(InvalidStateError, match="sum"):
        ResolutionOfUnity([np.diag([1.0, 0.0])])
    with pytest.raises(InvalidStateError, match="orthogonal"):
        ResolutionOfUnity([np.diag([1.0, 0.0]), np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], ["a", "b", "c"])
    with pytest.raises(InvalidStateError, match="label"):
        ResolutionOfUnity([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], ["a", "a"])
    with pytest.raises(InvalidStateError):
        ResolutionOfUnity([np.array([[1.0, 1.0], [0.0, 0.0]]), np.eye(2)])
    R = ResolutionOfUnity.from_blocks([2, 1], labels=["x", "y"])
    assert R.dim == 3 and len(R) == 2
    assert np.array_equal(R["y"], np.diag([0, 0, 1.0]))


def test_equivalence_over_200_random_triples(rng):
    worst = 0.0
    for _ in range(200):
        dim = int(rng.integers(2, 17))
        R, V, sizes = random_resolution(dim, int(rng.integers(1, min(dim, 4) + 1)), rng)
        rho = random_density(dim, rng)
        A = random_commutant_element(V, sizes, rng)
        worst = max(worst, abs(expectation(A, rho) - expectation(A, equivalent_mixture(rho, R))))
    assert worst <= 1e-10


def test_counterexample_outside_commutant(rng):
    R, V, sizes = random_resolution(4, 2, rng)
    found = max(
        abs(expectation(B, rho) - expectation(B, equivalent_mixture(rho, R)))
        for B, rho in ((random_hermitian(4, rng), random_density(4, rng)) for _ in range(5))
    )
    assert found > 1e-3


dims = st.integers(min_value=2, max_value=10)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(dim=dims, seed=seeds)
def test_weights_sum_to_one(dim, seed):
    rng = np.random.default_rng(seed)
    R, _, _ = random_resolution(dim, int(rng.integers(1, dim + 1)), rng)
    rho = random_density(dim, rng, rank=int(rng.integers(1, dim + 1)))
    assert abs(sum(branch_weights(rho, R).values()) - 1) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(dim=dims, seed=seeds)
def test_mixture_is_idempotent(dim, seed):
    rng = np.random.default_rng(seed)
    R, _, _ = random_resolution(dim, int(rng.integers(1, dim + 1)), rng)
    eq = equivalent_mixture(random_density(dim, rng), R)
    assert np.abs(equivalent_mixture(eq, R) - eq).max() <= 1e-12
    assert abs(np.trace(eq) - 1) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(dim=dims, seed=seeds)
def test_dual_interpretation(dim, seed):
    rng = np.random.default_rng(seed)
    R, _, _ = random_resolution(dim, int(rng.integers(1, dim + 1)), rng)
    rho = random_density(dim, rng)
    A = random_hermitian(dim, rng)
    for Q in R.projections:
        lhs = conditional_expectation(rho, Q, A)
        rhs = expectation(A, relative_density(rho, Q).rho_theta)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, np.abs(A).max())
