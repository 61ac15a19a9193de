import numpy as np
import pytest

from src.algebra import commutant_dimension_bruteforce, commutant_dimension_by_characters, is_unitary, matrix_unit
from src.errors import DimensionError, InputError
from src.uhf import (
    UhfLadder,
    block_projections,
    fixed_point_blocks,
    fixed_point_dimension_bruteforce,
    gamma_step,
    innerness_residual,
    principal_log,
    surrogate_commutant,
    surrogate_group,
    symmetry_action,
    unitary_path,
    weyl_generators,
)

SMALL = [(k, n) for k in (2, 3) for n in (1, 2, 3) if k ** n <= 27]


def uniform_density(k, n):
    w = np.ones(k ** n) / np.sqrt(k ** n)
    return np.outer(w, w)


def random_matrix(dim, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def test_symmetry_for_k2_n1():
    v, _ = symmetry_action(2, 1)
    assert np.allclose(v, np.diag([1, -1]))


@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_symmetry_has_order_k(k, n):
    v, sigma = symmetry_action(k, n)
    x = random_matrix(k ** n, seed=k * 10 + n)
    y = x
    for _ in range(k):
        y = sigma(y)
    assert np.max(np.abs(y - x)) <= 1e-12
    assert np.allclose(sigma(v), v)
    e0 = np.zeros((k ** n, k ** n))
    e0[0, 0] = 1.0
    assert np.allclose(sigma(e0), e0)


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_block_ranks_and_fixed_point_dimension(k, n):
    ranks = [int(round(np.trace(e).real)) for e in block_projections(k, n)]
    assert ranks == [k ** (n - 1)] * k
    assert fixed_point_dimension_bruteforce(k, n) == k * k ** (2 * (n - 1))


def test_fixed_point_algebra_for_k2_n2():
    projections, algebra = fixed_point_blocks(2, 2)
    assert [int(round(np.trace(e).real)) for e in projections] == [2, 2]
    assert algebra.dim == 8
    assert max(algebra.residuals().values()) <= 1e-12
    _, sigma = symmetry_action(2, 2)
    for b in algebra.basis:
        assert np.allclose(sigma(b), b)


def test_level_one_step_is_scalar_embedding():
    step = gamma_step(3, 1)
    assert np.allclose(step(np.array([[2.0]])), 2 * np.eye(3))


@pytest.mark.parametrize("flavor", ["natural", "generic"])
@pytest.mark.parametrize("k,n", SMALL)
def test_step_is_a_sigma_fixed_unital_homomorphism(k, n, flavor):
    step = gamma_step(k, n, flavor)
    residuals = step.residuals()
    assert residuals["unit"] <= 1e-12
    assert residuals["adjoint"] <= 1e-12
    assert residuals["multiplicative"] <= 1e-10
    assert step.symmetry_residual() <= 1e-10


@pytest.mark.parametrize("flavor", ["natural", "generic"])
def test_steps_are_consistent(flavor):
    for k, top in ((2, 4), (3, 3)):
        steps = UhfLadder(k, top).steps(flavor)
        for prev, cur in zip(steps[1:], steps[2:]):
            assert cur.consistency_residual(prev) <= 1e-10
    with pytest.raises(InputError):
        gamma_step(2, 3).consistency_residual(gamma_step(2, 1))


def test_isometries_partition_the_target():
    step = gamma_step(3, 3)
    w = step.isometries
    for j in range(3):
        assert np.allclose(w[j].conj().T @ w[j], np.eye(step.source_dim))
    assert np.allclose(sum(wj @ wj.conj().T for wj in w), np.eye(step.target_dim))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_natural_step_preserves_uniform_state(n):
    step = gamma_step(2, n)
    pulled = step.dual(uniform_density(2, n))
    assert np.max(np.abs(pulled - uniform_density(2, n - 1))) <= 1e-12


def test_generic_step_moves_uniform_state():
    step = gamma_step(2, 2, "generic")
    pulled = step.dual(uniform_density(2, 2))
    assert np.max(np.abs(pulled - uniform_density(2, 1))) > 1e-3


def test_dual_is_the_predual():
    step = gamma_step(2, 3, "generic")
    d = 2
    omega = random_matrix(d * step.target_dim, seed=4)
    x = random_matrix(d, seed=5)
    y = random_matrix(step.source_dim, seed=6)
    lhs = np.trace(omega @ np.kron(x, step(y)))
    rhs = np.trace(step.dual(omega, observed_dim=d) @ np.kron(x, y))
    assert abs(lhs - rhs) <= 1e-10
    with pytest.raises(DimensionError):
        step.dual(np.eye(3))


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_surrogate_commutant_dimensions(k, n):
    step = gamma_step(k, n)
    with_symmetry = surrogate_commutant(step)
    assert with_symmetry.dim == k
    for e in block_projections(k, n):
        assert with_symmetry.span_residual(e) <= 1e-9
    assert surrogate_commutant(step, adjoin_symmetry=False).dim == k * k


@pytest.mark.parametrize("k,n", [(k, n) for k in (2, 3) for n in (2, 3, 4)] + [(4, 2), (4, 3)])
def test_surrogate_commutant_matches_character_formula(k, n):
    step = gamma_step(k, n, "generic")
    assert round(commutant_dimension_by_characters(surrogate_group(step))) == k
    assert round(commutant_dimension_by_characters(surrogate_group(step, False))) == k * k


@pytest.mark.parametrize("k,n", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)])
def test_surrogate_commutant_matches_bruteforce(k, n):
    step = gamma_step(k, n)
    gens = [step(g) for g in weyl_generators(k, n - 1)]
    gens.append(symmetry_action(k, n)[0])
    assert commutant_dimension_bruteforce(gens) == surrogate_commutant(step).dim


def test_principal_log_angles():
    u = np.diag(np.exp(1j * np.array([0.5, -3.0, np.pi])))
    frame, angles = principal_log(u)
    assert np.all(angles > -np.pi) and np.all(angles <= np.pi)
    assert np.allclose((frame * np.exp(1j * angles)) @ frame.conj().T, u)


@pytest.mark.parametrize("flavor", ["natural", "generic"])
@pytest.mark.parametrize("k,top", [(2, 3), (3, 3), (2, 4)])
def test_unitary_path_implements_the_endomorphism(k, top, flavor):
    path = unitary_path(UhfLadder(k, top).steps(flavor))
    assert np.array_equal(path.value(0.0), np.eye(k ** top))
    for t in (0.1, 0.25, 0.5, 0.75, 1.0):
        assert is_unitary(path.value(t))
    for m in range(1, top):
        assert path.commutation_residual(m) <= 1e-10
    for level in range(1, top):
        for x in weyl_generators(k, level):
            assert innerness_residual(path, x, 1.0) <= 1e-9


def test_innerness_residual_decreases_over_completed_segments():
    k, top = 2, 3
    path = unitary_path(UhfLadder(k, top).steps())
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    residuals = [innerness_residual(path, x, t) for t in (0.0, 0.5, 1.0)]
    assert residuals[1] <= residuals[0] + 1e-12
    assert residuals[2] <= residuals[1] + 1e-12
    assert residuals[1] <= 1e-9
    for t in (0.0, 0.3, 1.0):
        assert innerness_residual(path, np.eye(2), t) <= 1e-12


def test_endpoint_product_conjugates_into_the_image():
    k = 2
    path = unitary_path(UhfLadder(k, 3).steps())
    u = path.endpoint_product(2)
    for x in weyl_generators(k, 2):
        lhs = u @ np.kron(x, np.eye(k)) @ u.conj().T
        assert np.max(np.abs(lhs - path.steps[2](x))) <= 1e-9


def test_path_rejects_bad_input():
    path = unitary_path(UhfLadder(2, 3).steps())
    with pytest.raises(DimensionError):
        innerness_residual(path, np.eye(8), 1.0)
    with pytest.raises(DimensionError):
        innerness_residual(path, np.eye(3), 1.0)
    with pytest.raises(InputError):
        path.value(1.5)
    with pytest.raises(InputError):
        unitary_path([gamma_step(2, 2), gamma_step(2, 3)])
    with pytest.raises(InputError):
        unitary_path([])


def test_weyl_generators_count():
    assert len(weyl_generators(3, 2)) == 4
    assert np.allclose(weyl_generators(3, 0)[0], matrix_unit(0, 0, 1))
