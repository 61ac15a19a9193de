import numpy as np
import pytest

from src.algebra import matrix_unit
from src.errors import DimensionError, InputError, ToleranceError
from src.instrument import (
    WEIGHT_CUT,
    Instrument,
    MeasuringProcess,
    central_decomposition,
    choi_to_kraus,
    conditional_expectation,
    dual_map,
    exact_observation_residual,
    instrument_distance,
    instrument_from_process,
    kraus_to_choi,
    outcome_weights,
    post_interaction_state,
    povm_of,
    random_instrument,
    random_interaction,
    realize_instrument,
    restricted_state,
    sample_outcomes,
    verify_axioms,
    vn_instrument,
)
from src.scenarios import build_random_process, build_section2
from src.states import diagonal_state, is_pure, maximally_mixed, product_state, random_state, vector_state
from src.uhf import fourier


def projective_qubit():
    return Instrument.from_kraus(2, [[matrix_unit(0, 0, 2)], [matrix_unit(1, 1, 2)]])


def test_choi_round_trip_keeps_the_map():
    E = random_instrument(3, 2, rank=2, seed=1)
    kraus = choi_to_kraus(E.chois[0], 3)
    assert len(kraus) == 2
    assert np.allclose(kraus_to_choi(kraus), E.chois[0], atol=1e-12)


def test_output_matches_kraus_form():
    k = np.array([[0.6, 0.0], [0.8j, 0.0]])
    E = Instrument.from_kraus(2, [[k], [np.array([[0.0, 0.0], [0.0, 1.0]])]])
    rho = random_state(2, seed=3).density
    assert np.allclose(E.output(0, rho), k @ rho @ k.conj().T)
    x = np.array([[1.0, 2.0j], [-2.0j, 3.0]])
    assert abs(np.trace(E.output(0, rho) @ x) - np.trace(rho @ E.dual(0, x))) <= 1e-12


def test_projective_qubit_instrument():
    E = projective_qubit()
    report = verify_axioms(E)
    assert report.passed
    assert set(c.name for c in report.checks) == {"CP", "positivity", "normalization", "unitality", "linearity"}
    povm = povm_of(E)
    assert np.allclose(povm.elements[0], matrix_unit(0, 0, 2))
    assert povm.completeness_residual() <= 1e-12
    p = realize_instrument(E)
    assert instrument_distance(E, instrument_from_process(p)) <= 1e-8


def test_identity_channel_dilates_exactly():
    E = Instrument.from_kraus(2, [[np.eye(2)]])
    assert verify_axioms(E).passed
    p = realize_instrument(E)
    assert instrument_distance(E, instrument_from_process(p)) <= 1e-10


def test_negative_choi_fails_cp():
    E = projective_qubit()
    bad = Instrument(2, np.array([E.chois[0] - 2 * np.eye(4), E.chois[1]]))
    report = verify_axioms(bad)
    assert not report.passed
    assert "CP" in [c.name for c in report.failed()]
    assert report.derived["choi_min_eigenvalues"][0] <= -1.0


def test_near_psd_choi_is_rejected_by_realization():
    E = projective_qubit()
    bad = Instrument(2, np.array([E.chois[0] - 1e-6 * np.eye(4), E.chois[1]]))
    with pytest.raises(ToleranceError, match="PSD"):
        realize_instrument(bad)


def test_instrument_rejects_malformed_choi():
    with pytest.raises(DimensionError):
        Instrument(2, np.zeros((1, 3, 3)))
    with pytest.raises(InputError):
        Instrument(2, np.array([np.triu(np.ones((4, 4)))]))


@pytest.mark.parametrize("dim", [0, -1])
def test_instrument_rejects_non_positive_dimension(dim):
    with pytest.raises(InputError, match="positive"):
        Instrument(dim, np.zeros((1, 0, 0)))


@pytest.mark.parametrize("seed", range(10))
def test_random_instruments_realize(seed):
    rng = np.random.default_rng(seed)
    d, outcomes, rank = int(rng.integers(1, 5)), int(rng.integers(1, 4)), int(rng.integers(1, 3))
    E = random_instrument(d, outcomes, rank=rank, seed=seed)
    assert verify_axioms(E).passed
    p = realize_instrument(E)
    assert instrument_distance(E, instrument_from_process(p)) <= 1e-8


def test_dual_map_unitality_and_duality():
    E = random_instrument(3, 3, seed=5)
    assert np.allclose(dual_map(E, [1, 1, 1])(np.eye(3)), np.eye(3), atol=1e-12)
    assert np.allclose(dual_map(E, [0, 0, 0])(np.eye(3)), 0)
    rho = random_state(3, seed=6).density
    x = np.diag([1.0, -2.0, 0.5])
    q = np.array([0.2, 0.0, 1.0])
    lhs = sum(q[i] * np.trace(E.output(i, rho) @ x) for i in range(3))
    assert abs(lhs - np.trace(rho @ dual_map(E, q)(x))) <= 1e-12
    with pytest.raises(DimensionError):
        dual_map(E, [1, 1])


def test_distance_is_a_metric_and_scales():
    e1, e2, e3 = (random_instrument(2, 2, seed=s) for s in (1, 2, 3))
    assert instrument_distance(e1, e1) == 0.0
    assert instrument_distance(e1, e3) <= instrument_distance(e1, e2) + instrument_distance(e2, e3) + 1e-12
    base = instrument_distance(e1, e2)
    for eps in (1e-3, 1e-2, 0.1):
        mixed = Instrument(2, (1 - eps) * e1.chois + eps * e2.chois)
        assert instrument_distance(e1, mixed) == pytest.approx(eps * base, rel=1e-8)
    with pytest.raises(InputError):
        instrument_distance(e1, random_instrument(2, 3))


def test_vn_instrument_cells():
    meter = np.diag([1.0, 2.0])
    u = random_interaction(4, seed=9)
    sigma = diagonal_state([0.25, 0.75])
    single = vn_instrument(2, sigma, meter, u, [[1], [2]])
    merged = vn_instrument(2, sigma, meter, u, [[1, 2]])
    assert single.labels == ("{1}", "{2}")
    assert merged.labels == ("{1,2}",)
    assert np.max(np.abs(merged.chois[0] - single.chois.sum(axis=0))) <= 1e-12
    assert verify_axioms(single).passed


def test_vn_instrument_without_interaction():
    meter = np.diag([1.0, 2.0])
    sigma = diagonal_state([0.25, 0.75])
    E = vn_instrument(2, sigma, meter, np.eye(4), [[1], [2]])
    rho = random_state(2, seed=2).density
    assert np.allclose(E.output(0, rho), 0.25 * rho, atol=1e-12)
    assert np.allclose(E.output(1, rho), 0.75 * rho, atol=1e-12)


def test_vn_instrument_rejects_bad_partitions():
    meter = np.diag([1.0, 2.0, 3.0])
    sigma = maximally_mixed(3)
    with pytest.raises(InputError):
        vn_instrument(3, sigma, meter, np.eye(3), [[1, 2], [2, 3]])
    with pytest.raises(InputError):
        vn_instrument(3, sigma, meter, np.eye(3), [[1], [2]])


def test_process_validation():
    p = build_section2(2, 2)
    with pytest.raises(ToleranceError):
        MeasuringProcess(2, p.phi_vector, p.projections, 2 * p.interaction)
    with pytest.raises(ToleranceError):
        MeasuringProcess(2, p.phi_vector, p.projections[:1], p.interaction)
    with pytest.raises(InputError):
        MeasuringProcess(2, 2 * p.phi_vector, p.projections, p.interaction)


@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_random_processes_give_instruments(k, n):
    for seed in range(20):
        p = build_random_process(k, n, seed=seed)
        E = instrument_from_process(p)
        assert verify_axioms(E).passed
        assert np.allclose(sum(p.projections), np.eye(k ** n), atol=1e-12)


def test_identity_interaction_gives_no_information():
    p = build_section2(2, 3, identity_interaction=True)
    povm = povm_of(instrument_from_process(p))
    assert np.allclose(povm.elements[0], np.eye(2), atol=1e-12)
    assert np.allclose(povm.elements[1], 0, atol=1e-12)
    assert np.allclose(conditional_expectation(p, np.eye(p.combined_dim)), np.eye(2))


def test_conditional_expectation_of_section2_projections():
    k = 3
    p = build_section2(k, 2)
    for i, e in enumerate(p.projections):
        t = np.kron(np.eye(k), e)
        assert np.allclose(conditional_expectation(p, t), matrix_unit(i, i, k), atol=1e-10)
    assert exact_observation_residual(p) <= 1e-10
    phi = random_state(k, seed=8)
    E = instrument_from_process(p)
    for i, e in enumerate(p.projections):
        expected = np.trace(phi.density @ conditional_expectation(p, np.kron(np.eye(k), e)))
        assert abs(np.trace(E.output(i, phi.density)) - expected) <= 1e-12


def test_post_interaction_state_without_interaction_is_a_product():
    p = build_section2(2, 3, identity_interaction=True)
    phi = random_state(2, seed=4)
    step = p.apparatus.step()
    app = step.dual(np.outer(p.phi_vector, p.phi_vector.conj()))
    t_phi = post_interaction_state(p, phi)
    assert np.allclose(t_phi.density, np.kron(phi.density, app), atol=1e-12)
    assert np.real(np.trace(t_phi.density)) == pytest.approx(1.0)


def test_post_interaction_state_of_a_vector_state_is_pure():
    p = build_section2(2, 3)
    assert is_pure(post_interaction_state(p, vector_state([1, 0])))
    with pytest.raises(InputError):
        post_interaction_state(realize_instrument(projective_qubit()), vector_state([1, 0]))


def test_central_decomposition_weights_and_components():
    p = build_section2(2, 2)
    phi = diagonal_state([0.3, 0.7])
    dec = central_decomposition(p, phi)
    assert np.allclose(dec.weights, [0.3, 0.7], atol=1e-10)
    assert dec.reconstruction_residual() <= 1e-9
    assert dec.overlap_residual() <= 1e-9
    assert dec.purity_residual() <= 1e-10
    for i, c in enumerate(dec.components):
        assert np.allclose(restricted_state(c, 2).density, matrix_unit(i, i, 2), atol=1e-9)
    pure = central_decomposition(p, vector_state([1, 0]))
    assert np.allclose(pure.weights, [1.0, 0.0], atol=1e-12)
    assert pure.components[1] is None


@pytest.mark.parametrize("eps", [1e-5, 1e-6, 1e-7])
def test_central_decomposition_with_a_small_weight(eps):
    base = build_section2(2, 2)
    f = np.kron(fourier(2), np.eye(4))
    r = random_interaction(4, seed=11)
    controlled = np.kron(matrix_unit(0, 0, 2), np.eye(4)) + np.kron(matrix_unit(1, 1, 2), r)
    u = f @ controlled @ f.conj().T
    p = MeasuringProcess(2, base.phi_vector, base.projections, u, base.apparatus)
    plus, minus = np.array([1.0, 1.0]) / np.sqrt(2), np.array([1.0, -1.0]) / np.sqrt(2)
    phi = vector_state(np.sqrt(1 - eps) * plus + np.sqrt(eps) * minus)
    dec = central_decomposition(p, phi)
    omega, moved = base.phi_vector, r @ base.phi_vector
    expected = [(1 - eps) * np.vdot(omega, e @ omega).real + eps * np.vdot(moved, e @ moved).real
                for e in base.projections]
    assert np.allclose(dec.weights, expected, atol=1e-12)
    assert dec.weights.sum() == pytest.approx(1.0, abs=1e-12)
    dropped = 0.0
    for w, c in zip(dec.weights, dec.components):
        assert (c is not None) == (w > WEIGHT_CUT)
        if c is None:
            dropped += w
    assert dec.reconstruction_residual() <= dropped + 1e-9


def test_restricted_state_of_a_product():
    a, b = random_state(2, seed=1), random_state(3, seed=2)
    assert np.allclose(restricted_state(product_state([a, b]), 2).density, a.density)
    with pytest.raises(DimensionError):
        restricted_state(np.eye(6) / 6, 4)


def test_sampling_is_reproducible():
    E = projective_qubit()
    certain = sample_outcomes(E, vector_state([1, 0]), 1000, seed=1)
    assert certain.counts.tolist() == [1000, 0]
    phi = diagonal_state([0.3, 0.7])
    h1 = sample_outcomes(E, phi, 100_000, seed=42)
    h2 = sample_outcomes(E, phi, 100_000, seed=42)
    assert np.array_equal(h1.counts, h2.counts)
    sigma = np.sqrt(100_000 * 0.3 * 0.7)
    assert abs(h1.counts[0] - 30_000) <= 4 * sigma
    assert np.allclose(outcome_weights(E, phi), [0.3, 0.7])


def test_outcome_operators_of_a_process():
    p = build_section2(2, 2)
    ops = p.outcome_operators()
    assert np.allclose(sum(ops), np.eye(p.combined_dim), atol=1e-12)
    phi = diagonal_state([0.3, 0.7])
    omega = p.apparatus_state.density
    weights = [np.real(np.trace(np.kron(phi.density, omega) @ f)) for f in ops]
    assert np.allclose(weights, outcome_weights(p, phi), atol=1e-12)
    povm = povm_of(instrument_from_process(p))
    assert povm.min_eigenvalue() >= -1e-12


def test_histogram_frequencies():
    h = sample_outcomes(projective_qubit(), diagonal_state([0.5, 0.5]), 2000, seed=3)
    assert h.frequencies.sum() == pytest.approx(1.0)
    assert h.shots == 2000
