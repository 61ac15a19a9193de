"""
scenarios.py

Preset constructions wired end to end:

- the block interaction U = sum_i e_ii (x) u_i on a phi_0 apparatus, its
  identity-interaction degenerate case and a Haar-random variant
- the uniform product state chi with the natural endomorphism, with per-factor
  fidelity probes for the disjointness claims
- finite tensor powers of the apparatus as the stand-in for gamma^infinity
"""

from functools import lru_cache

import numpy as np

from src.algebra import (
    SubAlgebra,
    commutant_dimension_bruteforce,
    commutant_dimension_by_characters,
    commutant_of,
    dagger,
    matrix_unit,
    minimal_central_projections,
    operator_norm,
    projection_order,
    tensor,
    trace_norm,
)
from src.errors import InputError, ScenarioError
from src.instrument import (
    Apparatus,
    MeasuringProcess,
    central_decomposition,
    conditional_expectation,
    exact_observation_residual,
    instrument_from_process,
    outcome_weights,
    post_interaction_state,
    povm_of,
    random_interaction,
    restricted_state,
    sample_outcomes,
)
from src.report import Report
from src.sampling import log_p_value
from src.states import (
    State,
    fidelity,
    gns,
    gns_intertwiner,
    is_pure,
    transitivity_unitary,
    vector_state,
)
from src.uhf import clock, gamma_step, surrogate_commutant, surrogate_group, symmetry_action, weyl_generators

TENSOR_POWER_CAP = 4096
DIRECT_CHECK_CAP = 64
BRUTEFORCE_CAP = 27
# group order times ambient entries
CHARACTER_CHECK_CAP = 1 << 24
RANGE_TOL = 1e-10
WEIGHT_TOL = 1e-10
PURITY_TOL = 1e-10
OVERLAP_TOL = 1e-9
SCALAR_TOL = 1e-12
FIDELITY_TOL = 1e-12
CHI_TOL = 1e-12
ISOMETRY_TOL = 1e-10
# a chi-square p-value above 10^-3 passes
SAMPLING_LOG_P = 3.0

LIMIT_ONLY_NOTE = ("M n K(H) = {0} holds only for the infinite apparatus; every finite "
                   "truncation consists of compact operators, so it is recorded, not asserted")


def _check_apparatus(k, n, min_level=2):
    if int(k) != k or k < 2:
        raise InputError(f"k must be an integer >= 2, got {k}")
    if int(n) != n or n < min_level:
        raise InputError(f"levels must be an integer >= {min_level}, got {n}")


@lru_cache(maxsize=32)
def apparatus_projections(k, n, flavor="natural"):
    """
    Minimal projections of the surrogate commutant of gamma_n(M_(k^(n-1))) with
    v^(x)n adjoined, in canonical order.
    """
    comm = surrogate_commutant(gamma_step(k, n, flavor), adjoin_symmetry=True)
    return tuple(minimal_central_projections(comm))


def default_vectors(projections):
    """Smallest-index standard basis vector in the range of each projection."""
    vecs = []
    for e in projections:
        q = int(np.argmax(np.real(np.diag(e)) > 0.5))
        v = np.zeros(e.shape[0], dtype=complex)
        v[q] = 1.0
        vecs.append(v)
    return vecs


def build_section2(k, n, flavor="natural", override_vectors=None, identity_interaction=False):
    """
    Process with observed dimension d = k, apparatus vector psi_1 (phi_0^(x)n by
    default) and U = sum_i e_ii (x) u_i where u_i psi_1 = psi_i.

    override_vectors may replace any psi_i (None keeps the default); each must
    lie in the range of its projection.
    """
    _check_apparatus(k, n)
    projections = apparatus_projections(k, n, flavor)
    vectors = default_vectors(projections)
    if override_vectors is not None:
        if len(override_vectors) != len(vectors):
            raise InputError(f"expected {len(vectors)} vectors, got {len(override_vectors)}")
        for i, v in enumerate(override_vectors):
            if v is None:
                continue
            v = np.asarray(v, dtype=complex).reshape(-1)
            if v.shape[0] != projections[i].shape[0] or np.linalg.norm(v) == 0:
                raise InputError(f"vector {i + 1} must be a non-zero vector of length {projections[i].shape[0]}")
            vectors[i] = v / np.linalg.norm(v)
    for i, (e, v) in enumerate(zip(projections, vectors)):
        resid = float(np.linalg.norm(e @ v - v))
        if resid > RANGE_TOL:
            raise ScenarioError(f"psi_{i + 1} is not in the range of E_{i + 1} (residual {resid:.3e})")
    d = k
    dim = k ** n
    if identity_interaction:
        u = np.eye(d * dim, dtype=complex)
    else:
        u = np.zeros((d * dim, d * dim), dtype=complex)
        for i, v in enumerate(vectors):
            u += np.kron(matrix_unit(i, i, d), transitivity_unitary(vectors[0], v))
    return MeasuringProcess(d, vectors[0], projections, u, Apparatus(k, n, flavor))


def build_random_process(k, n, d=None, seed=0, flavor="natural"):
    """The build_section2 apparatus with a Haar-random interaction on C^d (x) C^(k^n)."""
    _check_apparatus(k, n)
    projections = apparatus_projections(k, n, flavor)
    d = k if d is None else d
    omega = default_vectors(projections)[0]
    u = random_interaction(d * k ** n, seed)
    return MeasuringProcess(d, omega, projections, u, Apparatus(k, n, flavor))


def _povm_scalar_residual(povm):
    d = povm.observed_dim
    resid = 0.0
    for e in povm.elements:
        resid = max(resid, float(np.max(np.abs(e - np.trace(e) / d * np.eye(d)))))
    return resid


def run_section2_check(p, phi, shots=100_000, seed=42, tol=1e-9, progress=False):
    """
    Checks the outcome law of a build_section2 process for the state phi and
    samples it. With the identity interaction the checks switch to the
    no-information case P_1 = 1, P_i = 0.
    """
    d = p.observed_dim
    rho = phi.density if isinstance(phi, State) else np.asarray(phi)
    report = Report(meta={"seed": int(seed), "shots": int(shots)})
    instrument = instrument_from_process(p)
    povm = povm_of(instrument)
    weights = outcome_weights(p, phi)
    report.derived["weights"] = [float(w) for w in weights]
    report.derived["povm_diagonals"] = [[float(x) for x in np.real(np.diag(e))] for e in povm.elements]
    report.add("povm_completeness", povm.completeness_residual(), WEIGHT_TOL, "sum_i P_i = 1")
    trivial = np.array_equal(p.interaction, np.eye(p.combined_dim))
    report.derived["no_information"] = bool(trivial)

    if trivial:
        target = np.zeros_like(povm.elements)
        target[0] = np.eye(d)
        report.add("no_information", float(np.max(np.abs(povm.elements - target))), SCALAR_TOL,
                   "U = 1: P_1 = 1 and P_i = 0, no information is gained")
        report.add("povm_scalar", _povm_scalar_residual(povm), SCALAR_TOL,
                   "U = 1: P_i independent of phi")
        if is_pure(State(rho)):
            total = post_interaction_state(p, phi)
            report.add("post_interaction_purity", float(total.spectrum()[1]), PURITY_TOL,
                       "U = 1: T(phi) = phi (x) phi gamma is pure")
    else:
        units = np.array([matrix_unit(i, i, d) for i in range(d)])
        report.add("povm_diagonal", float(np.max(np.abs(povm.elements - units))), WEIGHT_TOL, "P_i = e_ii")
        diag = np.real(np.diag(rho))
        report.add("weights", float(np.max(np.abs(weights - diag))), WEIGHT_TOL,
                   "(phi (x) phi_app)(F_i) = phi(e_ii)")
        total = post_interaction_state(p, phi)
        law = restricted_state(total, d).density - np.diag(diag)
        report.add("restriction_law", trace_norm(law), tol, "T(phi)|K = sum_i phi(e_ii) Tr(e_ii .)")
        decomp = central_decomposition(p, phi)
        report.add("reconstruction", decomp.reconstruction_residual(), tol, "T(phi) = sum_i w_i omega_i")
        report.add("component_purity", decomp.purity_residual(), PURITY_TOL, "omega_i is a pure state")
        report.add("component_overlap", max(decomp.overlap_residual(), decomp.overlap_residual(pulled_back=True)),
                   OVERLAP_TOL, "omega_i mutually disjoint")
        branch = 0.0
        for i, comp in enumerate(decomp.components):
            if comp is not None:
                branch = max(branch, trace_norm(restricted_state(comp, d).density - matrix_unit(i, i, d)))
        report.add("component_restriction", branch, tol, "phi_i(x) = Tr(e_ii x)")
        report.add("exact_observation", exact_observation_residual(p), tol,
                   "E_phi multiplicative on the observed abelian algebra")

    eye = np.eye(d)
    cond = max(abs(np.real(np.trace(rho @ conditional_expectation(p, np.kron(eye, e)))) - w)
               for e, w in zip(p.projections, weights))
    report.add("conditional_expectation", cond, WEIGHT_TOL, "E(Q, phi)(1) = phi(E_phi(1 (x) Q))")

    histogram = sample_outcomes(p, phi, shots, seed, progress)
    stat, pvalue = histogram.chi_square()
    report.derived["histogram"] = {
        "counts": [int(c) for c in histogram.counts],
        "exact_probability": [float(w) for w in histogram.weights],
    }
    report.derived["chi_square"] = {"statistic": stat, "p_value": pvalue}
    report.add("sampling_chi_square", log_p_value(pvalue), SAMPLING_LOG_P, "outcomes drawn with probabilities w_i")
    report.notes.append(LIMIT_ONLY_NOTE)
    return report


def uniform_vector(k):
    return np.ones(k, dtype=complex) / np.sqrt(k)


def chi_state(k, n):
    """chi restricted to level n: the vector state of the uniform vector, n times."""
    if n == 0:
        return State(np.ones((1, 1), dtype=complex))
    return vector_state(tensor([uniform_vector(k)[:, None]] * n).reshape(-1))


def _kakutani(fidelities, levels):
    """sum over levels of (1 - F) for a constant per-factor fidelity."""
    return {str(j): float(levels * (1.0 - f)) for j, f in fidelities.items()}


def build_chi_scenario(k, n):
    """
    Checks chi o gamma = chi level by level for the natural flavor, probes the
    disjointness claims through per-factor fidelities and builds the GNS
    intertwiners of the chi ladder.
    """
    _check_apparatus(k, n, min_level=1)
    report = Report(meta={"k": int(k), "levels": int(n)})
    steps = [gamma_step(k, level, "natural") for level in range(1, n + 1)]

    invariance = 0.0
    for step in steps:
        pulled = step.dual(chi_state(k, step.level).density)
        invariance = max(invariance, float(np.max(np.abs(pulled - chi_state(k, step.level - 1).density))))
    report.add("chi_invariance", invariance, CHI_TOL, "chi gamma = chi")
    if n >= 2:
        generic = gamma_step(k, n, "generic")
        drift = float(np.max(np.abs(generic.dual(chi_state(k, n).density) - chi_state(k, n - 1).density)))
        report.derived["chi_invariance_generic_flavor"] = drift

    phi1 = vector_state(uniform_vector(k))
    v = clock(k)
    fids = {}
    for j in range(1, k):
        shifted = vector_state(np.linalg.matrix_power(dagger(v), j) @ uniform_vector(k))
        fids[j] = fidelity(phi1, shifted)
    report.add("factor_fidelity", max(fids.values()), FIDELITY_TOL, "phi_1 and phi_1 o Ad v^j are orthogonal")
    report.derived["factor_fidelity"] = {str(j): f for j, f in fids.items()}
    report.derived["kakutani_sum"] = _kakutani(fids, n)
    report.derived["chi_sigma_product_fidelity"] = {str(j): float(f ** n) for j, f in fids.items()}

    psi = _psi_probe(k)
    psi_fids = {}
    for j in range(1, k):
        sigma_j = np.linalg.matrix_power(v, j)
        psi_fids[j] = fidelity(psi, State(dagger(sigma_j) @ psi.density @ sigma_j))
    report.derived["psi_factor_fidelity"] = {str(j): f for j, f in psi_fids.items()}
    report.derived["psi_kakutani_sum"] = _kakutani(psi_fids, n)

    isometry = 0.0
    intertwining = 0.0
    cyclic = 0.0
    for step in steps[1:]:
        source = step.source_dim
        phi_a, phi_b = chi_state(k, step.level - 1), chi_state(k, step.level)
        big_v = gns_intertwiner(step.apply, source, phi_a, phi_b)
        rep_a, rep_b = gns(phi_a), gns(phi_b)
        isometry = max(isometry, float(np.max(np.abs(dagger(big_v) @ big_v - np.eye(big_v.shape[1])))))
        cyclic = max(cyclic, float(np.linalg.norm(big_v @ rep_a.cyclic_vector - rep_b.cyclic_vector)))
        for x in weyl_generators(k, step.level - 1):
            intertwining = max(intertwining,
                               operator_norm(big_v @ rep_a.rep(x) - rep_b.rep(step.apply(x)) @ big_v))
    report.add("gns_isometry", isometry, ISOMETRY_TOL, "V* V = 1 for the chi-ladder intertwiner")
    report.add("gns_intertwining", intertwining, 1e-9, "Ad U pi_chi(x) = pi_chi gamma(x)")
    report.add("gns_cyclic_vector", cyclic, ISOMETRY_TOL, "V Omega = Omega")

    report.notes.extend([
        "chi, chi gamma, ..., chi gamma^(k-1) cannot be mutually disjoint when chi gamma = chi; "
        "the disjointness probes use chi o sigma^j instead",
        "A n gamma(A)' = C1 is a statement about the infinite algebra; no finite-level surrogate is asserted",
        "the psi probe normalizes the superposition by k^(-1/2), which makes it a unit vector",
        "product-state disjointness is indicated by a divergent sum of (1 - F) over levels",
    ])
    return report


def _psi_probe(k):
    """
    Vector state of k^(-1/2) sum_j pi(e_j1) Omega in the GNS space of phi_0 on M_k.
    """
    phi0 = vector_state(np.eye(k, dtype=complex)[0])
    rep = gns(phi0)
    xi = sum(rep.rep(matrix_unit(j, 0, k)) @ rep.cyclic_vector for j in range(k)) / np.sqrt(k)
    return vector_state(xi)


def _tensor_subalgebra(parts):
    dim = int(np.prod([p.ambient_dim for p in parts]))
    basis = [tensor(list(word)) for word in _product([list(p.basis) for p in parts])]
    return SubAlgebra(dim, np.array(basis), True)


def _product(lists):
    if not lists:
        return [()]
    return [(head,) + tail for head in lists[0] for tail in _product(lists[1:])]


def tensor_power_projections(k, n, m):
    """
    Minimal projections of the m-fold tensor surrogate commutant, products of the
    single-copy projections, in canonical order.
    """
    single = apparatus_projections(k, n)
    products = [tensor(list(word)) for word in _product([list(single)] * m)]
    return sorted(products, key=projection_order)


def build_tensor_power(k, n, m):
    """
    m copies of the (apparatus, phi_0^(x)n, gamma) data. The commutant of
    gamma(A)^(x)m with every copy's symmetry adjoined is the tensor product of
    the single-copy commutants; it is cross-checked directly on small ambients.
    """
    _check_apparatus(k, n)
    if int(m) != m or m < 1:
        raise InputError(f"copies must be a positive integer, got {m}")
    dim = k ** (n * m)
    if dim > TENSOR_POWER_CAP:
        raise ScenarioError(f"ambient dimension {k}^{n * m} = {dim} exceeds the cap {TENSOR_POWER_CAP}")
    report = Report(meta={"k": int(k), "levels": int(n), "copies": int(m)})
    step = gamma_step(k, n)
    single = surrogate_commutant(step, adjoin_symmetry=True)
    comm = _tensor_subalgebra([single] * m)
    report.derived["commutant_dim"] = comm.dim
    report.add("commutant_dim", abs(comm.dim - k ** m), 0, "commutant of gamma(A)^(x)m is l^infinity of k^m points")

    if dim <= DIRECT_CHECK_CAP:
        gens = _tensor_generators(step, m)
        direct = commutant_of(gens, dim)
        report.derived["commutant_dim_direct"] = direct.dim
        report.add("commutant_direct", abs(direct.dim - comm.dim), 0, "direct commutant of the tensor generators")
        if dim <= BRUTEFORCE_CAP:
            brute = commutant_dimension_bruteforce(gens)
            report.derived["commutant_dim_bruteforce"] = brute
            report.add("commutant_bruteforce", abs(brute - comm.dim), 0, "dense null-space oracle")
    else:
        single_group = list(surrogate_group(step))
        if len(single_group) ** m * dim * dim <= CHARACTER_CHECK_CAP:
            by_characters = commutant_dimension_by_characters(_tensor_group(single_group, m))
            report.derived["commutant_dim_characters"] = by_characters
            report.add("commutant_characters", abs(by_characters - comm.dim), RANGE_TOL,
                       "character formula over the tensor group")
        else:
            report.notes.append(f"ambient dimension {dim} is beyond the direct and character cross-checks; "
                                "the commutant dimension rests on the single-copy factors")

    projections = tensor_power_projections(k, n, m)
    ranks = [int(round(float(np.real(np.trace(p))))) for p in projections]
    report.derived["projection_ranks"] = ranks
    report.derived["outcome_count"] = len(projections)
    expected = k ** (m * (n - 1))
    report.add("projection_ranks", max(abs(r - expected) for r in ranks), 0, "tensor of rank-k^(n-1) blocks")
    report.add("projection_completeness", float(np.max(np.abs(sum(projections) - np.eye(dim)))), SCALAR_TOL,
               "sum of minimal projections is 1")
    inside = max(comm.span_residual(p) for p in projections)
    report.add("projections_in_commutant", inside, RANGE_TOL, "minimal projections lie in the commutant")
    report.notes.append("countably many outcomes are truncated to the k^m minimal projections of the finite tensor power")
    return report


def _tensor_group(single_group, m):
    for word in _product([list(range(len(single_group)))] * m):
        yield tensor([single_group[i] for i in word])


def _tensor_generators(step, m):
    """Images of the Weyl generators and the symmetry unitary, one copy at a time."""
    k, level = step.k, step.level
    per_copy = [step.apply(g) for g in weyl_generators(k, level - 1)]
    per_copy.append(symmetry_action(k, level)[0])
    eye = np.eye(step.target_dim)
    gens = []
    for c in range(m):
        for g in per_copy:
            gens.append(tensor([g if i == c else eye for i in range(m)]))
    return gens
