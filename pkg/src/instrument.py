"""
instrument.py

Finite-outcome CP instruments on M_d and the measuring processes that produce
them.

An outcome map Phi acts on densities (the Schrodinger picture of phi -> E(E_i, phi))
and is stored through its Choi matrix J = sum_ab e_ab (x) Phi(e_ab). With
J4 = J.reshape(d, d, d, d), J4[a, c, b, d] = Phi(e_ab)[c, d].
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.stats

from src.algebra import (
    as_square,
    contract_second_factor,
    dagger,
    is_unitary,
    operator_norm,
    partial_trace,
    trace_norm,
)
from src.errors import DimensionError, InputError, ToleranceError
from src.report import Report
from src.sampling import sample_counts
from src.states import State, vector_state
from src.uhf import gamma_step

CHOI_PSD_TOL = 1e-10
NORMALIZATION_TOL = 1e-10
PROJECTION_TOL = 1e-12
UNITARY_TOL = 1e-12
WEIGHT_CUT = 1e-8
DEFAULT_PROBES = 16
_LINEARITY_SEED = 7


def kraus_to_choi(kraus):
    """Choi matrix of rho -> sum_s K_s rho K_s*."""
    kraus = np.asarray(kraus, dtype=complex)
    if kraus.ndim == 2:
        kraus = kraus[None]
    vecs = np.swapaxes(kraus, 1, 2).reshape(kraus.shape[0], -1)
    return np.einsum("si,sj->ij", vecs, vecs.conj())


def choi_to_kraus(choi, d, tol=CHOI_PSD_TOL):
    """
    Kraus operators from the eigendecomposition of a Choi matrix; raises
    ToleranceError when an eigenvalue is below -tol.
    """
    evals, vecs = np.linalg.eigh((choi + dagger(choi)) / 2)
    if evals[0] < -tol:
        raise ToleranceError(f"Choi matrix fails the PSD tolerance {tol}: min eigenvalue {evals[0]:.3e}",
                             residual=-evals[0], tolerance=tol)
    scale = max(float(evals[-1]), 1.0)
    keep = evals > 1e-12 * scale
    kraus = [np.sqrt(lam) * vec.reshape(d, d).T for lam, vec in zip(evals[keep], vecs[:, keep].T)]
    return np.array(kraus[::-1]).reshape(-1, d, d)


@dataclass(frozen=True, eq=False)
class Instrument:
    """
    Outcome-labeled CP maps on M_d. Construction checks shapes and hermiticity
    only; the remaining axioms are what verify_axioms measures.
    """

    observed_dim: int
    chois: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        chois = np.asarray(self.chois, dtype=complex)
        d = self.observed_dim
        if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or d < 1:
            raise InputError(f"observed dimension must be a positive integer, got {d!r}")
        if chois.ndim != 3 or chois.shape[1:] != (d * d, d * d):
            raise DimensionError(f"expected Choi matrices of size {d * d}, got shape {chois.shape}")
        if chois.shape[0] == 0:
            raise InputError("an instrument needs at least one outcome")
        herm = float(np.max(np.abs(chois - dagger(chois))))
        if herm > 1e-9 * max(1.0, float(np.max(np.abs(chois)))):
            raise InputError(f"Choi matrices are not Hermitian (residual {herm:.3e})")
        labels = tuple(self.labels) or tuple(f"E{i + 1}" for i in range(chois.shape[0]))
        if len(labels) != chois.shape[0] or len(set(labels)) != len(labels):
            raise InputError("outcome labels must be distinct, one per Choi matrix")
        object.__setattr__(self, "chois", (chois + dagger(chois)) / 2)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_kraus(cls, observed_dim, kraus_sets, labels=()):
        return cls(observed_dim, np.array([kraus_to_choi(k) for k in kraus_sets]), labels)

    @property
    def outcome_count(self):
        return self.chois.shape[0]

    def _tensors(self):
        d = self.observed_dim
        return self.chois.reshape(-1, d, d, d, d)

    def output(self, i, rho):
        """Density of E(E_i, phi) for phi with density rho."""
        return np.einsum("ab,acbd->cd", rho, self._tensors()[i])

    def outputs(self, rho):
        return np.einsum("ab,iacbd->icd", rho, self._tensors())

    def total(self, rho):
        return self.outputs(rho).sum(axis=0)

    def dual(self, i, x):
        """E*(E_i, x): Tr(output(i, rho) x) = Tr(rho dual(i, x))."""
        return np.einsum("acbd,dc->ba", self._tensors()[i], x)

    def choi_min_eigenvalues(self):
        return np.array([np.linalg.eigvalsh(c)[0] for c in self.chois])


@dataclass(frozen=True, eq=False)
class Povm:
    observed_dim: int
    elements: np.ndarray

    def completeness_residual(self):
        return float(np.max(np.abs(self.elements.sum(axis=0) - np.eye(self.observed_dim))))

    def min_eigenvalue(self):
        return float(min(np.linalg.eigvalsh((e + dagger(e)) / 2)[0] for e in self.elements))


@dataclass(frozen=True)
class Apparatus:
    """(k, level, flavor) of the UHF truncation carrying the apparatus."""

    k: int
    level: int
    flavor: str = "natural"

    @property
    def dim(self):
        return self.k ** self.level

    def step(self):
        return gamma_step(self.k, self.level, self.flavor)


@dataclass(frozen=True, eq=False)
class MeasuringProcess:
    """
    Finite measuring process: observed system C^d, probe C^K in the pure state
    phi_vector, outcome projections on C^K and the interaction U on C^d (x) C^K.
    apparatus is None for processes that do not come from a UHF ladder.
    """

    observed_dim: int
    phi_vector: np.ndarray
    projections: tuple
    interaction: np.ndarray
    apparatus: Apparatus = None
    labels: tuple = ()

    def __post_init__(self):
        omega = np.asarray(self.phi_vector, dtype=complex).reshape(-1)
        probe = omega.shape[0]
        if abs(np.linalg.norm(omega) - 1.0) > 1e-12:
            raise InputError("apparatus vector must be a unit vector")
        u = as_square(self.interaction, "interaction")
        if u.shape[0] != self.observed_dim * probe:
            raise DimensionError(f"interaction of size {u.shape[0]} on C^{self.observed_dim} (x) C^{probe}")
        if not is_unitary(u, UNITARY_TOL):
            raise ToleranceError("interaction is not unitary", tolerance=UNITARY_TOL)
        projections = tuple(as_square(p, "projection") for p in self.projections)
        for p in projections:
            if p.shape[0] != probe:
                raise DimensionError(f"projection of size {p.shape[0]} on C^{probe}")
            if np.max(np.abs(p @ p - p)) > PROJECTION_TOL or np.max(np.abs(p - dagger(p))) > PROJECTION_TOL:
                raise ToleranceError("outcome operator is not an orthogonal projection", tolerance=PROJECTION_TOL)
        if np.max(np.abs(sum(projections) - np.eye(probe))) > PROJECTION_TOL:
            raise ToleranceError("outcome projections do not sum to the identity", tolerance=PROJECTION_TOL)
        if self.apparatus is not None and self.apparatus.dim != probe:
            raise DimensionError(f"apparatus level has dimension {self.apparatus.dim}, vector has {probe}")
        labels = tuple(self.labels) or tuple(f"E{i + 1}" for i in range(len(projections)))
        object.__setattr__(self, "phi_vector", omega)
        object.__setattr__(self, "projections", projections)
        object.__setattr__(self, "interaction", u)
        object.__setattr__(self, "labels", labels)

    @property
    def probe_dim(self):
        return self.phi_vector.shape[0]

    @property
    def combined_dim(self):
        return self.observed_dim * self.probe_dim

    @property
    def apparatus_state(self):
        return vector_state(self.phi_vector)

    def dilated_state(self, rho):
        """U (rho (x) Omega Omega*) U*."""
        omega = self.phi_vector
        return self.interaction @ np.kron(rho, np.outer(omega, omega.conj())) @ dagger(self.interaction)

    def outcome_operators(self):
        """F_i = U* (1 (x) E_i) U."""
        eye = np.eye(self.observed_dim)
        u = self.interaction
        return [dagger(u) @ np.kron(eye, e) @ u for e in self.projections]


def _density(phi, d):
    rho = phi.density if isinstance(phi, State) else as_square(phi, "density")
    if rho.shape[0] != d:
        raise DimensionError(f"state on M_{rho.shape[0]} for an instrument on M_{d}")
    return rho


def dilation_instrument(interaction, observed_dim, probe_density, projections, labels=()):
    """
    Instrument rho -> Tr_probe[(1 (x) E_i) U (rho (x) sigma) U*] for a probe
    density sigma. Each eigenvector w of sigma with weight lam gives the isometry
    sqrt(lam) U (1 (x) w), and compressing it by an orthonormal basis of range(E_i)
    gives the Kraus operators of outcome i.
    """
    d = observed_dim
    sigma = as_square(probe_density, "probe density")
    probe = sigma.shape[0]
    u4 = as_square(interaction, "interaction").reshape(d, probe, d, probe)
    evals, vecs = np.linalg.eigh((sigma + dagger(sigma)) / 2)
    keep = evals > 1e-14
    isometries = [np.sqrt(lam) * np.einsum("cxay,y->cxa", u4, w) for lam, w in zip(evals[keep], vecs[:, keep].T)]
    kraus_sets = []
    for e in projections:
        basis = scipy.linalg.orth(as_square(e, "projection"))
        ops = [np.einsum("x,cxa->ca", b.conj(), v) for v in isometries for b in basis.T]
        kraus_sets.append(np.array(ops).reshape(-1, d, d) if ops else np.zeros((1, d, d), dtype=complex))
    return Instrument.from_kraus(d, kraus_sets, labels)


def instrument_from_process(p):
    """E(E_i, phi)(x) = (phi (x) phi_app)(U* (x (x) E_i) U), outcome by outcome."""
    omega = p.phi_vector
    return dilation_instrument(p.interaction, p.observed_dim, np.outer(omega, omega.conj()),
                               p.projections, p.labels)


def vn_instrument(probe_dim, probe_state, meter, interaction, partition, tol=1e-9):
    """
    Instrument E(D, phi)(x) = (phi (x) phi_probe)(U* (x (x) E_M(D)) U) for the
    cells D of a partition of the spectrum of the Hermitian meter M.
    """
    meter = as_square(meter, "meter")
    if meter.shape[0] != probe_dim:
        raise DimensionError(f"meter of size {meter.shape[0]} on a {probe_dim}-dim probe")
    if np.max(np.abs(meter - dagger(meter))) > tol:
        raise InputError("meter must be Hermitian")
    u = as_square(interaction, "interaction")
    if u.shape[0] % probe_dim:
        raise DimensionError(f"interaction of size {u.shape[0]} does not factor through C^{probe_dim}")
    d = u.shape[0] // probe_dim
    evals, vecs = np.linalg.eigh(meter)
    cells = [np.asarray(sorted(cell), dtype=float) for cell in partition]
    owner = np.full(len(evals), -1)
    for ci, cell in enumerate(cells):
        for value in cell:
            hit = np.abs(evals - value) <= tol
            if np.any(owner[hit] >= 0):
                raise InputError(f"eigenvalue {value} belongs to more than one cell")
            owner[hit] = ci
    if np.any(owner < 0):
        raise InputError(f"partition misses eigenvalues {evals[owner < 0].tolist()}")
    projections = []
    for ci in range(len(cells)):
        cols = vecs[:, owner == ci]
        projections.append(cols @ dagger(cols))
    labels = tuple("{" + ",".join(f"{v:g}" for v in cell) + "}" for cell in cells)
    rho = probe_state.density if isinstance(probe_state, State) else as_square(probe_state)
    return dilation_instrument(u, d, rho, projections, labels)


def random_instrument(d, outcomes, rank=1, seed=0):
    """
    Instrument with Gaussian Kraus operators normalized so that
    sum_i,s K_is* K_is = 1.
    """
    if d < 1 or outcomes < 1 or rank < 1:
        raise InputError("dimension, outcome count and rank must be positive")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((outcomes * rank, d, d)) + 1j * rng.standard_normal((outcomes * rank, d, d))
    s = np.einsum("kba,kbc->ac", g.conj(), g)
    evals, vecs = np.linalg.eigh(s)
    inv_root = (vecs / np.sqrt(evals)) @ dagger(vecs)
    kraus = (g @ inv_root).reshape(outcomes, rank, d, d)
    return Instrument.from_kraus(d, list(kraus))


def random_interaction(dim, seed=0):
    """Haar-random unitary on C^dim."""
    if dim == 1:
        return np.ones((1, 1), dtype=complex)
    return np.asarray(scipy.stats.unitary_group.rvs(dim, random_state=seed), dtype=complex)


def dual_map(E, coefficients):
    """b -> E*(sum_i q_i E_i, b)."""
    q = np.asarray(coefficients, dtype=complex).reshape(-1)
    if q.shape[0] != E.outcome_count:
        raise DimensionError(f"{q.shape[0]} coefficients for {E.outcome_count} outcomes")

    def apply(b):
        b = as_square(b, "b")
        return sum(q[i] * E.dual(i, b) for i in range(E.outcome_count) if q[i] != 0) + np.zeros_like(b)

    return apply


def povm_of(E):
    eye = np.eye(E.observed_dim, dtype=complex)
    return Povm(E.observed_dim, np.array([E.dual(i, eye) for i in range(E.outcome_count)]))


def probe_vectors(d, count=DEFAULT_PROBES):
    """
    Standard basis vectors, then (e_a + e_b)/sqrt(2) for a < b, truncated to count.
    """
    vecs = list(np.eye(d, dtype=complex))
    for a in range(d):
        for b in range(a + 1, d):
            v = np.zeros(d, dtype=complex)
            v[[a, b]] = 1 / np.sqrt(2)
            vecs.append(v)
    return vecs[:count]


def verify_axioms(E, probes=None, tol=1e-9):
    """
    Residuals of the instrument axioms: positivity of E(Q, phi) for Q >= 0 and
    phi >= 0, complete positivity through the Choi spectra, normalization
    E(1, phi)(1) = phi(1) together with E*(1, 1) = 1, and linearity in Q and in
    phi on random combinations.
    """
    d = E.observed_dim
    if probes is None:
        probes = [vector_state(v) for v in probe_vectors(d)]
    rhos = [_density(phi, d) for phi in probes]
    report = Report()

    min_eigs = E.choi_min_eigenvalues()
    report.derived["choi_min_eigenvalues"] = [float(x) for x in min_eigs]
    report.add("CP", max(0.0, -float(min_eigs.min())), tol, "Choi matrix of every E(E_i) is PSD")

    positivity = 0.0
    normalization = 0.0
    for rho in rhos:
        outs = E.outputs(rho)
        for out in list(outs) + [outs.sum(axis=0)]:
            positivity = max(positivity, -float(np.linalg.eigvalsh((out + dagger(out)) / 2)[0]))
        normalization = max(normalization, abs(np.trace(outs.sum(axis=0)) - np.trace(rho)))
    report.add("positivity", max(0.0, positivity), tol, "E(Q, phi) >= 0 for Q >= 0, phi >= 0")
    report.add("normalization", normalization, tol, "E(1, phi)(1) = phi(1)")
    unital = operator_norm(dual_map(E, np.ones(E.outcome_count))(np.eye(d)) - np.eye(d))
    report.add("unitality", unital, tol, "E*(1, 1) = 1")

    rng = np.random.default_rng(_LINEARITY_SEED)
    linearity = 0.0
    for _ in range(4):
        r1, r2 = (rng.standard_normal((2, d, d)) + 1j * rng.standard_normal((2, d, d)))
        alpha, beta = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        q1, q2 = rng.standard_normal((2, E.outcome_count))
        lhs = np.tensordot(q1 + q2, E.outputs(alpha * r1 + beta * r2), axes=1)
        rhs = sum(np.tensordot(q, alpha * E.outputs(r1) + beta * E.outputs(r2), axes=1) for q in (q1, q2))
        scale = max(1.0, float(np.max(np.abs(rhs))))
        linearity = max(linearity, float(np.max(np.abs(lhs - rhs))) / scale)
    report.add("linearity", linearity, tol, "E(Q, phi) linear in Q and in phi")
    report.notes.append("continuity in Q and monotone limits are vacuous at finite dimension; "
                        "only finite additivity is checked")
    return report


def conditional_expectation(p, t):
    """E_phi(T) = contraction of U* T U against the apparatus vector."""
    t = as_square(t, "T")
    if t.shape[0] != p.combined_dim:
        raise DimensionError(f"T of size {t.shape[0]} on a {p.combined_dim}-dim combined space")
    u = p.interaction
    return contract_second_factor(dagger(u) @ t @ u, p.phi_vector)


def exact_observation_residual(p):
    """
    Multiplicativity of E_phi on span{1 (x) E_i}:
    max |E_phi(1 (x) E_i) E_phi(1 (x) E_j) - delta_ij E_phi(1 (x) E_i)|.
    """
    eye = np.eye(p.observed_dim)
    images = [conditional_expectation(p, np.kron(eye, e)) for e in p.projections]
    resid = 0.0
    for i, a in enumerate(images):
        for j, b in enumerate(images):
            target = a if i == j else np.zeros_like(a)
            resid = max(resid, operator_norm(a @ b - target))
    return resid


def post_interaction_state(p, phi):
    """
    T(phi): x (x) a -> (phi (x) phi_app)(U* (x (x) gamma(a)) U) on M_d (x) M_(k^(n-1)).
    """
    if p.apparatus is None:
        raise InputError("process carries no endomorphism to pull back through")
    rho = _density(phi, p.observed_dim)
    step = p.apparatus.step()
    if step.target_dim != p.probe_dim:
        raise DimensionError(f"gamma_{step.level} lands in M_{step.target_dim}, probe is {p.probe_dim}")
    return State(step.dual(p.dilated_state(rho), p.observed_dim))


def outcome_weights(source, phi):
    """
    Outcome probabilities of phi, from an Instrument (Tr E(E_i, phi)) or a
    MeasuringProcess ((phi (x) phi_app)(F_i)).
    """
    if isinstance(source, Instrument):
        rho = _density(phi, source.observed_dim)
        w = np.real(np.einsum("icc->i", source.outputs(rho)))
    else:
        rho = _density(phi, source.observed_dim)
        psi = source.dilated_state(rho)
        eye = np.eye(source.observed_dim)
        w = np.array([np.real(np.trace(psi @ np.kron(eye, e))) for e in source.projections])
    return np.clip(w, 0.0, None)


def sample_outcomes(source, phi, shots, seed, progress=False):
    return sample_counts(outcome_weights(source, phi), shots, seed, progress)


def _support(rho, tol=1e-10):
    evals, vecs = np.linalg.eigh(rho)
    cols = vecs[:, evals > tol * max(float(evals[-1]), 1e-300)]
    return cols @ dagger(cols)


def support_overlap(rho1, rho2):
    """Operator norm of the product of the two support projections."""
    return operator_norm(_support(rho1) @ _support(rho2))


@dataclass(frozen=True, eq=False)
class CentralDecomposition:
    """
    T(phi) = sum_i w_i omega_i along the outcome projections.

    compressions[i] is (1 (x) E_i) Psi (1 (x) E_i) / w_i for the dilated state Psi,
    components[i] its pull-back through (id (x) gamma)_* when the process has an
    apparatus. Entries for weights at or below WEIGHT_CUT are None.
    """

    weights: np.ndarray
    compressions: list
    components: list
    total: State = None
    dilated: np.ndarray = field(default=None, repr=False)

    def reconstruction_residual(self):
        if self.total is None:
            return 0.0
        acc = sum(w * c.density for w, c in zip(self.weights, self.components) if c is not None)
        return trace_norm(acc - self.total.density)

    def overlap_residual(self, pulled_back=False):
        items = self.components if pulled_back else self.compressions
        dens = [c.density if isinstance(c, State) else c for c in items if c is not None]
        resid = 0.0
        for i in range(len(dens)):
            for j in range(i + 1, len(dens)):
                resid = max(resid, support_overlap(dens[i], dens[j]))
        return resid

    def purity_residual(self):
        """Largest second eigenvalue over the pulled-back components."""
        resid = 0.0
        for c in self.components:
            if c is not None and c.dim > 1:
                resid = max(resid, float(c.spectrum()[1]))
        return resid


def central_decomposition(p, phi):
    """
    Weights w_i = (phi (x) phi_app)(F_i) and the normalized compressions of the
    dilated state along 1 (x) E_i.
    """
    rho = _density(phi, p.observed_dim)
    psi = p.dilated_state(rho)
    # Psi = A A* with A = U (sqrt(rho) (x) Omega); compressions are Gram matrices of F A
    evals, vecs = np.linalg.eigh(rho)
    root = vecs * np.sqrt(np.clip(evals, 0.0, None))
    amplitudes = p.interaction @ np.kron(root, p.phi_vector.reshape(-1, 1))
    eye = np.eye(p.observed_dim)
    step = p.apparatus.step() if p.apparatus is not None else None
    weights, compressions, components = [], [], []
    for e in p.projections:
        g = np.kron(eye, e) @ amplitudes
        block = g @ dagger(g)
        block = (block + dagger(block)) / 2
        w = float(np.real(np.vdot(g, g)))
        weights.append(max(w, 0.0))
        if w > WEIGHT_CUT:
            normalized = block / w
            compressions.append(normalized)
            if step is None:
                components.append(None)
            else:
                pulled = step.dual(normalized, p.observed_dim)
                components.append(State((pulled + dagger(pulled)) / 2))
        else:
            compressions.append(None)
            components.append(None)
    total = State(step.dual(psi, p.observed_dim)) if step is not None else None
    return CentralDecomposition(np.array(weights), compressions, components, total, psi)


def restricted_state(source, observed_dim):
    """
    Partial trace over the apparatus factor of a State or density on
    C^d (x) C^m.
    """
    rho = source.density if isinstance(source, State) else as_square(source)
    if rho.shape[0] % observed_dim:
        raise DimensionError(f"state of size {rho.shape[0]} does not factor through C^{observed_dim}")
    return State(partial_trace(rho, observed_dim, rho.shape[0] // observed_dim, keep=0))


def instrument_distance(e1, e2, probes=None):
    """
    sum_n 2^-n sum_i |E1(E_i, psi_n) - E2(E_i, psi_n)|_1 over the probe vectors
    (probe_vectors(d) by default).
    """
    if e1.observed_dim != e2.observed_dim:
        raise DimensionError("instruments act on different systems")
    if e1.outcome_count != e2.outcome_count:
        raise InputError(f"outcome sets differ: {e1.outcome_count} vs {e2.outcome_count}")
    if probes is None:
        probes = probe_vectors(e1.observed_dim)
    total = 0.0
    for n, xi in enumerate(probes, start=1):
        xi = np.asarray(xi, dtype=complex).reshape(-1)
        rho = np.outer(xi, xi.conj())
        diff = e1.outputs(rho) - e2.outputs(rho)
        total += 2.0 ** -n * sum(trace_norm(x) for x in diff)
    return total


def realize_instrument(E, tol=CHOI_PSD_TOL):
    """
    Measuring process reproducing E.

    Every outcome map is factored into Kraus operators padded to the common
    rank r. The probe is C^m (x) C^r (x) C^d with apparatus vector |0, 0, 0>
    and outcome projections |i><i| (x) 1 (x) 1; the isometry
    xi -> sum_is K_is xi (x) |i, s, 0> fills the columns of U on C^d (x) Omega
    and an orthonormal basis of its range complement fills the rest.
    """
    d, m = E.observed_dim, E.outcome_count
    kraus_sets = [choi_to_kraus(c, d, tol) for c in E.chois]
    r = max(1, max(len(k) for k in kraus_sets))
    probe = m * r * d
    v = np.zeros((d, probe, d), dtype=complex)
    for i, ks in enumerate(kraus_sets):
        for s, k in enumerate(ks):
            v[:, (i * r + s) * d, :] = k
    v = v.reshape(d * probe, d)
    iso = float(np.max(np.abs(dagger(v) @ v - np.eye(d))))
    if iso > 1e-9:
        raise ToleranceError("outcome maps do not sum to a trace-preserving map", residual=iso, tolerance=1e-9)
    v, _ = scipy.linalg.polar(v)
    complement = scipy.linalg.null_space(dagger(v))
    u = np.zeros((d * probe, d * probe), dtype=complex)
    seeded = np.arange(d) * probe
    rest = np.setdiff1d(np.arange(d * probe), seeded)
    u[:, seeded] = v
    u[:, rest] = complement
    omega = np.zeros(probe, dtype=complex)
    omega[0] = 1.0
    block = np.eye(r * d)
    projections = []
    for i in range(m):
        e = np.zeros((m, m))
        e[i, i] = 1.0
        projections.append(np.kron(e, block))
    return MeasuringProcess(d, omega, tuple(projections), u, None, E.labels)
