"""
algebra.py

Dense complex linear algebra and *-subalgebra machinery for finite matrix
algebras: spans, generated algebras, commutants, centers, minimal central
projections and partial contractions.

Every operator is a numpy complex array. Vectorization is row-major throughout,
so vec(a x b) = (a kron b^T) vec(x).
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg

from src.errors import DimensionError, ToleranceError

SPAN_TOL = 1e-10
RANK_TOL = 1e-10
UNIT_TOL = 1e-12

# principal-angle cut used when intersecting spans
_ANGLE_TOL = 1e-6
# relative gap separating two eigenvalue clusters
_CLUSTER_TOL = 1e-8
# internal seed for the random elements used by reductions; results do not
# depend on it beyond the choice of basis phases
_REDUCTION_SEED = 20130211
# complex entries above which commutation systems are solved through their Gram matrix
_DENSE_LIMIT = 1 << 23


def as_matrix(x, name="matrix"):
    """
    Return x as a finite 2-d complex array, raising DimensionError otherwise.
    """
    arr = np.asarray(x, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name} has non-finite entries")
    return arr


def as_square(x, name="matrix"):
    arr = as_matrix(x, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def dagger(x):
    return np.conj(np.swapaxes(x, -1, -2))


def tensor_product(a, b):
    """
    Kronecker product a (x) b; dimensions multiply.
    """
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def tensor(matrices):
    """Tensor product of a list of matrices, left to right."""
    return reduce(tensor_product, matrices)


def matrix_unit(i, j, d):
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


def trace_norm(x):
    return float(np.sum(np.linalg.svd(x, compute_uv=False)))


def operator_norm(x):
    return float(np.linalg.norm(x, 2))


def is_unitary(u, tol=UNIT_TOL):
    u = as_square(u, "u")
    eye = np.eye(u.shape[0])
    return max(np.max(np.abs(dagger(u) @ u - eye)), np.max(np.abs(u @ dagger(u) - eye))) <= tol


@dataclass(frozen=True)
class MatrixUnits:
    """
    A d x d family e_ij inside an ambient algebra, stored as a (d, d, N, N) array.
    """

    d: int
    units: np.ndarray

    @classmethod
    def standard(cls, d):
        units = np.zeros((d, d, d, d), dtype=complex)
        for i in range(d):
            for j in range(d):
                units[i, j, i, j] = 1.0
        return cls(d, units)

    @property
    def ambient_dim(self):
        return self.units.shape[-1]

    def __getitem__(self, ij):
        return self.units[ij]

    def residuals(self):
        """
        Largest deviations from e_ij e_kl = delta_jk e_il, sum_i e_ii = 1 and
        e_ij* = e_ji.
        """
        d = self.d
        mult = 0.0
        for i in range(d):
            for j in range(d):
                prods = np.einsum("ab,klbc->klac", self.units[i, j], self.units)
                expected = np.zeros_like(prods)
                expected[j, :] = self.units[i, :]
                mult = max(mult, float(np.max(np.abs(prods - expected))))
        diag_sum = sum(self.units[i, i] for i in range(d))
        unit = float(np.max(np.abs(diag_sum - np.eye(self.ambient_dim))))
        adj = float(np.max(np.abs(dagger(self.units) - np.swapaxes(self.units, 0, 1))))
        return {"multiplication": mult, "unit": unit, "adjoint": adj}


@dataclass(frozen=True, eq=False)
class SubAlgebra:
    """
    A span inside M_N with a basis that is orthonormal for <a, b> = Tr(a* b).

    basis is an (m, N, N) array; it may be real when every element is.
    """

    ambient_dim: int
    basis: np.ndarray
    unital: bool = True

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def flat(self):
        return self.basis.reshape(self.dim, self.ambient_dim ** 2)

    def coefficients(self, x):
        return self.flat.conj() @ np.asarray(x).reshape(-1)

    def project(self, x):
        return (self.coefficients(x) @ self.flat).reshape(self.ambient_dim, self.ambient_dim)

    def span_residual(self, x):
        """Frobenius distance of x from the span, relative to max(1, |x|)."""
        x = np.asarray(x)
        scale = max(1.0, float(np.linalg.norm(x)))
        return float(np.linalg.norm(x - self.project(x))) / scale

    def contains(self, x, tol=SPAN_TOL):
        return self.span_residual(x) <= tol

    def same_span(self, other, tol=SPAN_TOL):
        if self.dim != other.dim:
            return False
        return all(other.contains(b, tol) for b in self.basis)

    def is_abelian(self, tol=SPAN_TOL):
        b = self.basis
        for i in range(self.dim):
            comm = np.einsum("ab,kbc->kac", b[i], b[i + 1:]) - np.einsum("kab,bc->kac", b[i + 1:], b[i])
            if comm.size and np.max(np.abs(comm)) > tol:
                return False
        return True

    def residuals(self):
        """
        Residuals of the *-algebra invariants: adjoint closure, product closure
        and (for unital spans) identity membership.
        """
        adjoint = max((self.span_residual(dagger(b)) for b in self.basis), default=0.0)
        product = 0.0
        for a in self.basis:
            for b in self.basis:
                product = max(product, self.span_residual(a @ b))
        out = {"adjoint": adjoint, "product": product}
        if self.unital:
            out["unit"] = self.span_residual(np.eye(self.ambient_dim))
        return out

    def random_hermitian(self, rng):
        return _random_hermitian(self.basis, rng)


def orthonormal_basis(matrices, ambient_dim, tol=RANK_TOL):
    """
    Orthonormal basis (trace inner product) of the span of matrices, with rank
    decided at singular value >= tol * largest.
    """
    mats = [as_matrix(m) for m in matrices]
    for m in mats:
        if m.shape != (ambient_dim, ambient_dim):
            raise DimensionError(f"expected {ambient_dim}x{ambient_dim}, got {m.shape}")
    if not mats:
        return np.zeros((0, ambient_dim, ambient_dim), dtype=complex)
    cols = np.stack([m.reshape(-1) for m in mats], axis=1)
    if not np.any(cols):
        return np.zeros((0, ambient_dim, ambient_dim), dtype=complex)
    q = scipy.linalg.orth(cols, rcond=tol)
    return q.T.reshape(q.shape[1], ambient_dim, ambient_dim)


def span(matrices, ambient_dim, tol=RANK_TOL, unital=False):
    return SubAlgebra(ambient_dim, orthonormal_basis(matrices, ambient_dim, tol), unital)


def full_algebra(n):
    return SubAlgebra(n, MatrixUnits.standard(n).units.reshape(n * n, n, n), True)


def scalars(n):
    return SubAlgebra(n, (np.eye(n) / np.sqrt(n)).reshape(1, n, n), True)


def generated_algebra(generators, ambient_dim, tol=SPAN_TOL, unital=True):
    """
    Smallest *-closed span containing the generators (and the identity when
    unital): words are extended one letter at a time until the dimension is
    stable.
    """
    gens = [as_square(g, "generator") for g in generators]
    for g in gens:
        if g.shape[0] != ambient_dim:
            raise DimensionError(f"generator of size {g.shape[0]} in M_{ambient_dim}")
    letters = gens + [dagger(g) for g in gens]
    seed = list(letters)
    if unital:
        seed.append(np.eye(ambient_dim, dtype=complex))
    basis = orthonormal_basis(seed, ambient_dim, tol)
    while True:
        words = list(basis)
        for b in basis:
            words.extend(b @ g for g in letters)
        grown = orthonormal_basis(words, ambient_dim, tol)
        if grown.shape[0] == basis.shape[0]:
            return SubAlgebra(ambient_dim, grown, unital)
        basis = grown


def _random_hermitian(mats, rng):
    mats = np.asarray(mats)
    c1 = rng.standard_normal(mats.shape[0])
    c2 = rng.standard_normal(mats.shape[0])
    x = np.tensordot(c1, mats, axes=1) + 1j * np.tensordot(c2, mats, axes=1)
    return (x + dagger(x)) / 2


def _eigenvalue_clusters(evals, rel_tol=_CLUSTER_TOL):
    scale = max(1.0, float(np.max(np.abs(evals))))
    cuts = np.nonzero(np.diff(evals) > rel_tol * scale)[0] + 1
    return np.split(np.arange(len(evals)), cuts)


def _commutator_columns(g, a_idx, b_idx):
    """
    Columns vec([g, e_ab]) for the unit pairs (a_idx[j], b_idx[j]).
    """
    n = g.shape[0]
    r = len(a_idx)
    cols = np.arange(r)
    c = np.zeros((n, n, r), dtype=complex)
    c[:, b_idx, cols] = g[:, a_idx]
    c[a_idx, :, cols] -= g[b_idx, :]
    return c.reshape(n * n, r)


def _commutator_gram(g, a_idx, b_idx):
    """
    Gram matrix of the columns vec([g, e_ab]) without forming them:
    <[g, e_ab], [g, e_a'b']> = d_bb' (g*g)_aa' - conj(g_a'a) g_b'b
                               - g_aa' conj(g_bb') + d_aa' (gg*)_b'b.
    """
    a_row, a_col = a_idx[:, None], a_idx[None, :]
    b_row, b_col = b_idx[:, None], b_idx[None, :]
    gtg = dagger(g) @ g
    ggt = g @ dagger(g)
    return ((b_row == b_col) * gtg[a_row, a_col]
            - g[a_col, a_row].conj() * g[b_col, b_row]
            - g[a_row, a_col] * g[b_row, b_col].conj()
            + (a_row == a_col) * ggt[b_col, b_row])


def _null_space(system, tol):
    """
    Right null space of a stacked system. Singular values at or below
    tol * max(1, s_max) count as zero, so a system of pure roundoff has rank 0.
    """
    _, sv, vh = scipy.linalg.svd(system, full_matrices=True)
    cut = tol * max(1.0, float(sv[0]) if sv.size else 0.0)
    rank = int(np.sum(sv > cut))
    return vh[rank:].conj().T


def _commutation_null_space(constraints, a_idx, b_idx, tol):
    n = constraints[0].shape[0]
    if len(a_idx) * n * n * len(constraints) <= _DENSE_LIMIT:
        system = np.vstack([_commutator_columns(g, a_idx, b_idx) for g in constraints])
        return _null_space(system, tol)
    gram = sum(_commutator_gram(g, a_idx, b_idx) for g in constraints)
    evals, vecs = scipy.linalg.eigh((gram + dagger(gram)) / 2)
    return vecs[:, evals <= tol * max(float(evals[-1]), 1.0)]


def _commutator_norms(gens, q):
    comm = np.einsum("gab,bc->gac", gens, q) - np.einsum("ab,gbc->gac", q, gens)
    return np.linalg.norm(comm.reshape(len(gens), -1), axis=1)


def commutant_of(generators, ambient_dim, tol=SPAN_TOL):
    """
    Commutant of the *-algebra generated by a set of matrices (a *-closed set,
    or normal matrices).

    A random self-adjoint element of the span block-diagonalizes the candidate
    space; a second one cuts it down, and every generator is then checked. Any
    generator still violated joins the constraint system until none is.
    """
    gens = np.asarray([as_square(g, "generator") for g in generators], dtype=complex)
    if gens.size == 0:
        return full_algebra(ambient_dim)
    if gens.shape[1] != ambient_dim:
        raise DimensionError(f"generators of size {gens.shape[1]} in M_{ambient_dim}")
    rng = np.random.default_rng(_REDUCTION_SEED)
    h1 = _random_hermitian(gens, rng)
    evals, x = scipy.linalg.eigh(h1)
    a_parts, b_parts = [], []
    for block in _eigenvalue_clusters(evals):
        a, b = np.meshgrid(block, block, indexing="ij")
        a_parts.append(a.ravel())
        b_parts.append(b.ravel())
    a_idx = np.concatenate(a_parts)
    b_idx = np.concatenate(b_parts)
    xh = dagger(x)

    gnorms = np.linalg.norm(gens.reshape(len(gens), -1), axis=1)
    verify_tol = 100 * tol * np.maximum(1.0, gnorms)
    constraints = [_random_hermitian(gens, rng)]
    used = np.zeros(len(gens), dtype=bool)
    while True:
        null = _commutation_null_space([xh @ g @ x for g in constraints], a_idx, b_idx, tol)
        qt = np.zeros((null.shape[1], ambient_dim, ambient_dim), dtype=complex)
        qt[:, a_idx, b_idx] = null.T
        q = x @ qt @ xh
        bad = np.zeros(len(gens), dtype=bool)
        for elem in q:
            bad |= _commutator_norms(gens, elem) > verify_tol
        fresh = np.nonzero(bad & ~used)[0]
        if not bad.any():
            return SubAlgebra(ambient_dim, q, True)
        if fresh.size == 0:
            raise ToleranceError("commutant system did not converge within tolerance", tolerance=tol)
        fresh = fresh[:8]
        used[fresh] = True
        constraints.extend(gens[fresh])


def commutant(s, tol=SPAN_TOL):
    """
    Commutant of a SubAlgebra inside M_N.
    """
    return commutant_of(s.basis, s.ambient_dim, tol)


def intersect(s1, s2, tol=SPAN_TOL):
    """
    Intersection of two spans from the principal angles between them.
    """
    if s1.ambient_dim != s2.ambient_dim:
        raise DimensionError("spans live in different ambient algebras")
    n = s1.ambient_dim
    if s1.dim == 0 or s2.dim == 0:
        return SubAlgebra(n, np.zeros((0, n, n), dtype=complex), False)
    overlap = s1.flat.conj() @ s2.flat.T
    u, sv, _ = np.linalg.svd(overlap)
    keep = np.sqrt(np.clip(1.0 - sv ** 2, 0.0, None)) <= _ANGLE_TOL
    vecs = u[:, : len(sv)][:, keep].T @ s1.flat
    basis = orthonormal_basis(list(vecs.reshape(-1, n, n)), n, tol)
    return SubAlgebra(n, basis, s1.unital and s2.unital)


def center(s, tol=SPAN_TOL):
    """
    Center s n s'. An abelian span is its own center.
    """
    if s.is_abelian(tol):
        return s
    return intersect(s, commutant(s, tol), tol)


def minimal_central_projections(s, tol=SPAN_TOL):
    """
    Mutually orthogonal minimal projections of the center of s, summing to the
    identity, from the spectral decomposition of a random self-adjoint central
    element. Ordered by descending rank, then descending diagonal pattern.
    """
    z = center(s, tol)
    if not z.is_abelian(tol):
        raise ToleranceError("center is not abelian within tolerance", tolerance=tol)
    n = s.ambient_dim
    rng = np.random.default_rng(_REDUCTION_SEED)
    h = z.random_hermitian(rng)
    evals, x = scipy.linalg.eigh(h)
    projections = []
    for block in _eigenvalue_clusters(evals):
        xb = x[:, block]
        p = xb @ dagger(xb)
        resid = max(float(np.max(np.abs(p @ p - p))), float(np.max(np.abs(p - dagger(p)))))
        if resid > tol or not z.contains(p, 100 * tol):
            raise ToleranceError("spectral projection left the center", residual=resid, tolerance=tol)
        p[np.abs(p) < 1e-15] = 0.0
        projections.append(p)
    total = sum(projections)
    if np.max(np.abs(total - np.eye(n))) > tol:
        raise ToleranceError("central projections do not sum to the identity", tolerance=tol)
    return sorted(projections, key=projection_order)


def projection_order(p):
    rank = int(round(float(np.real(np.trace(p)))))
    return (-rank, tuple(-np.round(np.real(np.diag(p)), 9)))


def contract_second_factor(t, omega):
    """
    b with <xi, b eta> = <xi (x) omega, T (eta (x) omega)>, T on H_d (x) H_m.
    """
    t = as_square(t, "T")
    omega = np.asarray(omega, dtype=complex).reshape(-1)
    m = omega.shape[0]
    if m == 0 or t.shape[0] % m:
        raise DimensionError(f"T of size {t.shape[0]} does not factor through a {m}-dim space")
    if abs(np.linalg.norm(omega) - 1.0) > SPAN_TOL:
        raise DimensionError("contraction vector must be a unit vector")
    d = t.shape[0] // m
    return np.einsum("iajb,a,b->ij", t.reshape(d, m, d, m), omega.conj(), omega)


def partial_trace(rho, d1, d2, keep=0):
    """
    Trace out one factor of an operator on C^d1 (x) C^d2; keep=0 keeps the first.
    """
    rho = as_square(rho, "rho")
    if rho.shape[0] != d1 * d2:
        raise DimensionError(f"operator of size {rho.shape[0]} is not {d1}x{d2}")
    r4 = rho.reshape(d1, d2, d1, d2)
    if keep == 0:
        return np.einsum("iaja->ij", r4)
    return np.einsum("aiaj->ij", r4)


def commutant_dimension_bruteforce(generators, tol=SPAN_TOL):
    """
    Dimension of the joint null space of Q -> gQ - Qg, solved densely.
    """
    gens = [as_square(g) for g in generators]
    n = gens[0].shape[0]
    eye = np.eye(n)
    system = np.vstack([np.kron(g, eye) - np.kron(eye, g.T) for g in gens])
    return _null_space(system, tol).shape[1]


def commutant_dimension_by_characters(group):
    """
    dim G' = |G|^-1 sum_g |Tr g|^2 for a finite group of unitaries (phases
    allowed) whose span is the algebra.
    """
    traces = np.array([np.trace(g) for g in group])
    return float(np.sum(np.abs(traces) ** 2) / len(traces))
