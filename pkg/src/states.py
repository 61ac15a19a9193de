"""
states.py

States on matrix algebras as density matrices, purity and fidelity, the GNS
construction, intertwiners between GNS spaces and the two-dimensional
rotations that stand in for Kadison transitivity.
"""

from dataclasses import dataclass

import numpy as np

from src.algebra import (
    RANK_TOL,
    SubAlgebra,
    as_square,
    dagger,
    matrix_unit,
    orthonormal_basis,
    tensor,
)
from src.errors import DimensionError, InputError, ToleranceError

STATE_TOL = 1e-12
PURITY_TOL = 1e-10
INVARIANCE_TOL = 1e-10
INTERTWINING_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class State:
    """
    A state phi(x) = Tr(density x) on M_N.
    """

    density: np.ndarray

    def __post_init__(self):
        rho = as_square(self.density, "density")
        scale = max(1.0, float(np.max(np.abs(rho))))
        if np.max(np.abs(rho - dagger(rho))) > STATE_TOL * scale:
            raise ToleranceError("density is not Hermitian")
        if abs(np.trace(rho) - 1.0) > STATE_TOL * rho.shape[0]:
            raise ToleranceError("density does not have unit trace", residual=abs(np.trace(rho) - 1.0))
        if np.min(np.linalg.eigvalsh(rho)) < -STATE_TOL * rho.shape[0]:
            raise ToleranceError("density is not positive semidefinite")
        object.__setattr__(self, "density", (rho + dagger(rho)) / 2)

    @property
    def dim(self):
        return self.density.shape[0]

    def __call__(self, x):
        return complex(np.trace(self.density @ x))

    def spectrum(self):
        return np.linalg.eigvalsh(self.density)[::-1]


def maximally_mixed(n):
    return State(np.eye(n, dtype=complex) / n)


def diagonal_state(probabilities):
    p = np.asarray(probabilities, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise InputError(f"diagonal weights must be non-negative and sum to 1, got {p.tolist()}")
    return State(np.diag(p).astype(complex))


def random_state(d, seed=None, rank=None):
    """Density g g* / Tr(g g*) for a Gaussian d x rank matrix g."""
    rng = np.random.default_rng(seed)
    r = d if rank is None else rank
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    rho = g @ dagger(g)
    return State(rho / np.real(np.trace(rho)))


def vector_state(xi, ambient_dim=None):
    """
    Vector state of a unit vector xi: density xi xi*.
    """
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    if ambient_dim is not None and xi.shape[0] != ambient_dim:
        raise DimensionError(f"vector of length {xi.shape[0]} for M_{ambient_dim}")
    norm = np.linalg.norm(xi)
    if norm == 0:
        raise InputError("vector state of the zero vector")
    if abs(norm - 1.0) > 1e-10:
        raise InputError(f"vector state needs a unit vector, got norm {norm}")
    return State(np.outer(xi, xi.conj()))


def product_state(factors):
    """
    Tensor product of states, left factor first.
    """
    if not factors:
        raise InputError("product of an empty list of states")
    if len(factors) == 1:
        return factors[0]
    return State(tensor([f.density for f in factors]))


def is_pure(s, tol=PURITY_TOL):
    spec = s.spectrum()
    return len(spec) < 2 or spec[1] <= tol


def fidelity(s1, s2):
    """
    (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2, with the closed form <xi, rho2 xi>
    when one of the states is pure.
    """
    if s1.dim != s2.dim:
        raise DimensionError(f"states on M_{s1.dim} and M_{s2.dim}")
    for a, b in ((s1, s2), (s2, s1)):
        if is_pure(a, STATE_TOL):
            evals, vecs = np.linalg.eigh(a.density)
            xi = vecs[:, -1]
            return float(np.clip(np.real(xi.conj() @ b.density @ xi), 0.0, 1.0))
    evals, vecs = np.linalg.eigh(s1.density)
    root = (vecs * np.sqrt(np.clip(evals, 0.0, None))) @ dagger(vecs)
    inner = np.linalg.eigvalsh(root @ s2.density @ root)
    return float(np.clip(np.sum(np.sqrt(np.clip(inner, 0.0, None))) ** 2, 0.0, 1.0))


@dataclass(frozen=True, eq=False)
class GnsRep:
    """
    GNS representation of a state on M_N.

    The quotient of M_N by the left ideal {a : phi(a*a) = 0} is identified with
    N x r matrices through [a] -> a @ amplitudes, where amplitudes = u sqrt(p)
    collects the r non-negligible eigenpairs of the density. The Gram matrix of
    the form phi(a*b) is then I (x) density^T and has rank N r. A vector of the
    rep space is the row-major flattening of such an N x r matrix, and
    rep(x) = x (x) 1_r.
    """

    source_dim: int
    amplitudes: np.ndarray

    @property
    def multiplicity(self):
        return self.amplitudes.shape[1]

    @property
    def rep_dim(self):
        return self.source_dim * self.multiplicity

    @property
    def cyclic_vector(self):
        return self.amplitudes.reshape(-1)

    def rep(self, x):
        return np.kron(np.asarray(x, dtype=complex), np.eye(self.multiplicity))

    def vector_of(self, a):
        """Coordinates of the class [a]."""
        return (np.asarray(a, dtype=complex) @ self.amplitudes).reshape(-1)

    def lift(self):
        """Right inverse of the amplitude map: a = Y @ lift() has [a] = Y."""
        return np.linalg.pinv(self.amplitudes)

    def image(self):
        """The rep image pi(M_N) as a SubAlgebra of M_{rep_dim}."""
        n = self.source_dim
        units = [self.rep(matrix_unit(i, j, n)) for i in range(n) for j in range(n)]
        return SubAlgebra(self.rep_dim, orthonormal_basis(units, self.rep_dim), True)


def gns(phi):
    """
    GNS triple of phi, with the quotient rank cut at RANK_TOL relative to the
    largest eigenvalue.
    """
    evals, vecs = np.linalg.eigh(phi.density)
    keep = evals > RANK_TOL * max(float(evals[-1]), STATE_TOL)
    amplitudes = vecs[:, keep] * np.sqrt(evals[keep])
    return GnsRep(phi.dim, amplitudes[:, ::-1])


def gns_intertwiner(gamma, source_dim, phi_a, phi_b, invariance_tol=INVARIANCE_TOL, tol=INTERTWINING_TOL):
    """
    Isometry V from H_{phi_a} to H_{phi_b} with V pi_a(x) = pi_b(gamma(x)) V and
    V Omega_a = Omega_b, for a unital *-homomorphism gamma of M_a into M_b with
    phi_b o gamma = phi_a.

    gamma is any callable on source_dim x source_dim matrices.
    """
    if phi_a.dim != source_dim:
        raise DimensionError(f"state on M_{phi_a.dim} for a map out of M_{source_dim}")
    images = [[np.asarray(gamma(matrix_unit(i, j, source_dim))) for j in range(source_dim)]
              for i in range(source_dim)]
    drift = max(abs(phi_b(images[i][j]) - phi_a.density[j, i])
                for i in range(source_dim) for j in range(source_dim))
    if drift > invariance_tol:
        raise ToleranceError("phi_b o gamma differs from phi_a", residual=drift, tolerance=invariance_tol)
    rep_a, rep_b = gns(phi_a), gns(phi_b)
    lift = rep_a.lift()
    r_a = rep_a.multiplicity
    cols = []
    for i in range(source_dim):
        for s in range(r_a):
            gamma_a = sum(lift[s, j] * images[i][j] for j in range(source_dim))
            cols.append(rep_b.vector_of(gamma_a))
    v = np.stack(cols, axis=1)
    resid = 0.0
    for i in range(source_dim):
        for j in range(source_dim):
            lhs = v @ rep_a.rep(matrix_unit(i, j, source_dim))
            rhs = rep_b.rep(images[i][j]) @ v
            resid = max(resid, float(np.max(np.abs(lhs - rhs))))
    if resid > tol:
        raise ToleranceError("intertwining relation violated", residual=resid, tolerance=tol)
    return v


def transitivity_unitary(a, b):
    """
    Unitary u with u a = b that is the identity on span{a, b}^perp.

    The phase of <a, b> is removed first, the real rotation taking a to the
    de-phased b is built on span{a, b}, and the phase is put back on the image
    of a.
    """
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if a.shape != b.shape:
        raise DimensionError("vectors of different lengths")
    if np.linalg.norm(a) == 0 or np.linalg.norm(b) == 0:
        raise InputError("transitivity needs non-zero vectors")
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    n = a.shape[0]
    overlap = np.vdot(a, b)
    phase = np.exp(1j * np.angle(overlap)) if abs(overlap) > 0 else 1.0
    b0 = b / phase
    c = float(np.real(np.vdot(a, b0)))
    rest = b0 - c * a
    s = float(np.linalg.norm(rest))
    if s <= 1e-14:
        return np.eye(n, dtype=complex) + (phase - 1.0) * np.outer(a, a.conj())
    e2 = rest / s
    frame = np.outer(a, a.conj()) + np.outer(e2, e2.conj())
    rotated = phase * np.outer(b0, a.conj()) + np.outer(-s * a + c * e2, e2.conj())
    return np.eye(n, dtype=complex) - frame + rotated
