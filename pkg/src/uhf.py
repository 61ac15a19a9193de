"""
uhf.py

Finite truncations of the UHF algebra M_k (x) M_k (x) ... with the symmetry
sigma = (x) Ad v, v = diag(1, w, ..., w^(k-1)): fixed-point blocks, consistent
endomorphism steps gamma_n : M_k^(n-1) -> (M_k^n)^sigma, unitary paths that
implement them asymptotically and finite-level commutant surrogates.

Level n lives on C^(k^n) with the first tensor slot most significant, matching
numpy.kron. The inclusion of level n-1 into level n is x -> x (x) 1_k.
"""

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from src.algebra import (
    SPAN_TOL,
    SubAlgebra,
    as_square,
    commutant_of,
    dagger,
    matrix_unit,
    operator_norm,
    tensor,
)
from src.errors import DimensionError, InputError, ToleranceError

FLAVORS = ("natural", "generic")
MATCHING_TOL = 1e-9
CONSISTENCY_TOL = 1e-10


def _check_k(k):
    if int(k) != k or k < 2:
        raise InputError(f"k must be an integer >= 2, got {k}")


def _check_level(n, minimum=1):
    if int(n) != n or n < minimum:
        raise InputError(f"level must be an integer >= {minimum}, got {n}")


def root_of_unity(k):
    return np.exp(2j * np.pi / k)


def clock(k):
    """v = diag(1, w, ..., w^(k-1))."""
    return np.diag(root_of_unity(k) ** np.arange(k))


def shift(k):
    """Cyclic shift e_j -> e_(j+1 mod k)."""
    return np.roll(np.eye(k, dtype=complex), 1, axis=0)


def fourier(k):
    j = np.arange(k)
    return root_of_unity(k) ** np.outer(j, j) / np.sqrt(k)


def digit_sums(k, n):
    """Sum of the base-k digits of every basis index of level n, mod k."""
    if n == 0:
        return np.zeros(1, dtype=int)
    return np.indices((k,) * n).reshape(n, -1).sum(axis=0) % k


def level_of(dim, k):
    """n with k^n = dim, or DimensionError."""
    n = int(round(np.log(dim) / np.log(k))) if dim > 1 else 0
    if k ** n != dim:
        raise DimensionError(f"dimension {dim} is not a power of {k}")
    return n


@dataclass(frozen=True)
class UhfLadder:
    """
    Levels 1..n_max of the type k^infinity ladder.
    """

    k: int
    n_max: int

    def __post_init__(self):
        _check_k(self.k)
        _check_level(self.n_max)

    @property
    def omega(self):
        return root_of_unity(self.k)

    @property
    def v(self):
        return clock(self.k)

    def dim(self, n):
        return self.k ** n

    def symmetry(self, n):
        return symmetry_action(self.k, n)

    def blocks(self, n):
        return block_projections(self.k, n)

    def steps(self, flavor="natural"):
        return [gamma_step(self.k, n, flavor) for n in range(1, self.n_max + 1)]


def symmetry_action(k, n):
    """
    (v^(x)n, sigma_n) with sigma_n(x) = v^(x)n x v^(x)n*.
    """
    _check_k(k)
    _check_level(n)
    diag = root_of_unity(k) ** digit_sums(k, n)

    def sigma(x):
        x = as_square(x, "x")
        if x.shape[0] != diag.shape[0]:
            raise DimensionError(f"sigma_{n} acts on M_{diag.shape[0]}, got {x.shape[0]}")
        return diag[:, None] * x * diag.conj()[None, :]

    return np.diag(diag), sigma


def block_projections(k, n):
    """Spectral projections E_0..E_(k-1) of v^(x)n, E_j for eigenvalue w^j."""
    _check_k(k)
    _check_level(n)
    sums = digit_sums(k, n)
    return [np.diag((sums == j).astype(complex)) for j in range(k)]


def fixed_point_blocks(k, n):
    """
    Block projections and the fixed-point algebra (M_k^n)^sigma, whose
    orthonormal basis is the set of matrix units inside the diagonal blocks.
    """
    projections = block_projections(k, n)
    dim = k ** n
    sums = digit_sums(k, n)
    units = []
    for j in range(k):
        idx = np.nonzero(sums == j)[0]
        a, b = np.meshgrid(idx, idx, indexing="ij")
        units.append(np.stack([a.ravel(), b.ravel()], axis=1))
    pairs = np.concatenate(units)
    basis = np.zeros((len(pairs), dim, dim))
    basis[np.arange(len(pairs)), pairs[:, 0], pairs[:, 1]] = 1.0
    return projections, SubAlgebra(dim, basis, True)


def fixed_point_dimension_bruteforce(k, n, tol=SPAN_TOL):
    """
    Null-space dimension of x -> sigma_n(x) - x. The superoperator is diagonal
    in the matrix-unit basis, so this counts its vanishing diagonal entries.
    """
    diag = root_of_unity(k) ** digit_sums(k, n)
    superop = np.outer(diag, diag.conj()).reshape(-1) - 1.0
    return int(np.sum(np.abs(superop) <= tol))


def weyl_generators(k, n):
    """Clock and shift of every tensor slot of level n (2n unitaries)."""
    _check_k(k)
    if n == 0:
        return [np.eye(1, dtype=complex)]
    eye = np.eye(k, dtype=complex)
    gens = []
    for slot in range(n):
        for g in (clock(k), shift(k)):
            gens.append(tensor([g if i == slot else eye for i in range(n)]))
    return gens


def weyl_group(k, n):
    """
    Every product of clock and shift powers over the slots of level n; a finite
    group up to phases spanning M_(k^n).
    """
    z, s = clock(k), shift(k)
    letters = [np.linalg.matrix_power(z, a) @ np.linalg.matrix_power(s, b)
               for a in range(k) for b in range(k)]
    if n == 0:
        yield np.eye(1, dtype=complex)
        return
    for word in itertools.product(letters, repeat=n):
        yield tensor(list(word))


@dataclass(frozen=True, eq=False)
class EndomorphismStep:
    """
    gamma_n : M_P -> M_K with P = k^(n-1), K = k^n.

    gamma_n(x) = sum_j W_j t x t* W_j*, where W_j : C^P -> E_j C^K is the block
    identification W_j e_p = e_c (x) e_p with correction digit
    c = (j - digitsum(p)) mod k, and t is the twist (identity for the natural
    flavor). W_j only permutes basis vectors, so targets[j, p] records the image
    index of e_p.
    """

    k: int
    level: int
    flavor: str
    targets: np.ndarray
    twist: np.ndarray

    @property
    def source_dim(self):
        return self.k ** (self.level - 1)

    @property
    def target_dim(self):
        return self.k ** self.level

    @property
    def isometries(self):
        p = self.source_dim
        w = np.zeros((self.k, self.target_dim, p), dtype=complex)
        for j in range(self.k):
            w[j, self.targets[j], np.arange(p)] = 1.0
        return w

    def apply(self, x):
        x = as_square(x, "x")
        if x.shape[0] != self.source_dim:
            raise DimensionError(f"gamma_{self.level} acts on M_{self.source_dim}, got {x.shape[0]}")
        y = self.twist @ x @ dagger(self.twist)
        out = np.zeros((self.target_dim, self.target_dim), dtype=complex)
        for idx in self.targets:
            out[np.ix_(idx, idx)] = y
        return out

    __call__ = apply

    def images(self):
        """All gamma(e_pq) as a (P, P, K, K) array."""
        p, kk = self.source_dim, self.target_dim
        t = self.twist
        y = np.einsum("ap,bq->pqab", t, t.conj())
        out = np.zeros((p, p, kk, kk), dtype=complex)
        for idx in self.targets:
            out[:, :, idx[:, None], idx[None, :]] = y
        return out

    def image(self):
        """gamma(M_P) as a SubAlgebra; gamma(e_pq)/sqrt(k) is orthonormal."""
        p, kk = self.source_dim, self.target_dim
        return SubAlgebra(kk, self.images().reshape(p * p, kk, kk) / np.sqrt(self.k), True)

    def dual(self, omega, observed_dim=1):
        """
        Predual map (id (x) gamma)_* on densities of M_d (x) M_K: the density of
        x (x) y -> Tr(omega (x (x) gamma(y))).
        """
        omega = as_square(omega, "omega")
        d, kk, p = observed_dim, self.target_dim, self.source_dim
        if omega.shape[0] != d * kk:
            raise DimensionError(f"expected a density on C^{d} (x) C^{kk}, got size {omega.shape[0]}")
        r4 = omega.reshape(d, kk, d, kk)
        acc = np.zeros((d, p, d, p), dtype=complex)
        for idx in self.targets:
            acc += r4[:, idx][:, :, :, idx]
        t = self.twist
        out = np.einsum("pa,ipjq,qb->iajb", t.conj(), acc, t)
        return out.reshape(d * p, d * p)

    def residuals(self):
        """Unit, adjoint and multiplicativity residuals over all matrix units."""
        g = self.images()
        p = self.source_dim
        unit = float(np.max(np.abs(self.apply(np.eye(p)) - np.eye(self.target_dim))))
        adjoint = float(np.max(np.abs(dagger(g) - np.swapaxes(g, 0, 1))))
        mult = 0.0
        for a in range(p):
            for b in range(p):
                prods = np.einsum("xy,rsyz->rsxz", g[a, b], g)
                prods[b] -= g[a]
                mult = max(mult, float(np.max(np.abs(prods))))
        return {"unit": unit, "adjoint": adjoint, "multiplicative": mult}

    def symmetry_residual(self):
        """Largest entry of [gamma(e_pq), v^(x)n] over all matrix units."""
        diag = root_of_unity(self.k) ** digit_sums(self.k, self.level)
        g = self.images()
        comm = g * diag[None, None, None, :] - diag[None, None, :, None] * g
        return float(np.max(np.abs(comm)))

    def consistency_residual(self, previous):
        """
        max |gamma_n(x (x) 1) - gamma_(n-1)(x) (x) 1| over matrix units x of
        level n-2.
        """
        if previous.level != self.level - 1 or previous.k != self.k:
            raise InputError(f"step of level {previous.level} cannot precede level {self.level}")
        eye = np.eye(self.k)
        q = previous.source_dim
        resid = 0.0
        for a in range(q):
            for b in range(q):
                x = matrix_unit(a, b, q)
                diff = self.apply(np.kron(x, eye)) - np.kron(previous.apply(x), eye)
                resid = max(resid, float(np.max(np.abs(diff))))
        return resid


def gamma_step(k, n, flavor="natural"):
    """
    Natural flavor: x -> (+)_j x through the block identifications. Generic
    flavor: natural composed with Ad of the (n-1)-fold Fourier tensor, which is
    still consistent and sigma-fixed but does not preserve the uniform product
    state.
    """
    _check_k(k)
    _check_level(n)
    if flavor not in FLAVORS:
        raise InputError(f"unknown flavor {flavor!r}, expected one of {FLAVORS}")
    p = k ** (n - 1)
    sums = digit_sums(k, n - 1)
    targets = np.stack([((j - sums) % k) * p + np.arange(p) for j in range(k)])
    if flavor == "natural" or n == 1:
        twist = np.eye(p, dtype=complex)
    else:
        twist = tensor([fourier(k)] * (n - 1))
    return EndomorphismStep(k, n, flavor, targets, twist)


def surrogate_commutant(step, adjoin_symmetry=True, tol=SPAN_TOL):
    """
    Commutant of gamma_n(M_(k^(n-1))) in M_(k^n), optionally with v^(x)n adjoined.

    The image is generated by the images of the Weyl generators of the source
    level, so these (unitary) elements stand in for the whole image.
    """
    gens = [step.apply(g) for g in weyl_generators(step.k, step.level - 1)]
    if adjoin_symmetry:
        gens.append(symmetry_action(step.k, step.level)[0])
    return commutant_of(gens, step.target_dim, tol)


def surrogate_group(step, adjoin_symmetry=True):
    """
    Unitary group whose span is gamma(M_P) (with v^(x)n adjoined when asked),
    for the character-formula dimension oracle.
    """
    v = symmetry_action(step.k, step.level)[0]
    powers = [np.linalg.matrix_power(v, j) for j in range(step.k)] if adjoin_symmetry else [None]
    for g in weyl_group(step.k, step.level - 1):
        image = step.apply(g)
        for vj in powers:
            yield image if vj is None else image @ vj


def principal_log(u):
    """
    (frame, angles) with u = frame diag(exp(i angles)) frame*, angles in
    (-pi, pi]; frame comes from the complex Schur form of the normal matrix u.
    """
    t, z = scipy.linalg.schur(as_square(u, "u"), output="complex")
    angles = np.angle(np.diag(t))
    rebuilt = (z * np.exp(1j * angles)) @ dagger(z)
    resid = float(np.max(np.abs(rebuilt - u)))
    if resid > CONSISTENCY_TOL:
        raise ToleranceError("unitary is not normal within tolerance", residual=resid, tolerance=CONSISTENCY_TOL)
    return z, angles


@dataclass(frozen=True, eq=False)
class PathSegment:
    """
    Segment m: s -> exp(i s H_m), ambient level m+1, H_m = frame diag(angles) frame*.
    """

    level: int
    frame: np.ndarray
    angles: np.ndarray

    def at(self, s):
        return (self.frame * np.exp(1j * s * self.angles)) @ dagger(self.frame)

    @property
    def endpoint(self):
        return self.at(1.0)


@dataclass(frozen=True, eq=False)
class UnitaryPath:
    """
    Continuous unitary path u_t on level top_level with u_0 = 1.

    intertwiners[m] is the unitary W_m at level m+1 with
    W_m (x (x) 1_k) W_m* = gamma_(m+1)(x) for x at level m; W_0 = 1_k.
    Segment m runs over t in [(m-1)/L, m/L] (L segments) as
    exp(i s H_m) (W_(m-1) (x) 1_k), lifted to the top level by (x) 1.
    """

    k: int
    steps: tuple
    intertwiners: tuple
    segments: tuple

    @property
    def top_level(self):
        return len(self.steps)

    def _lift(self, u, level):
        return np.kron(u, np.eye(self.k ** (self.top_level - level)))

    def value(self, t):
        top = self.k ** self.top_level
        if not 0.0 <= t <= 1.0:
            raise InputError(f"path parameter must lie in [0, 1], got {t}")
        if t == 0.0 or not self.segments:
            return np.eye(top, dtype=complex)
        count = len(self.segments)
        pos = t * count
        m = min(max(int(np.ceil(pos)), 1), count)
        seg = self.segments[m - 1]
        base = np.kron(self.intertwiners[m - 1], np.eye(self.k))
        return self._lift(seg.at(pos - (m - 1)) @ base, m + 1)

    def endpoint_product(self, m):
        """u_1^(m) ... u_1^(1) at level m+1."""
        u = np.eye(self.k ** (m + 1), dtype=complex)
        for seg in self.segments[:m]:
            u = np.kron(seg.endpoint, np.eye(self.k ** (m + 1 - seg.level))) @ u
        return u

    def commutation_residual(self, m):
        """
        max |[u_1^(m), gamma_m(y) (x) 1_k]| over Weyl generators y of level m-1.
        """
        seg = self.segments[m - 1]
        step = self.steps[m - 1]
        u = seg.endpoint
        resid = 0.0
        for y in weyl_generators(self.k, m - 1):
            g = np.kron(step.apply(y), np.eye(self.k))
            resid = max(resid, operator_norm(u @ g - g @ u))
        return resid


def _intertwiner(step):
    """
    Unitary W with W (x (x) 1_k) W* = gamma(x): the range of e_00 (x) 1_k is
    matched to the range of gamma(e_00) and transported by gamma(e_p0).
    """
    p, k = step.source_dim, step.k
    b = scipy.linalg.orth(step.apply(matrix_unit(0, 0, p)))
    if b.shape[1] != k:
        raise ToleranceError(f"gamma(e_00) has rank {b.shape[1]}, expected {k}")
    cols = [step.apply(matrix_unit(q, 0, p)) @ b for q in range(p)]
    w, _ = scipy.linalg.polar(np.hstack(cols))
    eye = np.eye(k)
    resid = 0.0
    for x in weyl_generators(k, step.level - 1):
        resid = max(resid, operator_norm(w @ np.kron(x, eye) @ dagger(w) - step.apply(x)))
    if resid > MATCHING_TOL:
        raise ToleranceError("no unitary matches the subalgebras within tolerance",
                             residual=resid, tolerance=MATCHING_TOL)
    return w


def unitary_path(steps, tol=CONSISTENCY_TOL):
    """
    Path u_t whose endpoint conjugation carries x (x) 1 to gamma(x) for every x
    below the top level: segment m has endpoint u^(m) = W_m (W_(m-1) (x) 1)*,
    which commutes with gamma(M_(k^(m-1))) (x) 1.
    """
    steps = tuple(steps)
    if not steps:
        raise InputError("unitary path needs at least one step")
    k = steps[0].k
    for i, s in enumerate(steps):
        if s.k != k or s.level != i + 1:
            raise InputError(f"steps must be gamma_1..gamma_n of one ladder; position {i} holds level {s.level}")
    for prev, cur in zip(steps[1:], steps[2:]):
        resid = cur.consistency_residual(prev)
        if resid > tol:
            raise ToleranceError(f"steps of levels {prev.level} and {cur.level} are inconsistent",
                                 residual=resid, tolerance=tol)
    intertwiners = [np.eye(k, dtype=complex)]
    segments = []
    for m in range(1, len(steps)):
        w = _intertwiner(steps[m])
        u = w @ dagger(np.kron(intertwiners[-1], np.eye(k)))
        frame, angles = principal_log(u)
        segments.append(PathSegment(m + 1, frame, angles))
        intertwiners.append(w)
    return UnitaryPath(k, steps, tuple(intertwiners), tuple(segments))


def innerness_residual(path, x, t):
    """
    |u_t (x (x) 1) u_t* - gamma(x) (x) 1| at the top level, for x at level l
    below the top.
    """
    x = as_square(x, "x")
    level = level_of(x.shape[0], path.k)
    if level >= path.top_level:
        raise DimensionError(f"x at level {level} is not below the path's top level {path.top_level}")
    u = path.value(t)
    lhs = u @ path._lift(x, level) @ dagger(u)
    rhs = path._lift(path.steps[level].apply(x), level + 1)
    return operator_norm(lhs - rhs)
