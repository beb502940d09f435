"""Finite-dimensional representations and the data attached to them."""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg

from . import exact
from .errors import AlgebraMismatch, NoPositiveSolution, NotCommuting, NotDiagonalizable
from .lie_core import CartanDecomposition, MatrixLieAlgebra

if TYPE_CHECKING:
    from .roots import CartanSubalgebra

NULLSPACE_RCOND = 1e-10
METRIC_TRIALS = 64


@dataclass(frozen=True, eq=False)
class Representation:
    """``matrices[i]`` is pi(basis[i]) acting on F = R^dim_F.

    Matrices are exact Fraction arrays when the constructor kept exactness,
    otherwise float arrays.
    """

    algebra: MatrixLieAlgebra
    matrices: np.ndarray
    recipe: str
    field: str = "real"

    @property
    def dim_F(self) -> int:
        return self.matrices.shape[1]

    @property
    def is_exact(self) -> bool:
        return self.matrices.dtype == object

    @functools.cached_property
    def float_matrices(self) -> np.ndarray:
        return np.array(self.matrices, dtype=float)

    def act(self, coords) -> np.ndarray:
        """pi of the algebra element with the given float coordinates."""
        return np.tensordot(np.asarray(coords, dtype=float), self.float_matrices, axes=1)

    def is_trivial(self) -> bool:
        return not np.any(self.float_matrices)


def natural_rep(algebra: MatrixLieAlgebra) -> Representation:
    return Representation(algebra, np.array(algebra.basis, dtype=object), "natural")


def adjoint_rep(algebra: MatrixLieAlgebra) -> Representation:
    return Representation(algebra, algebra.ad(), "adjoint")


def trivial_rep(algebra: MatrixLieAlgebra) -> Representation:
    return Representation(algebra, exact.zeros((algebra.dim, 1, 1)), "trivial")


def dual_rep(rep: Representation) -> Representation:
    return Representation(rep.algebra, -np.transpose(rep.matrices, (0, 2, 1)), f"dual({rep.recipe})", rep.field)


def tensor_rep(r1: Representation, r2: Representation) -> Representation:
    if r1.algebra is not r2.algebra:
        raise AlgebraMismatch("tensor product of representations of different algebras")
    id1 = exact.identity(r1.dim_F) if r1.is_exact else np.eye(r1.dim_F)
    id2 = exact.identity(r2.dim_F) if r2.is_exact else np.eye(r2.dim_F)
    if r1.is_exact != r2.is_exact:
        r1m, r2m = r1.float_matrices, r2.float_matrices
        id1, id2 = np.eye(r1.dim_F), np.eye(r2.dim_F)
    else:
        r1m, r2m = r1.matrices, r2.matrices
    mats = np.array([np.kron(a, id2) + np.kron(id1, b) for a, b in zip(r1m, r2m)])
    field = "complex" if "complex" in (r1.field, r2.field) else "real"
    return Representation(r1.algebra, mats, f"tensor({r1.recipe},{r2.recipe})", field)


def sym_power_rep(rep: Representation, m: int) -> Representation:
    """Induced action on the m-th symmetric power, basis = sorted multisets."""
    if m < 1:
        raise ValueError("symmetric power must be >= 1")
    d = rep.dim_F
    monomials = list(itertools.combinations_with_replacement(range(d), m))
    index = {mono: i for i, mono in enumerate(monomials)}
    dim = len(monomials)
    src = rep.matrices
    out = exact.zeros((len(src), dim, dim)) if rep.is_exact else np.zeros((len(src), dim, dim))
    for col, mono in enumerate(monomials):
        for t, j in enumerate(mono):
            rest = mono[:t] + mono[t + 1:]
            for i in range(d):
                coeff = src[:, i, j]
                if not any(coeff):
                    continue
                row = index[tuple(sorted(rest + (i,)))]
                out[:, row, col] = out[:, row, col] + coeff
    return Representation(rep.algebra, out, f"sym({rep.recipe},{m})", rep.field)


def verify_homomorphism(rep: Representation) -> float:
    """max |pi([X_i,X_j]) - [pi(X_i), pi(X_j)]| over basis pairs.

    Exact representations are scaled to integer matrices first, so the
    float64 products below carry no rounding error for catalog data.
    """
    if rep.is_exact:
        c, dc = exact.to_integer(rep.algebra.structure)
        m, dm = exact.to_integer(rep.matrices)
        c, m = np.asarray(c, dtype=float), np.asarray(m, dtype=float)
    else:
        c, dc = exact.to_float(rep.algebra.structure), 1
        m, dm = rep.float_matrices, 1
    lhs = np.tensordot(c, m, axes=([2], [0])) * dm  # scale dc*dm^2
    prod = np.einsum("iab,jbc->ijac", m, m)
    rhs = (prod - np.transpose(prod, (1, 0, 2, 3))) * dc
    return float(np.abs(lhs - rhs).max() / (dc * dm * dm)) if lhs.size else 0.0


def ortho_matrices(rep: Representation, cartan: CartanDecomposition) -> np.ndarray:
    """pi(X_a) for the Killing-orthonormal basis, p-part first."""
    return np.tensordot(cartan.ortho_basis, rep.float_matrices, axes=1)


# --- admissible metric ------------------------------------------------------

@dataclass(frozen=True)
class AdmissibleMetric:
    gram: np.ndarray
    nullity: int
    skew_residual: float
    sym_residual: float
    method: str

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.gram).min())


def _sym_embedding(d: int) -> np.ndarray:
    """Columns map the upper-triangular parameters of S to vec(S)."""
    pairs = [(a, b) for a in range(d) for b in range(a, d)]
    emb = np.zeros((d * d, len(pairs)))
    for col, (a, b) in enumerate(pairs):
        emb[a * d + b, col] = 1.0
        emb[b * d + a, col] = 1.0
    return emb


def _metric_residuals(gram, mats, p_dim) -> tuple[float, float]:
    skew = sym = 0.0
    for idx, a in enumerate(mats):
        if idx < p_dim:
            sym = max(sym, float(np.abs(a.T @ gram - gram @ a).max()))
        else:
            skew = max(skew, float(np.abs(a.T @ gram + gram @ a).max()))
    return skew, sym


def _is_pd(mat: np.ndarray) -> bool:
    ev = np.linalg.eigvalsh(mat)
    return ev[0] > 1e-10 * max(1.0, abs(ev[-1]))


def admissible_metric(rep: Representation, cartan: CartanDecomposition, seed: int = 0) -> AdmissibleMetric:
    """Positive-definite S with pi(k) S-skew and pi(p) S-symmetric, trace S = dim_F.

    The constraint nullspace is computed numerically.  Candidates, in order:
    the projection of the identity onto it, each basis element with either
    sign, then seeded random integer combinations.
    """
    d = rep.dim_F
    mats = ortho_matrices(rep, cartan)
    emb = _sym_embedding(d)
    eye = np.eye(d)
    basis = np.eye(emb.shape[1])
    # absolute cutoff: a projected block may be pure rounding noise
    cutoff = NULLSPACE_RCOND * max(1.0, float(np.abs(mats).max(initial=0.0)))
    for idx, a in enumerate(mats):
        sign = -1.0 if idx < cartan.p_dim else 1.0
        block = (np.kron(a.T, eye) + sign * np.kron(eye, a.T)) @ emb @ basis
        _, sv, vh = scipy.linalg.svd(block, full_matrices=False)
        keep = sv <= cutoff
        basis = basis @ vh[keep].T
        if basis.shape[1] == 0:
            break
    nullity = basis.shape[1]
    if nullity == 0:
        raise NoPositiveSolution(f"{rep.recipe}: no symmetric solution of the admissibility constraints")
    to_mat = lambda v: (emb @ v).reshape(d, d)  # noqa: E731
    coeff_identity = np.array([float(a == b) for a in range(d) for b in range(a, d)])

    def candidates():
        # basis columns are orthonormal in parameter space
        yield "identity-projection", basis @ (basis.T @ coeff_identity)
        for j in range(nullity):
            yield f"nullspace-basis-{j}", basis[:, j]
            yield f"nullspace-basis-{j}-neg", -basis[:, j]
        rng = np.random.default_rng(seed)
        for t in range(METRIC_TRIALS):
            yield f"random-combination-{t}", basis @ rng.integers(-5, 6, size=nullity).astype(float)

    for method, vec in candidates():
        gram = to_mat(vec)
        gram = (gram + gram.T) / 2
        tr = np.trace(gram)
        if abs(tr) < 1e-12:
            continue
        gram = gram * (d / tr)
        if _is_pd(gram):
            skew, sym = _metric_residuals(gram, mats, cartan.p_dim)
            return AdmissibleMetric(gram, nullity, skew, sym, method)
    raise NoPositiveSolution(f"{rep.recipe}: no positive-definite admissible metric found")


# --- Casimir ----------------------------------------------------------------

def casimir_matrix(rep: Representation, cartan: CartanDecomposition) -> np.ndarray:
    mats = ortho_matrices(rep, cartan)
    p = mats[: cartan.p_dim]
    k = mats[cartan.p_dim:]
    d = rep.dim_F
    return np.einsum("kab,kbc->ac", p, p) - np.einsum("kab,kbc->ac", k, k) if d else np.zeros((0, 0))


def centrality_residual(rep: Representation, casimir: np.ndarray) -> float:
    mats = rep.float_matrices
    return float(max(np.abs(casimir @ m - m @ casimir).max() for m in mats)) if len(mats) else 0.0


# --- weights ----------------------------------------------------------------

WEIGHT_CLUSTER_TOL = 1e-8
WEIGHT_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class WeightData:
    """Weights of pi (or of an invariant subspace) on a theta-stable Cartan subalgebra.

    Each weight is given by its values on the orthonormal basis H_1..H_r of
    the real form h* (compact directions first); with that basis the Killing
    pairing of two weights is the ordinary dot product.
    """

    rep: Representation
    cartan_subalgebra: "CartanSubalgebra"
    weights: np.ndarray
    multiplicities: tuple[int, ...]
    residual: float

    @property
    def dim(self) -> int:
        return sum(self.multiplicities)

    @property
    def is_trivial(self) -> bool:
        return not np.any(self.weights)

    def as_multiset(self) -> list[np.ndarray]:
        return [w for w, m in zip(self.weights, self.multiplicities) for _ in range(m)]


def hstar_matrices(mats: np.ndarray, subalgebra: "CartanSubalgebra") -> list[np.ndarray]:
    """pi(H_j) for the h* basis: i*pi(h) on compact directions, pi(h) otherwise."""
    out = []
    for j, h in enumerate(subalgebra.hstar):
        m = np.tensordot(h, mats, axes=1).astype(complex)
        out.append(1j * m if j < subalgebra.n_compact else m)
    return out


def generic_coefficients(r: int) -> np.ndarray:
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
    return np.sqrt(np.array(primes[:r], dtype=float)) / np.pi


def whitened_matrices(rep: Representation, metric: AdmissibleMetric) -> np.ndarray:
    """pi in an S-orthonormal frame: pi(k) skew, pi(p) symmetric."""
    chol = np.linalg.cholesky(metric.gram)  # S = L L^T
    inv_t = np.linalg.inv(chol.T)
    return np.array([chol.T @ m @ inv_t for m in rep.float_matrices])


def _cartan_blocks(mats: np.ndarray, subalgebra: "CartanSubalgebra") -> tuple[np.ndarray, list[list[int]]]:
    """Eigenbasis of a generic symmetric element built from pi(h), grouped into eigenspaces.

    Noncompact h act symmetrically and compact h skew-symmetrically in the
    S-orthonormal frame, so pi(h) and pi(h)^2 respectively are symmetric.
    Anything commuting with pi preserves these eigenspaces.
    """
    d = mats.shape[1]
    q = np.zeros((d, d))
    for j, (c, h) in enumerate(zip(generic_coefficients(len(subalgebra.hstar)), subalgebra.hstar)):
        m = np.tensordot(h, mats, axes=1)
        q += c * (m @ m if j < subalgebra.n_compact else m)
    q = (q + q.T) / 2
    vals, vecs = np.linalg.eigh(q)
    scale = max(1.0, float(np.abs(vals).max(initial=0.0)))
    blocks: list[list[int]] = []
    for i, v in enumerate(vals):
        if blocks and abs(v - vals[blocks[-1][-1]]) <= 1e-7 * scale:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return vecs, blocks


def commutant_basis(rep: Representation, metric: AdmissibleMetric,
                    subalgebra: "CartanSubalgebra | None" = None) -> np.ndarray:
    """Real matrices commuting with every pi(X), in the S-orthonormal frame.

    With a Cartan subalgebra the unknowns are restricted to block-diagonal
    matrices in a Cartan eigenbasis, which keeps the linear system small.
    """
    mats = whitened_matrices(rep, metric)
    d = rep.dim_F
    cutoff = NULLSPACE_RCOND * max(1.0, float(np.abs(mats).max(initial=0.0)))
    if subalgebra is None:
        frame, blocks = np.eye(d), [list(range(d))]
    else:
        frame, blocks = _cartan_blocks(mats, subalgebra)
    local = np.einsum("ai,nab,bj->nij", frame, mats, frame)
    cols, units = [], []
    for blk in blocks:
        for a in blk:
            for b in blk:
                # [E_ab, B] = e_a B[b, :] - B[:, a] e_b^T
                c = np.zeros((len(local), d, d))
                c[:, a, :] += local[:, b, :]
                c[:, :, b] -= local[:, :, a]
                cols.append(c.ravel())
                units.append((a, b))
    # unknowns never outnumber the n * d^2 equations, so the thin SVD suffices
    _, sv, vh = scipy.linalg.svd(np.array(cols).T, full_matrices=False)
    keep = sv <= cutoff
    out = []
    for coeffs in vh[keep]:
        a_local = np.zeros((d, d))
        for (a, b), x in zip(units, coeffs):
            a_local[a, b] = x
        out.append(frame @ a_local @ frame.T)
    return np.array(out).reshape(-1, d, d)


def decompose(rep: Representation, metric: AdmissibleMetric, field: str = "complex",
              subalgebra: "CartanSubalgebra | None" = None) -> list[np.ndarray]:
    """Orthonormal bases (S-orthonormal frame) of irreducible invariant subspaces.

    ``field="real"`` splits F into real-irreducible pieces; ``"complex"``
    splits F tensor C.  Eigenspaces of a generic self-adjoint element of the
    commutant are irreducible.
    """
    comm = commutant_basis(rep, metric, subalgebra)
    rng = np.random.default_rng(0)
    herm = sum(g * (a + a.T) / 2 for g, a in zip(rng.standard_normal(len(comm)), comm))
    if field == "complex":
        herm = herm + 1j * sum(g * (a - a.T) / 2 for g, a in zip(rng.standard_normal(len(comm)), comm))
    vals, vecs = np.linalg.eigh(herm)
    scale = max(1.0, float(np.abs(vals).max(initial=0.0)))
    blocks: list[list[int]] = []
    for i, v in enumerate(vals):
        if blocks and abs(v - vals[blocks[-1][-1]]) <= 1e-8 * scale:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return [vecs[:, b] for b in blocks]


def weights(rep: Representation, cartan: CartanDecomposition, subalgebra: "CartanSubalgebra",
            metric: AdmissibleMetric | None = None, subspace: np.ndarray | None = None) -> WeightData:
    """Simultaneous eigen-decomposition of pi on the complexified Cartan subalgebra.

    ``subspace`` restricts to an invariant subspace given by orthonormal
    columns in the S-orthonormal frame (see :func:`decompose`).
    """
    if subalgebra.algebra is not rep.algebra:
        raise AlgebraMismatch("Cartan subalgebra belongs to a different algebra")
    metric = metric or admissible_metric(rep, cartan)
    herm = hstar_matrices(whitened_matrices(rep, metric), subalgebra)
    scale = max(1.0, max((float(np.abs(m).max()) for m in herm), default=1.0))
    for a, b in itertools.combinations(herm, 2):
        if np.abs(a @ b - b @ a).max() > 1e-9 * scale * scale:
            raise NotCommuting("pi restricted to the Cartan subalgebra is not commutative")
    herm = [(h + h.conj().T) / 2 for h in herm]
    if subspace is not None:
        herm = [subspace.conj().T @ h @ subspace for h in herm]
    size = herm[0].shape[0] if herm else (rep.dim_F if subspace is None else subspace.shape[1])
    generic = sum((c * h for c, h in zip(generic_coefficients(len(herm)), herm)),
                  np.zeros((size, size), dtype=complex))
    vals, vecs = np.linalg.eigh(generic)
    clusters: list[list[int]] = []
    for i, v in enumerate(vals):
        if clusters and abs(v - vals[clusters[-1][-1]]) <= WEIGHT_CLUSTER_TOL * scale:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    wts, mults, resid = [], [], 0.0
    for cl in clusters:
        v = vecs[:, cl]
        w = np.array([np.trace(v.conj().T @ h @ v).real / len(cl) for h in herm])
        for h, wj in zip(herm, w):
            resid = max(resid, float(np.abs(h @ v - wj * v).max()))
        wts.append(w)
        mults.append(len(cl))
    if resid > WEIGHT_RESIDUAL_TOL * scale:
        raise NotDiagonalizable(f"weight residual {resid:.3e} exceeds tolerance")
    wts_arr = np.array(wts).reshape(len(wts), len(herm))
    wts_arr[np.abs(wts_arr) < 1e-10] = 0.0
    order = sorted(range(len(wts)), key=lambda i: tuple(np.round(wts_arr[i], 9)))
    return WeightData(rep, subalgebra, wts_arr[order], tuple(mults[i] for i in order), resid)


def constituent_weights(rep: Representation, cartan: CartanDecomposition, subalgebra: "CartanSubalgebra",
                        metric: AdmissibleMetric | None = None, field: str = "complex") -> list[WeightData]:
    """Weight data of each irreducible constituent, in a canonical order."""
    metric = metric or admissible_metric(rep, cartan)
    parts = [weights(rep, cartan, subalgebra, metric, w) for w in decompose(rep, metric, field, subalgebra)]
    return sorted(parts, key=lambda wd: (wd.dim, [tuple(np.round(w, 9)) for w in wd.weights]))


def lex_compare(u: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> int:
    for a, b in zip(u, v):
        if a - b > tol:
            return 1
        if b - a > tol:
            return -1
    return 0


def highest_weight(weightdata: WeightData, order) -> np.ndarray:
    """Largest weight in the lexicographic order defined by ``order``.

    ``order`` is an r x r generator matrix whose rows are H_1..H_r, or any
    object with a ``generator`` attribute.
    """
    gen = np.asarray(getattr(order, "generator", order), dtype=float)
    best = None
    for w in weightdata.weights:
        if best is None or lex_compare(gen @ w, gen @ best) > 0:
            best = w
    return np.array(best, dtype=float)


def to_fraction(x: float, max_den: int = 10**6) -> Fraction:
    return Fraction(x).limit_denominator(max_den)
