"""Matrix Lie algebras with exact structure data and Cartan decompositions.

Structure constants and the Killing form are kept as exact rationals.
Floating point only appears when the Cartan decomposition normalizes its
orthogonal bases.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from . import exact
from .errors import (
    DegenerateParams,
    DimensionMismatch,
    InvalidAlgebra,
    NotAutomorphism,
    NotCartanInvolution,
    NotInvolution,
    UnsupportedFamily,
)

FAMILIES = ("sl_real", "so_lorentz", "su_lorentz")


def _tdot(a: np.ndarray, b: np.ndarray, axes) -> np.ndarray:
    # np.einsum does not accept object arrays; tensordot does
    return np.tensordot(a, b, axes=axes)


@dataclass(frozen=True, eq=False)
class MatrixLieAlgebra:
    """A real Lie algebra spanned by rational square matrices.

    ``structure[i, j, k]`` is the coefficient of ``basis[k]`` in
    ``[basis[i], basis[j]]``; ``killing[i, j]`` is ``trace(ad X_i ad X_j)``.
    """

    name: str
    basis: tuple[np.ndarray, ...]
    structure: np.ndarray
    killing: np.ndarray
    family: str | None = None
    rank_param: int | None = None
    theta: np.ndarray | None = field(default=None, repr=False)
    cartan_candidate: tuple[np.ndarray, ...] | None = field(default=None, repr=False)
    _rows: tuple[int, ...] = field(default=(), repr=False)
    _row_inverse: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def matrix_size(self) -> int:
        return self.basis[0].shape[0]

    def coordinates(self, matrix) -> np.ndarray:
        """Exact coordinates of a matrix in the basis; raises if not in the span."""
        mat = exact.as_fraction_array(matrix)
        flat = mat.ravel()
        coords = self._row_inverse @ flat[list(self._rows)]
        recon = sum((c * b for c, b in zip(coords, self.basis)), exact.zeros(mat.shape))
        if not exact.is_zero(recon - mat):
            raise InvalidAlgebra(f"matrix is not in the span of {self.name}")
        return coords

    def matrix(self, coords) -> np.ndarray:
        """The matrix with the given (exact or float) coordinates."""
        coords = np.asarray(coords)
        if coords.dtype == object:
            return sum((c * b for c, b in zip(coords, self.basis)), exact.zeros(self.basis[0].shape))
        stack = np.array([exact.to_float(b) for b in self.basis])
        return np.tensordot(coords, stack, axes=1)

    def ad(self) -> np.ndarray:
        """Exact ad matrices, ``ad[i][k, j] = c_ij^k``."""
        return np.transpose(self.structure, (0, 2, 1))

    def jacobi_violation(self) -> int:
        """Number of basis triples violating the Jacobi identity (exact)."""
        c, _ = exact.to_integer(self.structure)
        t1 = _tdot(c, c, ([2], [0]))  # [i,j,k,l] = sum_m c_ij^m c_mk^l
        jac = t1 + np.transpose(t1, (2, 0, 1, 3)) + np.transpose(t1, (1, 2, 0, 3))
        return int(np.count_nonzero(jac))

    def antisymmetry_violation(self) -> int:
        c, _ = exact.to_integer(self.structure)
        return int(np.count_nonzero(c + np.transpose(c, (1, 0, 2))))

    def ad_invariance_violation(self) -> int:
        """Count of (i,j,k) with kappa([X_i,X_j],X_k) + kappa(X_j,[X_i,X_k]) != 0."""
        c, dc = exact.to_integer(self.structure)
        kap, dk = exact.to_integer(self.killing)
        t = _tdot(c, kap, ([2], [0]))  # [i,j,k] = sum_m c_ij^m kappa_mk
        total = t + np.transpose(t, (0, 2, 1))
        return int(np.count_nonzero(total))


def _structure_and_killing(basis, rows, row_inverse, name) -> tuple[np.ndarray, np.ndarray]:
    n = len(basis)
    structure = exact.zeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            br = basis[i] @ basis[j] - basis[j] @ basis[i]
            coords = row_inverse @ br.ravel()[list(rows)]
            recon = sum((c * b for c, b in zip(coords, basis)), exact.zeros(br.shape))
            if not exact.is_zero(recon - br):
                raise InvalidAlgebra(f"{name}: basis is not closed under the bracket")
            structure[i, j] = coords
            structure[j, i] = -coords
    c, d = exact.to_integer(structure)
    kap = _tdot(c, c, ([1, 2], [2, 1]))  # sum_{k,l} c_ik^l c_jl^k
    killing = exact.as_fraction_array(kap) / (d * d)
    return structure, killing


def algebra_from_basis(name: str, basis, *, family=None, rank_param=None, theta=None,
                       cartan_candidate=None) -> MatrixLieAlgebra:
    """Derive all structure data from a list of rational matrices and validate it.

    Raises :class:`InvalidAlgebra` unless the basis is independent, closed under
    the bracket, satisfies Jacobi and has a nondegenerate Killing form.
    """
    basis = tuple(exact.as_fraction_array(b) for b in basis)
    if not basis:
        raise InvalidAlgebra("empty basis")
    shape = basis[0].shape
    if len(shape) != 2 or shape[0] != shape[1] or any(b.shape != shape for b in basis):
        raise InvalidAlgebra("basis matrices must be square and of equal size")
    n = len(basis)
    flat = np.array([b.ravel() for b in basis], dtype=object)  # n x s^2
    _, pivots = exact.rref(flat)
    if len(pivots) != n:
        raise InvalidAlgebra("basis matrices are linearly dependent")
    rows = tuple(pivots)
    row_inverse = exact.inverse(flat[:, list(rows)].T)
    structure, killing = _structure_and_killing(basis, rows, row_inverse, name)
    alg = MatrixLieAlgebra(
        name=name, basis=basis, structure=structure, killing=killing, family=family,
        rank_param=rank_param, _rows=rows, _row_inverse=row_inverse,
    )
    if alg.jacobi_violation():
        raise InvalidAlgebra(f"{name}: Jacobi identity fails")
    if exact.rank(killing) != n:
        raise InvalidAlgebra(f"{name}: Killing form is degenerate (not semisimple)")
    if alg.ad_invariance_violation():
        raise InvalidAlgebra(f"{name}: Killing form is not ad-invariant")
    if theta is None:
        theta = _transpose_involution(alg)
    if cartan_candidate is not None:
        cartan_candidate = tuple(alg.coordinates(h) for h in cartan_candidate)
    return replace(alg, theta=theta, cartan_candidate=cartan_candidate)


def _transpose_involution(alg: MatrixLieAlgebra) -> np.ndarray | None:
    """Coordinates of X -> -X^T when the span is transpose-stable, else None."""
    cols = []
    for b in alg.basis:
        try:
            cols.append(alg.coordinates(-b.T))
        except InvalidAlgebra:
            return None
    return np.array(cols, dtype=object).T


# --- catalog ----------------------------------------------------------------

def _unit(size: int, i: int, j: int) -> np.ndarray:
    m = exact.zeros((size, size))
    m[i, j] = Fraction(1)
    return m


def _realify(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    """Real 2n x 2n matrix of a complex n x n matrix, a+ib -> [[a,-b],[b,a]]."""
    n = re.shape[0]
    out = exact.zeros((2 * n, 2 * n))
    out[0::2, 0::2] = re
    out[0::2, 1::2] = -im
    out[1::2, 0::2] = im
    out[1::2, 1::2] = re
    return out


def _sl_real(n: int):
    E = lambda i, j: _unit(n, i, j)  # noqa: E731
    sym = [E(i, j) + E(j, i) for i in range(n) for j in range(i + 1, n)]
    diag = [E(i, i) - E(i + 1, i + 1) for i in range(n - 1)]
    skew = [E(i, j) - E(j, i) for i in range(n) for j in range(i + 1, n)]
    # fundamental Cartan: planar rotations plus diagonal matrices constant on each 2-block
    blocks = [list(range(b, min(b + 2, n))) for b in range(0, n, 2)]
    cartan = [E(2 * j, 2 * j + 1) - E(2 * j + 1, 2 * j) for j in range(n // 2)]
    for b in range(len(blocks) - 1):
        d = exact.zeros((n, n))
        for i in blocks[b]:
            d[i, i] = Fraction(len(blocks[b + 1]))
        for i in blocks[b + 1]:
            d[i, i] = Fraction(-len(blocks[b]))
        cartan.append(d)
    return sym + diag + skew, cartan


def _so_lorentz(n: int):
    size = n + 1
    E = lambda i, j: _unit(size, i, j)  # noqa: E731
    boosts = [E(i, n) + E(n, i) for i in range(n)]
    rotations = [E(i, j) - E(j, i) for i in range(n) for j in range(i + 1, n)]
    cartan = [E(2 * j, 2 * j + 1) - E(2 * j + 1, 2 * j) for j in range(n // 2)]
    if n % 2:
        cartan.append(boosts[n - 1])
    return boosts + rotations, cartan


def _su_lorentz(n: int):
    size = n + 1
    E = lambda i, j: _unit(size, i, j)  # noqa: E731
    zero = exact.zeros((size, size))
    p_part, k_part = [], []
    for i in range(n):
        p_part.append(_realify(E(i, n) + E(n, i), zero))
        p_part.append(_realify(zero, E(i, n) - E(n, i)))
    for i in range(n):
        for j in range(i + 1, n):
            k_part.append(_realify(E(i, j) - E(j, i), zero))
            k_part.append(_realify(zero, E(i, j) + E(j, i)))
    diag = [_realify(zero, E(k, k) - E(k + 1, k + 1)) for k in range(n)]
    return p_part + k_part + diag, diag


_BUILDERS = {
    "sl_real": (_sl_real, 2, "sl({n},R)"),
    "so_lorentz": (_so_lorentz, 2, "so({n},1)"),
    "su_lorentz": (_su_lorentz, 1, "su({n},1)"),
}


def build_catalog_algebra(family: str, n: int) -> MatrixLieAlgebra:
    """Build a catalog algebra: ``sl_real`` (n>=2), ``so_lorentz`` (n>=2), ``su_lorentz`` (n>=1).

    ``su_lorentz`` is returned realified, as matrices of size 2(n+1).
    """
    if family not in _BUILDERS:
        raise UnsupportedFamily(f"unknown family {family!r}; expected one of {FAMILIES}")
    builder, n_min, label = _BUILDERS[family]
    if isinstance(n, bool) or not isinstance(n, int) or n < n_min:
        raise DegenerateParams(f"{family} requires integer n >= {n_min}, got {n!r}")
    basis, cartan = builder(n)
    return algebra_from_basis(label.format(n=n), basis, family=family, rank_param=n,
                              cartan_candidate=cartan)


def list_catalog() -> list[dict[str, Any]]:
    """Stable description of the supported families."""
    return [
        {
            "family": "sl_real",
            "label": "sl(n,R)",
            "n_range": [2, None],
            "dimension": "n^2 - 1",
            "involution": "X -> -X^T",
            "cartan": "fundamental: planar rotations plus block-constant traceless diagonals",
        },
        {
            "family": "so_lorentz",
            "label": "so(n,1)",
            "n_range": [2, None],
            "dimension": "n(n+1)/2",
            "involution": "X -> -X^T",
            "cartan": "planar rotations of so(n), plus the last boost when n is odd",
        },
        {
            "family": "su_lorentz",
            "label": "su(n,1), realified",
            "n_range": [1, None],
            "dimension": "n^2 + 2n",
            "involution": "X -> -X^T (= -X^* before realification)",
            "cartan": "compact: imaginary traceless diagonals",
        },
    ]


# --- raw ingestion ----------------------------------------------------------

def load_algebra_json(source) -> MatrixLieAlgebra:
    """Load a raw algebra from a JSON document (path, string or dict).

    Format::

        {"name": "...", "basis": [[["p/q", ...], ...], ...],
         "theta": [[...]] (optional, coordinate matrix),
         "cartan": [[[...]]] (optional, matrices)}
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = Path(source).read_text() if not str(source).lstrip().startswith("{") else str(source)
        doc = json.loads(text)
    try:
        basis = [exact.as_fraction_array(m) for m in doc["basis"]]
        theta = exact.as_fraction_array(doc["theta"]) if "theta" in doc else None
        cartan = [exact.as_fraction_array(m) for m in doc["cartan"]] if "cartan" in doc else None
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidAlgebra(f"malformed algebra document: {exc}") from exc
    return algebra_from_basis(doc.get("name", "raw"), basis, theta=theta, cartan_candidate=cartan)


# --- bracket / Killing ------------------------------------------------------

def bracket(algebra: MatrixLieAlgebra, x, y) -> np.ndarray:
    """Coordinates of ``[X, Y]``; exact when both inputs are exact."""
    x, y = np.asarray(x), np.asarray(y)
    if x.shape != (algebra.dim,) or y.shape != (algebra.dim,):
        raise DimensionMismatch(f"expected vectors of length {algebra.dim}")
    if x.dtype == object or y.dtype == object or x.dtype.kind in "iu" and y.dtype.kind in "iu":
        x = exact.as_fraction_array(x)
        y = exact.as_fraction_array(y)
        return _tdot(_tdot(x, algebra.structure, ([0], [0])), y, ([0], [0]))
    c = exact.to_float(algebra.structure)
    return np.einsum("i,j,ijk->k", x, y, c)


def killing_form(algebra: MatrixLieAlgebra) -> np.ndarray:
    return algebra.killing


# --- Cartan decomposition ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class CartanDecomposition:
    """Split g = k + p with Killing-orthonormal bases.

    Rows of ``ortho_basis`` are coordinate vectors: the first ``p_dim`` rows
    satisfy kappa = +identity, the remaining ``k_dim`` rows kappa = -identity.
    ``p_exact``/``k_exact`` hold the same directions as exact, unnormalized,
    mutually orthogonal rational vectors.
    """

    algebra: MatrixLieAlgebra
    theta: np.ndarray
    p_dim: int
    k_dim: int
    ortho_basis: np.ndarray
    p_exact: tuple[np.ndarray, ...]
    k_exact: tuple[np.ndarray, ...]

    @property
    def p_basis(self) -> np.ndarray:
        return self.ortho_basis[: self.p_dim]

    @property
    def k_basis(self) -> np.ndarray:
        return self.ortho_basis[self.p_dim:]

    @property
    def eta(self) -> np.ndarray:
        return np.diag([1.0] * self.p_dim + [-1.0] * self.k_dim)

    def orthonormality_residual(self) -> float:
        kap = exact.to_float(self.algebra.killing)
        return float(np.abs(self.ortho_basis @ kap @ self.ortho_basis.T - self.eta).max())

    def bracket_support_violations(self) -> dict[str, int]:
        """Exact check of [k,k] in k, [k,p] in p, [p,p] in k."""
        c, _ = exact.to_integer(self.algebra.structure)
        th, dt = exact.to_integer(self.theta)
        kv, _ = exact.to_integer(np.array(self.k_exact, dtype=object))
        pv, _ = exact.to_integer(np.array(self.p_exact, dtype=object))
        out = {}
        for key, left, right, sign in (("kk", kv, kv, 1), ("kp", kv, pv, -1), ("pp", pv, pv, 1)):
            if left.size == 0 or right.size == 0:
                out[key] = 0
                continue
            z = _tdot(_tdot(left, c, ([1], [0])), right, ([1], [1]))  # [a, k, b]
            z = np.transpose(z, (0, 2, 1))
            resid = _tdot(z, th, ([2], [1])) - sign * dt * z
            out[key] = int(np.count_nonzero(np.any(resid != 0, axis=2)))
        return out

    def with_rotated_p(self, rotation: np.ndarray) -> "CartanDecomposition":
        """Same split with the p-basis replaced by ``rotation @ p_basis``."""
        rotation = np.asarray(rotation, dtype=float)
        basis = self.ortho_basis.copy()
        basis[: self.p_dim] = rotation @ self.p_basis
        return replace(self, ortho_basis=basis)


def cartan_decompose(algebra: MatrixLieAlgebra, theta=None) -> CartanDecomposition:
    """Validate a Cartan involution and build the orthonormal k/p bases.

    ``theta`` acts on coordinate column vectors; the catalog involution
    (X -> -X^T) is used when omitted.
    """
    n = algebra.dim
    th = algebra.theta if theta is None else exact.as_fraction_array(theta)
    if th is None:
        raise NotInvolution(f"{algebra.name}: no involution supplied and X -> -X^T does not preserve the span")
    if th.shape != (n, n):
        raise DimensionMismatch(f"involution must be {n}x{n}")
    if not exact.is_zero(th @ th - exact.identity(n)):
        raise NotInvolution("theta squared is not the identity")
    c, _ = exact.to_integer(algebra.structure)
    t, dt = exact.to_integer(th)
    lhs = _tdot(c, t, ([2], [1])) * dt  # [i,j,l] = sum_k c_ij^k theta_lk
    rhs = _tdot(_tdot(c, t, ([0], [0])), t, ([0], [0]))  # [l,i,j]
    if np.count_nonzero(lhs - np.transpose(rhs, (1, 2, 0))):
        raise NotAutomorphism("theta does not preserve brackets")
    form = -(algebra.killing @ th)
    if not exact.is_zero(form - form.T) or not exact.is_positive_definite(form):
        raise NotCartanInvolution("-kappa(X, theta Y) is not positive definite")
    kap = algebra.killing
    p_vecs = exact.gram_schmidt(exact.nullspace(th + exact.identity(n)), kap)
    k_vecs = exact.gram_schmidt(exact.nullspace(th - exact.identity(n)), -kap)
    rows = []
    for vecs, sign in ((p_vecs, 1), (k_vecs, -1)):
        for v in vecs:
            norm = float(sign * (v @ kap @ v))
            rows.append(exact.to_float(v) / np.sqrt(norm))
    return CartanDecomposition(
        algebra=algebra, theta=th, p_dim=len(p_vecs), k_dim=len(k_vecs),
        ortho_basis=np.array(rows), p_exact=tuple(p_vecs), k_exact=tuple(k_vecs),
    )
