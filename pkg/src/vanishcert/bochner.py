"""The operator T^p on p-forms with values in F, and vanishing certificates.

R_p = (p-forms on p) x F is coordinatized by strictly increasing index
tuples times the standard basis of F.  The raw defining formula singles out
the first argument; the operator used for certificates is its
antisymmetrization, which has the same quadratic form under I_p.
"""
from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg

from . import __version__
from .errors import AntisymmetryViolation, GramNotPD
from .lie_core import CartanDecomposition, MatrixLieAlgebra, cartan_decompose
from .rep_core import AdmissibleMetric, Representation, admissible_metric, ortho_matrices

log = logging.getLogger(__name__)

GAP_TOLERANCE = 1e-9
ANTISYMMETRY_TOLERANCE = 1e-7


class AntisymmetryWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PFormSpace:
    N: int
    p: int
    dim_F: int

    def __post_init__(self):
        if not 1 <= self.p <= self.N:
            raise ValueError(f"degree p={self.p} must satisfy 1 <= p <= N={self.N}")

    @property
    def index_set(self) -> tuple[tuple[int, ...], ...]:
        return tuple(itertools.combinations(range(self.N), self.p))

    @property
    def dim(self) -> int:
        return math.comb(self.N, self.p) * self.dim_F

    def position(self) -> dict[tuple[int, ...], int]:
        return {t: i for i, t in enumerate(self.index_set)}


def gram_Ip(space: PFormSpace, metric: AdmissibleMetric) -> np.ndarray:
    """Gram matrix of I_p; summing over ordered tuples gives p! copies of S per increasing tuple."""
    return math.factorial(space.p) * np.kron(np.eye(math.comb(space.N, space.p)), metric.gram)


def _sort_with_sign(tup: tuple[int, ...]) -> tuple[tuple[int, ...] | None, int]:
    if len(set(tup)) < len(tup):
        return None, 0
    perm = sorted(range(len(tup)), key=tup.__getitem__)
    sign = 1
    seen = [False] * len(tup)
    for i in range(len(tup)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return tuple(sorted(tup)), sign


def _operator_blocks(rep: Representation, cartan: CartanDecomposition):
    """Casimir-like sum over p of pi(X_k)^2 and the table pi([X_i, X_k]) for i, k in p."""
    N = cartan.p_dim
    pis = ortho_matrices(rep, cartan)[:N]
    square_sum = np.einsum("kab,kbc->ac", pis, pis)
    c = np.array(cartan.algebra.structure, dtype=float)
    pb = cartan.p_basis
    brackets = np.einsum("ia,kb,abm->ikm", pb, pb, c)
    bracket_reps = np.tensordot(brackets, rep.float_matrices, axes=1)  # (N, N, d, d)
    return square_sum, bracket_reps


@dataclass(frozen=True)
class TpAssembly:
    matrix: np.ndarray
    antisymmetry_residual: float


def raw_values(rep: Representation, cartan: CartanDecomposition, space: PFormSpace,
               theta: np.ndarray, tuples) -> np.ndarray:
    """The unprojected formula evaluated at the given ordered tuples.

    ``theta`` holds coordinates on the increasing-tuple basis.
    """
    square_sum, bracket_reps = _operator_blocks(rep, cartan)
    pos = space.position()
    d, p = space.dim_F, space.p
    blocks = theta.reshape(-1, d)

    def value(tup):
        key, sign = _sort_with_sign(tup)
        return np.zeros(d) if key is None else sign * blocks[pos[key]]

    out = []
    for tup in tuples:
        acc = square_sum @ value(tup) / p
        for k in range(space.N):
            acc = acc + bracket_reps[tup[0], k] @ value((k,) + tuple(tup[1:]))
        out.append(acc)
    return np.array(out)


def assemble_Tp(rep: Representation, cartan: CartanDecomposition, space: PFormSpace, *,
                antisymmetry: str = "warn", tolerance: float = ANTISYMMETRY_TOLERANCE,
                seed: int = 0) -> TpAssembly:
    """Matrix of T^p on the increasing-tuple basis.

    For an increasing tuple I the antisymmetrized output is
    (1/p) sum_k pi(X_k)^2 theta(I) + (1/p) sum_j (-1)^j sum_k pi([X_{i_j}, X_k]) theta(X_k, I minus i_j).
    ``antisymmetry`` is one of ``"raise"``, ``"warn"``, ``"ignore"`` and
    applies when the raw output deviates from its antisymmetrization.
    """
    square_sum, bracket_reps = _operator_blocks(rep, cartan)
    d, p, N = space.dim_F, space.p, space.N
    tuples = space.index_set
    pos = space.position()
    T = np.kron(np.eye(len(tuples)), square_sum) / p
    for row, tup in enumerate(tuples):
        for j, ij in enumerate(tup):
            rest = tup[:j] + tup[j + 1:]
            for k in range(N):
                if k in rest:
                    continue
                key, sign = _sort_with_sign((k,) + rest)
                col = pos[key]
                coef = (-1) ** j * sign / p
                T[row * d:(row + 1) * d, col * d:(col + 1) * d] += coef * bracket_reps[ij, k]
    residual = _antisymmetry_residual(rep, cartan, space, T, seed) if p > 1 else 0.0
    if residual > tolerance:
        msg = f"raw T^{p} output deviates from antisymmetry by {residual:.3e} (relative)"
        if antisymmetry == "raise":
            raise AntisymmetryViolation(msg)
        if antisymmetry == "warn":
            warnings.warn(msg, AntisymmetryWarning, stacklevel=2)
    return TpAssembly(T, residual)


MAX_RESIDUAL_TUPLES = 4000
RESIDUAL_PROBES = 3


def _antisymmetry_residual(rep, cartan, space, T, seed) -> float:
    """Relative gap between raw outputs and the antisymmetrized operator, on random probes."""
    rng = np.random.default_rng(seed)
    ordered = [t for t in itertools.permutations(range(space.N), space.p)]
    if len(ordered) > MAX_RESIDUAL_TUPLES:
        picks = rng.choice(len(ordered), size=MAX_RESIDUAL_TUPLES, replace=False)
        ordered = [ordered[i] for i in sorted(picks)]
    pos = space.position()
    d = space.dim_F
    worst = 0.0
    for _ in range(RESIDUAL_PROBES):
        theta = rng.standard_normal(space.dim)
        raw = raw_values(rep, cartan, space, theta, ordered)
        alt = (T @ theta).reshape(-1, d)
        projected = []
        for tup in ordered:
            key, sign = _sort_with_sign(tup)
            projected.append(sign * alt[pos[key]])
        scale = float(np.abs(raw).max())
        if scale > 0:
            worst = max(worst, float(np.abs(raw - np.array(projected)).max()) / scale)
    return worst


def symmetry_residual(T: np.ndarray, G: np.ndarray) -> float:
    """||GT - T^T G||_max / ||GT||_max, zero for the zero operator."""
    gt = G @ T
    scale = float(np.abs(gt).max())
    return float(np.abs(gt - gt.T).max()) / scale if scale > 0 else 0.0


def generalized_spectrum(T: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Sorted eigenvalues of the G-self-adjoint part of T.

    Solves (GT + T^T G)/2 v = lambda G v by Cholesky whitening.
    """
    G = (G + G.T) / 2
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise GramNotPD("Gram matrix is not positive definite") from exc
    A = (G @ T + T.T @ G) / 2
    W = scipy.linalg.solve_triangular(L, A, lower=True)
    W = scipy.linalg.solve_triangular(L, W.T, lower=True)
    return np.sort(np.linalg.eigvalsh((W + W.T) / 2))


@dataclass(frozen=True)
class CertifyOptions:
    gap_tolerance: float = GAP_TOLERANCE
    antisymmetry_tolerance: float = ANTISYMMETRY_TOLERANCE
    antisymmetry: str = "warn"
    seed: int = 0


@dataclass(frozen=True, eq=False)
class BochnerCertificate:
    algebra: str
    rep_recipe: str
    p: int
    dim_Rp: int
    T_matrix: np.ndarray = field(repr=False)
    gram_Ip: np.ndarray = field(repr=False)
    spectrum: np.ndarray = field(repr=False)
    gap: float
    verdict: str
    inconclusive: bool
    antisymmetry_residual: float
    symmetry_residual: float
    spectrum_imag_max: float
    metric_nullity: int
    seed: int

    @property
    def gap_times_p(self) -> float:
        return self.gap * self.p

    def to_json(self) -> dict[str, Any]:
        return {
            "algebra": self.algebra,
            "rep_recipe": self.rep_recipe,
            "p": self.p,
            "dim_Rp": self.dim_Rp,
            "gap": self.gap,
            "gap_times_p": self.gap_times_p,
            "verdict": self.verdict,
            "inconclusive": self.inconclusive,
            "spectrum_head": [float(x) for x in self.spectrum[:10]],
            "antisymmetry_residual": self.antisymmetry_residual,
            "symmetry_residual": self.symmetry_residual,
            "spectrum_imag_max": self.spectrum_imag_max,
            "metric_nullity": self.metric_nullity,
            "seed": self.seed,
            "tool_version": __version__,
        }


def certify(algebra: MatrixLieAlgebra, rep, p: int, options: CertifyOptions | None = None, *,
            cartan: CartanDecomposition | None = None,
            metric: AdmissibleMetric | None = None) -> BochnerCertificate:
    """Assemble T^p, solve the I_p pencil and decide positive definiteness.

    ``rep`` is a :class:`Representation` or a recipe string.
    """
    options = options or CertifyOptions()
    if isinstance(rep, str):
        from .recipes import build_rep

        rep = build_rep(algebra, rep)
    cartan = cartan or cartan_decompose(algebra)
    space = PFormSpace(cartan.p_dim, p, rep.dim_F)
    metric = metric or admissible_metric(rep, cartan, seed=options.seed)
    G = gram_Ip(space, metric)
    assembly = assemble_Tp(rep, cartan, space, antisymmetry=options.antisymmetry,
                           tolerance=options.antisymmetry_tolerance, seed=options.seed)
    T = assembly.matrix
    spectrum = generalized_spectrum(T, G)
    raw_eigs = np.linalg.eigvals(T)
    gap = float(spectrum[0])
    tol = options.gap_tolerance
    verdict = "positive_definite" if gap > tol else "not_positive_definite"
    log.info("%s %s p=%d: gap %.6g (%s)", algebra.name, rep.recipe, p, gap, verdict)
    return BochnerCertificate(
        algebra=algebra.name, rep_recipe=rep.recipe, p=p, dim_Rp=space.dim, T_matrix=T,
        gram_Ip=G, spectrum=spectrum, gap=gap, verdict=verdict, inconclusive=-tol < gap <= tol,
        antisymmetry_residual=assembly.antisymmetry_residual,
        symmetry_residual=symmetry_residual(T, G),
        spectrum_imag_max=float(np.abs(raw_eigs.imag).max()) if len(raw_eigs) else 0.0,
        metric_nullity=metric.nullity, seed=options.seed,
    )
