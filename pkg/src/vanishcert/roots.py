"""Root data of the complexification, admissible orders and Raghunathan's criteria.

Weights and roots are stored by their values on an orthonormal basis
H_1..H_r of the real form h* = sum R H_alpha, compact directions (i h_k)
first.  In those coordinates the Killing pairing is the dot product.
"""
from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
import scipy.linalg

from . import exact
from .errors import (
    NotAbelian,
    NotMaximal,
    NotThetaStable,
    OrderMismatch,
    RootSpaceDegeneracy,
)
from .lie_core import CartanDecomposition, MatrixLieAlgebra
from .rep_core import (
    Representation,
    WeightData,
    generic_coefficients,
    hstar_matrices,
    highest_weight,
    natural_rep,
    to_fraction,
    weights,
)

log = logging.getLogger(__name__)

ROOT_TOL = 1e-9
SIGN_ZERO_TOL = 1e-12
SIGN_AMBIGUOUS_TOL = 1e-8
PAIRING_TOL = 1e-9
PAIRING_GUARD = 1e-12
THETA_RESIDUAL_TOL = 1e-8


class PrecisionWarning(UserWarning):
    """A Killing pairing fell inside the guard band below the zero threshold."""


@dataclass(frozen=True, eq=False)
class CartanSubalgebra:
    """Verified theta-stable Cartan subalgebra.

    ``basis`` holds exact coordinates, compact elements first.  ``hstar`` rows
    are float coordinates of h_1..h_r, orthonormal for -kappa on the first
    ``n_compact`` rows and for kappa on the rest; H_j = i h_j on the compact
    rows and H_j = h_j otherwise.
    """

    algebra: MatrixLieAlgebra
    decomposition: CartanDecomposition
    basis: tuple[np.ndarray, ...]
    n_compact: int
    hstar: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.basis)


def cartan_subalgebra(algebra: MatrixLieAlgebra, decomposition: CartanDecomposition,
                      candidate: Iterable | None = None) -> CartanSubalgebra:
    """Check a candidate (catalog default) and split it along theta."""
    cand = candidate if candidate is not None else algebra.cartan_candidate
    if cand is None:
        raise NotMaximal(f"{algebra.name}: no Cartan subalgebra candidate supplied")
    cand = [exact.as_fraction_array(h) for h in cand]
    c = algebra.structure
    for x, y in itertools.combinations(cand, 2):
        z = np.tensordot(np.tensordot(x, c, ([0], [0])), y, ([0], [0]))
        if not exact.is_zero(z):
            raise NotAbelian("candidate Cartan elements do not commute")
    th = decomposition.theta
    r = exact.rank(np.array(cand, dtype=object))
    if r != len(cand):
        raise NotMaximal("candidate Cartan elements are linearly dependent")
    k_parts = [(h + th @ h) / 2 for h in cand]
    p_parts = [(h - th @ h) / 2 for h in cand]
    if exact.rank(np.array(cand + k_parts + p_parts, dtype=object)) != r:
        raise NotThetaStable("candidate span is not theta-stable")
    ad = algebra.ad()
    stacked = np.concatenate([np.tensordot(h, ad, axes=1) for h in cand], axis=0)
    centralizer = len(exact.nullspace(stacked))
    if centralizer != r:
        raise NotMaximal(f"centralizer has dimension {centralizer}, candidate has {r}")
    compact = _independent([v for v in k_parts if not exact.is_zero(v)])
    noncompact = _independent([v for v in p_parts if not exact.is_zero(v)])
    kap = algebra.killing
    rows = []
    for vecs, sign in ((compact, -1), (noncompact, 1)):
        for v in exact.gram_schmidt(vecs, kap):
            rows.append(exact.to_float(v) / math.sqrt(float(sign * (v @ kap @ v))))
    return CartanSubalgebra(
        algebra=algebra, decomposition=decomposition, basis=tuple(compact + noncompact),
        n_compact=len(compact), hstar=np.array(rows).reshape(len(rows), algebra.dim),
    )


def _independent(vectors: list[np.ndarray]) -> list[np.ndarray]:
    if not vectors:
        return []
    _, pivots = exact.rref(np.array(vectors, dtype=object).T)
    return [vectors[i] for i in pivots]


# --- roots ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RootSystemData:
    """Roots of g_C with respect to h_C, with root vectors and theta data.

    ``roots[a]`` are the values of root a on H_1..H_r; ``root_vectors[a]``
    complex coordinates of E_alpha; ``H_alpha[a]`` complex coordinates of the
    Killing dual.  ``theta_perm[a]`` is the index of theta(alpha);
    ``theta_sign[a]`` is +1/-1 when theta fixes alpha, 0 otherwise.
    """

    subalgebra: CartanSubalgebra
    roots: np.ndarray
    root_vectors: np.ndarray
    H_alpha: np.ndarray
    theta_perm: tuple[int, ...]
    theta_sign: tuple[int, ...]
    duality_residual: float

    @property
    def rank(self) -> int:
        return self.subalgebra.rank

    @property
    def labels(self) -> tuple[str, ...]:
        out = []
        for a, s in enumerate(self.theta_sign):
            out.append("B" if self.theta_perm[a] != a else ("A" if s > 0 else "C"))
        return tuple(out)

    def part(self, label: str) -> tuple[int, ...]:
        return tuple(a for a, lab in enumerate(self.labels) if lab == label)

    def theta_root(self, a: int) -> np.ndarray:
        return self.roots[self.theta_perm[a]]

    def index_of(self, vec: np.ndarray) -> int | None:
        hits = np.flatnonzero(np.abs(self.roots - vec).max(axis=1) < 1e-8)
        return int(hits[0]) if len(hits) else None


def _killing_frame(algebra: MatrixLieAlgebra, decomposition: CartanDecomposition):
    """Cholesky factor of -kappa(., theta .), which makes ad(k) skew and ad(p) symmetric."""
    form = exact.to_float(-(algebra.killing @ decomposition.theta))
    return np.linalg.cholesky((form + form.T) / 2)


def compute_roots(algebra: MatrixLieAlgebra, subalgebra: CartanSubalgebra) -> RootSystemData:
    dec = subalgebra.decomposition
    ad = np.array(algebra.ad(), dtype=float)
    mats = hstar_matrices(ad, subalgebra)
    chol = _killing_frame(algebra, dec)
    inv_t = np.linalg.inv(chol.T)
    herm = [chol.T @ m @ inv_t for m in mats]
    herm = [(h + h.conj().T) / 2 for h in herm]
    generic = sum(c * h for c, h in zip(generic_coefficients(len(herm)), herm))
    vals, vecs = np.linalg.eigh(generic)
    scale = max(1.0, float(np.abs(vals).max()))
    zero = np.abs(vals) <= ROOT_TOL * scale
    if zero.sum() != subalgebra.rank:
        raise RootSpaceDegeneracy(f"zero weight space has dimension {zero.sum()}, rank is {subalgebra.rank}")
    nz = np.flatnonzero(~zero)
    gaps = np.diff(vals[nz])
    if len(gaps) and gaps.min() <= 1e-7 * scale:
        raise RootSpaceDegeneracy("root eigenvalues are not separated by the generic element")
    roots, root_vectors = [], []
    for i in nz:
        v = vecs[:, i]
        a = np.array([(v.conj() @ h @ v).real for h in herm])
        for h, aj in zip(herm, a):
            if np.abs(h @ v - aj * v).max() > ROOT_TOL * scale:
                raise RootSpaceDegeneracy("eigenvector is not a simultaneous root vector")
        a[np.abs(a) < ROOT_TOL] = 0.0
        roots.append(a)
        root_vectors.append(inv_t @ v)
    roots = np.array(roots)
    root_vectors = np.array(root_vectors)
    order = sorted(range(len(roots)), key=lambda i: tuple(np.round(roots[i], 9)))
    roots, root_vectors = roots[order], root_vectors[order]
    # H_alpha = sum_j alpha(H_j) H_j; H_j = i h_j on compact rows
    l = subalgebra.n_compact
    hbasis = subalgebra.hstar.astype(complex)
    hbasis[:l] *= 1j
    H_alpha = roots @ hbasis
    kap = exact.to_float(algebra.killing)
    duality = float(np.abs(H_alpha @ kap @ hbasis.T - roots).max()) if len(roots) else 0.0
    data = RootSystemData(subalgebra, roots, root_vectors, H_alpha, (), (), duality)
    perm, signs = _theta_action(data, exact.to_float(dec.theta), kap)
    return RootSystemData(subalgebra, roots, root_vectors, H_alpha, perm, signs, duality)


def _theta_action(data: RootSystemData, theta: np.ndarray, kap: np.ndarray):
    l = data.subalgebra.n_compact
    flip = np.array([1.0] * l + [-1.0] * (data.rank - l))
    perm, signs = [], []
    for a, root in enumerate(data.roots):
        b = data.index_of(root * flip)
        neg_b = data.index_of(-root * flip)
        if b is None or neg_b is None:
            raise RootSpaceDegeneracy("theta does not permute the roots")
        image = theta @ data.root_vectors[a]
        eb = data.root_vectors[b]
        coeff = (image @ kap @ data.root_vectors[neg_b]) / (eb @ kap @ data.root_vectors[neg_b])
        resid = np.abs(image - coeff * eb).max() / np.abs(data.root_vectors[a]).max()
        if resid > THETA_RESIDUAL_TOL:
            raise RootSpaceDegeneracy(f"theta(E_alpha) leaves the root line (residual {resid:.2e})")
        perm.append(b)
        if b == a:
            if abs(abs(coeff) - 1) > THETA_RESIDUAL_TOL:
                raise RootSpaceDegeneracy("theta acts on a fixed root line by a non-sign scalar")
            signs.append(1 if coeff.real > 0 else -1)
        else:
            signs.append(0)
    return tuple(perm), tuple(signs)


# --- admissible orders ------------------------------------------------------

@dataclass(frozen=True)
class OrderPattern:
    """Sign pattern induced on the roots by one admissible order.

    ``theta_signs[a]`` is the sign of alpha - theta(alpha), 0 when theta
    fixes alpha.  Equality and hashing ignore the generator.
    """

    signs: tuple[int, ...]
    theta_signs: tuple[int, ...]
    generator: np.ndarray = field(compare=False, repr=False)

    @property
    def key(self) -> tuple:
        return (self.signs, self.theta_signs)

    def positive(self) -> tuple[int, ...]:
        return tuple(a for a, s in enumerate(self.signs) if s > 0)


@dataclass(frozen=True)
class OrderSample:
    patterns: tuple[OrderPattern, ...]
    trials: int
    saturated: bool
    exact: bool
    first_seen: tuple[int, ...] = ()


def _lex_sign(values: np.ndarray) -> int | None:
    """Sign of the first nonvanishing entry; None when the draw is ambiguous."""
    for v in values:
        if abs(v) < SIGN_ZERO_TOL:
            continue
        if abs(v) < SIGN_AMBIGUOUS_TOL:
            return None
        return 1 if v > 0 else -1
    return 0


def pattern_from_generator(rootdata: RootSystemData, generator: np.ndarray) -> OrderPattern | None:
    gen = np.asarray(generator, dtype=float)
    signs, tsigns = [], []
    for a, root in enumerate(rootdata.roots):
        s = _lex_sign(gen @ root)
        if s is None:
            return None
        if s == 0:
            raise RootSpaceDegeneracy("a root vanishes on every generator")
        signs.append(s)
        diff = root - rootdata.theta_root(a)
        if np.abs(diff).max() < SIGN_ZERO_TOL:
            tsigns.append(0)
        else:
            t = _lex_sign(gen @ diff)
            if t is None:
                return None
            tsigns.append(t)
    return OrderPattern(tuple(signs), tuple(tsigns), gen)


def _random_orthogonal(rng: np.random.Generator, size: int) -> np.ndarray:
    if size == 0:
        return np.zeros((0, 0))
    q, r = np.linalg.qr(rng.standard_normal((size, size)))
    return q * np.sign(np.diag(r))


def random_admissible_basis(rng: np.random.Generator, rank: int, n_compact: int) -> np.ndarray:
    """Rows H_1..H_r: a random orthonormal basis of the compact block, then of its complement."""
    return scipy.linalg.block_diag(_random_orthogonal(rng, n_compact),
                                   _random_orthogonal(rng, rank - n_compact)).reshape(rank, rank)


def _canonical(patterns: Iterable[OrderPattern]) -> tuple[OrderPattern, ...]:
    return tuple(sorted(patterns, key=lambda p: p.key))


def sample_admissible_orders(rootdata: RootSystemData, trials: int, seed: int = 0) -> OrderSample:
    """Monte Carlo over random admissible bases.

    Saturated when no new pattern turned up during the last
    10 x (patterns found) trials.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    found: dict[tuple, OrderPattern] = {}
    first_seen, last_new = [], 0
    for t in range(1, trials + 1):
        pattern = None
        while pattern is None:
            gen = random_admissible_basis(rng, rootdata.rank, rootdata.subalgebra.n_compact)
            pattern = pattern_from_generator(rootdata, gen)
        if pattern.key not in found:
            found[pattern.key] = pattern
            first_seen.append(t)
            last_new = t
    saturated = trials - last_new >= 10 * len(found)
    return OrderSample(_canonical(found.values()), trials, saturated, False, tuple(first_seen))


def enumerate_admissible_orders(rootdata: RootSystemData) -> OrderSample:
    """Every sign pattern of every admissible order, for rank <= 2.

    Rank 1 and mixed rank 2 (one compact direction) have finitely many
    admissible bases up to sign.  Otherwise the first basis vector sweeps the
    circle and the patterns are read off at the midpoints of the arcs cut out
    by the lines orthogonal to the roots and to the differences alpha - theta(alpha).
    """
    r, l = rootdata.rank, rootdata.subalgebra.n_compact
    if r > 2:
        raise ValueError("exact enumeration is implemented for rank <= 2")
    gens: list[np.ndarray] = []
    if r == 1:
        gens = [np.array([[1.0]]), np.array([[-1.0]])]
    elif l == 1:
        gens = [np.diag([s1, s2]) for s1 in (1.0, -1.0) for s2 in (1.0, -1.0)]
    else:
        vectors = list(rootdata.roots)
        vectors += [a - rootdata.theta_root(i) for i, a in enumerate(rootdata.roots)]
        angles = []
        for v in vectors:
            if np.abs(v).max() < SIGN_ZERO_TOL:
                continue
            base = math.atan2(v[1], v[0]) + math.pi / 2
            angles += [base % (2 * math.pi), (base + math.pi) % (2 * math.pi)]
        angles = sorted(angles)
        crit = [a for i, a in enumerate(angles) if i == 0 or a - angles[i - 1] > 1e-12]
        for i, a in enumerate(crit):
            b = crit[(i + 1) % len(crit)] + (2 * math.pi if i + 1 == len(crit) else 0.0)
            mid = (a + b) / 2
            u = np.array([math.cos(mid), math.sin(mid)])
            gens.append(np.array([u, [-u[1], u[0]]]))
    found: dict[tuple, OrderPattern] = {}
    for g in gens:
        pattern = pattern_from_generator(rootdata, g)
        if pattern is None:
            raise RootSpaceDegeneracy("arc midpoint produced an ambiguous sign")
        found.setdefault(pattern.key, pattern)
    return OrderSample(_canonical(found.values()), len(gens), True, True)


def admissible_orders(rootdata: RootSystemData, trials: int = 200, seed: int = 0) -> OrderSample:
    if rootdata.rank <= 2:
        return enumerate_admissible_orders(rootdata)
    return sample_admissible_orders(rootdata, trials, seed)


# --- Sigma_2 / Sigma_pi -----------------------------------------------------

def _check_pattern(rootdata: RootSystemData, pattern: OrderPattern) -> None:
    if len(pattern.signs) != len(rootdata.roots):
        raise OrderMismatch("pattern has a different number of roots")
    again = pattern_from_generator(rootdata, pattern.generator)
    if again is None or again.key != pattern.key:
        raise OrderMismatch("pattern does not come from this root system")


def sigma2(rootdata: RootSystemData, pattern: OrderPattern) -> tuple[int, ...]:
    """C^+(O) together with the roots of B^+(O) lying above their theta-image."""
    _check_pattern(rootdata, pattern)
    labels = rootdata.labels
    out = []
    for a, s in enumerate(pattern.signs):
        if s < 0:
            continue
        if labels[a] == "C" or (labels[a] == "B" and pattern.theta_signs[a] > 0):
            out.append(a)
    return tuple(out)


def sigma_pi(rootdata: RootSystemData, pattern: OrderPattern, highest) -> tuple[int, ...]:
    """Roots of Sigma_2(O) with nonzero Killing pairing against the highest weight."""
    lam = np.asarray(highest, dtype=float)
    out = []
    for a in sigma2(rootdata, pattern):
        pairing = abs(float(lam @ rootdata.roots[a]))
        if PAIRING_GUARD < pairing <= PAIRING_TOL:
            warnings.warn(f"pairing {pairing:.2e} inside the guard band", PrecisionWarning, stacklevel=2)
        if pairing > PAIRING_TOL:
            out.append(a)
    return tuple(out)


@dataclass(frozen=True)
class CriterionResult:
    verdict: str
    q: int
    patterns_found: int
    saturated: bool
    exact: bool
    min_sigma_pi: int
    witness: OrderPattern | None
    precision_warnings: int

    def to_json(self) -> dict:
        gen = None
        if self.witness is not None:
            gen = [[str(to_fraction(x)) for x in row] for row in self.witness.generator]
        return {
            "verdict": self.verdict,
            "q": self.q,
            "patterns_found": self.patterns_found,
            "saturated": self.saturated,
            "exact_enumeration": self.exact,
            "min_sigma_pi": self.min_sigma_pi,
            "witness_order": gen,
            "precision_warnings": self.precision_warnings,
        }


def raghunathan_higher_criterion(rootdata: RootSystemData, highest, q: int, trials: int = 200,
                                 seed: int = 0) -> CriterionResult:
    """Test |Sigma_pi(O)| > q over the admissible orders.

    ``highest`` is a :class:`WeightData` (the highest weight is recomputed for
    each order), a fixed weight vector, or a list of WeightData for the
    irreducible constituents of a reducible rep.  For a list, each order is
    scored by its worst constituent, since the form is positive definite on a
    direct sum only if it is on every summand.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    parts = list(highest) if isinstance(highest, (list, tuple)) else [highest]
    sample = admissible_orders(rootdata, trials, seed)
    best, witness, n_warn = None, None, 0
    for pattern in sample.patterns:
        for part in parts:
            lam = highest_weight(part, pattern) if isinstance(part, WeightData) else part
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", PrecisionWarning)
                size = len(sigma_pi(rootdata, pattern, lam))
            n_warn += sum(issubclass(w.category, PrecisionWarning) for w in caught)
            if best is None or size < best:
                best, witness = size, pattern
    if best <= q:
        verdict = "refuted"
    elif sample.saturated:
        verdict = "certified_over_sampled_orders"
    else:
        verdict = "inconclusive"
    if verdict != "refuted":
        witness = None
    return CriterionResult(verdict, q, len(sample.patterns), sample.saturated, sample.exact,
                           best, witness, n_warn)


# --- exclusion of Lorentz-type pairs -------------------------------------------

EXCLUDED_FAMILIES = ("so_lorentz", "su_lorentz")


@dataclass(frozen=True)
class ExclusionFlag:
    factor: str
    family: str | None
    noncompact_nontrivial: bool
    excluded: bool
    m: int | None

    @property
    def vanishing_predicted(self) -> bool:
        return self.noncompact_nontrivial and not self.excluded

    def to_json(self) -> dict:
        return {
            "factor": self.factor,
            "family": self.family,
            "noncompact_nontrivial": self.noncompact_nontrivial,
            "excluded": self.excluded,
            "m": self.m,
        }


def default_order(rank: int) -> np.ndarray:
    return np.eye(rank)


def exclusion_check(algebra: MatrixLieAlgebra, weightdata: WeightData, order=None) -> list[ExclusionFlag]:
    """Flag (so(n,1), m mu_N) and (su(n,1), m mu_N) highest weights.

    ``weightdata`` should describe a real-irreducible rep (or constituent).
    sl(2,R) is isomorphic to so(2,1) and su(1,1) and is tested as su(1,1),
    whose natural module is the natural module of sl(2,R).  Catalog algebras
    are simple, so the list has one entry.
    """
    sub = weightdata.cartan_subalgebra
    order = default_order(sub.rank) if order is None else order
    nontrivial = not weightdata.is_trivial
    lorentz = algebra.family in EXCLUDED_FAMILIES or (algebra.family == "sl_real" and algebra.rank_param == 2)
    excluded, m_found = False, None
    if lorentz and nontrivial:
        nat = natural_rep(algebra)
        mu = highest_weight(weights(nat, sub.decomposition, sub), order)
        lam = highest_weight(weightdata, order)
        ratio = float(lam @ mu) / float(mu @ mu)
        m = round(ratio)
        if m >= 1 and np.abs(lam - m * mu).max() <= 1e-8 and abs(ratio - m) <= 1e-8:
            excluded, m_found = True, int(m)
    return [ExclusionFlag(algebra.name, algebra.family, nontrivial, excluded, m_found)]
