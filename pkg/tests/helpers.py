"""Cached fixtures and independent oracles shared by the test modules."""
from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from vanishcert.lie_core import build_catalog_algebra, cartan_decompose
from vanishcert.recipes import build_rep
from vanishcert.rep_core import admissible_metric
from vanishcert.roots import cartan_subalgebra, compute_roots

# catalog algebras whose maximally compact Cartan has rank <= 2
RANK2 = (
    ("sl_real", 2), ("sl_real", 3),
    ("so_lorentz", 2), ("so_lorentz", 3), ("so_lorentz", 4),
    ("su_lorentz", 1), ("su_lorentz", 2),
)
RECIPES = (
    "trivial", "natural", "adjoint", "dual(natural)", "sym(natural,2)", "sym(natural,3)",
    "tensor(natural,dual(natural))", "tensor(natural,natural)",
)
UP_TO_DIM_16 = (
    ("sl_real", 2), ("sl_real", 3), ("sl_real", 4),
    ("so_lorentz", 2), ("so_lorentz", 3), ("so_lorentz", 4), ("so_lorentz", 5),
    ("su_lorentz", 1), ("su_lorentz", 2), ("su_lorentz", 3),
)
MATRIX = tuple((fam, n, r) for fam, n in RANK2 for r in RECIPES)


@lru_cache(maxsize=None)
def algebra(family: str, n: int):
    return build_catalog_algebra(family, n)


@lru_cache(maxsize=None)
def decomposition(family: str, n: int):
    return cartan_decompose(algebra(family, n))


@lru_cache(maxsize=None)
def rep(family: str, n: int, recipe: str):
    return build_rep(algebra(family, n), recipe)


@lru_cache(maxsize=None)
def metric(family: str, n: int, recipe: str):
    return admissible_metric(rep(family, n, recipe), decomposition(family, n))


@lru_cache(maxsize=None)
def subalgebra(family: str, n: int):
    return cartan_subalgebra(algebra(family, n), decomposition(family, n))


@lru_cache(maxsize=None)
def rootdata(family: str, n: int):
    return compute_roots(algebra(family, n), subalgebra(family, n))


def ids(cases) -> list[str]:
    return ["-".join(str(x) for x in c) for c in cases]


# --- oracles -----------------------------------------------------------------

def permutation_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def brute_force_T(rep_, cartan, p: int) -> np.ndarray:
    """Loop-by-loop evaluation of the defining formula, then antisymmetrization.

    For each basis element theta = e_I (x) f_b we store theta as a dense
    function on ordered p-tuples, evaluate
        (1/p) sum_k pi(X_k)^2 theta(Y) + sum_k pi([Y_1, X_k]) theta(X_k, Y_2, ..., Y_p)
    on every ordered tuple of p-basis vectors, average over signed
    permutations and read off the increasing tuples.
    """
    alg = rep_.algebra
    N = cartan.p_dim
    d = rep_.dim_F
    structure = np.array(alg.structure, dtype=float)
    pis = np.array([sum(c * m for c, m in zip(row, rep_.float_matrices)) for row in cartan.p_basis])

    def pi_bracket(i, k):
        coords = np.zeros(alg.dim)
        for a in range(alg.dim):
            for b in range(alg.dim):
                coords += cartan.p_basis[i][a] * cartan.p_basis[k][b] * structure[a, b]
        return sum(c * m for c, m in zip(coords, rep_.float_matrices))

    brackets = {(i, k): pi_bracket(i, k) for i in range(N) for k in range(N)}
    increasing = list(itertools.combinations(range(N), p))
    ordered = list(itertools.product(range(N), repeat=p))
    T = np.zeros((len(increasing) * d, len(increasing) * d))
    for col_t, tup in enumerate(increasing):
        for b in range(d):
            dense = {}
            for perm in itertools.permutations(range(p)):
                key = tuple(tup[j] for j in perm)
                vec = np.zeros(d)
                vec[b] = permutation_sign(perm)
                dense[key] = vec

            def theta(t):
                return dense.get(t, np.zeros(d))

            raw = {}
            for y in ordered:
                val = np.zeros(d)
                for k in range(N):
                    val += pis[k] @ pis[k] @ theta(y) / p
                    val += brackets[y[0], k] @ theta((k,) + y[1:])
                raw[y] = val
            for row_t, out in enumerate(increasing):
                acc = np.zeros(d)
                for perm in itertools.permutations(range(p)):
                    acc += permutation_sign(perm) * raw[tuple(out[j] for j in perm)]
                T[row_t * d:(row_t + 1) * d, col_t * d + b] = acc / math.factorial(p)
    return T


def killing_dual_casimir(rep_) -> np.ndarray:
    """sum_ij (kappa^-1)_ij pi(e_i) pi(e_j) in the original (non-orthonormal) basis."""
    alg = rep_.algebra
    kinv = np.linalg.inv(np.array(alg.killing, dtype=float))
    mats = rep_.float_matrices
    return np.einsum("ij,iab,jbc->ac", kinv, mats, mats)
