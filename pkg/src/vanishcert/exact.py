"""Exact linear algebra over the rationals.

Matrices are numpy object arrays of :class:`fractions.Fraction`.  The heavy
invariant checks clear denominators and work on integer arrays instead, which
keeps them exact and fast.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np


def as_fraction_array(data) -> np.ndarray:
    """Convert nested lists of ints/strings/Fractions into a Fraction array."""
    arr = np.array(data, dtype=object)
    flat = [Fraction(x) for x in arr.ravel()]
    out = np.empty(len(flat), dtype=object)
    out[:] = flat
    return out.reshape(arr.shape)


def zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def identity(n: int) -> np.ndarray:
    out = zeros((n, n))
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def to_float(arr: np.ndarray) -> np.ndarray:
    return np.array(arr, dtype=float)


def common_denominator(arr: np.ndarray) -> int:
    d = 1
    for x in np.asarray(arr, dtype=object).ravel():
        d = lcm(d, Fraction(x).denominator)
    return d


def to_integer(arr: np.ndarray) -> tuple[np.ndarray, int]:
    """Return ``(ints, d)`` with ``arr == ints / d`` exactly.

    ``ints`` is int64 when the entries fit comfortably, otherwise an object
    array of Python ints.
    """
    d = common_denominator(arr)
    vals = [int(Fraction(x) * d) for x in np.asarray(arr, dtype=object).ravel()]
    shape = np.shape(arr)
    if not vals or max(abs(v) for v in vals) < 2**20:
        return np.array(vals, dtype=np.int64).reshape(shape), d
    out = np.empty(len(vals), dtype=object)
    out[:] = vals
    return out.reshape(shape), d


def is_zero(arr: np.ndarray) -> bool:
    return all(x == 0 for x in np.asarray(arr, dtype=object).ravel())


def rref(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = np.array(mat, dtype=object, copy=True)
    if m.size == 0:
        return m, []
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = next((i for i in range(r, rows) if m[i, c] != 0), None)
        if pivot is None:
            continue
        if pivot != r:
            m[[r, pivot]] = m[[pivot, r]]
        m[r] = m[r] / m[r, c]
        for i in range(rows):
            if i != r and m[i, c] != 0:
                m[i] = m[i] - m[i, c] * m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(mat: np.ndarray) -> int:
    return len(rref(mat)[1])


def nullspace(mat: np.ndarray) -> list[np.ndarray]:
    """Basis of the right nullspace, one Fraction vector per free column."""
    mat = np.asarray(mat, dtype=object)
    cols = mat.shape[1]
    reduced, pivots = rref(mat)
    basis = []
    for free in (c for c in range(cols) if c not in pivots):
        v = zeros(cols)
        v[free] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -reduced[row, free]
        basis.append(v)
    return basis


def inverse(mat: np.ndarray) -> np.ndarray:
    n = mat.shape[0]
    aug = np.concatenate([np.asarray(mat, dtype=object), identity(n)], axis=1)
    reduced, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise np.linalg.LinAlgError("singular matrix")
    return reduced[:, n:]


def ldl_pivots(mat: np.ndarray) -> list[Fraction]:
    """Pivots of symmetric Gaussian elimination without row exchanges.

    All pivots positive iff the symmetric matrix is positive definite.
    Returns the pivots computed before the first non-positive one (inclusive).
    """
    m = np.array(mat, dtype=object, copy=True)
    n = m.shape[0]
    out = []
    for k in range(n):
        piv = m[k, k]
        out.append(piv)
        if piv <= 0:
            break
        for i in range(k + 1, n):
            if m[i, k] != 0:
                m[i, k:] = m[i, k:] - (m[i, k] / piv) * m[k, k:]
    return out


def is_positive_definite(mat: np.ndarray) -> bool:
    piv = ldl_pivots(mat)
    return len(piv) == mat.shape[0] and all(p > 0 for p in piv)


def gram_schmidt(vectors: list[np.ndarray], gram: np.ndarray) -> list[np.ndarray]:
    """Orthogonalize rational vectors against a definite rational form.

    The result is orthogonal (not normalized) and stays exact.
    """
    out: list[np.ndarray] = []
    norms: list[Fraction] = []
    for v in vectors:
        w = np.array(v, dtype=object, copy=True)
        for u, nu in zip(out, norms):
            w = w - (u @ gram @ v) / nu * u
        out.append(w)
        norms.append(w @ gram @ w)
    return out
