"""Exact dense linear algebra over the rationals and Gaussian rationals."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import numpy as np

from .scalar import Scalar, conj


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class Definiteness:
    """Result of :func:`ldl_definiteness`.

    ``kernel`` holds an exact basis of the null space (column vectors as
    lists), empty unless the matrix is singular.
    """

    classification: str
    positive: int
    zero: int
    negative: int
    pivots: tuple = ()
    kernel: tuple = field(default=(), repr=False)

    @property
    def inertia(self):
        return (self.positive, self.zero, self.negative)

    @property
    def kernel_dim(self):
        return self.zero

    @property
    def negative_index(self):
        return self.negative


def _sign(x) -> int:
    if isinstance(x, Scalar):
        # Hermitian pivots are real; im is zero by construction.
        x = x.re
    return (x > 0) - (x < 0)


def _exact(x):
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (Fraction, Scalar)):
        return x
    raise TypeError(f"exact entry expected, got {type(x).__name__}")


def is_hermitian(g) -> bool:
    n = len(g)
    return all(len(row) == n for row in g) and all(
        g[i][j] == conj(g[j][i]) for i in range(n) for j in range(i, n)
    )


def ldl_definiteness(g) -> Definiteness:
    """Classify a Hermitian exact matrix by a pivoted LDL* (congruence) sweep.

    Diagonal pivoting is used while a nonzero diagonal entry remains; a
    trailing block with zero diagonal but nonzero off-diagonal entries is
    unlocked by the congruence ``e_i -> e_i + conj(g_ij) e_j``, which puts
    ``2|g_ij|^2`` on the diagonal.  The accumulated transformation T with
    ``T* g T = D`` gives the kernel as the columns of T over zero pivots.
    """
    a = [[_exact(x) for x in row] for row in g]
    n = len(a)
    if not is_hermitian(a):
        raise NotHermitianError("ldl_definiteness requires a Hermitian matrix")
    t = [[int(i == j) for j in range(n)] for i in range(n)]
    pivots = []
    k = 0
    while k < n:
        p = next((i for i in range(k, n) if a[i][i] != 0), None)
        if p is None:
            pair = next(
                ((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0),
                None,
            )
            if pair is None:
                break
            i, j = pair
            s = conj(a[i][j])
            for r in range(n):
                a[r][i] += s * a[r][j]
                t[r][i] += s * t[r][j]
            cs = conj(s)
            for c in range(n):
                a[i][c] += cs * a[j][c]
            p = i
        if p != k:
            a[p], a[k] = a[k], a[p]
            for row in a:
                row[p], row[k] = row[k], row[p]
            for row in t:
                row[p], row[k] = row[k], row[p]
        d = a[k][k]
        pivots.append(d)
        for j in range(k + 1, n):
            if a[k][j] == 0:
                continue
            m = a[k][j] / d
            cm = conj(m)
            for r in range(n):
                a[r][j] -= m * a[r][k]
                t[r][j] -= m * t[r][k]
            for c in range(n):
                a[j][c] -= cm * a[k][c]
        k += 1
    pos = sum(1 for d in pivots if _sign(d) > 0)
    neg = sum(1 for d in pivots if _sign(d) < 0)
    zero = n - len(pivots)
    kernel = tuple(tuple(t[r][j] for r in range(n)) for j in range(len(pivots), n))
    if neg == 0:
        cls = "positive-definite" if zero == 0 else "positive-semidefinite"
    elif pos == 0:
        cls = "negative-definite" if zero == 0 else "negative-semidefinite"
    else:
        cls = "indefinite"
    return Definiteness(cls, pos, zero, neg, tuple(pivots), kernel)


class SingularMatrixError(ZeroDivisionError):
    pass


def exact_inverse(g):
    """Gauss-Jordan inverse of a square exact matrix."""
    n = len(g)
    a = [[_exact(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(g)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def abs2(x):
    """Exact squared modulus."""
    if isinstance(x, Scalar):
        return x.re * x.re + x.im * x.im
    return x * x


def sqrt_upper(q, bits: int = 64) -> Fraction:
    """Smallest-denominator-2^bits rational upper bound of sqrt(q); exact on squares."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative argument")
    p, d = q.numerator, q.denominator
    r = isqrt(p * d)
    if r * r == p * d:
        return Fraction(r, d)
    scale = 1 << bits
    return Fraction(isqrt(p * d * scale * scale) + 1, d * scale)


def spectral_norm(m) -> float:
    """Largest singular value of a dense float matrix (LAPACK SVD)."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def to_complex_array(rows) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in rows], dtype=complex).reshape(
        len(rows), len(rows[0]) if rows else 0
    )


def exact_rank(rows) -> int:
    """Rank of an exact matrix given as a list of rows."""
    a = [[_exact(x) for x in row] for row in rows]
    if not a:
        return 0
    rank, ncols = 0, len(a[0])
    for col in range(ncols):
        piv = next((r for r in range(rank, len(a)) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(rank + 1, len(a)):
            if a[r][col] != 0:
                f = a[r][col] / a[rank][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank
