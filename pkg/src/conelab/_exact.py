"""Exact scalars (Gaussian rationals) and small exact linear algebra.

Everything in the Artin-algebra layer is an algebraic identity, so this kit
works over Fraction components with no floating point anywhere.  Matrices are
numpy object arrays; sizes are small (tens), so plain Gaussian elimination
with vectorized row operations is fast enough.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np


_F0 = Fraction(0)


class GaussRat:
    """Gaussian rational re + im*i with exact Fraction components.

    Real values (im = 0) take fast paths, since most of the workload is real.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im=_F0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @staticmethod
    def of(value) -> "GaussRat":
        if isinstance(value, GaussRat):
            return value
        if isinstance(value, complex):
            return GaussRat(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, dict):
            return GaussRat(Fraction(value.get("re", 0)), Fraction(value.get("im", 0)))
        if isinstance(value, str):
            return GaussRat(Fraction(value))
        return GaussRat(Fraction(value))

    def __add__(self, other):
        o = other if isinstance(other, GaussRat) else GaussRat.of(other)
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other):
        o = other if isinstance(other, GaussRat) else GaussRat.of(other)
        return GaussRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = GaussRat.of(other)
        return GaussRat(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = other if isinstance(other, GaussRat) else GaussRat.of(other)
        if not self.im and not o.im:
            return GaussRat(self.re * o.re)
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = other if isinstance(other, GaussRat) else GaussRat.of(other)
        if not o.re and not o.im:
            raise ZeroDivisionError("division by zero Gaussian rational")
        if not self.im and not o.im:
            return GaussRat(self.re / o.re)
        n2 = o.re * o.re + o.im * o.im
        return GaussRat((self.re * o.re + self.im * o.im) / n2,
                        (self.im * o.re - self.re * o.im) / n2)

    def conj(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        o = other if isinstance(other, GaussRat) else GaussRat.of(other)
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        if not self.im:
            return str(self.re)
        return f"({self.re}+{self.im}i)"

    def to_json(self):
        if not self.im:
            return str(self.re)
        return {"re": str(self.re), "im": str(self.im)}


ZERO = GaussRat(Fraction(0))
ONE = GaussRat(Fraction(1))


def gmat(rows) -> np.ndarray:
    """Object-dtype matrix of GaussRat from nested values."""
    out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            out[i, j] = GaussRat.of(v)
    return out


def gzeros(n: int, m: int) -> np.ndarray:
    out = np.empty((n, m), dtype=object)
    out[:] = ZERO
    return out


def geye(n: int) -> np.ndarray:
    out = gzeros(n, n)
    for i in range(n):
        out[i, i] = ONE
    return out


def rref(matrix: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over the Gaussian rationals; returns (R, pivots)."""
    A = matrix.copy()
    nr, nc = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if A[i, c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * (ONE / A[r, c])
        for i in range(nr):
            if i != r and A[i, c]:
                A[i] = A[i] - A[r] * A[i, c]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return A, pivots


def rank(matrix: np.ndarray) -> int:
    return len(rref(matrix)[1])


def nullspace(matrix: np.ndarray) -> list[np.ndarray]:
    """Basis of the right kernel as object vectors."""
    R, pivots = rref(matrix)
    nc = matrix.shape[1]
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for fc in free:
        v = np.empty(nc, dtype=object)
        v[:] = ZERO
        v[fc] = ONE
        for r_i, pc in enumerate(pivots):
            v[pc] = -R[r_i, fc]
        basis.append(v)
    return basis


def solve(A: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """One exact solution of A x = b, or None when inconsistent."""
    nr, nc = A.shape
    aug = np.empty((nr, nc + 1), dtype=object)
    aug[:, :nc] = A
    aug[:, nc] = b
    R, pivots = rref(aug)
    if nc in pivots:
        return None
    x = np.empty(nc, dtype=object)
    x[:] = ZERO
    for r_i, pc in enumerate(pivots):
        x[pc] = R[r_i, nc]
    return x


def matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = gzeros(A.shape[0], B.shape[1])
    for i in range(A.shape[0]):
        for j in range(B.shape[1]):
            acc = ZERO
            for k in range(A.shape[1]):
                if A[i, k] and B[k, j]:
                    acc = acc + A[i, k] * B[k, j]
            out[i, j] = acc
    return out


def is_zero_mat(A: np.ndarray) -> bool:
    return not any(bool(v) for v in A.ravel())
