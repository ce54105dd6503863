"""Exact arithmetic and dense linear algebra over prime fields F_q.

Matrices are plain ``numpy`` integer arrays with entries reduced into
``[0, q)``. The fields used here are small, so everything is done with
int64 and an eager ``% q`` after each operation.
"""
from __future__ import annotations

import numpy as np

from .errors import ShapeError, SingularError, ValidationError, ZeroInverse


def is_prime(q: int) -> bool:
    """Deterministic trial-division primality test."""
    q = int(q)
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


def check_prime(q) -> int:
    if isinstance(q, bool) or int(q) != q or not is_prime(int(q)):
        raise ValidationError(f"field size must be prime, got {q!r}")
    return int(q)


def as_field_matrix(a, q: int) -> np.ndarray:
    """Return ``a`` as a 2-D int64 array reduced mod ``q``."""
    m = np.asarray(a, dtype=np.int64)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {m.shape}")
    return np.mod(m, q)


def field_inv(a: int, q: int) -> int:
    a = int(a) % q
    if a == 0:
        raise ZeroInverse(f"0 has no inverse mod {q}")
    # Fermat; q is prime
    return pow(a, q - 2, q)


def inverse_table(q: int) -> np.ndarray:
    """``table[a]`` is the inverse of ``a`` mod q (``table[0] = 0``)."""
    table = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        table[a] = pow(a, q - 2, q)
    return table


def mat_mul(a, b, q: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return np.mod(a @ b, q)


def identity(k: int) -> np.ndarray:
    return np.eye(k, dtype=np.int64)


def rank(a, q: int) -> int:
    """Rank over F_q by row reduction."""
    m = as_field_matrix(a, q).copy()
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        m[r] = (m[r] * field_inv(m[r, c], q)) % q
        below = m[r + 1:, c].copy()
        m[r + 1:] = (m[r + 1:] - np.outer(below, m[r])) % q
        r += 1
    return r


def mat_inverse(a, q: int) -> np.ndarray:
    """Gauss-Jordan inverse over F_q; first nonzero entry is the pivot."""
    m = as_field_matrix(a, q)
    k, k2 = m.shape
    if k != k2:
        raise ShapeError(f"matrix must be square, got {m.shape}")
    aug = np.concatenate([m, identity(k)], axis=1)
    for c in range(k):
        nz = np.nonzero(aug[c:, c])[0]
        if nz.size == 0:
            raise SingularError("matrix is singular over F_%d" % q)
        p = c + nz[0]
        if p != c:
            aug[[c, p]] = aug[[p, c]]
        aug[c] = (aug[c] * field_inv(aug[c, c], q)) % q
        col = aug[:, c].copy()
        col[c] = 0
        aug = (aug - np.outer(col, aug[c])) % q
    return aug[:, k:].copy()


def is_invertible(a, q: int) -> bool:
    m = as_field_matrix(a, q)
    return m.shape[0] == m.shape[1] and rank(m, q) == m.shape[0]


class IncrementalSpan:
    """Span of vectors over F_q, grown one vector at a time.

    ``add(v)`` reports whether ``v`` was outside the current span (and
    inserts it). Used for the erasure rank tests, where each column is
    checked against the span of the columns before it.
    """

    def __init__(self, dim: int, q: int):
        self.q = q
        self.dim = dim
        self._inv = inverse_table(q)
        # pivot position -> normalized basis row
        self._basis: dict[int, np.ndarray] = {}

    def reduce(self, v) -> np.ndarray:
        v = np.mod(np.asarray(v, dtype=np.int64), self.q)
        for p, row in self._basis.items():
            if v[p]:
                v = (v - v[p] * row) % self.q
        return v

    def add(self, v) -> bool:
        v = self.reduce(v)
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            return False
        p = int(nz[0])
        v = (v * self._inv[v[p]]) % self.q
        for key, row in self._basis.items():
            if row[p]:
                self._basis[key] = (row - row[p] * v) % self.q
        self._basis[p] = v
        return True

    def __len__(self) -> int:
        return len(self._basis)
