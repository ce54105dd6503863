"""Polarization kernels: validation, the mixing test and the
Gaussian-elimination reductions used to locate suction indices.

All indices are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import field
from .errors import NotMixingError, PivotError, ShapeError, SingularError


@dataclass(frozen=True)
class MixingReport:
    invertible: bool
    mixing: bool
    # row order (witness[p] = original row placed at position p) that makes
    # the matrix upper triangular; only present for invertible non-mixing input
    witness: Optional[tuple[int, ...]] = None

    def to_dict(self) -> dict:
        return {
            "invertible": self.invertible,
            "mixing": self.mixing,
            "witness": list(self.witness) if self.witness is not None else None,
        }


def _first_nonzero_columns(m: np.ndarray) -> list[int]:
    k = m.shape[1]
    out = []
    for row in m:
        nz = np.nonzero(row)[0]
        out.append(int(nz[0]) if nz.size else k)
    return out


def check_mixing(matrix, q: int) -> MixingReport:
    """Decide whether ``matrix`` is mixing over F_q.

    A row order making the matrix upper triangular exists iff, sorting the
    rows by the column of their first nonzero entry, the p-th row starts at
    a column >= p. The sorted order is then itself a witness.
    """
    field.check_prime(q)
    m = field.as_field_matrix(matrix, q)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"kernel must be square, got {m.shape}")
    invertible = field.is_invertible(m, q)
    first = _first_nonzero_columns(m)
    order = sorted(range(len(first)), key=lambda i: (first[i], i))
    triangularizable = all(first[r] >= p for p, r in enumerate(order))
    if not invertible:
        return MixingReport(invertible=False, mixing=False, witness=None)
    if triangularizable:
        return MixingReport(invertible=True, mixing=False, witness=tuple(order))
    return MixingReport(invertible=True, mixing=True, witness=None)


def pivot_permutation(matrix, q: int) -> tuple[int, ...]:
    """Row order putting the pivots of column-wise elimination on the diagonal.

    Column ``c`` pivots on the first unused row with a nonzero entry after
    the previous columns have been eliminated.
    """
    m = field.as_field_matrix(matrix, q).copy()
    k = m.shape[0]
    used: list[int] = []
    for c in range(k):
        rows = [r for r in range(k) if r not in used and m[r, c] != 0]
        if not rows:
            raise SingularError("matrix is singular; no pivot in column %d" % c)
        r = rows[0]
        used.append(r)
        m[:, c] = (m[:, c] * field.field_inv(m[r, c], q)) % q
        for c2 in range(k):
            if c2 != c and m[r, c2]:
                m[:, c2] = (m[:, c2] - m[r, c2] * m[:, c]) % q
    return tuple(used)


def reduced_matrix(mp, j: int, q: int) -> np.ndarray:
    """Column elimination matrix M^(j) of the pivot-ordered kernel ``mp``.

    Columns ``0..j-1`` are fully reduced (top-left block becomes the
    identity), then column ``j`` is forward-eliminated against them and
    scaled to a unit diagonal. Columns after ``j`` are untouched.
    """
    m = field.as_field_matrix(mp, q).copy()
    k = m.shape[0]
    if m.shape[1] != k:
        raise ShapeError(f"kernel must be square, got {m.shape}")
    if not 0 <= j < k:
        raise ValueError(f"column index {j} outside [0, {k})")
    for c in range(j):
        if m[c, c] == 0:
            raise PivotError(f"missing pivot at ({c}, {c})")
        m[:, c] = (m[:, c] * field.field_inv(m[c, c], q)) % q
        for c2 in range(j + 1):
            if c2 != c and m[c, c2]:
                m[:, c2] = (m[:, c2] - m[c, c2] * m[:, c]) % q
    if m[j, j] == 0:
        raise PivotError(f"missing pivot at ({j}, {j})")
    m[:, j] = (m[:, j] * field.field_inv(m[j, j], q)) % q
    return m


@dataclass(frozen=True)
class ReductionIndices:
    """Indices into the pivot-ordered kernel M'.

    Upper reduction: H((UM')_j | (UM')_<j, W) >= H(U_j + alpha U_s | W).
    Lower reduction: H((UM')_j | (UM')_<j, W) <= H(U_j | U_ell + alpha U_j, W).
    """

    j: int
    ell: int
    alpha: int
    s: Optional[int] = None


class Kernel:
    """A validated invertible k x k kernel over F_q, with its inverse."""

    def __init__(self, matrix, q: int):
        q = field.check_prime(q)
        m = field.as_field_matrix(matrix, q)
        if m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ShapeError(f"kernel must be square, got {m.shape}")
        inv = field.mat_inverse(m, q)
        m.setflags(write=False)
        inv.setflags(write=False)
        self.q = q
        self.matrix = m
        self.inverse = inv
        self.report = check_mixing(m, q)

    @property
    def k(self) -> int:
        return self.matrix.shape[0]

    @property
    def mixing(self) -> bool:
        return self.report.mixing

    @cached_property
    def pivot_order(self) -> tuple[int, ...]:
        return pivot_permutation(self.matrix, self.q)

    @cached_property
    def pivoted(self) -> np.ndarray:
        """The row-permuted kernel M' with elimination pivots on the diagonal."""
        mp = self.matrix[list(self.pivot_order)].copy()
        mp.setflags(write=False)
        return mp

    def __eq__(self, other) -> bool:
        if not isinstance(other, Kernel):
            return NotImplemented
        return self.q == other.q and np.array_equal(self.matrix, other.matrix)

    def __hash__(self) -> int:
        return hash((self.q, self.matrix.tobytes(), self.matrix.shape))

    def __repr__(self) -> str:
        return f"Kernel(q={self.q}, matrix={self.matrix.tolist()})"


G2 = [[1, 0], [1, 1]]


def _require_mixing(kernel: Kernel) -> None:
    if not kernel.mixing:
        raise NotMixingError(f"{kernel!r} is not mixing")


def find_upper_reduction(kernel: Kernel) -> ReductionIndices:
    _require_mixing(kernel)
    mp, q, k = kernel.pivoted, kernel.q, kernel.k
    for j in range(k):
        col = reduced_matrix(mp, j, q)[:, j]
        below = np.nonzero(col[j + 1:])[0]
        if below.size:
            s = j + 1 + int(below[0])
            return ReductionIndices(j=j, ell=j, s=s, alpha=int(col[s]))
    raise NotMixingError("every M^(j) is upper triangular")  # unreachable for mixing input


def find_lower_reduction(kernel: Kernel) -> ReductionIndices:
    _require_mixing(kernel)
    mp, q, k = kernel.pivoted, kernel.q, kernel.k
    # largest j whose leading j columns do not span e_0..e_{j-1}
    candidates = [j for j in range(1, k) if np.any(mp[j:, :j])]
    if not candidates:
        raise NotMixingError("pivot-ordered kernel is upper triangular")
    j = candidates[-1]
    mj = reduced_matrix(mp, j, q)
    for ell in range(j):
        alpha = int(mj[j, ell])
        if alpha:
            expected = np.zeros(k, dtype=np.int64)
            expected[ell] = 1
            expected[j] = alpha
            if not np.array_equal(mj[:, ell], expected):
                raise PivotError(f"column {ell} of M^({j}) is not e_ell + alpha e_j")
            return ReductionIndices(j=j, ell=ell, alpha=alpha)
    raise PivotError(f"no column of M^({j}) reaches row {j}")
