"""Tensor-power transforms and polar encoders.

Vectors of length ``n = k**t`` are tensors in (F_q^k)^{(x) t} flattened in
lexicographic order with the first digit most significant (C order).
In that layout ``M^{(x) t}`` is the t-fold Kronecker power and the
recursive encoder below, which peels the last digit, computes exactly
``U M^{(x) t}`` for row vectors ``U``.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from . import field
from .code import CodeSpec
from .errors import ShapeError, TooLargeError
from .kernel import Kernel

MAX_EXPLICIT = 2 ** 12


def tensor_matrix(matrix, t: int, q: int) -> np.ndarray:
    """Explicit ``k**t x k**t`` matrix of M^{(x) t} (reference scale only)."""
    m = field.as_field_matrix(matrix, q)
    k = m.shape[0]
    if k ** t > MAX_EXPLICIT:
        raise TooLargeError(f"k**t = {k ** t} exceeds {MAX_EXPLICIT}")
    out = np.ones((1, 1), dtype=np.int64)
    for _ in range(t):
        out = np.mod(np.kron(out, m), q)
    return out


def _apply_levels(x, matrix: np.ndarray, q: int, k: int, t: int, trace: Optional[list]):
    x = np.asarray(x, dtype=np.int64)
    n = k ** t
    if x.shape[-1:] != (n,):
        raise ShapeError(f"expected length {n} = {k}**{t}, got {x.shape[-1:]}")
    batch = x.shape[:-1]
    y = np.mod(x, q).reshape(batch + (k,) * t)
    nb = len(batch)
    # Unrolled recursion: depth-1 calls combine along the first digit,
    # the outermost call along the last one.
    for level in range(t):
        axis = nb + level
        y = np.moveaxis(y, axis, -1)
        y = np.mod(y @ matrix, q)
        y = np.moveaxis(y, -1, axis)
        if trace is not None:
            trace.append({"level": level + 1, "blocks": n // k, "mults": (n // k) * k * k})
    return y.reshape(batch + (n,))


def encode_fast(ubar, kernel: Kernel, t: int, trace: Optional[list] = None) -> np.ndarray:
    """Z = Ubar (M^-1)^{(x) t} in O(n log n) field operations.

    ``ubar`` may carry leading batch axes. If ``trace`` is a list, one
    entry per recursion level is appended with its multiplication count.
    """
    return _apply_levels(ubar, kernel.inverse, kernel.q, kernel.k, t, trace)


def polar_transform_fast(z, kernel: Kernel, t: int, trace: Optional[list] = None) -> np.ndarray:
    """U = Z M^{(x) t}; the inverse of :func:`encode_fast`."""
    return _apply_levels(z, kernel.matrix, kernel.q, kernel.k, t, trace)


def encode_reference(msg, code: CodeSpec) -> np.ndarray:
    """Extend ``msg`` with the frozen values and multiply by the explicit
    inverse tensor matrix."""
    ubar = code.extend(msg)
    big = tensor_matrix(code.kernel.inverse, code.t, code.q)
    return np.mod(ubar @ big, code.q)


def encode(msg, code: CodeSpec) -> np.ndarray:
    return encode_fast(code.extend(msg), code.kernel, code.t)
