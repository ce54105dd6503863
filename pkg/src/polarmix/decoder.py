"""Successive-cancellation decoding.

``decode_reference`` materializes the joint law of U = Z M^{(x) t} as an
explicit table and decides indices one at a time. ``decode_fast`` runs the
recursive decoder in O(n log n) q^k work and agrees with the reference
symbol for symbol. ``decode_genie`` uses the same recursion but forces each
decision to the true symbol after recording whether the estimate was wrong.

Rules shared by both decoders:

* ties in argmax go to the lowest field element; probabilities within a
  relative ``TIE_RTOL`` of the maximum count as tied;
* if a frozen value has zero conditional probability (only possible after
  an earlier wrong decision) the word is marked ``inconsistent``: the
  reference resets its table to uniform, so every later message decision is
  0, and the fast decoder applies that outcome directly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .code import CodeSpec
from .errors import ShapeError, TooLargeError
from .transform import tensor_matrix

TIE_RTOL = 1e-9
MAX_REFERENCE_TABLE = 2 ** 20


@dataclass
class DecodeOutcome:
    u_hat: np.ndarray  # message-side estimate, canonical order
    z_hat: np.ndarray  # codeword estimate
    inconsistent: np.ndarray | bool = False


def argmax_lowest(p: np.ndarray) -> np.ndarray:
    """Index of the largest entry along the last axis; near-ties go low."""
    thresh = p.max(axis=-1, keepdims=True) * (1.0 - TIE_RTOL)
    return np.argmax(p >= thresh, axis=-1)


def _normalize(p: np.ndarray) -> np.ndarray:
    s = p.sum(axis=-1, keepdims=True)
    zero = s <= 0
    uniform = np.full_like(p, 1.0 / p.shape[-1])
    return np.where(zero, uniform, p / np.where(zero, 1.0, s))


def _check_posteriors(post, code: CodeSpec) -> tuple[np.ndarray, bool]:
    post = np.asarray(post, dtype=float)
    single = post.ndim == 2
    if single:
        post = post[None]
    if post.ndim != 3 or post.shape[1:] != (code.n, code.q):
        raise ShapeError(f"posteriors must have shape (n={code.n}, q={code.q}), got {post.shape[-2:]}")
    return post, single


class _Recursion:
    """One batched pass of the recursive decoder with a per-index policy."""

    def __init__(self, code: CodeSpec, post: np.ndarray, truth: Optional[np.ndarray]):
        kern = code.kernel
        self.q, self.k = kern.q, kern.k
        self.minv = np.asarray(kern.inverse)
        self.alpha = code.alpha
        self.truth = truth
        b = post.shape[0]
        self.u_hat = np.zeros((b, code.n), dtype=np.int64)
        self.flags = np.zeros((b, code.n), dtype=bool)
        self.inconsistent = np.zeros(b, dtype=bool)
        # every v in F_q^k and its preimage x with x M = v
        self.v_all = np.array(list(itertools.product(range(self.q), repeat=self.k)), dtype=np.int64)
        self.x_all = np.mod(self.v_all @ self.minv, self.q)
        self.onehot = [
            (self.v_all[:, j][:, None] == np.arange(self.q)[None, :]).astype(float)
            for j in range(self.k)
        ]
        self.z_hat = self._run(post, 0, code.t)

    def _leaf(self, p: np.ndarray, i: int) -> np.ndarray:
        p = _normalize(p)
        best = argmax_lowest(p)
        a = self.alpha[i]
        if a >= 0:
            d = np.full(best.shape, a, dtype=np.int64)
        elif self.truth is not None:
            d = self.truth[:, i].copy()
            self.flags[:, i] = best != d
        else:
            d = np.where(self.inconsistent, 0, best)
        mass = np.take_along_axis(p, d[:, None], axis=-1)[:, 0]
        if a >= 0 and self.truth is None:
            self.inconsistent |= mass <= 0
        self.u_hat[:, i] = d
        return d[:, None]

    def _run(self, z: np.ndarray, offset: int, s: int) -> np.ndarray:
        if s == 0:
            return self._leaf(z[:, 0, :], offset)
        k, q = self.k, self.q
        b = z.shape[0]
        m = k ** (s - 1)
        zr = z.reshape(b, k, m, q)
        # joint law of the k outputs of each size-k butterfly
        w = np.ones((b, m, q ** k))
        for i in range(k):
            w *= zr[:, i][:, :, self.x_all[:, i]]
        w = _normalize(w)
        v_hat = np.empty((b, k, m), dtype=np.int64)
        for j in range(k):
            child = self._run(w @ self.onehot[j], offset + j * m, s - 1)
            v_hat[:, j] = child
            w = _normalize(w * (self.v_all[None, None, :, j] == child[:, :, None]))
        zhat = np.mod(np.einsum("bja,ji->bia", v_hat, self.minv), q)
        return zhat.reshape(b, k * m)


def decode_fast(post, code: CodeSpec) -> DecodeOutcome:
    """Recursive SC decoding of one word ``(n, q)`` or a batch ``(B, n, q)``."""
    post, single = _check_posteriors(post, code)
    r = _Recursion(code, post, None)
    if single:
        return DecodeOutcome(r.u_hat[0], r.z_hat[0], bool(r.inconsistent[0]))
    return DecodeOutcome(r.u_hat, r.z_hat, r.inconsistent)


def decode_genie(post, true_u, code: CodeSpec) -> np.ndarray:
    """Per-index single-step error flags under correct past decisions.

    Flags are always False on frozen positions.
    """
    post, single = _check_posteriors(post, code)
    truth = np.asarray(true_u, dtype=np.int64)
    if truth.ndim == 1:
        truth = truth[None]
    if truth.shape != post.shape[:2]:
        raise ShapeError(f"true_u shape {truth.shape} does not match posteriors {post.shape[:2]}")
    r = _Recursion(code, post, truth)
    return r.flags[0] if single else r.flags


def decode_reference(post, code: CodeSpec) -> DecodeOutcome:
    """Exponential-size SC decoder over the explicit joint table of U."""
    post = np.asarray(post, dtype=float)
    if post.ndim == 3:
        outs = [decode_reference(p, code) for p in post]
        return DecodeOutcome(
            np.stack([o.u_hat for o in outs]),
            np.stack([o.z_hat for o in outs]),
            np.array([o.inconsistent for o in outs]),
        )
    q, n = code.q, code.n
    if post.shape != (n, q):
        raise ShapeError(f"posteriors must have shape ({n}, {q}), got {post.shape}")
    if q ** n > MAX_REFERENCE_TABLE:
        raise TooLargeError(f"q**n = {q}**{n} exceeds {MAX_REFERENCE_TABLE}")
    linv = tensor_matrix(code.kernel.inverse, code.t, q)
    # row r of all_u is the base-q expansion of r, first index most significant
    all_u = np.array(np.unravel_index(np.arange(q ** n), (q,) * n), dtype=np.int16).T
    table = np.ones(q ** n)
    for i in range(n):
        z_i = np.mod(all_u @ linv[:, i].astype(np.int16), q)
        table *= post[i, z_i]
    table = table.reshape((q,) * n) if n else table.reshape(())
    alpha = code.alpha
    u_hat = np.zeros(n, dtype=np.int64)
    inconsistent = False
    for i in range(n):
        marg = table.reshape(q, -1).sum(axis=1)
        if alpha[i] >= 0:
            d = int(alpha[i])
        else:
            d = int(argmax_lowest(marg / marg.sum()))
        u_hat[i] = d
        table = table[d]
        if table.sum() <= 0:
            inconsistent = True
            table = np.ones_like(table)
    z_hat = np.mod(u_hat @ linv, q)
    return DecodeOutcome(u_hat, z_hat, inconsistent)
