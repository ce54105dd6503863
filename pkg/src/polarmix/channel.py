"""Symmetric memoryless channels over F_q.

Channel outputs are integer arrays. For the q-ary erasure channel the
erasure mark is the integer ``q``; custom channels use output labels
``0 .. |Y|-1``.

RNG contract: ``transmit`` uses numpy's PCG64 bit generator seeded with the
given integer and draws exactly two uniforms per symbol, consumed in index
order (``rng.random((n, 2))``). The first uniform decides whether the
symbol is corrupted (or, for custom channels, selects the output by
inverse CDF); the second picks the replacement symbol on a q-ary
symmetric channel.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import field
from .errors import AlphabetError, NotSymmetricError, ParseError, ValidationError

RNG_NAME = "numpy.PCG64"
RNG_DRAWS_PER_SYMBOL = 2
_ROW_TOL = 1e-12
_SYM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ChannelModel:
    kind: str  # "qec" | "qsc" | "custom"
    q: int
    param: float = 0.0
    transition: Optional[np.ndarray] = None

    def __post_init__(self):
        field.check_prime(self.q)
        if self.kind in ("qec", "qsc"):
            if not 0.0 <= self.param <= 1.0:
                raise ValidationError(f"{self.kind} parameter must lie in [0, 1], got {self.param}")
        elif self.kind == "custom":
            t = np.asarray(self.transition, dtype=float)
            if t.ndim != 2 or t.shape[0] != self.q:
                raise ValidationError(f"custom transition must have {self.q} rows, got {t.shape}")
            if np.any(t < 0) or np.any(np.abs(t.sum(axis=1) - 1.0) > _ROW_TOL):
                raise ValidationError("transition rows must be probability vectors")
            if not verify_symmetry(t):
                raise NotSymmetricError("custom channel is not symmetric")
            t = t.copy()
            t.setflags(write=False)
            object.__setattr__(self, "transition", t)
        else:
            raise ValidationError(f"unknown channel kind {self.kind!r}")

    @classmethod
    def erasure(cls, eps: float, q: int = 2) -> "ChannelModel":
        return cls("qec", q, float(eps))

    @classmethod
    def symmetric(cls, p: float, q: int = 2) -> "ChannelModel":
        return cls("qsc", q, float(p))

    @classmethod
    def custom(cls, transition, q: Optional[int] = None) -> "ChannelModel":
        t = np.asarray(transition, dtype=float)
        return cls("custom", int(q if q is not None else t.shape[0]), 0.0, t)

    @property
    def n_outputs(self) -> int:
        if self.kind == "qec":
            return self.q + 1
        if self.kind == "qsc":
            return self.q
        return self.transition.shape[1]

    def transition_matrix(self) -> np.ndarray:
        q = self.q
        if self.kind == "qec":
            t = np.zeros((q, q + 1))
            t[np.arange(q), np.arange(q)] = 1.0 - self.param
            t[:, q] = self.param
            return t
        if self.kind == "qsc":
            if q == 1:
                return np.ones((1, 1))
            t = np.full((q, q), self.param / (q - 1))
            np.fill_diagonal(t, 1.0 - self.param)
            return t
        return np.array(self.transition)

    def describe(self) -> str:
        if self.kind == "qec":
            return f"bec:{self.param!r}"
        if self.kind == "qsc":
            return f"qsc:{self.param!r}"
        return "custom:" + ";".join(",".join(repr(float(v)) for v in row) for row in self.transition)

    def __repr__(self) -> str:
        return f"ChannelModel({self.describe()}, q={self.q})"


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def transmit(z, ch: ChannelModel, seed: Union[int, np.random.Generator]) -> np.ndarray:
    """Pass each symbol of ``z`` through ``ch`` independently."""
    z = np.asarray(z, dtype=np.int64)
    if np.any((z < 0) | (z >= ch.q)):
        raise AlphabetError("input symbols must lie in [0, q)")
    u = _rng(seed).random(z.shape + (RNG_DRAWS_PER_SYMBOL,))
    q = ch.q
    if ch.kind == "qec":
        return np.where(u[..., 0] < ch.param, q, z)
    if ch.kind == "qsc":
        flip = u[..., 0] < ch.param
        shift = 1 + np.minimum((u[..., 1] * (q - 1)).astype(np.int64), q - 2)
        return np.where(flip, (z + shift) % q, z)
    cdf = np.cumsum(ch.transition, axis=1)
    cdf[:, -1] = 1.0
    rows = cdf[z]
    return (u[..., :1] >= rows).sum(axis=-1).clip(max=ch.n_outputs - 1)


def posteriors(y, ch: ChannelModel) -> np.ndarray:
    """Per-symbol input posteriors under a uniform prior; shape ``y.shape + (q,)``."""
    y = np.asarray(y, dtype=np.int64)
    q = ch.q
    if np.any((y < 0) | (y >= ch.n_outputs)):
        raise AlphabetError(f"output symbols must lie in [0, {ch.n_outputs})")
    if ch.kind == "qec":
        erased = y == q
        post = np.zeros(y.shape + (q,))
        idx = np.where(erased, 0, y)
        np.put_along_axis(post, idx[..., None], 1.0, axis=-1)
        post[erased] = 1.0 / q
        return post
    if ch.kind == "qsc":
        other = ch.param / (q - 1) if q > 1 else 0.0
        post = np.full(y.shape + (q,), other)
        np.put_along_axis(post, y[..., None], 1.0 - ch.param, axis=-1)
        return post
    col = ch.transition.T[y]
    return col / col.sum(axis=-1, keepdims=True)


def _entropy_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def mutual_information(transition) -> float:
    """I(Z;Y) in bits for uniform Z."""
    t = np.asarray(transition, dtype=float)
    joint = t / t.shape[0]
    return _entropy_bits(joint.sum(axis=0)) + np.log2(t.shape[0]) - _entropy_bits(joint)


def capacity(ch: ChannelModel) -> float:
    """Normalized capacity I(Z;Y)/log q with uniform input."""
    q = ch.q
    if ch.kind == "qec":
        return 1.0 - ch.param
    if ch.kind == "qsc":
        p = ch.param
        h = _entropy_bits([p, 1.0 - p]) + p * np.log2(q - 1)
        return 1.0 - h / np.log2(q)
    return mutual_information(ch.transition) / np.log2(q)


def _rows_are_permutations(t: np.ndarray) -> bool:
    ref = np.sort(t[0])
    for row in t[1:]:
        other = np.sort(row)
        if np.any(np.abs(other - ref) > _SYM_TOL):
            return False
        # explicit bijection: pair equal values in sorted order
        perm_a, perm_b = np.argsort(t[0], kind="stable"), np.argsort(row, kind="stable")
        sigma = np.empty_like(perm_a)
        sigma[perm_a] = perm_b
        if np.any(np.abs(t[0] - row[sigma]) > _SYM_TOL):
            return False
    return True


def verify_symmetry(transition) -> bool:
    """Symmetry in the output-partition sense.

    Output columns are grouped by their multiset of entries; within each
    group every pair of rows must be related by a bijection of the outputs,
    and the column sums must agree. With a single group this is the plain
    row-permutation plus equal-column-sum condition.
    """
    t = np.asarray(transition, dtype=float)
    if t.ndim != 2 or t.shape[0] == 0:
        return False
    keys = np.round(np.sort(t, axis=0), 12)
    groups: dict[bytes, list[int]] = {}
    for c in range(t.shape[1]):
        groups.setdefault(keys[:, c].tobytes(), []).append(c)
    for cols in groups.values():
        sub = t[:, cols]
        if not _rows_are_permutations(sub):
            return False
        sums = sub.sum(axis=0)
        if np.any(np.abs(sums - sums[0]) > 1e-9):
            return False
    return True


def read_matrix_file(path) -> np.ndarray:
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(v) for v in line.replace(",", " ").split()])
        except ValueError as exc:
            raise ParseError(f"bad matrix row {line!r}") from exc
    if not rows or len({len(r) for r in rows}) != 1:
        raise ParseError(f"{path}: rows must be nonempty and of equal length")
    return np.array(rows)


def parse_channel(text: str, q: int) -> ChannelModel:
    """Parse ``bec:<eps>``, ``qsc:<p>`` or ``custom:<path>``."""
    kind, sep, arg = text.partition(":")
    if not sep:
        raise ParseError(f"channel must look like kind:value, got {text!r}")
    kind = kind.lower()
    try:
        if kind in ("bec", "qec"):
            return ChannelModel.erasure(float(arg), q)
        if kind == "qsc":
            return ChannelModel.symmetric(float(arg), q)
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ParseError(f"bad channel parameter in {text!r}") from exc
    if kind == "custom":
        return ChannelModel.custom(read_matrix_file(arg), q)
    raise ParseError(f"unknown channel kind {kind!r}")
