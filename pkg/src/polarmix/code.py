"""The ``CodeSpec`` value: kernel, depth and frozen assignment of a polar code."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Mapping

import numpy as np

from .errors import ShapeError, ValidationError
from .kernel import Kernel


@dataclass(frozen=True)
class CodeSpec:
    """A concrete polar code of length ``n = k**t``.

    ``frozen`` maps each frozen position (0-based, canonical order) to its
    fixed symbol; every other position carries a message symbol.
    """

    kernel: Kernel
    t: int
    frozen: Mapping[int, int] = dc_field(default_factory=dict)
    meta: Mapping[str, object] = dc_field(default_factory=dict, compare=False)

    def __post_init__(self):
        if int(self.t) != self.t or self.t < 0:
            raise ValidationError(f"t must be a nonnegative integer, got {self.t!r}")
        n = self.kernel.k ** self.t
        clean = {}
        for i, v in dict(self.frozen).items():
            i, v = int(i), int(v)
            if not 0 <= i < n:
                raise ValidationError(f"frozen index {i} outside [0, {n})")
            if not 0 <= v < self.kernel.q:
                raise ValidationError(f"frozen value {v} outside F_{self.kernel.q}")
            clean[i] = v
        object.__setattr__(self, "frozen", dict(sorted(clean.items())))
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def q(self) -> int:
        return self.kernel.q

    @property
    def k(self) -> int:
        return self.kernel.k

    @property
    def n(self) -> int:
        return self.kernel.k ** self.t

    @property
    def frozen_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(self.frozen)] = True
        return mask

    @property
    def info_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.frozen_mask)

    @property
    def alpha(self) -> np.ndarray:
        """Full-length frozen vector; message positions hold -1."""
        a = np.full(self.n, -1, dtype=np.int64)
        for i, v in self.frozen.items():
            a[i] = v
        return a

    @property
    def rate(self) -> float:
        return (self.n - len(self.frozen)) / self.n

    def extend(self, msg) -> np.ndarray:
        """Place message symbols on S and frozen values elsewhere.

        ``msg`` may carry leading batch axes.
        """
        msg = np.asarray(msg, dtype=np.int64)
        info = self.info_indices
        if msg.shape[-1:] != (info.size,):
            raise ShapeError(f"message length {msg.shape[-1:]} != |S| = {info.size}")
        ubar = np.empty(msg.shape[:-1] + (self.n,), dtype=np.int64)
        alpha = self.alpha
        ubar[..., self.frozen_mask] = alpha[self.frozen_mask]
        ubar[..., info] = np.mod(msg, self.q)
        return ubar
