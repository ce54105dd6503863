"""Code construction.

On the q-ary erasure channel every synthesized channel is again an erasure
channel, so the per-index conditional entropies are computed exactly by
iterating a single kernel step. Other channels are handled by Monte-Carlo
genie-aided decoding.

Seeding contract for randomized trials: trial ``r`` of a run with master
seed ``s`` draws from ``Generator(PCG64(SeedSequence([s, r])))``. It first
draws the message symbols and then passes the channel RNG stream to
:func:`polarmix.channel.transmit`. Trials are processed in fixed-size
chunks whose integer tallies are summed, so results do not depend on the
number of worker threads.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import field
from .channel import ChannelModel, posteriors, transmit
from .code import CodeSpec
from .decoder import decode_fast, decode_genie
from .errors import (
    ParseError,
    PolarError,
    TooLargeError,
    UnsupportedError,
    ValidationError,
)
from .kernel import Kernel
from .transform import encode_fast, tensor_matrix

MAX_PROFILE = 2 ** 22
MAX_BRUTEFORCE_N = 14
CHUNK = 256


# --------------------------------------------------------------------------
# exact erasure evolution


@lru_cache(maxsize=64)
def _step_table(kernel: Kernel) -> tuple[np.ndarray, np.ndarray]:
    """For every erased set E of kernel inputs: |E| and which outputs stay unknown."""
    k, q, m = kernel.k, kernel.q, kernel.matrix
    sizes, unknown = [], []
    for r in range(k + 1):
        for e in combinations(range(k), r):
            span = field.IncrementalSpan(r, q)
            row = [span.add(m[list(e), j]) if r else False for j in range(k)]
            sizes.append(r)
            unknown.append(row)
    return np.array(sizes), np.array(unknown, dtype=bool)


def erasure_step(kernel: Kernel, z) -> np.ndarray:
    """Erasure probabilities of the k synthesized channels.

    Output ``j`` is unknown exactly when column ``j`` of the kernel,
    restricted to the erased rows, is outside the span of the earlier
    restricted columns. ``z`` may be an array; the result gains a trailing
    axis of length k.
    """
    z = np.asarray(z, dtype=float)
    sizes, unknown = _step_table(kernel)
    k = kernel.k
    weights = z[..., None] ** sizes * (1.0 - z[..., None]) ** (k - sizes)
    return weights @ unknown.astype(float)


@dataclass(frozen=True)
class ErasureProfile:
    """Exact per-index erasure probabilities after ``t`` kernel levels.

    ``values[i]`` belongs to message index ``index_map[b]`` where ``b`` is
    the branch whose base-k digits (first digit most significant) list the
    synthesized-channel choices, first level first. The map is the
    identity; it is pinned by agreement with the brute-force oracle.
    """

    kernel: Kernel
    eps: float
    t: int
    values: np.ndarray
    index_map: np.ndarray

    @property
    def n(self) -> int:
        return self.values.size

    def mean(self) -> float:
        return float(np.mean(self.values))


def _evolve(kernel: Kernel, eps: float, t: int):
    vals = np.array([float(eps)])
    yield vals
    for _ in range(t):
        vals = erasure_step(kernel, vals).reshape(-1)
        yield vals


def erasure_profile(kernel: Kernel, eps: float, t: int) -> ErasureProfile:
    if kernel.k ** t > MAX_PROFILE:
        raise TooLargeError(f"k**t = {kernel.k ** t} exceeds {MAX_PROFILE}")
    for vals in _evolve(kernel, eps, t):
        pass
    return ErasureProfile(kernel, float(eps), t, vals, np.arange(vals.size))


def erasure_profiles(kernel: Kernel, eps: float, t_max: int) -> list[ErasureProfile]:
    """Profiles for t = 0 .. t_max, sharing the evolution."""
    if kernel.k ** t_max > MAX_PROFILE:
        raise TooLargeError(f"k**t = {kernel.k ** t_max} exceeds {MAX_PROFILE}")
    return [
        ErasureProfile(kernel, float(eps), t, v, np.arange(v.size))
        for t, v in enumerate(_evolve(kernel, eps, t_max))
    ]


def bruteforce_entropy_profile(kernel: Kernel, eps: float, t: int) -> np.ndarray:
    """Exact normalized H(U_i | U_<i, Y) by enumerating all erasure patterns.

    Independent of the recursion: works directly on the explicit matrix
    of M^{(x) t}.
    """
    n = kernel.k ** t
    if n > MAX_BRUTEFORCE_N:
        raise TooLargeError(f"n = {n} exceeds {MAX_BRUTEFORCE_N}")
    big = tensor_matrix(kernel.matrix, t, kernel.q)
    out = np.zeros(n)
    for mask in range(1 << n):
        rows = [i for i in range(n) if mask >> i & 1]
        r = len(rows)
        w = eps ** r * (1.0 - eps) ** (n - r)
        if w == 0.0:
            continue
        if r == 0:
            continue
        span = field.IncrementalSpan(r, kernel.q)
        sub = big[rows]
        for i in range(n):
            if span.add(sub[:, i]):
                out[i] += w
    return out


# --------------------------------------------------------------------------
# randomized trials


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(trial)])))


def _chunks(trials: int) -> list[range]:
    return [range(a, min(a + CHUNK, trials)) for a in range(0, trials, CHUNK)]


def _run_chunks(fn, trials: int, threads: int) -> list:
    chunks = _chunks(trials)
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def _draw(code: CodeSpec, ch: ChannelModel, seed: int, trials: range, full: bool):
    """Messages (over all n positions if ``full``) and channel posteriors."""
    n_msg = code.n if full else code.info_indices.size
    msgs, ys = [], []
    for r in trials:
        rng = trial_rng(seed, r)
        msg = rng.integers(0, code.q, n_msg)
        ubar = msg if full else code.extend(msg)
        z = encode_fast(ubar, code.kernel, code.t)
        msgs.append(ubar)
        ys.append(transmit(z, ch, rng))
    return np.array(msgs), posteriors(np.array(ys), ch)


def genie_error_counts(kernel: Kernel, t: int, ch: ChannelModel, trials: int, seed: int,
                       threads: int = 1) -> np.ndarray:
    """Per-index genie error counts with every index carrying a random symbol."""
    probe = CodeSpec(kernel, t, {})

    def work(chunk: range) -> np.ndarray:
        ubar, post = _draw(probe, ch, seed, chunk, full=True)
        return decode_genie(post, ubar, probe).sum(axis=0).astype(np.int64)

    return np.sum(_run_chunks(work, trials, threads), axis=0)


def simulate_block_errors(code: CodeSpec, ch: ChannelModel, trials: int, seed: int,
                          threads: int = 1) -> int:
    """Number of trials in which fast SC decoding misses the transmitted Ubar."""

    def work(chunk: range) -> int:
        ubar, post = _draw(code, ch, seed, chunk, full=False)
        out = decode_fast(post, code)
        return int(np.any(out.u_hat != ubar, axis=1).sum())

    return int(sum(_run_chunks(work, trials, threads)))


# --------------------------------------------------------------------------
# construction


@dataclass(frozen=True)
class IndexScore:
    index: int
    score: float
    stderr: Optional[float] = None


def select_indices(scores: Sequence[float], rate: Optional[float] = None,
                   threshold: Optional[float] = None) -> list[int]:
    """Information set: the ceil(rate * n) lowest scores, or all scores <= threshold."""
    scores = np.asarray(scores, dtype=float)
    n = scores.size
    if (rate is None) == (threshold is None):
        raise ValueError("give exactly one of rate or threshold")
    if threshold is not None:
        return [int(i) for i in np.flatnonzero(scores <= threshold)]
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must lie in [0, 1], got {rate}")
    size = math.ceil(round(rate * n, 9))
    order = np.lexsort((np.arange(n), scores))
    return sorted(int(i) for i in order[:size])


def construct_code(ch: ChannelModel, kernel: Kernel, t: int, rate: Optional[float] = None,
                   threshold: Optional[float] = None, method: str = "exact",
                   trials: int = 0, seed: int = 0, threads: int = 1):
    """Build a code and its per-index scores. Frozen symbols are all zero.

    ``method="exact"`` scores indices by their erasure probability (erasure
    channels only); ``method="mc"`` by the genie-aided error frequency over
    ``trials`` seeded transmissions.
    """
    if ch.q != kernel.q:
        raise ValidationError(f"channel alphabet {ch.q} != kernel field {kernel.q}")
    if method == "exact":
        if ch.kind != "qec":
            raise UnsupportedError("exact construction needs an erasure channel")
        prof = erasure_profile(kernel, ch.param, t)
        values = np.empty(prof.n)
        values[prof.index_map] = prof.values
        scores = [IndexScore(i, float(v)) for i, v in enumerate(values)]
    elif method == "mc":
        if trials < 1:
            raise ValueError("Monte-Carlo construction needs trials >= 1")
        counts = genie_error_counts(kernel, t, ch, trials, seed, threads)
        freq = counts / trials
        err = np.sqrt(freq * (1.0 - freq) / trials)
        values = freq
        scores = [IndexScore(i, float(f), float(e)) for i, (f, e) in enumerate(zip(freq, err))]
    else:
        raise ValueError(f"unknown method {method!r}")
    info = set(select_indices(values, rate=rate, threshold=threshold))
    frozen = {i: 0 for i in range(values.size) if i not in info}
    meta = {"channel": ch.describe(), "method": method, "seed": int(seed)}
    return CodeSpec(kernel, t, frozen, meta), scores


# --------------------------------------------------------------------------
# persistence


def code_to_dict(code: CodeSpec) -> dict:
    meta = dict(code.meta)
    return {
        "q": code.q,
        "k": code.k,
        "t": code.t,
        "kernel": code.kernel.matrix.tolist(),
        "frozen": [{"index": i, "value": v} for i, v in code.frozen.items()],
        "meta": {
            "channel": str(meta.get("channel", "")),
            "method": str(meta.get("method", "")),
            "seed": int(meta.get("seed", 0)),
        },
    }


def code_from_dict(d) -> CodeSpec:
    try:
        q, k, t = d["q"], d["k"], d["t"]
        matrix = d["kernel"]
        frozen_list = d["frozen"]
        meta = d.get("meta", {})
        frozen = {}
        for item in frozen_list:
            i, v = item["index"], item["value"]
            if not all(isinstance(x, int) and not isinstance(x, bool) for x in (i, v)):
                raise ParseError("frozen entries must hold integers")
            if i in frozen:
                raise ValidationError(f"frozen index {i} listed twice")
            frozen[i] = v
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in (q, k, t)):
            raise ParseError("q, k and t must be integers")
        rows = np.array(matrix)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed code description: {exc}") from exc
    field.check_prime(q)
    if rows.shape != (k, k) or rows.dtype.kind not in "iu":
        raise ValidationError(f"kernel must be a {k}x{k} integer matrix")
    if np.any((rows < 0) | (rows >= q)):
        raise ValidationError(f"kernel entries must lie in [0, {q})")
    try:
        kernel = Kernel(rows, q)
    except PolarError as exc:
        raise ValidationError(f"invalid kernel: {exc}") from exc
    return CodeSpec(kernel, t, frozen, meta)


def dumps_code(code: CodeSpec) -> str:
    return json.dumps(code_to_dict(code), indent=2) + "\n"


def save_code(code: CodeSpec, path) -> None:
    Path(path).write_text(dumps_code(code))


def load_code(path) -> CodeSpec:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(d, dict):
        raise ParseError(f"{path}: top level must be an object")
    return code_from_dict(d)


def scores_csv(scores: Sequence[IndexScore]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "score", "stderr"])
    for s in scores:
        w.writerow([s.index, repr(s.score), "" if s.stderr is None else repr(s.stderr)])
    return buf.getvalue()
