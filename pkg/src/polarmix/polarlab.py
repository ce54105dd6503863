"""Empirical checks of polarization behaviour and entropy inequalities.

Everything here is exact: the erasure channel gives closed-form
martingale values, and the entropy checks sum over explicit finite joint
distributions.
"""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional, Sequence

import numpy as np

from .construction import ErasureProfile, erasure_profiles, erasure_step
from .errors import NotMixingError, ShapeError, ValidationError
from .kernel import Kernel, find_lower_reduction, find_upper_reduction, reduced_matrix

NORM_TOL = 1e-12
CHECK_TOL = 1e-10
DEFAULT_GRID = np.arange(1, 100) / 100
DEFAULT_C = (2, 4, 8)
DEFAULT_TAUS = (0.1, 0.01)
DEFAULT_GAMMA = 0.8


# --------------------------------------------------------------------------
# distributions and entropies


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def conditional_entropy(weights, x, y, q: int) -> float:
    """Normalized H(X | Y) for a finite list of weighted outcomes.

    ``x`` holds values in F_q, ``y`` integer labels of the conditioning
    variable (any encoding); both are aligned with ``weights``.
    """
    w = np.asarray(weights, dtype=float)
    x = np.asarray(x, dtype=np.int64)
    _, yl = np.unique(np.asarray(y, dtype=np.int64), return_inverse=True)
    joint = np.zeros((yl.max() + 1 if yl.size else 1, q))
    np.add.at(joint, (yl, x), w)
    return (_entropy(joint.ravel()) - _entropy(joint.sum(axis=1))) / np.log2(q)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Law of a pair (X, A) with X in F_q and A in {0 .. a_size-1}."""

    q: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 2 or p.shape[0] != self.q:
            raise ShapeError(f"table must have {self.q} rows, got shape {p.shape}")
        if np.any(p < 0) or abs(p.sum() - 1.0) > NORM_TOL:
            raise ValidationError("table must be nonnegative and sum to 1")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def a_size(self) -> int:
        return self.probs.shape[1]

    def marginal(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    @classmethod
    def random(cls, q: int, a_size: int, rng: np.random.Generator) -> "JointDistribution":
        """Dirichlet table; a random concentration makes near-deterministic cases common."""
        conc = 10.0 ** rng.uniform(-2, 1)
        p = rng.dirichlet(np.full(q * a_size, conc)).reshape(q, a_size)
        return cls(q, p / p.sum())


def cond_entropy(j: JointDistribution) -> float:
    """Normalized H(X | A) in [0, 1]."""
    p = j.probs
    return (_entropy(p.ravel()) - _entropy(p.sum(axis=0))) / np.log2(j.q)


def l2_uniform_gap(dist) -> float:
    """Squared l2 distance between ``dist`` and the uniform law."""
    d = np.asarray(dist, dtype=float)
    return float(((d - 1.0 / d.size) ** 2).sum())


def fourier_coefficients(dist) -> np.ndarray:
    """D^(k) = E[w^{Xk}] with w = exp(2 pi i / q), for k = 0 .. q-1."""
    d = np.asarray(dist, dtype=float)
    q = d.size
    j = np.arange(q)
    return np.exp(2j * np.pi * np.outer(j, j) / q).T @ d


def fourier_magnitudes(dist) -> np.ndarray:
    return np.abs(fourier_coefficients(dist))


def _sum_law(d1: np.ndarray, d2: np.ndarray) -> np.ndarray:
    q = d1.size
    out = np.zeros(q)
    for a in range(q):
        out += d1[a] * np.roll(d2, a)
    return out


@dataclass
class Check:
    passed: bool
    slack: float


@dataclass
class InequalityReport:
    checks: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def violations(self) -> list[str]:
        return [name for name, c in self.checks.items() if not c.passed]


def verify_entropy_inequalities(j1: JointDistribution, j2: JointDistribution,
                                tol: float = CHECK_TOL) -> InequalityReport:
    """Exhaustive check of four entropy facts for independent (X1, A1), (X2, A2).

    a. adding an independent summand never lowers conditional entropy;
    b. H(X1 | X1+X2, A1, A2) = H(X1|A1) + H(X2|A2) - H(X1+X2 | A1, A2);
    c. d2(X, U)^2 / (2 log2 q) <= 1 - H(X) for X1, X2 and X1+X2;
    d. d2(X+Y, U)^2 <= q d2(X, U)^2 d2(Y, U)^2.

    Slack is positive when the inequality holds strictly; for (b) it is the
    negated absolute residual.
    """
    if not isinstance(j1, JointDistribution) or not isinstance(j2, JointDistribution):
        raise ShapeError("inputs must be JointDistribution tables")
    if j1.q != j2.q:
        raise ShapeError(f"field sizes differ: {j1.q} vs {j2.q}")
    q = j1.q
    p1, p2 = j1.probs, j2.probs
    x1, a1, x2, a2 = np.meshgrid(
        np.arange(q), np.arange(j1.a_size), np.arange(q), np.arange(j2.a_size), indexing="ij"
    )
    w = (p1[:, :, None, None] * p2[None, None, :, :]).ravel()
    x1, a1, x2, a2 = (v.ravel() for v in (x1, a1, x2, a2))
    s = (x1 + x2) % q
    a = a1 * j2.a_size + a2
    h1, h2 = cond_entropy(j1), cond_entropy(j2)
    hs = conditional_entropy(w, s, a, q)
    h1_given = conditional_entropy(w, x1, a * q + s, q)

    checks = {}
    slack = min(hs - h1, hs - h2)
    checks["a"] = Check(slack >= -tol, slack)
    resid = abs(h1_given - (h1 + h2 - hs))
    checks["b"] = Check(resid <= tol, -resid)

    m1, m2 = j1.marginal(), j2.marginal()
    ms = _sum_law(m1, m2)
    slack_c = min(
        (1.0 - _entropy(m) / np.log2(q)) - l2_uniform_gap(m) / (2 * np.log2(q))
        for m in (m1, m2, ms)
    )
    checks["c"] = Check(slack_c >= -tol, slack_c)
    slack_d = q * l2_uniform_gap(m1) * l2_uniform_gap(m2) - l2_uniform_gap(ms)
    checks["d"] = Check(slack_d >= -tol, slack_d)
    return InequalityReport(checks)


# --------------------------------------------------------------------------
# reduction inequalities on a kernel


def _mixed_radix(cols: np.ndarray, base: int) -> np.ndarray:
    """Encode each row of ``cols`` as a single integer."""
    out = np.zeros(cols.shape[0], dtype=np.int64)
    for c in range(cols.shape[1]):
        out = out * base + cols[:, c]
    return out


@dataclass
class ProductInstance:
    """Outcomes of k independent pairs (U_i, W_i), flattened for entropy sums."""

    q: int
    weights: np.ndarray
    u: np.ndarray  # (states, k)
    w_label: np.ndarray  # joint label of (W_1 .. W_k)

    @classmethod
    def from_pairs(cls, pairs: Sequence[JointDistribution]) -> "ProductInstance":
        q = pairs[0].q
        if any(p.q != q for p in pairs):
            raise ShapeError("all pairs must share the field size")
        sizes = [p.a_size for p in pairs]
        grids = itertools.product(*[itertools.product(range(q), range(s)) for s in sizes])
        rows = np.array([[v for pair in g for v in pair] for g in grids], dtype=np.int64)
        u, wv = rows[:, 0::2], rows[:, 1::2]
        weights = np.ones(rows.shape[0])
        for i, p in enumerate(pairs):
            weights *= p.probs[u[:, i], wv[:, i]]
        label = np.zeros(rows.shape[0], dtype=np.int64)
        for i, s in enumerate(sizes):
            label = label * s + wv[:, i]
        return cls(q, weights, u, label)

    def entropy(self, x: np.ndarray, given: Optional[np.ndarray] = None) -> float:
        """H(x | given, W) where ``given`` is an (states, m) array of field values."""
        y = self.w_label
        if given is not None and given.shape[1]:
            y = y * self.q ** given.shape[1] + _mixed_radix(np.mod(given, self.q), self.q)
        return conditional_entropy(self.weights, np.mod(x, self.q), y, self.q)


def random_pairs(q: int, k: int, a_size: int, rng: np.random.Generator,
                 identical: bool = False) -> list[JointDistribution]:
    if identical:
        j = JointDistribution.random(q, a_size, rng)
        return [j] * k
    return [JointDistribution.random(q, a_size, rng) for _ in range(k)]


def reduction_slacks(kernel: Kernel, pairs: Sequence[JointDistribution]) -> dict:
    """Measured slack of the two reduction bounds and the elimination identity.

    With V = U M (M the row-pivoted kernel) and W the side information,

    * ``upper``: H(V_j | V_<j, W) >= H(U_j + a U_s | W);
    * ``lower``: H(V_j | V_<j, W) <= H(U_j | U_l + a U_j, W);
    * ``elimination``: max over j of |H(V_j | V_<j, W) - H(V'_j | V'_<j, W)|
      where V' = U M^{(j)}.

    Positive slack means the bound holds.
    """
    inst = ProductInstance.from_pairs(pairs)
    q = kernel.q
    mp = kernel.pivoted
    v = np.mod(inst.u @ mp, q)
    out = {}

    up = find_upper_reduction(kernel)
    lhs = inst.entropy(v[:, up.j], v[:, : up.j])
    out["upper"] = lhs - inst.entropy(inst.u[:, up.j] + up.alpha * inst.u[:, up.s])

    lo = find_lower_reduction(kernel)
    lhs = inst.entropy(v[:, lo.j], v[:, : lo.j])
    mixed = np.mod(inst.u[:, lo.ell] + lo.alpha * inst.u[:, lo.j], q)[:, None]
    out["lower"] = inst.entropy(inst.u[:, lo.j], mixed) - lhs

    worst = 0.0
    for j in range(kernel.k):
        vj = np.mod(inst.u @ reduced_matrix(mp, j, q), q)
        worst = max(worst, abs(inst.entropy(v[:, j], v[:, :j]) - inst.entropy(vj[:, j], vj[:, :j])))
    out["elimination"] = -worst
    return out


# --------------------------------------------------------------------------
# local polarization on the erasure channel


@dataclass(frozen=True)
class SuctionEntry:
    tau_low: float
    alpha_low: float
    tau_high: float
    alpha_high: float


@dataclass
class LocalPolarizationReport:
    """Single-step measurements on the fixed grid ``z_grid``.

    ``theta_of_tau[tau]`` is the smallest mean squared step over grid points
    in [tau, 1 - tau]; ``suction_table[c]`` holds, for each end, the
    largest grid distance from that end up to which at least a 1/k share of
    the outputs shrink by the factor ``c``, and the smallest share seen.
    These are finite-grid measurements, not proofs for all z.
    """

    theta_of_tau: dict
    suction_table: dict
    alpha: float
    z_grid: np.ndarray

    def suction_holds(self, c: float) -> bool:
        e = self.suction_table[c]
        return e.tau_low > 0 and e.alpha_low >= self.alpha - 1e-12


def _suction_end(dist: np.ndarray, shrunk: np.ndarray, k: int):
    """Scan outward-in from one end; ``dist`` ascending distance to that end."""
    tau, share_min = 0.0, 1.0
    for d, share in zip(dist, shrunk):
        if share < 1.0 / k - 1e-12:
            break
        tau, share_min = float(d), min(share_min, float(share))
    return tau, (share_min if tau > 0 else 0.0)


def local_polarization_report(kernel: Kernel, z_grid=None, c_list: Iterable[float] = DEFAULT_C,
                              taus: Iterable[float] = DEFAULT_TAUS) -> LocalPolarizationReport:
    if not kernel.mixing:
        raise NotMixingError("local polarization needs a mixing kernel")
    z = np.sort(np.asarray(DEFAULT_GRID if z_grid is None else z_grid, dtype=float))
    if z.size == 0 or np.any((z <= 0) | (z >= 1)):
        raise ValidationError("grid must be nonempty and inside (0, 1)")
    k = kernel.k
    zp = erasure_step(kernel, z)
    sq = ((zp - z[:, None]) ** 2).mean(axis=1)

    theta = {}
    for tau in taus:
        inside = (z >= tau - 1e-12) & (z <= 1 - tau + 1e-12)
        theta[tau] = float(sq[inside].min()) if inside.any() else float("nan")

    low = z <= 0.5
    high = z >= 0.5
    table = {}
    for c in c_list:
        share_low = (zp[low] <= z[low, None] / c).mean(axis=1)
        t_lo, a_lo = _suction_end(z[low], share_low, k)
        zh, zph = z[high][::-1], zp[high][::-1]
        share_high = ((1 - zph) <= (1 - zh[:, None]) / c).mean(axis=1)
        t_hi, a_hi = _suction_end(1 - zh, share_high, k)
        table[c] = SuctionEntry(t_lo, a_lo, t_hi, a_hi)
    return LocalPolarizationReport(theta, table, 1.0 / k, z)


# --------------------------------------------------------------------------
# global statistics over t


@dataclass(frozen=True)
class PolarizationStats:
    t: int
    mean: float
    fraction_tau: float
    fraction_gamma_t: float
    potential: float


def potential(values) -> float:
    v = np.asarray(values, dtype=float)
    return float(np.mean(np.minimum(np.sqrt(v), np.sqrt(np.clip(1.0 - v, 0.0, None)))))


def _fraction_inside(v: np.ndarray, lo: float) -> float:
    return float(np.mean((v > lo) & (v < 1.0 - lo)))


def polarization_stats(profiles: Sequence, gamma: float = DEFAULT_GAMMA,
                       tau: float = DEFAULT_TAUS[0]) -> list[PolarizationStats]:
    """Per-level summary; accepts ErasureProfile objects or (t, values) pairs."""
    out = []
    for p in profiles:
        t, v = (p.t, p.values) if isinstance(p, ErasureProfile) else (p[0], np.asarray(p[1]))
        out.append(PolarizationStats(
            t=int(t),
            mean=float(np.mean(v)),
            fraction_tau=_fraction_inside(v, tau),
            fraction_gamma_t=_fraction_inside(v, gamma ** t),
            potential=potential(v),
        ))
    return out


def polarization_sweep(kernel: Kernel, eps: float, t_max: int, gamma: float = DEFAULT_GAMMA,
                       tau: float = DEFAULT_TAUS[0]) -> list[PolarizationStats]:
    """Stats for t = 1 .. t_max on the erasure channel with parameter ``eps``."""
    return polarization_stats(erasure_profiles(kernel, eps, t_max)[1:], gamma, tau)


def stats_csv(stats: Sequence[PolarizationStats]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "mean", "fraction_tau", "fraction_gamma_t", "potential"])
    for s in stats:
        w.writerow([s.t, repr(s.mean), repr(s.fraction_tau), repr(s.fraction_gamma_t), repr(s.potential)])
    return buf.getvalue()


def achieved_rate(profile: ErasureProfile, delta: float) -> float:
    """Share of indices whose erasure probability is at most ``delta``."""
    return float(np.mean(profile.values <= delta))
