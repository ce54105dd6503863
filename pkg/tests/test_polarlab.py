import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarmix.construction import erasure_profile, erasure_profiles
from polarmix.errors import NotMixingError, ShapeError, ValidationError
from polarmix.kernel import G2, Kernel
from polarmix.polarlab import (
    JointDistribution,
    cond_entropy,
    conditional_entropy,
    fourier_coefficients,
    l2_uniform_gap,
    local_polarization_report,
    polarization_stats,
    polarization_sweep,
    potential,
    stats_csv,
    verify_entropy_inequalities,
)

from conftest import random_mixing_kernel

g2 = Kernel(G2, 2)


def test_cond_entropy_examples():
    assert cond_entropy(JointDistribution(3, np.full((3, 1), 1 / 3))) == pytest.approx(1.0, abs=1e-15)
    det = np.zeros((3, 3))
    det[[0, 1, 2], [2, 0, 1]] = 1 / 3
    assert cond_entropy(JointDistribution(3, det)) == 0.0
    h = -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75))
    assert cond_entropy(JointDistribution(2, [[0.25], [0.75]])) == pytest.approx(h, abs=1e-12)
    assert h == pytest.approx(0.811278, abs=1e-6)


def test_joint_validation():
    with pytest.raises(ValidationError):
        JointDistribution(2, [[0.5], [0.6]])
    with pytest.raises(ShapeError):
        JointDistribution(3, [[0.5], [0.5]])


def test_generic_conditional_entropy_agrees():
    rng = np.random.default_rng(0)
    for q in (2, 3, 5):
        j = JointDistribution.random(q, 4, rng)
        x, a = np.meshgrid(np.arange(q), np.arange(4), indexing="ij")
        got = conditional_entropy(j.probs.ravel(), x.ravel(), 7 * a.ravel() + 1, q)
        assert got == pytest.approx(cond_entropy(j), abs=1e-12)


def test_l2_gap_examples():
    assert l2_uniform_gap(np.full(5, 0.2)) == pytest.approx(0.0, abs=1e-15)
    assert l2_uniform_gap([1.0, 0.0]) == 0.5


@pytest.mark.parametrize("q", [2, 3, 5])
def test_parseval(q):
    rng = np.random.default_rng(q)
    for _ in range(100):
        d = rng.dirichlet(np.ones(q))
        mags = np.abs(fourier_coefficients(d))
        assert abs(mags[0] - 1) <= 1e-12
        assert abs((mags[1:] ** 2).sum() / q - l2_uniform_gap(d)) <= 1e-10


def test_inequality_examples():
    for q in (2, 3, 5):
        u = JointDistribution(q, np.full((q, 1), 1 / q))
        r = verify_entropy_inequalities(u, u)
        assert r.passed
        assert abs(r.checks["b"].slack) <= 1e-12
        point = np.zeros((q, 1))
        point[0, 0] = 1
        p = JointDistribution(q, point)
        assert verify_entropy_inequalities(p, p).passed


def test_inequality_shape_error():
    with pytest.raises(ShapeError):
        verify_entropy_inequalities(JointDistribution(2, [[1.0], [0.0]]),
                                    JointDistribution(3, [[1.0], [0.0], [0.0]]))
    with pytest.raises(ShapeError):
        verify_entropy_inequalities(np.ones((2, 1)) / 2, np.ones((2, 1)) / 2)


def test_chain_identity_iid_form():
    rng = np.random.default_rng(4)
    for q in (2, 3, 5):
        j = JointDistribution.random(q, 3, rng)
        r = verify_entropy_inequalities(j, j)
        assert r.checks["b"].passed


@settings(max_examples=150, deadline=None)
@given(q=st.sampled_from([2, 3, 5]), a1=st.integers(1, 4), a2=st.integers(1, 4),
       seed=st.integers(0, 2**32 - 1))
def test_inequalities_hold(q, a1, a2, seed):
    rng = np.random.default_rng(seed)
    r = verify_entropy_inequalities(JointDistribution.random(q, a1, rng), JointDistribution.random(q, a2, rng))
    assert r.violations() == []


def test_local_report_g2():
    rep = local_polarization_report(g2, c_list=(2, 4, 8), taus=(0.1, 0.01))
    assert abs(rep.theta_of_tau[0.1] - 0.0081) <= 1e-12
    assert abs(rep.theta_of_tau[0.01] - (0.01 * 0.99) ** 2) <= 1e-12
    assert abs(rep.suction_table[4].tau_low - 0.25) <= 1e-12
    assert rep.suction_table[4].alpha_low == 0.5
    assert rep.alpha == 0.5
    with pytest.raises(NotMixingError):
        local_polarization_report(Kernel(np.eye(2, dtype=int), 2))


def test_local_report_invariants():
    rng = np.random.default_rng(6)
    for q, k in [(2, 3), (3, 3), (5, 2)]:
        kern = random_mixing_kernel(q, k, rng)
        rep = local_polarization_report(kern)
        assert all(v >= 0 for v in rep.theta_of_tau.values())
        for e in rep.suction_table.values():
            for share in (e.alpha_low, e.alpha_high):
                assert abs(share * k - round(share * k)) <= 1e-12


def test_stats_examples():
    (s,) = polarization_stats([(3, np.array([0.0, 1.0, 1.0, 0.0]))], 0.8, 0.1)
    assert s.fraction_tau == 0 and s.fraction_gamma_t == 0 and s.potential == 0
    (s,) = polarization_stats([(2, np.full(4, 0.5))], 0.8, 0.1)
    assert s.fraction_tau == 1 and s.potential == pytest.approx(math.sqrt(0.5))
    (s,) = polarization_stats([erasure_profile(g2, 0.5, 2)], 0.8, 0.1)
    assert s.fraction_tau == 0.5


@settings(max_examples=30, deadline=None)
@given(q=st.sampled_from([2, 3, 5]), k=st.sampled_from([2, 3]), eps=st.floats(0, 1),
       seed=st.integers(0, 2**32 - 1))
def test_martingale_conservation(q, k, eps, seed):
    kern = random_mixing_kernel(q, k, np.random.default_rng(seed))
    for prof in erasure_profiles(kern, eps, 10 if k == 2 else 8):
        assert abs(prof.values.mean() - eps) <= 1e-12
        assert np.all((prof.values >= 0) & (prof.values <= 1))


def test_potential_decay():
    phis = [potential(p.values) for p in erasure_profiles(g2, 0.5, 13)]
    ratios = [phis[t + 1] / phis[t] for t in range(2, 13)]
    assert max(ratios) < 1
    nu = 1 - max(ratios)
    assert nu > 0.1


def test_strong_polarization_trend():
    stats = polarization_sweep(g2, 0.5, 14, gamma=0.8)
    frac = [s.fraction_gamma_t for s in stats if s.t >= 4]
    assert all(b <= a for a, b in zip(frac, frac[1:])), f"fractions for t=4..14: {frac}"
    slope = np.polyfit(np.arange(len(frac)), np.log(frac), 1)[0]
    assert math.exp(slope) < 1


def test_stats_csv():
    text = stats_csv(polarization_sweep(g2, 0.5, 3))
    lines = text.splitlines()
    assert lines[0] == "t,mean,fraction_tau,fraction_gamma_t,potential"
    assert [line.split(",")[1] for line in lines[1:]] == ["0.5"] * 3
