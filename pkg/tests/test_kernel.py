import itertools

import numpy as np
import pytest

from polarmix.errors import NotMixingError, ShapeError, SingularError
from polarmix.field import mat_mul
from polarmix.kernel import (
    G2,
    Kernel,
    check_mixing,
    find_lower_reduction,
    find_upper_reduction,
    reduced_matrix,
)
from polarmix.polarlab import random_pairs, reduction_slacks

from conftest import all_invertible, random_mixing_kernel


def _upper_triangular(m):
    return not np.any(np.tril(m, -1))


def test_mixing_examples():
    assert check_mixing(G2, 2).mixing
    r = check_mixing(np.eye(2, dtype=int), 2)
    assert not r.mixing and r.witness == (0, 1)
    r = check_mixing([[0, 1], [1, 1]], 2)
    assert not r.mixing and r.witness == (1, 0)
    with pytest.raises(ShapeError):
        check_mixing([[1, 0, 0], [0, 1, 0]], 2)


def test_singular_is_not_mixing():
    r = check_mixing([[1, 1], [1, 1]], 2)
    assert not r.invertible and not r.mixing and r.witness is None
    with pytest.raises(SingularError):
        Kernel([[1, 1], [1, 1]], 2)


@pytest.mark.parametrize("q,k", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_mixing_matches_bruteforce(q, k):
    for m in all_invertible(q, k):
        brute = any(_upper_triangular(m[list(p)]) for p in itertools.permutations(range(k)))
        r = check_mixing(m, q)
        assert r.mixing == (not brute)
        if r.witness is not None:
            assert _upper_triangular(m[list(r.witness)])


def test_kernel_inverse_and_pivots():
    rng = np.random.default_rng(3)
    for q, k in [(2, 3), (3, 3), (5, 2)]:
        kern = random_mixing_kernel(q, k, rng)
        assert np.array_equal(mat_mul(kern.inverse, kern.matrix, q), np.eye(k, dtype=int))
        assert sorted(kern.pivot_order) == list(range(k))
        assert np.all(np.diag(kern.pivoted) != 0) or k == 1
        with pytest.raises(ValueError):
            kern.inverse[0, 0] = 1


def test_reduced_matrix_examples():
    for k in (2, 3):
        for j in range(k):
            assert np.array_equal(reduced_matrix(np.eye(k, dtype=int), j, 2), np.eye(k))
    assert np.array_equal(reduced_matrix(np.array(G2), 0, 2), G2)
    assert np.array_equal(reduced_matrix(np.array(G2), 1, 2), [[1, 0], [1, 1]])


def test_reduced_matrix_shape():
    rng = np.random.default_rng(5)
    for q, k in [(2, 3), (3, 3), (3, 4)]:
        kern = random_mixing_kernel(q, k, rng)
        mp = kern.pivoted
        for j in range(k):
            mj = reduced_matrix(mp, j, q)
            assert np.array_equal(mj[:j, :j], np.eye(j))
            assert not np.any(mj[:j, j])
            assert np.array_equal(mj[:, j + 1:], mp[:, j + 1:])


def test_reduction_examples():
    g2 = Kernel(G2, 2)
    up = find_upper_reduction(g2)
    assert (up.j, up.ell, up.s, up.alpha) == (0, 0, 1, 1)
    lo = find_lower_reduction(g2)
    assert (lo.j, lo.ell, lo.alpha) == (1, 0, 1)
    other = Kernel([[1, 1], [1, 0]], 2)
    up = find_upper_reduction(other)
    assert (up.j, up.ell, up.s, up.alpha) == (0, 0, 1, 1)
    lo = find_lower_reduction(other)
    assert (lo.j, lo.ell) == (1, 0) and lo.alpha == 1
    ident = Kernel(np.eye(2, dtype=int), 2)
    for fn in (find_upper_reduction, find_lower_reduction):
        with pytest.raises(NotMixingError):
            fn(ident)


@pytest.mark.parametrize("q,k", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_reduction_index_invariants(q, k):
    for m in all_invertible(q, k):
        kern = Kernel(m, q)
        if not kern.mixing:
            continue
        up = find_upper_reduction(kern)
        assert up.s > up.j and up.alpha != 0
        lo = find_lower_reduction(kern)
        assert lo.ell < lo.j and lo.alpha != 0


@pytest.mark.parametrize("q,k", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_reduction_inequalities_random_instances(q, k):
    rng = np.random.default_rng(100 * q + k)
    for trial in range(25):
        kern = random_mixing_kernel(q, k, rng)
        pairs = random_pairs(q, k, int(rng.integers(1, 3)), rng, identical=trial % 2 == 0)
        s = reduction_slacks(kern, pairs)
        assert s["upper"] >= -1e-10
        assert s["lower"] >= -1e-10
        assert s["elimination"] >= -1e-10
