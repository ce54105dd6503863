import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarmix.code import CodeSpec
from polarmix.errors import ShapeError, TooLargeError
from polarmix.kernel import G2, Kernel
from polarmix.transform import (
    encode,
    encode_fast,
    encode_reference,
    polar_transform_fast,
    tensor_matrix,
)

from conftest import random_mixing_kernel

g2 = Kernel(G2, 2)


def test_tensor_matrix_examples():
    m = np.array([[1, 2], [0, 1]])
    assert np.array_equal(tensor_matrix(m, 1, 3), m)
    big = tensor_matrix(G2, 2, 2)
    g = np.array(G2)
    for i1, i2, j1, j2 in itertools.product(range(2), repeat=4):
        assert big[2 * i1 + i2, 2 * j1 + j2] == g[i1, j1] * g[i2, j2]
    with pytest.raises(TooLargeError):
        tensor_matrix(G2, 13, 2)


def test_encode_examples():
    full = CodeSpec(g2, 1, {})
    assert np.array_equal(encode_reference([1, 0], full), [1, 0])
    assert np.array_equal(encode_reference([1, 1], full), [0, 1])
    assert np.array_equal(encode_fast([1, 1], g2, 1), [0, 1])
    assert not encode_fast(np.zeros(8, int), g2, 3).any()
    e1 = np.eye(4, dtype=int)[0]
    assert np.array_equal(encode_fast(e1, g2, 2), tensor_matrix(g2.inverse, 2, 2)[0])
    assert np.array_equal(polar_transform_fast([1, 0], g2, 1), [1, 0])
    assert not polar_transform_fast(np.zeros(4, int), g2, 2).any()


def test_all_zero_message():
    rng = np.random.default_rng(0)
    kern = random_mixing_kernel(3, 3, rng)
    code = CodeSpec(kern, 2, {0: 0, 4: 0})
    assert not encode_reference(np.zeros(7, int), code).any()


def test_length_checks():
    code = CodeSpec(g2, 2, {0: 0})
    with pytest.raises(ShapeError):
        encode_reference([1, 0], code)
    with pytest.raises(ShapeError):
        encode_fast([1, 0, 1], g2, 2)
    with pytest.raises(ShapeError):
        polar_transform_fast([1], g2, 2)


@pytest.mark.parametrize("q,k", [(2, 2), (2, 3), (3, 2), (3, 3), (5, 2), (5, 3)])
def test_fast_matches_reference(q, k):
    rng = np.random.default_rng(q * 10 + k)
    for t in range(0, 5):
        if k ** t > 256:
            continue
        kern = random_mixing_kernel(q, k, rng)
        frozen = {int(i): int(rng.integers(q)) for i in rng.choice(k ** t, k ** t // 3, replace=False)}
        code = CodeSpec(kern, t, frozen)
        msgs = rng.integers(0, q, (20, code.info_indices.size))
        for msg in msgs:
            assert np.array_equal(encode(msg, code), encode_reference(msg, code))


@settings(max_examples=60, deadline=None)
@given(q=st.sampled_from([2, 3, 5]), k=st.sampled_from([2, 3]), t=st.integers(0, 5),
       seed=st.integers(0, 2**32 - 1))
def test_round_trip_and_linearity(q, k, t, seed):
    rng = np.random.default_rng(seed)
    kern = random_mixing_kernel(q, k, rng)
    u1, u2 = rng.integers(0, q, (2, k ** t))
    a = int(rng.integers(q))
    z1, z2 = encode_fast(u1, kern, t), encode_fast(u2, kern, t)
    assert np.array_equal(polar_transform_fast(z1, kern, t), u1)
    assert np.array_equal(encode_fast((a * u1 + u2) % q, kern, t), (a * z1 + z2) % q)


def test_batch_axes():
    rng = np.random.default_rng(2)
    u = rng.integers(0, 3, (4, 5, 27))
    kern = random_mixing_kernel(3, 3, rng)
    z = encode_fast(u, kern, 3)
    for i in range(4):
        for j in range(5):
            assert np.array_equal(z[i, j], encode_fast(u[i, j], kern, 3))


@pytest.mark.parametrize("k,t", [(2, 1), (2, 6), (3, 4), (4, 3)])
def test_operation_count(k, t):
    rng = np.random.default_rng(k + t)
    kern = random_mixing_kernel(5 if k == 4 else 2, k, rng)
    trace = []
    encode_fast(np.zeros(k ** t, int), kern, t, trace=trace)
    n = k ** t
    assert len(trace) == t
    assert all(entry["mults"] == (n // k) * k * k for entry in trace)
    assert sum(entry["mults"] for entry in trace) == n * t * k
