import itertools
import sys
from functools import lru_cache

import numpy as np

from polarmix.field import is_invertible
from polarmix.kernel import Kernel


def random_invertible(q, k, rng):
    while True:
        m = rng.integers(0, q, (k, k))
        if is_invertible(m, q):
            return m


def random_mixing_kernel(q, k, rng):
    while True:
        kern = Kernel(random_invertible(q, k, rng), q)
        if kern.mixing:
            return kern


@lru_cache(maxsize=None)
def all_invertible(q, k):
    out = []
    for entries in itertools.product(range(q), repeat=k * k):
        m = np.array(entries).reshape(k, k)
        if is_invertible(m, q):
            out.append(m)
    return tuple(out)


def all_mixing_kernels(q, k):
    kernels = (Kernel(m, q) for m in all_invertible(q, k))
    return [kern for kern in kernels if kern.mixing]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.format_result(n))
