"""Build a length-256 code, send random messages over an erasure channel
and compare the block error rate with the sum of the chosen indices'
erasure probabilities."""
import numpy as np

from polarmix import (
    G2,
    ChannelModel,
    Kernel,
    construct_code,
    decode_fast,
    encode,
    erasure_profile,
    posteriors,
    transmit,
)
from polarmix.construction import simulate_block_errors

kernel = Kernel(G2, 2)
ch = ChannelModel.erasure(0.4)
code, scores = construct_code(ch, kernel, 8, threshold=1e-3)
print(f"n={code.n}, |S|={code.info_indices.size}, rate={code.rate:.3f}")

rng = np.random.default_rng(0)
msg = rng.integers(0, 2, code.info_indices.size)
y = transmit(encode(msg, code), ch, seed=1)
print(f"erased {np.sum(y == 2)} of {code.n} symbols")
out = decode_fast(posteriors(y, ch), code)
print("message recovered:", np.array_equal(out.u_hat[code.info_indices], msg))

errors = simulate_block_errors(code, ch, trials=4000, seed=2, threads=4)
bound = erasure_profile(kernel, 0.4, 8).values[code.info_indices].sum()
print(f"block error rate {errors / 4000:.4f}, entropy bound {bound:.4f}")

# the same pipeline over F_3 with a 3x3 kernel and a symmetric channel
k3 = Kernel([[1, 0, 0], [2, 1, 0], [1, 1, 1]], 3)
qsc = ChannelModel.symmetric(0.05, 3)
code3, _ = construct_code(qsc, k3, 4, rate=0.4, method="mc", trials=2000, seed=3, threads=4)
errors = simulate_block_errors(code3, qsc, trials=2000, seed=4, threads=4)
print(f"\nF_3, n={code3.n}, rate {code3.rate:.3f}: block error rate {errors / 2000:.4f}")
