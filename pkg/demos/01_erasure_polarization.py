"""Watch the erasure probabilities of G2 split toward 0 and 1.

On the binary erasure channel every synthesized channel is again an
erasure channel, so the whole process is exact.
"""
import numpy as np

from polarmix import G2, Kernel, erasure_profile
from polarmix.polarlab import achieved_rate, polarization_sweep

kernel = Kernel(G2, 2)
eps = 0.5

print("t=2 erasure probabilities:", erasure_profile(kernel, eps, 2).values)

print("\n t   mean   in(0.1,0.9)  in(0.8^t,1-0.8^t)  potential")
for s in polarization_sweep(kernel, eps, 14, gamma=0.8, tau=0.1):
    print(f"{s.t:2d}  {s.mean:.3f}    {s.fraction_tau:.4f}        {s.fraction_gamma_t:.4f}         {s.potential:.4f}")

print("\nshare of indices with erasure probability <= 1e-6 (capacity 0.5):")
for t in (6, 10, 14, 18):
    print(f"  t={t:2d}  n={2 ** t:6d}  rate={achieved_rate(erasure_profile(kernel, eps, t), 1e-6):.4f}")

values = erasure_profile(kernel, eps, 18).values
hist, _ = np.histogram(values, bins=10, range=(0, 1))
print("\nhistogram of the 2^18 values over ten bins:", hist.tolist())
