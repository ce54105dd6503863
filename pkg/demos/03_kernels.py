"""Which small matrices polarize, and how strongly does one step act?"""
import numpy as np

from polarmix import Kernel, check_mixing, local_polarization_report
from polarmix.kernel import find_lower_reduction, find_upper_reduction

candidates = {
    "G2": ([[1, 0], [1, 1]], 2),
    "identity": ([[1, 0], [0, 1]], 2),
    "swap-triangular": ([[0, 1], [1, 1]], 2),
    "ternary 3x3": ([[1, 0, 0], [2, 1, 0], [1, 1, 1]], 3),
    "binary 3x3": ([[1, 0, 0], [1, 1, 0], [1, 0, 1]], 2),
}
for name, (m, q) in candidates.items():
    r = check_mixing(m, q)
    print(f"{name:16s} q={q} mixing={r.mixing} witness={r.witness}")

for name in ("G2", "ternary 3x3", "binary 3x3"):
    m, q = candidates[name]
    kern = Kernel(m, q)
    rep = local_polarization_report(kern)
    up, lo = find_upper_reduction(kern), find_lower_reduction(kern)
    print(f"\n{name}: theta(0.1)={rep.theta_of_tau[0.1]:.5f} theta(0.01)={rep.theta_of_tau[0.01]:.2e}")
    print(f"  upper reduction j={up.j} s={up.s} alpha={up.alpha}; lower j={lo.j} ell={lo.ell} alpha={lo.alpha}")
    for c, e in rep.suction_table.items():
        print(f"  c={c}: low end up to {e.tau_low:.2f} (share {e.alpha_low:.2f}),"
              f" high end up to {e.tau_high:.2f} (share {e.alpha_high:.2f})")

mixing = sum(check_mixing(np.array(e).reshape(3, 3), 3).mixing
             for e in np.ndindex(*(3,) * 9))
print(f"\nmixing 3x3 matrices over F_3: {mixing}")
