"""Exhaustive checks of the entropy facts behind suction at the ends."""
import numpy as np

from polarmix import JointDistribution, Kernel, verify_entropy_inequalities
from polarmix.polarlab import random_pairs, reduction_slacks

rng = np.random.default_rng(0)
for q in (2, 3, 5):
    worst = {}
    for _ in range(500):
        r = verify_entropy_inequalities(JointDistribution.random(q, 3, rng), JointDistribution.random(q, 2, rng))
        for name, c in r.checks.items():
            worst[name] = min(worst.get(name, np.inf), c.slack)
    print(f"q={q}: smallest slack per check", {k: f"{v:.2e}" for k, v in worst.items()})

kern = Kernel([[1, 0, 0], [2, 1, 0], [1, 1, 1]], 3)
slacks = [reduction_slacks(kern, random_pairs(3, 3, 2, rng, identical=True)) for _ in range(50)]
print("\nreduction bounds on a 3x3 ternary kernel, smallest slack:",
      {k: f"{min(s[k] for s in slacks):.2e}" for k in slacks[0]})
