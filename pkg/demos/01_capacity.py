"""
Capacity of a channel with an input cost
========================================

Blahut-Arimoto with a Lagrange multiplier on the mean cost.
"""

import numpy as np
import fblbounds as fb

# A binary symmetric channel where sending a 1 costs one unit.
w = fb.bsc(0.1, cost=[0, 1])

c, p = fb.capacity(w)
print(f"unconstrained: C = {c:.6f} bits, optimizer {np.round(p, 4)}")

# Tightening the budget caps the frequency of 1s, and the capacity follows
# the binary entropy of the output.
for budget in (0.5, 0.3, 0.2, 0.1, 0.0):
    c, p = fb.capacity(w, budget)
    print(f"budget {budget:.1f}: C = {c:.6f}, P(1) = {p[1]:.4f}")

# Budgets below the cheapest symbol are infeasible.
try:
    fb.capacity(fb.bsc(0.1, cost=[1, 2]), 0.5)
except fb.InfeasibleCostError as exc:
    print("rejected:", exc)
