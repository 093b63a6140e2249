"""
The converse for explicit codes
===============================

For a concrete code and decoder both sides of the converse can be evaluated
exactly by enumerating outputs.
"""

import numpy as np
import fblbounds as fb
from fblbounds import codesim as cs

rng = np.random.default_rng(0)
w = fb.bsc(0.15)
words = rng.integers(2, size=(4, 4))
print("code:\n", words)

dec = cs.ml_decisions(words, w)
pe = fb.exact_error(words, w, dec)
print(f"ML error probability: {pe:.6f}")

# The right side is a tail minus a penalty; it never exceeds P_e. At n = 4
# the penalty wins and the bound is negative, which is still consistent.
for g in (0.05, 0.1, 0.2, 0.4):
    rhs = fb.code_converse_rhs(words, w, g)
    print(f"gamma = {g:.2f}: converse rhs = {rhs: .6f}")

# The comparison distributions: one uniform law per output type class.
rep = fb.check_meta_converse(words, dec, w, 0.2)
print(f"L = {rep.L}, Pr(union) = {rep.union_prob:.4f}, rhs = {rep.rhs:.4f}, "
      f"slack = {rep.slack:.4f}, holds = {rep.holds}")
print("Delta_l:", np.round(rep.deltas, 5), "cap", round(rep.penalty, 5))
