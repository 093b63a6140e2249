"""
Random constant-composition codes
=================================

Draw codebooks uniformly from one type class, decode with the threshold-J
rule or with MMI, and compare with the random-coding guarantees.
"""

import math

import fblbounds as fb

w = fb.bsc(0.1)
n, rate, gamma = 40, 0.1, 0.27
p = fb.InputType((20, 20))
m = 2 ** math.floor(n * rate)

cb = fb.generate_codebook(n, p, m, seed=1)
res = fb.estimate_error(cb, w, fb.Decoder("threshold_J", gamma), trials=20_000, seed=2)
print(f"M = {m}, threshold-J: {res.errors}/{res.trials} errors, "
      f"estimate {res.estimate:.4f}, Wilson upper {res.wilson_upper_95:.4f}")

bound = fb.random_coding_bound(p, w, math.log2(m), gamma, "J")
print(f"random-coding guarantee: {bound:.4f}")

# The check draws many codes and flags a violation only if even the best one
# exceeds the guarantee by three standard deviations.
rep = fb.check_random_coding(n, p, rate, gamma, w, "J", attempts=8, trials=4000, seed=3)
print(f"best of {len(rep.errors)} codes: {rep.min_error:.4f}, violation = {rep.violation}")

# At n = 16 the penalty terms swamp everything and the guarantee exceeds 1.
small = fb.check_random_coding(16, fb.InputType((8, 8)), 0.2, 0.15, w, "I",
                               attempts=4, trials=4000, seed=4)
print(f"n = 16 MMI: best {small.min_error:.4f} vs guarantee {small.bound:.1f}")

# Exact error by enumerating all 2^n outputs is available for small n.
cb6 = fb.generate_codebook(6, fb.InputType((3, 3)), 4, seed=5)
print("n = 6 exact MMI error:", round(fb.exact_error(cb6, w, fb.Decoder("mmi")), 6))
