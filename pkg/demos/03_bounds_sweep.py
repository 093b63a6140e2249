"""
Converse and achievability bounds across rate and blocklength
=============================================================

The engine caches one spectrum per input type, so sweeps over R at fixed n
are cheap.
"""

import numpy as np
import fblbounds as fb

w = fb.bsc(0.1)
c, _ = fb.capacity(w)
engine = fb.BoundEngine(w)

print(f"BSC(0.1), C = {c:.4f}")
print("   R   conv_uI   conv_J    ach_J     ach_I")
for r in np.round(np.arange(0.1, 1.0, 0.1), 1):
    vals = [engine.bound(fb.BoundQuery(60, float(r), None, v)).value for v in fb.VARIANTS]
    print(f"  {r:.1f}  " + "  ".join(f"{v:.5f}" for v in vals))

# Above capacity the converse is pushed towards one; below it the
# achievability bound decays.
for n in (100, 200, 400):
    above = engine.bound(fb.BoundQuery(n, 0.8, None, "converse_underline"))
    below = engine.bound(fb.BoundQuery(n, 0.3, None, "achievability_J"))
    print(f"n = {n}: converse(R=0.8) = {above.value:.6f} at {above.type_star}, "
          f"achievability(R=0.3) = {below.value:.2e}")

# A single-atom case that can be done by hand: the noiseless channel at
# R = 1.1 gives 1 - 101 * 2^-10.
r = fb.BoundEngine(fb.bsc(0.0)).bound(fb.BoundQuery(100, 1.1))
print(f"noiseless anchor: raw = {r.raw:.10f} (hand value {1 - 101 / 1024:.10f}), gamma* = {r.gamma_star}")
