"""
Types, conditional types and the information spectrum
=====================================================

Every input word of a given composition sees the same law for its
conditional output type. That law is a product of multinomials and can be
listed exactly.
"""

import numpy as np
import fblbounds as fb

n = 12
types = fb.enumerate_input_types(n, 2)
print(f"{len(types)} binary types at n = {n}; nu_n(2) = {fb.nu(n, 2).exact_value}")

# Class sizes add up to 2^n, exactly.
total = sum(fb.log_type_class_size(p).exact_value for p in types)
print("sum of class sizes:", total, "=", 2 ** n)

# Stirling sandwich on one class.
p = fb.InputType((7, 5))
h = n * fb.entropy(p.distribution)
size = fb.log_type_class_size(p).log2_value
print(f"log2|T_P| = {size:.4f} in [{h - fb.kappa(n, 2):.4f}, {h:.4f}]")

# The spectrum of P = (7,5) through BSC(0.1).
s = fb.build_spectrum(p, fb.bsc(0.1))
print(f"{len(s)} conditional types, total mass {2 ** s.log2_total:.15f}")

# Heaviest atoms with their three functionals.
top = np.argsort(-s.log2_prob)[:5]
for k in top:
    print(f"  Pr = {2 ** s.log2_prob[k]:.4f}  underline_I = {s.f_underline[k]: .4f}"
          f"  J = {s.f_J[k]: .4f}  I = {s.f_I[k]: .4f}")

# Tail probabilities are step functions of the threshold.
for t in (0.2, 0.4, 0.6):
    print(f"Pr{{J <= {t}}} = {fb.tail_prob(s, 'J', t):.6f}")
