"""Slow, independent reference computations used by the tests.

Nothing here imports the package under test. Everything is plain Python over
explicit output strings, so it is easy to audit and only usable at tiny n.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from fractions import Fraction


def h2(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def mutual_info(p, w) -> float:
    q = [sum(p[x] * w[x][y] for x in range(len(p))) for y in range(len(w[0]))]
    total = 0.0
    for x, px in enumerate(p):
        for y, wy in enumerate(w[x]):
            if px > 0 and wy > 0:
                total += px * wy * math.log2(wy / q[y])
    return total


def grid_capacity_binary(w, cost, budget, step=1e-5) -> float:
    """max I((1-a, a), W) over a on a uniform grid subject to mean cost <= budget."""
    best = 0.0
    k = 0
    while True:
        a = k * step
        if a > 1 + 1e-15:
            break
        a = min(a, 1.0)
        if (1 - a) * cost[0] + a * cost[1] <= budget + 1e-12:
            best = max(best, mutual_info((1 - a, a), w))
        k += 1
    return best


def strings(n, size):
    return itertools.product(range(size), repeat=n)


def string_prob(x, y, w) -> float:
    out = 1.0
    for a, b in zip(x, y):
        out *= w[a][b]
    return out


def joint_counts(x, y, nx, ny):
    t = [[0] * ny for _ in range(nx)]
    for a, b in zip(x, y):
        t[a][b] += 1
    return tuple(tuple(r) for r in t)


def conditional_type_law(x, w):
    """Map from count table to its probability, by summing over all outputs."""
    nx, ny = len(w), len(w[0])
    law = defaultdict(float)
    for y in strings(len(x), ny):
        law[joint_counts(x, y, nx, ny)] += string_prob(x, y, w)
    return dict(law)


def type_class_count(n, size):
    counts = defaultdict(int)
    for s in strings(n, size):
        counts[tuple(s.count(a) for a in range(size))] += 1
    return dict(counts)


def functionals_from_table(t, w):
    """(underline_I, J, I) in bits for a joint count table, all by direct sums."""
    n = sum(map(sum, t))
    nx, ny = len(t), len(t[0])
    px = [sum(t[a]) / n for a in range(nx)]
    pv = [sum(t[a][b] for a in range(nx)) / n for b in range(ny)]
    pw = [sum(px[a] * w[a][b] for a in range(nx)) for b in range(ny)]
    under = j = i = 0.0
    for a in range(nx):
        for b in range(ny):
            c = t[a][b]
            if c == 0:
                continue
            pxy = c / n
            v = c / sum(t[a])
            if w[a][b] == 0:
                return -math.inf, -math.inf, i
            under += pxy * math.log2(w[a][b] / pv[b])
            j += pxy * math.log2(w[a][b] / pw[b])
            i += pxy * math.log2(v / pv[b])
    return under, j, i


def brute_error(words, w, decide) -> float:
    """Average error of ``decide(y) -> index or None`` by enumerating every y."""
    m, n = len(words), len(words[0])
    correct = 0.0
    for y in strings(n, len(w[0])):
        k = decide(y)
        if k is not None:
            correct += string_prob(words[k], y, w)
    return 1.0 - correct / m


def ml_decider(words, w):
    def decide(y):
        best, arg = -1.0, None
        for k, x in enumerate(words):
            p = string_prob(x, y, w)
            if p > best:
                best, arg = p, k
        return arg
    return decide


def explicit_converse_rhs(words, w, gamma) -> float:
    """Pr{underline_I(x(k), Y) <= log2(M)/n - gamma} - |P_n(Y)| 2^{-n gamma}."""
    m, n = len(words), len(words[0])
    ny = len(w[0])
    thr = math.log2(m) / n - gamma
    mass = 0.0
    for x in words:
        for y in strings(n, ny):
            p = string_prob(x, y, w)
            if p == 0:
                continue
            u, _, _ = functionals_from_table(joint_counts(x, y, len(w), ny), w)
            if u <= thr + 1e-12:
                mass += p
    return mass / m - math.comb(n + ny - 1, ny - 1) * 2.0 ** (-n * gamma)


def exact_fraction_sum_type_classes(n, size) -> int:
    total = 0
    for c in itertools.product(range(n + 1), repeat=size):
        if sum(c) == n:
            v = math.factorial(n)
            for k in c:
                v //= math.factorial(k)
            total += v
    return total


def binom_pmf_fraction(n, k, p: Fraction) -> Fraction:
    return math.comb(n, k) * p ** k * (1 - p) ** (n - k)


def brute_spectrum(counts, w):
    """[(prob, underline_I, J, I)] for the conditional type of a type-``counts`` word."""
    x = []
    for a, c in enumerate(counts):
        x += [a] * c
    law = conditional_type_law(tuple(x), w)
    return [(pr, *functionals_from_table(tab, w)) for tab, pr in law.items() if pr > 0]


_COL = {"underline_I": 1, "J": 2, "I": 3}


def brute_types(n, size):
    return [c for c in itertools.product(range(n + 1), repeat=size) if sum(c) == n]


def converse_sup(n, rate, w, functional):
    """sup over gamma > 0 of min over types of Pr{f <= R - gamma} - nu 2^{-n gamma}.

    Every tail is a step function whose value at ``gamma = R - f`` includes the
    atom ``f``; the supremum is therefore attained at one of these points or
    approached (value 0) as gamma grows.
    """
    ny = len(w[0])
    nu = math.comb(n + ny - 1, ny - 1)
    col = _COL[functional]
    spectra = [brute_spectrum(c, w) for c in brute_types(n, len(w))]
    # thresholds t = R - gamma are the atom values themselves, so no rounding
    # can push an atom off its own breakpoint
    thresholds = {a[col] for s in spectra for a in s if math.isfinite(a[col]) and a[col] < rate}
    best = 0.0
    for thr in thresholds:
        val = min(sum(a[0] for a in s if a[col] <= thr) for s in spectra) - nu * 2.0 ** (-n * (rate - thr))
        best = max(best, val)
    return best


def achievability_inf(n, rate, w, functional):
    """inf over gamma > 1/n and types of Pr{f <= R + gamma} + 2 c 2^{-n gamma}."""
    nx, ny = len(w), len(w[0])
    log2c = math.log2(math.e) * nx / 12 + (nx - 1) / 2 * math.log2(2 * math.pi * n)
    if functional == "I":
        log2c = math.log2(math.e) * nx / 12 + (nx - 1) / 2 * math.log2(2 * math.pi * n) \
            + math.log2(math.comb(n + nx * ny - 1, nx * ny - 1))
    col = _COL[functional]

    def pen(g):
        return 2.0 ** (1 + log2c - n * g)

    best = 1.0
    for c in brute_types(n, nx):
        s = brute_spectrum(c, w)
        g0 = 1.0 / n
        best = min(best, sum(a[0] for a in s if a[col] <= rate + g0) + pen(g0))
        for a in s:
            g = a[col] - rate
            if g > g0:
                # left limit at the jump: the atom itself is excluded
                best = min(best, sum(b[0] for b in s if b[col] < a[col]) + pen(g))
    return best
