"""Small-n invariant checks bundled with the library.

Each suite returns ``(passed, total)``. ``fault="kappa"`` deliberately
corrupts the Stirling constant used by the type-class sandwich so the run can
be shown to fail.
"""
from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from . import bounds, channel, codesim, spectrum, typeclass
from .channel import Channel


def _random_channel(rng, nx, ny, zeros=False) -> Channel:
    w = rng.dirichlet(np.ones(ny), size=nx)
    if zeros:
        w[rng.random(w.shape) < 0.2] = 0.0
        w[np.arange(nx), rng.integers(ny, size=nx)] += 0.05
        w /= w.sum(axis=1, keepdims=True)
    return Channel(w)


def suite_functionals(rng) -> tuple:
    passed = total = 0
    for _ in range(200):
        nx, ny = rng.integers(1, 5, size=2)
        w = _random_channel(rng, nx, ny)
        p = rng.dirichlet(np.ones(nx))
        v = rng.dirichlet(np.ones(ny), size=nx)
        u = channel.functional_underline_I(p, v, w)
        j = channel.functional_J(p, v, w)
        i = channel.mutual_info(p, v)
        d = channel.divergence(channel.output_distribution(p, v), channel.output_distribution(p, w))
        total += 1
        passed += (u <= j + 1e-10) and (j <= i + 1e-10) and abs(j - u - d) <= 1e-10
    return passed, total


def suite_typeclass(rng, kappa: Callable[[int, int], float] = typeclass.kappa) -> tuple:
    passed = total = 0
    for nx in (2, 3):
        for n in range(1, 9):
            types = typeclass.enumerate_input_types(n, nx)
            total += 2
            passed += sum(typeclass.log_type_class_size(p).exact_value for p in types) == nx ** n
            passed += len(types) == typeclass.nu(n, nx).exact_value
    n = 8
    for p in typeclass.enumerate_input_types(n, 2):
        size = typeclass.log_type_class_size(p).log2_value
        h = n * channel.entropy(p.distribution)
        total += 1
        passed += (h - kappa(n, 2) <= size + 1e-9) and (size <= h + 1e-9)
        for v in typeclass.enumerate_conditional_types(p, 2):
            csize = typeclass.log_cond_type_class_size(v).log2_value
            ch = n * channel.conditional_entropy(v.conditional, p.distribution)
            total += 1
            passed += (ch - kappa(n, 4) <= csize + 1e-9) and (csize <= ch + 1e-9)
    return passed, total


def suite_spectrum(rng) -> tuple:
    passed = total = 0
    for _ in range(10):
        w = _random_channel(rng, 2, 2)
        n = 3
        ys = codesim.all_outputs(n, 2)
        for p in typeclass.enumerate_input_types(n, 2):
            x = np.repeat(np.arange(2), p.counts)
            s = spectrum.build_spectrum(p, w)
            tables = codesim.joint_tables(x, ys, 2, 2)[0]
            lik = np.exp2(codesim.log2_likelihoods(x, ys, w)[0])
            brute = {}
            for t, q in zip(tables, lik):
                key = tuple(t.ravel())
                brute[key] = brute.get(key, 0.0) + q
            ok = all(abs(brute[tuple(t.ravel())] - 2.0 ** lp) <= 1e-12
                     for t, lp in zip(s.tables, s.log2_prob))
            total += 2
            passed += ok
            passed += abs(s.log2_total) <= 1e-9
    return passed, total


def suite_bounds(rng) -> tuple:
    passed = total = 0
    r = bounds.BoundEngine(channel.bsc(0.0)).converse(bounds.BoundQuery(100, 1.1))
    total += 1
    passed += abs(r.raw - (1 - 101 * 2.0 ** -10)) <= 1e-9
    engine = bounds.BoundEngine(channel.bsc(0.1))
    for rate in (0.2, 0.5, 0.8):
        res = {v: engine.bound(bounds.BoundQuery(20, rate, None, v)) for v in bounds.VARIANTS}
        lo = max(res["converse_underline"].value, res["converse_J"].value)
        total += 1
        passed += lo <= min(res["achievability_J"].value, res["achievability_I"].value)
    return passed, total


def suite_codesim(rng) -> tuple:
    passed = total = 0
    w = channel.bsc(0.2)
    for _ in range(10):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(2, 5))
        words = rng.integers(2, size=(m, n))
        dec = codesim.ml_decisions(words, w)
        pe = codesim.exact_error(words, w, dec)
        for g in (0.05, 0.2, 0.5):
            total += 2
            passed += bounds.code_converse_rhs(words, w, g) <= pe + 1e-12
            passed += codesim.check_meta_converse(words, dec, w, g).holds
    return passed, total


SUITES = {
    "functionals": suite_functionals,
    "typeclass": suite_typeclass,
    "spectrum": suite_spectrum,
    "bounds": suite_bounds,
    "codesim": suite_codesim,
}


def run_selftest(fault: Optional[str] = None, seed: int = 2024, echo=print) -> bool:
    """Run every suite; returns ``True`` iff all checks pass."""
    ok = True
    for name, fn in SUITES.items():
        rng = np.random.default_rng(seed)
        if name == "typeclass" and fault == "kappa":
            passed, total = fn(rng, kappa=lambda n, a: typeclass.kappa(n, a) - 8.0)
        else:
            passed, total = fn(rng)
        status = "ok" if passed == total else "FAIL"
        echo(f"{name:12s} {passed}/{total} {status}")
        ok &= passed == total
    return ok
