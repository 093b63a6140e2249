"""Finite-blocklength lower and upper bounds on the optimal error probability.

For a query ``(n, R, Gamma)`` the converse bounds are

    max_{g>0} min_P  Pr{ f(P,V) <= R - g | P } - nu_n(|Y|) 2^{-n g}

with ``f`` either ``underline_I`` or ``J``, and the achievability bounds are

    min_{g>1/n} min_P  Pr{ f(P,V) <= R + g | P } + 2 c_n 2^{-n g}

with ``(f, c_n)`` either ``(J, kappa_n(|X|))`` or ``(I, eta_n(|X|,|Y|))``.
``P`` ranges over the cost-feasible types and ``V`` is the random
conditional output type. Tails are step functions of ``g`` whose jumps sit at
``R - f`` (converse) or ``f - R`` (achievability), so the search over ``g``
only visits those breakpoints plus a cap where the penalty is below 2^-64.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .channel import Channel, InfeasibleCostError
from .spectrum import Spectrum, build_spectrum, tail_prob
from .typeclass import InputType, enumerate_input_types, eta, kappa, nu

VARIANTS = ("converse_underline", "converse_J", "achievability_J", "achievability_I")
FUNCTIONAL = {
    "converse_underline": "underline_I",
    "converse_J": "J",
    "achievability_J": "J",
    "achievability_I": "I",
}
DELTA = 2.0 ** -30
PENALTY_CAP_BITS = 64.0
# Atoms below these masses are invisible at double precision: the first is
# dropped from spectra, the second only stops generating gamma candidates.
SPECTRUM_LOG2_FLOOR = -160.0
CANDIDATE_LOG2_FLOOR = -80.0
_CHUNK = 4096


def is_converse(variant: str) -> bool:
    if variant not in FUNCTIONAL:
        raise ValueError(f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")
    return variant.startswith("converse")


def penalty_constant_log2(n: int, input_size: int, output_size: int, variant: str) -> float:
    """log2 of the factor multiplying ``2^{-n gamma}`` in each bound."""
    if is_converse(variant):
        return nu(n, output_size).log2_value
    if variant == "achievability_J":
        return 1.0 + kappa(n, input_size)
    return 1.0 + eta(n, input_size, output_size)


def gamma_max(n: int, input_size: int, output_size: int, variant: str) -> float:
    return (PENALTY_CAP_BITS + penalty_constant_log2(n, input_size, output_size, variant)) / n


@dataclass(frozen=True)
class BoundQuery:
    n: int
    rate: float
    budget: Optional[float] = None
    variant: str = "converse_underline"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("blocklength must be positive")
        if not self.rate > 0:
            raise ValueError("rate must be positive")
        is_converse(self.variant)


@dataclass(frozen=True)
class BoundResult:
    """Optimised bound. ``value`` is ``raw`` clamped to [0, 1].

    ``penalty_log2`` is log2 of the full penalty term at ``gamma_star``
    (constant, factor 2 where present, and ``2^{-n gamma}``).
    """

    query: BoundQuery
    value: float
    raw: float
    gamma_star: float
    type_star: InputType
    penalty_log2: float
    tail_value: float
    delta: float = DELTA


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def gamma_candidates(s: Spectrum, rate: float, variant: str,
                     min_log2_prob: Optional[float] = None) -> np.ndarray:
    """Sorted search points for ``gamma`` given one spectrum.

    Converse: every positive ``R - f(atom)`` plus the cap. Achievability:
    every ``f(atom) - R`` above ``1/n`` nudged down by ``DELTA`` (kept only if
    still above ``1/n``), plus ``1/n + DELTA`` and the cap. Atoms lighter
    than ``2**min_log2_prob`` generate no candidate.
    """
    n = s.base.n
    cap = gamma_max(n, s.channel.input_size, s.channel.output_size, variant)
    f = s.values(FUNCTIONAL[variant])
    if min_log2_prob is not None:
        f = f[s.log2_prob >= min_log2_prob]
    f = f[np.isfinite(f)]
    if is_converse(variant):
        g = rate - f
        g = g[g > 0]
        extra = [cap]
    else:
        g = f - rate
        g = g[g > 1.0 / n] - DELTA
        g = g[g > 1.0 / n]
        extra = [1.0 / n + DELTA, max(cap, 1.0 / n + DELTA)]
    return np.unique(np.concatenate([g, extra]))


class BoundEngine:
    """Evaluates bounds for one channel, caching spectra per input type.

    Parameters
    ----------
    channel : Channel
    log2_floor : float or None
        Spectrum pruning level; ``None`` keeps every atom.
    candidate_floor : float or None
        Atoms lighter than this do not generate gamma candidates. Skipping
        them changes the optimum by at most their total mass.
    """

    def __init__(self, channel: Channel, log2_floor: Optional[float] = SPECTRUM_LOG2_FLOOR,
                 candidate_floor: Optional[float] = CANDIDATE_LOG2_FLOOR,
                 exhaustive_limit: int = 4_000_000):
        self.channel = channel
        self.exhaustive_limit = exhaustive_limit
        self.log2_floor = log2_floor
        self.candidate_floor = candidate_floor
        self._spectra: dict = {}

    def spectrum(self, p: InputType) -> Spectrum:
        s = self._spectra.get(p.counts)
        if s is None:
            s = build_spectrum(p, self.channel, self.log2_floor)
            self._spectra[p.counts] = s
        return s

    def feasible_types(self, n: int, budget: Optional[float]) -> list:
        types = enumerate_input_types(n, self.channel.input_size, self.channel.cost, budget)
        if not types:
            raise InfeasibleCostError(f"infeasible cost budget: no type at n={n} has mean cost <= {budget}")
        return types

    def bound(self, q: BoundQuery) -> BoundResult:
        if is_converse(q.variant):
            return self.converse(q)
        return self.achievability(q)

    def converse(self, q: BoundQuery) -> BoundResult:
        if not is_converse(q.variant):
            raise ValueError(f"{q.variant} is not a converse variant")
        w = self.channel
        sel = FUNCTIONAL[q.variant]
        types = self.feasible_types(q.n, q.budget)
        spectra = [self.spectrum(p) for p in types]
        const = penalty_constant_log2(q.n, w.input_size, w.output_size, q.variant)
        cap = gamma_max(q.n, w.input_size, w.output_size, q.variant)

        # Thresholds t = R - gamma; tails Pr{f <= t} are read at the atom
        # values themselves so the breakpoint atom is counted exactly.
        thr, owner = [], []
        for i, s in enumerate(spectra):
            f = s.values(sel)
            keep = np.isfinite(f) & (f < q.rate)
            if self.candidate_floor is not None:
                keep &= s.log2_prob >= self.candidate_floor
            t = np.unique(f[keep])
            thr.append(t)
            owner.append(np.full(len(t), i))
        thr.append(np.array([q.rate - cap]))
        owner.append(np.array([-1]))
        thr = np.concatenate(thr)
        owner = np.concatenate(owner)
        order = np.lexsort((owner, thr))
        thr, owner = thr[order], owner[order]
        first = np.concatenate([[True], thr[1:] != thr[:-1]])
        thr, owner = thr[first], owner[first]

        def penalty(t):
            return np.exp2(const - q.n * (q.rate - t))

        def exact(idx):
            tails = np.stack([s.tail_at(sel, thr[idx]) for s in spectra])
            g = tails.min(axis=0)
            arg = tails.argmin(axis=0)
            own = owner[idx]
            own_ok = own >= 0
            own_tail = np.where(own_ok, tails[np.maximum(own, 0), np.arange(len(idx))], np.inf)
            arg = np.where(own_ok & (own_tail <= g), own, arg)
            return g, g - penalty(thr[idx]), arg

        m = len(thr)
        if m * len(spectra) <= self.exhaustive_limit:
            g, val, arg = exact(np.arange(m))
            k = int(np.argmax(val))
            best = (val[k], k, g[k], arg[k])
        else:
            # Branch and bound: a few types give an upper envelope of
            # min_P tail; exact evaluation proceeds in descending envelope order.
            probe = np.unique(np.linspace(0, m - 1, min(m, 512)).astype(int))
            _, _, parg = exact(probe)
            subset = np.unique(parg)
            env = np.stack([spectra[i].tail_at(sel, thr) for i in subset]).min(axis=0)
            ub = env - penalty(thr)
            visit = np.argsort(-ub, kind="stable")
            best = (-np.inf, -1, 0.0, 0)
            for start in range(0, m, _CHUNK):
                idx = visit[start:start + _CHUNK]
                if ub[idx[0]] <= best[0]:
                    break
                g, val, arg = exact(idx)
                k = int(np.argmax(val))
                if val[k] > best[0] or (val[k] == best[0] and idx[k] < best[1]):
                    best = (val[k], int(idx[k]), g[k], arg[k])
        raw, k, tail, arg = best
        gamma = q.rate - thr[k]
        return BoundResult(q, _clamp(float(raw)), float(raw), float(gamma), types[int(arg)],
                           float(const - q.n * gamma), float(tail))

    def achievability(self, q: BoundQuery) -> BoundResult:
        if is_converse(q.variant):
            raise ValueError(f"{q.variant} is not an achievability variant")
        w = self.channel
        sel = FUNCTIONAL[q.variant]
        const = penalty_constant_log2(q.n, w.input_size, w.output_size, q.variant)
        best = None
        for p in self.feasible_types(q.n, q.budget):
            s = self.spectrum(p)
            g = gamma_candidates(s, q.rate, q.variant, self.candidate_floor)
            tails = s.tail_at(sel, q.rate + g)
            pen = const - q.n * g
            val = tails + np.exp2(pen)
            k = int(np.argmin(val))
            if best is None or val[k] < best[0]:
                best = (float(val[k]), p, float(g[k]), float(pen[k]), float(tails[k]))
        raw, p, gamma, pen, tail = best
        return BoundResult(q, _clamp(raw), raw, gamma, p, pen, tail)

    def sweep(self, ns: Sequence[int], rates: Sequence[float], budget: Optional[float] = None,
              variants: Iterable[str] = VARIANTS) -> list:
        """One result per ``(n, R)`` grid point and variant, in that order."""
        variants = list(variants)
        for v in variants:
            is_converse(v)
        out = []
        for n in ns:
            for r in rates:
                for v in variants:
                    out.append(self.bound(BoundQuery(int(n), float(r), budget, v)))
        return out


def converse_lower_bound(q: BoundQuery, w: Channel, engine: Optional[BoundEngine] = None) -> BoundResult:
    return (engine or BoundEngine(w)).converse(q)


def achievability_upper_bound(q: BoundQuery, w: Channel, engine: Optional[BoundEngine] = None) -> BoundResult:
    return (engine or BoundEngine(w)).achievability(q)


def sweep(w: Channel, ns: Sequence[int], rates: Sequence[float], budget: Optional[float] = None,
          variants: Iterable[str] = VARIANTS) -> list:
    return BoundEngine(w).sweep(ns, rates, budget, variants)


def code_converse_rhs(words, w: Channel, gamma: float, functional: str = "underline_I") -> float:
    """Converse right-hand side for a specific code.

    ``Pr{ log2(M)/n >= f(P_X, V_{Y|X}) + gamma } - nu_n(|Y|) 2^{-n gamma}``
    with ``X`` uniform over the ``M`` codewords (rows of ``words``) and each
    codeword's composition taken as is.
    """
    words = np.atleast_2d(np.asarray(words, dtype=np.int64))
    m, n = words.shape
    threshold = math.log2(m) / n - gamma
    total = 0.0
    cache: dict = {}
    for word in words:
        counts = tuple(np.bincount(word, minlength=w.input_size))
        if counts not in cache:
            cache[counts] = tail_prob(build_spectrum(InputType(counts), w), functional, threshold)
        total += cache[counts]
    return total / m - 2.0 ** (nu(n, w.output_size).log2_value - n * gamma)


def random_coding_bound(p: InputType, w: Channel, log2_size: float, gamma: float,
                        functional: str = "J", spectrum: Optional[Spectrum] = None) -> float:
    """Random-coding guarantee for a constant-composition code of type ``p``.

    ``Pr{ log2(M)/n >= f(P,V) - gamma } + c_n 2^{-n gamma}`` where
    ``c_n = kappa_n(|X|)`` for ``f = J`` and ``eta_n(|X|,|Y|)`` for ``f = I``.
    No clamping is applied.
    """
    n = p.n
    s = spectrum if spectrum is not None else build_spectrum(p, w)
    if functional == "J":
        const = kappa(n, w.input_size)
    elif functional == "I":
        const = eta(n, w.input_size, w.output_size)
    else:
        raise ValueError("functional must be 'J' or 'I'")
    return tail_prob(s, functional, log2_size / n + gamma) + 2.0 ** (const - n * gamma)
