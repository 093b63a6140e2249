"""Exact law of the conditional output type for a fixed input composition.

Sending any ``x`` of type ``P`` through ``W^n`` makes the conditional type
``V`` of the output a product of independent multinomials, one per used
input letter. A :class:`Spectrum` lists every reachable ``V`` with its exact
log2-probability and the three information functionals at ``(P, V)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional

import numpy as np
from scipy.special import gammaln

from .channel import Channel, joint_functionals
from .typeclass import (ConditionalType, InputType, composition_array,
                        log_cond_type_class_size)

FUNCTIONALS = ("underline_I", "J", "I")
_LN2 = np.log(2.0)


def log2sumexp(values) -> float:
    """``log2(sum(2**values))``, summing in descending order."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        return float("-inf")
    v = np.sort(v)[::-1]
    top = v[0]
    if top == -np.inf:
        return float("-inf")
    return float(top + np.log2(np.sum(np.exp2(v - top))))


def cond_type_log_prob(p: InputType, v: ConditionalType, w: Channel) -> float:
    """``log2 Pr{ V_{Y|x} = V }`` for any ``x`` of type ``p``; ``-inf`` if impossible."""
    if v.base != p:
        raise ValueError("conditional type does not match the input type")
    t = v.array
    if np.any((t > 0) & (w.matrix <= 0)):
        return float("-inf")
    log_w = np.where(t > 0, w.log2_matrix, 0.0)
    return log_cond_type_class_size(v).log2_value + float(np.sum(t * log_w))


@dataclass(frozen=True)
class SpectrumAtom:
    cond_type: ConditionalType
    log2_prob: float
    f_underline: float
    f_J: float
    f_I: float


@dataclass(eq=False)
class Spectrum:
    """Atoms of the conditional-type law, stored column-wise.

    ``tables[k]`` is the k-th conditional type as an ``|X| x |Y|`` count
    table; the remaining arrays are aligned with it. ``log2_floor`` records
    the pruning level used at construction (``None`` means exact).
    """

    base: InputType
    channel: Channel
    tables: np.ndarray
    log2_prob: np.ndarray
    f_underline: np.ndarray
    f_J: np.ndarray
    f_I: np.ndarray
    log2_floor: Optional[float] = None
    _cdf_cache: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.log2_prob)

    @property
    def atoms(self) -> Iterator[SpectrumAtom]:
        for k in range(len(self)):
            yield SpectrumAtom(ConditionalType(self.base, self.tables[k].tolist()),
                               float(self.log2_prob[k]), float(self.f_underline[k]),
                               float(self.f_J[k]), float(self.f_I[k]))

    def values(self, selector: str) -> np.ndarray:
        try:
            return {"underline_I": self.f_underline, "J": self.f_J, "I": self.f_I}[selector]
        except KeyError:
            raise ValueError(f"unknown functional {selector!r}; expected one of {FUNCTIONALS}") from None

    @cached_property
    def log2_total(self) -> float:
        return log2sumexp(self.log2_prob)

    def cdf(self, selector: str):
        """Sorted functional values and the log2 mass at or below each.

        Returns ``(values, log2_cum)`` with ``values`` ascending and
        ``log2_cum[i] = log2 Pr{f <= values[i]}``.
        """
        if selector not in self._cdf_cache:
            f = self.values(selector)
            order = np.argsort(f, kind="stable")
            fs = f[order]
            cum = np.logaddexp2.accumulate(self.log2_prob[order]) if len(fs) else np.empty(0)
            self._cdf_cache[selector] = (fs, cum)
        return self._cdf_cache[selector]

    def tail_at(self, selector: str, thresholds) -> np.ndarray:
        """Vectorised ``Pr{f <= t}`` for an array of thresholds.

        A threshold covering every atom returns exactly 1 rather than the
        rounded sum of the atom masses.
        """
        fs, cum = self.cdf(selector)
        idx = np.searchsorted(fs, np.asarray(thresholds, dtype=float), side="right")
        out = np.zeros(idx.shape)
        hit = idx > 0
        out[hit] = np.exp2(cum[idx[hit] - 1])
        out[idx == len(fs)] = 1.0 if len(fs) else 0.0
        return np.minimum(out, 1.0)


def _row_law(count: int, log_w_row: np.ndarray, floor: Optional[float]):
    """Histograms of one row and their multinomial log2-probabilities."""
    size = log_w_row.shape[0]
    if count == 0:
        return np.zeros((1, size), dtype=np.int64), np.zeros(1)
    hist = composition_array(count, size)
    uses_zero = np.any((hist > 0) & np.isneginf(log_w_row), axis=1)
    hist = hist[~uses_zero]
    coef = (gammaln(count + 1) - gammaln(hist + 1).sum(axis=1)) / _LN2
    lp = coef + np.where(hist > 0, hist * np.where(np.isneginf(log_w_row), 0.0, log_w_row), 0.0).sum(axis=1)
    if floor is not None:
        keep = lp >= floor
        hist, lp = hist[keep], lp[keep]
    return hist, lp


def build_spectrum(p: InputType, w: Channel, log2_floor: Optional[float] = None) -> Spectrum:
    """Enumerate the conditional-type law of ``Y^n`` given an ``x`` of type ``p``.

    Atoms of probability zero (those using a zero entry of ``W``) are
    skipped. With ``log2_floor`` set, atoms whose log2-probability is below
    it are dropped too; their combined mass is then at most
    ``|V_n(Y|P)| * 2**log2_floor``.
    """
    if p.size != w.input_size:
        raise ValueError(f"type {p} does not match an input alphabet of size {w.input_size}")
    log_w = w.log2_matrix
    idx = np.zeros((1, 0), dtype=np.int64)
    lp = np.zeros(1)
    rows = []
    for x, c in enumerate(p.counts):
        hist, row_lp = _row_law(c, log_w[x], log2_floor)
        rows.append(hist)
        lp = (lp[:, None] + row_lp[None, :]).ravel()
        idx = np.concatenate([np.repeat(idx, len(row_lp), axis=0),
                              np.tile(np.arange(len(row_lp)), len(idx))[:, None]], axis=1)
        if log2_floor is not None:
            keep = lp >= log2_floor
            lp, idx = lp[keep], idx[keep]
    tables = np.stack([rows[x][idx[:, x]] for x in range(p.size)], axis=1) if len(lp) else \
        np.zeros((0, p.size, w.output_size), dtype=np.int64)
    if len(lp):
        under, j, mi = joint_functionals(tables, w)
    else:
        under = j = mi = np.zeros(0)
    return Spectrum(p, w, tables, lp, under, j, mi, log2_floor)


def tail_prob(s: Spectrum, selector: str, threshold: float, comparison: str = "<=") -> float:
    """``Pr{f <= t}`` (or ``<``) under the spectrum, summed in the log domain.

    Atoms with ``f = -inf`` satisfy both comparisons for any finite ``t``.
    """
    f = s.values(selector)
    if comparison == "<=":
        mask = f <= threshold
    elif comparison == "<":
        mask = f < threshold
    else:
        raise ValueError(f"comparison must be '<=' or '<', got {comparison!r}")
    if len(mask) and mask.all():
        return 1.0
    return min(1.0, float(np.exp2(log2sumexp(s.log2_prob[mask]))))
