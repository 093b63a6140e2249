"""Types, conditional types, and exact type-class sizes.

An input type at blocklength ``n`` is an integer histogram over the input
alphabet; a conditional type given it is a table whose row ``x`` is a
histogram over the output alphabet summing to ``counts[x]``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from .channel import mean_cost

LOG2E = math.log2(math.e)
EXACT_LIMIT = 64


@dataclass(frozen=True)
class InputType:
    """Composition ``counts`` of a length-``n`` input sequence."""

    counts: tuple

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if not counts or any(c < 0 for c in counts):
            raise ValueError(f"type counts must be nonnegative, got {self.counts}")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def size(self) -> int:
        return len(self.counts)

    @property
    def distribution(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.n

    @property
    def active(self) -> tuple:
        return tuple(x for x, c in enumerate(self.counts) if c > 0)

    def __str__(self):
        return "(" + ",".join(map(str, self.counts)) + ")"

    @classmethod
    def parse(cls, text: str, n: Optional[int] = None, size: Optional[int] = None) -> "InputType":
        """Read ``"8,8"`` or ``"(8,8)"``; checks ``n`` and ``size`` when given."""
        body = text.strip().strip("()[]")
        try:
            counts = tuple(int(s) for s in body.replace(";", ",").split(",") if s.strip())
        except ValueError as exc:
            raise ValueError(f"cannot parse type {text!r}") from exc
        t = cls(counts)
        if n is not None and t.n != n:
            raise ValueError(f"type {t} sums to {t.n}, expected n={n}")
        if size is not None and t.size != size:
            raise ValueError(f"type {t} has {t.size} entries, expected {size}")
        return t


@dataclass(frozen=True)
class ConditionalType:
    """Joint type given its input marginal: ``table[x, y] = n(x, y)``."""

    base: InputType
    table: tuple

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        object.__setattr__(self, "table", table)
        if len(table) != self.base.size:
            raise ValueError("conditional type has wrong number of rows")
        for x, row in enumerate(table):
            if any(v < 0 for v in row) or sum(row) != self.base.counts[x]:
                raise ValueError(f"row {x} of {table} does not sum to {self.base.counts[x]}")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.table, dtype=np.int64)

    @property
    def conditional(self) -> np.ndarray:
        """Rows ``V(.|x)``; rows of unused inputs are left at zero."""
        t = self.array.astype(float)
        c = np.asarray(self.base.counts, dtype=float)[:, None]
        return np.divide(t, c, out=np.zeros_like(t), where=c > 0)


@dataclass(frozen=True)
class LogCount:
    """A positive integer carried as ``log2`` and, when small enough, exactly."""

    log2_value: float
    exact_value: Optional[int] = None

    @classmethod
    def from_int(cls, value: int) -> "LogCount":
        return cls(math.log2(value), value)

    def __float__(self):
        return self.log2_value


def compositions(n: int, k: int) -> Iterator[tuple]:
    """All length-``k`` nonnegative integer tuples summing to ``n``.

    First coordinate descending, then recursively; e.g. ``(2,0),(1,1),(0,2)``.
    """
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


@lru_cache(maxsize=4096)
def composition_array(n: int, k: int) -> np.ndarray:
    """``compositions(n, k)`` as a read-only ``(count, k)`` int array."""
    if k == 1:
        out = np.array([[n]], dtype=np.int64)
    else:
        blocks = []
        for first in range(n, -1, -1):
            rest = composition_array(n - first, k - 1)
            blocks.append(np.column_stack([np.full(len(rest), first, dtype=np.int64), rest]))
        out = np.vstack(blocks)
    out.setflags(write=False)
    return out


def enumerate_input_types(n: int, size: int, cost: Optional[Sequence[float]] = None,
                          budget: Optional[float] = None) -> list:
    """Types in ``P_n(X)`` whose mean cost is at most ``budget``.

    ``budget=None`` keeps every type. The result may be empty.
    """
    if n < 1:
        raise ValueError("blocklength must be positive")
    if budget is not None and cost is None:
        raise ValueError("a cost vector is required with a budget")
    out = []
    for counts in compositions(n, size):
        if budget is not None and mean_cost(np.asarray(counts) / n, cost) > budget + 1e-12:
            continue
        out.append(InputType(counts))
    return out


def enumerate_conditional_types(p: InputType, output_size: int) -> Iterator[ConditionalType]:
    """Lazily yield every conditional type in ``V_n(Y|P)``."""
    rows = [list(compositions(c, output_size)) if c > 0 else [(0,) * output_size]
            for c in p.counts]
    for table in itertools.product(*rows):
        yield ConditionalType(p, table)


def count_conditional_types(p: InputType, output_size: int) -> int:
    """``|V_n(Y|P)|`` exactly: a product of per-row stars-and-bars counts."""
    return math.prod(math.comb(c + output_size - 1, output_size - 1) for c in p.counts)


def _log2_multinomial(total: int, parts: Sequence[int]) -> LogCount:
    if total <= EXACT_LIMIT:
        value = math.factorial(total)
        for k in parts:
            value //= math.factorial(k)
        return LogCount.from_int(value)
    ln = math.lgamma(total + 1) - sum(math.lgamma(k + 1) for k in parts)
    return LogCount(ln * LOG2E)


def log_type_class_size(p: InputType) -> LogCount:
    """``|T_P| = n! / prod_x counts[x]!``."""
    return _log2_multinomial(p.n, p.counts)


def log_cond_type_class_size(v: ConditionalType) -> LogCount:
    """``|T_V(x)| = prod_x counts[x]! / prod_y table[x,y]!`` for any x of type P."""
    parts = [_log2_multinomial(c, row) for c, row in zip(v.base.counts, v.table)]
    if all(pt.exact_value is not None for pt in parts):
        return LogCount.from_int(math.prod(pt.exact_value for pt in parts))
    return LogCount(sum(pt.log2_value for pt in parts))


def nu(n: int, a: int) -> LogCount:
    """``binom(n + a - 1, a - 1)``: the number of types on an ``a``-letter alphabet."""
    return LogCount.from_int(math.comb(n + a - 1, a - 1))


def kappa(n: int, a: int) -> float:
    """``log2`` of ``e^(a/12) (2 pi n)^((a-1)/2)``."""
    return LOG2E * a / 12.0 + 0.5 * (a - 1) * math.log2(2.0 * math.pi * n)


def eta(n: int, a: int, b: int) -> float:
    """``log2`` of ``kappa_n(a) * nu_n(a b)``."""
    return kappa(n, a) + nu(n, a * b).log2_value
