"""Discrete memoryless channels with input cost and the Shannon quantities
evaluated on them.

All quantities are in bits. Distributions are plain 1-D numpy arrays and
conditional distributions are 2-D arrays whose row ``x`` is the law of the
output given input ``x``; rows whose input has zero probability are ignored.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

ROW_SUM_TOL = 1e-12


class ChannelError(ValueError):
    """Raised when a channel matrix or cost vector is malformed."""


class InfeasibleCostError(ValueError):
    """Raised when no input distribution (or type) meets the cost budget."""


def validate_channel(matrix, cost=None, tol: float = ROW_SUM_TOL) -> None:
    """Check that ``matrix`` is a stochastic matrix and ``cost`` is nonnegative.

    Raises :class:`ChannelError` describing the first violation found.
    """
    if isinstance(matrix, Channel):
        matrix, cost = matrix.matrix, matrix.cost
    w = np.asarray(matrix, dtype=float)
    if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
        raise ChannelError(f"channel matrix must be a non-empty 2-D array, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ChannelError("channel matrix has non-finite entries")
    for x, row in enumerate(w):
        for y, v in enumerate(row):
            if v < 0.0 or v > 1.0:
                raise ChannelError(f"entry ({x}, {y}) = {v:g} is outside [0, 1]")
        s = float(row.sum())
        if abs(s - 1.0) > tol:
            raise ChannelError(f"row {x} sums to {s:.12g}")
    if cost is not None:
        c = np.asarray(cost, dtype=float)
        if c.shape != (w.shape[0],):
            raise ChannelError(f"cost vector has shape {c.shape}, expected ({w.shape[0]},)")
        if not np.all(np.isfinite(c)):
            raise ChannelError("cost vector has non-finite entries")
        bad = np.flatnonzero(c < 0)
        if bad.size:
            raise ChannelError(f"cost of input {bad[0]} is negative ({c[bad[0]]:g})")


@dataclass(frozen=True, eq=False)
class Channel:
    """A DMC ``W(y|x)`` with a per-letter input cost ``c(x)``.

    Arrays are copied and made read-only on construction, so a channel can be
    shared freely between threads.
    """

    matrix: np.ndarray
    cost: Optional[np.ndarray] = None
    input_labels: Optional[tuple] = field(default=None)
    output_labels: Optional[tuple] = field(default=None)

    def __post_init__(self):
        w = np.array(self.matrix, dtype=float)
        if w.ndim != 2:
            raise ChannelError(f"channel matrix must be 2-D, got shape {w.shape}")
        c = np.zeros(w.shape[0]) if self.cost is None else np.array(self.cost, dtype=float)
        validate_channel(w, c)
        w.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "matrix", w)
        object.__setattr__(self, "cost", c)
        for name, size in (("input_labels", w.shape[0]), ("output_labels", w.shape[1])):
            labels = getattr(self, name)
            if labels is None:
                labels = tuple(str(i) for i in range(size))
            labels = tuple(str(s) for s in labels)
            if len(labels) != size:
                raise ChannelError(f"{name} has {len(labels)} entries, expected {size}")
            object.__setattr__(self, name, labels)

    @property
    def input_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def output_size(self) -> int:
        return self.matrix.shape[1]

    @property
    def log2_matrix(self) -> np.ndarray:
        """``log2 W(y|x)`` with ``-inf`` at structural zeros."""
        with np.errstate(divide="ignore"):
            return np.log2(self.matrix)

    def __repr__(self):
        return (f"Channel(|X|={self.input_size}, |Y|={self.output_size}, "
                f"matrix={self.matrix.tolist()}, cost={self.cost.tolist()})")


def bsc(p: float, cost: Optional[Sequence[float]] = None) -> Channel:
    """Binary symmetric channel with crossover probability ``p``."""
    return Channel(np.array([[1.0 - p, p], [p, 1.0 - p]]), cost)


ChannelLike = Union[Channel, np.ndarray]


def _matrix(w: ChannelLike) -> np.ndarray:
    return w.matrix if isinstance(w, Channel) else np.asarray(w, dtype=float)


def mean_cost(p, cost) -> float:
    """Average cost ``sum_x c(x) p(x)`` of an input distribution."""
    return float(np.dot(np.asarray(cost, dtype=float), np.asarray(p, dtype=float)))


def entropy(p) -> float:
    """Shannon entropy of ``p`` in bits."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def conditional_entropy(v, p) -> float:
    """``H(V|P) = sum_x P(x) H(V(.|x))``."""
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    return float(sum(px * entropy(v[x]) for x, px in enumerate(p) if px > 0))


def divergence_cond(v, w: ChannelLike, p) -> float:
    """Conditional divergence ``D(V||W|P)``; ``inf`` if V is not dominated by W."""
    v = np.asarray(v, dtype=float)
    w = _matrix(w)
    p = np.asarray(p, dtype=float)
    total = 0.0
    for x, px in enumerate(p):
        if px <= 0:
            continue
        for y in range(v.shape[1]):
            vxy = v[x, y]
            if vxy <= 0:
                continue
            if w[x, y] <= 0:
                return float("inf")
            total += px * vxy * np.log2(vxy / w[x, y])
    return float(total)


def divergence(p, q) -> float:
    """Relative entropy ``D(p||q)`` in bits."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    if np.any(q[mask] <= 0):
        return float("inf")
    return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))


def output_distribution(p, v: ChannelLike) -> np.ndarray:
    """Output marginal ``(PV)(y) = sum_x P(x) V(y|x)``."""
    p = np.asarray(p, dtype=float)
    v = _matrix(v)
    active = p > 0
    return p[active] @ v[active]


def mutual_info(p, v: ChannelLike) -> float:
    """``I(P, V) = H(PV) - H(V|P)``, clipped at zero against rounding."""
    v = _matrix(v)
    return max(0.0, entropy(output_distribution(p, v)) - conditional_entropy(v, p))


def functional_J(p, v, w: ChannelLike) -> float:
    """``J(P,V|W) = sum P(x) V(y|x) log W(y|x) / (PW)(y)``.

    Returns ``-inf`` when V puts mass where W has none.
    """
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    w = _matrix(w)
    pw = output_distribution(p, w)
    total = 0.0
    for x, px in enumerate(p):
        if px <= 0:
            continue
        for y in range(v.shape[1]):
            mass = px * v[x, y]
            if mass <= 0:
                continue
            if w[x, y] <= 0:
                return float("-inf")
            total += mass * np.log2(w[x, y] / pw[y])
    return float(total)


def functional_underline_I(p, v, w: ChannelLike) -> float:
    """``I(P,V) - D(V||W|P)``, the converse-side information functional."""
    d = divergence_cond(v, w, p)
    if d == float("inf"):
        return float("-inf")
    return mutual_info(p, v) - d


def joint_functionals(tables, w: ChannelLike):
    """Evaluate ``(underline_I, J, I)`` on a batch of joint count tables.

    Parameters
    ----------
    tables : array_like, shape (..., |X|, |Y|)
        Nonnegative joint counts (or joint probabilities); each table is
        normalised by its own total.
    w : Channel or array
        The reference channel.

    Returns
    -------
    under, j, i : ndarray, shape (...)
        ``-inf`` marks tables that use a zero entry of ``w``.
    """
    t = np.asarray(tables, dtype=float)
    w = _matrix(w)
    n = t.sum(axis=(-2, -1), keepdims=True)
    pxy = t / n
    px = pxy.sum(axis=-1, keepdims=True)
    py = pxy.sum(axis=-2, keepdims=True)
    pw = np.einsum("...xk,xy->...ky", px, w)
    pos = pxy > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        log_w = np.log2(w)
        i_terms = np.where(pos, pxy * np.log2(pxy / (px * py)), 0.0)
        u_terms = np.where(pos, pxy * (log_w - np.log2(py)), 0.0)
        j_terms = np.where(pos, pxy * (log_w - np.log2(pw)), 0.0)
    mi = np.maximum(i_terms.sum(axis=(-2, -1)), 0.0)
    under = u_terms.sum(axis=(-2, -1))
    j = j_terms.sum(axis=(-2, -1))
    bad = np.any(pos & (w <= 0), axis=(-2, -1))
    under = np.where(bad, -np.inf, under)
    j = np.where(bad, -np.inf, j)
    return under, j, mi


def _ba_fixed_point(w: np.ndarray, cost: np.ndarray, s: float, p0: np.ndarray,
                    tol: float, max_iter: int) -> np.ndarray:
    # Blahut-Arimoto for max_p I(p,W) - s E_p c (natural log inside). Stops on
    # the duality gap max_x(d_x - s c_x) - sum_x p_x(d_x - s c_x), which bounds
    # the distance to the optimum, so a stalled iterate cannot stop early.
    with np.errstate(divide="ignore", invalid="ignore"):
        log_w = np.where(w > 0, np.log(w), 0.0)
    p = p0
    gap_tol = tol * np.log(2)
    for _ in range(max_iter):
        q = p @ w
        with np.errstate(divide="ignore"):
            log_q = np.where(q > 0, np.log(q), 0.0)
        g = np.sum(w * (log_w - log_q), axis=1) - s * cost
        if g.max() - np.dot(p, g) < gap_tol:
            break
        logits = np.log(np.maximum(p, 1e-300)) + g
        logits[p <= 0] = -np.inf
        logits -= logits.max()
        p = np.exp(logits)
        p /= p.sum()
    return p


def capacity(ch: ChannelLike, budget: Optional[float] = None, *, tol: float = 1e-9,
             bisection_steps: int = 60, max_iter: int = 100_000):
    """Capacity-cost function ``C(Gamma|W)`` by Blahut-Arimoto.

    The cost constraint is enforced with a Lagrange multiplier located by
    bisection. ``budget=None`` means no constraint.

    Returns
    -------
    value : float
        Capacity in bits per channel use.
    p : ndarray
        A maximising input distribution.
    """
    if not isinstance(ch, Channel):
        ch = Channel(ch)
    w, cost = ch.matrix, ch.cost
    nx = ch.input_size
    if budget is not None and budget < cost.min() - 1e-12:
        raise InfeasibleCostError(
            f"infeasible cost budget {budget:g} < minimum input cost {cost.min():g}")

    uniform = np.full(nx, 1.0 / nx)
    p = _ba_fixed_point(w, cost, 0.0, uniform, tol, max_iter)
    if budget is None or mean_cost(p, cost) <= budget + 1e-12:
        return mutual_info(p, w), p

    cheapest = np.flatnonzero(cost <= cost.min() + 1e-12)
    if budget <= cost.min() + 1e-12:
        sub = w[cheapest]
        ps = _ba_fixed_point(sub, np.zeros(len(cheapest)),
                             0.0, np.full(len(cheapest), 1.0 / len(cheapest)), tol, max_iter)
        p = np.zeros(nx)
        p[cheapest] = ps
        return mutual_info(p, w), p

    lo, hi = 0.0, 1.0
    p_hi = _ba_fixed_point(w, cost, hi, uniform, tol, max_iter)
    for _ in range(200):
        if mean_cost(p_hi, cost) <= budget:
            break
        lo, hi = hi, 2.0 * hi
        p_hi = _ba_fixed_point(w, cost, hi, uniform, tol, max_iter)
    p_feasible = p_hi
    for _ in range(bisection_steps):
        mid = 0.5 * (lo + hi)
        p_mid = _ba_fixed_point(w, cost, mid, uniform, tol, max_iter)
        if mean_cost(p_mid, cost) <= budget:
            hi, p_feasible = mid, p_mid
        else:
            lo = mid
    return mutual_info(p_feasible, w), p_feasible
