"""Concrete codes: random constant-composition codebooks, the two universal
decoders, exact and Monte Carlo error probabilities, and numerical checks of
the random-coding guarantees and the meta-converse inequality.

Messages are numbered ``0 .. M-1``; a decoder failure is ``None`` for the
scalar decoders and ``-1`` in decision arrays.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .bounds import random_coding_bound
from .channel import Channel, joint_functionals
from .typeclass import InputType, compositions, log_type_class_size

MAX_EXACT_OUTPUTS = 2 ** 22
MMI_TIE_TOL = 1e-12
WILSON_Z = 1.959963984540054
_BATCH = 4096


@dataclass(frozen=True, eq=False)
class Codebook:
    """``M`` codewords of length ``n``, all of composition ``composition``."""

    words: np.ndarray
    composition: InputType
    seed: Optional[int] = None

    def __post_init__(self):
        words = np.atleast_2d(np.array(self.words, dtype=np.int64))
        if words.shape[0] < 1:
            raise ValueError("a codebook needs at least one codeword")
        target = np.asarray(self.composition.counts)
        for k, word in enumerate(words):
            if not np.array_equal(np.bincount(word, minlength=len(target)), target):
                raise ValueError(f"codeword {k} does not have composition {self.composition}")
        words.setflags(write=False)
        object.__setattr__(self, "words", words)

    @property
    def n(self) -> int:
        return self.words.shape[1]

    @property
    def M(self) -> int:
        return self.words.shape[0]


@dataclass(frozen=True)
class Decoder:
    """``kind`` is ``"threshold_J"`` (needs ``gamma``) or ``"mmi"``."""

    kind: str
    gamma: Optional[float] = None

    KINDS = ("threshold_J", "mmi")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown decoder {self.kind!r}")
        if self.kind == "threshold_J" and self.gamma is None:
            raise ValueError("the threshold decoder needs gamma")


@dataclass(frozen=True)
class SimResult:
    trials: int
    errors: int
    estimate: float
    wilson_upper_95: float
    decoder: str
    gamma: Optional[float] = None


def generate_codebook(n: int, p: InputType, M: int, seed: int) -> Codebook:
    """Draw ``M`` words independently and uniformly from the type class of ``p``.

    Each word is a seeded shuffle of the multiset fixed by ``p``, so it lies in
    the type class without rejection. Repeated words are allowed.
    """
    if p.n != n:
        raise ValueError(f"type {p} does not have blocklength {n}")
    if M < 1:
        raise ValueError("M must be positive")
    rng = np.random.default_rng(seed)
    base = np.repeat(np.arange(p.size), p.counts)
    words = rng.permuted(np.tile(base, (M, 1)), axis=1)
    return Codebook(words, p, seed)


def all_outputs(n: int, size: int) -> np.ndarray:
    """Every length-``n`` string over ``size`` letters, lexicographic."""
    total = size ** n
    if total > MAX_EXACT_OUTPUTS:
        raise ValueError(f"instance too large: {total} output strings")
    powers = size ** np.arange(n - 1, -1, -1)
    return (np.arange(total)[:, None] // powers) % size


def joint_tables(words, ys, input_size: int, output_size: int) -> np.ndarray:
    """Joint count tables of every (codeword, output) pair: ``(M, N, |X|, |Y|)``."""
    words = np.atleast_2d(words)
    ys = np.atleast_2d(ys)
    m, n = words.shape
    cells = input_size * output_size
    idx = words[:, None, :] * output_size + ys[None, :, :]
    flat = idx.reshape(-1, n) + (np.arange(idx.shape[0] * idx.shape[1]) * cells)[:, None]
    counts = np.bincount(flat.ravel(), minlength=flat.shape[0] * cells)
    return counts.reshape(m, ys.shape[0], input_size, output_size)


def _decide(words, ys, w: Channel, decoder: Decoder) -> np.ndarray:
    words = np.atleast_2d(words)
    m, n = words.shape
    out = np.empty(len(ys), dtype=np.int64)
    for start in range(0, len(ys), _BATCH):
        chunk = ys[start:start + _BATCH]
        tables = joint_tables(words, chunk, w.input_size, w.output_size)
        under, j, mi = joint_functionals(tables, w)
        if decoder.kind == "threshold_J":
            ok = j >= math.log2(m) / n + decoder.gamma
            hits = ok.sum(axis=0)
            dec = np.where(hits == 1, ok.argmax(axis=0), -1)
        else:
            top = mi.max(axis=0)
            ties = (mi >= top - MMI_TIE_TOL).sum(axis=0)
            dec = np.where(ties == 1, mi.argmax(axis=0), -1)
        out[start:start + _BATCH] = dec
    return out


def decode_many(cb: Union[Codebook, np.ndarray], ys, w: Channel, decoder: Decoder) -> np.ndarray:
    """Decisions for each row of ``ys``; ``-1`` marks failure."""
    words = cb.words if isinstance(cb, Codebook) else np.asarray(cb)
    return _decide(words, np.atleast_2d(np.asarray(ys, dtype=np.int64)), w, decoder)


def threshold_decode(cb: Codebook, y, gamma: float, w: Channel) -> Optional[int]:
    """The unique ``k`` with ``J(x(k); y | W) >= log2(M)/n + gamma``, else ``None``."""
    k = int(decode_many(cb, y, w, Decoder("threshold_J", gamma))[0])
    return None if k < 0 else k


def mmi_decode(cb: Codebook, y, w: Optional[Channel] = None) -> Optional[int]:
    """The unique maximiser of empirical mutual information, else ``None``.

    Values within ``MMI_TIE_TOL`` of the maximum count as ties. The channel is
    not used by the rule itself; a dummy one is built when omitted.
    """
    if w is None:
        nx = int(np.max(cb.words)) + 1
        ny = int(np.max(y)) + 1
        w = Channel(np.full((max(nx, 1), max(ny, 1)), 1.0 / max(ny, 1)))
    k = int(decode_many(cb, y, w, Decoder("mmi"))[0])
    return None if k < 0 else k


def log2_likelihoods(words, ys, w: Channel) -> np.ndarray:
    """``log2 W^n(y | x(k))`` for every codeword and output, shape ``(M, N)``."""
    words = np.atleast_2d(words)
    lw = w.log2_matrix
    return lw[words[:, None, :], np.atleast_2d(ys)[None, :, :]].sum(axis=-1)


def ml_decisions(words, w: Channel) -> np.ndarray:
    """Maximum-likelihood decision for every output string (lowest index on ties)."""
    words = np.atleast_2d(words)
    ys = all_outputs(words.shape[1], w.output_size)
    return np.argmax(log2_likelihoods(words, ys, w), axis=0)


def exact_error(cb: Union[Codebook, np.ndarray], w: Channel,
                decoder: Union[Decoder, Sequence[int], np.ndarray]) -> float:
    """Average error probability by enumerating every output string.

    ``decoder`` is either a :class:`Decoder` or an explicit decision array
    indexed like :func:`all_outputs` (entries ``-1`` mean failure).
    """
    words = np.atleast_2d(cb.words if isinstance(cb, Codebook) else np.asarray(cb, dtype=np.int64))
    m, n = words.shape
    ys = all_outputs(n, w.output_size)
    if isinstance(decoder, Decoder):
        dec = _decide(words, ys, w, decoder)
    else:
        dec = np.asarray(decoder, dtype=np.int64)
        if dec.shape != (len(ys),):
            raise ValueError(f"decision array must have length {len(ys)}")
    lik = np.exp2(log2_likelihoods(words, ys, w))
    correct = lik[dec, np.arange(len(ys))] * (dec >= 0)
    return float(min(1.0, max(0.0, 1.0 - correct.sum() / m)))


def wilson_interval(errors: int, trials: int, z: float = WILSON_Z):
    """Two-sided Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    phat = errors / trials
    denom = 1.0 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if errors == 0 else max(0.0, centre - half)
    hi = 1.0 if errors == trials else min(1.0, centre + half)
    return lo, hi


def _sample_batch(words, w: Channel, decoder: Decoder, size: int, seed: int, batch: int) -> int:
    rng = np.random.default_rng([seed, batch])
    m, n = words.shape
    k = rng.integers(m, size=size)
    u = rng.random((size, n))
    cdf = np.cumsum(w.matrix, axis=1)
    ys = (u[:, :, None] >= cdf[words[k]]).sum(axis=-1)
    ys = np.minimum(ys, w.output_size - 1)
    dec = _decide(words, ys, w, decoder)
    return int(np.count_nonzero(dec != k))


def estimate_error(cb: Union[Codebook, np.ndarray], w: Channel, decoder: Decoder, trials: int,
                   seed: int, workers: int = 1) -> SimResult:
    """Monte Carlo error estimate with a Wilson 95% interval.

    Trials are split into fixed batches, each with its own generator seeded by
    ``(seed, batch index)``, so the result does not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    words = np.atleast_2d(cb.words if isinstance(cb, Codebook) else np.asarray(cb, dtype=np.int64))
    sizes = [min(_BATCH, trials - s) for s in range(0, trials, _BATCH)]
    jobs = [(words, w, decoder, size, seed, b) for b, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = sum(pool.map(lambda a: _sample_batch(*a), jobs))
    else:
        errors = sum(_sample_batch(*a) for a in jobs)
    _, hi = wilson_interval(errors, trials)
    return SimResult(trials, errors, errors / trials, hi, decoder.kind, decoder.gamma)


@dataclass(frozen=True)
class AchievabilityReport:
    variant: str
    M: int
    bound: float
    min_error: float
    errors: tuple
    sigma: float
    violation: bool


def _substream_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)[0])


def check_random_coding(n: int, p: InputType, rate: float, gamma: float, w: Channel,
                        variant: str = "J", attempts: int = 32, trials: int = 10_000,
                        seed: int = 0, exact: bool = False,
                        workers: int = 1) -> AchievabilityReport:
    """Draw random constant-composition codes and compare with the guarantee.

    Uses ``M = 2**floor(n R)`` messages, the threshold decoder for ``J`` and
    the MMI decoder for ``I``. A violation is flagged when even the best of
    the ``attempts`` codes has error above the bound plus three binomial
    standard deviations.
    """
    if variant not in ("J", "I"):
        raise ValueError("variant must be 'J' or 'I'")
    log2_m = math.floor(n * rate)
    m = 2 ** log2_m
    bound = random_coding_bound(p, w, log2_m, gamma, variant)
    decoder = Decoder("threshold_J", gamma) if variant == "J" else Decoder("mmi")
    errs = []
    for a in range(attempts):
        cb = generate_codebook(n, p, m, _substream_seed(seed, a))
        if exact:
            errs.append(exact_error(cb, w, decoder))
        else:
            errs.append(estimate_error(cb, w, decoder, trials, _substream_seed(seed + 1, a), workers).estimate)
    best = min(errs)
    sigma = 0.0 if exact else math.sqrt(best * (1 - best) / trials)
    return AchievabilityReport(variant, m, bound, best, tuple(errs), sigma, best > bound + 3 * sigma)


@dataclass(frozen=True)
class MetaConverseReport:
    error: float
    union_prob: float
    L: int
    deltas: np.ndarray
    penalty: float
    rhs: float
    slack: float
    holds: bool


def type_class_q_family(n: int, output_size: int) -> np.ndarray:
    """One uniform law per output type class, as rows over :func:`all_outputs`."""
    ys = all_outputs(n, output_size)
    hist = np.stack([np.bincount(y, minlength=output_size) for y in ys]) if n else np.zeros((1, output_size))
    types = list(compositions(n, output_size))
    index = {t: i for i, t in enumerate(types)}
    q = np.zeros((len(types), len(ys)))
    for j, h in enumerate(hist):
        l = index[tuple(int(v) for v in h)]
        q[l, j] = 1.0
    sizes = np.array([float(log_type_class_size(InputType(t)).exact_value) for t in types])
    return q / sizes[:, None]


def code_output_distribution(words, w: Channel) -> np.ndarray:
    """Law of ``Y^n`` when the message is uniform over the codewords."""
    words = np.atleast_2d(words)
    ys = all_outputs(words.shape[1], w.output_size)
    return np.exp2(log2_likelihoods(words, ys, w)).mean(axis=0)


def check_meta_converse(words, decisions, w: Channel, gamma: float,
                        q_list: Optional[np.ndarray] = None, tol: float = 1e-12) -> MetaConverseReport:
    """Evaluate both sides of the meta-converse inequality exactly.

    With ``A_l = {(x, y): W^n(y|x) <= M 2^{-n gamma} Q_l(y)}`` this checks

        P_e >= Pr{ (X, Y) in union_l A_l } - L 2^{-n gamma}

    and ``Delta_l <= 2^{-n gamma}`` for each ``l``, where ``Delta_l`` is the
    probability of decoding correctly inside ``A_l``. ``deltas[0]`` is the
    probability of lying outside every ``A_l``. ``q_list`` defaults to one
    uniform law per output type class.
    """
    words = np.atleast_2d(np.asarray(words, dtype=np.int64))
    m, n = words.shape
    ys = all_outputs(n, w.output_size)
    dec = np.asarray(decisions, dtype=np.int64)
    q = type_class_q_family(n, w.output_size) if q_list is None else np.atleast_2d(q_list)
    lik = np.exp2(log2_likelihoods(words, ys, w))
    scale = m * 2.0 ** (-n * gamma)
    in_a = lik[None, :, :] <= scale * q[:, None, :]
    decoded_k = dec[None, :] == np.arange(m)[:, None]
    correct = lik * decoded_k
    union = in_a.any(axis=0)
    error = 1.0 - correct.sum() / m
    union_prob = float((lik * union).sum() / m)
    deltas = np.concatenate([[float((lik * ~union).sum() / m)],
                             (correct[None] * in_a).sum(axis=(1, 2)) / m])
    penalty = 2.0 ** (-n * gamma)
    rhs = union_prob - len(q) * penalty
    holds = bool(error >= rhs - tol and np.all(deltas[1:] <= penalty + tol)
                 and 1.0 - error <= deltas.sum() + tol)
    return MetaConverseReport(float(error), union_prob, len(q), deltas, penalty, float(rhs),
                              float(error - rhs), holds)
