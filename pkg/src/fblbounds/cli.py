"""Command-line interface: ``fblbounds <subcommand> [options]``.

Exit codes: 0 success, 1 internal or check failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from contextlib import contextmanager
from dataclasses import asdict
from typing import Optional, Sequence

from . import bounds, codesim, selftest
from .channel import Channel, ChannelError, InfeasibleCostError, capacity
from .channelfile import load_channel
from .typeclass import InputType

ROW_FIELDS = ("n", "R", "Gamma", "variant", "value", "raw", "gamma_star", "type_star",
              "penalty_log2", "wall_time_ms")
RATE_HELP = "rate in bits per channel use"


class UsageError(Exception):
    pass


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--channel", metavar="FILE", default=d(None), help="channel file (YAML or JSON)")
    p.add_argument("--threads", metavar="N", type=int, default=d(1), help="worker cap")
    p.add_argument("--output", metavar="PATH", default=d(None), help="output file (default stdout)")


def _variants(text: str) -> list:
    names = [v.strip() for v in text.split(",") if v.strip()]
    bad = [v for v in names if v not in bounds.VARIANTS]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"unknown variant(s) {', '.join(bad) or '<empty>'}; choose from {', '.join(bounds.VARIANTS)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fblbounds",
        description="Finite-blocklength error bounds for discrete memoryless channels with input cost. "
                    "Rates are in bits per channel use.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="capacity-cost function")
    _global_flags(p, suppress=True)
    p.add_argument("--budget", type=float, default=None, help="cost budget Gamma")

    all_variants = ",".join(bounds.VARIANTS)
    p = sub.add_parser("bounds", help="converse and achievability bounds")
    _global_flags(p, suppress=True)
    p.add_argument("--n", type=int, required=True, help="blocklength")
    p.add_argument("--rate", type=float, required=True, help=RATE_HELP)
    p.add_argument("--budget", type=float, default=None, help="cost budget Gamma")
    p.add_argument("--variants", type=_variants, default=list(bounds.VARIANTS), help=f"subset of {all_variants}")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    p = sub.add_parser("sweep", help="bounds over a grid of n or R (CSV)")
    _global_flags(p, suppress=True)
    p.add_argument("--grid", required=True, help='"n=a:b:step" or "R=a:b:step" (inclusive)')
    p.add_argument("--n", type=int, default=None, help="fixed blocklength when sweeping R")
    p.add_argument("--rate", type=float, default=None, help=f"fixed {RATE_HELP} when sweeping n")
    p.add_argument("--budget", type=float, default=None, help="cost budget Gamma")
    p.add_argument("--variants", type=_variants, default=list(bounds.VARIANTS), help=f"subset of {all_variants}")

    p = sub.add_parser("simulate", help="random constant-composition code simulation (json-lines)")
    _global_flags(p, suppress=True)
    p.add_argument("--n", type=int, required=True, help="blocklength")
    p.add_argument("--type", dest="type_spec", required=True, help='input composition, e.g. "(8,8)"')
    p.add_argument("--rate", type=float, required=True, help=f"{RATE_HELP}; M = 2^floor(nR)")
    p.add_argument("--gamma", type=float, default=0.0, help="threshold margin for threshold_J")
    p.add_argument("--decoder", choices=codesim.Decoder.KINDS, default="threshold_J")
    p.add_argument("--trials", type=int, default=10_000, help="trials per batch")
    p.add_argument("--batches", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("selftest", help="run the bundled invariant suites")
    _global_flags(p, suppress=True)
    p.add_argument("--fault", choices=("kappa",), default=None, help=argparse.SUPPRESS)
    return parser


@contextmanager
def _open_output(path: Optional[str]):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _require_channel(args) -> Channel:
    if args.channel is None:
        raise UsageError("--channel FILE is required")
    try:
        return load_channel(args.channel)
    except OSError as exc:
        raise UsageError(f"cannot read channel file: {exc}") from None


def _row(res: bounds.BoundResult, ms: float) -> dict:
    q = res.query
    return {"n": q.n, "R": q.rate, "Gamma": q.budget, "variant": q.variant, "value": res.value,
            "raw": res.raw, "gamma_star": res.gamma_star, "type_star": str(res.type_star),
            "penalty_log2": res.penalty_log2, "wall_time_ms": ms}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _compute_rows(engine: bounds.BoundEngine, queries) -> list:
    rows = []
    for q in queries:
        t0 = time.perf_counter()
        res = engine.bound(q)
        rows.append(_row(res, (time.perf_counter() - t0) * 1e3))
    return rows


def _write_csv(fh, rows) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(ROW_FIELDS)
    for r in rows:
        writer.writerow([_fmt(r[k]) for k in ROW_FIELDS])


def parse_grid(text: str):
    """``"n=a:b:step"`` or ``"R=a:b:step"`` -> (axis, values), endpoints inclusive."""
    try:
        axis, rng = text.split("=", 1)
        a, b, step = rng.split(":")
        axis = axis.strip()
        if axis == "n":
            a, b, step = int(a), int(b), int(step)
            if step <= 0 or a < 1 or b < a:
                raise ValueError
            return axis, list(range(a, b + 1, step))
        if axis == "R":
            a, b, step = float(a), float(b), float(step)
            if not (step > 0 and a > 0 and b >= a):
                raise ValueError
            k = int(math.floor((b - a) / step + 1e-9))
            return axis, [round(a + i * step, 12) for i in range(k + 1)]
    except ValueError:
        pass
    raise UsageError(f"malformed grid {text!r}; expected n=a:b:step or R=a:b:step")


def cmd_capacity(args, out) -> int:
    ch = _require_channel(args)
    value, p = capacity(ch, args.budget)
    out.write(f"{value:.6f}\n")
    out.write("optimizer: " + " ".join(f"{lab}={q:.6f}" for lab, q in zip(ch.input_labels, p)) + "\n")
    return 0


def cmd_bounds(args, out) -> int:
    ch = _require_channel(args)
    engine = bounds.BoundEngine(ch)
    queries = [bounds.BoundQuery(args.n, args.rate, args.budget, v) for v in args.variants]
    rows = _compute_rows(engine, queries)
    if args.format == "csv":
        _write_csv(out, rows)
    else:
        for r in rows:
            out.write(json.dumps({k: _json_safe(r[k]) for k in ROW_FIELDS}) + "\n")
    return 0


def cmd_sweep(args, out) -> int:
    axis, values = parse_grid(args.grid)
    if axis == "R" and args.n is None:
        raise UsageError("sweeping R needs a fixed --n")
    if axis == "n" and args.rate is None:
        raise UsageError("sweeping n needs a fixed --rate")
    ch = _require_channel(args)
    engine = bounds.BoundEngine(ch)
    queries = []
    for v in values:
        n, r = (v, args.rate) if axis == "n" else (args.n, v)
        queries += [bounds.BoundQuery(n, r, args.budget, var) for var in args.variants]
    _write_csv(out, _compute_rows(engine, queries))
    return 0


def cmd_simulate(args, out) -> int:
    ch = _require_channel(args)
    try:
        p = InputType.parse(args.type_spec, n=args.n, size=ch.input_size)
    except ValueError as exc:
        raise UsageError(f"invalid type spec: {exc}") from None
    if args.trials < 1 or args.batches < 1:
        raise UsageError("--trials and --batches must be positive")
    m = 2 ** math.floor(args.n * args.rate)
    decoder = codesim.Decoder(args.decoder, args.gamma if args.decoder == "threshold_J" else None)
    cb = codesim.generate_codebook(args.n, p, m, args.seed)
    for b in range(args.batches):
        res = codesim.estimate_error(cb, ch, decoder, args.trials,
                                     seed=codesim._substream_seed(args.seed, b), workers=args.threads)
        out.write(json.dumps(asdict(res)) + "\n")
        out.flush()
    return 0


def cmd_selftest(args, out) -> int:
    ok = selftest.run_selftest(fault=args.fault, echo=lambda s: out.write(s + "\n"))
    out.write("selftest " + ("passed" if ok else "FAILED") + "\n")
    return 0 if ok else 1


COMMANDS = {"capacity": cmd_capacity, "bounds": cmd_bounds, "sweep": cmd_sweep,
            "simulate": cmd_simulate, "selftest": cmd_selftest}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return 2
    try:
        with _open_output(args.output) as out:
            return COMMANDS[args.command](args, out)
    except InfeasibleCostError as exc:
        msg = str(exc)
        if "infeasible cost budget" not in msg:
            msg = f"infeasible cost budget: {msg}"
        print(f"error: {msg}", file=sys.stderr)
        return 2
    except (UsageError, ChannelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
