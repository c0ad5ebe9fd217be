"""Command-line front end: ``analyze``, ``mc`` and ``run``.

Exit codes: 0 ok, 2 usage or configuration error, 3 at least one
replication hit the time limit, 4 output path not writable.
"""
import argparse
import contextlib
import csv
import io
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import analysis
from .config import ConfigError, parse_config
from .engine import RngStream
from .scenarios import run_replication, worst_decile_mean

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TIMEOUT = 3
EXIT_OUTPUT = 4


class UsageError(ValueError):
    pass


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".10g")
    return str(x)


def parse_range(text, integer=False):
    """``A``, ``A:B`` or ``A:B:step`` -> inclusive list of values."""
    parts = text.split(":")
    if not 1 <= len(parts) <= 3:
        raise UsageError(f"bad range {text!r}")
    try:
        conv = int if integer else float
        lo = conv(parts[0])
        hi = conv(parts[1]) if len(parts) > 1 else lo
        step = conv(parts[2]) if len(parts) > 2 else 1
    except ValueError:
        raise UsageError(f"bad range {text!r}") from None
    if step <= 0 or hi < lo:
        raise UsageError(f"bad range {text!r}")
    count = int(round((hi - lo) / step)) + 1
    vals = [lo + i * step for i in range(count) if lo + i * step <= hi + 1e-9]
    return [int(v) for v in vals] if integer else [round(v, 12) for v in vals]


def analyze_rows(ns, ms):
    width = max(ns)
    header = ["n", "m", "p_bo_n", "expected_redundant"] + [f"p_n_b{b}" for b in range(width)]
    rows = []
    for n in ns:
        for m in ms:
            res = analysis.analyze(n, m)
            pnb = [fmt(p) for p in res.p_n_b] + [""] * (width - n)
            rows.append([fmt(n), fmt(m), fmt(res.p_bo_n), fmt(res.expected_redundant)] + pnb)
    return header, rows


def mc_rows(n, m, reps, seed):
    res = analysis.mc_single_hop(n, m, reps, RngStream(seed, 0, 0))
    header = [
        "n", "m", "reps", "seed", "p_backoff", "p_backoff_se", "mean_b", "mean_b_se",
        "p_bo_n", "expected_redundant",
    ] + [f"freq_b{b}" for b in range(n)]
    row = [
        n, m, reps, seed, res.p_backoff, res.p_backoff_se, res.mean_b, res.mean_b_se,
        analysis.p_bo_n(n, m), analysis.expected_redundant(n, m),
    ] + list(res.freq)
    return header, [[fmt(x) for x in row]]


RUN_HEADER = [
    "rep", "seed", "delay_ms", "updated_interval_per_sink", "tx", "rtx", "csma_drops",
    "cleansing_drops", "mean_queue_ms", "suppressions", "timed_out",
]
_NUMERIC = ["delay_ms", "tx", "rtx", "csma_drops", "cleansing_drops", "mean_queue_ms", "suppressions"]


def metrics_row(m):
    sinks = ";".join(f"{s}={m.updated_interval.get(s, -1)}" for s in m.sinks)
    return {
        "rep": m.rep,
        "seed": m.seed,
        "delay_ms": m.update_delay / 1000,
        "updated_interval_per_sink": sinks,
        "tx": m.tx_count,
        "rtx": m.rtx_count,
        "csma_drops": m.csma_drops,
        "cleansing_drops": m.cleansing_drops,
        "mean_queue_ms": m.mean_queue_time / 1000,
        "suppressions": m.suppressions,
        "timed_out": m.timed_out,
    }


def _one(args):
    cfg, seed, rep = args
    return run_replication(cfg, seed=seed, rep=rep)


def run_rows(cfg, reps, seed, workers=1):
    jobs = [(cfg, seed, r) for r in range(reps)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_one, jobs))
    else:
        results = [_one(j) for j in jobs]
    rows = [metrics_row(m) for m in results]
    out = [[fmt(r[h]) for h in RUN_HEADER] for r in rows]
    summary = {
        "mean": lambda v: float(np.mean(v)),
        "std": lambda v: float(np.std(v)),
        "worst_decile": worst_decile_mean,
    }
    for label, fn in summary.items():
        line = {h: "" for h in RUN_HEADER}
        line["rep"] = label
        line["seed"] = fmt(seed)
        for h in _NUMERIC:
            line[h] = fmt(fn([r[h] for r in rows]))
        line["timed_out"] = fmt(sum(r["timed_out"] for r in rows))
        out.append([line[h] for h in RUN_HEADER])
    return RUN_HEADER, out, results


def render_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


@contextlib.contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_csv(path, header, rows):
    text = render_csv(header, rows)
    try:
        with _open_out(path) as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="tricklesim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    a = sub.add_parser("analyze", help="closed-form back-off probabilities over an (n, m) grid")
    a.add_argument("--n", required=True, help="A:B node counts (inclusive)")
    a.add_argument("--m", required=True, help="C:D[:step] ratios I_min / w (inclusive)")
    a.add_argument("--out", default="-")

    mc = sub.add_parser("mc", help="Monte Carlo estimate of the single-hop back-off model")
    mc.add_argument("--n", type=int, required=True)
    mc.add_argument("--m", type=float, required=True)
    mc.add_argument("--reps", type=int, default=1_000_000)
    mc.add_argument("--seed", type=int, default=1)
    mc.add_argument("--out", default="-")

    r = sub.add_parser("run", help="discrete-event replications of a scenario file")
    r.add_argument("--config", required=True)
    r.add_argument("--reps", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--out", default="-")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.cmd == "analyze":
            ns = parse_range(args.n, integer=True)
            ms = parse_range(args.m)
            if min(ns) < 2 or min(ms) < 2:
                raise UsageError("need n >= 2 and m >= 2")
            return write_csv(args.out, *analyze_rows(ns, ms))
        if args.cmd == "mc":
            if args.reps < 1:
                raise UsageError("--reps must be >= 1")
            if args.n < 2 or args.m < 2:
                raise UsageError("need n >= 2 and m >= 2")
            return write_csv(args.out, *mc_rows(args.n, args.m, args.reps, args.seed))
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        cfg = parse_config(text, reps=args.reps, seed=args.seed)
        header, rows, results = run_rows(cfg, cfg.reps, cfg.seed, args.workers)
        code = write_csv(args.out, header, rows)
        if code:
            return code
        return EXIT_TIMEOUT if any(m.timed_out for m in results) else EXIT_OK
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
