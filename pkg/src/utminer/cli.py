"""Command-line entry point: ``utminer {mine,verify,sweep,gen}``."""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import logging
import sys
import time
from dataclasses import astuple, dataclass, fields

from .dataset import (
    DatabaseFormatError,
    TransactionDatabase,
    dump_database,
    format_results,
    generate_synthetic,
    read_database,
)
from .miner import mine_database
from .oracle import DEFAULT_MAX_ITEMS, OracleLimitError, mine_bruteforce
from .preprocess import resolve_threshold

log = logging.getLogger("utminer")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2
EXIT_IO = 3

STATS_HELP = """\
stats CSV columns, in order:
  algorithm, theta, num_itemsets, candidates, peak_local_nodes,
  elapsed_s, peak_rss_kb, num_tx, num_items, avg_len, total_utility
elapsed_s and peak_rss_kb are left empty with --no-timing; peak_rss_kb is the
process high-water mark as reported by getrusage (not portable).
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunStats:
    algorithm: str
    theta: int
    num_itemsets: int
    candidates: int
    peak_local_nodes: int
    elapsed_s: str
    peak_rss_kb: str
    num_tx: int
    num_items: int
    avg_len: str
    total_utility: int

    @classmethod
    def header(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def _peak_rss_kb() -> str:
    try:
        import resource
    except ImportError:
        return ""
    return str(resource.getrusage(resource.RUSAGE_SELF).ru_maxrss)


def run_algorithm(db: TransactionDatabase, theta: int, algo: str, max_items: int, timing: bool = True):
    """Mine ``db`` and return ``(itemsets, RunStats)``."""
    start = time.perf_counter()
    if algo == "utminer":
        result = mine_database(db, theta)
        itemsets, candidates, peak = result.itemsets, result.stats.candidates, result.stats.peak_local_nodes
    else:
        result = mine_bruteforce(db, theta, max_items=max_items)
        itemsets, candidates, peak = result.itemsets, result.evaluated, 0
    elapsed = time.perf_counter() - start
    stats = RunStats(
        algo, theta, len(itemsets), candidates, peak,
        f"{elapsed:.6f}" if timing else "",
        _peak_rss_kb() if timing else "",
        len(db.transactions), db.num_items, f"{db.avg_length:.4f}", db.total_utility,
    )
    return itemsets, stats


def _open_out(path):
    if path is None or path == "-":
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w", encoding="utf-8", newline="")


def _write_stats(path, rows: list[RunStats]) -> None:
    with _open_out(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RunStats.header())
        for row in rows:
            writer.writerow(astuple(row))


def _parse_thresholds(spec: str, db: TransactionDatabase) -> list[int]:
    """``20,17`` are absolute; ``0.5%,0.25%`` are percentages of total utility."""
    out = []
    for tok in spec.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            if tok.endswith("%"):
                out.append(resolve_threshold(db, float(tok[:-1])))
            else:
                out.append(int(tok))
        except ValueError as exc:
            raise UsageError(f"bad threshold {tok!r}: {exc}") from None
    if not out:
        raise UsageError("empty threshold list")
    return out


def _threshold(args, db: TransactionDatabase) -> int:
    if args.min_util is not None:
        theta = args.min_util
    elif args.min_util_pct is not None:
        try:
            theta = resolve_threshold(db, args.min_util_pct)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        raise UsageError("one of --min-util or --min-util-pct is required")
    if theta < 1:
        raise UsageError(f"minimum utility must be >= 1, got {theta}")
    return theta


def _check_thetas(thetas: list[int]) -> None:
    bad = [t for t in thetas if t < 1]
    if bad:
        raise UsageError(f"minimum utility must be >= 1, got {bad[0]}")


def cmd_mine(args) -> int:
    db = read_database(args.input)
    theta = _threshold(args, db)
    itemsets, stats = run_algorithm(db, theta, args.algo, args.max_items, timing=not args.no_timing)
    with _open_out(args.output) as fh:
        fh.write(format_results(itemsets, db.labels))
    if args.stats:
        _write_stats(args.stats, [stats])
    if args.dot:
        from .preprocess import compute_twu, prune_and_reorganize
        from .utree import build_tree

        tree = build_tree(prune_and_reorganize(db, compute_twu(db), theta))
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(tree.to_dot(db.labels))
    log.info("theta=%d itemsets=%d candidates=%d", theta, stats.num_itemsets, stats.candidates)
    return EXIT_OK


def _diff(fast: dict, slow: dict, db: TransactionDatabase) -> list[str]:
    lines = []
    for itemset in sorted(fast.keys() | slow.keys(), key=lambda s: (len(s), s)):
        a, b = fast.get(itemset), slow.get(itemset)
        if a != b:
            names = " ".join(db.label_itemset(itemset))
            lines.append(f"{{{names}}}: utminer={a} bruteforce={b}")
    return lines


def cmd_verify(args) -> int:
    db = read_database(args.input)
    if args.thresholds:
        thetas = _parse_thresholds(args.thresholds, db)
    else:
        thetas = [_threshold(args, db)]
    _check_thetas(thetas)
    status = EXIT_OK
    for theta in thetas:
        expected = mine_bruteforce(db, theta, max_items=args.max_items).itemsets
        got = mine_database(db, theta).itemsets
        diffs = _diff(got, expected, db)
        if diffs:
            status = EXIT_MISMATCH
            print(f"theta={theta}: MISMATCH ({len(diffs)} itemsets differ)")
            for line in diffs[:10]:
                print(f"  {line}")
        else:
            print(f"theta={theta}: OK ({len(got)} itemsets)")
    return status


def cmd_sweep(args) -> int:
    db = read_database(args.input)
    thetas = _parse_thresholds(args.thresholds, db)
    _check_thetas(thetas)
    if any(a < b for a, b in zip(thetas, thetas[1:])):
        raise UsageError("--thresholds must be in descending order")
    rows = []
    for theta in thetas:
        _, stats = run_algorithm(db, theta, args.algo, args.max_items, timing=not args.no_timing)
        rows.append(stats)
        log.info("theta=%d itemsets=%d candidates=%d", theta, stats.num_itemsets, stats.candidates)
    _write_stats(args.stats, rows)
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        db = generate_synthetic(args.tx, args.items, args.avg_len, args.seed, args.ext_mean, args.ext_sd)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.output is None or args.output == "-":
        buf = io.BytesIO()
        dump_database(db, buf)
        sys.stdout.buffer.write(buf.getvalue())
    else:
        with open(args.output, "wb") as fh:
            dump_database(db, fh)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="utminer",
        description="High-utility itemset mining with the Utility-Tree.",
        epilog=STATS_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, output=True):
        p.add_argument("--input", required=True, help="database in items:TU:utilities format")
        p.add_argument("--algo", choices=["utminer", "bruteforce"], default="utminer")
        p.add_argument("--max-items", type=int, default=DEFAULT_MAX_ITEMS,
                       help="item limit for the brute-force miner (default: %(default)s)")
        p.add_argument("--no-timing", action="store_true",
                       help="leave timing columns empty so stats files are reproducible")
        if output:
            p.add_argument("--output", help="result file (default: stdout)")

    def threshold(p, required):
        group = p.add_mutually_exclusive_group(required=required)
        group.add_argument("--min-util", type=int, help="absolute minimum utility")
        group.add_argument("--min-util-pct", type=float, help="minimum utility as %% of total utility")
        return group

    fmt = argparse.RawDescriptionHelpFormatter
    p = sub.add_parser("mine", help="mine high-utility itemsets", epilog=STATS_HELP, formatter_class=fmt)
    common(p)
    threshold(p, required=True)
    p.add_argument("--stats", help="write a one-row stats CSV here")
    p.add_argument("--dot", help="write the Utility-Tree as Graphviz DOT here")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("verify", help="compare utminer against brute force")
    common(p, output=False)
    group = threshold(p, required=False)
    group.add_argument("--thresholds", help="comma list; '%%' suffix marks a percentage")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="one stats row per threshold", epilog=STATS_HELP, formatter_class=fmt)
    common(p, output=False)
    p.add_argument("--thresholds", required=True,
                   help="descending comma list; '%%' suffix marks a percentage, e.g. 1%%,0.5%%")
    p.add_argument("--stats", help="stats CSV path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen", help="write a synthetic database")
    p.add_argument("--tx", type=int, required=True)
    p.add_argument("--items", type=int, required=True)
    p.add_argument("--avg-len", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ext-mean", type=float, default=5.0, help="mean of the per-item price")
    p.add_argument("--ext-sd", type=float, default=2.0, help="sd of the per-item price")
    p.add_argument("--output", help="database file (default: stdout)")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"utminer: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleLimitError as exc:
        print(f"utminer: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DatabaseFormatError as exc:
        print(f"utminer: {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"utminer: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
