"""Command line entry point: ``fctsolve --start N --count K ...``."""

import argparse
import logging
import sys

from . import model, report
from .factorization import DEFAULT_FACTOR_LIMIT
from .harness import BatchConfig, run_batch
from .strategies import (
    DEFAULT_DEPTH,
    DEFAULT_FX_MAX_K,
    DEFAULT_GRID_SIZE,
    InconsistencyError,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURES = 2
EXIT_INCONSISTENT = 3

log = logging.getLogger("fctsolve")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonnegative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def build_parser():
    ap = _Parser(prog="fctsolve", description="Three-term Egyptian fractions 4/p = 1/x + 1/y + 1/z by ceiling continued fractions.")
    ap.add_argument("--start", type=_positive, default=10**6, help="first candidate (inclusive)")
    ap.add_argument("--count", type=_positive, default=1000, help="number of primes to solve")
    ap.add_argument("--depth", type=_nonnegative, default=DEFAULT_DEPTH, help="source budget M")
    ap.add_argument("--factor-limit", type=_positive, default=DEFAULT_FACTOR_LIMIT)
    ap.add_argument("--grid-size", type=_nonnegative, default=DEFAULT_GRID_SIZE, help="congruence grid pairs (0 disables)")
    ap.add_argument("--all-4k1", action="store_true", help="every prime = 1 (mod 4), not only Mordell-type")
    ap.add_argument("--fx-max-k", type=_nonnegative, default=DEFAULT_FX_MAX_K)
    ap.add_argument("--workers", type=_positive, default=1)
    ap.add_argument("--format", choices=("csv", "json", "text"), default="csv")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--figures", metavar="DIR", help="also render PNG figures into DIR")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized primality rounds")
    ap.add_argument("--no-timings", action="store_true", help="zero wall-clock fields for reproducible output")
    ap.add_argument("--model-table", action="store_true", help="print the expected-failure table and exit")
    ap.add_argument("--verify-file", metavar="CSV", help="re-verify a previously emitted CSV and exit")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _write(data, path):
    if path:
        with open(path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def model_table_text(fmt="text"):
    rows = model.table_compare()
    reading, errors = model.best_vaughan_reading()
    if fmt == "csv":
        lines = ["M,range,sample,fct,fct_paper,fct_rel_error,vaughan,vaughan_paper,vaughan_literal"]
        for r in rows:
            lines.append(
                f"{r.depth},1e{r.range_exp},1e{r.sample_exp},{r.fct:.6g},{r.paper_fct:.6g},"
                f"{r.fct_rel_error:.4f},{r.vaughan:.6g},{r.paper_vaughan:.6g},{r.vaughan_literal:.6g}"
            )
        return "\n".join(lines) + "\n"
    out = [f"{'M':>4} {'range':>6} {'N':>6} {'FCT':>11} {'paper':>10} {'rel.err':>8} {'Vaughan':>11} {'paper':>10}"]
    for r in rows:
        out.append(
            f"{r.depth:>4} {'1e%d' % r.range_exp:>6} {'1e%d' % r.sample_exp:>6} {r.fct:>11.3g} "
            f"{r.paper_fct:>10.3g} {r.fct_rel_error:>8.3f} {r.vaughan:>11.3g} {r.paper_vaughan:>10.3g}"
        )
    out.append("")
    out.append(f"Vaughan column reading: {reading[0]} log of {reading[1]} "
               f"(max |log10 error| {errors[reading]:.2g})")
    for key, err in sorted(errors.items(), key=lambda kv: kv[1]):
        out.append(f"  {key[0]:>6} {key[1]:>6}  max |log10 error| {err:.3g}")
    return "\n".join(out) + "\n"


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")

    if args.model_table:
        _write(model_table_text(args.format).encode("utf-8"), args.out)
        if args.figures:
            model_path = report.render_model_figure(args.figures)
            log.info("wrote %s", model_path)
        return EXIT_OK

    if args.verify_file:
        try:
            checked, bad = report.verify_rows(report.read_csv_rows(args.verify_file))
        except (OSError, KeyError, ValueError) as exc:
            print(f"fctsolve: cannot verify {args.verify_file}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(f"checked {checked} rows, {len(bad)} bad")
        for p in bad:
            print(f"  BAD {p}")
        return EXIT_INCONSISTENT if bad else EXIT_OK

    config = BatchConfig(
        range_start=args.start,
        count=args.count,
        depth_M=args.depth,
        factor_limit=args.factor_limit,
        grid_size=args.grid_size,
        mordell_only=not args.all_4k1,
        fx_max_k=args.fx_max_k,
        worker_count=args.workers,
        output_format=args.format,
        seed=args.seed,
    )
    try:
        rep = run_batch(config)
    except InconsistencyError as exc:
        print(f"fctsolve: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    _write(report.emit_report(rep, args.format, timings=not args.no_timings), args.out)
    if args.figures:
        for path in report.render_figures(rep, args.figures):
            log.info("wrote %s", path)
    if rep.failures:
        log.warning("%d primes without a solution: %s", len(rep.failures),
                    " ".join(map(str, rep.failures[:20])))
        return EXIT_FAILURES
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
