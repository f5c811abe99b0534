"""CSV / JSON / text emission of batch reports, re-verification and figures."""

import csv
import io
import json
import math
import os

from .cf_core import three_term_check
from .harness import BatchReport
from .strategies import EgyptianTriple, SolutionRecord, SourceLabel

COLUMNS = (
    "p", "strategy", "source_index", "witness_divisor", "fourk",
    "x", "y", "z", "used_cofactor", "micros",
)


def record_row(rec, timings=True):
    micros = rec.micros if timings else 0
    if rec.failed:
        return {
            "p": rec.p, "strategy": "FAILURE", "source_index": "", "witness_divisor": "",
            "fourk": "", "x": "", "y": "", "z": "", "used_cofactor": "", "micros": micros,
        }
    t = rec.triple
    return {
        "p": rec.p,
        "strategy": rec.source.kind,
        "source_index": rec.source.index,
        "witness_divisor": rec.witness_divisor,
        "fourk": rec.fourk,
        "x": t.x,
        "y": t.y,
        "z": t.z,
        "used_cofactor": int(rec.used_cofactor),
        "micros": micros,
    }


def _summary(report):
    return {
        "total_primes": report.total_primes,
        "per_strategy_counts": report.per_strategy_counts,
        "depth_histogram": {str(k): v for k, v in report.depth_histogram.items()},
        "max_depth_used": report.max_depth_used,
        "failures": report.failures,
        "sieve_hit_rate": report.sieve_hit_rate,
        "total_time": report.total_time,
        "median_time": report.median_time,
        "median_out_of_sieve": report.median_out_of_sieve,
    }


def emit_csv(report, timings=True):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in report.records:
        writer.writerow(record_row(rec, timings))
    return buf.getvalue()


def emit_json(report, timings=True):
    rows = []
    for rec in report.records:
        row = {k: (None if v == "" else v) for k, v in record_row(rec, timings).items()}
        row["depth"] = rec.depth
        rows.append(row)
    summary = _summary(report)
    if not timings:
        for key in ("total_time", "median_time", "median_out_of_sieve"):
            summary[key] = 0.0
    return json.dumps({"summary": summary, "records": rows}, indent=1) + "\n"


def emit_text(report):
    ms = 1e3
    counts = report.per_strategy_counts
    lines = [
        f"primes              {report.total_primes}",
        f"total time          {report.total_time:.3f} s",
        f"time per prime      {report.median_time * ms:.4f} ms (median)",
        f"ms/p out of sieve   {report.median_out_of_sieve * ms:.4f} ms (median)",
        f"sieve hit rate      {report.sieve_hit_rate:.4f}",
        "strategies          " + "  ".join(f"{k}={v}" for k, v in counts.items()),
        f"max depth used      {report.max_depth_used}",
        f"failures            {len(report.failures)}",
    ]
    lines += [f"  FAILURE {p}" for p in report.failures]
    return "\n".join(lines) + "\n"


def emit_report(report, fmt="csv", timings=True):
    """Serialize a report as UTF-8 bytes.

    ``timings=False`` zeroes every wall-clock field, which makes the output a
    pure function of the batch configuration.
    """
    if fmt == "csv":
        text = emit_csv(report, timings)
    elif fmt == "json":
        text = emit_json(report, timings)
    elif fmt == "text":
        text = emit_text(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return text.encode("utf-8")


def row_to_record(row):
    row = {k: ("" if v is None else v) for k, v in row.items()}
    p = int(row["p"])
    depth = int(row.get("depth", 0) or 0)
    micros = int(row.get("micros") or 0)
    if row["strategy"] == "FAILURE":
        return SolutionRecord(p=p, micros=micros, depth=depth)
    fourk = int(row["fourk"])
    triple = EgyptianTriple(p, fourk, int(row["x"]), int(row["y"]), int(row["z"]))
    return SolutionRecord(
        p=p,
        source=SourceLabel(row["strategy"], int(row["source_index"])),
        witness_divisor=int(row["witness_divisor"]),
        fourk=fourk,
        coefficients=three_term_check(p, fourk) or (),
        triple=triple,
        used_cofactor=bool(int(row["used_cofactor"])),
        micros=micros,
        depth=depth,
    )


def parse_json(data):
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    doc = json.loads(data)
    return BatchReport.from_records([row_to_record(r) for r in doc["records"]])


def read_csv_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def fourk_from_witness(row):
    """4k implied by the witness column under the row's strategy."""
    p, w, i = int(row["p"]), int(row["witness_divisor"]), int(row["source_index"])
    kind = row["strategy"]
    if kind == "grid":
        return i
    if kind == "f1":
        return p + w
    if kind in ("f2", "f0"):
        return (p + w) // i
    if kind == "fx":
        return 4 * w
    raise ValueError(f"unknown strategy {kind!r}")


def verify_row(row):
    """True when a solved row satisfies 4xyz = p(yz + xz + xy) and its 4k is consistent."""
    if row["strategy"] == "FAILURE":
        return True
    p, x, y, z = (int(row[k]) for k in ("p", "x", "y", "z"))
    if 4 * x * y * z != p * (y * z + x * z + x * y):
        return False
    return fourk_from_witness(row) == int(row["fourk"])


def verify_rows(rows):
    """(checked, bad) where bad lists the primes whose rows fail."""
    bad = [row["p"] for row in rows if not verify_row(row)]
    return len(rows), bad


# -- figures -------------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_figures(report, out_dir, stem="batch"):
    """Depth histogram and per-strategy counts as PNG files; returns the paths."""
    plt = _pyplot()
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    fig, ax = plt.subplots(figsize=(6, 3.5))
    depths = sorted(report.depth_histogram)
    ax.bar(depths, [report.depth_histogram[d] for d in depths], color="0.3", width=0.8)
    ax.set_yscale("log")
    ax.set_xlabel("source depth")
    ax.set_ylabel("primes solved")
    ax.set_title(f"{report.total_primes} primes, {len(report.failures)} failures")
    fig.tight_layout()
    path = os.path.join(out_dir, f"{stem}_depth.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(6, 3.5))
    kinds = list(report.per_strategy_counts)
    ax.bar(kinds, [report.per_strategy_counts[k] for k in kinds], color="0.3")
    ax.set_yscale("symlog")
    ax.set_ylabel("primes")
    fig.tight_layout()
    path = os.path.join(out_dir, f"{stem}_strategies.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)
    return paths


def render_model_figure(out_dir, depths=range(2, 101), range_exps=(17, 52, 131)):
    """Per-prime truncated failure bound (1/M)^(ln p / 3) against M."""
    from .model import log_p_f2_truncated

    plt = _pyplot()
    os.makedirs(out_dir, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    depths = list(depths)
    for e in range_exps:
        ln_p = e * math.log(10)
        ax.plot(depths, [log_p_f2_truncated(m, ln_p) / math.log(10) for m in depths],
                label=f"p ~ 1e{e}")
    ax.set_xlabel("sources M")
    ax.set_ylabel("log10 P(failure)")
    ax.legend(frameon=False)
    fig.tight_layout()
    path = os.path.join(out_dir, "model_truncated_bound.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
