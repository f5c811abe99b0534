import json
import math

import pytest
import sympy

from fctsolve import report
from fctsolve.cli import EXIT_FAILURES, EXIT_INCONSISTENT, EXIT_OK, EXIT_USAGE, main
from fctsolve.factorization import primes_up_to
from fctsolve.harness import (
    MORDELL_RESIDUES,
    BatchConfig,
    BatchReport,
    generate_primes,
    mordell_filter,
    next_candidate_prime,
    run_batch,
)
from fctsolve.model import p_f2_truncated

P_EX = 11756638905368616011414050501310355554617941987811609


@pytest.fixture(scope="module")
def small_report():
    return run_batch(BatchConfig(range_start=10**6, count=200))


def test_mordell_residues_are_squares_mod_840():
    squares = sorted({(r * r) % 840 for r in range(840) if math.gcd(r, 840) == 1})
    assert tuple(squares) == MORDELL_RESIDUES


def test_next_candidate_prime():
    assert next_candidate_prime(1000) == 1009
    assert next_candidate_prime(2, mordell_only=False) == 5
    q = next_candidate_prime(10**17)
    assert q > 10**17 and sympy.isprime(q) and mordell_filter(q)
    assert not any(sympy.isprime(n) and mordell_filter(n) for n in range(10**17 + 1, q))


def test_generate_primes_matches_sieve():
    got = generate_primes(BatchConfig(range_start=10**5, count=300))
    ref = [p for p in primes_up_to(2 * 10**6) if p >= 10**5 and mordell_filter(p)][:300]
    assert got == ref


def test_batch_config_validation():
    with pytest.raises(ValueError):
        BatchConfig(count=0)
    with pytest.raises(ValueError):
        BatchConfig(output_format="xml")


def test_run_batch_defaults_no_failures(small_report):
    rep = small_report
    assert rep.total_primes == 200
    assert rep.failures == []
    assert rep.max_depth_used <= 96
    assert math.isclose(rep.sieve_hit_rate * rep.total_primes, rep.per_strategy_counts["grid"])
    assert sum(rep.per_strategy_counts.values()) == rep.total_primes
    for rec in rep.records:
        assert rec.triple.verify()


def test_run_batch_golden_prime():
    rep = run_batch(BatchConfig(range_start=P_EX - 50, count=1))
    rec = rep.records[0]
    assert rec.p == P_EX and str(rec.source) == "f2.6"


def test_depth_zero_no_grid_all_fail():
    rep = run_batch(BatchConfig(range_start=10**6, count=50, depth_M=0, grid_size=0))
    assert len(rep.failures) == 50
    assert rep.per_strategy_counts["FAILURE"] == 50


def test_parallel_matches_serial():
    cfg = BatchConfig(range_start=10**6, count=120)
    one = run_batch(cfg)
    two = run_batch(BatchConfig(range_start=10**6, count=120, worker_count=3))
    for fmt in ("csv", "json"):
        assert report.emit_report(one, fmt, timings=False) == report.emit_report(two, fmt, timings=False)


def test_model_cross_check_m8():
    primes = [p for p in primes_up_to(10**7) if p >= 10**5 and mordell_filter(p)]
    rep = run_batch(BatchConfig(depth_M=8, count=len(primes)), primes=primes)
    predicted = math.fsum(p_f2_truncated(8, math.log(p)) for p in primes)
    assert len(rep.failures) <= 10 * predicted


# -- report ------------------------------------------------------------------


def test_empty_batch_header_only():
    data = report.emit_report(BatchReport.from_records([]), "csv")
    assert data == (",".join(report.COLUMNS) + "\n").encode()


def test_single_row_all_columns(small_report):
    one = BatchReport.from_records(small_report.records[:1])
    lines = report.emit_report(one, "csv").decode().splitlines()
    assert len(lines) == 2
    cells = lines[1].split(",")
    assert len(cells) == 10 and all(cells)


def test_json_round_trip(small_report):
    for timings in (True, False):
        data = report.emit_report(small_report, "json", timings)
        back = report.parse_json(data)
        assert report.emit_report(back, "json", timings) == data
        assert json.loads(data)["summary"]["total_primes"] == 200


def test_failure_rows_round_trip():
    rep = run_batch(BatchConfig(range_start=10**6, count=5, depth_M=0, grid_size=0))
    data = report.emit_report(rep, "json", timings=False)
    assert report.parse_json(data).failures == rep.failures


def test_text_summary(small_report):
    text = report.emit_report(small_report, "text").decode()
    assert "ms/p out of sieve" in text and "primes              200" in text


def test_rows_reverify(tmp_path, small_report):
    path = tmp_path / "out.csv"
    path.write_bytes(report.emit_report(small_report, "csv"))
    rows = report.read_csv_rows(path)
    checked, bad = report.verify_rows(rows)
    assert checked == 200 and bad == []
    rows[3]["z"] = str(int(rows[3]["z"]) + 1)
    assert report.verify_rows(rows)[1] == [rows[3]["p"]]


def test_figures_written(tmp_path, small_report):
    paths = report.render_figures(small_report, tmp_path)
    paths.append(report.render_model_figure(tmp_path))
    for path in paths:
        with open(path, "rb") as fh:
            assert fh.read(8) == b"\x89PNG\r\n\x1a\n"


# -- CLI ---------------------------------------------------------------------


def test_cli_batch_and_verify(tmp_path, capsys):
    out = tmp_path / "b.csv"
    figs = tmp_path / "figs"
    assert main(["--start", "1000000", "--count", "40", "--out", str(out),
                 "--figures", str(figs)]) == EXIT_OK
    assert out.read_text().startswith("p,strategy,")
    assert sorted(x.name for x in figs.iterdir()) == ["batch_depth.png", "batch_strategies.png"]
    assert main(["--verify-file", str(out)]) == EXIT_OK
    text = out.read_text().splitlines()
    cells = text[1].split(",")
    cells[5] = str(int(cells[5]) + 2)
    text[1] = ",".join(cells)
    out.write_text("\n".join(text) + "\n")
    assert main(["--verify-file", str(out)]) == EXIT_INCONSISTENT
    capsys.readouterr()


def test_cli_failures_exit_code(capsys):
    assert main(["--count", "3", "--depth", "0", "--grid-size", "0", "--no-timings"]) == EXIT_FAILURES
    assert capsys.readouterr().out.count("FAILURE") == 3


def test_cli_usage_errors(capsys):
    for argv in (["--count", "0"], ["--format", "xml"], ["--bogus"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == EXIT_USAGE
    assert main(["--verify-file", "/nonexistent/file.csv"]) == EXIT_USAGE
    capsys.readouterr()


def test_cli_model_table(capsys):
    assert main(["--model-table", "--format", "text"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Vaughan column reading: linear log of range" in out
    assert main(["--model-table", "--format", "csv"]) == EXIT_OK
    assert len(capsys.readouterr().out.strip().splitlines()) == 7
