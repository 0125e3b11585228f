import csv
import io

import pytest

from twistlab import cache
from twistlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, list(csv.DictReader(io.StringIO(out.out))), out.err


def write_cfg(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_tabulate(capsys):
    code, rows, _ = run(capsys, "tabulate", "tau", "--N", "5")
    assert code == 0
    assert [int(r["a"]) for r in rows] == [1, -24, 252, -1472, 4830]
    code, rows, _ = run(capsys, "tabulate", "kloosterman", "--d", "2", "--p", "13")
    assert code == 0 and len(rows) == 13
    code, _, err = run(capsys, "tabulate", "kloosterman")
    assert code == 2 and "--p" in err


def test_small_commands(capsys):
    code, rows, _ = run(capsys, "ft", "--family", "kl:2", "--q0", "13")
    assert code == 0 and len(rows) == 13
    code, rows, _ = run(capsys, "sum", "--q0", "13", "--q1", "7", "--X", "100")
    assert code == 0 and float(rows[0]["S_abs"]) < float(rows[0]["bound_thm1"])
    code, rows, _ = run(capsys, "corr", "--q0", "13", "--r1", "1", "--r2", "1", "--p1", "2", "--p2", "3",
                        "--n", "5", "--q1", "1")
    assert code == 0 and rows[0]["poles"] == "1"
    code, rows, _ = run(capsys, "delta-check", "--p", "3", "--q0", "5", "--span", "1")
    assert code == 0 and all(abs(float(r["value"]) - int(r["expected"])) < 1e-12 for r in rows)
    code, rows, _ = run(capsys, "ftq0-check", "--q0", "13", "--q1", "7", "--m", "2", "--mp", "3", "--c", "2",
                        "--cp", "3", "--delta", "4")
    assert code == 0 and float(rows[0]["rel_diff"]) < 1e-9


def test_errors_and_exit_codes(capsys):
    assert run(capsys, "rs-sum", "--q0", "13", "--q1", "5", "--X", "100")[0] == 3
    assert run(capsys, "ft", "--family", "kl:2", "--q0", "12")[0] == 1
    assert run(capsys, "sweep")[0] == 2
    assert run(capsys, "--threads", "0", "ft", "--q0", "13")[0] == 2


def test_sweep_and_global_flag_positions(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "s.cfg", "kind = sweep-thm1\nq0 = 101\nq1 = 7\nx-values = 100, 300\ntiming = false\n")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["--config", cfg, "--threads", "1", "sweep", "--output", str(out1)]) == 0
    assert main(["sweep", "--config", cfg, "--threads", "8", "--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    bad = write_cfg(tmp_path / "t.cfg", "kind = sweep-thm2\nq0 = 13\nq1 = 5\nx-values = 100\n")
    assert main(["sweep", "--config", bad, "--output", str(tmp_path / "c.csv")]) == 3
    assert main(["sweep", "--config", write_cfg(tmp_path / "u.cfg", "kind = sweep\n")]) == 2


def test_config_output_used(tmp_path):
    dest = tmp_path / "out" / "h.csv"
    cfg = write_cfg(tmp_path / "h.cfg", f"kind = sqrtcancel-histogram\nq0-list = 13\ndraws = 5\nzz-draws = 2\n"
                                        f"resonant-draws = 1\noutput = {dest}\n")
    assert main(["histogram", "--config", cfg, "--seed", "5"]) == 0
    text = dest.read_text()
    assert text.startswith("row_type,q0") and ",5," in text
    assert main(["histogram", "--config", write_cfg(tmp_path / "x.cfg", "kind = sweep-thm1\n")]) == 2


def test_cache_commands(tmp_path, capsys):
    assert main(["tabulate", "tau", "--N", "50", "--cache-dir", str(tmp_path)]) == 0
    capsys.readouterr()
    code, rows, _ = run(capsys, "cache", "info", "--cache-dir", str(tmp_path))
    assert code == 0 and rows[0]["records"] == "51" and rows[0]["status"] == "ok"
    broken = tmp_path / "broken.twl"
    broken.write_bytes(cache.encode(cache.KIND_FLOAT, [1.0])[:-1])
    code, rows, _ = run(capsys, "cache", "verify", "--cache-dir", str(tmp_path))
    assert code == 4
    assert {r["path"].rsplit("/", 1)[-1]: r["status"] for r in rows} == {
        "broken.twl": "ChecksumMismatch", "tau_N50.twl": "ok"}
    assert run(capsys, "cache", "info", str(broken))[0] == 4
    assert run(capsys, "cache", "info")[0] == 2


def test_help(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    assert "voronoi-check" in capsys.readouterr().out
