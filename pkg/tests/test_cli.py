import subprocess
import sys

import pytest

from xduplex import bench, cli
from xduplex.bench import MetricRecord

FAST = ["--snr-start", "20", "--snr-stop", "30", "--snr-step", "10", "--trials", "2000"]


def test_sweep_to_stdout(capsys):
    assert cli.main(["sweep", *FAST]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == ",".join(bench.CSV_COLUMNS)
    assert len(out) == 1 + 2 * 7


def test_sweep_to_file(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", *FAST, "--schemes", "xd,hy", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert [l.split(",")[1] for l in lines[1:]] == ["xd", "hy", "xd", "hy"]


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("snr_start = 0\nsnr_stop = 10\nsnr_step = 10\ntrials = 500\nschemes = xd\nseed = 3\n")
    assert cli.main(["sweep", "--config", str(cfg), "--seed", "8"]) == 0
    rows = capsys.readouterr().out.splitlines()[1:]
    assert len(rows) == 2 and all(r.split(",")[-2] == "8" for r in rows)


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--schemes", "xd,nope"],
        ["sweep", "--snr-start", "40", "--snr-stop", "10"],
        ["sweep", "--trials", "0"],
        ["sweep", "--trials", "lots"],
        ["figure", "bogus"],
        ["launch"],
        [],
    ],
)
def test_config_errors(argv, capsys):
    assert cli.main(argv) == 2


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("unknown = 1\n")
    assert cli.main(["sweep", "--config", str(cfg)]) == 2


def test_missing_config_file(tmp_path):
    assert cli.main(["sweep", "--config", str(tmp_path / "nope.cfg")]) == 3


def test_unwritable_output(tmp_path):
    target = tmp_path / "no" / "such" / "dir.csv"
    assert cli.main(["sweep", *FAST, "--out", str(target)]) == 3


def test_invariant_failure(monkeypatch, capsys):
    bad = MetricRecord(30.0, "xd", 1.5, 0.0, None, 0.1, 0.0, None, None, None, 1.0, 1, 1, "ok")
    monkeypatch.setattr(bench, "run_sweep", lambda config: [bad])
    assert cli.main(["sweep", *FAST]) == 1
    assert "outside [0, 1]" in capsys.readouterr().err


def test_xd_worse_than_baseline_is_flagged():
    xd = MetricRecord(30.0, "xd", 0.1, 0.0, None, 0.2, 0.0, None, None, None, 1.0, 1, 1, "ok")
    fd = MetricRecord(30.0, "fd-a", 0.1, 0.0, None, 0.1, 0.0, None, None, None, 1.0, 1, 1, "ok")
    assert cli.sweep_violations([xd, fd]) == ["xd worse than fd-a at 30 dB"]


@pytest.mark.parametrize("kind", ["ser", "outage", "diversity"])
def test_figure(kind, capsys):
    assert cli.main(["figure", kind, *FAST]) == 0
    header = capsys.readouterr().out.splitlines()[0]
    assert header.startswith("snr_db,xd_")


def test_selftest(capsys):
    assert cli.main(["selftest"]) == 0
    assert "selftest PASS" in capsys.readouterr().out


def test_selftest_failure(monkeypatch, capsys):
    report = bench.SelftestReport([bench.CheckResult("bessel_k1_oracle", False, 1e-6, 1e-9)])
    monkeypatch.setattr(bench, "selftest", lambda: report)
    assert cli.main(["selftest"]) == 1
    assert "[FAIL] bessel_k1_oracle" in capsys.readouterr().out


def test_modes(capsys):
    assert cli.main(["modes", *FAST]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "snr_db,fd_a,fd_b,hd_a,hd_b,fd_total"
    shares = [float(v) for v in lines[1].split(",")[1:5]]
    assert sum(shares) == pytest.approx(1.0, abs=1e-5)


def test_help_exits_zero(capsys):
    assert cli.main(["--help"]) == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "xduplex", "sweep", "--schemes", "hy", "--snr-start", "0", "--snr-stop", "1", "--trials", "10"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.count("\n") == 2
