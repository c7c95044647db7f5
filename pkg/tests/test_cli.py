import csv
import io
import json

import pytest

from dsicheck.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main


def test_catalog_json(capsys):
    assert main(["catalog", "--format", "json"]) == EXIT_PASS
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 11 and rows[0]["model"] == "PT"


def test_verify_passes(capsys):
    assert main(["verify", "--model", "PT", "--checks", "dsi,conventions"]) == EXIT_PASS
    assert "checks passed" in capsys.readouterr().out


def test_verify_fails_on_tight_tolerance(capsys):
    assert main(["verify", "--model", "PT", "--checks", "dsi", "--tol", "dsi=1e-300"]) == EXIT_FAIL


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--model", "NOPE"],
        ["verify", "--model", "PT", "--checks", "bogus"],
        ["verify", "--model", "PT", "--tol", "dsi"],
        ["verify", "--model", "PT", "--tol", "dsi=abc"],
        ["report", "/nonexistent/suite.toml"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as info:
        main(["verify", "--format", "xml"])
    assert info.value.code == 2


def test_spectrum_strict_flags_mismatch(capsys):
    assert main(["spectrum", "--model", "RM"]) == EXIT_PASS
    assert main(["spectrum", "--model", "RM", "--strict"]) == EXIT_FAIL
    assert main(["spectrum", "--model", "PT", "--strict"]) == EXIT_PASS


def test_eigen_csv(capsys, tmp_path):
    assert main(["eigen", "--model", "PT", "--n-max", "2", "--format", "csv", "--dat", str(tmp_path)]) == EXIT_PASS
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [r["n"] for r in rows] == ["0", "1", "2"]
    assert all(float(r["rel_error"]) < 1e-6 for r in rows)
    assert len(list(tmp_path.glob("*.dat"))) == 3


def test_series_csv(capsys):
    assert main(["series", "--format", "csv"]) == EXIT_PASS
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "N,error"
    assert float(lines[-1].split(",")[1]) < 1e-10


def test_report_subcommand(tmp_path):
    cfg = tmp_path / "suite.toml"
    out = tmp_path / "out.json"
    cfg.write_text(f'models = ["DRHO_EXT1"]\nchecks = ["dsi", "series"]\n[output]\npath = "{out}"\n')
    assert main(["report", str(cfg)]) == EXIT_PASS
    assert all(r["pass"] for r in json.loads(out.read_text()))
    meta = json.loads((tmp_path / "out.json.meta.json").read_text())
    assert "runtime_s" in meta
