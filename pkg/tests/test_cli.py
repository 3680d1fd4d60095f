import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from unifbw.cli import main
from unifbw.el import log_ratio
from unifbw.model import Cell, Dataset, SimulationModel, sample


def _table(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def data_csv(tmp_path):
    path = tmp_path / "data.csv"
    sample(SimulationModel(), 200, 21).to_csv(path)
    return path


def test_simulate_and_config_override(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("sizes=50\nreps=4\nseed=9\n")
    out = tmp_path / "a.csv"
    assert main(["simulate", "--config", str(cfg), "--reps", "2", "--out", str(out)]) == 0
    rows = _table(out.read_text())
    assert len(rows) == 2 and rows[0]["n"] == "50"
    printed = _table(capsys.readouterr().out)
    assert list(printed[0]) == ["n", "median", "iqr", "flagged"]


def test_simulate_timing_fills_runtime(tmp_path):
    out = tmp_path / "t.csv"
    main(["simulate", "--sizes", "50", "--reps", "1", "--timing", "--out", str(out)])
    assert float(_table(out.read_text())[0]["runtime_ms"]) > 0


def test_calibrate(capsys):
    assert main(["calibrate", "--n", "300", "--reps", "5"]) == 0
    (row,) = _table(capsys.readouterr().out)
    assert float(row["h"]) == pytest.approx(300**-0.2)
    assert 0 <= float(row["coverage"]) <= 1


def test_sup_ratio_trend_out(tmp_path):
    out = tmp_path / "t1.csv"
    assert main(["theorem1-trend", "--sizes", "500,1000", "--z-points", "5", "--out", str(out)]) == 0
    rows = _table(out.read_text())
    assert [r["n"] for r in rows] == ["500", "1000"]


def test_el_stat_matches_library(data_csv, capsys, epa):
    assert main(["el-stat", "--input", str(data_csv), "--t", "1.5", "--z", "0.5", "--h", "0.3", "--theta", "0.5"]) == 0
    (row,) = _table(capsys.readouterr().out)
    sol = log_ratio(Dataset.from_csv(data_csv), Cell(1.5, 0.5, 0.3), 0.5, epa)
    assert float(row["log_r"]) == sol.log_r
    assert float(row["minus_2_log_r"]) == -2 * sol.log_r
    assert row["hull_ok"] == "1"


def test_el_stat_requires_one_centring(data_csv):
    with pytest.raises(SystemExit):
        main(["el-stat", "--input", str(data_csv), "--t", "1", "--z", ".5", "--h", ".3"])
    with pytest.raises(SystemExit):
        main(["el-stat", "--input", str(data_csv), "--t", "1", "--z", ".5", "--h", ".3", "--theta", ".2", "--model-centring"])


def test_el_stat_hull_failure(tmp_path, capsys):
    path = tmp_path / "d.csv"
    Dataset([0.1, 0.2, 0.3], [0.5, 0.51, 0.49]).to_csv(path)
    main(["el-stat", "--input", str(path), "--t", "1", "--z", ".5", "--h", ".2", "--model-centring"])
    (row,) = _table(capsys.readouterr().out)
    assert row["hull_ok"] == "0" and row["log_r"] == "-inf"


def test_cv_bandwidth(data_csv, capsys):
    assert main(["cv-bandwidth", "--input", str(data_csv), "--grid-size", "12"]) == 0
    rows = _table(capsys.readouterr().out)
    assert len(rows) == 12
    assert sum(r["selected"] == "1" for r in rows) == 1
    cvs = np.array([float(r["cv"]) for r in rows])
    chosen = next(j for j, r in enumerate(rows) if r["selected"] == "1")
    assert cvs[chosen] == np.nanmin(cvs)


def test_density_subcommand(tmp_path, capsys):
    src = tmp_path / "v.csv"
    src.write_text("value\n" + "\n".join(str(x) for x in np.random.default_rng(0).normal(size=50)) + "\n")
    out = tmp_path / "f.csv"
    assert main(["density", "--input", str(src), "--grid-points", "64", "--out", str(out)]) == 0
    rows = _table(out.read_text())
    assert len(rows) == 64 and list(rows[0]) == ["x", "fhat"]
    assert capsys.readouterr().out.startswith("bandwidth,")


def test_missing_input_is_error(tmp_path):
    assert main(["density", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o.csv")]) == 1


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    args = ["simulate", "--sizes", "50", "--reps", "2", "--seed", "3", "--out", str(out)]
    proc = subprocess.run([sys.executable, "-m", "unifbw.cli", *args], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().startswith("n,rep,sup_stat,hull_failures,runtime_ms\n")
