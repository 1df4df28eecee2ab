import csv
import io
import json
import math
from pathlib import Path

import numpy as np
import pytest

from uavasym import analytic as an
from uavasym import cli
from uavasym import montecarlo as mc
from uavasym.config import SystemConfig
from uavasym.sweep import (
    CSV_COLUMNS,
    axis_values,
    point_record,
    run_altitude_sweep,
    run_distance_sweep,
    run_walk_demo,
)

GOLDEN = Path(__file__).parent / "golden" / "altitude_sweep_reduced.csv"


@pytest.fixture
def small():
    return SystemConfig(lambda_bar=2e-4, trials=40, seed=7)


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_golden_altitude_sweep(small):
    got = _rows(run_altitude_sweep(small, [30.0, 60.0, 90.0], 30.0).csv_text())
    want = _rows(GOLDEN.read_text())
    assert got[0] == want[0] == list(CSV_COLUMNS)
    assert len(got) == len(want)
    for g, w in zip(got[1:], want[1:]):
        np.testing.assert_allclose([float(x) for x in g], [float(x) for x in w], rtol=1e-9)


def test_sweep_is_reproducible(small):
    a = run_distance_sweep(small, [0.0, 50.0], 30.0).csv_text()
    b = run_distance_sweep(small, [0.0, 50.0], 30.0).csv_text()
    c = run_distance_sweep(small, [0.0, 50.0], 30.0, workers=2).csv_text()
    assert a == b == c


def test_dbm_columns_consistent(small):
    res = run_altitude_sweep(small, [40.0], 10.0)
    rec = res.records[0]
    assert rec["e_iul_dbm"] == pytest.approx(10 * math.log10(rec["e_iul_w"]) + 30, abs=1e-9)
    assert rec["e_idl_dbm"] == pytest.approx(10 * math.log10(rec["e_idl_w"]) + 30, abs=1e-9)
    assert rec["var_idl_db"] == pytest.approx(10 * math.log10(rec["var_idl_w2"]), abs=1e-9)


def test_single_point_matches_module_calls(small):
    c = small.with_(altitude=50.0)
    rec = point_record(c, 25.0, 50.0, small.trials, small.seed)
    m = an.moments(c, d=25.0)
    est = mc.estimate_ratio(c, d=25.0, trials=small.trials, seed=small.seed)
    cov = mc.estimate_cov(c, d=25.0, trials=small.trials, seed=small.seed)
    assert rec["rho_closed"] == m.rho_closed and rec["cov_closed"] == m.cov
    assert rec["rho_mc"] == est.rho_mc and rec["rho_mc_ci"] == est.ci_halfwidth
    assert rec["cov_mc"] == cov.cov


def test_sweep_reuse_matches_fresh_points(small):
    # the sweep shares the H-independent DL draw across points; a fresh
    # simulation at the last point must give the same record
    res = run_altitude_sweep(small, [30.0, 70.0], 20.0)
    fresh = point_record(small.with_(altitude=70.0), 20.0, 70.0, small.trials, small.seed)
    assert res.records[1] == fresh
    res = run_distance_sweep(small, [0.0, 60.0], 45.0)
    fresh = point_record(small.with_(altitude=45.0), 60.0, 60.0, small.trials, small.seed)
    assert res.records[1] == fresh


def test_distance_sweep_closed_form_shape(small):
    res = run_distance_sweep(small.with_(trials=4), axis_values(0, 100, 20), 30.0)
    ratio = res.column("mean_ratio_closed")
    assert np.all(ratio == ratio[0])
    assert np.all(np.diff(res.column("cov_closed")) < 0)


def test_empty_and_invalid_axes(small):
    with pytest.raises(ValueError):
        run_altitude_sweep(small, [], 30.0)
    with pytest.raises(ValueError):
        run_altitude_sweep(small, [0.0], 30.0)
    with pytest.raises(ValueError):
        run_distance_sweep(small, [-1.0], 30.0)
    with pytest.raises(ValueError):
        axis_values(10, 0, 5)
    assert axis_values(30, 120, 10) == [float(h) for h in range(30, 121, 10)]


def test_walk_demo(small):
    one = run_walk_demo(small, 1)
    assert one.records[1]["d"] == small.walk_step
    res = run_walk_demo(small, 5000)
    d = res.column("d")
    assert d.max() <= small.d_max
    np.testing.assert_allclose(res.column("xi"), np.exp(-small.k0 * d), rtol=1e-15)
    cov0 = an.cov_ul_dl(small, d=0.0)
    assert res.records[0]["cov_closed"] == pytest.approx(cov0, rel=1e-12)
    k = int(np.argmax(d))
    assert res.records[k]["rho_closed"] == pytest.approx(an.rho_closed_form(small, d=d[k]), rel=1e-12)


def test_write_outputs(tmp_path, small):
    res = run_distance_sweep(small.with_(trials=5), [0.0, 10.0], 30.0)
    csv_path, json_path = res.write(tmp_path, "distance_sweep")
    assert csv_path.read_text() == res.csv_text()
    meta = json.loads(json_path.read_text())["metadata"]
    assert meta["seed"] == 7 and meta["trials"] == 5
    assert meta["config_sha256"] == small.with_(trials=5).digest()
    assert meta["fixed_altitude"] == 30.0


def test_cli_stdout(capsys):
    code = cli.main(["distance-sweep", "--reduced-density", "--trials", "5", "--seed", "3",
                     "--d-min", "0", "--d-max", "20", "--d-step", "10", "--stdout"])
    assert code == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == list(CSV_COLUMNS)
    assert [float(r[0]) for r in rows[1:]] == [0.0, 10.0, 20.0]


def test_cli_writes_files(tmp_path):
    code = cli.main(["walk-demo", "--steps", "20", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "walk_demo.csv").exists() and (tmp_path / "walk_demo.json").exists()


def test_cli_show_config_round_trips(capsys, tmp_path):
    assert cli.main(["show-config", "--seed", "11"]) == 0
    text = capsys.readouterr().out
    p = tmp_path / "c.cfg"
    p.write_text(text)
    assert cli.main(["show-config", "--config", str(p)]) == 0
    assert capsys.readouterr().out == text


def test_cli_config_errors(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("altitdue = 60\n")
    assert cli.main(["show-config", "--config", str(p)]) == 2
    assert "unknown config key" in capsys.readouterr().err
    assert cli.main(["altitude-sweep", "--h-min", "50", "--h-max", "40", "--stdout"]) == 2
    assert cli.main(["walk-demo", "--workers", "0", "--stdout"]) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-verb"])
    assert exc.value.code == 2


def test_cli_numeric_failure(monkeypatch, capsys):
    def boom(*a, **k):
        raise an.QuadratureError("integrand did not converge")

    monkeypatch.setattr(cli, "run_walk_demo", boom)
    assert cli.main(["walk-demo", "--stdout"]) == 3
    assert "numeric failure" in capsys.readouterr().err


def test_cli_validate(capsys):
    assert cli.main(["validate", "--trials", "400"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "checks passed" in out
