import csv
import io
import json

import pytest

from anharmonic.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_width_series_emits_exact_strings(capsys):
    code, out = run(capsys, "width-series", "--degree", "3", "--level", "1", "--order", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["coeffs"] == ["1", "-853/16"]
    assert doc["provenance"] == "exact"
    assert doc["config"]["degree"] == 3


def test_action_reports_agreement(capsys):
    code, out = run(capsys, "action", "--degree", "3", "--dps", "30")
    doc = json.loads(out)["result"]
    assert doc["exact"] == "2/15"
    assert doc["agreement_digits"] >= 25


def test_bfun_terms(capsys):
    _, out = run(capsys, "bfun", "-m", "6")
    terms = json.loads(out)["result"]["terms"]
    assert terms[1]["coeffs"] == ["0", "-25/8", "0", "-5/2"]


def test_rspt_cache_dir(capsys, tmp_path):
    _, out = run(capsys, "--cache-dir", str(tmp_path), "rspt", "-m", "4", "--kmax", "3")
    assert json.loads(out)["result"]["coeffs"] == ["1/2", "3/4", "-21/8", "333/16"]
    assert any(tmp_path.iterdir())


def test_largeorder_csv(capsys):
    _, out = run(capsys, "largeorder", "-m", "4", "--kmax", "12")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["K", "coeff", "predictor", "ratio"]
    assert len(rows) == 13 and rows[1][1] == "0.75"


def test_profile_csv(capsys):
    _, out = run(capsys, "instanton-profile", "-m", "3", "-g", "0.1", "--points", "3")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[2][1] == "0.5"


def test_byte_identical_reruns(capsys):
    a = run(capsys, "afun", "-m", "7")[1]
    b = run(capsys, "afun", "-m", "7")[1]
    assert a == b
    assert "Gamma(2/5)" in a


def test_failure_exit_code(capsys):
    code, out = run(capsys, "width-series", "-m", "5", "--order", "1")
    assert code == 1
    assert json.loads(out)["error"] == "NoFixture"


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["no-such-command"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["rspt", "--degree", "4", "--bogus"])
    assert e.value.code == 2


def test_toml_config(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('degree = 3\n[width-series]\nlevel = 1\norder = 1\n')
    _, out = run(capsys, "--config", str(cfg), "width-series")
    assert json.loads(out)["result"]["coeffs"][1] == "-853/16"
    _, out = run(capsys, "--config", str(cfg), "width-series", "--level", "0")
    assert json.loads(out)["result"]["coeffs"][1] == "-169/16"


def test_resonance_json(capsys):
    code, out = run(capsys, "resonance", "-m", "3", "-n", "1", "-g", "0.01", "--thetas", "0.2,0.3", "--dims", "100,130")
    doc = json.loads(out)["result"]
    assert code == 0
    assert set(doc) == {"re", "im", "err", "theta", "dim", "precision"}
    assert doc["im"].startswith("-0.00314742079794")


def test_resonance_scan_csv(capsys):
    _, out = run(capsys, "resonance-scan", "-m", "4", "--ladder", "0.1,0.2", "--thetas", "0.2,0.3", "--dims", "80,100")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:3] == ["g", "re", "im"] and len(rows) == 3


def test_borel_and_dispersion(capsys):
    _, out = run(capsys, "borel", "-m", "4", "-g", "0.02", "--kmax", "20")
    assert json.loads(out)["result"]["re"].startswith("0.51408642731")
    _, out = run(capsys, "dispersion", "-m", "3", "-K", "6")
    assert float(json.loads(out)["result"]["relative_difference"]) < 1e-20
