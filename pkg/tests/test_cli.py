import csv
import io

import pytest

from helpers import N0
from zfee.cli import EVAL_COLUMNS, MC_COLUMNS, main
from zfee.sweep import SWEEP_COLUMNS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, list(csv.DictReader(io.StringIO(out))), out, err


def test_eval_row(capsys):
    code, rows, out, _ = run(capsys, "eval", "--set", "Gc_dB=-90", "--design", "2,1,8")
    assert code == 0 and out.splitlines()[0] == ",".join(EVAL_COLUMNS)
    r = rows[0]
    eta = float(r["eta_bits_per_J"])
    assert 0.8155e7 < eta < 1.2232e7
    assert float(r["zeta"]) == pytest.approx(eta * N0 / 1e-9, rel=1e-12)
    parts = sum(float(r[k]) for k in ("pa_W", "bs_rf_W", "mud_W", "circuit_W", "fixed_W"))
    assert parts == pytest.approx(float(r["P_total_W"]), rel=1e-12)


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "eval", "--set", "bogus=1", "--design", "2,1,8")[0] == 2
    assert run(capsys, "eval", "--design", "2,1")[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("B = oops\n")
    code, _, _, err = run(capsys, "classify", "--scenario", str(bad))
    assert code == 2 and "bad.txt:1" in err
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--preset", "nope"])
    assert exc.value.code == 2
    assert run(capsys, "eval", "--design", "2,2,8")[0] == 3
    code, rows, _, err = run(capsys, "optimize", "--set", "Gc_dB=-140", "--m-cap", "18",
                             "--capped-k")
    assert code == 4 and rows[0]["cap_hit_m"] == "true" and "cap" in err


def test_optimize_modes(capsys):
    code, rows, _, _ = run(capsys, "optimize", "--set", "Gc_dB=-120", "--relaxed")
    assert code == 0 and [r["mode"] for r in rows] == ["free", "relaxed"]
    assert (rows[0]["M"], rows[0]["K"], rows[0]["tau"]) == ("4", "2", "15")
    assert float(rows[1]["zeta"]) >= float(rows[0]["zeta"])
    code, rows, _, _ = run(capsys, "optimize", "--fixed-mk", "2,1")
    assert rows[0]["mode"] == "fixed_mk" and rows[0]["M"] == "2"
    _, rows, _, _ = run(capsys, "optimize", "--preset", "high-rate")
    assert rows[0]["mode"] == "capped" and rows[0]["K"] == "3"
    _, rows, _, _ = run(capsys, "optimize", "--preset", "high-rate", "--fixed-k", "16")
    assert rows[0]["mode"] == "fixed_k" and rows[0]["K"] == "16"


def test_classify(capsys):
    code, rows, _, err = run(capsys, "classify", "--set", "Gc_dB=-120")
    assert code == 0 and rows[0]["classification"] == "Massive"
    assert "multiuser" in err and "classification: Massive" in err
    _, rows, _, _ = run(capsys, "classify", "--set", "Gc_dB=-90")
    assert rows[0]["classification"] == "NonMassive"


def test_mc_validate_repeatable(capsys, tmp_path):
    args = ["mc-validate", "--design", "16,4,8", "--replicates", "200", "--seed", "7"]
    code, rows, first, _ = run(capsys, *args)
    assert code == 0 and rows[0]["verdict"] == "pass"
    assert first.splitlines()[0] == ",".join(MC_COLUMNS)
    assert run(capsys, *args)[2] == first
    p = tmp_path / "mc.csv"
    assert main(args + ["--out", str(p)]) == 0
    assert p.read_text() == first
    _, rows, _, _ = run(capsys, "mc-validate", "--design", "16,4,8", "--replicates", "5")
    assert rows[0]["verdict"] == "untested"


def test_sweep_columns_stable(capsys):
    code, rows, out, _ = run(capsys, "sweep", "--set", "sweep.points=3", "--set", "sweep.stop=-100",
                             "--fixed-k", "4")
    assert code == 0 and out.splitlines()[0] == ",".join(SWEEP_COLUMNS)
    assert [r["x"] for r in rows] == ["-80", "-90", "-100"]
    assert all(r["fixed_k_K"] == "4" for r in rows)
    assert rows[0]["regime"] == "NonMassive"
