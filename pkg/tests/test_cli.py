import json
import subprocess
import sys

import pytest

from conftest import FS3, K148, K2, K404, QUINTIC
from fermatcheck.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_nf_factor(capsys):
    code, rep = run_json(capsys, "nf-factor", "--field", K148, "--prime", "37")
    assert code == 0
    assert sorted((q["e"], q["f"]) for q in rep["certificates"]["primes"]) == [(1, 1), (2, 1)]
    assert set(rep) == {"command", "inputs", "verdict", "certificates", "wall_time"}


@pytest.mark.parametrize("argv", [
    ["nf-factor", "--field", K148, "--prime", "38"],
    ["nf-factor", "--field", K148, "--prime", "x"],
    ["rk", "--field", K404, "--depth", "2"],
    ["rayclass", "--field", K148, "--modulus", "37"],
    ["fs-check", "--field", FS3, "--elem", "0,2/4"],
])
def test_bad_input_exits_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_missing_argument_is_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["nf-factor", "--field", K148])
    assert e.value.code == 2


def test_data_gap_exits_3(capsys, tmp_path):
    code, _, err = run(capsys, "condition-c", "--field", "3.3.1492.1", "--offline", "--cache-dir", str(tmp_path))
    assert code == 3 and "no newform data" in err
    code, _, _ = run(capsys, "narrow-class", "--field", "3.3.999.1")
    assert code == 3


def test_inconsistency_exits_4(capsys, tmp_path):
    from fermatcheck.dataio import FixtureStore

    st = FixtureStore(cache_root=tmp_path)
    blob = {"field_label": "3.3.1492.1", "level_norm": 2, "schema": "fermatcheck-newforms/1", "count": 0, "forms": []}
    p = st.cache_put("lmfdb", "3.3.1492.1", 2, blob, "t")
    p.write_text(p.read_text() + " ")
    code, _, _ = run(capsys, "condition-c", "--field", "3.3.1492.1", "--offline", "--cache-dir", str(tmp_path))
    assert code == 4


def test_rk_and_narrow_class(capsys):
    code, rep = run_json(capsys, "rk", "--field", K2, "--units-from-fixture")
    assert code == 0 and rep["certificates"]["A_n"] == ["4", str(2**16 * 17)]
    code, rep = run_json(capsys, "narrow-class", "--field", K148)
    assert rep["verdict"] == "h+ = 1"


def test_condition_c_and_survivors(capsys):
    code, rep = run_json(capsys, "condition-c", "--field", K404, "--offline")
    assert code == 0 and rep["verdict"] == "satisfied (witness)"
    code, rep = run_json(capsys, "survivors", "--field", QUINTIC, "--primes", "3", "--offline")
    assert rep["certificates"]["forms"][0]["survivors"] == [3, 17]


def test_rayclass(capsys):
    code, rep = run_json(capsys, "rayclass", "--field", K148, "--modulus", "37:1", "--infinite", "all")
    assert code == 0 and rep["certificates"]["ray_class_number"] == 2
    code, rep = run_json(capsys, "rayclass", "--field", K2, "--modulus", "4O_K")
    assert rep["certificates"]["ray_class_number"] == 1


def test_frey(capsys, tmp_path):
    # a = 1, b = alpha (v_L = 1) over K2, formal c
    f = tmp_path / "triple.json"
    f.write_text(json.dumps({"a": ["1"], "b": ["0", "1"], "c": None}))
    code, rep = run_json(capsys, "frey", "--field", K2, "--triple", str(f), "--p", "17")
    assert code == 0 and rep["verdict"] == "multiplicative at L"
    assert rep["certificates"]["normalization"]
    code, rep = run_json(capsys, "frey", "--field", K2, "--triple", str(f), "--p", "13")
    assert rep["certificates"]["chain"]["after_pi4_scaling"] == [8, 12, 18]
    f.write_text("{")
    code, _, _ = run(capsys, "frey", "--field", K2, "--triple", str(f), "--p", "17")
    assert code == 2


def test_fs_check(capsys):
    code, out, _ = run(capsys, "fs-check", "--field", FS3, "--elem", "0,16")
    assert code == 0 and "(FS) fails" in out


def test_fermat_report(capsys):
    code, rep = run_json(capsys, "fermat-report", "--field", K404, "--pmin", "13", "--offline")
    assert code == 0
    assert rep["certificates"]["exceptional"] == [] and rep["certificates"]["data_gaps"] == []
    kinds = {i["kind"] for i in rep["certificates"]["checklist"]}
    assert kinds == {"MACHINE-VERIFIED", "LITERATURE-ASSUMED"}
    code, rep = run_json(capsys, "fermat-report", "--field", K148, "--pmin", "13", "--offline")
    assert [e["p"] for e in rep["certificates"]["exceptional"]] == [13]


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "fermatcheck.cli", "nf-factor", "--field", K148, "--prime", "3"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "(e=1,f=3)" in out.stdout


def test_examples_from_the_command_table(capsys):
    code, rep = run_json(capsys, "nf-factor", "--field", K404, "--prime", "3")
    assert sorted((q["e"], q["f"]) for q in rep["certificates"]["primes"]) == [(1, 1), (1, 2)]
    code, _, _ = run(capsys, "nf-factor", "--field", K404, "--prime", "4")
    assert code == 2
    code, rep = run_json(capsys, "rk", "--field", K148)
    assert rep["certificates"]["R_multiple"] == "4"
    code, rep = run_json(capsys, "fermat-report", "--field", QUINTIC, "--pmin", "23", "--offline")
    obstruction = [i for i in rep["certificates"]["checklist"] if i["name"].startswith("obstruction")]
    assert obstruction[0]["detail"]["survivors"] == [3, 17]
    code, _, _ = run(capsys, "fermat-report", "--field", "3.3.999.1", "--pmin", "13", "--offline")
    assert code == 3


def test_report_is_deterministic(capsys):
    runs = []
    for _ in range(2):
        code, rep = run_json(capsys, "fermat-report", "--field", K148, "--pmin", "13", "--offline")
        rep.pop("wall_time")
        runs.append(json.dumps(rep, sort_keys=True))
    assert runs[0] == runs[1]
