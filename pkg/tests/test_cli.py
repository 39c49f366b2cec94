import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qctime.cli import main
from qctime.matrix_io import dump_matrix, from_json_obj, load_matrix, to_json_obj
from qctime.errors import InputError
from qctime.schedule import ControlSchedule

from conftest import SX, SY, SZ


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_matrix_json_round_trip(tmp_path):
    M = np.array([[1 + 2j, -0.5], [0, 3j]])
    assert np.array_equal(from_json_obj(to_json_obj(M)), M)
    p = tmp_path / "m.json"
    dump_matrix(M, p)
    assert np.array_equal(load_matrix(p), M)
    with pytest.raises(InputError):
        from_json_obj({"dim": 3, "entries": to_json_obj(M)["entries"]})


def test_closure_dim_only(tmp_path, capsys):
    g = write(tmp_path, "g.json", [to_json_obj(SX), to_json_obj(SY)])
    code, out = run(capsys, "closure", "--generators", g, "--hermitian", "--dim-only")
    assert code == 0 and out.strip() == "3"


def test_closure_json(tmp_path, capsys):
    g = write(tmp_path, "g.json", {"generators": [to_json_obj(1j * SZ)]})
    code, out = run(capsys, "closure", "--generators", g)
    d = json.loads(out)
    assert code == 0 and d["dim"] == 1 and len(d["elements"]) == 1


def test_bch_coeffs(capsys):
    code, out = run(capsys, "bch", "coeffs", "--order", "3")
    d = json.loads(out)
    assert code == 0
    assert d["h"][""] == {"num": -1, "den": 12}
    assert d["f"]["10"] == {"num": 1, "den": 3}


def test_bch_compose(tmp_path, capsys):
    a = write(tmp_path, "a.json", to_json_obj(0.05j * SX))
    b = write(tmp_path, "b.json", to_json_obj(0.05j * SY))
    code, out = run(capsys, "bch", "compose", "--a", a, "--b", b)
    assert code == 0 and json.loads(out)["residual"] < 1e-12


def test_synthesize(tmp_path, capsys):
    a = write(tmp_path, "a.json", to_json_obj(0.4j * SX))
    b = write(tmp_path, "b.json", to_json_obj(0.3j * SY))
    code, out = run(capsys, "synthesize", "--a", a, "--b", b)
    d = json.loads(out)
    assert code == 0
    assert d["exp_residual"] <= 1e-8 and d["algebra_residual"] <= 1e-8
    assert d["norm_C"] <= d["norm_A_plus_norm_B"]


def test_synthesize_schedule(tmp_path, capsys):
    s = ControlSchedule.of([(0.5 * SX, 0.4), (0.3 * SZ, 0.7)])
    path = write(tmp_path, "s.json", s.to_json_obj())
    code, out = run(capsys, "synthesize-schedule", "--schedule", path)
    assert code == 0 and json.loads(out)["exp_residual"] <= 1e-8


def test_distance(tmp_path, capsys):
    u1 = write(tmp_path, "u1.json", to_json_obj(np.diag([-1.0, 1.0, -1.0])))
    u2 = write(tmp_path, "u2.json", to_json_obj(np.eye(3)))
    alg = write(tmp_path, "alg.json", [to_json_obj(np.diag([1j, 2j, -3j]))])
    code, out = run(capsys, "distance", "--u1", u1, "--u2", u2, "--algebra", alg)
    d = json.loads(out)
    assert code == 0 and abs(d["value"] - math.sqrt(14) * math.pi) <= 1e-9 and d["exact"]


def test_bounds_csv(tmp_path, capsys):
    s = ControlSchedule.of([(0.5 * SX, 0.4), (0.3 * SZ, 0.7)])
    path = write(tmp_path, "s.json", s.to_json_obj())
    code, out = run(capsys, "bounds", "--schedule", path, "--csv")
    head, vals = out.strip().split("\n")
    row = dict(zip(head.split(","), map(float, vals.split(","))))
    assert code == 0 and row["T_MT"] <= row["T_star"] + 1e-9


def test_figure1_csv(tmp_path, capsys):
    out_path = tmp_path / "fig.csv"
    code, _ = run(capsys, "figure1", "--m-max", "20", "--out", str(out_path))
    lines = out_path.read_text().strip().split("\n")
    assert code == 0 and len(lines) == 21 and lines[0].startswith("M,T_real")


def test_input_errors(tmp_path, capsys):
    assert main(["distance", "--u1", str(tmp_path / "missing.json"), "--u2", "x"]) == 2
    bad = write(tmp_path, "bad.json", {"dim": 2, "entries": [[1]]})
    assert main(["synthesize", "--a", bad, "--b", bad]) == 2
    assert main(["no-such-command"]) == 2
    a = write(tmp_path, "a.json", to_json_obj(SX))
    assert main(["synthesize", "--a", a, "--b", a]) == 2  # Hermitian, not anti-Hermitian
    assert main(["figure1", "--c", "1.0"]) == 2


def test_violation_exit_code(tmp_path, capsys):
    u1 = write(tmp_path, "u1.json", to_json_obj(np.diag([1j, 1.0])))
    u2 = write(tmp_path, "u2.json", to_json_obj(np.eye(2)))
    alg = write(tmp_path, "alg.json", [to_json_obj(1j * SZ)])
    assert main(["distance", "--u1", u1, "--u2", u2, "--algebra", alg]) == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qctime", "bch", "coeffs", "--order", "1"],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 0
    assert json.loads(r.stdout)["g"][""] == {"num": 1, "den": 2}
