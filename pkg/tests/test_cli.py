import json

import numpy as np
import pytest

from ncfunc.cli import main
from ncfunc.core import Point, matrix_from_json, point_from_json, point_to_json, random_point
from ncfunc.series import FreeSeries


@pytest.fixture
def files(tmp_path, rng):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    z = random_point(rng, 2, 2, norm=0.5)
    return {
        "x1": write("x1.json", FreeSeries.monomial(2, (1,)).to_json()),
        "geo": write("geo.json", FreeSeries.geometric(2).to_json()),
        "z": write("z.json", point_to_json(z)),
        "w": write("w.json", point_to_json(random_point(rng, 2, 2, norm=0.3))),
        "z3": write("z3.json", point_to_json(random_point(rng, 3, 2))),
        "gamma": write("gamma.json", {"gamma": [[0.3, 0.1], [0.2, 0.0]]}),
        "bad": str(tmp_path / "bad.json"),
        "zpoint": z,
    }


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_eval_monomial_returns_first_component(capsys, files):
    code, out, _ = run(capsys, "eval", "--series", files["x1"], "--point", files["z"], "--kmax", "10")
    assert code == 0
    np.testing.assert_array_equal(matrix_from_json(out["value"]), files["zpoint"].mats[0])


def test_eval_dimension_mismatch_exit_2(capsys, files):
    code, out, err = run(capsys, "eval", "--series", files["x1"], "--point", files["z3"])
    assert code == 2 and out is None and "d=" in err


def test_malformed_json_reports_location(capsys, files):
    with open(files["bad"], "w") as fh:
        fh.write('{"d": 2,\n "terms": [}')
    code, _, err = run(capsys, "eval", "--series", files["bad"], "--point", files["z"])
    assert code == 2 and "line 2" in err


def test_missing_file_exit_2(capsys, files):
    code, _, _ = run(capsys, "radius", "--series", files["bad"] + ".missing")
    assert code == 2


def test_unknown_verb_exit_2(capsys):
    assert main(["frobnicate"]) == 2


def test_radius_infinite_is_strict_json(capsys, files):
    code, out, _ = run(capsys, "radius", "--series", files["x1"])
    assert code == 0 and out == {"radius": "inf", "degrees_used": 0, "exact": True}
    _, out, _ = run(capsys, "radius", "--series", files["geo"])
    assert out["radius"] == 1.0


def test_deriv(capsys, files):
    code, out, _ = run(capsys, "deriv", "--series", files["x1"], "--point", files["z"], "--direction", files["w"])
    assert code == 0 and matrix_from_json(out["value"]).shape == (2, 2)


def test_taylor_coeffs_and_remainder(capsys, files):
    code, out, _ = run(capsys, "taylor", "coeffs", "--series", files["geo"], "--degree", "2")
    assert code == 0
    got = FreeSeries.from_json(out)
    assert got.max_coeff_diff(FreeSeries.geometric(2).truncate(2)) < 1e-10
    code, out, _ = run(capsys, "taylor", "remainder", "--series", files["x1"], "--z", files["z"], "--w", files["w"], "--n", "3")
    assert code == 0 and out["pass"] and out["name"] == "taylor_remainder"


def test_fock_verbs(capsys, files):
    code, out, _ = run(capsys, "fock", "creation", "--d", "2", "--N", "2", "--i", "2")
    assert code == 0 and out["basis"] == {"d": 2, "N": 2} and out["mat"]["rows"] == 7
    code, out, _ = run(capsys, "fock", "cesaro", "--d", "2", "--N", "2", "--series", files["x1"], "--k", "2")
    assert code == 0
    code, _, _ = run(capsys, "fock", "toeplitz", "--d", "2", "--N", "2")
    assert code == 2


def test_check_matricial_passes(capsys, files):
    code, out, _ = run(capsys, "check", "matricial", "--series", files["x1"], "--seed", "7", "--levels", "1,2")
    assert code == 0 and out["pass"]


def test_mobius_eval_and_check(capsys, files):
    code, out, _ = run(capsys, "mobius", "eval", "--gamma", files["gamma"], "--z", files["z"])
    assert code == 0 and point_from_json(out).n == 2
    code, out, err = run(capsys, "mobius", "check", "--gamma", files["gamma"], "--trials", "5", "--verbose")
    assert code == 0 and "PASS" in err
    code, out, _ = run(capsys, "--tamper", "dg_gamma", "mobius", "check", "--gamma", files["gamma"], "--trials", "3")
    assert code == 1 and not out["pass"]


def test_luminet_verb(capsys, files):
    code, out, _ = run(capsys, "luminet", "--k", "4", "--point", files["z"])
    assert code == 0
    assert np.abs(matrix_from_json(out["value"])).max() < 1e-10


def test_suite_is_deterministic_and_tamperable(capsys):
    code1, out1, _ = run(capsys, "suite", "mobius", "--seed", "2")
    code2, out2, _ = run(capsys, "suite", "mobius", "--seed", "2")
    assert code1 == 0 and out1 == out2
    code, out, _ = run(capsys, "suite", "mobius", "--tamper", "dg_gamma")
    assert code == 1 and not out["pass"]


def test_output_file(tmp_path, capsys, files):
    target = tmp_path / "out.json"
    assert main(["radius", "--series", files["geo"], "-o", str(target)]) == 0
    assert json.loads(target.read_text())["exact"] is True
