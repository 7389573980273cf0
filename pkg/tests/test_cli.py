import json

import pytest

from main import main

RH = "(up_u - um_u)*D[1]gamma + 1/2*(up_u^2 - um_u^2)*D[2]gamma"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_burgers(capsys, system_path):
    code, out, _ = run(capsys, "classify", system_path("burgers"))
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "jcond/1"
    assert doc["system"] == "burgers"
    assert doc["verdicts"] == [{"beta": 1, "verdict": "resoluble", "mh_verified": True}]
    assert doc["certificates"][0]["beta"] == 1
    assert doc["conditions"] == []


def test_classify_not_resoluble(capsys, system_path):
    code, out, _ = run(capsys, "classify", system_path("ux_squared"))
    assert code == 2
    (verdict,) = json.loads(out)["verdicts"]
    assert verdict["verdict"] == "not-resoluble"
    assert verdict["witness"] == "D[2]omega^2"
    assert verdict["infeasibility"] == [{"monomial": "D[2]omega^2", "weight": "1"}]


def test_junction_burgers_json(capsys, system_path):
    code, out, _ = run(capsys, "junction", system_path("burgers"))
    assert code == 0
    first, second = json.loads(out)["conditions"]
    assert first == {
        "beta": 1,
        "atom": "delta",
        "order": 0,
        "coefficient": RH,
        "status": "required",
        "locus": "on Γ",
    }
    assert second["atom"] == "heaviside"
    assert second["status"] == "satisfied-by-hypothesis"


def test_junction_output_is_stable(capsys, system_path):
    _, once, _ = run(capsys, "junction", system_path("toy_mhd"))
    _, twice, _ = run(capsys, "junction", system_path("toy_mhd"))
    assert once == twice


def test_junction_latex(capsys, system_path):
    code, out, _ = run(capsys, "junction", "--latex", system_path("burgers"))
    assert code == 0
    assert r"(u^+ - u^-)\,\gamma_t + \tfrac{1}{2}((u^+)^2 - (u^-)^2)\,\gamma_x = 0" in out
    assert r"\text{(on }\Gamma\text{)}" in out
    assert "satisfied by hypothesis" in out


def test_junction_mh_method(capsys, system_path):
    code, out, _ = run(capsys, "junction", "--method", "mh", system_path("burgers"))
    assert code == 0
    assert json.loads(out)["conditions"][0]["coefficient"] == RH


def test_junction_mh_without_certificate(capsys, system_path):
    code, out, err = run(capsys, "junction", "--method", "mh", system_path("burgers_wrong_speed"))
    assert code == 3
    assert out == ""
    assert "mh" in err


def test_junction_of_non_resoluble_system(capsys, system_path):
    code, out, _ = run(capsys, "junction", system_path("u_uxx"))
    assert code == 2
    assert json.loads(out)["verdicts"][0]["witness"] == "omega*D[2,2]omega"


def test_parse_errors_are_reported_with_positions(capsys, tmp_path):
    bad = tmp_path / "bad.pde"
    bad.write_text("system s\ncoords t x\nunknowns u\neq: D[1]u + w = 0\n", encoding="utf-8")
    code, out, err = run(capsys, "classify", str(bad))
    assert code == 1
    assert out == ""
    assert f"{bad}:4:13: error: unknown identifier w" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "classify", str(tmp_path / "nope.pde"))
    assert code == 1
    assert "cannot read" in err


def test_undecodable_input_is_an_input_error(capsys, tmp_path):
    bad = tmp_path / "latin1.pde"
    bad.write_bytes(b"system s\ncoords t x\nunknowns u\neq: D[1]u = 0 # \xff\n")
    code, out, err = run(capsys, "classify", str(bad))
    assert code == 1
    assert out == ""
    assert "cannot read" in err


def test_usage_errors_exit_with_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["junction", "--method", "other", "x.pde"])
    assert info.value.code == 1


def test_out_writes_a_file(capsys, system_path, tmp_path):
    target = tmp_path / "burgers.json"
    code, out, _ = run(capsys, "junction", "--out", str(target), system_path("burgers"))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["conditions"][0]["coefficient"] == RH


def test_check_without_gamma_is_a_scenario_error(capsys, system_path):
    code, _, err = run(capsys, "check", system_path("ux_squared"))
    assert code == 1
    assert "gamma" in err


def test_check_rejects_bad_widths(capsys, system_path):
    code, _, _ = run(capsys, "check", "--eps", "0.1,x", system_path("burgers"))
    assert code == 1
    code, _, _ = run(capsys, "check", "--eps", "0.1,0.05", system_path("burgers"))
    assert code == 1


@pytest.mark.slow
def test_check_wrong_speed_is_violated(capsys, system_path):
    code, out, err = run(capsys, "check", "--verbose", system_path("burgers_wrong_speed"))
    assert code == 2
    doc = json.loads(out)
    assert doc["report"]["verdict"] == "violated"
    assert doc["report"]["symbolic_consistent"] is False
    assert "eps=0.025" in err


@pytest.mark.slow
def test_check_burgers_is_consistent(capsys, system_path):
    code, out, _ = run(capsys, "check", system_path("burgers"))
    assert code == 0
    assert json.loads(out)["report"]["verdict"] == "consistent"


@pytest.mark.slow
def test_check_with_a_domain_grid_refines_near_the_front(capsys, system_path):
    code, out, _ = run(capsys, "check", "--eps", "0.1,0.05,0.025", "--grid", "161",
                       system_path("burgers_wrong_speed"))
    assert code == 2
    report = json.loads(out)["report"]
    assert report["verdict"] == "violated"
    assert report["grid"].startswith("161 points per axis")


@pytest.mark.slow
def test_check_burgers_on_a_domain_grid(capsys, system_path):
    code, out, _ = run(capsys, "check", "--grid", "400", system_path("burgers"))
    assert code == 0
    assert json.loads(out)["report"]["verdict"] == "consistent"
