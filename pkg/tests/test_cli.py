import json

import pytest

from zerocalc import errors
from zerocalc.cli import main
from zerocalc.planner import canonical_json
from zerocalc.spectrum import hyperbolic_operator


@pytest.fixture
def hyperbolic_file(data_dir):
    return str(data_dir / "hyperbolic.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_plan_table(capsys, hyperbolic_file):
    code, out, _ = run(capsys, "plan", "--alpha", "0.5", "--cutoff", "6", hyperbolic_file)
    assert code == 0
    block = out.split("[Q.lb]")[1].splitlines()
    assert block[2].split() == ["1.5", "0", "0"]


def test_plan_weight_on_spectrum(capsys, hyperbolic_file):
    code, _, err = run(capsys, "plan", "--alpha", "1.5", hyperbolic_file)
    assert code == 4
    assert "WeightOnSpectrum" in err and "tolerance" in err


def test_malformed_coeffs_names_field(capsys, tmp_path):
    spec = hyperbolic_operator(2, 1.5).to_dict()
    spec["coeffs"][1]["re"] = [1]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(spec))
    code, _, err = run(capsys, "plan", "--alpha", "0.5", str(path))
    assert code == 2
    assert "coeffs[1].re" in err


def test_invalid_json(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(capsys, "spectrum", str(path))[0] == 2


@pytest.mark.parametrize("mode", ["parametrix", "normal-inverse", "gen-inverse"])
def test_machine_output_round_trip(capsys, hyperbolic_file, mode):
    code, out, _ = run(capsys, "plan", "--mode", mode, "--alpha", "1/2", "--cutoff", "5", "--exact",
                       "--format", "machine", hyperbolic_file)
    assert code == 0
    rec = json.loads(out)
    assert canonical_json(rec) == out
    assert rec["tolerances"]["tol"] == pytest.approx(1e-9)
    face = "Ginv.lb" if mode == "gen-inverse" else "Pminus.lb"
    assert rec["report"]["members"][face][0] == ["3/2", "0", 0]


def test_plan_shorthands(capsys, hyperbolic_file):
    code, out, _ = run(capsys, "plan-gen-inverse", "--alpha", "0.25", "--cutoff", "4", hyperbolic_file)
    assert code == 0 and "[G.ff]" in out
    code, out, _ = run(capsys, "normal-inverse", "--alpha", "0.25", hyperbolic_file)
    assert code == 0 and "[Pminus.rb]" in out
    code, out, _ = run(capsys, "plan-bounds", "--alpha0=-1/4", "--alpha1", "5/4", "--alpha", "1/4",
                       "--format", "machine", hyperbolic_file)
    rec = json.loads(out)
    assert code == 0 and rec["plan"]["beta_lb"] == 1.25 and rec["plan"]["beta_rb"] == 1.75
    assert run(capsys, "plan-bounds", "--alpha0", "1", "--alpha1", "0", hyperbolic_file)[0] == 2


def test_non_constant_spectrum_hint(capsys, tmp_path):
    spec = hyperbolic_operator(2, 1.5).to_dict()
    other = json.loads(json.dumps(spec["coeffs"]))
    for c in other:
        if c["j"] == 0 and c["beta"] == [0]:
            c["re"] = 0.76
    spec["y_samples"] = [other]
    path = tmp_path / "varying.json"
    path.write_text(json.dumps(spec))
    code, _, err = run(capsys, "plan", "--alpha", "0.5", str(path))
    assert code == 4 and "plan-bounds" in err


def test_indexset_examples(capsys):
    code, out, _ = run(capsys, "indexset", "hat({(1,0,0)})", "--cutoff", "5")
    assert code == 0 and out.strip() == "{(1,0),(2,1),(3,2),(4,3)} [Re z < 5]"
    assert run(capsys, "indexset", "N0 vee N0")[1].startswith("{(0,1)}")
    assert run(capsys, "indexset", "empty + N0")[1].startswith("{}")
    assert run(capsys, "indexset", "hat(N0")[0] == 2


def test_compose_commands(capsys, tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"n": 2, "E": {"lb": "empty", "ff": "N0", "rb": "{(1/2,0,0)}"},
                                "F": {"lb": "{(3/2,0,0)}", "ff": "N0", "rb": "empty"}}))
    code, out, _ = run(capsys, "compose", str(path), "--exact", "--format", "machine")
    rec = json.loads(out)
    assert code == 0
    assert rec["result"]["lb"]["generators"] == [{"re": "3/2", "im": "0", "k": 0}]
    # ff = (E.ff + F.ff) vee (E.lb + F.rb) = N0 vee empty
    assert rec["result"]["ff"]["generators"] == [{"re": "0", "im": "0", "k": 0}]
    path.write_text(json.dumps({"n": 2, "E": {"lb": "empty", "ff": "N0", "rb": "{(0.2,0,0)}"},
                                "F": {"lb": "{(0.5,0,0)}", "ff": "N0", "rb": "empty"}}))
    assert run(capsys, "compose", str(path))[0] == 2
    path.write_text(json.dumps({"n": 2, "E": {"lb": "empty", "ff": "N0", "rb": "{(0.5,0,0)}"},
                                "F": {"lb": "{(0.5000000001,0,0)}", "ff": "N0", "rb": "empty"}}))
    assert run(capsys, "compose", str(path))[0] == 3
    path.write_text(json.dumps({"n": 2, "calculus": "bounds", "E": {"lb": 2, "ff": 0, "rb": 3},
                                "F": {"lb": 1, "ff": 0, "rb": 4}}))
    code, out, _ = run(capsys, "compose", str(path), "--format", "machine")
    assert code == 0 and json.loads(out)["weights"] == pytest.approx([1, 5.99, 3])


def test_spectrum_command(capsys, data_dir):
    code, out, _ = run(capsys, "spectrum", str(data_dir / "hyperbolic_n2_zeta0.5.json"), "--format", "machine")
    rec = json.loads(out)
    assert code == 0 and rec["spectrum"]["roots"][0]["mult"] == 2 and rec["elliptic"]
    code, out, _ = run(capsys, "spectrum", str(data_dir / "hyperbolic.json"), "--exact", "--alpha", "1/2")
    assert code == 0 and "E_+ = {(3/2,0)}" in out


def test_invertibility_and_sweep(capsys, hyperbolic_file):
    assert run(capsys, "invertibility", "--alpha", "0.5", hyperbolic_file)[0] == 0
    code, out, _ = run(capsys, "invertibility", "--alpha", "-0.8", "--format", "machine", hyperbolic_file)
    assert code == 4 and json.loads(out)["verdicts"][0]["kernel_dim"] == 1
    assert run(capsys, "invertibility", "--alpha", "0.5", "--eta", "0.6,0.8", hyperbolic_file)[0] == 2
    assert run(capsys, "sweep", "--alpha-range", "0:1:0.5", hyperbolic_file)[0] == 0
    assert run(capsys, "sweep", "--alpha-range=-1,0.5", hyperbolic_file)[0] == 4


def test_oracle_check(capsys):
    code, out, _ = run(capsys, "oracle-check", "--n", "3", "--zeta", "1.8", "--alpha-range=-0.5:2.5:0.5")
    assert code == 0 and "False" not in out
    assert run(capsys, "oracle-check", "--n", "2", "--zeta", "0.2", "--alpha-range", "0")[0] == 2


def _leaf_classes(cls):
    subs = cls.__subclasses__()
    return [cls] + [c for s in subs for c in _leaf_classes(s)]


def test_exit_codes_are_total():
    families = {errors.ValidationError: 2, errors.AmbiguityError: 3, errors.EllipticityError: 4,
                errors.NumericalError: 5}
    for cls in _leaf_classes(errors.ZeroCalcError)[1:]:
        codes = {code for fam, code in families.items() if issubclass(cls, fam)}
        assert len(codes) == 1, cls
        exc = cls("x") if cls is not errors.SpecFormatError else cls("x", "path")
        assert errors.exit_code_for(exc) == codes.pop()
