import json
import subprocess
import sys

import pytest

from treeshift.cli import main

A3_DOC = {
    "tree": {"kind": "eta_kappa", "eta": 2, "kappa": 1},
    "weights": {
        "map": {"0": {"sq": "1/1"}, "(1,1)": {"sq": "1/2"}, "(2,1)": {"sq": "1/1"}},
        "rules": [
            {"branch": 1, "formula": "ratio_of_moments", "measure": {"atoms": [["1/1", "1/1"]]}},
            {"branch": 2, "formula": "ratio_of_moments", "measure": {"atoms": [["2/1", "1/1"]]}},
        ],
    },
    "measures": [{"atoms": [["1/1", "1/1"]]}, {"atoms": [["2/1", "1/1"]]}],
    "mode": "exact",
    "depth": 20,
}

KAPPA0_DOC = {
    "tree": {"kind": "eta_kappa", "eta": 2, "kappa": 0},
    "weights": {
        "map": {"(1,1)": {"sq": "1/2"}, "(2,1)": {"sq": "1/4"}},
        "rules": [
            {"branch": 1, "formula": "ratio_of_moments", "measure": {"atoms": [["1/1", "1/1"]]}},
            {"branch": 2, "formula": "ratio_of_moments", "measure": {"atoms": [["2/1", "1/1"]]}},
        ],
    },
    "measures": [{"atoms": [["1/1", "1/1"]]}, {"atoms": [["2/1", "1/1"]]}],
    "mode": "exact",
}


@pytest.fixture
def a3_file(tmp_path):
    path = tmp_path / "a3.json"
    path.write_text(json.dumps(A3_DOC), encoding="utf-8")
    return str(path)


@pytest.fixture
def kappa0_file(tmp_path):
    path = tmp_path / "k0.json"
    path.write_text(json.dumps(KAPPA0_DOC), encoding="utf-8")
    return str(path)


@pytest.fixture
def seq_file(tmp_path):
    path = tmp_path / "seq.json"
    path.write_text(json.dumps({"sequence": ["1/1", "2/1", "1/1", "2/1"]}), encoding="utf-8")
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCertify:
    def test_reference_instance_exit_zero(self, capsys, a3_file):
        code, out, _ = run_cli(capsys, "certify", a3_file, "--depth", "20")
        assert code == 0
        assert "zgod0[1,1]" in out
        assert "zgodp" in out
        assert "widly1p" in out
        assert "CERTIFIED" in out

    def test_struct_output_is_deterministic(self, capsys, a3_file):
        code1, out1, _ = run_cli(capsys, "certify", a3_file, "--depth", "20", "--format", "struct")
        code2, out2, _ = run_cli(capsys, "certify", a3_file, "--depth", "20", "--format", "struct")
        assert code1 == code2 == 0
        assert out1 == out2
        doc = json.loads(out1)
        assert doc["verdict"] == "certified"
        assert doc["arithmetic"] == "exact"

    def test_out_file_written(self, capsys, a3_file, tmp_path):
        out_path = tmp_path / "report.json"
        code, _, _ = run_cli(capsys, "certify", a3_file, "--out", str(out_path))
        assert code == 0
        doc = json.loads(out_path.read_text(encoding="utf-8"))
        assert doc["criterion"] == "branch-tree-case-ii"

    def test_violated_exit_one(self, capsys, tmp_path):
        doc = json.loads(json.dumps(A3_DOC))
        doc["weights"]["map"]["0"] = {"sq": "2/1"}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        code, out, _ = run_cli(capsys, "certify", str(path))
        assert code == 1
        assert "VIOLATED" in out

    def test_malformed_rational_exit_three(self, capsys, tmp_path):
        doc = json.loads(json.dumps(A3_DOC))
        doc["weights"]["map"]["0"] = {"sq": "1/0"}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        code, _, err = run_cli(capsys, "certify", str(path))
        assert code == 3
        assert "zero denominator" in err

    def test_missing_file_exit_three(self, capsys):
        code, _, err = run_cli(capsys, "certify", "/nonexistent/file.json")
        assert code == 3

    def test_necessary_pipeline(self, capsys, a3_file):
        code, out, _ = run_cli(capsys, "certify", a3_file, "--necessary", "--depth", "12")
        assert code == 0
        assert "recover[(1,1)]" in out
        assert "alanconsi[-1]" in out

    def test_bilateral_document(self, capsys, tmp_path):
        doc = {
            "tree": {"kind": "bilateral"},
            "weights": {"default": {"sq": "2/1"}},
            "mode": "exact",
        }
        path = tmp_path / "bi.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        code, out, _ = run_cli(capsys, "certify", str(path), "--depth", "6", "--window", "6")
        assert code == 0
        assert "tshift[6,6]" in out

    def test_edge_chain_document(self, capsys, tmp_path):
        doc = {
            "tree": {"kind": "edges", "edges": [["0", "1"], ["1", "2"], ["2", "3"]]},
            "weights": {"default": {"sq": "1/1"}},
        }
        path = tmp_path / "chain.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        code, out, _ = run_cli(capsys, "certify", str(path), "--depth", "3", "--m-max", "1")
        assert code == 0


class TestMoments:
    def test_compute_prints_sequence(self, capsys, kappa0_file):
        code, out, _ = run_cli(capsys, "moments", "compute", kappa0_file,
                               "--vertex", "0", "--upto", "3")
        assert code == 0
        assert out.strip() == "(1, 3/4, 1, 3/2)"

    def test_check_violated_exit_one(self, capsys, seq_file):
        code, out, _ = run_cli(capsys, "moments", "check", seq_file)
        assert code == 1
        assert "det -3" in out

    def test_check_consistent_exit_zero(self, capsys, tmp_path):
        path = tmp_path / "ones.json"
        path.write_text(json.dumps({"sequence": ["1"] * 6}), encoding="utf-8")
        code, out, _ = run_cli(capsys, "moments", "check", str(path))
        assert code == 0

    def test_check_two_sided(self, capsys, tmp_path):
        path = tmp_path / "two.json"
        doc = {"two_sided": {"lo": -5, "values": [str(2 ** (n + 5)) for n in range(-5, 6)]}}
        path.write_text(json.dumps(doc), encoding="utf-8")
        code, out, _ = run_cli(capsys, "moments", "check", str(path), "--window", "5")
        assert code == 0
        assert "shifts k <= 5" in out

    def test_recover_two_atoms(self, capsys, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"sequence": ["1", "5/2", "17/2", "65/2"]}), encoding="utf-8")
        code, out, _ = run_cli(capsys, "moments", "recover", str(path), "--atoms", "2")
        assert code == 0
        assert out.strip() == "1/2*delta[1] + 1/2*delta[4]"

    def test_recover_failure_exit_one(self, capsys, seq_file):
        code, out, _ = run_cli(capsys, "moments", "recover", seq_file, "--atoms", "2")
        assert code == 1
        assert "no nonnegative representing measure" in out

    def test_carleman_all_ones(self, capsys, tmp_path):
        path = tmp_path / "ones.json"
        path.write_text(json.dumps({"sequence": ["1"] * 51}), encoding="utf-8")
        code, out, _ = run_cli(capsys, "moments", "carleman", str(path), "--upto", "50")
        assert code == 0
        assert out.startswith("S_50 = 50")


class TestTreeGen:
    def test_text_listing(self, capsys):
        code, out, _ = run_cli(capsys, "tree", "gen", "--eta", "2", "--kappa", "1", "--depth", "2")
        assert code == 0
        assert "-1 -> 0" in out
        assert "0 -> (1,1)" in out

    def test_struct_listing(self, capsys):
        code, out, _ = run_cli(capsys, "tree", "gen", "--eta", "3", "--kappa", "0",
                               "--depth", "1", "--format", "struct")
        assert code == 0
        doc = json.loads(out)
        assert doc["root"] == "0"
        assert ["0", "(3,1)"] in doc["edges"]

    def test_invalid_eta_exit_three(self, capsys):
        code, _, err = run_cli(capsys, "tree", "gen", "--eta", "1", "--kappa", "0")
        assert code == 3


class TestReduce:
    def test_bilateral_reduction(self, capsys, tmp_path):
        doc = {
            "tree": {"kind": "bilateral"},
            "weights": {"default": {"sq": "1/1"}},
        }
        path = tmp_path / "bi.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        code, out, _ = run_cli(capsys, "reduce", str(path), "--base", "0",
                               "--kmax", "3", "--depth", "5")
        assert code == 0
        assert "des[-3]" in out


def test_module_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "treeshift", "--version"],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert "treeshift" in result.stdout


class TestCaseIII:
    def test_root_measure_document(self, capsys, tmp_path):
        doc = json.loads(json.dumps(A3_DOC))
        doc["nu"] = {"atoms": [["0/1", "1/4"], ["1/1", "1/2"], ["2/1", "1/4"]]}
        path = tmp_path / "a3nu.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        code, out, _ = run_cli(capsys, "certify", str(path), "--depth", "8")
        assert code == 0
        assert "prob[1]" in out
        assert "probp[1]" in out and "probp[2]" in out
        assert "branch-tree-case-iii" in out

    def test_forced_case_iii_without_nu_is_input_error(self, capsys, a3_file):
        code, _, err = run_cli(capsys, "certify", a3_file, "--case", "iii")
        assert code == 3
        assert "nu" in err


class TestFloatMode:
    def test_certify_float_mode(self, capsys, a3_file):
        code, out, _ = run_cli(capsys, "certify", a3_file, "--mode", "float", "--depth", "6")
        assert code == 0
        assert "arithmetic: float" in out

    def test_check_float_mode(self, capsys, seq_file):
        code, out, _ = run_cli(capsys, "moments", "check", seq_file, "--mode", "float")
        assert code == 1
        assert "eigenvalue" in out


class TestInfiniteStemReduce:
    def test_generated_family_reduction(self, capsys, tmp_path):
        doc = {
            "tree": {"kind": "eta_kappa", "eta": 2, "kappa": "inf"},
            "weights": {
                "map": {
                    "0": {"sq": "4/3"}, "-1": {"sq": "6/5"}, "-2": {"sq": "10/9"},
                    "-3": {"sq": "18/17"}, "-4": {"sq": "34/33"}, "-5": {"sq": "66/65"},
                    "(1,1)": {"sq": "1/2"}, "(2,1)": {"sq": "1/1"}
                },
                "rules": [
                    {"branch": 1, "formula": "ratio_of_moments", "measure": {"atoms": [["1/1", "1/1"]]}},
                    {"branch": 2, "formula": "ratio_of_moments", "measure": {"atoms": [["2/1", "1/1"]]}}
                ]
            },
            "measures": [{"atoms": [["1/1", "1/1"]]}, {"atoms": [["2/1", "1/1"]]}],
            "mode": "exact"
        }
        path = tmp_path / "inf.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        code, out, _ = run_cli(capsys, "reduce", str(path), "--base", "0",
                               "--kmax", "3", "--depth", "6")
        assert code == 0
        assert "des[-3]:widly1p" in out
