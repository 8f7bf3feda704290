import json

import pytest

from mqtorsion.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestJacStructure:
    def test_x18_f49(self, capsys):
        code, out, _ = run(capsys, "jac-structure", "--model", "X1(18)", "--prime", "7", "--deg", "2")
        assert code == 0
        payload = json.loads(out)
        assert payload["structure"] == [3, 651]
        assert payload["zeta_check"]["order"] == 1953

    def test_x13_f25(self, capsys):
        code, out, _ = run(capsys, "jac-structure", "--model", "X1(13)", "--prime", "5", "--deg", "2")
        assert code == 0
        assert json.loads(out)["order"] == 361

    def test_even_prime_exit_2(self, capsys):
        code, _, err = run(capsys, "jac-structure", "--model", "X1(13)", "--prime", "2")
        assert code == 2 and "error" in err

    def test_unknown_model_exit_2(self, capsys):
        code, _, _ = run(capsys, "jac-structure", "--model", "X1(99)", "--prime", "3")
        assert code == 2


class TestTorsion:
    def test_x15_closed(self, capsys):
        code, out, _ = run(capsys, "torsion", "--model", "X1(15)", "--field=-3,5")
        assert code == 0
        payload = json.loads(out)
        assert payload["closed"] and payload["lower"] == [2, 8]

    def test_x11_over_q23(self, capsys):
        code, out, _ = run(capsys, "torsion", "--model", "X1(11)", "--field", "2,3")
        assert code == 0 and json.loads(out)["lower"] == [5]

    def test_precondition_exit_2(self, capsys):
        code, _, err = run(capsys, "torsion", "--model", "X1(4,8)", "--field", "Q")
        assert code == 2 and "sqrt(-1)" in err

    def test_table_mode(self, capsys):
        code, out, _ = run(capsys, "torsion", "--model", "X1(16)", "--field=-2", "--mode", "table")
        assert code == 0 and json.loads(out)["lower"] == [2, 10]

    def test_external_model_file(self, capsys, tmp_path):
        path = tmp_path / "model.json"
        path.write_text(json.dumps({
            "label": "ext-11", "level": [1, 11], "genus": 1,
            "base_field": "Q", "coeffs": [0, -1, -1, 0, 0],
            "source": "external test model",
        }))
        code, out, _ = run(capsys, "torsion", "--model", str(path), "--field", "Q", "--primes", "3,5")
        assert code == 0 and json.loads(out)["lower"] == [5]
        code, _, err = run(capsys, "torsion", "--model", str(path), "--field", "Q", "--mode", "table")
        assert code == 2

    def test_byte_identical_runs(self, capsys):
        _, out1, _ = run(capsys, "torsion", "--model", "X1(14)", "--field=-7")
        _, out2, _ = run(capsys, "torsion", "--model", "X1(14)", "--field=-7")
        assert out1 == out2

    def test_formats_carry_same_data(self, capsys):
        _, outj, _ = run(capsys, "torsion", "--model", "X1(11)", "--field", "Q")
        _, outt, _ = run(capsys, "torsion", "--model", "X1(11)", "--field", "Q", "--format", "tsv")
        payload = json.loads(outj)
        lines = dict(line.split("\t", 1) for line in outt.strip().splitlines())
        assert json.loads(lines["lower"]) == payload["lower"]
        assert lines["closed"] == str(payload["closed"])


class TestClassify:
    def test_14_exactly_two(self, capsys):
        code, out, _ = run(capsys, "classify", "--torsion", "14", "--field=-7", "--ranks", "defaults")
        assert code == 0
        payload = json.loads(out)
        assert payload["existence"] == "exactly" and payload["count"] == 2
        assert len(payload["exceptional_curves"]) == 2

    def test_13_conditional_exit_0(self, capsys):
        code, out, _ = run(capsys, "classify", "--torsion", "13", "--field=-3,5")
        assert code == 0
        assert json.loads(out)["existence"] == "no_conclusion"

    def test_6x6_precondition_exit_2(self, capsys):
        code, _, _ = run(capsys, "classify", "--torsion", "6x6", "--field", "2")
        assert code == 2

    def test_custom_rank_file(self, capsys, tmp_path):
        path = tmp_path / "ranks.json"
        path.write_text(json.dumps({"ranks": [
            {"jacobian": "X1(11)", "twist": 1, "rank": 1, "source": "test fixture"}
        ]}))
        code, out, _ = run(capsys, "classify", "--torsion", "11", "--field", "Q", "--ranks", str(path))
        assert code == 0 and json.loads(out)["existence"] == "infinitely_many"


class TestVerify:
    def test_only_model(self, capsys):
        code, out, _ = run(capsys, "verify", "--only", "X1(11)")
        assert code == 0
        assert "pass  model-integrity X1(11)" in out
        assert "pass  torsion-matrix X1(11)" in out

    def test_only_scan(self, capsys):
        code, out, _ = run(capsys, "verify", "--only", "scan")
        assert code == 0 and "no order-16" in out

    def test_only_exceptional(self, capsys):
        code, out, _ = run(capsys, "verify", "--only", "exceptional")
        assert code == 0 and out.count("pass") >= 4

    def test_unknown_group_exit_2(self, capsys):
        code, _, _ = run(capsys, "verify", "--only", "bogus")
        assert code == 2
