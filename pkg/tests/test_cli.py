import json
import os

import pytest

from confalg.cli import main

SPEC_DIR = os.path.join(os.path.dirname(__file__), "..", "specs")


def spec(name):
    return os.path.join(SPEC_DIR, name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_axioms_passes_on_a_shipped_description(capsys):
    code, out, err = run(
        capsys, "check-axioms", spec("cur_matrix2.json"), "--samples", "40"
    )
    assert code == 0
    report = json.loads(out)
    assert report["ok"] is True
    assert err == ""


def test_product_output_is_exact(capsys):
    code, out, _ = run(capsys, "product", spec("cend1.json"), "L1", "1", "L1")
    assert code == 0
    report = json.loads(out)
    assert report["result"] == {"x": {"0": "-1"}}
    assert report["text"] == "(-1)*x~"


def test_product_rejects_unknown_elements(capsys):
    code, out, err = run(capsys, "product", spec("cend1.json"), "L1", "0", "nope")
    assert code == 2
    assert out == ""
    assert "unknown element" in err


def test_output_bytes_are_deterministic(capsys):
    argv = ("table", spec("cend1.json"))
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    # keys arrive sorted, so the serialization is canonical
    assert json.dumps(json.loads(out1), sort_keys=True, indent=2) + "\n" == out1


def test_text_mode_renders_lines_not_json(capsys):
    code, out, _ = run(capsys, "locality", spec("cend1.json"), "L1", "L1", "--text")
    assert code == 0
    assert "locality: 1" in out
    with pytest.raises(json.JSONDecodeError):
        json.loads(out)


def test_locality_cap_yields_exit_one_and_a_bound(capsys):
    code, out, _ = run(
        capsys, "locality", spec("cend1.json"), "L2", "L2", "--cap", "1"
    )
    assert code == 1
    report = json.loads(out)
    assert report["error"] == "indeterminate"
    assert report["structural_bound"] == 2


def test_oracle_check_small_run(capsys):
    code, out, _ = run(
        capsys,
        "oracle-check",
        spec("cend1.json"),
        "--samples",
        "5",
        "--window",
        "5",
        "--degree",
        "3",
    )
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_assoc_check_small_run(capsys):
    code, out, _ = run(
        capsys, "assoc-check", spec("cend1.json"), "--samples", "20"
    )
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_untwist_reports_the_certified_identity(capsys):
    code, out, _ = run(capsys, "untwist", spec("dif_matrix2_ad_e12.json"))
    assert code == 0
    report = json.loads(out)
    assert report["certified"] is True
    assert report["pure_current_images"] is True
    assert report["roundtrip_exact"] is True
    assert report["nilpotency"] == 2
    assert report["e_prime"] == {"e11": {"0": "1"}, "e22": {"0": "1"}, "e12": {"1": "1"}}


def test_is_current_negative_and_control(capsys):
    code, out, _ = run(
        capsys, "is-current", spec("noncur.json"), "a", "--degree", "4"
    )
    assert code == 0
    report = json.loads(out)
    assert report["current"] is False
    assert report["witness"] is None


def test_is_current_needs_a_subalgebra(capsys):
    code, _, err = run(capsys, "is-current", spec("cur_matrix2.json"), "e12")
    assert code == 2
    assert "no subalgebra" in err


def test_dual_identity_consistent_pair(capsys):
    code, out, _ = run(
        capsys, "dual-identity", spec("dif_matrix2_ad_e12.json"), "ePrime", "companion"
    )
    assert code == 0
    report = json.loads(out)
    assert report["consistent"] is True
    assert report["action_consistent"] is True


def test_dual_identity_flags_a_corrupted_candidate(tmp_path, capsys):
    doc = json.load(open(spec("dif_matrix2_ad_e12.json")))
    bad = dict(doc["elements"]["ePrime"])
    bad["e11"] = {"0": "1", "2": "1"}
    doc["elements"]["badE"] = bad
    p = tmp_path / "corrupted.json"
    p.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "dual-identity", str(p), "badE")
    assert code == 1
    report = json.loads(out)
    assert report["consistent"] is False
    assert report["recursion_failures"]


def test_ideal_check_on_the_triangular_description(capsys):
    code, out, _ = run(
        capsys, "ideal-check", spec("ideal_triangular.json"), "J", "--degree", "0"
    )
    assert code == 0
    report = json.loads(out)
    assert report["slice_dimension"] == 1
    assert report["base_index"] == 2
    assert report["conformal_index"] == 2
    assert report["indices_agree"] is True
    assert report["roundtrip_ok"] is True


def test_unital_split_report(capsys):
    code, out, _ = run(
        capsys, "unital-split", spec("cend1.json"), "one", "--degree", "2"
    )
    assert code == 0
    report = json.loads(out)
    assert report["identity_certified"] is True
    assert report["kernel_rank"] == 0


def test_kernel_decompose_roundtrip(capsys):
    code, out, _ = run(capsys, "kernel-decompose", spec("cend1.json"), "x^2")
    assert code == 0
    report = json.loads(out)
    assert report["components"] == {"2": {"1": "2"}}
    assert report["roundtrip_ok"] is True


def test_gk_classification(capsys):
    code, out, _ = run(capsys, "gk", spec("cur_matrix2.json"), "--rmax", "4")
    assert code == 0
    report = json.loads(out)
    assert report["classification"] == "zero_growth"
    assert report["ranks"]["4"] == 4


def test_missing_description_file_is_a_usage_error(capsys):
    code, out, err = run(capsys, "table", spec("absent.json"))
    assert code == 2
    assert out == ""
    assert "error:" in err


def test_unknown_command_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate", "x.json"])
    assert exc.value.code == 2
