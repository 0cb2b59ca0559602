import dataclasses
import io
import json

import pytest

import cli
from atlas import read_atlas_csv
from cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, EXIT_USAGE, render_json, run_command


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def write_doc(tmp_path, doc, name="input.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_check_iq(fixture_dir):
    code, out, _ = run("check", fixture_dir / "iq.json")
    assert code == EXIT_OK
    assert "mt_rank = 2" in out
    assert "theorem_holds = true" in out


@pytest.mark.parametrize("name", ["iq", "c4", "c2xc4", "d4"])
def test_check_json_round_trips(fixture_dir, name):
    code, out, _ = run("check", fixture_dir / f"{name}.json", "--json")
    assert code == EXIT_OK
    assert render_json(json.loads(out)) + "\n" == out


def test_check_reports_failure(fixture_dir, monkeypatch):
    real = cli.check_main_theorem
    monkeypatch.setattr(cli, "check_main_theorem", lambda t: dataclasses.replace(real(t), theorem_holds=False))
    code, out, _ = run("check", fixture_dir / "c4.json")
    assert code == EXIT_FAILED
    assert "theorem_holds = false" in out


def test_validate_prints_element_order(fixture_dir):
    code, out, _ = run("validate", fixture_dir / "d4.json")
    assert code == EXIT_OK
    assert "group D4 of order 8" in out
    assert "  1: [1,2,3,0]" in out
    assert "conjugate pairs: 0-2 1-3" in out
    assert out.rstrip().endswith("valid")


def test_validate_rejects_non_involution(tmp_path):
    path = write_doc(tmp_path, {"group": {"cyclic": 4}, "H": [0], "c": 1})
    code, out, _ = run("validate", path)
    assert code == EXIT_INVALID
    assert "NotInvolution" in out


def test_validate_rejects_bad_cm_type(tmp_path):
    path = write_doc(tmp_path, {"group": {"cyclic": 4}, "H": [0], "c": 2, "phi": [0, 2]})
    code, out, _ = run("validate", path)
    assert code == EXIT_INVALID
    assert "NotDisjointFromConjugate" in out


def test_output_is_deterministic(fixture_dir):
    first = run("mt", fixture_dir / "d4.json")
    second = run("mt", fixture_dir / "d4.json")
    assert first == second
    assert str(fixture_dir) not in first[1]


def test_mt_of_degenerate_type(fixture_dir):
    code, out, _ = run("mt", fixture_dir / "c2xc4.json", "--json")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert payload["mt_rank"] == 2
    assert payload["degenerate"] is True
    assert payload["primitive"] is False
    assert payload["descent"] == {"H": [0, 1, 2, 3], "phi": [0]}
    assert len(payload["relations"]) == 6


def test_reflex_of_d4(fixture_dir):
    code, out, _ = run("reflex", fixture_dir / "d4.json", "--json")
    assert code == EXIT_OK
    assert json.loads(out) == {"h_e": [0, 4], "reflex_degree": 4, "phi_e": [0, 2]}
    code, out, _ = run("reflex", fixture_dir / "c4.json")
    assert out.splitlines() == ["h_e = [0]", "reflex_degree = 4", "phi_e = [0, 3]"]


def test_subgroup_by_generators(tmp_path):
    path = write_doc(tmp_path, {"group": {"dihedral": 4}, "H": {"generators": [2]}, "c": 3, "phi": [0, 1]})
    code, out, _ = run("reflex", path, "--json")
    assert code == EXIT_OK
    assert json.loads(out)["h_e"] == [0, 4]


def test_enumerate_family_to_csv(tmp_path):
    path = tmp_path / "out.csv"
    code, out, _ = run("enumerate", "--family", "cyclic", "--max-order", 16, "--csv", path)
    assert code == EXIT_OK
    assert "failed = 0" in out
    df = read_atlas_csv(path)
    assert set(df["theorem"]) == {"true"}
    assert set(df["factorization"]) == {"true"}


def test_enumerate_file_to_json(tmp_path, fixture_dir):
    path = tmp_path / "out.json"
    code, out, _ = run("enumerate", "--file", fixture_dir / "c4.json", "--dedupe", "--json", path)
    assert code == EXIT_OK
    # all four CM types on C4 are translates of one another
    assert "records = 1" in out
    assert len(json.loads(path.read_text())) == 1


def test_enumerate_all_subfields_from_file(fixture_dir):
    code, out, _ = run("enumerate", "--file", fixture_dir / "d4.json", "--all-subfields")
    assert code == EXIT_OK
    # 16 types on the trivial subgroup and 4 on each of four reflection subgroups
    assert "records = 32" in out


def test_weights_with_classes(fixture_dir):
    code, out, _ = run("weights", fixture_dir / "iq.json", "-m", 1, "-n", 1, "-r", 0, "--classes", "--json")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert (payload["hodge_classes"], payload["tate_classes"], payload["agree"]) == (2, 2, True)
    code, out, _ = run("weights", fixture_dir / "iq.json", "-m", 1, "-n", 0, "-r", -1)
    assert code == EXIT_OK
    assert out.splitlines()[0] == "V(1, 0, -1): 2 weights with multiplicity"


def test_weights_cap(fixture_dir, monkeypatch):
    monkeypatch.setattr("settings.WEIGHT_CAP", 10)
    code, _, err = run("weights", fixture_dir / "c4.json", "-m", 2, "-n", 0, "-r", 0)
    assert code == EXIT_INVALID
    assert "CapExceeded" in err


def test_algebra(tmp_path):
    doc = {
        "group": {"dihedral": 4},
        "c": 3,
        "components": [{"H": [0, 2], "phi": [0, 1]}, {"H": [0], "phi": [0, 1, 2, 4]}],
    }
    code, out, _ = run("algebra", write_doc(tmp_path, doc), "--json")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert payload["theorem_holds"] is True
    assert len(payload["components"]) == 2


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["enumerate", "--family", "cyclic"],
    ["enumerate", "--family", "cyclic", "--max-order", "8", "--workers", "0"],
    ["enumerate", "--file", "x.json", "--family", "cyclic", "--max-order", "8"],
    ["enumerate", "--family", "cyclic", "--max-order", "8", "--csv", "a", "--json", "b"],
    ["enumerate", "--family", "explicit", "--max-order", "8"],
    ["enumerate", "--family", "cyclic", "--max-order", "8", "--groups", "g.json"],
    ["weights", "x.json", "-m", "1"],
])
def test_usage_errors(argv):
    code, _, _ = run(*argv)
    assert code == EXIT_USAGE


def test_unreadable_and_malformed_files(tmp_path):
    code, _, err = run("check", tmp_path / "missing.json")
    assert code == EXIT_INVALID
    assert "UnreadableFile" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run("check", bad)
    assert code == EXIT_INVALID
    assert "BadJson" in err
    code, _, err = run("check", write_doc(tmp_path, {"group": {"cyclic": 4}, "c": 2}))
    assert code == EXIT_INVALID
    assert "MissingField" in err


def test_weights_cap_with_huge_exponent(fixture_dir):
    code, _, err = run("weights", fixture_dir / "iq.json", "-m", 100000000, "-n", 0, "-r", 0)
    assert code == EXIT_INVALID
    assert "CapExceeded" in err
    assert "m + n = 100000000" in err


@pytest.mark.parametrize("doc, code_name", [
    ({"group": {"table": [1, 2]}, "H": [0], "c": 1, "phi": [0]}, "BadSpec"),
    ({"group": {"perms": [5]}, "H": [0], "c": 1, "phi": [0]}, "BadSpec"),
    ({"group": {"perms": [[1, 0.5]]}, "H": [0], "c": 1, "phi": [0]}, "BadSpec"),
    ({"group": {"cyclic": 2}, "H": [0], "c": 1, "phi": 5}, "NotAnIndexList"),
    ({"group": {"cyclic": 2}, "H": [0], "c": 1, "phi": ["0"]}, "NotAnIndexList"),
])
def test_malformed_values_are_diagnosed(tmp_path, doc, code_name):
    code, _, err = run("check", write_doc(tmp_path, doc))
    assert code == EXIT_INVALID
    assert code_name in err


def test_enumerate_explicit_groups(tmp_path):
    groups = write_doc(tmp_path, [{"cyclic": 4}, {"dihedral": 4}, {"cyclic": 32}], name="groups.json")
    code, out, _ = run("enumerate", "--family", "explicit", "--groups", groups, "--max-order", 8)
    assert code == EXIT_OK
    # C4 has 4 types and D4 has 16; C32 is over the bound
    assert "records = 20" in out
    wrapped = write_doc(tmp_path, {"groups": [{"cyclic": 2}]}, name="wrapped.json")
    code, out, _ = run("enumerate", "--family", "explicit", "--groups", wrapped, "--max-order", 8)
    assert code == EXIT_OK
    assert "records = 2" in out


def test_enumerate_explicit_rejects_bad_group_list(tmp_path):
    groups = write_doc(tmp_path, {"cyclic": 4}, name="groups.json")
    code, _, err = run("enumerate", "--family", "explicit", "--groups", groups, "--max-order", 8)
    assert code == EXIT_INVALID
    assert "MissingField" in err


def test_enumerate_oversized_data_exit_invalid(monkeypatch):
    monkeypatch.setattr("settings.G_DIM_CAP", 2)
    code, out, _ = run("enumerate", "--family", "cyclic", "--max-order", 8)
    assert code == EXIT_INVALID
    assert "failed = 2" in out


def test_enumerate_failed_check_exit_failed(monkeypatch):
    def broken(t):
        raise RuntimeError("boom")

    monkeypatch.setattr("atlas.check_main_theorem", broken)
    code, out, _ = run("enumerate", "--family", "cyclic", "--max-order", 4)
    assert code == EXIT_FAILED
    assert "RuntimeError: boom" in out
