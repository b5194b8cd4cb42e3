"""Tests for the command-line front end: parsing, suites, files, exit codes."""

import hashlib
import json

import pytest

from hyperstab import cli
from hyperstab.cli import Check, SuiteResult, main


# --------------------------------------------------------------------------
# check bookkeeping
# --------------------------------------------------------------------------

def test_check_validates_status_and_source():
    with pytest.raises(ValueError):
        Check("x", "maybe", "1", "1", "oracle")
    with pytest.raises(ValueError):
        Check("x", "pass", "1", "1", "guesswork")


def test_suite_result_counts_and_payload():
    result = SuiteResult(
        "demo",
        (
            Check("a", "pass", "1", "1", "identity"),
            Check("b", "fail", "1", "2", "oracle"),
            Check("c", "skipped", "1", "-", "tabulated"),
        ),
    )
    assert result.counts() == {"pass": 1, "fail": 1, "skipped": 1}
    assert result.failed() == 1
    payload = result.payload()
    assert payload["suite"] == "demo"
    assert [c["id"] for c in payload["checks"]] == ["a", "b", "c"]


def test_render_helpers():
    assert cli._render_classes({}) == "0"
    assert cli._render_classes({0: 1, 12: 2}) == "Q(0) + 2Q(-12)"
    assert cli._render_tate({0: 1, 1: 1, 6: 1}) == "1 + L + L^6"
    assert cli._render_tate({2: 3}) == "3L^2"


# --------------------------------------------------------------------------
# stable
# --------------------------------------------------------------------------

def test_stable_markdown_reproduces_reference_rows(capsys):
    assert main(["stable", "--max-deg", "18", "--regime", "n0"]) == 0
    out = capsys.readouterr().out
    assert "| 0 | Q(0) |" in out
    assert "| 12 | Q(-9) + Q(-10) |" in out
    assert "| 17 | 3Q(-13) + 2Q(-14) + Q(-15) |" in out
    assert "| 18 | 2Q(-14) + 3Q(-15) |" in out
    assert out.count("\n| ") + out.startswith("| ") == 21  # header + 19 degree rows


def test_stable_max_deg_zero_single_row(capsys):
    assert main(["stable", "--max-deg", "0", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["rows"] == [{"i": 0, "classes": [{"mult": 1, "twist": 0}]}]


def test_stable_positive_regime_adds_degree_two_class(capsys):
    assert main(["stable", "--max-deg", "2", "--regime", "npos",
                 "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    rows = {row["i"]: row["classes"] for row in payload["rows"]}
    assert rows[2] == [{"mult": 1, "twist": 1}]
    assert payload["surface_index_regime"] == "n>0"


def test_stable_csv_lists_nonzero_cells(capsys):
    assert main(["stable", "--max-deg", "9", "--format", "csv"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "degree,twist,multiplicity"
    assert out[1:] == ["0,0,1", "8,6,1", "9,7,1"]


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------

def test_verify_example19_all_pass(capsys):
    assert main(["verify", "example19"]) == 0
    out = capsys.readouterr().out
    assert "suite example19: 19 passed, 0 failed, 0 skipped" in out


def test_verify_tables_passes_with_documented_skips(capsys):
    assert main(["verify", "tables"]) == 0
    out = capsys.readouterr().out
    assert "SKIP tables/e1-L5-entrywise" in out
    assert "SKIP tables/e1-L6-entrywise" in out
    assert "suite tables: 8 passed, 0 failed, 2 skipped" in out


def test_verify_counts_small_budget(capsys):
    assert main(["verify", "counts", "--jobs", "2"]) == 0
    out = capsys.readouterr().out
    assert "PASS counts/count-g2-l1-q3 [tabulated] expected stack count 108" in out
    assert "PASS counts/count-g2-l2-q3 [tabulated] expected stack count 323" in out
    assert "PASS counts/count-g2-l3-q3 [tabulated] expected stack count 968" in out
    assert "PASS counts/psi-roundtrip-g2-l1-q3" in out
    assert " 0 failed" in out


def test_verify_euler_window(capsys):
    assert main(["verify", "euler"]) == 0
    out = capsys.readouterr().out
    assert "lhs 1 + L + L^6, rhs 1 + L + L^6" in out
    assert "suite euler: 5 passed, 0 failed, 0 skipped" in out


def test_verify_ranks_reduced_trials(capsys):
    assert main(["verify", "ranks", "--trials", "3"]) == 0
    out = capsys.readouterr().out
    assert "suite ranks: 39 passed, 0 failed, 0 skipped" in out
    assert "PASS ranks/rank-below-bound-witness" in out


def test_verify_diffscan(capsys):
    assert main(["verify", "diffscan"]) == 0
    out = capsys.readouterr().out
    assert "suite diffscan: 8 passed, 0 failed, 0 skipped" in out


def test_verify_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["verify", "nonsense"])
    assert excinfo.value.code == 2


def test_verify_failing_check_exits_one(monkeypatch, capsys):
    failing = SuiteResult(
        "euler", (Check("euler-l1", "fail", "equal sides", "unequal", "oracle"),)
    )
    monkeypatch.setattr(cli, "suite_euler", lambda: failing)
    assert main(["verify", "euler"]) == 1
    out = capsys.readouterr().out
    assert "FAIL euler/euler-l1 [oracle] expected equal sides; got unequal" in out
    assert "total: 1 failing check(s)" in out


def test_verify_out_writes_suite_payload(tmp_path, capsys):
    assert main(["verify", "euler", "--out", str(tmp_path)]) == 0
    payload = json.loads((tmp_path / "verify.json").read_text())
    assert payload[0]["suite"] == "euler"
    ids = [check["id"] for check in payload[0]["checks"]]
    assert ids == ["euler-l1", "euler-l2", "euler-l3", "euler-l4", "euler-l4-window"]
    assert all(check["status"] == "pass" for check in payload[0]["checks"])
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "verify"
    assert manifest["inputs"]["suite"] == "euler"
    assert manifest["seeds"] == {"seed": 20260816}


# --------------------------------------------------------------------------
# e1
# --------------------------------------------------------------------------

def test_e1_markdown_columns(capsys):
    assert main(["e1", "--L", "3..4", "--d", "30", "--n", "0"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "| row | L=3 | L=4 |"
    assert "| -11 | Q(-6) |  |" in out


def test_e1_csv_and_list_syntax(capsys):
    assert main(["e1", "--L", "3,5", "--d", "14", "--n", "1", "--format", "csv"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "L,row,twist,multiplicity,contributing_types"
    assert set(line.split(",")[0] for line in out[1:]) == {"3", "5"}


def test_e1_rejects_empty_range_and_small_degree(capsys):
    assert main(["e1", "--L", "4..3", "--d", "30"]) == 2
    assert main(["e1", "--L", "3", "--d", "1", "--n", "1"]) == 2


# --------------------------------------------------------------------------
# m0n
# --------------------------------------------------------------------------

def test_m0n_layer_table(capsys):
    assert main(["m0n", "--n", "4"]) == 0
    out = capsys.readouterr().out
    assert "| 1 | [2, 2] | 1 |" in out


def test_m0n_json_layers(capsys):
    assert main(["m0n", "--n", "5", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n"] == 5
    layers = {layer["i"]: layer["classes"] for layer in payload["layers"]}
    assert layers[0] == {"[5]": 1}
    assert layers[1] == {"[3, 2]": 1}
    assert layers[2] == {"[3, 1, 1]": 1}


# --------------------------------------------------------------------------
# count
# --------------------------------------------------------------------------

def test_count_brute_reproduces_stack_count(capsys):
    assert main(["count", "--g", "2", "--l", "1", "--q", "3",
                 "--method", "brute"]) == 0
    out = capsys.readouterr().out
    assert "| 2 | 1 | 3 | brute | full | 279936 | 2592 | 108 | 108 | True |" in out


def test_count_csv_row(capsys):
    assert main(["count", "--g", "2", "--l", "3", "--q", "3",
                 "--format", "csv"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "g,l,q,method,variant,raw,group_order,stack,closed_form,match"
    assert out[1] == "2,3,3,coset,g0prime,278784,288,968,968,True"


def test_count_closed_only(capsys):
    assert main(["count", "--g", "3", "--l", "2", "--q", "3",
                 "--method", "closed", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["stack"] == 2916
    assert payload["raw"] is None and payload["match"] is None


def test_count_rejects_out_of_family_l(capsys):
    assert main(["count", "--g", "2", "--l", "9", "--q", "3"]) == 2
    assert "l must satisfy" in capsys.readouterr().err


# --------------------------------------------------------------------------
# rankcheck
# --------------------------------------------------------------------------

def test_rankcheck_report(capsys):
    assert main(["rankcheck", "--type", "2,0,0", "--d", "7", "--n", "1",
                 "--trials", "5"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["type"] == [2, 0, 0]
    assert report["expected_rank"] == 15
    assert report["failures"] == []
    assert report["seed"] == 20260816


def test_rankcheck_witness(capsys):
    assert main(["rankcheck", "--witness", "--trials", "6", "--format", "md"]) == 0
    out = capsys.readouterr().out
    assert "| failures | 6 trial(s) |" in out


def test_rankcheck_below_bound_is_usage_error(capsys):
    assert main(["rankcheck", "--type", "2,0,0", "--d", "4", "--n", "1"]) == 2
    assert "bound" in capsys.readouterr().err


def test_rankcheck_requires_type_or_witness(capsys):
    assert main(["rankcheck", "--d", "7"]) == 2


# --------------------------------------------------------------------------
# output files and manifests
# --------------------------------------------------------------------------

def test_out_files_are_byte_identical_across_reruns(tmp_path, capsys):
    first = tmp_path / "first"
    second = tmp_path / "second"
    for out_dir in (first, second):
        assert main(["count", "--g", "2", "--l", "2", "--q", "3",
                     "--out", str(out_dir)]) == 0
    for name in ("count.md", "manifest.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_manifest_hashes_match_written_files(tmp_path, capsys):
    assert main(["stable", "--max-deg", "8", "--format", "csv",
                 "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    digest = hashlib.sha256((tmp_path / "stable.csv").read_bytes()).hexdigest()
    assert manifest["outputs"]["stable.csv"] == f"sha256:{digest}"
    assert manifest["inputs"] == {
        "format": "csv", "max_deg": 8, "regime": "n0",
    }
    assert manifest["versions"].keys() == {"hyperstab", "numpy", "python"}
