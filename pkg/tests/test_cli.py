import json
import subprocess
import sys

import pytest

from cptk.cli import main
from cptk.langs import expr_to_json, FULL, LeftMark, Predicate, Complement


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture
def reg_family_file(tmp_path):
    return write(tmp_path, "family.json", {"alphabet": "ab", "builtin": "regular"})


@pytest.fixture
def length_family_file(tmp_path):
    return write(tmp_path, "length.json", {"alphabet": "ab", "builtin": "length"})


def run_main(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_lex(capsys):
    code, out, _ = run_main(["lex", "--alphabet", "ab", "--count", "4"], capsys)
    assert code == 0
    assert out == "\na\nb\naa\n"


def test_lex_order_override(capsys):
    code, out, _ = run_main(["lex", "--alphabet", "ab", "--order", "ba",
                             "--count", "4"], capsys)
    assert code == 0
    assert out == "\nb\na\nbb\n"


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_solve_marker_problem(tmp_path, capsys, reg_family_file):
    problem = write(tmp_path, "problem.json", {
        "alphabet": "ab",
        "condition": None,
        "components": [expr_to_json(LeftMark("a", FULL)),
                       expr_to_json(LeftMark("b", FULL))],
    })
    code, out, err = run_main(["solve", "--problem", problem,
                               "--family", reg_family_file,
                               "--index-bound", "3700"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["result"] == "certified"
    assert report["indices"] == [3664, 3659]
    assert report["status"] == "exact"
    assert "certified" in err


def test_solve_not_found_exits_4(tmp_path, capsys, reg_family_file):
    eq = Predicate("equal-counts-ab")
    problem = write(tmp_path, "problem.json", {
        "alphabet": "ab", "condition": None,
        "components": [expr_to_json(eq), expr_to_json(Complement(eq))],
    })
    code, out, _ = run_main(["solve", "--problem", problem,
                             "--family", reg_family_file,
                             "--index-bound", "120"], capsys)
    assert code == 4
    report = json.loads(out)
    assert report["result"] == "not-found"
    assert report["index_bound"] == 120


def test_solve_bad_problem_exits_3(tmp_path, capsys, reg_family_file):
    problem = write(tmp_path, "problem.json", {
        "alphabet": "ab", "condition": None,
        "components": [expr_to_json(FULL), expr_to_json(LeftMark("a", FULL))],
    })
    code, _, err = run_main(["solve", "--problem", problem,
                             "--family", reg_family_file], capsys)
    assert code == 3
    assert "overlap" in err


def test_malformed_json_exits_2(tmp_path, capsys, reg_family_file):
    bad = tmp_path / "bad.json"
    bad.write_text('{"alphabet": "ab", }')
    code, _, err = run_main(["solve", "--problem", str(bad),
                             "--family", reg_family_file], capsys)
    assert code == 2
    assert "line" in err and "column" in err


def test_laws(tmp_path, capsys, reg_family_file):
    code, out, err = run_main(["laws", "--family", reg_family_file,
                               "--law", "deMorgan", "--samples", "10",
                               "--horizon", "150"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["reports"][0]["disagreements"] == 0
    assert "deMorgan" in err


def test_cohesive_refuted_exits_0(tmp_path, capsys, reg_family_file):
    target = write(tmp_path, "target.json", {
        "alphabet": "ab",
        "expr": {"dfa": {"states": 2, "initial": 0,
                          "transitions": [[0, 1], [1, 1]], "accepting": [0]}},
    })
    code, out, _ = run_main(["cohesive", "--target", target,
                             "--family", reg_family_file,
                             "--index-bound", "100"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["status"] == "refuted" and report["exact"]


def test_cohesive_consistent_exits_4(tmp_path, capsys, length_family_file):
    target = write(tmp_path, "target.json", {
        "alphabet": "ab", "expr": expr_to_json(LeftMark("a", FULL))})
    code, out, _ = run_main(["cohesive", "--target", target,
                             "--family", length_family_file,
                             "--index-bound", "30"], capsys)
    assert code == 4
    assert json.loads(out)["status"] == "consistent"


def test_hardcore_and_verify_roundtrip(tmp_path, capsys, length_family_file):
    target = write(tmp_path, "target.json",
                   {"alphabet": "ab", "expr": expr_to_json(FULL)})
    trace_path = str(tmp_path / "trace.jsonl")
    code, out, _ = run_main(["hardcore", "--family", length_family_file,
                             "--target", target, "--steps", "63",
                             "--trace", trace_path], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["accepted"] == ["a", "aa", "aaa", "aaaa", "aaaaa"]
    code, out, _ = run_main(["verify-trace", "--trace", trace_path,
                             "--family", length_family_file,
                             "--target", target], capsys)
    assert code == 0
    assert json.loads(out)["ok"]
    # tamper: flip one report line
    lines = open(trace_path).read().splitlines()
    entry = json.loads(lines[1])
    entry["action"] = "accepted"
    entry["card"] += 1
    lines[1] = json.dumps(entry, sort_keys=True, separators=(",", ":"))
    open(trace_path, "w").write("\n".join(lines) + "\n")
    code, out, _ = run_main(["verify-trace", "--trace", trace_path,
                             "--family", length_family_file,
                             "--target", target], capsys)
    assert code == 5
    assert not json.loads(out)["ok"]


def test_hardcore_reproducible_byte_for_byte(tmp_path, capsys, length_family_file):
    target = write(tmp_path, "t.json", {"alphabet": "ab", "expr": expr_to_json(FULL)})
    outputs = []
    for run in range(2):
        trace_path = str(tmp_path / f"trace{run}.jsonl")
        out_path = str(tmp_path / f"out{run}.json")
        code, _, _ = run_main(["hardcore", "--family", length_family_file,
                               "--target", target, "--steps", "100",
                               "--trace", trace_path, "--out", out_path], capsys)
        assert code == 0
        outputs.append(open(trace_path).read() + "|" + open(out_path).read())
    assert outputs[0].split("|")[0] == outputs[1].split("|")[0]
    # reports differ only in the echoed file paths; strip them
    r0 = json.loads(outputs[0].split("|")[1])
    r1 = json.loads(outputs[1].split("|")[1])
    r0["config"].pop("trace"), r1["config"].pop("trace")
    r0["config"].pop("out"), r1["config"].pop("out")
    assert r0 == r1


def test_make_ziegler_and_solve_pair(tmp_path, capsys):
    base = write(tmp_path, "base.json", {"alphabet": "abc",
                                         "expr": {"predicate": "square-length"}})
    out_path = str(tmp_path / "problem.json")
    code, _, _ = run_main(["make", "ziegler", "--base", base, "--out", out_path],
                          capsys)
    assert code == 0
    data = json.load(open(out_path))
    assert len(data["components"]) == 3 and data["condition"] is None


def test_make_example26(tmp_path, capsys):
    base = write(tmp_path, "base.json", {"alphabet": "ab",
                                         "expr": {"predicate": "square-length"}})
    code, out, _ = run_main(["make", "example26", "--base", base], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["condition"] is not None and len(data["components"]) == 2


def test_make_degenerate_exits_3(tmp_path, capsys):
    base = write(tmp_path, "base.json", {"alphabet": "ab",
                                         "expr": expr_to_json(FULL)})
    code, _, err = run_main(["make", "example26", "--base", base], capsys)
    assert code == 3


def test_ccore_subcommand(tmp_path, capsys, reg_family_file):
    problem = write(tmp_path, "p.json", {
        "alphabet": "ab",
        "condition": expr_to_json(LeftMark("b", FULL)),
        "components": [expr_to_json(LeftMark("a", FULL))],
    })
    code, out, _ = run_main(["ccore", "--problem", problem,
                             "--family", reg_family_file,
                             "--index-bound", "3700"], capsys)
    assert code == 0
    assert json.loads(out)["ccore_status"] == "refuted"


def test_console_script_entrypoint():
    proc = subprocess.run([sys.executable, "-m", "cptk.cli", "lex",
                           "--alphabet", "ab", "--count", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "\na\nb\n"
