"""Command-line interface: output contracts, exit codes, and determinism."""

import re
from pathlib import Path

import pytest

from pflab.cli import CSV_HEADER, main

SPEC_DIR = Path(__file__).resolve().parent.parent / "specs"
TWO_CONSTANT = str(SPEC_DIR / "two_constant.yaml")
OVERLAP = str(SPEC_DIR / "overlap_triple.yaml")
AGNOSTIC = str(SPEC_DIR / "agnostic_coin.yaml")


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def strip_runtime(text):
    return re.sub(r"(runtime_ms[:,] ?)\d+", r"\g<1>_", re.sub(r",\d+,(?=[01]$)", ",_,", text, flags=re.M))


def test_dim_worked_example(capsys):
    code, out, err = run(capsys, ["dim", TWO_CONSTANT, "--what", "pfl", "--depth", "1"])
    assert code == 0 and err == ""
    assert "value: 1" in out
    assert "task: dim/pfl" in out


def test_dim_witness(capsys):
    code, out, _ = run(capsys, ["dim", TWO_CONSTANT, "--what", "pfl", "--depth", "2", "--witness"])
    assert code == 0
    assert "value: 1" in out
    assert "witness" in out


def test_dim_csv_format(capsys):
    code, out, _ = run(capsys, ["dim", TWO_CONSTANT, "--what", "pfl", "--depth", "1",
                                "--format", "csv"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == CSV_HEADER
    fields = lines[1].split(",")
    assert fields[1] == "dim/pfl"
    assert fields[2] == "1"          # horizon
    assert (fields[5], fields[6]) == ("1", "1")  # value 1/1
    assert fields[8] == "0"          # exact, not grid-truncated


def test_rand_csv(capsys):
    code, out, _ = run(capsys, ["rand", OVERLAP, "--what", "regret", "--depth", "2",
                                "--grid", "6", "--format", "csv"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == CSV_HEADER
    fields = lines[1].split(",")
    assert (fields[5], fields[6]) == ("1", "3")
    assert fields[8] == "1"


def test_sweep_worked_example(capsys):
    code, out, _ = run(capsys, ["sweep", OVERLAP, "--task", "rand", "--what", "regret",
                                "--horizon", "1..4", "--grid", "6"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 5
    for T, row in zip((1, 2, 3, 4), lines[1:]):
        fields = row.split(",")
        assert fields[1] == "rand/regret"
        assert fields[2] == str(T)
        assert fields[4] == "6"
        assert (fields[5], fields[6]) == ("1", "3")
        assert fields[8] == "1"


def test_play_text_and_csv(capsys):
    code, out, _ = run(capsys, ["play", TWO_CONSTANT])
    assert code == 0
    assert "learner: cvsp" in out
    assert "loss: 1" in out
    assert "round 0: instance 0 predict 0 reveal 1 set {1}" in out

    code, out, _ = run(capsys, ["play", TWO_CONSTANT, "--format", "csv"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1].split(",")[1] == "play"


def test_play_strategy_override(capsys):
    code, out, _ = run(capsys, ["play", TWO_CONSTANT, "--adversary", "echo"])
    assert code == 0
    assert "adversary: echo" in out
    assert "loss: 0" in out


def test_play_requires_a_learner_somewhere(capsys):
    code, _, err = run(capsys, ["play", AGNOSTIC, "--learner", "cvsp", "--adversary",
                                "agnostic_two_constant"])
    assert code == 0
    # the agnostic sample names both strategies, so bare play also works
    code, _, _ = run(capsys, ["play", AGNOSTIC])
    assert code == 0


def test_setsys_report(capsys):
    code, out, _ = run(capsys, ["setsys", OVERLAP])
    assert code == 0
    assert "helly: 3" in out
    assert "condition1_holds: False" in out
    assert "condition2_holds: True (witness p = 3)" in out
    assert "nested_empty_chain: none" in out
    code, out, _ = run(capsys, ["setsys", OVERLAP, "--p", "2"])
    assert code == 0
    assert "condition2_holds: False" in out


def test_replicate_single_check(capsys):
    code, out, _ = run(capsys, ["replicate", "--only", "det-minimax-equals-dimension"])
    assert code == 0
    assert "det-minimax-equals-dimension" in out
    assert "pass" in out.lower()


def test_replicate_unknown_check(capsys):
    code, _, err = run(capsys, ["replicate", "--only", "no-such-check"])
    assert code == 2
    assert "no-such-check" in err


def test_exit_code_spec_errors(capsys):
    code, _, err = run(capsys, ["dim", str(SPEC_DIR / "missing.yaml"), "--what", "pfl",
                                "--depth", "1"])
    assert code == 2
    assert "spec error" in err


def test_exit_code_budget(capsys):
    code, _, err = run(capsys, ["dim", TWO_CONSTANT, "--what", "pfl", "--depth", "20",
                                "--witness"])
    assert code == 3
    assert "budget rejected" in err


def test_unknown_key_is_a_spec_error(capsys, tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text(
        "labels: 2\ninstances: 1\nset_system: [[0], [1]]\n"
        "hypotheses: [[0], [1]]\nhorizon: 1\nmystery: 1\n"
    )
    code, _, err = run(capsys, ["dim", str(bad), "--what", "pfl", "--depth", "1"])
    assert code == 2
    assert "mystery" in err


def test_output_file(capsys, tmp_path):
    target = tmp_path / "rows.csv"
    code, out, _ = run(capsys, ["sweep", OVERLAP, "--task", "rand", "--what", "regret",
                                "--horizon", "1..2", "--grid", "6", "-o", str(target)])
    assert code == 0
    text = target.read_text()
    assert text.startswith(CSV_HEADER)
    assert len(text.strip().splitlines()) == 3


def test_determinism_up_to_runtime(capsys):
    argv = ["rand", OVERLAP, "--what", "regret", "--depth", "2", "--grid", "6",
            "--format", "csv"]
    _, first, _ = run(capsys, argv)
    _, second, _ = run(capsys, argv)
    assert strip_runtime(first) == strip_runtime(second)


def test_prefix_dim(capsys):
    code, out, _ = run(capsys, ["dim", TWO_CONSTANT, "--what", "ppfl", "--depth", "2",
                                "--prefix-x", "0", "--prefix-y", "1", "--prefix-reveal", "1"])
    assert code == 0
    assert "value: 0" in out
