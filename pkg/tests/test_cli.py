"""The command line surface, driven in process through main()."""

import json

import pytest

from relim.cli import main

from conftest import FIXTURES, load_fixture

SINKLESS = str(FIXTURES / "sinkless.problem")
MIS = str(FIXTURES / "mis.problem")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ---------------------------------------------------------------------------
# rewrites


def test_re_prints_the_rewritten_problem(capsys):
    code, out, err = run(capsys, "re", SINKLESS)
    assert code == 0
    assert out == (
        "delta: 3\n"
        "nodes:\n"
        "I^2 O\n"
        "I O^2\n"
        "O^3\n"
        "edges:\n"
        "I O\n"
        "provenance:\n"
        "I = { I }\n"
        "O = { O }\n")


def test_speedup_reaches_the_one_round_form(capsys):
    code, out, err = run(capsys, "speedup", SINKLESS)
    assert code == 0
    assert out == (
        "delta: 3\n"
        "nodes:\n"
        "I_O^2 O\n"
        "edges:\n"
        "I_O [I_O O]\n"
        "provenance:\n"
        "I_O = { I O }\n"
        "O = { O }\n")


def test_speedup_of_independent_set_is_stable(capsys):
    code, out, err = run(capsys, "speedup", MIS)
    assert code == 0
    assert "M_M_O^3" in out
    assert out.count("delta: 3") == 1


def test_rewrite_json_output_carries_the_problem(capsys):
    code, out, err = run(capsys, "re", SINKLESS, "--json")
    assert code == 0
    data = json.loads(out)
    assert data["alphabet"] == ["I", "O"]
    assert data["delta"] == 3


# ---------------------------------------------------------------------------
# zero-round and relaxation


def test_zero_round_reports_no_for_the_fixtures(capsys):
    code, out, err = run(capsys, "zero-round", MIS)
    assert code == 0
    assert out == "zero-round solvable: no\n"


def test_zero_round_reports_the_witness(capsys, tmp_path):
    path = tmp_path / "free.problem"
    path.write_text("delta: 3\nnodes:\nX^3\nedges:\nX X\n")
    code, out, err = run(capsys, "zero-round", str(path))
    assert code == 0
    assert out == "zero-round solvable: yes\nwitness: X X X\n"


def test_zero_round_json(capsys):
    code, out, err = run(capsys, "zero-round", MIS, "--json")
    assert code == 0
    assert json.loads(out) == {"solvable": False, "witness": None}


def test_relax_check_accepts_itself(capsys):
    code, out, err = run(capsys, "relax-check", SINKLESS, SINKLESS)
    assert code == 0
    assert "relaxation holds" in out


def test_relax_check_rejects_unrelated_alphabets(capsys):
    code, out, err = run(capsys, "relax-check", MIS, SINKLESS)
    assert code == 1
    assert "share an alphabet" in err


# ---------------------------------------------------------------------------
# family


def test_family_gen_single_color_member(capsys):
    code, out, err = run(capsys, "family", "gen", "--delta", "3")
    assert code == 0
    assert out == (
        "delta: 3\n"
        "nodes:\n"
        "A1 B1^2\n"
        "C0_1^3\n"
        "edges:\n"
        "A1 C0_1\n"
        "B1^2\n"
        "B1 C0_1\n")


def test_family_verify_edge_lemma(capsys):
    code, out, err = run(capsys, "family", "verify", "--lemma", "edge",
                         "--delta", "3", "--beta", "1", "--v", "1,0", "--x", "0")
    assert code == 0
    assert "lemma edge verified" in out


def test_family_verify_node_lemma(capsys):
    code, out, err = run(capsys, "family", "verify", "--lemma", "node",
                         "--delta", "4", "--beta", "1", "--v", "1,1", "--x", "0")
    assert code == 0
    assert "lemma node verified" in out


def test_family_verify_binomial_chain(capsys):
    code, out, err = run(capsys, "family", "verify", "--lemma", "binomial")
    assert code == 0
    assert "up to 10" in out


def test_family_verify_sequence_lists_each_step(capsys):
    code, out, err = run(capsys, "family", "verify", "--lemma", "sequence",
                         "--delta", "16", "--beta", "1")
    assert code == 0
    assert out == (
        "chain of 2 members at delta=16, beta=1:\n"
        "  step 0: size 1, x 0\n"
        "  step 1: size 2, x 1\n"
        "growth invariant holds at every step\n")


def test_family_gen_rejects_bad_vectors(capsys):
    code, out, err = run(capsys, "family", "gen", "--delta", "3",
                         "--beta", "2", "--v", "1,0")
    assert code == 1
    assert "error:" in err


# ---------------------------------------------------------------------------
# simulate and bounds


def test_simulate_cycle_text_output(capsys):
    code, out, err = run(capsys, "simulate", "--graph", "cycle", "--n", "7",
                         "--beta", "1", "--seed", "11")
    assert code == 0
    assert out == (
        "graph: 7 nodes\n"
        "colors: 3\n"
        "rounds: 2\n"
        "ruling set size: 3\n"
        "violations: none\n")


def test_simulate_regular_json_with_validated_steps(capsys):
    code, out, err = run(capsys, "simulate", "--graph", "regular",
                         "--delta", "3", "--n", "14", "--beta", "2",
                         "--seed", "5", "--validate-steps", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True
    assert data["rounds"] == 2
    assert data["violations"] is None


def test_simulate_round_trips_a_graph_file(capsys, tmp_path):
    path = tmp_path / "g.edges"
    code, _, _ = run(capsys, "simulate", "--graph", "cycle", "--n", "5",
                     "--beta", "1", "--seed", "1", "--graph-out", str(path))
    assert code == 0
    code, out, err = run(capsys, "simulate", "--graph-file", str(path),
                         "--beta", "1", "--seed", "1")
    assert code == 0
    assert "graph: 5 nodes" in out


def test_bounds_probability_table_csv(capsys):
    code, out, err = run(capsys, "bounds", "--which", "prob", "--delta", "3",
                         "--beta", "1", "--steps", "1", "--log2p", "-100",
                         "--t", "1", "--csv")
    assert code == 0
    assert out.splitlines() == [
        "delta,j,log2_failure,vacuous,zero_round_floor,too_fast_log2(t=1)",
        "3,1,2.75,yes,0.000152416,-81"]


def test_bounds_upper_table(capsys):
    code, out, err = run(capsys, "bounds", "--which", "upper",
                         "--colors", "3,6,10", "--beta", "1,2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split() == ["beta", "colors", "rounds"]
    assert lines[1].split() == ["1", "3", "2"]
    assert lines[4].split() == ["2", "3", "1"]


# ---------------------------------------------------------------------------
# error surface


def test_missing_file_reports_cleanly(capsys):
    code, out, err = run(capsys, "re", "/nonexistent.problem")
    assert code == 1
    assert err.startswith("error: cannot read")


def test_parse_errors_carry_the_line(capsys, tmp_path):
    path = tmp_path / "bad.problem"
    path.write_text("delta: x\n")
    code, out, err = run(capsys, "re", str(path))
    assert code == 1
    assert "line 1" in err


def test_unknown_subcommand_is_a_usage_error(capsys):
    assert main(["frobnicate"]) == 2
