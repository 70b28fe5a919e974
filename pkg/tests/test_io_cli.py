import io
import json

import pytest

from msgames import cli
from msgames.cli import (EXIT_BUDGET, EXIT_DUPLICATOR, EXIT_NO_SEPARATOR, EXIT_OK, EXIT_SPOILER,
                         EXIT_USAGE, main)
from msgames.evaluation import is_separating
from msgames.formulas import all_vars, parse_formula
from msgames.games import DUPLICATOR, SPOILER, decide_ms
from msgames.instances import LO, RT3, RT4, two_color_structures
from msgames.io import (REPORT_HEADER, RunReport, StructureFormatError, format_structure,
                        load_structure, parse_shorthand, parse_structure, structure_digest)
from msgames.measures import F_Q, apply_measure
from msgames.play import ENGINE, HUMAN, play_ms, play_sg
from msgames.structures import gen_rooted_tree
from msgames.synthesis import decide_qvt


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def report_of(text):
    return RunReport.from_text(text[text.index(REPORT_HEADER):])


# -- structure files -------------------------------------------------------------

def test_shorthands():
    assert parse_shorthand("LO:3") == LO(3)
    fig_tree = parse_shorthand("RT:[-,0,0,1,2]")
    assert fig_tree.relations == gen_rooted_tree([None, 0, 0, 1, 2]).relations
    assert parse_shorthand("foo") is None
    for bad in ("LO:0", "LO:x", "RT:[-,5]", "RT:-,0"):
        with pytest.raises(StructureFormatError):
            parse_shorthand(bad)


def test_structure_file_round_trip(tmp_path):
    for s in [LO(3), RT4(), *two_color_structures()]:
        text = format_structure(s)
        back = parse_structure(text)
        assert back.relations == s.relations and back.size == s.size
        assert structure_digest(back) == structure_digest(s)
    path = tmp_path / "tree.txt"
    path.write_text(format_structure(RT3()))
    assert load_structure(str(path)).relations == RT3().relations


def test_structure_file_with_labels_and_constants():
    text = """msgw-structure v1
# a small order with a named bottom element
name: tiny
size: 3
elements: a b c
relation </2: (a,b) (b,c) (a,c)
relation P/1: (c)
constant bot: a
"""
    s = parse_structure(text)
    assert s.name == "tiny" and s.size == 3
    assert s.relation("<") == LO(3).relation("<")
    assert s.constant("bot") == 0
    assert s.relation("P") == frozenset({(2,)})


@pytest.mark.parametrize("text", [
    "size: 2\n",
    "msgw-structure v1\nrelation </2: (0,1)\n",
    "msgw-structure v1\nsize: 2\nrelation </2: (0,5)\n",
    "msgw-structure v1\nsize: 2\nelements: a\n",
    "msgw-structure v1\nsize: 2\ncolour: red\n",
    "msgw-structure v1\nsize: 2\nrelation </2: (0,1)\nrelation </2: (1,0)\n",
])
def test_bad_structure_files(text):
    with pytest.raises(StructureFormatError):
        parse_structure(text)


def test_report_round_trip():
    rep = RunReport(command="decide qvt --left LO:3 --right LO:2 -r 3 -k 2", left=["ab"], right=["cd"],
                    winner=SPOILER, certificate="EX x1 . x1<x1", measure="qcount 1", nodes=12,
                    wall_time=0.25)
    back = RunReport.from_text(rep.to_text())
    assert back == rep
    lines = rep.to_text().splitlines()
    assert lines[0] == REPORT_HEADER
    assert [l.split(":")[0] for l in lines[1:]] == list(cli.RunReport.__dataclass_fields__)
    with pytest.raises(ValueError):
        RunReport.from_text("winner: Spoiler\n")


# -- gen ---------------------------------------------------------------------------

def test_gen(tmp_path):
    code, text = run("gen", "LO:3")
    assert code == EXIT_OK and parse_structure(text).relations == LO(3).relations
    target = tmp_path / "rt.txt"
    assert run("gen", "RT:[-,0,0,1,2]", "-o", str(target))[0] == EXIT_OK
    assert load_structure(str(target)).size == 5
    assert run("gen", "LO:0")[0] == EXIT_USAGE
    assert run("gen", str(tmp_path / "missing.txt"))[0] == EXIT_USAGE


# -- decide --------------------------------------------------------------------------

@pytest.mark.parametrize("argv, code", [
    (["decide", "ms", "--left", "LO:3", "--right", "LO:2", "-r", "2"], EXIT_DUPLICATOR),
    (["decide", "ms", "--left", "LO:3", "--right", "LO:2", "-r", "3"], EXIT_SPOILER),
    (["decide", "ms-hereditary", "--left", "LO:4", "--right", "LO:3", "-r", "3", "-k", "2"], EXIT_SPOILER),
    (["decide", "qvt", "--left", "LO:4", "--right", "LO:3", "-r", "3", "-k", "2"], EXIT_DUPLICATOR),
    (["decide", "ms-repebble", "--left", "LO:3", "--right", "LO:2", "-r", "3", "-k", "2"], EXIT_DUPLICATOR),
    (["decide", "ms-no-on-top", "--left", "RT:[-,0,1,2,0,4]", "--right", "RT:[-,0,1,0,3]", "-r", "3",
      "--on-top", "none"], EXIT_SPOILER),
    (["decide", "ms-no-dup", "--left", "LO:3*9", "--right", "LO:2*4", "-r", "2"], EXIT_DUPLICATOR),
    (["decide", "ef", "--left", "LO:3", "--right", "LO:2", "-r", "2"], EXIT_SPOILER),
    (["decide", "ef-rk", "--left", "LO:4", "--right", "LO:3", "-r", "3", "-k", "2"], EXIT_SPOILER),
    (["decide", "pebble", "--left", "LO:3", "--right", "LO:2", "-k", "1"], EXIT_DUPLICATOR),
    (["decide", "sg:qrank", "--left", "LO:4", "--right", "LO:3", "-r", "3", "-k", "2"], EXIT_SPOILER),
    (["decide", "sg:fsize", "--left", "LO:3", "--right", "LO:2", "-r", "6", "-k", "2", "--exact"], EXIT_SPOILER),
])
def test_decide_exit_codes(argv, code):
    got, text = run(*argv)
    assert got == code
    rep = report_of(text)
    assert rep.winner == (SPOILER if code == EXIT_SPOILER else DUPLICATOR)
    assert rep.command == " ".join(argv)


def test_decide_report_certificate_verifies(tmp_path):
    path = tmp_path / "report.txt"
    code, text = run("decide", "qvt", "--left", "LO:3", "--right", "LO:2", "-r", "3", "-k", "2", "--report", str(path))
    assert code == EXIT_SPOILER
    rep = RunReport.from_text(path.read_text())
    f = parse_formula(rep.certificate)
    assert is_separating(f, [LO(3)], [LO(2)])
    assert apply_measure(F_Q, f) <= 3 and all_vars(f) <= {1, 2}
    assert rep.left == [structure_digest(LO(3))] and rep.right == [structure_digest(LO(2))]
    # replaying the echoed command reproduces the winner
    again, _ = run(*rep.command.split())
    assert again == code


def test_decide_from_files(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    A, B, C = two_color_structures()
    a.write_text(format_structure(A))
    b.write_text(format_structure(B))
    assert run("decide", "ms", "--left", str(a), "--right", str(b), "-r", "1")[0] == EXIT_SPOILER


@pytest.mark.parametrize("argv", [
    ["decide", "nope", "--left", "LO:3", "--right", "LO:2", "-r", "2"],
    ["decide", "ms", "--left", "LO:3", "-r", "2"],
    ["decide", "ms", "--left", "LO:3", "--right", "LO:2"],
    ["decide", "ef", "--left", "LO:3", "--left", "LO:4", "--right", "LO:2", "-r", "2"],
    ["decide", "qvt", "--left", "LO:3", "--right", "LO:2", "-r", "3", "-k", "2", "--measure", "qrank"],
    ["decide", "ms", "--left", "LO:3", "--right", "LO:2", "-r", "2", "--bogus"],
])
def test_decide_usage_errors(argv):
    assert run(*argv)[0] == EXIT_USAGE


def test_decide_budget():
    argv = ["decide", "ms-no-on-top", "--left", "RT:[-,0,1,2,0,4]", "--left", "LO:4",
            "--right", "RT:[-,0,1,0,3]", "--right", "LO:3", "-r", "3", "--node-cap", "50"]
    assert run(*argv)[0] == EXIT_BUDGET


# -- synth and classify -------------------------------------------------------------------

def test_synth():
    code, text = run("synth", "--left", "LO:3", "--right", "LO:2", "-k", "2", "--measure", "qcount", "--rmax", "5")
    assert code == EXIT_SPOILER
    rep = report_of(text)
    assert rep.measure == "qcount 3"
    f = parse_formula(rep.certificate)
    assert apply_measure(F_Q, f) == 3 and all_vars(f) <= {1, 2}
    assert is_separating(f, [LO(3)], [LO(2)])
    code, text = run("synth", "--left", "LO:4", "--right", "LO:3", "-k", "2", "--measure", "qrank", "--rmax", "5")
    assert code == EXIT_SPOILER and report_of(text).measure == "qrank 3"
    assert run("synth", "--left", "LO:2", "--right", "LO:2", "-k", "2", "--rmax", "3")[0] == EXIT_NO_SEPARATOR


PHI_ALL = "ALL x1 . EX x2 . EX x3 . ((x1<x2 & x2<x3) | (x2<x3 & x3<x1))"
PHI_EX = "EX x1 . ALL x2 . ALL x3 . ((x1<x2 & x1<x3) | (x2<x1 & x3<x1))"


def test_classify(tmp_path):
    code, text = run("classify", PHI_ALL)
    assert code == EXIT_OK
    assert "psi: NonReplicating" in text and "not psi: NonReplicating" in text
    path = tmp_path / "phi.txt"
    path.write_text(cli_phi_ex() + "\n")
    code, text = run("classify", str(path))
    assert code == EXIT_OK
    assert "\npsi: NonReplicating" in "\n" + text and "not psi: Replicating" in text
    assert "offending type: x1=x2 & x1<x3 & x2<x3" in text
    code, text = run("classify", cli_phi_ex(), "--theory", "generic")
    assert "\npsi: Replicating" in "\n" + text
    assert run("classify", "(EX x1 . x1<x1 & EX x2 . x2<x2)")[0] == EXIT_USAGE
    assert run("classify", "EX x1 . x1<x2")[0] == EXIT_USAGE
    assert run("classify", "EX x1 . (x1<x1")[0] == EXIT_USAGE


def cli_phi_ex():
    from msgames.instances import ONE_BELOW_TWO_ABOVE_TEXT
    return ONE_BELOW_TWO_ABOVE_TEXT


# -- play -------------------------------------------------------------------------------

def test_play_human_spoiler_ms_wins_after_copying():
    moves = io.StringIO("L 1\nR 1 0\nL 2 0 0\n")
    out = io.StringIO()
    sess = play_ms([LO(3)], [LO(2)], 3, spoiler=HUMAN, duplicator=ENGINE, stdin=moves, stdout=out)
    assert sess.winner == SPOILER
    # Duplicator copies LO(2) once per element in round 1
    assert sess.trace[0]["duplicator"] == [[0, 1]]


def test_play_human_duplicator_survives_two_rounds():
    # the engine has no forced win and plays on the left; the human copies every placement
    replies = io.StringIO("0 1\n0 1;0 1\n")
    sess = play_ms([LO(3)], [LO(2)], 2, spoiler=ENGINE, duplicator=HUMAN, stdin=replies, stdout=io.StringIO())
    assert sess.winner == DUPLICATOR
    assert [t["side"] for t in sess.trace] == ["left", "left"]


def test_play_illegal_moves_are_reprompted_and_quit_aborts():
    out = io.StringIO()
    sess = play_ms([LO(3)], [LO(2)], 3, stdin=io.StringIO("X 1\nL 7\nL 1\nquit\n"), stdout=out)
    assert sess.winner == ""
    assert out.getvalue().count("illegal move") == 2
    assert "session aborted" in out.getvalue()


def test_play_qvt_human_spoiler():
    line = "exists 1 1\nand 0 1 1\nexists 2 0\nclose x2<x1\nexists 2 2\nclose x1<x2\n"
    sess = play_sg([LO(3)], [LO(2)], 3, 2, stdin=io.StringIO(line), stdout=io.StringIO())
    assert sess.winner == SPOILER
    # the engine Duplicator wins whatever Spoiler does on four versus three
    line = "exists 1 1\nexists 2 2\nexists 1 3\nclose x2<x1\nresign\n"
    out = io.StringIO()
    sess = play_sg([LO(4)], [LO(3)], 3, 2, stdin=io.StringIO(line), stdout=out)
    assert sess.winner == DUPLICATOR
    assert "illegal move" in out.getvalue()


@pytest.mark.parametrize("A, B, r", [
    ([LO(3)], [LO(2)], 3), ([LO(3)], [LO(2)], 2), ([LO(4)], [LO(3)], 3),
    ([RT4(), LO(4)], [RT3(), LO(3)], 3), (list(two_color_structures()[:1]), list(two_color_structures()[1:]), 1),
])
def test_engine_against_engine_matches_solver(A, B, r):
    sess = play_ms(A, B, r, spoiler=ENGINE, duplicator=ENGINE, stdout=io.StringIO())
    assert sess.winner == decide_ms(A, B, r).winner


@pytest.mark.parametrize("A, B, r, k", [
    ([LO(3)], [LO(2)], 3, 2), ([LO(4)], [LO(3)], 3, 2), ([RT4(), LO(4)], [LO(3)], 3, 3),
])
def test_engine_tree_game_matches_solver(A, B, r, k):
    sess = play_sg(A, B, r, k, spoiler=ENGINE, stdout=io.StringIO())
    assert sess.winner == decide_qvt(A, B, r, k).winner


def test_play_cli_auto_and_trace(tmp_path):
    trace = tmp_path / "trace.json"
    code, text = run("play", "ms", "--left", "LO:3", "--right", "LO:2", "-r", "3", "--auto", "--trace", str(trace))
    assert code == EXIT_SPOILER
    data = json.loads(trace.read_text())
    assert data["winner"] == SPOILER and len(data["trace"]) == 3
    assert run("play", "qvt", "--left", "LO:3", "--right", "LO:2", "-r", "3", "-k", "2", "--auto")[0] == EXIT_SPOILER
    assert run("play", "ef", "--left", "LO:3", "--right", "LO:2", "-r", "3", "--auto")[0] == EXIT_USAGE


# -- oracle check ----------------------------------------------------------------------

def test_oracle_check_random():
    code, text = run("oracle-check", "--corpus", "random", "--count", "40", "--seed", "3")
    assert code == EXIT_OK and text.startswith("PASS 40")


def test_oracle_check_builtin_corpus():
    code, text = run("oracle-check")
    assert code == EXIT_OK and text.startswith("PASS")


def test_oracle_check_size_guard(monkeypatch):
    monkeypatch.setattr(cli, "builtin_corpus", lambda: [([LO(4)], [LO(3)], 3, 2)])
    assert run("oracle-check")[0] == EXIT_USAGE


def test_oracle_check_reports_disagreement(monkeypatch):
    monkeypatch.setattr(cli, "builtin_corpus", lambda: [([LO(3)], [LO(2)], 1, 1)])
    monkeypatch.setattr(cli, "naive_oracle_sg", lambda *a, **kw: SPOILER)
    code, text = run("oracle-check")
    assert code == EXIT_USAGE and text.startswith("FAIL")
    assert "left:" in text and "msgw-structure v1" in text
