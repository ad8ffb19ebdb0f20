import json
import random
import subprocess
import sys
from pathlib import Path

import pytest

from charp.arith import PolyMatrix, PolyRing
from charp.cli import cmd_pcurvature, cmd_selftest, cmd_theta_check, main
from charp.errors import ParseError
from charp.generators import connection_corpus
from charp.problem import Problem, load, parse_problem, serialize

FIXTURES = Path(__file__).parent / "fixtures"
ALL = sorted(FIXTURES.glob("*.charp"))


@pytest.mark.parametrize("path", ALL, ids=lambda p: p.stem)
def test_fixture_round_trip(path):
    pr = load(path)
    text = serialize(pr)
    again = parse_problem(text)
    assert again == pr
    assert serialize(again) == text


def test_random_round_trip():
    for p in (2, 3, 5):
        ring = PolyRing(p, ("x", "y"))
        for inst in connection_corpus(ring, random.Random(p), 12):
            c = inst.connection
            pr = Problem(ring, "dr", c.rank, c.matrices)
            assert parse_problem(serialize(pr)) == pr


def test_prime_override():
    pr = load(FIXTURES / "nonflat.charp", prime=5)
    assert pr.p == 5


@pytest.mark.parametrize(
    "text,where",
    [
        ("[context]\nprime = 3\nvars = x\n[connection]\nmode = dr\nrank = 2\nmatrix A1 = [[0, 1]]\n", (7, 13)),
        ("[context]\nprime = 3\nvars = x\n[connection]\nmode = foo\n", (5, 8)),
        ("[bogus]\n", (1, 1)),
        ("[context]\nprime = 3\nvars = x\n[connection]\nmode = dr\nrank = 1\nmatrix A1 = [[x +* 1]]\n", (7, 18)),
        ("[context]\nprime = 4\nvars = x\n", (2, 9)),
    ],
)
def test_parse_diagnostics(text, where):
    with pytest.raises(ParseError) as e:
        parse_problem(text)
    assert (e.value.line, e.value.column) == where
    assert str(e.value).startswith(f"{where[0]}:{where[1]}: ")


def test_comments_and_blank_lines():
    text = "# header\n\n[context]\nprime = 2  # the prime\nvars = x\n\n[connection]\nmode = dr\nrank = 1\nmatrix A1 = [[x]]\n"
    assert parse_problem(text) == load(FIXTURES / "rank1_p2.charp")


def test_pcurvature_fixture(capsys):
    rep = cmd_pcurvature(load(FIXTURES / "rank1_p2.charp"))
    assert "psi(D1) = x^2 + 1" in rep.human()
    assert main(["pcurvature", str(FIXTURES / "rank1_p2.charp")]) == 0
    assert "psi(D1) = x^2 + 1" in capsys.readouterr().out


def test_theta_check_command():
    rep = cmd_theta_check(PolyRing(3, ("x",)), 9)
    assert rep.ok
    assert [r.verdict for r in rep.records[:3]] == ["pass", "pass", "pass"]


def test_selftest_command():
    rep = cmd_selftest(1, 4)
    assert rep.ok and len(rep.records) == 11


@pytest.mark.parametrize(
    "argv",
    [
        ["curvature", "nonflat.charp"],
        ["horizontal", "nonflat.charp"],
        ["stratify", "gauge_flat.charp", "--level", "6"],
        ["cartier", "gauge_flat.charp"],
        ["cartier", "form.charp"],
        ["rees", "griffiths.charp"],
        ["deform", "deform.charp"],
        ["deform", "deform.charp", "--exponent", "1"],
        ["pcurvature", "conj.charp"],
        ["theta-check", "--prime", "2", "--level", "4"],
    ],
)
def test_commands_exit_zero(argv, capsys):
    argv = [str(FIXTURES / a) if a.endswith(".charp") else a for a in argv]
    assert main(argv) == 0
    out = capsys.readouterr().out
    assert out.startswith(f"charp {argv[0]}  input ")
    assert "0 failed" in out


def test_conj_fixture_membership(capsys):
    main(["pcurvature", str(FIXTURES / "conj.charp")])
    assert "p-curvature = t^p psi: yes" in capsys.readouterr().out


def test_deform_reports_exponent(capsys):
    main(["deform", str(FIXTURES / "deform.charp"), "--exponent", "1"])
    out = capsys.readouterr().out
    assert "measured t-exponent = 1" in out
    assert "conjugate condition (t^p kappa F*psi): no" in out


def test_exit_codes(tmp_path, monkeypatch, capsys):
    bad = tmp_path / "bad.charp"
    bad.write_text("[context]\nprime = 3\nvars = x\n[connection]\nmode = dr\nrank = 1\nmatrix A1 = [[x +* 1]]\n")
    assert main(["curvature", str(bad)]) == 2
    assert capsys.readouterr().err.startswith(f"{bad}:7:18: ")
    assert main(["curvature", str(tmp_path / "missing.charp")]) == 2
    assert main(["stratify", str(FIXTURES / "nonflat.charp")]) == 3
    assert main(["rees", str(FIXTURES / "rank1_p2.charp")]) == 3
    assert main(["theta-check"]) == 3
    monkeypatch.setenv("CHARP_MAX_LEVEL", "4")
    assert main(["stratify", str(FIXTURES / "gauge_flat.charp"), "--level", "9"]) == 3
    assert main(["stratify", str(FIXTURES / "gauge_flat.charp"), "--level", "3"]) == 0


def test_failed_verdict_exit_one(capsys):
    # the flat frame has degree 1, so bound 0 misses it although psi = 0
    assert main(["cartier", str(FIXTURES / "gauge_flat.charp"), "--degree-bound", "0"]) == 1
    assert "[FAIL] descent exists iff p-curvature vanishes" in capsys.readouterr().out


def test_json_records(tmp_path, capsys):
    out = tmp_path / "r.ndjson"
    assert main(["pcurvature", str(FIXTURES / "rank1_p2.charp"), "--json", str(out), "--quiet"]) == 0
    assert capsys.readouterr().out == ""
    recs = [json.loads(line) for line in out.read_text().splitlines()]
    assert [r["check"] for r in recs][0] == "p-curvature"
    assert recs[0]["witness"]["psi(D1)"] == "x^2 + 1"
    assert {r["verdict"] for r in recs} <= {"pass", "fail", "info"}
    assert len({r["inputs"] for r in recs}) == 1
    assert all("seconds" not in r for r in recs)


def test_reports_deterministic(tmp_path, capsys):
    outs = []
    for n in range(2):
        js = tmp_path / f"{n}.ndjson"
        main(["selftest", "--seed", "5", "--size", "3", "--json", str(js)])
        outs.append((capsys.readouterr().out, js.read_bytes()))
    assert outs[0] == outs[1]


def test_seed_range():
    assert main(["selftest", "--seed", str(2 ** 64)]) == 3


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "charp", "pcurvature", str(FIXTURES / "rank1_p2.charp")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "psi(D1) = x^2 + 1" in proc.stdout


def test_higgs_section_parses_over_twist():
    pr = load(FIXTURES / "deform.charp")
    tw = pr.ring.without_param().twisted()
    assert pr.higgs[1] == PolyMatrix(tw, [[0, tw.gen(0)], [0, 0]])
