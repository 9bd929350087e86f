import json

import pytest

from milkit.cli import EXIT_NO_SOLUTION, EXIT_OK, EXIT_PARSE, EXIT_TIMEOUT, main, pick_strategy
from milkit import parse_problem


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_ok(capsys):
    code, out, err = run(capsys, "solve", "problems/example1.mil", "--no-timing")
    assert code == EXIT_OK
    assert out.splitlines() == ["a(A,B):-f(A,B).", "a(A,B):-f(A,C),m(C,B).", "a(A,B):-m(A,C),m(C,B)."]
    assert "status=solved" in err and "n=3" in err and "time_s" not in err


def test_solve_metagol_names(capsys):
    code, out, _ = run(capsys, "solve", "problems/example6.mil", "--names", "metagol")
    assert code == EXIT_OK
    assert "p_1(" in out and "p1(" not in out


def test_solve_json_lines(capsys):
    code, out, _ = run(capsys, "solve", "problems/example7a.mil", "--output", "json-lines")
    row = json.loads(out)
    assert code == EXIT_OK and row["status"] == "solved" and row["rules"] == ["p(A,B):-r(A,B)."]


def test_unsat_exit(capsys):
    code, out, _ = run(capsys, "solve", "problems/toy_unsat.mil", "--max-size", "3")
    assert code == EXIT_NO_SOLUTION


def test_timeout_exit(capsys):
    code, _, _ = run(capsys, "solve", "problems/synthetic.mil", "--strategy", "baseline", "--timeout", "0.01")
    assert code == EXIT_TIMEOUT


def test_parse_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.mil"
    bad.write_text("#metarule ident.\npos p(a,.\n")
    code, _, err = run(capsys, "solve", str(bad))
    assert code == EXIT_PARSE and "parse error" in err


def test_strategy_error_exit(capsys, tmp_path):
    f = tmp_path / "inv.mil"
    f.write_text("#metarule inverse.\nfact q(a,b).\npos p(b,a).\n")
    code, _, err = run(capsys, "solve", str(f), "--strategy", "fc")
    assert code == 4 and "forward-chained" in err


def test_validate(capsys, tmp_path):
    good = tmp_path / "good.pl"
    good.write_text("p(A,B):-r(A,B).\n")
    code, out, _ = run(capsys, "validate", "problems/example7a.mil", str(good))
    assert code == EXIT_OK and out.splitlines()[-1] == "valid"
    bad = tmp_path / "bad.pl"
    bad.write_text("p(A,B):-q(A,B).\n")
    code, out, _ = run(capsys, "validate", "problems/example7a.mil", str(bad))
    assert code == EXIT_NO_SOLUTION
    assert out.splitlines()[-1] == "invalid: derives neg p(a,c)"
    assert "neg p(a,c) entailed FAIL" in out


def test_validate_four_rule_example1_solution(capsys):
    code, out, _ = run(capsys, "validate", "problems/example1.mil", "problems/example1_expected.pl")
    assert code == EXIT_OK


def test_bench_csv(capsys, tmp_path):
    dest = tmp_path / "out.csv"
    code, _, err = run(capsys, "bench", "--family", "b1", "--sizes", "2", "--instances", "2",
                       "--strategies", "fc,sa", "--csv", str(dest), "--no-timing")
    assert code == EXIT_OK
    lines = dest.read_text().splitlines()
    assert lines[0].startswith("family,size,instance,strategy")
    assert len(lines) == 5
    assert "strategy" in err


def test_bench_bad_strategy(capsys):
    code, _, _ = run(capsys, "bench", "--family", "b1", "--sizes", "2", "--strategies", "magic")
    assert code == 4


def test_auto_strategy():
    assert pick_strategy(parse_problem(open("problems/example1.mil").read()), "auto") == "fc"
    p = parse_problem("#metarule ident.\nfact q(a,b).\nrule r(X,Y) :- q(X,Y).\npos p(a,b).\n")
    assert pick_strategy(p, "auto") == "general"
    assert pick_strategy(p, "sa") == "sa"


def test_missing_args():
    with pytest.raises(SystemExit):
        main(["solve"])
