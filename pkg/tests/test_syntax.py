import pytest
from hypothesis import given, settings, strategies as st

from milkit import ParseError, parse_hypothesis, parse_problem, print_hypothesis
from milkit.bench import gen_b1, gen_b2, gen_b3
from milkit.core.model import LIBRARY, MetaSub, induced_program, library, make_problem
from milkit.core.syntax import canonical_renaming, format_problem, metagol_names, same_modulo_renaming


@pytest.mark.parametrize("text, fragment", [
    ("pos p(a,b).", "no meta-rules"),
    ("#metarule ident.", "no positive"),
    ("#metarule ident.\npos p(a).", "non-binary"),
    ("#metarule ident.\n#builtin nosuch/2.\npos p(a,b).", "unknown builtin"),
    ("#metarule ident.\n#frobnicate.\npos p(a,b).", "unknown directive"),
    ("#metarule ident.\nwibble p(a,b).", "unknown statement"),
    ("#metarule ident.\nrule q(X,Y) :- r(X).\npos p(a,b).", "does not occur"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as ei:
        parse_problem(text)
    assert fragment in str(ei.value)


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as ei:
        parse_problem("#metarule ident.\npos p(a,b).\npos p(a b).\n")
    assert "3" in str(ei.value)


def test_example_file_parses():
    p = parse_problem(open("problems/example1.mil").read())
    assert p.example_preds == ("a",)
    assert len(p.facts) == 4 and len(p.pos) == 3 and len(p.neg) == 1
    assert [r.id for r in p.metarules] == ["ident", "chain"]


def test_forward_chained():
    assert make_problem(pos=[("p", "a", "b")], metarules=library("ident", "chain")).is_forward_chained()
    assert not make_problem(pos=[("p", "a", "b")], metarules=library("inverse")).is_forward_chained()


def test_induced_program():
    h = {MetaSub("chain", ("p", "q", "r"))}
    (rule,) = induced_program(h, [LIBRARY["chain"]])
    assert rule.head.pred == "p"
    assert [l.pred for l in rule.body] == ["q", "r"]
    assert rule.body[0].args[0] == rule.head.args[0]
    assert rule.body[1].args[1] == rule.head.args[1]
    assert rule.body[0].args[1] == rule.body[1].args[0]


def _generated(i):
    kind = i % 3
    if kind == 0:
        return gen_b1(1 + i % 6, seed=i)
    if kind == 1:
        return gen_b2(4 + 2 * (i % 3), seed=i)
    return gen_b3(1 + i % 3, seed=i, max_customers=4)


@pytest.mark.parametrize("i", range(50))
def test_problem_round_trip(i):
    p = _generated(i)
    text = format_problem(p)
    q = parse_problem(text)
    assert format_problem(q) == text
    assert q.pos == p.pos and q.neg == p.neg
    assert q.builtins == p.builtins and q.functional == p.functional


_PREDS = ["p", "p1", "p2", "f", "m"]


@st.composite
def hypotheses(draw):
    subs = set()
    for _ in range(draw(st.integers(1, 5))):
        if draw(st.booleans()):
            subs.add(MetaSub("ident", (draw(st.sampled_from(["p", "p1", "p2"])), draw(st.sampled_from(["f", "m"])))))
        else:
            subs.add(MetaSub("chain", (draw(st.sampled_from(["p", "p1", "p2"])),
                                       draw(st.sampled_from(_PREDS)), draw(st.sampled_from(_PREDS)))))
    return frozenset(subs)


_HPROB = make_problem(facts=[("f", "a", "b"), ("m", "b", "c")], pos=[("p", "a", "c")],
                      metarules=library("ident", "chain"))


@settings(max_examples=50, deadline=None)
@given(hypotheses())
def test_hypothesis_round_trip(h):
    text = print_hypothesis(h, _HPROB)
    assert parse_hypothesis(text, _HPROB) == h


def test_renaming_equivalence():
    h1 = frozenset({MetaSub("ident", ("p1", "f")), MetaSub("chain", ("p", "p1", "m"))})
    h2 = frozenset({MetaSub("ident", ("p2", "f")), MetaSub("chain", ("p", "p2", "m"))})
    h3 = frozenset({MetaSub("ident", ("p2", "m")), MetaSub("chain", ("p", "p2", "m"))})
    assert same_modulo_renaming(h1, h2, _HPROB)
    assert not same_modulo_renaming(h1, h3, _HPROB)
    assert canonical_renaming(h2, _HPROB) == h1


def test_metagol_names():
    h = frozenset({MetaSub("ident", ("p1", "f")), MetaSub("chain", ("p", "p1", "m"))})
    names = metagol_names(h, _HPROB)
    assert names["p1"] == "p_1"
    assert "p_1(A,B):-f(A,B)." in print_hypothesis(h, _HPROB, names)
