from hypothesis import given, settings, strategies as st

from milkit import parse_problem
from milkit.baseline import OVar, _unify, _walk, topdown_learn
from milkit.core.model import library, make_problem
from milkit.solver import solve
from oracles import is_solution

CONSTS = ["a", "b", "c", "d"]
_pair = st.tuples(st.sampled_from(CONSTS), st.sampled_from(CONSTS))


def test_unify():
    x, y = OVar(1), OVar(2)
    env = _unify(x, "a", {})
    assert _walk(x, env) == "a"
    assert _unify(x, "b", env) is None
    env2 = _unify(x, y, {})
    env2 = _unify(y, "c", env2)
    assert _walk(x, env2) == "c"
    assert _unify("a", "a", {}) == {}


def test_example1():
    p = parse_problem(open("problems/example1.mil").read())
    r = topdown_learn(p)
    assert r.solved and r.size == 3 and r.k == 0
    assert is_solution(p, r.hypothesis)


def test_example6_with_invention():
    p = parse_problem(open("problems/example6.mil").read())
    r = topdown_learn(p, timeout=120)
    assert r.solved and r.size == 4 and r.k == 1


def test_functional_check():
    p = make_problem(facts=[("q", "a", "b"), ("q", "a", "c"), ("r", "a", "b")],
                     pos=[("p", "a", "b")], metarules=library("ident"), functional=True)
    r = topdown_learn(p, max_n=2)
    assert r.solved and r.hypothesis == solve(p, "general", max_n=2).hypothesis


def test_unsat_and_timeout():
    p = parse_problem(open("problems/toy_unsat.mil").read())
    assert topdown_learn(p, max_n=3).status == "unsat"
    q = parse_problem(open("problems/synthetic.mil").read())
    assert topdown_learn(q, timeout=0.001).status == "timeout"


@st.composite
def small_problems(draw):
    facts = draw(st.lists(st.tuples(st.sampled_from(["q", "r"]), st.sampled_from(CONSTS),
                                    st.sampled_from(CONSTS)), min_size=2, max_size=7, unique=True))
    pos = draw(st.lists(_pair, min_size=1, max_size=3, unique=True))
    neg = draw(st.lists(_pair.filter(lambda x: x not in pos), max_size=2, unique=True))
    return make_problem(facts=facts, pos=[("p",) + x for x in pos], neg=[("p",) + x for x in neg],
                        metarules=library("ident", "chain"))


@settings(max_examples=40, deadline=None)
@given(small_problems())
def test_agrees_with_native_search(problem):
    a = topdown_learn(problem, max_n=3, max_skolems=1, timeout=30)
    b = solve(problem, "general", max_n=3, max_skolems=1, timeout=30)
    assert a.status == b.status
    if a.solved:
        assert a.size == b.size
        assert is_solution(problem, a.hypothesis)
