import pytest
from hypothesis import given, settings, strategies as st

from milkit import parse_problem
from milkit.bk import BkBase
from milkit.core.model import MetaSub, library, make_problem
from milkit.solver import Stats, build_space, ordering_table, search, solve, validate
from milkit.deduce import fixpoint_deduce, neg_violated
from oracles import _precedes, _rank, all_metasubs, brute_force_min, is_solution

CONSTS = ["a", "b", "c", "d"]
_pair = st.tuples(st.sampled_from(CONSTS), st.sampled_from(CONSTS))


@st.composite
def small_problems(draw):
    facts = draw(st.lists(st.tuples(st.sampled_from(["q", "r"]), st.sampled_from(CONSTS),
                                    st.sampled_from(CONSTS)), min_size=2, max_size=7, unique=True))
    pos = draw(st.lists(_pair, min_size=1, max_size=3, unique=True))
    neg = draw(st.lists(_pair.filter(lambda x: x not in pos), max_size=2, unique=True))
    return make_problem(facts=facts, pos=[("p",) + x for x in pos], neg=[("p",) + x for x in neg],
                        metarules=library("ident", "chain"),
                        functional=draw(st.booleans()))


@settings(max_examples=40, deadline=None)
@given(small_problems(), st.sampled_from(["general", "fc"]))
def test_minimal_and_sound_against_brute_force(problem, strategy):
    r = solve(problem, strategy, max_n=3, max_skolems=1, timeout=60)
    best = brute_force_min(problem, 3, max_skolems=1)
    if best is None:
        assert r.status == "unsat"
    else:
        assert r.solved, r.message
        assert r.size == best
        assert is_solution(problem, r.hypothesis)


@settings(max_examples=25, deadline=None)
@given(small_problems())
def test_nogoods_are_sound(problem):
    """Every recorded nogood really derives a negative (or breaks functionality)."""
    bk = BkBase.from_problem(problem)
    stats = Stats()
    space = build_space(problem, bk, "general", stats)
    from milkit.solver import ground_candidates
    sk = ("p1",)
    ord_ = ordering_table(["p"], sk, space.binary)
    cands, ub = ground_candidates(problem, space.base, ord_, ["p", "p1"],
                                  ("p", "p1") + space.binary, space.unary)
    shared = {}
    search(space, cands, ub, 3, sk, stats, None, shared=shared)
    for ng in shared.get("nogoods", []):
        store = fixpoint_deduce(ng, problem, bk, space.base)
        assert neg_violated(store, problem)


def test_ordering_table_matches_oracle():
    p = parse_problem(open("problems/example1.mil").read())
    bk = BkBase.from_problem(p)
    sk = ("p1", "p2", "p3")
    table = ordering_table(list(p.example_preds), sk, bk.binary_preds)
    rank = _rank(p, sk, bk)
    preds = list(p.example_preds) + list(sk) + list(bk.binary_preds)
    for x in preds:
        for y in preds:
            assert ((x, y) in table) == _precedes(rank, x, y)


def test_candidates_respect_ordering():
    p = parse_problem(open("problems/example6.mil").read())
    got = set(all_metasubs(p, 2))
    r = solve(p, "general")
    assert r.hypothesis <= got


@pytest.mark.parametrize("name, size, k", [
    ("example1", 3, 0), ("example6", 4, 1), ("example7a", 1, 0), ("example4", 1, 0),
])
@pytest.mark.parametrize("strategy", ["general", "fc"])
def test_worked_problems(name, size, k, strategy):
    p = parse_problem(open(f"problems/{name}.mil").read())
    r = solve(p, strategy, timeout=60)
    assert r.solved and r.size == size and r.k == k
    assert is_solution(p, r.hypothesis)
    assert validate(p, r.hypothesis)["valid"]


def test_brute_force_confirms_worked_minima():
    for name, size in [("example1", 3), ("example7a", 1), ("example4", 1)]:
        p = parse_problem(open(f"problems/{name}.mil").read())
        assert brute_force_min(p, size) == size


def test_unsat():
    p = parse_problem(open("problems/toy_unsat.mil").read())
    for s in ("general", "fc", "sa", "baseline"):
        assert solve(p, s, max_n=3, timeout=30).status == "unsat"


def test_timeout():
    p = parse_problem(open("problems/synthetic.mil").read())
    r = solve(p, "baseline", timeout=0.01)
    assert r.status == "timeout"


def test_validate_flags_non_solution():
    p = parse_problem(open("problems/example7a.mil").read())
    rep = validate(p, {MetaSub("ident", ("p", "q"))})
    assert not rep["valid"]
    assert ("derives neg", ("p", "a", "c")) in rep["violations"]


def test_validate_flags_unproductive_rule():
    p = make_problem(facts=[("q", "a", "b"), ("r", "a", "b")], pos=[("p", "a", "b")],
                     metarules=library("ident", "chain"))
    # r(a,b) has no q-successor from b, so the chain rule never fires
    rep = validate(p, {MetaSub("ident", ("p", "r")), MetaSub("chain", ("p", "r", "q"))})
    assert not rep["valid"]
    assert [prod for _, prod, _ in rep["rules"]].count(False) == 1


def test_bk_rules_with_general():
    p = parse_problem("#metarule ident.\nfact q(a,b).\nrule r(X,Y) :- q(X,Y).\npos p(a,b).\n")
    assert solve(p, "general").size == 1
    assert solve(p, "fc").status == "error"


def test_deterministic_results():
    p = parse_problem(open("problems/example6.mil").read())
    a, b = solve(p, "general"), solve(p, "general")
    assert a.hypothesis == b.hypothesis
    assert a.stats.as_dict() == b.stats.as_dict()
