import random

import pytest
from hypothesis import given, settings, strategies as st

from milkit import parse_problem
from milkit.bk import BkBase
from milkit.core.model import MetaSub, StrategyError, make_problem, library
from milkit.core.terms import Struct
from milkit.solver import Stats, solve
from milkit.stateabs import (
    FailNeg, abstract_atoms, abstract_state, build_sa_space, detect_deterministic,
    enumerate_sequences, fail_neg,
)
from oracles import all_metasubs, simple_paths


def _load(name):
    return parse_problem(open(f"problems/{name}.mil").read())


def test_example6_single_sequence():
    p = _load("example6")
    bk = BkBase.from_problem(p)
    seqs, capped = enumerate_sequences(p.pos[0], bk)
    assert not capped
    assert len(seqs) == 1
    (seq,) = seqs
    assert len(seq) == 8
    assert [s[0] for s in seq.steps] == ["switch", "remove"] * 4
    assert seq.states[0] == tuple("cabab") and seq.states[-1] == ("c",)
    assert detect_deterministic([seqs])


def test_example6_abstract_atoms():
    p = _load("example6")
    bk = BkBase.from_problem(p)
    seqs, _ = enumerate_sequences(p.pos[0], bk)
    unary, binary, tuples = abstract_atoms(seqs, bk)
    assert ("switch", abstract_state(1, 1, 1), abstract_state(1, 1, 2)) in binary
    assert ("remove", abstract_state(1, 1, 2), abstract_state(1, 1, 3)) in binary
    assert len(binary) == 8
    # [a,c,b,a,b] is the only state starting with a besides [a,c,b]
    assert ("firstA", abstract_state(1, 1, 2)) in unary
    assert ("firstA", abstract_state(1, 1, 1)) not in unary
    assert tuples[0].start == Struct("st", (1, 1, 1))
    assert tuples[0].end == Struct("st", (1, 1, 9))


def _graph_bk(rng, nodes=6, p_edge=0.35):
    facts = []
    for i in range(nodes):
        for j in range(nodes):
            if i != j and rng.random() < p_edge:
                facts.append((rng.choice(["e", "f"]), f"n{i}", f"n{j}"))
    return BkBase(facts=facts)


@pytest.mark.parametrize("seed", range(50))
def test_sequences_match_path_oracle(seed):
    rng = random.Random(seed)
    bk = _graph_bk(rng)
    seqs, capped = enumerate_sequences(("p", "n0", "n5"), bk)
    assert not capped
    got = [s.steps for s in seqs]
    assert len(set(got)) == len(got)
    assert set(got) == simple_paths(bk, "n0", "n5")
    # shortest first, all states pairwise distinct
    assert [len(s) for s in seqs] == sorted(len(s) for s in seqs)
    for s in seqs:
        assert len(set(s.states)) == len(s.states)


def test_sequence_caps():
    bk = BkBase(facts=[("e", f"n{i}", f"n{j}") for i in range(6) for j in range(6) if i != j])
    seqs, capped = enumerate_sequences(("p", "n0", "n5"), bk, max_count=5)
    assert len(seqs) == 5 and capped
    seqs, capped = enumerate_sequences(("p", "n0", "n5"), bk, max_len=2)
    assert capped and all(len(s) <= 2 for s in seqs)


def test_fail_neg_example7a():
    p = _load("example7a")
    bk = BkBase.from_problem(p)
    assert fail_neg({MetaSub("ident", ("p", "q"))}, p, bk)
    assert not fail_neg({MetaSub("ident", ("p", "r"))}, p, bk)
    assert not fail_neg(set(), p, bk)


def test_fail_neg_functional():
    p = make_problem(facts=[("q", "a", "b"), ("q", "a", "c")], pos=[("p", "a", "b")],
                     metarules=library("ident"), functional=True)
    assert fail_neg({MetaSub("ident", ("p", "q"))}, p, BkBase.from_problem(p))


_E6 = _load("example6")
_E6_SUBS = all_metasubs(_E6, 1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(_E6_SUBS), max_size=4, unique=True), st.sampled_from(_E6_SUBS))
def test_fail_neg_monotone(h, extra):
    check = FailNeg(_E6, BkBase.from_problem(_E6))
    if check(frozenset(h)):
        assert check(frozenset(h) | {extra})


def test_sa_rejects_non_forward_chained():
    p = make_problem(facts=[("q", "a", "b")], pos=[("p", "b", "a")], metarules=library("inverse"))
    with pytest.raises(StrategyError):
        build_sa_space(p, BkBase.from_problem(p), Stats())
    assert solve(p, "sa").status == "error"


def test_sa_example6():
    r = solve(_E6, "sa")
    assert r.solved and r.size == 4 and r.k == 1
    assert r.stats.sequences == 1
