"""State abstraction: plan first, then generalize.

Each positive example ``p(a, b)`` is mapped to the acyclic sequences of BK
steps leading from ``a`` to ``b``.  Concrete states along a sequence are
replaced by opaque ids ``st(example, sequence, position)``, so the search
never sees object-level terms.  Negative examples (and the functional test)
are checked against the concrete BK by a tabled top-down evaluator.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

from .core.model import ResourceError, StrategyError, instantiate
from .core.terms import Struct, term_key
from .deduce import Store

SEQ_MAX_LEN = 64
SEQ_MAX_COUNT = 256
MAX_FRONTIER = 200_000
MAX_STATES = 1_000_000


@dataclass(frozen=True)
class Sequence:
    example_id: int
    seq_id: int
    start: object
    steps: tuple  # ((pred, from_state, to_state), ...)

    @property
    def states(self) -> tuple:
        return (self.start,) + tuple(s[2] for s in self.steps)

    def __len__(self):
        return len(self.steps)


class PosTuple(NamedTuple):
    example_id: int
    pred: str
    start: Struct
    end: Struct


def abstract_state(e: int, s: int, i: int) -> Struct:
    return Struct("st", (e, s, i))


def _state_graph(start, bk, max_len, max_states, deadline=None):
    out = {}
    depth = {start: 0}
    frontier = [start]
    d = 0
    while frontier and d < max_len:
        nxt = []
        for t in frontier:
            succ = sorted(bk.successors(t), key=lambda pz: (pz[0], term_key(pz[1])))
            out[t] = succ
            for _, z in succ:
                if z not in depth:
                    depth[z] = d + 1
                    if len(depth) > max_states:
                        raise ResourceError(f"state space exceeds {max_states} states")
                    nxt.append(z)
        if deadline is not None:
            from .solver import _check
            _check(deadline)
        frontier = nxt
        d += 1
    return out


def enumerate_sequences(example, bk, max_len: int = SEQ_MAX_LEN, max_count: int = SEQ_MAX_COUNT,
                        example_id: int = 1, max_states: int = MAX_STATES, deadline=None):
    """Acyclic BK step sequences from the example's first argument to its
    second, shortest first.  Returns ``(sequences, capped)``; ``capped`` is
    true when a length, count or frontier cap cut the enumeration short."""
    _, a, b = example
    if a == b:
        return [Sequence(example_id, 1, a, ())], False
    out = _state_graph(a, bk, max_len, max_states, deadline)
    # distance to the target over the explored graph
    rev = {}
    for t, succ in out.items():
        for p, z in succ:
            rev.setdefault(z, []).append(t)
    dist = {b: 0}
    q = deque([b])
    while q:
        z = q.popleft()
        for t in rev.get(z, ()):
            if t not in dist:
                dist[t] = dist[z] + 1
                q.append(t)
    if a not in dist:
        return [], False
    found = []
    capped = False
    queue = deque([(a, (), frozenset([a]))])
    while queue:
        t, steps, seen = queue.popleft()
        for p, z in out.get(t, ()):
            if z in seen or z not in dist or len(steps) + 1 + dist[z] > max_len:
                if z not in seen and z in dist:
                    capped = True
                continue
            nsteps = steps + ((p, t, z),)
            if z == b:
                found.append(Sequence(example_id, len(found) + 1, a, nsteps))
                if len(found) >= max_count:
                    return found, bool(queue) or capped
                continue
            queue.append((z, nsteps, seen | {z}))
            if len(queue) > MAX_FRONTIER:
                return found, True
    return found, capped


def detect_deterministic(seqs_per_example) -> bool:
    """True iff every positive example has exactly one sequence."""
    return all(len(s) == 1 for s in seqs_per_example)


def abstract_atoms(seqs, bk, pred_of_example=None):
    """Unary and binary abstract atoms plus one PosTuple per sequence.

    ``pred_of_example`` maps example ids to their predicate (default ``p``).
    """
    unary, binary, tuples = set(), set(), []
    un_preds = sorted(set(bk.facts1) | set(bk.builtins1))
    for seq in seqs:
        e, s = seq.example_id, seq.seq_id
        for i, c in enumerate(seq.states, 1):
            st = abstract_state(e, s, i)
            for r in un_preds:
                if bk.eval_unary(r, c):
                    unary.add((r, st))
        for i, (p, _, _) in enumerate(seq.steps, 1):
            binary.add((p, abstract_state(e, s, i), abstract_state(e, s, i + 1)))
        pred = pred_of_example(e) if pred_of_example else "p"
        tuples.append(PosTuple(e, pred, abstract_state(e, s, 1), abstract_state(e, s, len(seq) + 1)))
    return unary, binary, tuples


# -- concrete negative check ----------------------------------------------------

class TopDown:
    """Tabled top-down evaluation of forward-chained rules over concrete BK,
    called with the first argument bound.

    ``answers(p, a)`` is the set of ``z`` with ``p(a, z)`` entailed.  Tables
    are completed by a worklist over caller/callee dependencies."""

    def __init__(self, rules, bk, cache=None, deadline=None):
        self.bk = bk
        self.deadline = deadline
        self.rules = {}
        for r in rules:
            self.rules.setdefault(r.head.pred, []).append(self._plan(r))
        self.table = {}
        self.callers = {}
        self.work = []
        self.current = None
        self.cache = {} if cache is None else cache

    @staticmethod
    def _plan(rule):
        x, y = rule.head.args
        binary = [l for l in rule.body if len(l.args) == 2]
        unary = [l for l in rule.body if len(l.args) == 1]
        return (x, y, binary, unary)

    def _call(self, p, a):
        key = (p, a)
        got = self.table.get(key)
        if got is None:
            got = self.table[key] = set()
            self.callers[key] = set()
            self.work.append(key)
        if self.current is not None:
            self.callers[key].add(self.current)
        return got

    def _bk2(self, p, a):
        key = (p, a)
        got = self.cache.get(key)
        if got is None:
            got = self.cache[key] = self.bk.eval_binary(p, a)
        return got

    def _unary(self, p, t) -> bool:
        key = (p, t, None)
        got = self.cache.get(key)
        if got is None:
            if p in self.bk.facts1 or p in self.bk.builtins1:
                got = self.bk.eval_unary(p, t)
            else:
                got = False
            self.cache[key] = got
        return got

    def _eval(self, p, a) -> set:
        out = set()
        bk = self.bk
        for x, y, binary, unary in self.rules.get(p, ()):
            envs = [{x: a}]
            pending = list(unary)
            envs = self._filter(envs, pending)
            for lit in binary:
                nxt = []
                u, v = lit.args
                for env in envs:
                    if lit.pred in self.rules:
                        zs = self._call(lit.pred, env[u])
                    elif lit.pred in bk.facts2 or lit.pred in bk.builtins2:
                        zs = self._bk2(lit.pred, env[u])
                    else:
                        zs = ()
                    for z in zs:
                        if v in env:
                            if env[v] == z:
                                nxt.append(env)
                        else:
                            e2 = dict(env)
                            e2[v] = z
                            nxt.append(e2)
                envs = self._filter(nxt, pending)
                if not envs:
                    break
            for env in envs:
                out.add(env[y])
        return out

    def _filter(self, envs, pending):
        if not envs or not pending:
            return envs
        ready = [l for l in pending if all(v in envs[0] for v in l.args)]
        for l in ready:
            pending.remove(l)
            envs = [e for e in envs if self._unary(l.pred, e[l.args[0]])]
        return envs

    def answers(self, p, a) -> set:
        self.current = None
        got = self._call(p, a)
        steps = 0
        while self.work:
            steps += 1
            if steps % 512 == 0 and self.deadline is not None:
                from .solver import _check
                _check(self.deadline)
            key = self.work.pop()
            self.current = key
            res = self._eval(*key)
            cur = self.table[key]
            if not res <= cur:
                cur |= res
                self.work.extend(self.callers[key])
        self.current = None
        return got


class FailNeg:
    """Monotone external check: does ``B ∪ H`` derive a negative example (or,
    in functional mode, a wrong output for a positive input)?  Memoized by
    hypothesis."""

    def __init__(self, problem, bk, deadline=None):
        self.problem = problem
        self.bk = bk
        self.deadline = deadline
        self.memo = {}
        self.cache = {}
        self.rules = {}
        self.calls = 0

    def __call__(self, hypothesis, store=None) -> bool:
        key = frozenset(hypothesis)
        got = self.memo.get(key)
        if got is None:
            self.calls += 1
            got = self.memo[key] = self.evaluate(key)
        return got

    def evaluate(self, hypothesis) -> bool:
        rules = []
        for s in sorted(hypothesis):
            r = self.rules.get(s)
            if r is None:
                r = self.rules[s] = instantiate(self.problem.metarule(s.rule_id), s)
            rules.append(r)
        td = TopDown(rules, self.bk, self.cache, self.deadline)
        for p, a, b in self.problem.neg:
            if b in td.answers(p, a):
                return True
        if self.problem.functional:
            for p, a, b in self.problem.pos:
                ans = td.answers(p, a)
                if ans and (len(ans) > 1 or b not in ans):
                    return True
        return False


def fail_neg(hypothesis, problem, bk) -> bool:
    return FailNeg(problem, bk).evaluate(frozenset(hypothesis))


# -- space for the search ---------------------------------------------------------

def build_sa_space(problem, bk, stats, max_len=SEQ_MAX_LEN, max_count=SEQ_MAX_COUNT, deadline=None):
    from .solver import Space, check_bk_rules

    if not problem.is_forward_chained():
        raise StrategyError("state abstraction needs forward-chained meta-rules")
    if not bk.extensional:
        raise StrategyError("state abstraction needs extensional BK")
    check_bk_rules(problem, bk)
    all_seqs = []
    per_example = []
    for e, ex in enumerate(problem.pos, 1):
        seqs, capped = enumerate_sequences(ex, bk, max_len, max_count, e, deadline=deadline)
        stats.caps_hit = stats.caps_hit or capped
        per_example.append(seqs)
        all_seqs.extend(seqs)
    preds = {e: ex[0] for e, ex in enumerate(problem.pos, 1)}
    unary, binary, tuples = abstract_atoms(all_seqs, bk, preds.get)
    base = Store()
    for a in sorted(binary, key=_akey):
        base.add(a)
    for a in sorted(unary, key=_akey):
        base.add(a)
    stats.sequences = len(all_seqs)
    stats.abstract_states = sum(len(s) + 1 for s in all_seqs)
    stats.import_atoms = base.size
    goals = []
    for e in range(1, len(problem.pos) + 1):
        goals.append(tuple((t.pred, t.start, t.end) for t in tuples if t.example_id == e))
    fn = FailNeg(problem, bk, deadline)
    space = Space(
        problem=problem,
        base=base,
        goals=goals,
        idb=frozenset(problem.example_preds),
        binary=tuple(bk.binary_preds),
        unary=tuple(bk.unary_preds),
        neg_failed=fn,
        use_store_negs=False,
    )
    space.deterministic = detect_deterministic(per_example)
    return space


def _akey(atom):
    return (atom[0],) + tuple(term_key(x) for x in atom[1:])


def solve_sa(problem, max_n: int = 8, max_skolems=None, timeout=600.0, bk=None,
             seq_max_len: int = SEQ_MAX_LEN, seq_max_count: int = SEQ_MAX_COUNT):
    from .solver import iterative_deepening

    return iterative_deepening(problem, "sa", max_n, max_skolems, timeout, bk,
                               seq_max_len, seq_max_count)
