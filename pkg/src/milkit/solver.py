"""Hypothesis search shared by the general, forward-chained and
state-abstraction strategies.

Per deepening step ``(n, k)`` the solver

1. grounds candidate meta-substitutions against an upper-bound closure in
   which every candidate is assumed accepted,
2. searches subsets of candidates depth first: an underived goal is picked
   and the search branches on candidates occurring in its backward cone
   over the upper bound, keeping only additions that derive a new atom of
   that cone,
3. checks negative examples after every addition (monotone, so failures are
   final) and records minimal failing subsets as nogoods.

A leaf is reached when every goal is derived and every chosen rule has a
body witness in the closure of the chosen rules alone.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional

from .bk import BkBase
from .core.model import MetaSub, MilError, ResourceError, StrategyError, instantiate, skolem_names
from .core.terms import atom_key
from .deduce import (
    CRule,
    Store,
    _index,
    add_rule,
    default_import,
    fixpoint_deduce,
    general_import,
    guarded_universe,
    has_solution,
    neg_violated,
    rule_heads,
    rule_solutions,
    saturate,
    violations,
)

MAX_CANDIDATES = 100_000
MAX_MEMO = 2_000_000


class SearchTimeout(MilError):
    pass


# -- ordering ---------------------------------------------------------------------

def ordering_table(example_preds, skolems, bk_binary) -> frozenset:
    """Pairs ``(p, q)`` with p preceding q: examples and skolems precede BK
    predicates, examples precede skolems, ``p_i`` precedes ``p_j`` iff i < j."""
    ord_ = set()
    for x in list(example_preds) + list(skolems):
        for y in bk_binary:
            ord_.add((x, y))
    for x in example_preds:
        for y in skolems:
            ord_.add((x, y))
    for i, x in enumerate(skolems):
        for y in skolems[i + 1:]:
            ord_.add((x, y))
    return frozenset(ord_)


# -- candidates -------------------------------------------------------------------

@dataclass(frozen=True)
class Candidate:
    sub: MetaSub
    rule_index: int
    crule: CRule = field(compare=False, hash=False, repr=False)

    @property
    def key(self):
        return (self.rule_index, self.sub.preds)


def _assignments(mr, heads, binary, unary, ord_):
    slots = mr.slots
    head_slot = slots[0]
    choices = []
    for s in slots[1:]:
        choices.append(binary if mr.slot_arity(s) == 2 else unary)
    constrained = {q for p, q in mr.order}
    for h in heads:
        for rest in product(*choices):
            assign = dict(zip(slots[1:], rest))
            assign[head_slot] = h
            ok = True
            for q in constrained:
                if (h, assign[q]) not in ord_:
                    ok = False
                    break
            if ok:
                yield MetaSub(mr.id, (h,) + tuple(rest))


def ground_candidates(problem, base: Store, ord_, heads, binary, unary,
                      cap: int = MAX_CANDIDATES, deadline=None):
    """Candidates whose body is satisfiable in the upper-bound closure.

    Returns ``(candidates, ub_store)``; candidates are in canonical order.
    """
    pending = []
    for idx, mr in enumerate(problem.metarules):
        for sub in _assignments(mr, heads, binary, unary, ord_):
            pending.append(Candidate(sub, idx, CRule(instantiate(mr, sub), tag=sub)))
            if len(pending) > 50 * cap:
                raise ResourceError(f"more than {50 * cap} potential meta-substitutions")
    ub = base.copy()
    accepted = []
    while True:
        _check(deadline)
        newly = [c for c in pending if has_solution(ub, c.crule)]
        if not newly:
            break
        chosen = {c.sub for c in newly}
        pending = [c for c in pending if c.sub not in chosen]
        accepted.extend(newly)
        if len(accepted) > cap:
            raise ResourceError(f"more than {cap} candidates")
        rules = [c.crule for c in accepted]
        index = _index(rules)
        for c in newly:
            add_rule(ub, c.crule, rules, index=index)
    accepted.sort(key=lambda c: c.key)
    return accepted, ub


def _check(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise SearchTimeout("timeout")


# -- search ---------------------------------------------------------------------

@dataclass
class Stats:
    candidates: int = 0
    nodes: int = 0
    nogoods: int = 0
    peak_atoms: int = 0
    probes: int = 0
    fail_neg_calls: int = 0
    sequences: int = 0
    abstract_states: int = 0
    import_atoms: int = 0
    caps_hit: bool = False

    def as_dict(self):
        return dict(self.__dict__)


@dataclass
class Space:
    """Everything a deepening step needs besides ``(n, k)``."""

    problem: object
    base: Store
    goals: list  # tuples of alternative atoms, one tuple per positive example
    idb: frozenset  # example predicates; skolems are added per k
    binary: tuple
    unary: tuple
    neg_failed: Optional[Callable] = None  # (frozenset subs, store) -> bool
    use_store_negs: bool = True


class _Search:
    """Depth-first search over hypotheses ``S`` (sets of candidates).

    At each node the underived goal with the fewest relevant candidates is
    chosen; relevant candidates are those with a ground instance in the
    goal's backward cone over the upper-bound closure.  Any solution
    extending ``S`` must add one of them, so branching on them is complete.
    Visited hypotheses are memoized, so each subset is expanded once.
    """

    def __init__(self, space: Space, candidates, ub: Store, n: int, idb, stats: Stats,
                 deadline, required=(), shared=None):
        self.space = space
        self.required = tuple(required)
        self.problem = space.problem
        self.n = n
        self.idb = idb
        self.stats = stats
        self.deadline = deadline
        self.ub = ub
        self.candidates = list(candidates)
        self.order = {c.sub: i for i, c in enumerate(self.candidates)}
        self.by_sub = {c.sub: c for c in self.candidates}
        self.by_head = {}
        for c in self.candidates:
            self.by_head.setdefault(c.sub.head, []).append(c)
        self.store = space.base.copy()
        self.store.start_trail()
        self.S = []
        self.S_set = set()
        shared = {} if shared is None else shared
        self.nogoods = shared.setdefault("nogoods", [])
        self.nogood_index = shared.setdefault("nogood_index", {})
        self.visited = set()
        self._cones = {}

    # constraint checks

    def _violated(self, subs, store) -> bool:
        sp = self.space
        if sp.use_store_negs and neg_violated(store, self.problem):
            return True
        if sp.neg_failed is not None:
            self.stats.fail_neg_calls += 1
            return sp.neg_failed(frozenset(c.sub for c in subs), store)
        return False

    def _closure_of(self, subs) -> Store:
        store = self.space.base.copy()
        rules = [c.crule for c in subs]
        saturate(store, rules, list(store.atoms()))
        return store

    def _record_nogood(self, subs, last):
        core = list(subs)
        for c in list(subs):
            if c is last or len(core) == 1:
                continue
            trial = [x for x in core if x is not c]
            if self._violated(trial, self._closure_of(trial)):
                core = trial
        ng = frozenset(x.sub for x in core)
        self.nogoods.append(ng)
        for s in ng:
            self.nogood_index.setdefault(s, []).append(ng)
        self.stats.nogoods += 1

    def _blocked(self, c) -> bool:
        subs = None
        for ng in self.nogood_index.get(c.sub, ()):
            if subs is None:
                subs = self.S_set | {c.sub}
            if ng <= subs:
                return True
        return False

    # goals

    def _derived(self, goal) -> bool:
        store = self.store
        return any(store.has(a) for a in goal)

    def _cone(self, goal) -> tuple:
        """Candidates with a ground instance in the backward cone of goal."""
        cached = self._cones.get(goal)
        if cached is not None:
            return cached
        seen = set(goal)
        queue = list(goal)
        rel = set()
        while queue:
            atom = queue.pop()
            for c in self.by_head.get(atom[0], ()):
                for _, body in rule_solutions(self.ub, c.crule, atom[1:]):
                    rel.add(c.sub)
                    for b in body:
                        if b[0] in self.idb and b not in seen:
                            seen.add(b)
                            queue.append(b)
        cached = (tuple(sorted(rel, key=self.order.__getitem__)), frozenset(seen))
        self._cones[goal] = cached
        return cached

    def _needed_heads(self, open_goals) -> set:
        """Predicates that still need a rule: open goal predicates without
        one, and (when required) skolems not yet used as a head."""
        heads = {c.sub.head for c in self.S}
        need = set()
        for g in open_goals:
            preds = {a[0] for a in g}
            if not preds & heads:
                need.add(min(preds))
        for s in self.required:
            if s not in heads:
                need.add(s)
        return need

    def run(self):
        return self._dfs()

    def _dfs(self):
        st = self.stats
        st.nodes += 1
        if st.nodes % 32 == 0:
            _check(self.deadline)
        if self.store.size > st.peak_atoms:
            st.peak_atoms = self.store.size
        open_goals = [g for g in self.space.goals if not self._derived(g)]
        if not open_goals:
            heads = {c.sub.head for c in self.S}
            if all(s in heads for s in self.required):
                return self._leaf()
        if len(self.S) >= self.n:
            return None
        need = self._needed_heads(open_goals)
        slack = self.n - len(self.S) - len(need)
        if slack < 0:
            return None
        best = None
        for g in open_goals:
            subs, atoms = self._cone(g)
            opts = [s for s in subs if s not in self.S_set]
            if slack == 0:
                opts = [s for s in opts if s.head in need]
            if best is None or len(opts) < len(best):
                best = opts
                cone_atoms = atoms
                if not opts:
                    return None
        for sub in best:
            c = self.by_sub[sub]
            key = frozenset(self.S_set | {sub})
            if key in self.visited or self._blocked(c):
                continue
            # some rule of every solution extending S derives a new atom of
            # the goal's cone right now, so other rules can wait
            store = self.store
            if not any(not store.has(h) for h in rule_heads(store, c.crule)):
                continue
            mark = store.mark()
            self.S.append(c)
            self.S_set.add(sub)
            rules = [x.crule for x in self.S]
            add_rule(store, c.crule, rules, index=_index(rules))
            if any(a in cone_atoms for a in store.trail[mark:]):
                if len(self.visited) < MAX_MEMO:
                    self.visited.add(key)
                if self._violated(self.S, self.store):
                    self._record_nogood(self.S, c)
                else:
                    res = self._dfs()
                    if res is not None:
                        return res
            self.S.pop()
            self.S_set.discard(sub)
            self.store.rollback(mark)
        return None

    def _leaf(self):
        # every chosen rule needs a body witness in the closure of the chosen
        # rules alone; a rule without one could be dropped
        for c in self.S:
            if not has_solution(self.store, c.crule):
                return None
        return frozenset(c.sub for c in self.S)


def search(space: Space, candidates, ub: Store, n: int, skolems=(), stats=None, deadline=None,
           all_skolems: bool = False, shared=None):
    """A hypothesis of at most ``n`` candidates satisfying all constraints,
    or None.  Exhaustive: returns None only if no such hypothesis exists.

    With ``all_skolems`` every skolem must head some rule; the deepening
    driver uses this because hypotheses using fewer skolems are renamings
    of ones already searched with a smaller skolem count.  ``shared`` carries
    nogoods between calls on the same space; they depend only on the
    candidates involved, so they stay valid for any ``n`` and ``k``."""
    stats = stats or Stats()
    idb = frozenset(space.idb) | frozenset(skolems)
    for g in space.goals:
        if not any(ub.has(a) for a in g):
            return None
    required = tuple(skolems) if all_skolems else ()
    return _Search(space, candidates, ub, n, idb, stats, deadline, required, shared).run()


# -- driver ---------------------------------------------------------------------

@dataclass
class Result:
    status: str  # solved | unsat | timeout | error
    hypothesis: Optional[frozenset] = None
    n: Optional[int] = None
    k: Optional[int] = None
    stats: Stats = field(default_factory=Stats)
    message: str = ""
    time_s: float = 0.0

    @property
    def solved(self) -> bool:
        return self.status == "solved"

    @property
    def size(self):
        return len(self.hypothesis) if self.hypothesis is not None else None


def check_bk_rules(problem, bk: BkBase):
    """Intensional BK rules may only mention BK predicates."""
    bk_preds = set(bk.binary_preds) | set(bk.unary_preds)
    for r in bk.rules:
        for lit in r.body:
            if lit.pred not in bk_preds:
                raise StrategyError(f"BK rule {r} uses non-BK predicate {lit.pred}")


def build_space(problem, bk: BkBase, strategy: str, stats: Stats) -> Space:
    check_bk_rules(problem, bk)
    if strategy == "fc":
        _, base = guarded_universe(problem, bk)
    elif strategy == "general":
        base = general_import(problem, bk)
    else:
        raise StrategyError(f"unknown strategy {strategy!r}")
    stats.import_atoms = base.size
    goals = [(e,) for e in problem.pos]
    return Space(
        problem=problem,
        base=base,
        goals=goals,
        idb=frozenset(problem.example_preds),
        binary=tuple(bk.binary_preds),
        unary=tuple(bk.unary_preds),
    )


def deepen(space: Space, problem, max_n: int, max_skolems: int, stats: Stats, deadline) -> Result:
    examples = list(problem.example_preds)
    all_sk = skolem_names(problem, max_skolems)
    grounded = {}
    shared = {}
    for n in range(1, max_n + 1):
        for k in range(0, min(max_skolems, n - 1) + 1):
            sk = all_sk[:k]
            if k not in grounded:
                ord_ = ordering_table(examples, sk, space.binary)
                heads = examples + list(sk)
                binary = tuple(examples) + tuple(sk) + space.binary
                grounded[k] = ground_candidates(
                    problem, space.base, ord_, heads, binary, space.unary, deadline=deadline)
            cands, ub = grounded[k]
            stats.candidates = max(stats.candidates, len(cands))
            stats.probes += 1
            h = search(space, cands, ub, n, sk, stats, deadline, all_skolems=True, shared=shared)
            if h is not None:
                return Result("solved", h, len(h), k, stats)
    return Result("unsat", None, None, None, stats, "no solution within bounds")


def iterative_deepening(problem, strategy: str = "fc", max_n: int = 8, max_skolems=None,
                        timeout: float | None = 600.0, bk: BkBase | None = None,
                        seq_max_len: int = 64, seq_max_count: int = 256) -> Result:
    """Minimal solution by exact-size deepening over ``n`` and skolem count ``k``."""
    t0 = time.monotonic()
    deadline = None if timeout is None else t0 + timeout
    bk = bk or BkBase.from_problem(problem)
    if max_skolems is None:
        max_skolems = problem.max_skolems if problem.max_skolems is not None else 3
    stats = Stats()
    try:
        if strategy == "sa":
            from .stateabs import build_sa_space
            space = build_sa_space(problem, bk, stats, seq_max_len, seq_max_count, deadline)
        elif strategy == "baseline":
            from .baseline import topdown_learn
            return topdown_learn(problem, max_n, max_skolems, timeout, bk=bk)
        else:
            space = build_space(problem, bk, strategy, stats)
        res = deepen(space, problem, max_n, max_skolems, stats, deadline)
    except SearchTimeout:
        res = Result("timeout", None, None, None, stats, "timeout")
    except (ResourceError, StrategyError) as e:
        res = Result("error", None, None, None, stats, str(e))
    res.time_s = time.monotonic() - t0
    return res


def solve(problem, strategy: str = "fc", **kw) -> Result:
    return iterative_deepening(problem, strategy, **kw)


def validate(problem, hypothesis, bk: BkBase | None = None, strategy: str | None = None) -> dict:
    """Independent re-check of a hypothesis: per-example entailment,
    per-rule productivity and ordering constraints."""
    from .core.syntax import invented_preds

    bk = bk or BkBase.from_problem(problem)
    base = default_import(problem, bk, strategy)
    store = fixpoint_deduce(hypothesis, problem, bk, base)
    report = {"examples": [], "rules": [], "violations": violations(store, problem)}
    for e in problem.pos:
        report["examples"].append(("pos", e, store.has(e)))
    for e in problem.neg:
        report["examples"].append(("neg", e, store.has(e)))
    invented = invented_preds(hypothesis, problem)
    ord_ = ordering_table(list(problem.example_preds), invented, bk.binary_preds)
    for sub in sorted(hypothesis):
        mr = problem.metarule(sub.rule_id)
        rule = instantiate(mr, sub)
        prod = has_solution(store, CRule(rule))
        assign = sub.assignment(mr)
        ordered = all((assign[p], assign[q]) in ord_ for p, q in mr.order)
        report["rules"].append((sub, prod, ordered))
    report["valid"] = not report["violations"] and all(p for _, p, _ in report["rules"])
    report["ordered"] = all(o for _, _, o in report["rules"])
    return report
