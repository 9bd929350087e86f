"""A Metagol-style learner used as the comparison baseline.

Positives are proved one after another by SLD resolution.  Meta-rules are
instantiated on demand: an unbound predicate slot is bound lazily to a BK
predicate, then to a skolem (existing, then the next fresh one), then to an
example predicate.  The hypothesis may grow up to ``n`` rules; ``n``
deepens from 1.  Negatives are only checked once all positives are proved,
so a wrong early choice is discovered late and every combination below it
is re-explored.
"""
from __future__ import annotations

import sys
import time
from itertools import count

from .bk import BkBase
from .core.model import MetaSub, MilError, skolem_names
from .core.terms import Var, term_key

DEPTH_CAP = 512


class _Timeout(MilError):
    pass


class OVar:
    __slots__ = ("id",)

    def __init__(self, i):
        self.id = i

    def __repr__(self):
        return f"_G{self.id}"


def _walk(t, env):
    while isinstance(t, OVar) and t in env:
        t = env[t]
    return t


def _unify(a, b, env):
    a, b = _walk(a, env), _walk(b, env)
    if isinstance(a, OVar):
        if a is b:
            return env
        e = dict(env)
        e[a] = b
        return e
    if isinstance(b, OVar):
        e = dict(env)
        e[b] = a
        return e
    return env if a == b else None


class _Prover:
    def __init__(self, problem, bk, n, skolems, stats, deadline):
        from .solver import ordering_table

        self.problem = problem
        self.bk = bk
        self.n = n
        self.skolems = tuple(skolems)
        self.stats = stats
        self.deadline = deadline
        self.examples = tuple(problem.example_preds)
        self.bin_prims = tuple(p for p in bk.binary_preds)
        self.un_prims = tuple(p for p in bk.unary_preds)
        self.ord = ordering_table(self.examples, self.skolems, self.bin_prims)
        self.idb = set(self.examples) | set(self.skolems)
        self.fresh = count()
        self.depth_hit = False

    # hypothesis entries are (rule_id, preds) with None for unbound slots

    def _resolve(self, ref, H):
        if isinstance(ref, str):
            return ref
        j, s = ref
        return H[j][1][s]

    def _ordered(self, mr, preds) -> bool:
        assign = dict(zip(mr.slots, preds))
        for p, q in mr.order:
            a, b = assign[p], assign[q]
            if a is not None and b is not None and (a, b) not in self.ord:
                return False
        return True

    def _bind(self, H, j, s, pred):
        rid, preds = H[j]
        preds = preds[:s] + (pred,) + preds[s + 1:]
        if not self._ordered(self.problem.metarule(rid), preds):
            return None
        return H[:j] + ((rid, preds),) + H[j + 1:]

    def _choices(self, arity, H):
        if arity == 1:
            return self.un_prims
        used = {h[1][0] for h in H}
        out = list(self.bin_prims)
        out += [s for s in self.skolems if s in used]
        fresh = [s for s in self.skolems if s not in used]
        if fresh and len(H) < self.n:
            out.append(fresh[0])
        out += list(self.examples)
        return out

    def _tick(self):
        st = self.stats
        st.nodes += 1
        if st.nodes % 256 == 0 and self.deadline is not None and time.monotonic() > self.deadline:
            raise _Timeout("timeout")

    # proof search

    def prove(self, goals, H, env, anc, grow=True):
        if not goals:
            yield H, env
            return
        (ref, args), rest = goals[0], goals[1:]
        for H2, env2, d in self.prove_lit(ref, args, H, env, anc, grow):
            yield from self.prove(rest, H2, env2, anc, grow)

    def prove_lit(self, ref, args, H, env, anc, grow):
        self._tick()
        if len(anc) > DEPTH_CAP:
            self.depth_hit = True
            return
        pred = self._resolve(ref, H)
        if pred is not None:
            yield from self._prove_bound(pred, args, H, env, anc, grow)
            return
        j, s = ref
        for choice in self._choices(len(args), H):
            if choice in self.idb and not grow and not any(h[1][0] == choice for h in H):
                continue
            H2 = self._bind(H, j, s, choice)
            if H2 is not None:
                yield from self._prove_bound(choice, args, H2, env, anc, grow)

    def _prove_bound(self, pred, args, H, env, anc, grow):
        if pred in self.idb:
            yield from self._prove_idb(pred, args, H, env, anc, grow)
        else:
            yield from self._prove_bk(pred, args, H, env, anc)

    def _prove_bk(self, pred, args, H, env, anc):
        bk = self.bk
        vals = [_walk(a, env) for a in args]
        if len(vals) == 1:
            x = vals[0]
            if isinstance(x, OVar):
                if pred in bk.facts1:
                    for t in sorted(bk.facts1[pred], key=term_key):
                        yield H, _unify(x, t, env), anc
                return
            if pred in bk.rule_unary:
                yield from self._prove_bk_rules(pred, vals, H, env, anc)
            elif bk.eval_unary(pred, x):
                yield H, env, anc
            return
        x, y = vals
        if pred in bk.rule_binary:
            yield from self._prove_bk_rules(pred, vals, H, env, anc)
            return
        if isinstance(x, OVar):
            if pred in bk.facts2:
                for a in sorted(bk.facts2[pred], key=term_key):
                    for b in sorted(bk.facts2[pred][a], key=term_key):
                        e = _unify(x, a, env)
                        if e is not None:
                            e = _unify(y, b, e)
                        if e is not None:
                            yield H, e, anc
            return
        for z in sorted(bk.eval_binary(pred, x), key=term_key):
            e = _unify(y, z, env)
            if e is not None:
                yield H, e, anc

    def _prove_bk_rules(self, pred, vals, H, env, anc):
        key = (pred,) + tuple(None if isinstance(a, OVar) else a for a in vals)
        if key in anc:
            return
        anc = anc | {key}
        for rule in self.bk.rules:
            if rule.head.pred != pred:
                continue
            ren = {}

            def r(t):
                if isinstance(t, Var):
                    if t not in ren:
                        ren[t] = OVar(next(self.fresh))
                    return ren[t]
                return t

            e = env
            for a, v in zip(rule.head.args, vals):
                e = _unify(r(a), v, e)
                if e is None:
                    break
            if e is None:
                continue
            goals = tuple((l.pred, tuple(r(a) for a in l.args)) for l in rule.body)
            for H2, e2 in self.prove(goals, H, e, anc, grow=False):
                yield H2, e2, anc

    def _instance(self, j, H, args, env):
        """Head unification and body goals for hypothesis entry ``j``."""
        rid, preds = H[j]
        mr = self.problem.metarule(rid)
        slot_ix = {s: i for i, s in enumerate(mr.slots)}
        ren = {}

        def v(name):
            if name not in ren:
                ren[name] = OVar(next(self.fresh))
            return ren[name]

        e = env
        for name, a in zip(mr.head[1:], args):
            e = _unify(v(name), a, e)
            if e is None:
                return None, ()
        goals = []
        for lit in mr.body:
            i = slot_ix[lit[0]]
            ref = preds[i] if preds[i] is not None else (j, i)
            goals.append((ref, tuple(v(x) for x in lit[1:])))
        return e, tuple(goals)

    def _prove_idb(self, pred, args, H, env, anc, grow):
        # a subgoal that is a variant of an ancestor cannot shorten a proof
        key = (pred,) + tuple(None if isinstance(a, OVar) else a for a in (_walk(x, env) for x in args))
        if key in anc:
            return
        anc = anc | {key}
        for j in range(len(H)):
            if H[j][1][0] != pred:
                continue
            e, goals = self._instance(j, H, args, env)
            if e is None:
                continue
            for H2, e2 in self.prove(goals, H, e, anc, grow):
                yield H2, e2, anc
        if not grow or len(H) >= self.n:
            return
        for mr in self.problem.metarules:
            preds = (pred,) + (None,) * (len(mr.slots) - 1)
            H2 = H + ((mr.id, preds),)
            e, goals = self._instance(len(H), H2, args, env)
            if e is None:
                continue
            for H3, e2 in self.prove(goals, H2, e, anc, grow):
                yield H3, e2, anc

    # driver

    def learn(self):
        goals = tuple((p, (a, b)) for p, a, b in self.problem.pos)
        for H, _ in self.prove(goals, (), {}, frozenset()):
            subs = [MetaSub(rid, preds) for rid, preds in H]
            if any(None in s.preds for s in subs) or len(set(subs)) != len(subs):
                continue
            if self._consistent(H):
                return frozenset(subs)
        return None

    def _consistent(self, H) -> bool:
        for p, a, b in self.problem.neg:
            for _ in self.prove(((p, (a, b)),), H, {}, frozenset(), grow=False):
                return False
        if self.problem.functional:
            for p, a, b in self.problem.pos:
                y = OVar(next(self.fresh))
                for _, env in self.prove(((p, (a, y)),), H, {}, frozenset(), grow=False):
                    if _walk(y, env) != b:
                        return False
        return True


def topdown_learn(problem, max_n: int = 8, max_skolems: int = 3, timeout=600.0, bk=None):
    """Smallest hypothesis found by the baseline, as a solver Result."""
    from .solver import Result, Stats

    t0 = time.monotonic()
    deadline = None if timeout is None else t0 + timeout
    bk = bk or BkBase.from_problem(problem)
    stats = Stats()
    skolems = skolem_names(problem, max_skolems)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20 * DEPTH_CAP + 1000))
    try:
        for n in range(1, max_n + 1):
            stats.probes += 1
            prover = _Prover(problem, bk, n, skolems, stats, deadline)
            h = prover.learn()
            stats.caps_hit = stats.caps_hit or prover.depth_hit
            if h is not None:
                return Result("solved", h, len(h), len({s.head for s in h} - set(problem.example_preds)),
                              stats, time_s=time.monotonic() - t0)
        res = Result("unsat", None, None, None, stats, "no solution within bounds")
    except _Timeout:
        res = Result("timeout", None, None, None, stats, "timeout")
    except RecursionError:
        res = Result("error", None, None, None, stats, "recursion limit")
    finally:
        sys.setrecursionlimit(old)
    res.time_s = time.monotonic() - t0
    return res
