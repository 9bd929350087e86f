"""Bottom-up deduction over binary/unary atoms.

:class:`Store` is an indexed atom set with an optional undo trail;
:func:`saturate` runs semi-naive evaluation of compiled definite rules.
"""
from __future__ import annotations

from collections import defaultdict

from .core.model import Lit, ResourceError, Rule, StrategyError, induced_program
from .core.terms import Var, atom_key, term_key

MAX_DEDUCED = 1_000_000
MAX_GUARD = 100_000

_EMPTY = frozenset()


class Store:
    """Binary atoms indexed both ways plus unary atoms."""

    __slots__ = ("fwd", "rev", "un", "size", "trail")

    def __init__(self):
        self.fwd = defaultdict(lambda: defaultdict(set))
        self.rev = defaultdict(lambda: defaultdict(set))
        self.un = defaultdict(set)
        self.size = 0
        self.trail = None

    def add2(self, p, a, b) -> bool:
        s = self.fwd[p][a]
        if b in s:
            return False
        s.add(b)
        self.rev[p][b].add(a)
        self.size += 1
        if self.trail is not None:
            self.trail.append((p, a, b))
        return True

    def add1(self, p, a) -> bool:
        s = self.un[p]
        if a in s:
            return False
        s.add(a)
        self.size += 1
        if self.trail is not None:
            self.trail.append((p, a))
        return True

    def add(self, atom) -> bool:
        if len(atom) == 3:
            return self.add2(*atom)
        return self.add1(*atom)

    def has2(self, p, a, b) -> bool:
        m = self.fwd.get(p)
        if m is None:
            return False
        s = m.get(a)
        return s is not None and b in s

    def has1(self, p, a) -> bool:
        s = self.un.get(p)
        return s is not None and a in s

    def has(self, atom) -> bool:
        if len(atom) == 3:
            return self.has2(*atom)
        return self.has1(*atom)

    def succ(self, p, a):
        m = self.fwd.get(p)
        if m is None:
            return _EMPTY
        return m.get(a, _EMPTY)

    def pred_of(self, p, b):
        m = self.rev.get(p)
        if m is None:
            return _EMPTY
        return m.get(b, _EMPTY)

    def pairs(self, p):
        m = self.fwd.get(p)
        if m:
            for a, bs in m.items():
                for b in bs:
                    yield a, b

    def unary(self, p):
        return self.un.get(p, _EMPTY)

    # undo support

    def start_trail(self):
        if self.trail is None:
            self.trail = []

    def mark(self) -> int:
        self.start_trail()
        return len(self.trail)

    def rollback(self, mark: int):
        trail = self.trail
        while len(trail) > mark:
            atom = trail.pop()
            if len(atom) == 3:
                p, a, b = atom
                s = self.fwd[p][a]
                s.discard(b)
                if not s:
                    del self.fwd[p][a]
                r = self.rev[p][b]
                r.discard(a)
                if not r:
                    del self.rev[p][b]
            else:
                self.un[atom[0]].discard(atom[1])
            self.size -= 1

    def copy(self) -> "Store":
        new = Store()
        for atom in self.atoms():
            new.add(atom)
        return new

    def atoms(self):
        for p, m in self.fwd.items():
            for a, bs in m.items():
                for b in bs:
                    yield (p, a, b)
        for p, ts in self.un.items():
            for a in ts:
                yield (p, a)

    def binary_atoms(self) -> frozenset:
        return frozenset(a for a in self.atoms() if len(a) == 3)

    def unary_atoms(self) -> frozenset:
        return frozenset(a for a in self.atoms() if len(a) == 2)

    def sorted_atoms(self) -> list:
        return sorted(self.atoms(), key=atom_key)

    def __len__(self):
        return self.size

    def __contains__(self, atom):
        return self.has(atom)


# -- compiled rules -------------------------------------------------------------

class CRule:
    """A definite rule compiled to variable slots.

    Arguments are encoded as ``(True, index)`` for variables and
    ``(False, term)`` for constants.
    """

    __slots__ = ("rule", "head", "body", "nvars", "_plans", "_code", "tag")

    def __init__(self, rule: Rule, tag=None):
        self.rule = rule
        self.tag = tag
        index = {}

        def enc(a):
            if isinstance(a, Var):
                if a not in index:
                    index[a] = len(index)
                return (True, index[a])
            return (False, a)

        self.body = tuple((l.pred, tuple(enc(a) for a in l.args)) for l in rule.body)
        self.head = (rule.head.pred, tuple(enc(a) for a in rule.head.args))
        self.nvars = len(index)
        self._plans = {}
        self._code = {}

    def code(self, skip, mode: str):
        """Compiled join: ``f(fwd, rev, un, seed)`` where ``seed`` holds the
        arguments of body literal ``skip``.  Mode ``heads`` returns the list
        of derived head atoms, mode ``any`` whether the body is satisfiable."""
        key = (skip, mode)
        fn = self._code.get(key)
        if fn is None:
            fn = self._code[key] = _codegen(self, skip, mode)
        return fn

    def plan(self, skip, bound: frozenset) -> tuple:
        """Greedy join order for the body minus literal ``skip``."""
        key = (skip, bound)
        p = self._plans.get(key)
        if p is not None:
            return p
        rest = [i for i in range(len(self.body)) if i != skip]
        order = []
        bound = set(bound)
        while rest:
            def score(i):
                args = self.body[i][1]
                nb = sum(1 for v, x in args if not v or x in bound)
                return (nb == len(args), nb - len(args), len(args) == 1, -i)
            best = max(rest, key=score)
            rest.remove(best)
            order.append(best)
            bound.update(x for v, x in self.body[best][1] if v)
        p = tuple(order)
        self._plans[key] = p
        return p

    def __repr__(self):
        return f"CRule({self.rule})"


def _codegen(cr: CRule, skip, mode: str):
    consts = {}
    names = {}
    lines = ["def f(fwd, rev, un, seed):"]
    heads = mode == "heads"
    if heads:
        lines.append("    out = []")
    fail = "out" if heads else "False"
    depth = [1]

    def emit(s):
        lines.append("    " * depth[0] + s)

    def const(val):
        k = f"K{len(consts)}"
        consts[k] = val
        return k

    def term(arg):
        v, x = arg
        return names[x] if v else const(x)

    def bound(arg):
        return not arg[0] or arg[1] in names

    def bind(x):
        names[x] = f"v{x}"
        return names[x]

    if skip is not None:
        for j, (v, x) in enumerate(cr.body[skip][1]):
            if v and x not in names:
                emit(f"{bind(x)} = seed[{j}]")
            else:
                emit(f"if seed[{j}] != {term((v, x))}: return {fail}")
    for i in cr.plan(skip, frozenset(names)):
        pred, args = cr.body[i]
        P = const(pred)
        if len(args) == 2:
            a, b = args
            m = f"m{i}"
            if bound(a) and bound(b):
                emit(f"{m} = fwd.get({P})")
                emit(f"if {m} is not None and {term(b)} in {m}.get({term(a)}, ()):")
                depth[0] += 1
            elif bound(a):
                emit(f"{m} = fwd.get({P})")
                emit(f"if {m} is not None:")
                depth[0] += 1
                A = term(a)
                emit(f"for {bind(b[1])} in {m}.get({A}, ()):")
                depth[0] += 1
            elif bound(b):
                emit(f"{m} = rev.get({P})")
                emit(f"if {m} is not None:")
                depth[0] += 1
                B = term(b)
                emit(f"for {bind(a[1])} in {m}.get({B}, ()):")
                depth[0] += 1
            else:
                emit(f"{m} = fwd.get({P})")
                emit(f"if {m} is not None:")
                depth[0] += 1
                if a[1] == b[1]:
                    x = bind(a[1])
                    emit(f"for {x}, bs{i} in {m}.items():")
                    depth[0] += 1
                    emit(f"if {x} in bs{i}:")
                    depth[0] += 1
                else:
                    x = bind(a[1])
                    emit(f"for {x}, bs{i} in {m}.items():")
                    depth[0] += 1
                    emit(f"for {bind(b[1])} in bs{i}:")
                    depth[0] += 1
        else:
            (a,) = args
            if bound(a):
                emit(f"if {term(a)} in un.get({P}, ()):")
            else:
                emit(f"for {bind(a[1])} in un.get({P}, ()):")
            depth[0] += 1
    if heads:
        hp, hargs = cr.head
        emit(f"out.append(({const(hp)}, {', '.join(term(a) for a in hargs)}))")
    else:
        emit("return True")
    depth[0] = 1
    emit("return out" if heads else "return False")
    scope = dict(consts)
    exec("\n".join(lines), scope)
    return scope["f"]


def compile_rules(rules) -> list:
    return [r if isinstance(r, CRule) else CRule(r) for r in rules]


def _val(arg, env):
    return env[arg[1]] if arg[0] else arg[1]


def _solve(store: Store, body, order, k, env):
    """Yield once per solution of ``order[k:]`` (env mutated in place)."""
    if k == len(order):
        yield env
        return
    pred, args = body[order[k]]
    if len(args) == 2:
        (va, xa), (vb, xb) = args
        a = (env[xa] if va else xa)
        b = (env[xb] if vb else xb)
        if a is not None and b is not None:
            if store.has2(pred, a, b):
                yield from _solve(store, body, order, k + 1, env)
        elif a is not None:
            for z in tuple(store.succ(pred, a)):
                env[xb] = z
                yield from _solve(store, body, order, k + 1, env)
            env[xb] = None
        elif b is not None:
            for z in tuple(store.pred_of(pred, b)):
                env[xa] = z
                yield from _solve(store, body, order, k + 1, env)
            env[xa] = None
        else:
            same = va and vb and xa == xb
            for x, y in tuple(store.pairs(pred)):
                if same:
                    if x != y:
                        continue
                    env[xa] = x
                else:
                    env[xa] = x
                    env[xb] = y
                yield from _solve(store, body, order, k + 1, env)
            env[xa] = None
            if not same:
                env[xb] = None
    else:
        (va, xa), = args
        a = (env[xa] if va else xa)
        if a is not None:
            if store.has1(pred, a):
                yield from _solve(store, body, order, k + 1, env)
        else:
            for x in tuple(store.unary(pred)):
                env[xa] = x
                yield from _solve(store, body, order, k + 1, env)
            env[xa] = None


def _bind(args, atom_args, env) -> bool:
    for (v, x), t in zip(args, atom_args):
        if v:
            cur = env[x]
            if cur is None:
                env[x] = t
            elif cur != t:
                return False
        elif x != t:
            return False
    return True


def _head(cr: CRule, env) -> tuple:
    pred, args = cr.head
    return (pred,) + tuple(_val(a, env) for a in args)


def rule_solutions(store: Store, cr: CRule, head_args=None):
    """Yield ``(head_atom, body_atoms)`` for every ground instance of ``cr``
    whose body holds in ``store``; ``head_args`` optionally fixes the head."""
    env = [None] * cr.nvars
    if head_args is not None and not _bind(cr.head[1], head_args, env):
        return
    bound = frozenset(i for i, v in enumerate(env) if v is not None)
    order = cr.plan(None, bound)
    for e in _solve(store, cr.body, order, 0, env):
        body = tuple((p,) + tuple(_val(a, e) for a in args) for p, args in cr.body)
        yield _head(cr, e), body


def has_solution(store: Store, cr: CRule, head_args=None) -> bool:
    if head_args is None:
        return cr.code(None, "any")(store.fwd, store.rev, store.un, ())
    for _ in rule_solutions(store, cr, head_args):
        return True
    return False


def rule_heads(store: Store, cr: CRule) -> list:
    """Every head atom derivable by one application of ``cr``."""
    return cr.code(None, "heads")(store.fwd, store.rev, store.un, ())


def _index(crules) -> dict:
    idx = defaultdict(list)
    for cr in crules:
        for i, (pred, args) in enumerate(cr.body):
            idx[(pred, len(args))].append((cr, i))
    return idx


def saturate(store: Store, rules, delta, cap: int = MAX_DEDUCED, index=None) -> int:
    """Semi-naive closure of ``store`` under ``rules`` given the atoms in
    ``delta`` are new.  Returns the number of atoms added."""
    crules = compile_rules(rules)
    if not crules:
        return 0
    idx = index if index is not None else _index(crules)
    queue = list(delta)
    added = 0
    qi = 0
    while qi < len(queue):
        atom = queue[qi]
        qi += 1
        pending = []
        seed = atom[1:]
        fwd, rev, un = store.fwd, store.rev, store.un
        for cr, i in idx.get((atom[0], len(atom) - 1), ()):
            pending.extend(cr.code(i, "heads")(fwd, rev, un, seed))
        for h in pending:
            if store.add(h):
                added += 1
                queue.append(h)
        if store.size > cap:
            raise ResourceError(f"deduction exceeds {cap} atoms")
    return added


def add_rule(store: Store, cr: CRule, all_rules, cap: int = MAX_DEDUCED, index=None) -> int:
    """Add one rule to a store already closed under the others."""
    heads = rule_heads(store, cr)
    delta = [h for h in heads if store.add(h)]
    if store.size > cap:
        raise ResourceError(f"deduction exceeds {cap} atoms")
    return len(delta) + saturate(store, all_rules, delta, cap, index)


# -- problem-level operations ---------------------------------------------------

def hypothesis_rules(hypothesis, problem, bk=None) -> list:
    subs = sorted(hypothesis)
    rules = [CRule(r, tag=s) for r, s in zip(induced_program(subs, problem.metarules), subs)]
    if bk is not None:
        rules += [CRule(r) for r in bk.rules]
    return rules


def fixpoint_deduce(hypothesis, problem, bk, imported: Store, cap: int = MAX_DEDUCED) -> Store:
    """Least fixpoint of the induced program (plus intensional BK) over
    ``imported``.  ``imported`` is left untouched."""
    store = imported.copy()
    rules = hypothesis_rules(hypothesis, problem, bk)
    saturate(store, rules, list(store.atoms()), cap)
    return store


def guarded_universe(problem, bk, cap: int = MAX_GUARD):
    """States reachable from the examples' first arguments and the BK atoms
    they import.  Returns ``(frozenset_of_states, Store)``."""
    if not problem.is_forward_chained():
        bad = [r.id for r in problem.metarules if not _fc(r)]
        raise StrategyError(f"meta-rules not forward-chained: {', '.join(bad)}")
    if not bk.extensional:
        raise StrategyError("forward-chained import requires extensional BK")
    seen = set()
    frontier = []
    for e in problem.examples:
        if e[1] not in seen:
            seen.add(e[1])
            frontier.append(e[1])
    store = Store()
    unary = sorted(set(bk.facts1) | set(bk.builtins1))
    while frontier:
        frontier.sort(key=term_key)
        nxt = []
        for t in frontier:
            for p in unary:
                if bk.eval_unary(p, t):
                    store.add1(p, t)
            for p, z in bk.successors(t):
                store.add2(p, t, z)
                if z not in seen:
                    seen.add(z)
                    if len(seen) > cap:
                        raise ResourceError(f"guarded universe exceeds {cap} states")
                    nxt.append(z)
        frontier = nxt
    return frozenset(seen), store


def _fc(r):
    from .core.model import is_forward_chained
    return is_forward_chained(r)


def general_import(problem, bk, universe=None, cap: int = MAX_DEDUCED) -> Store:
    from .bk import bk_closure, general_universe

    if universe is None:
        universe = general_universe(problem, bk)
    binary, unary = bk_closure(bk, (), universe, cap)
    store = Store()
    for a in sorted(binary, key=atom_key):
        store.add(a)
    for a in sorted(unary, key=atom_key):
        store.add(a)
    return store


def default_import(problem, bk, strategy: str | None = None) -> Store:
    """BK atoms visible to ``strategy`` (fc when applicable by default)."""
    if strategy is None:
        strategy = "fc" if problem.is_forward_chained() and bk.extensional else "general"
    if strategy == "fc":
        return guarded_universe(problem, bk)[1]
    return general_import(problem, bk)


def entails(problem, bk, hypothesis, atom, imported: Store | None = None) -> bool:
    if imported is None:
        imported = default_import(problem, bk)
    return fixpoint_deduce(hypothesis, problem, bk, imported).has(tuple(atom))


def productive(rule: Rule, store: Store) -> bool:
    """Some ground instance of the body holds in ``store`` (a closure of
    B and H)."""
    return has_solution(store, CRule(rule))


def violations(store: Store, problem) -> list:
    """Failed constraints of a closed store: missing positives, derived
    negatives, and functional violations."""
    out = []
    for e in problem.pos:
        if not store.has(e):
            out.append(("missing pos", e))
    for e in problem.neg:
        if store.has(e):
            out.append(("derives neg", e))
    if problem.functional:
        for p, a, b in problem.pos:
            for z in sorted(store.succ(p, a), key=term_key):
                if z != b:
                    out.append(("not functional", (p, a, z)))
    return out


def neg_violated(store: Store, problem) -> bool:
    for e in problem.neg:
        if store.has2(*e):
            return True
    if problem.functional:
        for p, a, b in problem.pos:
            s = store.succ(p, a)
            if s and (len(s) > 1 or b not in s):
                return True
    return False


__all__ = [
    "Store", "CRule", "saturate", "add_rule", "fixpoint_deduce", "guarded_universe",
    "general_import", "default_import", "entails", "productive", "violations",
    "neg_violated", "rule_solutions", "has_solution", "Lit",
]
